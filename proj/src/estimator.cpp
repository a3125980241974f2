#include "tessera/estimator.hpp"

#include "tessera/gauss.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace tessera::est {

SimplexClass classify(const std::vector<Outcome>& outcomes) {
    bool any_f = false, any_s = false;
    for (Outcome o : outcomes) (is_failure(o) ? any_f : any_s) = true;
    if (any_f && any_s) return SimplexClass::Mixed;
    return any_f ? SimplexClass::Failure : SimplexClass::Safe;
}

namespace {
double density(const Vector& x) { return gauss::std_gauss_density(x); }
}  // namespace

Estimator::Estimator(int nvar, EstimatorParams params)
    : nvar_(nvar), params_(params), hull_(nvar) {
    int s = params_.gm_index >= 0 ? params_.gm_index : cubature::default_gm_index(nvar);
    volume_rule_ = cubature::grundmann_moeller(nvar, s);
    face_rule_ = cubature::grundmann_moeller(std::max(1, nvar - 1), s);
}

const std::vector<geom::Facet>& Estimator::hull_facets() const {
    if (tri_) return tri_->hull_facets();
    return hull_.facets();
}

double Estimator::inscribed_r() const {
    double r = geom::inscribed_radius(hull_facets());
    return std::isnan(r) ? 0.0 : r;
}

double Estimator::current_p_out() const {
    if (p_out_div_.has_value()) return *p_out_div_;
    return max_norm_ > 0.0 ? gauss::chi_sf(max_norm_, nvar_) : 1.0;
}

double Estimator::pj(int cell_id) const {
    if (!tri_) return 0.0;
    auto it = prob_.find(tri_->cell(cell_id).verts);
    return it == prob_.end() ? 0.0 : it->second.pj;
}

std::pair<double, int> Estimator::max_mixed_pj() const {
    double best = 0.0;
    int best_cell = -1;
    if (!tri_) return {best, best_cell};
    for (const auto& [key, cid] : tri_->by_key()) {
        if (tri_->cell(cid).cls != SimplexClass::Mixed) continue;
        auto it = prob_.find(key);
        double p = it == prob_.end() ? 0.0 : it->second.pj;
        if (p > best) {
            best = p;
            best_cell = cid;
        }
    }
    return {best, best_cell};
}

void Estimator::integrate_cell(int cell_id) {
    const auto& cell = tri_->cell(cell_id);
    if (cell.cls == SimplexClass::Safe) return;  // safe contents are never summed
    Matrix vm = tri_->cell_vertices(cell_id);
    auto res = cubature::integrate_simplex_adaptive(vm, volume_rule_, density);
    if (res.negative_fallback) ++neg_events_;
    CellProb cp;
    cp.pj = res.value;
    if (cell.cls == SimplexClass::Mixed) {
        std::vector<bool> failed(cell.verts.size());
        for (std::size_t k = 0; k < cell.verts.size(); ++k)
            failed[k] = is_failure(tri_->point(cell.verts[k]).outcome);
        cp.pjf = cubature::failure_share(vm, failed, density);
    }
    prob_[cell.verts] = cp;
}

EstimateSnapshot Estimator::update(const Vector& coords, Outcome outcome,
                                   std::optional<double> raw_g) {
    EDPoint p;
    p.id = static_cast<int>(points_.size());
    p.coords = coords;
    p.outcome = outcome;
    p.raw_g = raw_g;
    points_.push_back(p);
    max_norm_ = std::max(max_norm_, coords.norm());

    if (!failure_seen_ && outcome == Outcome::Safe) {
        bool changed = hull_.add_point(coords);
        hull_stale_ = hull_stale_ || changed;
    } else if (!tri_) {
        // first failure: build the triangulation over the full design
        failure_seen_ = true;
        tri_.emplace(nvar_);
        for (const auto& q : points_) tri_->add_point(q);
        prob_.clear();
        for (const auto& [key, cid] : tri_->by_key()) integrate_cell(cid);
        hull_stale_ = true;
    } else {
        auto delta = tri_->add_point(p);
        for (const auto& k : delta.removed) prob_.erase(k);
        for (const auto& k : delta.added) integrate_cell(tri_->by_key().at(k));
        hull_stale_ = hull_stale_ || delta.hull_changed;
    }

    history_.push_back(compute_snapshot());
    return history_.back();
}

EstimateSnapshot Estimator::compute_snapshot() {
    EstimateSnapshot s;
    s.nsim = nsim();
    s.R = max_norm_;

    const auto& facets = hull_facets();
    double r = facets.empty() ? std::numeric_limits<double>::quiet_NaN()
                              : geom::inscribed_radius(facets);
    s.r = std::isnan(r) ? 0.0 : r;

    s.p_out_lower = max_norm_ > 0.0 ? gauss::chi_sf(max_norm_, nvar_) : 1.0;
    s.p_out_upper = (!facets.empty() && s.r > 0.0) ? gauss::chi_sf(s.r, nvar_) : 1.0;

    if (!facets.empty() && s.r > 0.0) {
        if (hull_stale_) {
            auto faces = tri_ ? tri_->hull_boundary() : hull_.boundary();
            p_out_div_ = boundary::outside_probability(faces, nvar_, face_rule_);
            hull_stale_ = false;
        }
        s.p_out_div = p_out_div_;
    } else {
        p_out_div_.reset();
        hull_stale_ = true;  // retry once the origin is properly enclosed
    }

    if (tri_ && tri_->has_simplices()) {
        for (const auto& [key, cid] : tri_->by_key()) {
            const auto& cell = tri_->cell(cid);
            if (cell.cls == SimplexClass::Safe) continue;
            auto it = prob_.find(key);
            if (it == prob_.end()) continue;
            if (cell.cls == SimplexClass::Failure) {
                s.p_f_pure += it->second.pj;
            } else {
                s.p_mix += it->second.pj;
                s.p_f_v += it->second.pjf;
            }
        }
        s.p_f_v += s.p_f_pure;
    }
    return s;
}

Estimator::Audit Estimator::partition_audit() const {
    if (!tri_ || !tri_->has_simplices())
        throw std::logic_error("partition_audit: no triangulation");
    Audit a;
    for (const auto& [key, cid] : tri_->by_key()) {
        const auto& cell = tri_->cell(cid);
        auto it = prob_.find(key);
        if (it == prob_.end()) continue;
        if (cell.cls == SimplexClass::Failure) a.p_f_pure += it->second.pj;
        if (cell.cls == SimplexClass::Mixed) a.p_mix += it->second.pj;
    }
    for (const auto& group : tri_->clusters(SimplexClass::Safe)) {
        auto faces = tri_->cluster_boundary(group);
        a.p_safe_div +=
            boundary::region_probability(faces, boundary::FieldKind::RadialInterior, face_rule_);
    }
    auto faces = tri_->hull_boundary();
    a.p_out_div = boundary::outside_probability(faces, nvar_, face_rule_);
    a.total = a.p_f_pure + a.p_mix + a.p_safe_div + a.p_out_div;
    return a;
}

void Estimator::save_skeleton(std::ostream& os) const {
    if (tri_) {
        tri_->save(os);
        return;
    }
    // exploratory phase: serialize the points with an empty simplex block
    os << "tessera-skeleton 1\n";
    os << "dim " << nvar_ << "\n";
    os << "points " << points_.size() << "\n";
    os.precision(17);
    for (const auto& p : points_) {
        os << p.id << ' ' << (is_failure(p.outcome) ? 1 : 0) << ' ';
        if (p.raw_g.has_value()) os << *p.raw_g; else os << "nan";
        for (int v = 0; v < nvar_; ++v) os << ' ' << p.coords(v);
        os << "\n";
    }
    os << "simplices 0\nfacets 0\nend\n";
}

Estimator Estimator::replay(int nvar, EstimatorParams params,
                            const std::vector<EDPoint>& points) {
    Estimator e(nvar, params);
    for (const auto& p : points) e.update(p.coords, p.outcome, p.raw_g);
    return e;
}

const char* Estimator::csv_header() {
    return "nsim,p_f_pure,p_f_v,p_mix,p_out_lower,p_out_upper,p_out_div,r,R";
}

std::string Estimator::csv_row(const EstimateSnapshot& s) {
    std::ostringstream os;
    os.precision(12);
    os << s.nsim << ',' << s.p_f_pure << ',' << s.p_f_v << ',' << s.p_mix << ','
       << s.p_out_lower << ',' << s.p_out_upper << ',';
    if (s.p_out_div.has_value()) os << *s.p_out_div;
    os << ',' << s.r << ',' << s.R;
    return os.str();
}

} // namespace tessera::est
