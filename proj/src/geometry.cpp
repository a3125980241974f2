#include "tessera/geometry.hpp"

#include "tessera/rng.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace tessera::geom {

namespace {

constexpr double kJitterScale = 1e-10;

// Deterministic symbolic-style perturbation, applied only inside predicates.
double unit_jitter(int point_id, int coord) {
    std::uint64_t h = splitmix64((static_cast<std::uint64_t>(point_id) << 20) ^
                                 static_cast<std::uint64_t>(coord) * 0x9E3779B97F4A7C15ull);
    double u = (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;  // (0,1)
    return u - 0.5;
}

double predicate_jitter(int point_id, int coord) {
    return kJitterScale * unit_jitter(point_id, coord);
}

// Hyperplane through the column points of `pts` (d points in R^d).
// Returns false when the points are affinely dependent.
bool hyperplane(const Matrix& pts, Vector& normal, double& offset) {
    const int d = static_cast<int>(pts.rows());
    Matrix edges(d, d - 1);
    for (int j = 1; j < d; ++j) edges.col(j - 1) = pts.col(j) - pts.col(0);
    Eigen::HouseholderQR<Matrix> qr(edges);
    Matrix qrm = qr.matrixQR();
    double dmax = 0.0;
    for (int i = 0; i < d - 1; ++i) dmax = std::max(dmax, std::fabs(qrm(i, i)));
    for (int i = 0; i < d - 1; ++i) {
        if (std::fabs(qrm(i, i)) <= 1e-12 * (dmax + 1e-300)) return false;
    }
    Matrix q = qr.householderQ();
    normal = q.col(d - 1);
    offset = -normal.dot(pts.col(0));
    return true;
}

long double det_sign_ld(std::vector<std::array<long double, kMaxDim + 2>>& m, int d) {
    long double sign = 1.0L;
    for (int c = 0; c < d; ++c) {
        int piv = c;
        for (int r = c + 1; r < d; ++r)
            if (std::fabs(static_cast<double>(m[r][c])) > std::fabs(static_cast<double>(m[piv][c]))) piv = r;
        if (m[piv][c] == 0.0L) return 0.0L;
        if (piv != c) { std::swap(m[piv], m[c]); sign = -sign; }
        for (int r = c + 1; r < d; ++r) {
            long double f = m[r][c] / m[c][c];
            for (int k = c; k < d; ++k) m[r][k] -= f * m[c][k];
        }
        sign *= (m[c][c] > 0.0L) ? 1.0L : -1.0L;
    }
    return sign;
}

std::vector<int> sorted_key(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace

double simplex_volume(const Matrix& vertices) {
    const int n = static_cast<int>(vertices.rows());
    if (vertices.cols() != n + 1) throw std::invalid_argument("simplex_volume: need n+1 vertices");
    Matrix e(n, n);
    for (int j = 0; j < n; ++j) e.col(j) = vertices.col(j + 1) - vertices.col(0);
    double det = e.determinant();
    double fact = 1.0;
    for (int k = 2; k <= n; ++k) fact *= k;
    return std::fabs(det) / fact;
}

Vector circumcenter(const Matrix& vertices) {
    const int n = static_cast<int>(vertices.rows());
    if (vertices.cols() != n + 1) throw std::invalid_argument("circumcenter: need n+1 vertices");
    Matrix a(n, n);
    Vector rhs(n);
    const Vector x0 = vertices.col(0);
    double scale = 0.0;
    for (int k = 1; k <= n; ++k) {
        Vector d = vertices.col(k) - x0;
        a.row(k - 1) = 2.0 * d.transpose();
        rhs(k - 1) = vertices.col(k).squaredNorm() - x0.squaredNorm();
        scale = std::max(scale, d.norm());
    }
    Eigen::FullPivLU<Matrix> lu(a);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) throw std::domain_error("circumcenter: degenerate simplex");
    Vector c = lu.solve(rhs);
    (void)scale;
    return c;
}

namespace detail {

Vector HullEngine::jittered(int id) const {
    Vector x = points_.at(id);
    for (int v = 0; v < dim_; ++v) x(v) += predicate_jitter(id, v);
    return x;
}

int HullEngine::orientation_jittered(const std::vector<int>& verts, int pid) const {
    // sign of det(rows x_{v_i} - x_p), using perturbed long double coordinates
    Vector xp = (pid >= 0) ? jittered(pid) : interior_;
    std::vector<std::array<long double, kMaxDim + 2>> m(dim_);
    for (int i = 0; i < dim_; ++i) {
        Vector xv = jittered(verts[i]);
        for (int c = 0; c < dim_; ++c) m[i][c] = static_cast<long double>(xv(c)) - static_cast<long double>(xp(c));
    }
    long double s = det_sign_ld(m, dim_);
    return (s > 0.0L) - (s < 0.0L);
}

bool HullEngine::visible(const HFacet& f, const Vector& p, int pid) const {
    double s = f.normal.dot(p) + f.offset;
    double mag = f.normal.cwiseAbs().dot(p.cwiseAbs()) + std::fabs(f.offset);
    double tol = 1e-12 * (1.0 + mag);
    if (s > tol) return true;
    if (s < -tol) return false;
    int sp = orientation_jittered(f.verts, pid);
    if (sp == 0) return false;
    int sw = orientation_jittered(f.verts, -1);
    if (sw == 0) return s > 0.0;
    return sp != sw;
}

int HullEngine::make_facet(std::vector<int> verts) {
    Matrix pts(dim_, dim_);
    for (int i = 0; i < dim_; ++i) pts.col(i) = points_.at(verts[i]);
    Vector n;
    double b;
    if (!hyperplane(pts, n, b)) {
        // Flat facet from a cospherical tie; rebuild the plane from the
        // perturbed coordinates so that an orientation exists.
        for (int i = 0; i < dim_; ++i) pts.col(i) = jittered(verts[i]);
        if (!hyperplane(pts, n, b)) throw std::runtime_error("hull: degenerate facet");
    }
    if (n.dot(interior_) + b > 0.0) { n = -n; b = -b; }
    int id;
    if (!free_slots_.empty()) {
        id = free_slots_.back();
        free_slots_.pop_back();
    } else {
        id = static_cast<int>(facets_.size());
        facets_.emplace_back();
    }
    HFacet& f = facets_[id];
    f.verts = std::move(verts);
    f.neighbors.assign(dim_, -1);
    f.normal = std::move(n);
    f.offset = b;
    f.alive = true;
    return id;
}

void HullEngine::init(int dim, const std::vector<Vector>& coords, const std::vector<int>& ids) {
    dim_ = dim;
    if (static_cast<int>(ids.size()) != dim + 1) throw std::invalid_argument("hull init: need dim+1 points");
    for (std::size_t k = 0; k < ids.size(); ++k) {
        int id = ids[k];
        if (static_cast<int>(points_.size()) <= id) points_.resize(id + 1);
        points_[id] = coords[k];
    }
    interior_ = Vector::Zero(dim);
    for (int id : ids) interior_ += points_[id];
    interior_ /= static_cast<double>(ids.size());

    facets_.clear();
    free_slots_.clear();
    std::vector<int> fids(dim + 1);
    for (int omit = 0; omit <= dim; ++omit) {
        std::vector<int> verts;
        verts.reserve(dim);
        for (int k = 0; k <= dim; ++k)
            if (k != omit) verts.push_back(ids[k]);
        fids[omit] = make_facet(std::move(verts));
    }
    // facet omitting i and facet omitting j share the ridge without both
    for (int i = 0; i <= dim; ++i) {
        HFacet& fi = facets_[fids[i]];
        for (int j = 0; j <= dim; ++j) {
            if (i == j) continue;
            // slot of vertex ids[j] inside facet i
            for (int s = 0; s < dim; ++s) {
                if (fi.verts[s] == ids[j]) {
                    fi.neighbors[s] = fids[j];
                    break;
                }
            }
        }
    }
    ready_ = true;
}

HullEngine::Delta HullEngine::add_point(const Vector& coords, int id) {
    if (!ready_) throw std::logic_error("hull: add_point before init");
    if (static_cast<int>(points_.size()) <= id) points_.resize(id + 1);
    points_[id] = coords;

    Delta delta;
    std::vector<int> vis;
    std::vector<char> mark(facets_.size(), 0);
    for (int fid = 0; fid < static_cast<int>(facets_.size()); ++fid) {
        if (!facets_[fid].alive) continue;
        if (visible(facets_[fid], coords, id)) {
            vis.push_back(fid);
            mark[fid] = 1;
        }
    }
    if (vis.empty()) return delta;  // interior point (plain-space hulls only)
    delta.inserted = true;

    // horizon ridges -> cone of new facets
    std::map<std::vector<int>, std::pair<int, int>> open_ridges;  // sub-ridge -> (facet, slot)
    std::unordered_set<int> rewired;
    for (int fid : vis) {
        const HFacet f = facets_[fid];  // copy: slots may be reused below
        for (int i = 0; i < dim_; ++i) {
            int g = f.neighbors[i];
            if (g >= 0 && mark[g]) continue;  // interior ridge of the cavity
            std::vector<int> ridge;
            ridge.reserve(dim_);
            for (int k = 0; k < dim_; ++k)
                if (k != i) ridge.push_back(f.verts[k]);
            ridge.push_back(id);
            int nf = make_facet(std::move(ridge));
            if (static_cast<int>(mark.size()) <= nf) mark.resize(nf + 1, 0);
            delta.created.push_back(nf);
            HFacet& nfr = facets_[nf];
            nfr.neighbors[dim_ - 1] = g;  // across the ridge opposite the new point
            if (g >= 0) {
                HFacet& gr = facets_[g];
                for (int s = 0; s < dim_; ++s)
                    if (gr.neighbors[s] == fid) { gr.neighbors[s] = nf; break; }
                rewired.insert(g);
            }
            // pair the remaining ridges (each contains the new point)
            for (int k = 0; k < dim_ - 1; ++k) {
                std::vector<int> sub;
                sub.reserve(dim_ - 1);
                for (int t = 0; t < dim_; ++t)
                    if (t != k) sub.push_back(nfr.verts[t]);
                std::sort(sub.begin(), sub.end());
                auto it = open_ridges.find(sub);
                if (it == open_ridges.end()) {
                    open_ridges.emplace(std::move(sub), std::make_pair(nf, k));
                } else {
                    facets_[nf].neighbors[k] = it->second.first;
                    facets_[it->second.first].neighbors[it->second.second] = nf;
                    open_ridges.erase(it);
                }
            }
        }
    }
    if (!open_ridges.empty()) throw std::runtime_error("hull: open horizon (inconsistent predicates)");

    for (int fid : vis) {
        facets_[fid].alive = false;
        free_slots_.push_back(fid);
        delta.deleted.push_back(fid);
    }
    // a facet slot may have been reused by a new facet; drop those from deleted
    // (they are reported as created) -- detect by aliveness
    delta.deleted.erase(std::remove_if(delta.deleted.begin(), delta.deleted.end(),
                                       [&](int fid) { return facets_[fid].alive; }),
                        delta.deleted.end());
    for (int g : rewired)
        if (facets_[g].alive) delta.rewired.push_back(g);
    std::sort(delta.rewired.begin(), delta.rewired.end());
    return delta;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Triangulation

Triangulation::Triangulation(int nvar) : nvar_(nvar) {
    if (nvar < 1) throw std::invalid_argument("triangulation: nvar must be >= 1");
    if (nvar > kMaxDim) throw std::invalid_argument("triangulation: dimension exceeds the cap of 8");
}

Vector Triangulation::lift(const Vector& x, int id) const {
    Vector y(nvar_ + 1);
    y.head(nvar_) = x;
    double z = x.squaredNorm();
    // deterministic tie-break on the paraboloid coordinate: exactly
    // cospherical subsets would otherwise leave the lifted hull flat
    y(nvar_) = z + 1e-9 * (1.0 + z) * unit_jitter(id, 1 << 16);
    return y;
}

bool Triangulation::engine_lower(int fid) const {
    const auto& f = engine_.facets()[fid];
    return f.alive && f.normal(nvar_) < -1e-12;
}

Simplex Triangulation::make_cell(const detail::HullEngine::HFacet& f) const {
    Simplex s;
    s.verts = sorted_key(f.verts);
    Matrix vm(nvar_, nvar_ + 1);
    for (int i = 0; i <= nvar_; ++i) vm.col(i) = points_[s.verts[i]].coords;
    s.volume = simplex_volume(vm);
    bool any_f = false, any_s = false;
    for (int v : s.verts) (is_failure(points_[v].outcome) ? any_f : any_s) = true;
    s.cls = any_f && any_s ? SimplexClass::Mixed
                           : (any_f ? SimplexClass::Failure : SimplexClass::Safe);
    return s;
}

Triangulation Triangulation::build(int nvar, const std::vector<EDPoint>& pts) {
    Triangulation tri(nvar);
    for (const auto& p : pts) tri.add_point(p);
    if (!tri.has_simplices())
        throw std::invalid_argument("triangulation build: fewer than nvar+1 affinely independent points");
    return tri;
}

InsertDelta Triangulation::add_point(const EDPoint& p) {
    if (p.coords.size() != nvar_) throw std::invalid_argument("add_point: wrong dimension");
    if (!p.coords.allFinite()) throw std::invalid_argument("add_point: non-finite coordinates");
    for (const auto& q : points_)
        if ((q.coords - p.coords).norm() < kDuplicateTol)
            throw std::invalid_argument("add_point: duplicate point");

    EDPoint stored = p;
    stored.id = static_cast<int>(points_.size());
    points_.push_back(stored);
    max_norm_ = std::max(max_norm_, stored.coords.norm());

    InsertDelta delta;
    const int n = num_points();

    if (!has_simplices()) {
        // pending phase: wait until nvar+1 affinely independent points exist
        std::vector<int> subset;
        Matrix basis(nvar_, nvar_);
        int rank = 0;
        for (int i = 0; i < n && rank <= nvar_; ++i) {
            if (subset.empty()) { subset.push_back(i); continue; }
            Vector r = points_[i].coords - points_[subset[0]].coords;
            double norm0 = r.norm();
            for (int k = 0; k < rank; ++k) r -= r.dot(basis.col(k)) * basis.col(k);
            if (r.norm() > 1e-9 * (1.0 + norm0)) {
                basis.col(rank++) = r.normalized();
                subset.push_back(i);
            }
        }
        if (static_cast<int>(subset.size()) < nvar_ + 1) return delta;  // still collecting
        return rebuild_from_scratch();
    }

    if (single_mode_) return rebuild_from_scratch();

    auto d = engine_.add_point(lift(stored.coords, stored.id), stored.id);
    sync_cells(d, delta);
    return delta;
}

InsertDelta Triangulation::rebuild_from_scratch() {
    std::vector<SimplexKey> old_keys;
    old_keys.reserve(by_key_.size());
    for (const auto& [k, id] : by_key_) old_keys.push_back(k);

    cells_.clear();
    by_key_.clear();
    hull_by_face_.clear();
    single_mode_ = false;
    engine_ = detail::HullEngine();

    const int n = num_points();
    if (n == nvar_ + 1) {
        single_mode_ = true;
        std::vector<int> ids(nvar_ + 1);
        for (int i = 0; i <= nvar_; ++i) ids[i] = i;
        detail::HullEngine::HFacet pseudo;
        pseudo.verts = ids;
        Simplex s = make_cell(pseudo);
        cells_.push_back(s);
        by_key_[s.verts] = 0;
    } else {
        // greedy affinely independent subset in the lifted space
        std::vector<int> subset;
        Matrix basis(nvar_ + 1, nvar_ + 1);
        int rank = 0;
        std::vector<Vector> lifted(n);
        for (int i = 0; i < n; ++i) lifted[i] = lift(points_[i].coords, i);
        for (int i = 0; i < n && rank <= nvar_ + 1; ++i) {
            if (subset.empty()) { subset.push_back(i); continue; }
            Vector r = lifted[i] - lifted[subset[0]];
            double norm0 = r.norm();
            for (int k = 0; k < rank; ++k) r -= r.dot(basis.col(k)) * basis.col(k);
            if (r.norm() > 1e-12 * (1.0 + norm0)) {
                basis.col(rank++) = r.normalized();
                subset.push_back(i);
            }
        }
        if (static_cast<int>(subset.size()) < nvar_ + 2)
            throw std::runtime_error("triangulation: cospherical/degenerate point set");
        std::vector<Vector> sub_coords;
        for (int i : subset) sub_coords.push_back(lifted[i]);
        engine_.init(nvar_ + 1, sub_coords, subset);
        std::vector<char> used(n, 0);
        for (int i : subset) used[i] = 1;
        // register initial facets
        for (int fid = 0; fid < static_cast<int>(engine_.facets().size()); ++fid) {
            if (engine_lower(fid)) {
                if (static_cast<int>(cells_.size()) <= fid) cells_.resize(fid + 1);
                Simplex s = make_cell(engine_.facets()[fid]);
                by_key_[s.verts] = fid;
                cells_[fid] = std::move(s);
            }
        }
        for (int i = 0; i < n; ++i) {
            if (used[i]) continue;
            auto d = engine_.add_point(lifted[i], i);
            InsertDelta ignore;
            sync_cells(d, ignore);
        }
    }

    rebuild_hull_facet_list_full();
    InsertDelta delta;
    delta.hull_changed = true;
    for (const auto& [k, id] : by_key_)
        if (!std::binary_search(old_keys.begin(), old_keys.end(), k)) delta.added.push_back(k);
    for (const auto& k : old_keys)
        if (by_key_.find(k) == by_key_.end()) delta.removed.push_back(k);
    return delta;
}

void Triangulation::sync_cells(const detail::HullEngine::Delta& d, InsertDelta& out) {
    std::vector<int> dead_cells;
    for (int fid : d.deleted) {
        if (fid < static_cast<int>(cells_.size()) && cells_[fid].has_value()) {
            out.removed.push_back(cells_[fid]->verts);
            by_key_.erase(cells_[fid]->verts);
            dead_cells.push_back(fid);
        }
    }
    std::vector<int> touched;
    for (int fid : d.created) {
        if (static_cast<int>(cells_.size()) <= fid) cells_.resize(fid + 1);
        if (engine_lower(fid)) {
            Simplex s = make_cell(engine_.facets()[fid]);
            out.added.push_back(s.verts);
            by_key_[s.verts] = fid;
            cells_[fid] = std::move(s);
            touched.push_back(fid);
        } else {
            // slot may hold a stale cell if it was reused for an upper facet
            if (cells_[fid].has_value() &&
                std::find(dead_cells.begin(), dead_cells.end(), fid) == dead_cells.end())
                dead_cells.push_back(fid);
            cells_[fid].reset();
        }
    }
    for (int fid : d.rewired)
        if (fid < static_cast<int>(cells_.size()) && cells_[fid].has_value()) touched.push_back(fid);
    refresh_hull_faces(touched, dead_cells);
    // clear cell records of deleted facets (after face cleanup used them)
    for (int fid : d.deleted)
        if (fid < static_cast<int>(cells_.size()) && !engine_.facets()[fid].alive) cells_[fid].reset();
    out.hull_changed = hull_dirty_;
    if (hull_dirty_) {
        hull_facets_.clear();
        hull_facets_.reserve(hull_by_face_.size());
        for (const auto& [k, f] : hull_by_face_) hull_facets_.push_back(f);
        hull_dirty_ = false;
    }
}

int Triangulation::cell_neighbor(int id, int pos) const {
    if (single_mode_) return -1;
    const auto& c = cells_.at(id);
    const auto& f = engine_.facets()[id];
    int v = c->verts[pos];
    for (int s = 0; s < nvar_ + 1; ++s) {
        if (f.verts[s] == v) {
            int nb = f.neighbors[s];
            return (nb >= 0 && engine_lower(nb)) ? nb : -1;
        }
    }
    throw std::logic_error("cell_neighbor: vertex not found");
}

Facet Triangulation::make_hull_facet(const std::vector<int>& face_ids, int omitted_id) const {
    Matrix pts(nvar_, nvar_);
    for (int i = 0; i < nvar_; ++i) pts.col(i) = points_[face_ids[i]].coords;
    Vector n;
    double b;
    if (!hyperplane(pts, n, b)) throw std::runtime_error("hull facet: degenerate face");
    if (n.dot(points_[omitted_id].coords) + b > 0.0) { n = -n; b = -b; }
    Facet f;
    f.normal = std::move(n);
    f.offset = b;
    f.vertex_ids = face_ids;
    return f;
}

void Triangulation::refresh_hull_faces(const std::vector<int>& touched_cells,
                                       const std::vector<int>& dead_cells) {
    auto face_keys_of = [&](const Simplex& s) {
        std::vector<std::vector<int>> keys;
        for (int pos = 0; pos <= nvar_; ++pos) {
            std::vector<int> face;
            face.reserve(nvar_);
            for (int k = 0; k <= nvar_; ++k)
                if (k != pos) face.push_back(s.verts[k]);
            keys.push_back(std::move(face));  // already sorted (verts sorted)
        }
        return keys;
    };
    bool changed = false;
    for (int fid : dead_cells) {
        if (fid >= static_cast<int>(cells_.size()) || !cells_[fid].has_value()) continue;
        for (auto& k : face_keys_of(*cells_[fid])) changed |= hull_by_face_.erase(k) > 0;
    }
    for (int fid : touched_cells) {
        if (!cells_[fid].has_value()) continue;
        const Simplex& s = *cells_[fid];
        for (int pos = 0; pos <= nvar_; ++pos) {
            std::vector<int> face;
            face.reserve(nvar_);
            for (int k = 0; k <= nvar_; ++k)
                if (k != pos) face.push_back(s.verts[k]);
            if (cell_neighbor(fid, pos) < 0) {
                hull_by_face_[face] = make_hull_facet(face, s.verts[pos]);
                changed = true;
            } else {
                changed |= hull_by_face_.erase(face) > 0;
            }
        }
    }
    hull_dirty_ = hull_dirty_ || changed;
}

void Triangulation::rebuild_hull_facet_list_full() {
    hull_by_face_.clear();
    for (const auto& [key, fid] : by_key_) {
        const Simplex& s = *cells_[fid];
        for (int pos = 0; pos <= nvar_; ++pos) {
            if (cell_neighbor(fid, pos) >= 0) continue;
            std::vector<int> face;
            face.reserve(nvar_);
            for (int k = 0; k <= nvar_; ++k)
                if (k != pos) face.push_back(s.verts[k]);
            hull_by_face_[face] = make_hull_facet(face, s.verts[pos]);
        }
    }
    hull_facets_.clear();
    for (const auto& [k, f] : hull_by_face_) hull_facets_.push_back(f);
    hull_dirty_ = false;
}

const Simplex& Triangulation::cell(int id) const {
    const auto& c = cells_.at(id);
    if (!c.has_value()) throw std::out_of_range("cell: dead id");
    return *c;
}

bool Triangulation::cell_alive(int id) const {
    return id >= 0 && id < static_cast<int>(cells_.size()) && cells_[id].has_value();
}

int Triangulation::num_cells() const { return static_cast<int>(by_key_.size()); }

bool Triangulation::contains(const Vector& x, double tol) const {
    return geom::contains(hull_facets_, x, tol);
}

double Triangulation::inscribed_radius() const { return geom::inscribed_radius(hull_facets_); }

Matrix Triangulation::cell_vertices(int id) const {
    const Simplex& s = cell(id);
    Matrix vm(nvar_, nvar_ + 1);
    for (int i = 0; i <= nvar_; ++i) vm.col(i) = points_[s.verts[i]].coords;
    return vm;
}

Vector Triangulation::cell_circumcenter(int id) const { return circumcenter(cell_vertices(id)); }

Vector Triangulation::cell_centroid(int id) const {
    const Simplex& s = cell(id);
    Vector c = Vector::Zero(nvar_);
    for (int v : s.verts) c += points_[v].coords;
    return c / static_cast<double>(nvar_ + 1);
}

std::vector<std::vector<int>> Triangulation::clusters(SimplexClass cls) const {
    std::vector<std::vector<int>> groups;
    std::unordered_set<int> seen;
    for (const auto& [key, fid] : by_key_) {
        if (cells_[fid]->cls != cls || seen.count(fid)) continue;
        std::vector<int> group;
        std::deque<int> queue{fid};
        seen.insert(fid);
        while (!queue.empty()) {
            int c = queue.front();
            queue.pop_front();
            group.push_back(c);
            for (int pos = 0; pos <= nvar_; ++pos) {
                int nb = cell_neighbor(c, pos);
                if (nb >= 0 && cells_[nb]->cls == cls && !seen.count(nb)) {
                    seen.insert(nb);
                    queue.push_back(nb);
                }
            }
        }
        std::sort(group.begin(), group.end());
        groups.push_back(std::move(group));
    }
    return groups;
}

OrientedFace Triangulation::face_of(const Simplex& s, int opposite_pos) const {
    OrientedFace face;
    face.vertices.resize(nvar_, nvar_);
    face.vertex_ids.reserve(nvar_);
    int col = 0;
    for (int k = 0; k <= nvar_; ++k) {
        if (k == opposite_pos) continue;
        face.vertex_ids.push_back(s.verts[k]);
        face.vertices.col(col++) = points_[s.verts[k]].coords;
    }
    Vector n;
    double b;
    if (!hyperplane(face.vertices, n, b)) throw std::runtime_error("face_of: degenerate face");
    if (n.dot(points_[s.verts[opposite_pos]].coords) + b > 0.0) n = -n;
    face.normal = std::move(n);
    return face;
}

std::vector<OrientedFace> Triangulation::cluster_boundary(const std::vector<int>& group) const {
    std::unordered_set<int> in_group(group.begin(), group.end());
    std::vector<OrientedFace> faces;
    for (int fid : group) {
        const Simplex& s = cell(fid);
        for (int pos = 0; pos <= nvar_; ++pos) {
            int nb = cell_neighbor(fid, pos);
            if (nb >= 0 && in_group.count(nb)) continue;
            faces.push_back(face_of(s, pos));
        }
    }
    return faces;
}

std::vector<OrientedFace> Triangulation::hull_boundary() const {
    std::vector<OrientedFace> faces;
    faces.reserve(hull_facets_.size());
    for (const auto& f : hull_facets_) {
        OrientedFace of;
        of.vertex_ids = f.vertex_ids;
        of.vertices.resize(nvar_, nvar_);
        for (int i = 0; i < nvar_; ++i) of.vertices.col(i) = points_[f.vertex_ids[i]].coords;
        of.normal = f.normal;
        faces.push_back(std::move(of));
    }
    return faces;
}

void Triangulation::save(std::ostream& os) const {
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
    os << "simplices " << by_key_.size() << "\n";
    for (const auto& [key, fid] : by_key_) {
        for (std::size_t i = 0; i < key.size(); ++i) os << (i ? " " : "") << key[i];
        os << "\n";
    }
    os << "facets " << hull_facets_.size() << "\n";
    for (const auto& f : hull_facets_) {
        for (int i = 0; i < nvar_; ++i) os << f.vertex_ids[i] << ' ';
        for (int v = 0; v < nvar_; ++v) os << f.normal(v) << ' ';
        os << f.offset << "\n";
    }
    os << "end\n";
}

Triangulation Triangulation::load(std::istream& is) {
    std::string tag;
    int version = 0;
    is >> tag >> version;
    if (tag != "tessera-skeleton" || version != 1)
        throw std::runtime_error("skeleton: bad header");
    int dim = 0;
    std::size_t npts = 0;
    is >> tag >> dim;
    if (tag != "dim") throw std::runtime_error("skeleton: expected dim");
    is >> tag >> npts;
    if (tag != "points") throw std::runtime_error("skeleton: expected points");
    Triangulation tri(dim);
    for (std::size_t i = 0; i < npts; ++i) {
        EDPoint p;
        int outcome = 0;
        std::string raw;
        is >> p.id >> outcome >> raw;
        p.outcome = outcome ? Outcome::Failure : Outcome::Safe;
        if (raw != "nan") p.raw_g = std::stod(raw);
        p.coords.resize(dim);
        for (int v = 0; v < dim; ++v) is >> p.coords(v);
        tri.add_point(p);
    }
    std::size_t nsimp = 0;
    is >> tag >> nsimp;
    if (tag != "simplices") throw std::runtime_error("skeleton: expected simplices");
    for (std::size_t i = 0; i < nsimp; ++i) {
        SimplexKey key(dim + 1);
        for (int k = 0; k <= dim; ++k) is >> key[k];
    }
    if (nsimp != tri.by_key_.size())
        throw std::runtime_error("skeleton: rebuilt simplex count differs from file");
    std::size_t nfac = 0;
    is >> tag >> nfac;
    if (tag != "facets") throw std::runtime_error("skeleton: expected facets");
    for (std::size_t i = 0; i < nfac; ++i) {
        std::string line;
        double v;
        for (int k = 0; k < dim; ++k) is >> v;
        for (int k = 0; k <= dim; ++k) is >> v;
    }
    is >> tag;
    if (tag != "end") throw std::runtime_error("skeleton: missing end marker");
    return tri;
}

// ---------------------------------------------------------------------------
// ConvexHull (plain space)

ConvexHull::ConvexHull(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("convex hull: bad dimension");
}

bool ConvexHull::add_point(const Vector& x) {
    int id = static_cast<int>(coords_.size());
    coords_.push_back(x);
    if (!engine_.ready()) {
        // greedy affinely independent subset
        std::vector<int> subset;
        Matrix basis(dim_, dim_);
        int rank = 0;
        for (int i = 0; i <= id && rank <= dim_; ++i) {
            if (subset.empty()) { subset.push_back(i); continue; }
            Vector r = coords_[i] - coords_[subset[0]];
            double norm0 = r.norm();
            for (int k = 0; k < rank; ++k) r -= r.dot(basis.col(k)) * basis.col(k);
            if (r.norm() > 1e-9 * (1.0 + norm0)) {
                basis.col(rank++) = r.normalized();
                subset.push_back(i);
            }
        }
        if (static_cast<int>(subset.size()) < dim_ + 1) return true;
        std::vector<Vector> sub;
        for (int i : subset) sub.push_back(coords_[i]);
        engine_.init(dim_, sub, subset);
        std::vector<char> used(id + 1, 0);
        for (int i : subset) used[i] = 1;
        for (int i = 0; i <= id; ++i)
            if (!used[i]) engine_.add_point(coords_[i], i);
        rebuild_facets();
        return true;
    }
    auto d = engine_.add_point(x, id);
    if (d.inserted) rebuild_facets();
    return d.inserted;
}

void ConvexHull::rebuild_facets() {
    facets_.clear();
    for (const auto& f : engine_.facets()) {
        if (!f.alive) continue;
        Facet out;
        out.normal = f.normal;
        out.offset = f.offset;
        out.vertex_ids = f.verts;
        facets_.push_back(std::move(out));
    }
}

bool ConvexHull::contains(const Vector& x, double tol) const {
    if (!ready()) return false;
    return geom::contains(facets_, x, tol);
}

double ConvexHull::inscribed_radius() const { return geom::inscribed_radius(facets_); }

std::vector<OrientedFace> ConvexHull::boundary() const {
    std::vector<OrientedFace> faces;
    faces.reserve(facets_.size());
    for (const auto& f : facets_) {
        OrientedFace of;
        of.vertex_ids = f.vertex_ids;
        of.vertices.resize(dim_, dim_);
        for (int i = 0; i < dim_; ++i) of.vertices.col(i) = coords_[f.vertex_ids[i]];
        of.normal = f.normal;
        faces.push_back(std::move(of));
    }
    return faces;
}

// ---------------------------------------------------------------------------

double inscribed_radius(const std::vector<Facet>& facets) {
    if (facets.empty()) return std::numeric_limits<double>::quiet_NaN();
    double r = std::numeric_limits<double>::infinity();
    for (const auto& f : facets) r = std::min(r, -f.offset);
    return r;
}

double circumscribed_radius(const std::vector<Vector>& points) {
    double r = 0.0;
    for (const auto& p : points) r = std::max(r, p.norm());
    return r;
}

bool contains(const std::vector<Facet>& facets, const Vector& x, double tol) {
    if (facets.empty()) return false;
    for (const auto& f : facets)
        if (f.normal.dot(x) + f.offset > tol) return false;
    return true;
}

} // namespace tessera::geom
