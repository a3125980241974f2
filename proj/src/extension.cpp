#include "tessera/extension.hpp"

#include "tessera/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tessera::ext {

namespace {

// counter layout inside one step's stream
constexpr std::uint64_t kBootstrapBase = 0;
constexpr std::uint64_t kExploreBase = 1000;

double nearest_distance(const Vector& x, const std::vector<EDPoint>& points) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : points) best = std::min(best, (x - p.coords).norm());
    return best;
}

} // namespace

double exploration_offset(double p_out, double r, double R, int nvar, const Params& p,
                          bool* clamped) {
    if (clamped) *clamped = false;
    double arg = p_out / gauss::ball_surface(R + p.offset_q, nvar);
    double o;
    if (arg > 0.0 && arg < 1.0) {
        o = gauss::inv_chi_sf(arg, nvar) - r;
    } else {
        o = p.min_offset;
        if (clamped) *clamped = true;
    }
    if (o < p.min_offset) {
        o = p.min_offset;
        if (clamped) *clamped = true;
    }
    return o;
}

double psi_score(const Vector& candidate, const std::vector<EDPoint>& points, int nvar) {
    double l = nearest_distance(candidate, points);
    double fc = gauss::std_gauss_density(candidate);
    double fs = 1.0;
    for (const auto& p : points) {
        if ((candidate - p.coords).norm() == l) {
            fs = gauss::std_gauss_density(p.coords);
            break;
        }
    }
    return std::sqrt(fc * fs) * std::pow(l, nvar);
}

Candidate exploit_candidate(const est::Estimator& state, int cell_id, const Params& params) {
    const auto* tri = state.triangulation();
    if (!tri) throw std::logic_error("exploit: no triangulation");
    Candidate c;
    c.kind = CandidateKind::Exploit;
    c.simplex_id = cell_id;
    c.score = state.pj(cell_id);
    try {
        c.coords = tri->cell_circumcenter(cell_id);
    } catch (const std::domain_error&) {
        c.coords = tri->cell_centroid(cell_id);
        c.degenerate_circumcenter = true;
    }
    if (nearest_distance(c.coords, state.points()) < params.duplicate_guard) {
        // circumcenter already evaluated: fall back to the centroid
        c.coords = tri->cell_centroid(cell_id);
        c.degenerate_circumcenter = true;
        if (nearest_distance(c.coords, state.points()) < params.duplicate_guard)
            c.simplex_id = -1;  // caller moves to the next-best simplex
    }
    return c;
}

Candidate explore_candidate(const est::Estimator& state, int facet_index, const Params& params,
                            const CounterRng& rng) {
    const auto& facets = state.hull_facets();
    if (facets.empty()) throw std::logic_error("explore: no hull facets");
    const auto& facet = facets.at(facet_index);
    const int n = state.nvar();

    bool clamped = false;
    double r = -facet.offset;
    double o = exploration_offset(state.current_p_out(), r, state.circumscribed_R(), n, params,
                                  &clamped);

    Candidate best;
    best.kind = CandidateKind::Explore;
    best.facet_id = facet_index;
    best.offset_clamped = clamped;
    best.score = -1.0;
    const int max_pool = params.pool_size * 10;
    for (int j = 0; j < max_pool; ++j) {
        Vector z(n);
        for (int v = 0; v < n; ++v)
            z(v) = rng.normal(kExploreBase + static_cast<std::uint64_t>(j) * n + v);
        // project onto the plane parallel to the facet at offset o
        Vector x = z - (facet.normal.dot(z) + facet.offset - o) * facet.normal;
        if (nearest_distance(x, state.points()) < params.duplicate_guard) continue;
        double score = psi_score(x, state.points(), n);
        if (score > best.score) {
            best.score = score;
            best.coords = x;
        }
        if (j + 1 >= params.pool_size && best.score >= 0.0) break;
    }
    if (best.score < 0.0) throw std::runtime_error("explore: no candidate clears the duplicate guard");
    return best;
}

Candidate screen_candidate(const est::Estimator& state, const Params& params) {
    const auto* tri = state.triangulation();
    Candidate best;
    best.kind = CandidateKind::Screen;
    best.score = -1.0;
    if (!tri || !tri->has_simplices()) return best;
    for (const auto& [key, cid] : tri->by_key()) {
        Vector x;
        try {
            x = tri->cell_circumcenter(cid);
        } catch (const std::domain_error&) {
            x = tri->cell_centroid(cid);
        }
        if (nearest_distance(x, state.points()) < params.duplicate_guard) continue;
        double score = psi_score(x, state.points(), state.nvar());
        if (score > best.score) {
            best.score = score;
            best.coords = x;
            best.simplex_id = cid;
        }
    }
    return best;
}

Candidate decide(const est::Estimator& state, const Params& params, const CounterRng& rng,
                 int step_index) {
    const int n = state.nvar();
    const int npts = state.nsim();

    if (npts == 0) {
        Candidate c;
        c.kind = CandidateKind::Bootstrap;
        c.coords = Vector::Zero(n);
        return c;
    }

    if (npts < n + 1 || !state.hull_ready()) {
        // pre-hull bootstrap: orthonormal exploration directions around the
        // first point, at the offset radius computed with r = 0
        Candidate c;
        c.kind = CandidateKind::Bootstrap;
        bool clamped = false;
        double o = exploration_offset(state.current_p_out(), 0.0, state.circumscribed_R(), n,
                                      params, &clamped);
        c.offset_clamped = clamped;
        const auto& pts = state.points();
        std::vector<Vector> dirs;
        for (int i = 1; i < npts; ++i) {
            Vector d = pts[i].coords - pts[0].coords;
            for (const auto& e : dirs) d -= d.dot(e) * e;
            if (d.norm() > 1e-12) dirs.push_back(d.normalized());
        }
        for (std::uint64_t attempt = 0;; ++attempt) {
            Vector g(n);
            for (int v = 0; v < n; ++v)
                g(v) = rng.normal(kBootstrapBase + attempt * n + v);
            for (const auto& e : dirs) g -= g.dot(e) * e;
            if (g.norm() < 1e-9) continue;
            c.coords = pts[0].coords + o * g.normalized();
            if (nearest_distance(c.coords, pts) >= params.duplicate_guard) break;
        }
        return c;
    }

    const auto* tri = state.triangulation();
    if (params.screening_k > 0 && step_index % params.screening_k == 0 && tri &&
        tri->has_simplices()) {
        Candidate c = screen_candidate(state, params);
        if (c.score >= 0.0) return c;
    }

    double r = state.inscribed_r();
    double p_beta = gauss::std_normal_sf(r);  // Phi(-r)
    auto [p_max, cell] = state.max_mixed_pj();

    if (p_max > p_beta && cell >= 0 && tri) {
        Candidate c = exploit_candidate(state, cell, params);
        if (c.simplex_id >= 0) return c;
        // duplicate-guarded out: try remaining mixed simplices by weight
        std::vector<std::pair<double, int>> mixed;
        for (const auto& [key, cid] : tri->by_key())
            if (tri->cell(cid).cls == SimplexClass::Mixed && cid != cell)
                mixed.emplace_back(state.pj(cid), cid);
        std::stable_sort(mixed.begin(), mixed.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (const auto& [p, cid] : mixed) {
            Candidate alt = exploit_candidate(state, cid, params);
            if (alt.simplex_id >= 0) return alt;
        }
        // every mixed simplex is exhausted; explore instead
    }

    // critical facet: the hull wall nearest the origin
    const auto& facets = state.hull_facets();
    int crit = 0;
    double best_r = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(facets.size()); ++i) {
        double ri = -facets[i].offset;
        if (ri < best_r) {
            best_r = ri;
            crit = i;
        }
    }
    return explore_candidate(state, crit, params, rng);
}

} // namespace tessera::ext
