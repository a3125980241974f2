#include "tessera/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace tessera::sens {

namespace detail {

bool max_margin_plane(const std::vector<Vector>& failed, const std::vector<Vector>& safe,
                      Vector& normal, double& lo, double& hi) {
    if (failed.empty() || safe.empty()) return false;
    const int n = static_cast<int>(failed.front().size());
    const int nf = static_cast<int>(failed.size());
    const int ns = static_cast<int>(safe.size());

    // nearest points between the two convex hulls by pairwise Frank-Wolfe
    // (away steps give linear convergence); deterministic uniform start
    std::vector<double> lam(nf, 1.0 / nf), mu(ns, 1.0 / ns);
    Vector u = Vector::Zero(n), v = Vector::Zero(n);
    for (int i = 0; i < nf; ++i) u += lam[i] * failed[i];
    for (int j = 0; j < ns; ++j) v += mu[j] * safe[j];

    double scale = 0.0;
    for (const auto& p : failed) scale = std::max(scale, p.norm());
    for (const auto& p : safe) scale = std::max(scale, p.norm());
    const double tol = 1e-14 * (1.0 + scale * scale);

    for (int it = 0; it < 5000; ++it) {
        Vector g = u - v;
        // toward/away atoms on the failed side
        int fw_f = 0, aw_f = 0;
        double fw_val = g.dot(failed[0]);
        double aw_val = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < nf; ++i) {
            double val = g.dot(failed[i]);
            if (val < fw_val) { fw_val = val; fw_f = i; }
            if (lam[i] > 0.0 && val > aw_val) { aw_val = val; aw_f = i; }
        }
        // toward/away atoms on the safe side
        int fw_s = 0, aw_s = 0;
        double fw_sval = g.dot(safe[0]);
        double aw_sval = std::numeric_limits<double>::infinity();
        for (int j = 0; j < ns; ++j) {
            double val = g.dot(safe[j]);
            if (val > fw_sval) { fw_sval = val; fw_s = j; }
            if (mu[j] > 0.0 && val < aw_sval) { aw_sval = val; aw_s = j; }
        }
        double gap = (g.dot(u) - fw_val) + (fw_sval - g.dot(v));
        if (gap < tol) break;

        // pairwise step: shift weight from the away atom to the toward atom
        Vector df = failed[fw_f] - failed[aw_f];
        double den = df.squaredNorm();
        if (den > 0.0) {
            double gamma = std::clamp(-g.dot(df) / den, 0.0, lam[aw_f]);
            lam[fw_f] += gamma;
            lam[aw_f] -= gamma;
            u += gamma * df;
        }
        g = u - v;
        Vector ds = safe[fw_s] - safe[aw_s];
        den = ds.squaredNorm();
        if (den > 0.0) {
            double gamma = std::clamp(g.dot(ds) / den, 0.0, mu[aw_s]);
            mu[fw_s] += gamma;
            mu[aw_s] -= gamma;
            v += gamma * ds;
        }
    }

    Vector w = v - u;  // from the failure side toward the safe side
    double dist = w.norm();
    if (dist < 1e-10 * (1.0 + scale)) return false;
    w /= dist;

    double max_f = -std::numeric_limits<double>::infinity();
    double min_s = std::numeric_limits<double>::infinity();
    for (const auto& p : failed) max_f = std::max(max_f, w.dot(p));
    for (const auto& p : safe) min_s = std::min(min_s, w.dot(p));
    if (!(max_f < min_s - 1e-12 * (1.0 + scale))) return false;
    normal = w;
    lo = max_f;
    hi = min_s;
    return true;
}

} // namespace detail

std::vector<std::vector<int>> mixed_subgroups(const geom::Triangulation& tri) {
    return tri.clusters(SimplexClass::Mixed);
}

namespace {

struct VertexSets {
    std::unordered_set<int> fids, sids;
    std::vector<Vector> fpts, spts;

    void absorb(const geom::Triangulation& tri, int cell_id) {
        for (int v : tri.cell(cell_id).verts) {
            const auto& p = tri.point(v);
            if (is_failure(p.outcome)) {
                if (fids.insert(v).second) fpts.push_back(p.coords);
            } else {
                if (sids.insert(v).second) spts.push_back(p.coords);
            }
        }
    }
};

} // namespace

std::vector<SeparatingPlane> plane_clusters(const geom::Triangulation& tri,
                                            const std::vector<int>& group,
                                            const std::function<double(int)>& pj) {
    std::vector<int> order = group;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return pj(a) > pj(b); });

    std::vector<SeparatingPlane> planes;
    std::vector<char> assigned(order.size(), 0);
    for (std::size_t seed = 0; seed < order.size(); ++seed) {
        if (assigned[seed]) continue;
        VertexSets verts;
        verts.absorb(tri, order[seed]);
        SeparatingPlane plane;
        plane.member_cells.push_back(order[seed]);
        assigned[seed] = 1;
        if (!detail::max_margin_plane(verts.fpts, verts.spts, plane.normal, plane.offset_lo,
                                      plane.offset_hi))
            throw std::runtime_error("plane_clusters: single mixed simplex not separable");

        for (std::size_t k = seed + 1; k < order.size(); ++k) {
            if (assigned[k]) continue;
            int cid = order[k];
            // cheap test against the current plane before re-solving
            double max_f = plane.offset_lo, min_s = plane.offset_hi;
            for (int v : tri.cell(cid).verts) {
                const auto& p = tri.point(v);
                double proj = plane.normal.dot(p.coords);
                if (is_failure(p.outcome)) max_f = std::max(max_f, proj);
                else min_s = std::min(min_s, proj);
            }
            if (max_f < min_s) {
                plane.offset_lo = max_f;
                plane.offset_hi = min_s;
                verts.absorb(tri, cid);
                plane.member_cells.push_back(cid);
                assigned[k] = 1;
                continue;
            }
            VertexSets trial = verts;
            trial.absorb(tri, cid);
            Vector n;
            double lo, hi;
            if (detail::max_margin_plane(trial.fpts, trial.spts, n, lo, hi)) {
                verts = std::move(trial);
                plane.normal = std::move(n);
                plane.offset_lo = lo;
                plane.offset_hi = hi;
                plane.member_cells.push_back(cid);
                assigned[k] = 1;
            }
        }
        // polish on the final member set
        Vector n;
        double lo, hi;
        if (detail::max_margin_plane(verts.fpts, verts.spts, n, lo, hi)) {
            plane.normal = std::move(n);
            plane.offset_lo = lo;
            plane.offset_hi = hi;
        }
        planes.push_back(std::move(plane));
    }
    return planes;
}

namespace {

Vector t_v2_impl(const geom::Triangulation& tri, const std::function<double(int)>& pj,
                 const transforms::ProbabilitySpace* space) {
    const int n = tri.nvar();
    auto groups = mixed_subgroups(tri);
    if (groups.empty()) throw std::domain_error("t_v2: no mixed simplices");

    Vector acc = Vector::Zero(n);
    double wsum = 0.0;
    for (const auto& group : groups) {
        for (const auto& plane : plane_clusters(tri, group, pj)) {
            Vector normal = plane.normal;
            double cluster_w = 0.0;
            Vector wcentroid = Vector::Zero(n);
            std::vector<std::pair<int, double>> member_w;
            for (int cid : plane.member_cells) {
                double vol = tri.cell(cid).volume;
                double w = pj(cid) * std::pow(vol, -1.0 / n);
                if (!std::isfinite(w) || w < 0.0) w = 0.0;
                member_w.emplace_back(cid, w);
                cluster_w += w;
                wcentroid += w * tri.cell_centroid(cid);
            }
            if (space && cluster_w > 0.0) {
                // push the normal through the local Jacobian of G -> R
                wcentroid /= cluster_w;
                const Matrix& l = space->chol_lower();
                Vector z = l * wcentroid;
                Vector y = l.transpose().triangularView<Eigen::Upper>().solve(normal);
                Vector d = space->marginal_map_derivative(z);
                for (int v = 0; v < n; ++v) y(v) = d(v) > 0.0 ? y(v) / d(v) : 0.0;
                double norm = y.norm();
                if (norm > 0.0) normal = y / norm;
            }
            for (const auto& [cid, w] : member_w) {
                (void)cid;
                for (int v = 0; v < n; ++v) acc(v) += w * normal(v) * normal(v);
                wsum += w;
            }
        }
    }
    if (wsum <= 0.0) throw std::domain_error("t_v2: zero total weight");
    return acc / wsum;
}

} // namespace

Vector t_v2(const geom::Triangulation& tri, const std::function<double(int)>& pj) {
    return t_v2_impl(tri, pj, nullptr);
}

Vector t_v2_physical(const geom::Triangulation& tri, const std::function<double(int)>& pj,
                     const transforms::ProbabilitySpace& space) {
    return t_v2_impl(tri, pj, &space);
}

} // namespace tessera::sens
