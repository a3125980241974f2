#include "tessera/cubature.hpp"

#include "tessera/gauss.hpp"

#include <cmath>
#include <stdexcept>

namespace tessera::cubature {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

// all (dim+1)-tuples of nonnegative integers summing to `total`
void enumerate_compositions(int slots, int total, std::vector<int>& cur,
                            const std::function<void(const std::vector<int>&)>& emit) {
    if (slots == 1) {
        cur.push_back(total);
        emit(cur);
        cur.pop_back();
        return;
    }
    for (int k = 0; k <= total; ++k) {
        cur.push_back(k);
        enumerate_compositions(slots - 1, total - k, cur, emit);
        cur.pop_back();
    }
}

} // namespace

CubatureRule grundmann_moeller(int dim, int s) {
    if (dim < 1) throw std::invalid_argument("grundmann_moeller: dim must be >= 1");
    if (s < 0) throw std::invalid_argument("grundmann_moeller: s must be >= 0");
    const int d = 2 * s + 1;
    CubatureRule rule;
    rule.dim = dim;
    rule.degree = d;

    std::vector<Vector> nodes;
    std::vector<double> weights;
    for (int i = 0; i <= s; ++i) {
        // weight of level i, for the unit simplex of volume 1/dim!
        double w = std::pow(2.0, -2.0 * s) *
                   std::pow(static_cast<double>(d + dim - 2 * i), d) /
                   (factorial(i) * factorial(d + dim - i));
        if (i % 2 == 1) w = -w;
        const double denom = d + dim - 2 * i;
        std::vector<int> cur;
        enumerate_compositions(dim + 1, s - i, cur, [&](const std::vector<int>& beta) {
            Vector node(dim + 1);
            for (int j = 0; j <= dim; ++j) node(j) = (2.0 * beta[j] + 1.0) / denom;
            nodes.push_back(node);
            weights.push_back(w);
        });
    }
    // normalize so the weights sum to one (plain rule integrates to 1/dim!)
    const double volume = 1.0 / factorial(dim);
    rule.nodes.resize(dim + 1, static_cast<int>(nodes.size()));
    rule.weights.resize(nodes.size());
    for (std::size_t l = 0; l < nodes.size(); ++l) {
        rule.nodes.col(static_cast<int>(l)) = nodes[l];
        rule.weights[l] = weights[l] / volume;
    }
    return rule;
}

int default_gm_index(int nvar) { return nvar <= 4 ? 2 : 1; }

std::vector<Matrix> centroid_subdivide(const Matrix& vertices) {
    const int n = static_cast<int>(vertices.rows());
    Vector c = vertices.rowwise().mean();
    std::vector<Matrix> children;
    children.reserve(n + 1);
    for (int k = 0; k <= n; ++k) {
        Matrix child = vertices;
        child.col(k) = c;
        children.push_back(std::move(child));
    }
    return children;
}

namespace {

double rule_sum(const Matrix& vertices, const CubatureRule& rule, const Density& f) {
    const int nl = static_cast<int>(rule.weights.size());
    double acc = 0.0;
    for (int l = 0; l < nl; ++l) {
        Vector x = vertices * rule.nodes.col(l);
        acc += rule.weights[l] * f(x);
    }
    return acc;
}

} // namespace

IntegrationResult integrate_simplex(const Matrix& vertices, const CubatureRule& rule,
                                    const Density& f) {
    if (static_cast<int>(vertices.rows()) != rule.dim)
        throw std::invalid_argument("integrate_simplex: rule dimension mismatch");
    const double vol = geom::simplex_volume(vertices);
    IntegrationResult res;
    res.value = vol * rule_sum(vertices, rule, f);
    if (res.value < 0.0) {
        // dubious integration from negative weights: centroid rule on a
        // one-level centroid subdivision is strictly positive
        res.negative_fallback = true;
        double acc = 0.0;
        for (const Matrix& child : centroid_subdivide(vertices))
            acc += geom::simplex_volume(child) * f(child.rowwise().mean());
        res.value = acc;
    }
    return res;
}

namespace {

double adaptive_volume(const Matrix& verts, const CubatureRule& rule, const Density& f,
                       double coarse, double rel_tol, double abs_tol, int depth,
                       bool* negative) {
    int bi = 0, bj = 1;
    double best = 0.0;
    for (int i = 0; i < verts.cols(); ++i)
        for (int j = i + 1; j < verts.cols(); ++j) {
            double d = (verts.col(i) - verts.col(j)).squaredNorm();
            if (d > best) {
                best = d;
                bi = i;
                bj = j;
            }
        }
    Vector mid = 0.5 * (verts.col(bi) + verts.col(bj));
    Matrix a = verts, b = verts;
    a.col(bi) = mid;
    b.col(bj) = mid;
    double fa = geom::simplex_volume(a) * rule_sum(a, rule, f);
    double fb = geom::simplex_volume(b) * rule_sum(b, rule, f);
    double fine = fa + fb;
    if (depth < 40 && std::fabs(fine - coarse) > abs_tol + rel_tol * std::fabs(fine)) {
        return adaptive_volume(a, rule, f, fa, rel_tol, 0.5 * abs_tol, depth + 1, negative) +
               adaptive_volume(b, rule, f, fb, rel_tol, 0.5 * abs_tol, depth + 1, negative);
    }
    if (fine < 0.0) {
        // negative leaf from negative rule weights: positive centroid fallback
        *negative = true;
        fine = 0.0;
        for (const Matrix& half : {a, b})
            for (const Matrix& child : centroid_subdivide(half))
                fine += geom::simplex_volume(child) * f(child.rowwise().mean());
    }
    return fine;
}

} // namespace

IntegrationResult integrate_simplex_adaptive(const Matrix& vertices, const CubatureRule& rule,
                                             const Density& f, double rel_tol, double abs_tol) {
    if (static_cast<int>(vertices.rows()) != rule.dim)
        throw std::invalid_argument("integrate_simplex_adaptive: rule dimension mismatch");
    IntegrationResult res;
    double coarse = geom::simplex_volume(vertices) * rule_sum(vertices, rule, f);
    bool negative = false;
    res.value = adaptive_volume(vertices, rule, f, coarse, rel_tol, abs_tol, 0, &negative);
    res.negative_fallback = negative;
    return res;
}

RefinedResult integrate_simplex_refined(const Matrix& vertices, const CubatureRule& rule,
                                        const Density& f, int levels) {
    RefinedResult out;
    double prev = integrate_simplex(vertices, rule, f).value;
    std::vector<Matrix> cells{vertices};
    for (int lvl = 0; lvl < levels; ++lvl) {
        std::vector<Matrix> next;
        for (const auto& c : cells)
            for (auto& ch : centroid_subdivide(c)) next.push_back(std::move(ch));
        cells = std::move(next);
        double cur = 0.0;
        for (const auto& c : cells) cur += integrate_simplex(c, rule, f).value;
        out.error_estimate = std::fabs(cur - prev);
        prev = cur;
    }
    out.value = prev;
    return out;
}

double failure_share(const Matrix& vertices, const std::vector<bool>& failed,
                     const Density& f) {
    const int n = static_cast<int>(vertices.rows());
    if (static_cast<int>(failed.size()) != n + 1)
        throw std::invalid_argument("failure_share: indicator count mismatch");
    double acc = 0.0;
    for (int k = 0; k <= n; ++k)
        if (failed[k]) acc += f(vertices.col(k));
    return geom::simplex_volume(vertices) * acc / static_cast<double>(n + 1);
}

double pf_vertex_estimate(const geom::Triangulation& tri,
                          const std::function<double(int)>& pj, const Density& f) {
    double total = 0.0;
    for (const auto& [key, cid] : tri.by_key()) {
        const auto& cell = tri.cell(cid);
        if (cell.cls == SimplexClass::Failure) {
            total += pj(cid);
        } else if (cell.cls == SimplexClass::Mixed) {
            std::vector<bool> failed(cell.verts.size());
            for (std::size_t k = 0; k < cell.verts.size(); ++k)
                failed[k] = is_failure(tri.point(cell.verts[k]).outcome);
            total += failure_share(tri.cell_vertices(cid), failed, f);
        }
    }
    return total;
}

} // namespace tessera::cubature
