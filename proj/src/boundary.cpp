#include "tessera/boundary.hpp"

#include "tessera/gauss.hpp"

#include <cmath>
#include <stdexcept>

namespace tessera::boundary {

namespace {

double field_dot_normal(const Vector& x, const Vector& n, FieldKind kind, int component,
                        int nvar) {
    switch (kind) {
        case FieldKind::ComponentRatio: {
            double acc = gauss::std_normal_cdf(x(component)) * n(component);
            for (int j = 0; j < nvar; ++j)
                if (j != component) acc *= gauss::std_normal_pdf(x(j));
            return acc;
        }
        case FieldKind::FullComponentRatio: {
            double acc = 0.0;
            for (int v = 0; v < nvar; ++v) {
                double term = gauss::std_normal_cdf(x(v)) * n(v);
                for (int j = 0; j < nvar; ++j)
                    if (j != v) term *= gauss::std_normal_pdf(x(j));
                acc += term;
            }
            return acc / static_cast<double>(nvar);
        }
        case FieldKind::RadialInterior:
        case FieldKind::RadialExterior: {
            double rho = x.norm();
            if (rho < 1e-14) return 0.0;  // radial flux vanishes through the origin
            double mass = (kind == FieldKind::RadialInterior) ? gauss::chi_cdf(rho, nvar)
                                                              : gauss::chi_sf(rho, nvar);
            return mass / gauss::ball_surface(rho, nvar) * (x.dot(n) / rho);
        }
    }
    return 0.0;
}

} // namespace

double face_area(const geom::OrientedFace& face) {
    const int n = static_cast<int>(face.vertices.rows());
    if (n == 1) return 1.0;  // points carry counting measure
    Matrix e(n, n - 1);
    for (int j = 1; j < n; ++j) e.col(j - 1) = face.vertices.col(j) - face.vertices.col(0);
    Matrix gram = e.transpose() * e;
    double det = gram.determinant();
    if (det <= 0.0) return 0.0;
    double fact = 1.0;
    for (int k = 2; k <= n - 1; ++k) fact *= k;
    return std::sqrt(det) / fact;
}

namespace {

double rule_flux(const Matrix& verts, const Vector& normal, FieldKind kind,
                 const cubature::CubatureRule& rule, int component, int nvar) {
    geom::OrientedFace f;
    f.vertices = verts;
    f.normal = normal;
    double area = face_area(f);
    if (area == 0.0) return 0.0;
    double acc = 0.0;
    for (std::size_t l = 0; l < rule.weights.size(); ++l) {
        Vector x = verts * rule.nodes.col(static_cast<int>(l));
        acc += rule.weights[l] * field_dot_normal(x, normal, kind, component, nvar);
    }
    return area * acc;
}

// The rule alone cannot resolve faces spanning several standard deviations;
// bisect the longest edge until the two-level difference is negligible.
double adaptive_flux(const Matrix& verts, const Vector& normal, FieldKind kind,
                     const cubature::CubatureRule& rule, int component, int nvar,
                     double coarse, int depth) {
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
    double fa = rule_flux(a, normal, kind, rule, component, nvar);
    double fb = rule_flux(b, normal, kind, rule, component, nvar);
    double fine = fa + fb;
    if (depth >= 30 || std::fabs(fine - coarse) <= 1e-12 + 1e-9 * std::fabs(fine)) return fine;
    return adaptive_flux(a, normal, kind, rule, component, nvar, fa, depth + 1) +
           adaptive_flux(b, normal, kind, rule, component, nvar, fb, depth + 1);
}

} // namespace

double face_flux(const geom::OrientedFace& face, FieldKind kind,
                 const cubature::CubatureRule& face_rule, int component) {
    const int nvar = static_cast<int>(face.vertices.rows());
    if (nvar == 1) {
        return field_dot_normal(face.vertices.col(0), face.normal, kind, component, nvar);
    }
    if (face_rule.dim != nvar - 1)
        throw std::invalid_argument("face_flux: rule dimension must be nvar-1");
    if (face_area(face) == 0.0) return 0.0;
    double coarse = rule_flux(face.vertices, face.normal, kind, face_rule, component, nvar);
    return adaptive_flux(face.vertices, face.normal, kind, face_rule, component, nvar, coarse, 0);
}

std::pair<double, double> bounds_outside(double r, double R, int nvar) {
    if (!(r > 0.0)) throw std::domain_error("bounds_outside: r must be positive");
    if (r > R) throw std::domain_error("bounds_outside: r exceeds R");
    return {gauss::chi_sf(R, nvar), gauss::chi_sf(r, nvar)};
}

double outside_probability(const std::vector<geom::OrientedFace>& hull_faces, int nvar,
                           const cubature::CubatureRule& face_rule) {
    if (hull_faces.empty()) throw std::domain_error("outside_probability: empty hull");
    for (const auto& f : hull_faces) {
        if (f.normal.dot(f.vertices.col(0)) <= 0.0)
            throw std::domain_error(
                "outside_probability: origin not strictly inside the hull; use bounds_outside");
    }
    double acc = 0.0;
    for (const auto& f : hull_faces) acc += face_flux(f, FieldKind::RadialExterior, face_rule, 0);
    return acc;
}

double region_probability(const std::vector<geom::OrientedFace>& boundary, FieldKind kind,
                          const cubature::CubatureRule& face_rule, int component) {
    if (boundary.empty()) throw std::domain_error("region_probability: empty boundary");
    const int nvar = static_cast<int>(boundary.front().vertices.rows());
    // orientation audit: a closed, outward-oriented surface has zero net flux
    // of every constant field
    Vector net = Vector::Zero(nvar);
    double total_area = 0.0;
    for (const auto& f : boundary) {
        double a = face_area(f);
        net += a * f.normal;
        total_area += a;
    }
    if (total_area > 0.0 && net.norm() > 1e-8 * total_area)
        throw std::domain_error("region_probability: boundary is not closed/oriented");

    double acc = 0.0;
    for (const auto& f : boundary) acc += face_flux(f, kind, face_rule, component);
    return acc;
}

} // namespace tessera::boundary
