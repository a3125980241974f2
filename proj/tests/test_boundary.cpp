#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tessera/boundary.hpp"
#include "tessera/cubature.hpp"
#include "tessera/gauss.hpp"
#include "tessera/geometry.hpp"
#include "tessera/rng.hpp"

#include <cmath>

using namespace tessera;
using doctest::Approx;

namespace {

// chi closed forms used as independent oracles
double chi3_cdf(double rho) {
    return std::erf(rho / std::sqrt(2.0)) -
           std::sqrt(2.0 / M_PI) * rho * std::exp(-0.5 * rho * rho);
}

std::vector<geom::OrientedFace> polygon_boundary(int sides, double radius) {
    geom::ConvexHull hull(2);
    for (int k = 0; k < sides; ++k) {
        double a = 2.0 * M_PI * k / sides;
        Vector p(2);
        p << radius * std::cos(a), radius * std::sin(a);
        hull.add_point(p);
    }
    return hull.boundary();
}

std::vector<EDPoint> random_points(int n, int dim, std::uint64_t seed, double spread) {
    CounterRng rng(seed, 11);
    std::vector<EDPoint> pts;
    for (int i = 0; i < n; ++i) {
        EDPoint p;
        p.coords.resize(dim);
        for (int v = 0; v < dim; ++v)
            p.coords(v) = spread * rng.normal(static_cast<std::uint64_t>(i) * dim + v);
        pts.push_back(p);
    }
    return pts;
}

} // namespace

TEST_CASE("analytic outside bounds") {
    auto [lo, hi] = boundary::bounds_outside(3.0, 3.0, 2);
    CHECK(lo == Approx(std::exp(-4.5)).epsilon(1e-12));
    CHECK(hi == Approx(std::exp(-4.5)).epsilon(1e-12));

    auto [lo3, hi3] = boundary::bounds_outside(1.0, 2.0, 3);
    CHECK(lo3 == Approx(1.0 - chi3_cdf(2.0)).epsilon(1e-10));
    CHECK(hi3 == Approx(1.0 - chi3_cdf(1.0)).epsilon(1e-10));
    CHECK(lo3 < hi3);

    auto [lo0, hi0] = boundary::bounds_outside(1e-9, 1.0, 4);
    CHECK(hi0 == Approx(1.0).epsilon(1e-9));
    (void)lo0;

    CHECK_THROWS_AS(boundary::bounds_outside(2.0, 1.0, 2), std::domain_error);
}

TEST_CASE("outside probability of a polygonized disk") {
    auto faces = polygon_boundary(64, 3.0);
    auto rule = cubature::grundmann_moeller(1, 2);
    double p = boundary::outside_probability(faces, 2, rule);
    double exact = std::exp(-4.5);
    CHECK(p == Approx(exact).epsilon(0.01));
    // the polygon lies between the inscribed and circumscribed disks
    double r_in = 3.0 * std::cos(M_PI / 64.0);
    CHECK(p >= gauss::chi_sf(3.0, 2) - 1e-12);
    CHECK(p <= gauss::chi_sf(r_in, 2) + 1e-12);
}

TEST_CASE("outside probability of a huge box is negligible") {
    geom::ConvexHull hull(2);
    for (double sx : {-10.0, 10.0})
        for (double sy : {-10.0, 10.0}) {
            Vector p(2);
            p << sx, sy;
            hull.add_point(p);
        }
    auto rule = cubature::grundmann_moeller(1, 2);
    CHECK(boundary::outside_probability(hull.boundary(), 2, rule) <= 1e-20);
}

TEST_CASE("3d random hull stays within the analytic bounds") {
    auto pts = random_points(40, 3, 17, 2.5);
    geom::ConvexHull hull(3);
    for (const auto& p : pts) hull.add_point(p.coords);
    double r = hull.inscribed_radius();
    REQUIRE(r > 0.0);
    double big = 0.0;
    for (const auto& p : pts) big = std::max(big, p.coords.norm());
    auto [lo, hi] = boundary::bounds_outside(r, big, 3);
    auto rule = cubature::grundmann_moeller(2, 2);
    double p = boundary::outside_probability(hull.boundary(), 3, rule);
    CHECK(p >= lo - 1e-9);
    CHECK(p <= hi + 1e-9);
}

TEST_CASE("origin outside the hull is refused") {
    geom::ConvexHull hull(2);
    for (auto [x, y] : {std::pair{2.0, 2.0}, {3.0, 2.0}, {2.0, 3.0}, {3.0, 3.0}}) {
        Vector p(2);
        p << x, y;
        hull.add_point(p);
    }
    auto rule = cubature::grundmann_moeller(1, 2);
    CHECK_THROWS_AS(boundary::outside_probability(hull.boundary(), 2, rule), std::domain_error);
}

TEST_CASE("region probability of the unit square") {
    geom::ConvexHull hull(2);
    for (auto [x, y] : {std::pair{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}}) {
        Vector p(2);
        p << x, y;
        hull.add_point(p);
    }
    auto faces = hull.boundary();
    auto rule = cubature::grundmann_moeller(1, 3);
    double band = gauss::std_normal_cdf(1.0) - gauss::std_normal_cdf(-1.0);
    double expect = band * band;
    CHECK(expect == Approx(0.46606).epsilon(2e-4));
    for (int v = 0; v < 2; ++v) {
        double p = boundary::region_probability(faces, boundary::FieldKind::ComponentRatio, rule, v);
        CHECK(p == Approx(expect).epsilon(1e-6));
    }
    double pf = boundary::region_probability(faces, boundary::FieldKind::FullComponentRatio, rule);
    CHECK(pf == Approx(expect).epsilon(1e-6));
    double pr = boundary::region_probability(faces, boundary::FieldKind::RadialInterior, rule);
    CHECK(pr == Approx(expect).epsilon(1e-4));  // gauss consistency across fields
}

TEST_CASE("complementarity: interior plus outside equals one") {
    for (int dim = 2; dim <= 4; ++dim) {
        auto pts = random_points(30, dim, 400 + dim, 2.2);
        geom::ConvexHull hull(dim);
        for (const auto& p : pts) hull.add_point(p.coords);
        REQUIRE(hull.inscribed_radius() > 0.0);
        auto rule = cubature::grundmann_moeller(dim - 1, 2);
        auto faces = hull.boundary();
        double inside = boundary::region_probability(faces, boundary::FieldKind::RadialInterior, rule);
        double outside = boundary::outside_probability(faces, dim, rule);
        CHECK(inside + outside == Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("field choices agree on closed polytopes") {
    auto pts = random_points(25, 3, 900, 2.0);
    geom::ConvexHull hull(3);
    for (const auto& p : pts) hull.add_point(p.coords);
    auto faces = hull.boundary();
    auto rule = cubature::grundmann_moeller(2, 2);
    double radial = boundary::region_probability(faces, boundary::FieldKind::RadialInterior, rule);
    double comp = boundary::region_probability(faces, boundary::FieldKind::FullComponentRatio, rule);
    CHECK(radial == Approx(comp).epsilon(1e-4));
}

TEST_CASE("single simplex boundary agrees with the volume cubature") {
    std::vector<EDPoint> pts;
    for (auto [x, y] : {std::pair{0.3, 0.1}, {1.6, 0.4}, {0.6, 1.5}}) {
        EDPoint p;
        p.coords.resize(2);
        p.coords << x, y;
        pts.push_back(p);
    }
    auto tri = geom::Triangulation::build(2, pts);
    auto group = std::vector<int>{tri.by_key().begin()->second};
    auto faces = tri.cluster_boundary(group);
    auto face_rule = cubature::grundmann_moeller(1, 3);
    auto vol_rule = cubature::grundmann_moeller(2, 3);
    double via_boundary =
        boundary::region_probability(faces, boundary::FieldKind::ComponentRatio, face_rule, 0);
    double via_cubature = cubature::integrate_simplex(
        tri.cell_vertices(group[0]), vol_rule,
        [](const Vector& x) { return gauss::std_gauss_density(x); }).value;
    CHECK(std::fabs(via_boundary - via_cubature) <=
          std::max(1e-8, 1e-3 * via_cubature));
}

TEST_CASE("enlarging the hull never increases the outside probability") {
    auto rule = cubature::grundmann_moeller(1, 2);
    auto pts = random_points(60, 2, 5151, 1.8);
    geom::ConvexHull hull(2);
    double prev = 1.0;
    int measured = 0;
    for (const auto& p : pts) {
        hull.add_point(p.coords);
        if (!hull.ready() || hull.inscribed_radius() <= 0.0) continue;
        double out = boundary::outside_probability(hull.boundary(), 2, rule);
        if (measured > 0) CHECK(out <= prev + 1e-12);
        prev = out;
        ++measured;
    }
    CHECK(measured > 20);
}

TEST_CASE("open boundary is detected") {
    auto faces = polygon_boundary(16, 2.0);
    faces.pop_back();  // puncture the surface
    auto rule = cubature::grundmann_moeller(1, 2);
    CHECK_THROWS_AS(
        boundary::region_probability(faces, boundary::FieldKind::RadialInterior, rule),
        std::domain_error);
}
