#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tessera/estimator.hpp"
#include "tessera/gauss.hpp"
#include "tessera/rng.hpp"

#include <cmath>
#include <sstream>

using namespace tessera;
using doctest::Approx;

namespace {

Vector v2(double x, double y) {
    Vector v(2);
    v << x, y;
    return v;
}

} // namespace

TEST_CASE("classification from vertex outcomes") {
    using O = Outcome;
    CHECK(est::classify({O::Safe, O::Safe, O::Safe}) == SimplexClass::Safe);
    CHECK(est::classify({O::Failure, O::Failure, O::Failure}) == SimplexClass::Failure);
    CHECK(est::classify({O::Safe, O::Failure, O::Safe}) == SimplexClass::Mixed);
}

TEST_CASE("all-safe design reports zero failure and ball-based outside bounds") {
    est::Estimator e(2);
    auto s1 = e.update(v2(0, 0), Outcome::Safe);
    CHECK(s1.p_f_v == 0.0);
    CHECK(s1.p_out_lower == Approx(1.0));  // R = 0
    CHECK(s1.p_out_upper == 1.0);

    e.update(v2(2, 0), Outcome::Safe);
    e.update(v2(0, 2), Outcome::Safe);
    auto s4 = e.update(v2(-2, -2), Outcome::Safe);
    CHECK(e.triangulation() == nullptr);
    CHECK(s4.p_f_v == 0.0);
    CHECK(s4.p_mix == 0.0);
    CHECK(s4.R == Approx(std::sqrt(8.0)));
    CHECK(s4.p_out_lower == Approx(gauss::chi_sf(s4.R, 2)).epsilon(1e-12));
    if (s4.r > 0.0) {
        CHECK(s4.p_out_upper == Approx(gauss::chi_sf(s4.r, 2)).epsilon(1e-12));
        REQUIRE(s4.p_out_div.has_value());
        CHECK(*s4.p_out_div >= s4.p_out_lower - 1e-9);
        CHECK(*s4.p_out_div <= s4.p_out_upper + 1e-9);
    }
}

TEST_CASE("first failure triggers the triangulation and a positive estimate") {
    est::Estimator e(2);
    e.update(v2(-2, -2), Outcome::Safe);
    e.update(v2(2, -2), Outcome::Safe);
    e.update(v2(2, 2), Outcome::Safe);
    e.update(v2(-2, 2), Outcome::Safe);
    CHECK(e.triangulation() == nullptr);
    CHECK(!e.failure_seen());

    auto s = e.update(v2(0.3, 0.2), Outcome::Failure);
    CHECK(e.failure_seen());
    REQUIRE(e.triangulation() != nullptr);
    CHECK(s.p_f_v > 0.0);
    CHECK(s.p_mix > 0.0);
    CHECK(s.p_f_pure == 0.0);  // no purely-failure simplex yet
    CHECK(s.p_f_pure <= s.p_f_v);
    CHECK(s.p_f_v <= s.p_f_pure + s.p_mix + 1e-15);
}

TEST_CASE("snapshots stay within probability bounds along a synthetic run") {
    est::Estimator e(2);
    CounterRng rng(99, 1);
    // failure beyond a line: x + y > 3.2
    auto outcome = [](const Vector& x) {
        return x(0) + x(1) > 3.2 ? Outcome::Failure : Outcome::Safe;
    };
    std::uint64_t c = 0;
    e.update(Vector::Zero(2), outcome(Vector::Zero(2)));
    for (int i = 0; i < 60; ++i) {
        Vector x(2);
        x << 2.5 * rng.normal(c++), 2.5 * rng.normal(c++);
        auto s = e.update(x, outcome(x));
        for (double p : {s.p_f_pure, s.p_f_v, s.p_mix, s.p_out_lower, s.p_out_upper}) {
            CHECK(p >= 0.0);
            CHECK(p <= 1.0 + 1e-12);
        }
        CHECK(s.p_f_pure <= s.p_f_v + 1e-15);
        CHECK(s.p_f_v <= s.p_f_pure + s.p_mix + 1e-15);
        CHECK(s.p_out_lower <= s.p_out_upper + 1e-15);
    }
    // the partition audit closes to one
    auto audit = e.partition_audit();
    CHECK(audit.total == Approx(1.0).epsilon(1e-5));
}

TEST_CASE("the outside divergence value is refreshed only on hull changes") {
    est::Estimator e(2);
    e.update(v2(-2, -2), Outcome::Safe);
    e.update(v2(2, -2), Outcome::Safe);
    e.update(v2(2, 2), Outcome::Safe);
    e.update(v2(-2, 2), Outcome::Safe);
    auto s0 = e.update(v2(0.1, 0.05), Outcome::Failure);
    REQUIRE(s0.p_out_div.has_value());
    // interior insertion: hull unchanged, cached value reused bit-for-bit
    auto s1 = e.update(v2(0.4, -0.3), Outcome::Safe);
    REQUIRE(s1.p_out_div.has_value());
    CHECK(*s1.p_out_div == *s0.p_out_div);
    // exterior insertion: hull changes and the value moves
    auto s2 = e.update(v2(3.5, 0.0), Outcome::Safe);
    REQUIRE(s2.p_out_div.has_value());
    CHECK(*s2.p_out_div < *s1.p_out_div);
}

TEST_CASE("replay reproduces snapshots bit for bit") {
    est::Estimator e(2);
    CounterRng rng(7, 2);
    auto outcome = [](const Vector& x) {
        return x.squaredNorm() > 4.0 ? Outcome::Failure : Outcome::Safe;
    };
    std::uint64_t c = 0;
    for (int i = 0; i < 40; ++i) {
        Vector x(2);
        x << 2.0 * rng.normal(c++), 2.0 * rng.normal(c++);
        e.update(x, outcome(x), x.squaredNorm());
    }
    auto replayed = est::Estimator::replay(2, {}, e.points());
    REQUIRE(replayed.history().size() == e.history().size());
    for (std::size_t i = 0; i < e.history().size(); ++i) {
        const auto& a = e.history()[i];
        const auto& b = replayed.history()[i];
        CHECK(a.p_f_pure == b.p_f_pure);
        CHECK(a.p_f_v == b.p_f_v);
        CHECK(a.p_mix == b.p_mix);
        CHECK(a.p_out_lower == b.p_out_lower);
        CHECK(a.p_out_upper == b.p_out_upper);
        CHECK(a.p_out_div.has_value() == b.p_out_div.has_value());
        if (a.p_out_div) CHECK(*a.p_out_div == *b.p_out_div);
        CHECK(a.r == b.r);
        CHECK(a.R == b.R);
    }
}

TEST_CASE("skeleton round trip through the estimator") {
    est::Estimator e(2);
    e.update(v2(-2, -2), Outcome::Safe);
    e.update(v2(2, -2), Outcome::Safe);
    e.update(v2(2, 2), Outcome::Safe);
    e.update(v2(-2, 2), Outcome::Safe, 1.5);
    e.update(v2(0, 0), Outcome::Failure, -0.25);

    std::stringstream ss;
    e.save_skeleton(ss);
    auto tri = geom::Triangulation::load(ss);
    CHECK(tri.num_points() == 5);
    CHECK(tri.point(4).outcome == Outcome::Failure);
    CHECK(tri.point(4).raw_g.has_value());
    CHECK(*tri.point(4).raw_g == Approx(-0.25));
    CHECK(tri.by_key().size() == e.triangulation()->by_key().size());
}

TEST_CASE("csv formatting") {
    CHECK(std::string(est::Estimator::csv_header()) ==
          "nsim,p_f_pure,p_f_v,p_mix,p_out_lower,p_out_upper,p_out_div,r,R");
    est::EstimateSnapshot s;
    s.nsim = 3;
    s.p_out_upper = 0.5;
    auto row = est::Estimator::csv_row(s);
    CHECK(row.rfind("3,", 0) == 0);
    CHECK(row.find(",,") != std::string::npos);  // empty divergence column
}

TEST_CASE("heaviest mixed simplex tracking") {
    est::Estimator e(2);
    CHECK(e.max_mixed_pj().second == -1);
    e.update(v2(-2, -2), Outcome::Safe);
    e.update(v2(2, -2), Outcome::Safe);
    e.update(v2(2, 2), Outcome::Safe);
    e.update(v2(-2, 2), Outcome::Safe);
    e.update(v2(0, 0.2), Outcome::Failure);
    auto [p, cid] = e.max_mixed_pj();
    CHECK(cid >= 0);
    CHECK(p > 0.0);
    CHECK(p == e.pj(cid));
    // the heaviest is indeed the max over mixed cells
    const auto* tri = e.triangulation();
    for (const auto& [key, c] : tri->by_key())
        if (tri->cell(c).cls == SimplexClass::Mixed) CHECK(e.pj(c) <= p + 1e-18);
}
