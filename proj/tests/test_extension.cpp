#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tessera/extension.hpp"
#include "tessera/gauss.hpp"

#include <cmath>

using namespace tessera;
using doctest::Approx;

namespace {

Vector v2(double x, double y) {
    Vector v(2);
    v << x, y;
    return v;
}

// square of safe corners at +-a plus one failure point near the origin
est::Estimator boxed_failure(double a, Vector fail_at) {
    est::Estimator e(2);
    e.update(v2(-a, -a), Outcome::Safe);
    e.update(v2(a, -a), Outcome::Safe);
    e.update(v2(a, a), Outcome::Safe);
    e.update(v2(-a, a), Outcome::Safe);
    e.update(fail_at, Outcome::Failure);
    return e;
}

} // namespace

TEST_CASE("offset rule") {
    ext::Params params;
    bool clamped = false;
    // closed-form check in two dimensions: S_chi^-1(p) = sqrt(-2 ln p)
    double o = ext::exploration_offset(0.1, 2.5, 3.0, 2, params, &clamped);
    double arg = 0.1 / (2.0 * M_PI * 4.0);
    CHECK(o == Approx(std::sqrt(-2.0 * std::log(arg)) - 2.5).epsilon(1e-10));
    CHECK(o == Approx(0.825).epsilon(1e-2));
    CHECK(!clamped);

    // degenerate argument clamps to the minimum offset and flags
    double oc = ext::exploration_offset(0.0, 0.0, 0.0, 2, params, &clamped);
    CHECK(clamped);
    CHECK(oc == params.min_offset);
}

TEST_CASE("psi criterion prefers distance and density") {
    std::vector<EDPoint> pts(1);
    pts[0].coords = v2(0, 0);

    // equal densities, distances 1 and 2: the farther candidate wins by 2^n
    double near = ext::psi_score(v2(1, 0), pts, 2);
    double far = ext::psi_score(v2(2, 0), pts, 2);
    double density_ratio = std::sqrt(gauss::std_gauss_density(v2(2, 0)) /
                                     gauss::std_gauss_density(v2(1, 0)));
    CHECK(far / near == Approx(4.0 * density_ratio).epsilon(1e-12));

    // equal distance from the nearest point, lower radius wins
    std::vector<EDPoint> two(2);
    two[0].coords = v2(0, 0);
    two[1].coords = v2(5, 0);
    double low_rho = ext::psi_score(v2(1, 0), two, 2);
    double high_rho = ext::psi_score(v2(4, 0), two, 2);
    CHECK(low_rho > high_rho);
}

TEST_CASE("psi is invariant under axis permutation") {
    std::vector<EDPoint> pts(2);
    pts[0].coords = v2(0.3, -1.2);
    pts[1].coords = v2(2.0, 0.7);
    std::vector<EDPoint> swapped(2);
    swapped[0].coords = v2(-1.2, 0.3);
    swapped[1].coords = v2(0.7, 2.0);
    CHECK(ext::psi_score(v2(1.1, 0.4), pts, 2) ==
          Approx(ext::psi_score(v2(0.4, 1.1), swapped, 2)).epsilon(1e-13));
}

TEST_CASE("first point is the origin, then orthonormal bootstrap directions") {
    est::Estimator e(3);
    ext::Params params;
    CounterRng rng(42, 1);
    auto c0 = ext::decide(e, params, rng, 1);
    CHECK(c0.kind == CandidateKind::Bootstrap);
    CHECK(c0.coords.norm() == 0.0);
    e.update(c0.coords, Outcome::Safe);

    std::vector<Vector> dirs;
    for (int step = 2; step <= 4; ++step) {
        CounterRng srng(42, static_cast<std::uint64_t>(step));
        auto c = ext::decide(e, params, srng, step);
        CHECK(c.kind == CandidateKind::Bootstrap);
        double radius = c.coords.norm();
        CHECK(radius > 0.5);
        for (const auto& d : dirs)
            CHECK(std::fabs(d.normalized().dot(c.coords.normalized())) < 1e-9);
        dirs.push_back(c.coords);
        e.update(c.coords, Outcome::Safe);
    }
    CHECK(e.hull_ready());
}

TEST_CASE("decision rule: heavy mixed simplex is exploited") {
    auto e = boxed_failure(3.1, v2(0.0, 0.1));
    auto [pmax, cell] = e.max_mixed_pj();
    double pbeta = gauss::std_normal_sf(e.inscribed_r());
    REQUIRE(pmax > pbeta);  // scenario sanity
    ext::Params params;
    CounterRng rng(1, 6);
    auto c = ext::decide(e, params, rng, 6);
    CHECK(c.kind == CandidateKind::Exploit);
    CHECK(c.simplex_id == cell);
    // the exploited point is the circumcenter of the heaviest mixed simplex
    Vector cc = e.triangulation()->cell_circumcenter(cell);
    CHECK((c.coords - cc).norm() < 1e-12);
    CHECK(c.score == Approx(pmax));
}

TEST_CASE("decision rule: light mixed region defers to exploration") {
    // localize the mixed cells near a far corner with extra safe points so
    // their probability content stays below Phi(-r)
    est::Estimator e(2);
    e.update(v2(-2, -2), Outcome::Safe);
    e.update(v2(2, -2), Outcome::Safe);
    e.update(v2(2, 2), Outcome::Safe);
    e.update(v2(-2, 2), Outcome::Safe);
    e.update(v2(1.5, 1.5), Outcome::Safe);
    e.update(v2(1.9, 1.5), Outcome::Safe);
    e.update(v2(1.5, 1.9), Outcome::Safe);
    e.update(v2(1.95, 1.95), Outcome::Failure);
    auto [pmax, cell] = e.max_mixed_pj();
    double pbeta = gauss::std_normal_sf(e.inscribed_r());
    REQUIRE(pmax < pbeta);  // scenario sanity
    (void)cell;
    ext::Params params;
    CounterRng rng(1, 6);
    auto c = ext::decide(e, params, rng, 6);
    CHECK(c.kind == CandidateKind::Explore);
    // exploration candidates lie on the offset plane of the critical facet
    const auto& f = e.hull_facets()[c.facet_id];
    double o = ext::exploration_offset(e.current_p_out(), -f.offset, e.circumscribed_R(), 2,
                                       params);
    CHECK(f.normal.dot(c.coords) + f.offset == Approx(o).epsilon(1e-9));
    // the critical facet is the wall nearest the origin
    for (const auto& g : e.hull_facets()) CHECK(-f.offset <= -g.offset + 1e-12);
}

TEST_CASE("explore candidates clear the duplicate guard and maximize psi") {
    auto e = boxed_failure(2.0, v2(1.9, 1.9));
    ext::Params params;
    params.pool_size = 50;
    CounterRng rng(11, 3);
    auto c = ext::explore_candidate(e, 0, params, rng);
    for (const auto& p : e.points())
        CHECK((c.coords - p.coords).norm() >= params.duplicate_guard);
    CHECK(c.score > 0.0);
    CHECK(c.score == Approx(ext::psi_score(c.coords, e.points(), 2)).epsilon(1e-12));
}

TEST_CASE("deterministic decisions under a fixed seed") {
    auto e = boxed_failure(2.0, v2(1.9, 1.9));
    ext::Params params;
    CounterRng rng(123, 9);
    auto a = ext::decide(e, params, rng, 9);
    auto b = ext::decide(e, params, rng, 9);
    CHECK(a.kind == b.kind);
    CHECK((a.coords - b.coords).norm() == 0.0);
    CHECK(a.score == b.score);
}

TEST_CASE("repeated exploitation respects the duplicate guard") {
    auto e = boxed_failure(3.1, v2(0.0, 0.1));
    ext::Params params;
    for (int step = 6; step < 26; ++step) {
        CounterRng rng(5, static_cast<std::uint64_t>(step));
        auto c = ext::decide(e, params, rng, step);
        for (const auto& p : e.points())
            CHECK((c.coords - p.coords).norm() >= params.duplicate_guard);
        // evaluate against the true boundary |x| <= 0.8
        Outcome out = c.coords.norm() <= 0.8 ? Outcome::Failure : Outcome::Safe;
        e.update(c.coords, out);
    }
}

TEST_CASE("screening cadence overrides the base rule") {
    auto e = boxed_failure(3.1, v2(0.0, 0.1));
    ext::Params params;
    params.screening_k = 5;
    for (int step = 6; step <= 30; ++step) {
        CounterRng rng(77, static_cast<std::uint64_t>(step));
        auto c = ext::decide(e, params, rng, step);
        if (step % 5 == 0) {
            CHECK(c.kind == CandidateKind::Screen);
            CHECK(c.simplex_id >= 0);
        } else {
            CHECK(c.kind != CandidateKind::Screen);
        }
        Outcome out = c.coords.norm() <= 0.8 ? Outcome::Failure : Outcome::Safe;
        e.update(c.coords, out);
    }
}

TEST_CASE("screening disabled never emits screen candidates") {
    auto e = boxed_failure(3.1, v2(0.0, 0.1));
    ext::Params params;  // screening_k = 0
    for (int step = 6; step <= 20; ++step) {
        CounterRng rng(78, static_cast<std::uint64_t>(step));
        auto c = ext::decide(e, params, rng, step);
        CHECK(c.kind != CandidateKind::Screen);
        Outcome out = c.coords.norm() <= 0.8 ? Outcome::Failure : Outcome::Safe;
        e.update(c.coords, out);
    }
}
