#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tessera/rng.hpp"
#include "tessera/transforms.hpp"

#include <cmath>

using namespace tessera;
using namespace tessera::transforms;
using doctest::Approx;

TEST_CASE("marginal quantile/cdf round trips") {
    std::vector<Marginal> ms = {Marginal::normal(1.0, 2.0), Marginal::gumbel(0.0, 1.0),
                                Marginal::weibull(1.0, 1.5), Marginal::uniform(-1.0, 3.0)};
    for (const auto& m : ms) {
        for (double p : {1e-8, 1e-3, 0.25, 0.5, 0.75, 1.0 - 1e-6}) {
            double x = m.quantile(p);
            CHECK(m.cdf(x) == Approx(p).epsilon(1e-10));
        }
        // pdf is the numerical derivative of the cdf
        double x0 = m.quantile(0.37);
        double h = 1e-6;
        double fd = (m.cdf(x0 + h) - m.cdf(x0 - h)) / (2.0 * h);
        CHECK(m.pdf(x0) == Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("gumbel and weibull moments") {
    Marginal g = Marginal::gumbel(0.0, 1.0);
    CHECK(g.mean() == Approx(0.57721566).epsilon(1e-7));
    CHECK(g.stddev() == Approx(M_PI / std::sqrt(6.0)).epsilon(1e-12));

    Marginal w = Marginal::weibull(1.0, 1.5);
    CHECK(w.mean() == Approx(std::tgamma(1.0 + 2.0 / 3.0)).epsilon(1e-12));
    double var = std::tgamma(1.0 + 4.0 / 3.0) - std::pow(std::tgamma(1.0 + 2.0 / 3.0), 2.0);
    CHECK(w.stddev() == Approx(std::sqrt(var)).epsilon(1e-12));

    // moments agree with quantile-based Monte Carlo
    CounterRng rng(4, 4);
    double sum = 0.0, sum2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double x = w.quantile(rng.uniform(i));
        sum += x;
        sum2 += x * x;
    }
    double mc_mean = sum / n;
    double mc_sd = std::sqrt(sum2 / n - mc_mean * mc_mean);
    CHECK(w.mean() == Approx(mc_mean).epsilon(0.01));
    CHECK(w.stddev() == Approx(mc_sd).epsilon(0.02));
}

TEST_CASE("underlying gaussian correlation solve") {
    // identity for a pair of normals
    CHECK(nataf_corr(Marginal::normal(0, 1), Marginal::normal(2, 3), 0.37) == Approx(0.37));
    // independence is preserved
    CHECK(nataf_corr(Marginal::gumbel(0, 1), Marginal::weibull(1, 1.5), 0.0) == 0.0);
    // the documented pair: pearson -0.708 maps to about -0.8
    double rz = nataf_corr(Marginal::gumbel(0, 1), Marginal::weibull(1, 1.5), -0.708);
    CHECK(rz == Approx(-0.8).epsilon(0.025));
    // odd in the target for a symmetric pair
    Marginal u = Marginal::uniform(0, 1);
    double plus = nataf_corr(u, u, 0.4);
    double minus = nataf_corr(u, u, -0.4);
    CHECK(plus == Approx(-minus).epsilon(1e-6));
    // exponential pair: correlations below 1 - pi^2/6 are unattainable
    Marginal e = Marginal::weibull(1.0, 1.0);
    CHECK_THROWS_AS(nataf_corr(e, e, -0.9), std::domain_error);
    double near_floor = nataf_corr(e, e, -0.6);
    CHECK(near_floor < -0.85);
}

TEST_CASE("standard gaussian space is the identity map") {
    auto ps = ProbabilitySpace::standard_gaussian(3);
    CHECK(ps.is_standard_gaussian());
    Vector x(3);
    x << 0.3, -1.2, 2.0;
    CHECK((ps.to_G(x) - x).norm() == 0.0);
    CHECK((ps.from_G(x) - x).norm() == 0.0);
}

TEST_CASE("independent normal space is an affine map") {
    auto ps = ProbabilitySpace::independent(
        {Marginal::normal(10.0, 2.0), Marginal::normal(-1.0, 0.5)});
    Vector u(2);
    u << 1.0, -2.0;
    Vector x = ps.from_G(u);
    CHECK(x(0) == Approx(12.0));
    CHECK(x(1) == Approx(-2.0));
    CHECK((ps.to_G(x) - u).norm() < 1e-14);
}

TEST_CASE("nataf chain round trip on the documented example") {
    Matrix corr(2, 2);
    corr << 1.0, -0.708, -0.708, 1.0;
    ProbabilitySpace ps({Marginal::gumbel(0, 1), Marginal::weibull(1, 1.5)}, corr);
    CHECK(ps.gauss_corr()(0, 1) == Approx(-0.8).epsilon(0.025));
    // Cholesky keeps the first component of both Gaussian spaces identical
    CHECK(ps.chol_lower()(0, 0) == Approx(1.0).epsilon(1e-12));

    CounterRng rng(21, 0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        Vector u(2);
        u << rng.normal(2 * i), rng.normal(2 * i + 1);
        Vector x = ps.from_G(u);
        Vector back = ps.to_G(x);
        worst = std::max(worst, (back - u).norm() / std::max(1.0, u.norm()));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("first gaussian component passes through the cholesky unchanged") {
    Matrix corr(2, 2);
    corr << 1.0, 0.5, 0.5, 1.0;
    ProbabilitySpace ps({Marginal::normal(0, 1), Marginal::normal(0, 1)}, corr);
    Vector u(2);
    u << 0.7, -0.4;
    Vector z = ps.chol_lower() * u;
    CHECK(z(0) == Approx(u(0)).epsilon(1e-14));
}

TEST_CASE("probability preservation for an independent pair") {
    auto ps = ProbabilitySpace::independent(
        {Marginal::gumbel(0.0, 1.0), Marginal::weibull(1.0, 1.5)});
    // P(x1 <= a, x2 <= b) under mapped standard normals vs direct marginals
    double a = 1.0, b = 0.8;
    double direct = Marginal::gumbel(0, 1).cdf(a) * Marginal::weibull(1, 1.5).cdf(b);
    CounterRng rng(5, 8);
    const int n = 400000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
        Vector u(2);
        u << rng.normal(2 * i), rng.normal(2 * i + 1);
        Vector x = ps.from_G(u);
        if (x(0) <= a && x(1) <= b) ++hits;
    }
    double mc = static_cast<double>(hits) / n;
    double sigma = std::sqrt(direct * (1.0 - direct) / n);
    CHECK(std::fabs(mc - direct) < 3.0 * sigma + 1e-12);
}

TEST_CASE("non positive definite correlation is rejected") {
    Matrix corr(3, 3);
    corr << 1.0, 0.9, -0.9, 0.9, 1.0, 0.9, -0.9, 0.9, 1.0;
    std::vector<Marginal> ms(3, Marginal::normal(0, 1));
    CHECK_THROWS_AS(ProbabilitySpace(ms, corr), std::domain_error);
}

TEST_CASE("marginal parser") {
    auto m = Marginal::parse("gumbel(0,1)");
    CHECK(m.family() == Marginal::Family::Gumbel);
    auto w = Marginal::parse("weibull(1, 1.5)");
    CHECK(w.param2() == Approx(1.5));
    CHECK_THROWS_AS(Marginal::parse("cauchy(0,1)"), std::invalid_argument);
}
