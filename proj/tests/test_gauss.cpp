#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tessera/gauss.hpp"

#include <cmath>

using namespace tessera;
using doctest::Approx;

namespace {
constexpr double kPi = 3.14159265358979323846;

// independent quadrature oracle: adaptive Simpson on [a,b]
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int depth = 0) {
    double m = 0.5 * (a + b);
    double fa = f(a), fb = f(b), fm = f(m);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double left = (m - a) / 6.0 * (fa + 4.0 * f(lm) + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * f(rm) + fb);
    if (depth > 40 || std::fabs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, 0.5 * tol, depth + 1) +
           adaptive_simpson(f, m, b, 0.5 * tol, depth + 1);
}
} // namespace

TEST_CASE("joint density at the origin") {
    Vector x = Vector::Zero(2);
    CHECK(gauss::std_gauss_density(x) == Approx(1.0 / (2.0 * kPi)).epsilon(1e-12));
    for (int n = 1; n <= 8; ++n) {
        Vector z = Vector::Zero(n);
        CHECK(gauss::std_gauss_density(z) == Approx(std::pow(2.0 * kPi, -0.5 * n)).epsilon(1e-12));
    }
}

TEST_CASE("joint density equals the product of univariate densities") {
    Vector x(2);
    x << 3.0, 4.0;
    double expect = 1.0 / (2.0 * kPi) * std::exp(-12.5);
    CHECK(gauss::std_gauss_density(x) == Approx(expect).epsilon(1e-13));
    CHECK(gauss::std_gauss_density(x) ==
          Approx(gauss::std_normal_pdf(3.0) * gauss::std_normal_pdf(4.0)).epsilon(1e-13));
    Vector bad(2);
    bad << 1.0, std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(gauss::std_gauss_density(bad), std::domain_error);
}

TEST_CASE("ball volume and surface") {
    CHECK(gauss::ball_volume(1.0, 2) == Approx(kPi).epsilon(1e-13));
    CHECK(gauss::ball_surface(1.0, 2) == Approx(2.0 * kPi).epsilon(1e-13));
    CHECK(gauss::ball_volume(1.0, 3) == Approx(4.0 * kPi / 3.0).epsilon(1e-13));
    CHECK(gauss::ball_surface(1.0, 3) == Approx(4.0 * kPi).epsilon(1e-13));
    // rho=2, n=4: pi^2 rho^4 / Gamma(3) = 8 pi^2
    CHECK(gauss::ball_volume(2.0, 4) == Approx(8.0 * kPi * kPi).epsilon(1e-13));
    CHECK_THROWS_AS(gauss::ball_volume(-1.0, 2), std::domain_error);
}

TEST_CASE("surface is the radial derivative of volume") {
    for (int n : {1, 2, 3, 5, 8}) {
        for (double rho : {0.5, 1.3, 4.0}) {
            double h = 1e-6 * rho;
            double fd = (gauss::ball_volume(rho + h, n) - gauss::ball_volume(rho - h, n)) /
                        (2.0 * h);
            CHECK(gauss::ball_surface(rho, n) == Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("chi distribution basics") {
    for (int n = 1; n <= 8; ++n) {
        CHECK(gauss::chi_cdf(0.0, n) == 0.0);
        CHECK(gauss::chi_sf(0.0, n) == 1.0);
    }
    // 2-dimensional closed form: S(rho) = exp(-rho^2/2)
    CHECK(gauss::chi_sf(3.0, 2) == Approx(std::exp(-4.5)).epsilon(1e-12));
    CHECK(gauss::chi_sf(3.0, 2) == Approx(1.11090e-2).epsilon(1e-4));
}

TEST_CASE("chi pdf integrates to one") {
    for (int n = 1; n <= 8; ++n) {
        double mass = adaptive_simpson([n](double r) { return gauss::chi_pdf(r, n); }, 0.0, 30.0,
                                       1e-12);
        CHECK(mass == Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("chi cdf + sf identity and monotonicity") {
    for (int n = 1; n <= 8; ++n) {
        double prev_cdf = -1.0, prev_sf = 2.0;
        for (double rho = 0.0; rho <= 10.0; rho += 0.25) {
            double c = gauss::chi_cdf(rho, n), s = gauss::chi_sf(rho, n);
            CHECK(std::fabs(c + s - 1.0) < 1e-12);
            CHECK(c >= prev_cdf);
            CHECK(s <= prev_sf);
            prev_cdf = c;
            prev_sf = s;
        }
    }
}

TEST_CASE("chi pdf identity: density at radius times ball surface") {
    for (int n = 1; n <= 8; ++n) {
        for (double rho : {0.3, 1.0, 2.5, 6.0}) {
            double lhs = gauss::chi_pdf(rho, n);
            double rhs = gauss::std_gauss_density_radial(rho, n) * gauss::ball_surface(rho, n);
            CHECK(lhs == Approx(rhs).epsilon(1e-12));
        }
    }
}

TEST_CASE("inverse chi round trips") {
    CHECK(gauss::inv_chi_sf(std::exp(-4.5), 2) == Approx(3.0).epsilon(1e-12));
    CHECK(gauss::inv_chi_cdf(gauss::chi_cdf(1.7, 5), 5) == Approx(1.7).epsilon(1e-10));
    CHECK(gauss::inv_chi_sf(1e-6, 2) == Approx(std::sqrt(-2.0 * std::log(1e-6))).epsilon(1e-12));
    CHECK(gauss::inv_chi_sf(1e-6, 2) == Approx(5.25652).epsilon(1e-5));
    for (int n = 1; n <= 8; ++n) {
        for (double p : {1e-12, 1e-6, 1e-3, 0.1, 0.5, 0.9, 1.0 - 1e-9}) {
            double rho = gauss::inv_chi_cdf(p, n);
            CHECK(gauss::chi_cdf(rho, n) == Approx(p).epsilon(1e-12));
            double rho2 = gauss::inv_chi_sf(p, n);
            CHECK(gauss::chi_sf(rho2, n) == Approx(p).epsilon(1e-12));
        }
        CHECK_THROWS_AS(gauss::inv_chi_cdf(0.0, n), std::domain_error);
        CHECK_THROWS_AS(gauss::inv_chi_sf(1.0, n), std::domain_error);
    }
}

TEST_CASE("standard normal quantile") {
    for (double p : {1e-300, 1e-12, 1e-6, 0.025, 0.5, 0.975, 1.0 - 1e-12}) {
        double x = gauss::inv_std_normal_cdf(p);
        double back = p < 0.5 ? gauss::std_normal_cdf(x) : 1.0 - gauss::std_normal_sf(x);
        CHECK(back == Approx(p).epsilon(1e-10));
    }
    CHECK(gauss::inv_std_normal_cdf(0.5) == Approx(0.0).epsilon(1e-15));
    CHECK(gauss::inv_std_normal_cdf(gauss::std_normal_cdf(-4.753424308822899)) ==
          Approx(-4.753424308822899).epsilon(1e-10));
}

TEST_CASE("incomplete gamma against closed forms") {
    // P(1, x) = 1 - exp(-x)
    for (double x : {0.1, 1.0, 3.0, 10.0}) {
        CHECK(gauss::gamma_p(1.0, x) == Approx(-std::expm1(-x)).epsilon(1e-13));
        CHECK(gauss::gamma_q(1.0, x) == Approx(std::exp(-x)).epsilon(1e-13));
    }
    // P(1/2, x) = erf(sqrt(x))
    for (double x : {0.2, 1.0, 4.0}) {
        CHECK(gauss::gamma_p(0.5, x) == Approx(std::erf(std::sqrt(x))).epsilon(1e-13));
    }
}
