#include "tessera/gauss.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tessera::gauss {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;

double gamma_p_series(double s, double x) {
    // gamma(s,x)/Gamma(s) = x^s e^-x / Gamma(s+1) * sum_k x^k / ((s+1)...(s+k))
    double term = 1.0 / s;
    double sum = term;
    double a = s;
    for (int k = 0; k < 500; ++k) {
        a += 1.0;
        term *= x / a;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
    }
    return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

double gamma_q_contfrac(double s, double x) {
    // Q(s,x) via modified Lentz continued fraction.
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-17) break;
    }
    return h * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

double gamma_pdf(double s, double x) {
    if (x <= 0.0) return 0.0;
    return std::exp((s - 1.0) * std::log(x) - x - std::lgamma(s));
}

// Inverse of P(s,.) by Newton iteration on a bracketed root.
double inv_gamma_bracketed(double s, double p) {
    // Wilson-Hilferty starting guess.
    double g = inv_std_normal_cdf(p);
    double a = 1.0 - 1.0 / (9.0 * s) + g / (3.0 * std::sqrt(s));
    double x = s * a * a * a;
    if (!(x > 0.0) || !std::isfinite(x)) x = s;  // fall back to the mean

    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 200; ++it) {
        double f = gamma_p(s, x) - p;
        if (f > 0.0) hi = x; else lo = x;
        double df = gamma_pdf(s, x);
        double step = (df > 0.0) ? f / df : 0.0;
        double xn = x - step;
        if (!(xn > lo && (xn < hi || !std::isfinite(hi))) || step == 0.0) {
            // Newton left the bracket: bisect.
            xn = std::isfinite(hi) ? 0.5 * (lo + hi) : std::max(2.0 * x, 1.0);
        }
        if (std::fabs(xn - x) <= 1e-15 * std::fabs(xn) + 1e-300) { x = xn; break; }
        x = xn;
    }
    return x;
}

} // namespace

double std_normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
}

double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / kSqrt2);
}

double std_normal_sf(double x) {
    return 0.5 * std::erfc(x / kSqrt2);
}

double inv_std_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("inv_std_normal_cdf: p outside (0,1)");
    // Acklam's rational approximation, then one Halley step with erfc.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement on F(x) - p, evaluated through the stable tail.
    for (int i = 0; i < 2; ++i) {
        double e = (x < 0.0) ? 0.5 * std::erfc(-x / kSqrt2) - p
                             : (1.0 - p) - 0.5 * std::erfc(x / kSqrt2);
        double u = e * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
        x = x - u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double gamma_p(double s, double x) {
    if (s <= 0.0) throw std::domain_error("gamma_p: s must be positive");
    if (x < 0.0) throw std::domain_error("gamma_p: x must be nonnegative");
    if (x == 0.0) return 0.0;
    if (x < s + 1.0) return gamma_p_series(s, x);
    return 1.0 - gamma_q_contfrac(s, x);
}

double gamma_q(double s, double x) {
    if (s <= 0.0) throw std::domain_error("gamma_q: s must be positive");
    if (x < 0.0) throw std::domain_error("gamma_q: x must be nonnegative");
    if (x == 0.0) return 1.0;
    if (x < s + 1.0) return 1.0 - gamma_p_series(s, x);
    return gamma_q_contfrac(s, x);
}

double inv_gamma_p(double s, double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("inv_gamma_p: p outside (0,1)");
    return inv_gamma_bracketed(s, p);
}

double inv_gamma_q(double s, double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("inv_gamma_q: q outside (0,1)");
    if (q > 0.5) return inv_gamma_bracketed(s, 1.0 - q);
    // Newton directly on Q to keep relative accuracy for tiny tail masses.
    double x = inv_gamma_bracketed(s, 1.0 - q);
    for (int it = 0; it < 60; ++it) {
        double f = gamma_q(s, x) - q;
        double df = -gamma_pdf(s, x);
        if (df == 0.0) break;
        double xn = x - f / df;
        if (!(xn > 0.0) || !std::isfinite(xn)) break;
        if (std::fabs(xn - x) <= 1e-15 * std::fabs(xn)) { x = xn; break; }
        x = xn;
    }
    return x;
}

double std_gauss_density(const Vector& x) {
    if (!x.allFinite()) throw std::domain_error("std_gauss_density: non-finite coordinate");
    return std_gauss_density_radial(x.norm(), static_cast<int>(x.size()));
}

double std_gauss_density_radial(double rho, int nvar) {
    return std::exp(-0.5 * rho * rho - 0.5 * nvar * std::log(2.0 * kPi));
}

double ball_volume(double rho, int nvar) {
    if (rho < 0.0) throw std::domain_error("ball_volume: negative radius");
    if (nvar < 1) throw std::domain_error("ball_volume: nvar must be >= 1");
    double n = nvar;
    return std::exp(0.5 * n * std::log(kPi) - std::lgamma(0.5 * n + 1.0) + n * std::log(rho));
}

double ball_surface(double rho, int nvar) {
    if (rho < 0.0) throw std::domain_error("ball_surface: negative radius");
    if (nvar < 1) throw std::domain_error("ball_surface: nvar must be >= 1");
    double n = nvar;
    if (rho == 0.0) return (nvar == 1) ? 2.0 : 0.0;
    return std::exp(std::log(2.0) + 0.5 * n * std::log(kPi) - std::lgamma(0.5 * n) +
                    (n - 1.0) * std::log(rho));
}

double chi_cdf(double rho, int nvar) {
    if (rho < 0.0) throw std::domain_error("chi_cdf: negative rho");
    if (rho == 0.0) return 0.0;
    return gamma_p(0.5 * nvar, 0.5 * rho * rho);
}

double chi_sf(double rho, int nvar) {
    if (rho < 0.0) throw std::domain_error("chi_sf: negative rho");
    if (rho == 0.0) return 1.0;
    return gamma_q(0.5 * nvar, 0.5 * rho * rho);
}

double chi_pdf(double rho, int nvar) {
    if (rho < 0.0) throw std::domain_error("chi_pdf: negative rho");
    if (rho == 0.0) return (nvar == 1) ? std::sqrt(2.0 / kPi) : 0.0;
    double n = nvar;
    return std::exp((1.0 - 0.5 * n) * std::log(2.0) - std::lgamma(0.5 * n) +
                    (n - 1.0) * std::log(rho) - 0.5 * rho * rho);
}

double inv_chi_cdf(double p_in, int nvar) {
    if (!(p_in > 0.0 && p_in < 1.0)) throw std::domain_error("inv_chi_cdf: p outside (0,1)");
    return std::sqrt(2.0 * inv_gamma_p(0.5 * nvar, p_in));
}

double inv_chi_sf(double p_out, int nvar) {
    if (!(p_out > 0.0 && p_out < 1.0)) throw std::domain_error("inv_chi_sf: p outside (0,1)");
    return std::sqrt(2.0 * inv_gamma_q(0.5 * nvar, p_out));
}

} // namespace tessera::gauss
