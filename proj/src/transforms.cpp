#include "tessera/transforms.hpp"

#include "tessera/gauss.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tessera::transforms {

namespace {

constexpr double kEulerGamma = 0.57721566490153286;
constexpr double kTailClamp = 8.5;

// Gauss-Hermite nodes/weights for E[g(Z)], Z standard normal, via
// Golub-Welsch on the symmetric tridiagonal Jacobi matrix.
struct GaussHermite {
    std::vector<double> z;  // standard-normal nodes
    std::vector<double> w;  // weights summing to 1
};

GaussHermite gauss_hermite(int order) {
    Matrix j = Matrix::Zero(order, order);
    for (int i = 1; i < order; ++i) {
        double b = std::sqrt(0.5 * i);
        j(i, i - 1) = b;
        j(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(j);
    GaussHermite gh;
    gh.z.resize(order);
    gh.w.resize(order);
    const double sqrt2 = std::sqrt(2.0);
    for (int i = 0; i < order; ++i) {
        gh.z[i] = sqrt2 * es.eigenvalues()(i);          // physicists' -> normal
        double v0 = es.eigenvectors()(0, i);
        gh.w[i] = v0 * v0;                              // already sums to 1
    }
    return gh;
}

const GaussHermite& gh32() {
    static const GaussHermite gh = gauss_hermite(32);
    return gh;
}

} // namespace

Marginal Marginal::normal(double mu, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("normal: sigma must be positive");
    return Marginal(Family::Normal, mu, sigma);
}

Marginal Marginal::gumbel(double loc, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("gumbel: scale must be positive");
    return Marginal(Family::Gumbel, loc, scale);
}

Marginal Marginal::weibull(double scale, double shape) {
    if (!(scale > 0.0 && shape > 0.0))
        throw std::invalid_argument("weibull: scale and shape must be positive");
    return Marginal(Family::Weibull, scale, shape);
}

Marginal Marginal::uniform(double a, double b) {
    if (!(b > a)) throw std::invalid_argument("uniform: need b > a");
    return Marginal(Family::Uniform, a, b);
}

Marginal Marginal::parse(const std::string& text) {
    auto open = text.find('(');
    auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw std::invalid_argument("marginal: expected family(p1,p2): " + text);
    std::string fam = text.substr(0, open);
    std::string args = text.substr(open + 1, close - open - 1);
    for (auto& c : args)
        if (c == ',') c = ' ';
    std::istringstream is(args);
    double p1 = 0.0, p2 = 0.0;
    if (!(is >> p1 >> p2)) throw std::invalid_argument("marginal: bad parameters: " + text);
    if (fam == "normal") return normal(p1, p2);
    if (fam == "gumbel") return gumbel(p1, p2);
    if (fam == "weibull") return weibull(p1, p2);
    if (fam == "uniform") return uniform(p1, p2);
    throw std::invalid_argument("marginal: unknown family: " + fam);
}

std::string Marginal::str() const {
    std::ostringstream os;
    switch (family_) {
        case Family::Normal: os << "normal"; break;
        case Family::Gumbel: os << "gumbel"; break;
        case Family::Weibull: os << "weibull"; break;
        case Family::Uniform: os << "uniform"; break;
    }
    os << '(' << p1_ << ',' << p2_ << ')';
    return os.str();
}

double Marginal::pdf(double x) const {
    switch (family_) {
        case Family::Normal:
            return gauss::std_normal_pdf((x - p1_) / p2_) / p2_;
        case Family::Gumbel: {
            double t = (x - p1_) / p2_;
            return std::exp(-t - std::exp(-t)) / p2_;
        }
        case Family::Weibull: {
            if (x < 0.0) return 0.0;
            double t = x / p1_;
            return p2_ / p1_ * std::pow(t, p2_ - 1.0) * std::exp(-std::pow(t, p2_));
        }
        case Family::Uniform:
            return (x >= p1_ && x <= p2_) ? 1.0 / (p2_ - p1_) : 0.0;
    }
    return 0.0;
}

double Marginal::cdf(double x) const {
    switch (family_) {
        case Family::Normal:
            return gauss::std_normal_cdf((x - p1_) / p2_);
        case Family::Gumbel:
            return std::exp(-std::exp(-(x - p1_) / p2_));
        case Family::Weibull:
            return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / p1_, p2_));
        case Family::Uniform:
            return std::clamp((x - p1_) / (p2_ - p1_), 0.0, 1.0);
    }
    return 0.0;
}

double Marginal::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile: p outside (0,1)");
    switch (family_) {
        case Family::Normal:
            return p1_ + p2_ * gauss::inv_std_normal_cdf(p);
        case Family::Gumbel:
            return p1_ - p2_ * std::log(-std::log(p));
        case Family::Weibull:
            return p1_ * std::pow(-std::log1p(-p), 1.0 / p2_);
        case Family::Uniform:
            return p1_ + (p2_ - p1_) * p;
    }
    return 0.0;
}

double Marginal::mean() const {
    switch (family_) {
        case Family::Normal: return p1_;
        case Family::Gumbel: return p1_ + p2_ * kEulerGamma;
        case Family::Weibull: return p1_ * std::tgamma(1.0 + 1.0 / p2_);
        case Family::Uniform: return 0.5 * (p1_ + p2_);
    }
    return 0.0;
}

double Marginal::stddev() const {
    switch (family_) {
        case Family::Normal: return p2_;
        case Family::Gumbel: return p2_ * M_PI / std::sqrt(6.0);
        case Family::Weibull: {
            double g1 = std::tgamma(1.0 + 1.0 / p2_);
            double g2 = std::tgamma(1.0 + 2.0 / p2_);
            return p1_ * std::sqrt(g2 - g1 * g1);
        }
        case Family::Uniform: return (p2_ - p1_) / std::sqrt(12.0);
    }
    return 0.0;
}

namespace {

double map_through(const Marginal& m, double z) {
    double p = std::clamp(gauss::std_normal_cdf(z), 1e-300, 1.0 - 1e-16);
    return m.quantile(p);
}

// Pearson correlation of the mapped pair under a bivariate Gaussian copula.
double copula_pearson(const Marginal& a, const Marginal& b, double rho_z,
                      const GaussHermite& gh) {
    const double s = std::sqrt(std::max(0.0, 1.0 - rho_z * rho_z));
    const int n = static_cast<int>(gh.z.size());
    // cache the a-transform of the outer nodes
    std::vector<double> xa(n);
    for (int i = 0; i < n; ++i) xa[i] = map_through(a, gh.z[i]);
    double exy = 0.0;
    for (int i = 0; i < n; ++i) {
        double inner = 0.0;
        for (int j = 0; j < n; ++j) {
            double z2 = rho_z * gh.z[i] + s * gh.z[j];
            inner += gh.w[j] * map_through(b, z2);
        }
        exy += gh.w[i] * xa[i] * inner;
    }
    return (exy - a.mean() * b.mean()) / (a.stddev() * b.stddev());
}

} // namespace

double nataf_corr(const Marginal& a, const Marginal& b, double pearson_rho) {
    if (!(std::fabs(pearson_rho) < 1.0))
        throw std::domain_error("nataf_corr: |pearson| must be < 1");
    if (pearson_rho == 0.0) return 0.0;
    if (a.family() == Marginal::Family::Normal && b.family() == Marginal::Family::Normal)
        return pearson_rho;

    const auto& gh = gh32();
    const double lo_z = -0.999, hi_z = 0.999;
    double f_lo = copula_pearson(a, b, lo_z, gh) - pearson_rho;
    double f_hi = copula_pearson(a, b, hi_z, gh) - pearson_rho;
    if (f_lo * f_hi > 0.0)
        throw std::domain_error("nataf_corr: target correlation unattainable for this pair");

    double lo = lo_z, hi = hi_z;
    double x = std::clamp(pearson_rho, lo + 1e-6, hi - 1e-6);
    double fx = copula_pearson(a, b, x, gh) - pearson_rho;
    for (int it = 0; it < 100 && std::fabs(fx) > 1e-7; ++it) {
        if (f_lo * fx < 0.0) { hi = x; f_hi = fx; }
        else { lo = x; f_lo = fx; }
        // secant proposal inside the bracket, bisection fallback
        double xs = x - fx * (hi - lo) / (f_hi - f_lo + 1e-300);
        x = (xs > lo && xs < hi) ? xs : 0.5 * (lo + hi);
        fx = copula_pearson(a, b, x, gh) - pearson_rho;
    }
    return x;
}

ProbabilitySpace ProbabilitySpace::standard_gaussian(int nvar) {
    std::vector<Marginal> m(static_cast<std::size_t>(nvar), Marginal::normal(0.0, 1.0));
    ProbabilitySpace ps(std::move(m), Matrix::Identity(nvar, nvar));
    ps.standard_ = true;
    return ps;
}

ProbabilitySpace ProbabilitySpace::independent(std::vector<Marginal> marginals) {
    int n = static_cast<int>(marginals.size());
    return ProbabilitySpace(std::move(marginals), Matrix::Identity(n, n));
}

ProbabilitySpace::ProbabilitySpace(std::vector<Marginal> marginals, Matrix pearson_corr)
    : marginals_(std::move(marginals)), pearson_(std::move(pearson_corr)) {
    const int n = nvar();
    if (pearson_.rows() != n || pearson_.cols() != n)
        throw std::invalid_argument("space: correlation matrix dimension mismatch");
    gauss_corr_ = Matrix::Identity(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double rho = pearson_(i, j);
            if (std::fabs(rho - pearson_(j, i)) > 1e-12)
                throw std::invalid_argument("space: correlation matrix not symmetric");
            double rz = rho == 0.0 ? 0.0 : nataf_corr(marginals_[i], marginals_[j], rho);
            gauss_corr_(i, j) = rz;
            gauss_corr_(j, i) = rz;
        }
    }
    Eigen::LLT<Matrix> llt(gauss_corr_);
    if (llt.info() != Eigen::Success)
        throw std::domain_error("space: underlying Gaussian correlation not positive definite");
    chol_ = llt.matrixL();

    identity_map_ = gauss_corr_.isIdentity(1e-14);
    if (identity_map_) {
        for (const auto& m : marginals_)
            if (m.family() != Marginal::Family::Normal) { identity_map_ = false; break; }
    }
    standard_ = identity_map_;
    if (standard_) {
        for (const auto& m : marginals_)
            if (m.param1() != 0.0 || m.param2() != 1.0) { standard_ = false; break; }
    }
}

Vector ProbabilitySpace::to_G(const Vector& x) const {
    const int n = nvar();
    if (x.size() != n) throw std::invalid_argument("to_G: dimension mismatch");
    if (identity_map_) {
        Vector u(n);
        for (int v = 0; v < n; ++v) u(v) = (x(v) - marginals_[v].param1()) / marginals_[v].param2();
        return u;
    }
    Vector z(n);
    for (int v = 0; v < n; ++v) {
        double p = marginals_[v].cdf(x(v));
        p = std::clamp(p, 1e-300, 1.0 - 1e-16);
        double zv = gauss::inv_std_normal_cdf(p);
        if (std::fabs(zv) > kTailClamp) {
            zv = std::clamp(zv, -kTailClamp, kTailClamp);
            tail_clamped_ = true;
        }
        z(v) = zv;
    }
    // u = L^-1 z by forward substitution
    Vector u(n);
    for (int i = 0; i < n; ++i) {
        double acc = z(i);
        for (int j = 0; j < i; ++j) acc -= chol_(i, j) * u(j);
        u(i) = acc / chol_(i, i);
    }
    return u;
}

Vector ProbabilitySpace::from_G(const Vector& u) const {
    const int n = nvar();
    if (u.size() != n) throw std::invalid_argument("from_G: dimension mismatch");
    if (identity_map_) {
        Vector x(n);
        for (int v = 0; v < n; ++v) x(v) = marginals_[v].param1() + marginals_[v].param2() * u(v);
        return x;
    }
    Vector z = chol_ * u;
    Vector x(n);
    for (int v = 0; v < n; ++v) {
        double zv = z(v);
        if (std::fabs(zv) > kTailClamp) {
            zv = std::clamp(zv, -kTailClamp, kTailClamp);
            tail_clamped_ = true;
        }
        double p = gauss::std_normal_cdf(zv);
        p = std::clamp(p, 1e-300, 1.0 - 1e-16);
        x(v) = marginals_[v].quantile(p);
    }
    return x;
}

Vector ProbabilitySpace::marginal_map_derivative(const Vector& z) const {
    const int n = nvar();
    Vector d(n);
    for (int v = 0; v < n; ++v) {
        if (identity_map_) {
            d(v) = marginals_[v].param2();
            continue;
        }
        double zv = std::clamp(z(v), -kTailClamp, kTailClamp);
        double p = std::clamp(gauss::std_normal_cdf(zv), 1e-300, 1.0 - 1e-16);
        double x = marginals_[v].quantile(p);
        double fx = marginals_[v].pdf(x);
        d(v) = fx > 0.0 ? gauss::std_normal_pdf(zv) / fx : 0.0;
    }
    return d;
}

} // namespace tessera::transforms
