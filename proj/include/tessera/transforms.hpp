#pragma once

#include "tessera/types.hpp"

#include <string>
#include <vector>

namespace tessera::transforms {

/// Univariate marginal distribution of an input variable.
class Marginal {
public:
    enum class Family { Normal, Gumbel, Weibull, Uniform };

    static Marginal normal(double mu, double sigma);
    /// Gumbel "max": cdf = exp(-exp(-(x-loc)/scale)).
    static Marginal gumbel(double loc, double scale);
    /// Weibull "min" on x >= 0: cdf = 1 - exp(-(x/scale)^shape).
    static Marginal weibull(double scale, double shape);
    static Marginal uniform(double a, double b);
    static Marginal parse(const std::string& text);  // e.g. "gumbel(0,1)"

    Family family() const { return family_; }
    double param1() const { return p1_; }
    double param2() const { return p2_; }

    double pdf(double x) const;
    double cdf(double x) const;
    double quantile(double p) const;
    double mean() const;
    double stddev() const;
    std::string str() const;

private:
    Marginal(Family f, double p1, double p2) : family_(f), p1_(p1), p2_(p2) {}
    Family family_;
    double p1_, p2_;
};

/// Correlation of the underlying Gaussian pair that reproduces a target
/// Pearson correlation between two mapped marginals. Solved by bracketed
/// root finding over a two-dimensional Gauss-Hermite product-moment integral.
/// Throws when the target lies outside the attainable range of the pair.
double nataf_corr(const Marginal& a, const Marginal& b, double pearson_rho);

/// Nataf chain R <-> P <-> G_c <-> G: marginal iso-probabilistic maps plus
/// Cholesky decorrelation of the underlying Gaussian vector.
class ProbabilitySpace {
public:
    static ProbabilitySpace standard_gaussian(int nvar);
    static ProbabilitySpace independent(std::vector<Marginal> marginals);
    ProbabilitySpace(std::vector<Marginal> marginals, Matrix pearson_corr);

    int nvar() const { return static_cast<int>(marginals_.size()); }
    bool is_standard_gaussian() const { return standard_; }
    const std::vector<Marginal>& marginals() const { return marginals_; }
    const Matrix& pearson_corr() const { return pearson_; }
    const Matrix& gauss_corr() const { return gauss_corr_; }
    const Matrix& chol_lower() const { return chol_; }

    Vector to_G(const Vector& x_physical) const;
    Vector from_G(const Vector& u) const;

    /// d x_v / d z_v at the correlated-Gaussian coordinate z (diagonal of the
    /// marginal map Jacobian); used to transform surface normals.
    Vector marginal_map_derivative(const Vector& z) const;

    /// True if any to_G/from_G call clamped a tail coordinate beyond |8.5|.
    bool tail_clamped() const { return tail_clamped_; }

private:
    std::vector<Marginal> marginals_;
    Matrix pearson_;
    Matrix gauss_corr_;
    Matrix chol_;
    bool standard_ = false;
    bool identity_map_ = false;  // independent Normal marginals
    mutable bool tail_clamped_ = false;
};

} // namespace tessera::transforms
