#pragma once

#include "tessera/types.hpp"

namespace tessera::gauss {

// Univariate standard normal.
double std_normal_pdf(double x);
double std_normal_cdf(double x);
double std_normal_sf(double x);       // 1 - cdf, stable in the upper tail
double inv_std_normal_cdf(double p);  // quantile, accurate for p down to ~1e-300

// Regularized incomplete gamma functions P(s,x), Q(s,x) = 1 - P(s,x) and
// their inverses in x. Series expansion below x = s+1, continued fraction
// above; inverses by bracketed Newton with bisection fallback.
double gamma_p(double s, double x);
double gamma_q(double s, double x);
double inv_gamma_p(double s, double p);
double inv_gamma_q(double s, double q);

/// Joint standard Gaussian density at a point of any dimension.
double std_gauss_density(const Vector& x);

/// Radial form of the joint density: (2*pi)^(-n/2) * exp(-rho^2/2).
double std_gauss_density_radial(double rho, int nvar);

// Volume and surface of the n-ball of radius rho.
double ball_volume(double rho, int nvar);
double ball_surface(double rho, int nvar);

// chi distribution with nvar degrees of freedom: the distribution of the
// Euclidean norm of an nvar-dimensional standard normal vector.
double chi_cdf(double rho, int nvar);
double chi_sf(double rho, int nvar);
double chi_pdf(double rho, int nvar);
double inv_chi_cdf(double p_in, int nvar);
double inv_chi_sf(double p_out, int nvar);

} // namespace tessera::gauss
