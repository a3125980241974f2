#pragma once

#include "tessera/geometry.hpp"
#include "tessera/types.hpp"

#include <functional>
#include <map>

namespace tessera::cubature {

using Density = std::function<double(const Vector&)>;

/// Deterministic cubature rule on the unit simplex. Nodes are stored in
/// barycentric coordinates (dim+1 rows, one column per node); the weights
/// sum to one, so integrating a density means volume times the node average.
struct CubatureRule {
    int dim = 0;
    int degree = 0;  // 2s+1
    Matrix nodes;    // (dim+1) x n_l
    std::vector<double> weights;
};

/// Grundmann-Moeller rule of index s (degree 2s+1) on the dim-simplex.
/// Higher-index rules contain negative weights.
CubatureRule grundmann_moeller(int dim, int s);

/// Default rule index: degree 5 in low dimensions, degree 3 from 5 variables
/// up to keep node counts and negative-weight cancellation in check.
int default_gm_index(int nvar);

struct IntegrationResult {
    double value = 0.0;
    bool negative_fallback = false;  // rule went negative; positive-weight retry used
};

/// Probability content of one simplex: p_j = V_j * sum_l f(x_l) w_l.
/// A negative cubature is flagged and re-integrated with centroid rules on a
/// one-level centroid subdivision, which cannot go negative.
IntegrationResult integrate_simplex(const Matrix& vertices, const CubatureRule& rule,
                                    const Density& f);

struct RefinedResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

/// Optional refinement: uniform centroid subdivision of the simplex with the
/// difference of two levels as the error estimate.
RefinedResult integrate_simplex_refined(const Matrix& vertices, const CubatureRule& rule,
                                        const Density& f, int levels = 1);

/// Error-controlled variant: longest-edge bisection until the two-level
/// difference drops below abs_tol + rel_tol*|value|. Deterministic; large
/// cells recurse, small ones accept after one split.
IntegrationResult integrate_simplex_adaptive(const Matrix& vertices, const CubatureRule& rule,
                                             const Density& f, double rel_tol = 1e-6,
                                             double abs_tol = 1e-12);

/// Failure share of a mixed simplex: the linear vertex-density estimate
/// p_jf = V_j * sum_k I_F(x_k) f(x_k) / (nvar+1).
double failure_share(const Matrix& vertices, const std::vector<bool>& failed,
                     const Density& f);

/// Failure probability from the vertex rule: full contents of failure
/// simplices plus the failure shares of mixed simplices. `pj` maps cell ids
/// to cached probability contents (only failure/mixed cells are consulted).
double pf_vertex_estimate(const geom::Triangulation& tri,
                          const std::function<double(int)>& pj, const Density& f);

/// Splits a simplex at its centroid into nvar+1 children (columns layout
/// identical to the input). Used by the fallback and refinement paths.
std::vector<Matrix> centroid_subdivide(const Matrix& vertices);

} // namespace tessera::cubature
