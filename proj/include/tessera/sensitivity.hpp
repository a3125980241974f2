#pragma once

#include "tessera/geometry.hpp"
#include "tessera/transforms.hpp"
#include "tessera/types.hpp"

#include <functional>
#include <vector>

namespace tessera::sens {

/// A hyperplane w.x = c strictly separating the failed vertices (below) from
/// the safe vertices (above) of every member simplex; the normal points from
/// the failure side toward the safe side.
struct SeparatingPlane {
    Vector normal;
    double offset_lo = 0.0;  // feasible c interval
    double offset_hi = 0.0;
    std::vector<int> member_cells;
};

/// Face-connected groups of mixed simplices.
std::vector<std::vector<int>> mixed_subgroups(const geom::Triangulation& tri);

/// Greedy decomposition of one mixed subgroup into maximal clusters whose
/// labeled vertices admit one strictly separating hyperplane. Growth order is
/// descending probability content (`pj` maps cell id to content).
std::vector<SeparatingPlane> plane_clusters(const geom::Triangulation& tri,
                                            const std::vector<int>& group,
                                            const std::function<double(int)>& pj);

/// Transition sensitivity factors t_v^2: per-variable shares of the
/// density-weighted flux through the failure surface, estimated from mixed
/// simplices with weights p_j * V_j^(-1/nvar). Sums to one.
Vector t_v2(const geom::Triangulation& tri, const std::function<double(int)>& pj);

/// Same estimate expressed in the physical space of a Nataf chain: cluster
/// normals are pushed through the local Jacobian at the cluster's weighted
/// centroid before squaring.
Vector t_v2_physical(const geom::Triangulation& tri, const std::function<double(int)>& pj,
                     const transforms::ProbabilitySpace& space);

namespace detail {

/// Nearest points between the convex hulls of two labeled point sets
/// (Frank-Wolfe on the squared distance). Returns false when the hulls
/// intersect within tolerance (not strictly separable).
bool max_margin_plane(const std::vector<Vector>& failed, const std::vector<Vector>& safe,
                      Vector& normal, double& lo, double& hi);

} // namespace detail

} // namespace tessera::sens
