#pragma once

#include "tessera/cubature.hpp"
#include "tessera/geometry.hpp"
#include "tessera/types.hpp"

#include <utility>
#include <vector>

namespace tessera::boundary {

/// Vector fields whose boundary flux equals a probability content.
/// ComponentRatio(v):    F_v(x_v)/f_v(x_v) along axis v only
/// FullComponentRatio:   all axes at once, result divided by nvar
/// RadialInterior:       F_chi(rho)/Sur[B_rho] times the unit radius vector
/// RadialExterior:       S_chi(rho)/Sur[B_rho] times the unit radius vector;
///                       its flux through a boundary enclosing the origin is
///                       the probability OUTSIDE the enclosed region.
enum class FieldKind { ComponentRatio, FullComponentRatio, RadialInterior, RadialExterior };

/// Analytic bounds on the probability outside a hull with inscribed radius r
/// and circumscribed radius R: (S_chi(R), S_chi(r)).
std::pair<double, double> bounds_outside(double r, double R, int nvar);

/// Probability outside the convex hull by facet-wise flux of the exterior
/// radial field. Requires the origin strictly inside (every facet plane at
/// positive distance); throws otherwise, instructing the caller to fall back
/// to the analytic bounds.
double outside_probability(const std::vector<geom::OrientedFace>& hull_faces, int nvar,
                           const cubature::CubatureRule& face_rule);

/// Probability inside a closed region given its outward-oriented boundary.
/// `component` selects the axis for ComponentRatio and is ignored otherwise.
/// The boundary is audited for closedness (constant-field flux must vanish).
double region_probability(const std::vector<geom::OrientedFace>& boundary, FieldKind kind,
                          const cubature::CubatureRule& face_rule, int component = 0);

/// Flux of one field through one face (exposed for tests and audits).
double face_flux(const geom::OrientedFace& face, FieldKind kind,
                 const cubature::CubatureRule& face_rule, int component);

/// (nvar-1)-dimensional measure of a hull face.
double face_area(const geom::OrientedFace& face);

} // namespace tessera::boundary
