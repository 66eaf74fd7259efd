#pragma once

#include <array>

#include "klein/mpoly.hpp"

namespace klein {

// Determinant of the 3x3 matrix of second partials.
MPoly hessian(const MPoly& f);

// Determinant of the 4x4 matrix whose interior is the Hessian matrix of f,
// bordered by the gradient of g (last row/column), zero corner.
MPoly bordered_hessian(const MPoly& f, const MPoly& g);

// Determinant of the Jacobian matrix of (f, g, h).
MPoly jacobian_det(const MPoly& f, const MPoly& g, const MPoly& h);

// First polar of f with respect to p: p_x f_x + p_y f_y + p_z f_z.
MPoly polar(const MPoly& f, const std::array<FieldElement, 3>& p);

// f composed with the polynomial map (exact, no normalization applied).
MPoly pullback(const std::array<MPoly, 3>& map, const MPoly& f);

// The quartic invariant with its derived covariants of degrees 6, 14, 21
// and the gradient map.  Scalars are the fixed normalizations applied to the
// raw determinants (recorded so certificates can replay the construction).
struct InvariantCatalogue {
  MPoly phi4, phi6, phi14, phi21;
  std::array<MPoly, 3> grad4;
  Rat scale6, scale14, scale21;

  std::string dump() const;          // canonical text block
  std::string content_hash() const;  // SHA-256 of dump()
};

InvariantCatalogue build_catalogue();

// 4*phi4^3 + phi6^2; vanishes exactly on the locus where the Hessian conic
// pencil degenerates (used for the 21-point orbit checks).
MPoly steinerian_combination(const InvariantCatalogue& cat);

// Classical sextic with 45-line symmetric arrangement context; housed for
// the line-arrangement index computations.
MPoly wiman_sextic();

}  // namespace klein
