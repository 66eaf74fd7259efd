#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "klein/tower.hpp"

namespace klein {

// Monomial in the fixed variables x, y, z.
struct Monomial {
  std::array<uint16_t, 3> e{0, 0, 0};

  unsigned deg() const { return unsigned(e[0]) + e[1] + e[2]; }
  uint64_t key() const {
    return (uint64_t(e[0]) << 32) | (uint64_t(e[1]) << 16) | e[2];
  }
  bool operator==(const Monomial& o) const { return e == o.e; }
  bool divides(const Monomial& o) const {
    return e[0] <= o.e[0] && e[1] <= o.e[1] && e[2] <= o.e[2];
  }
  Monomial operator*(const Monomial& o) const {
    return Monomial{{uint16_t(e[0] + o.e[0]), uint16_t(e[1] + o.e[1]),
                     uint16_t(e[2] + o.e[2])}};
  }
  Monomial operator/(const Monomial& o) const {
    return Monomial{{uint16_t(e[0] - o.e[0]), uint16_t(e[1] - o.e[1]),
                     uint16_t(e[2] - o.e[2])}};
  }
  std::string str() const;
};

// Graded reverse lexicographic order with x > y > z.
// Returns -1, 0, 1 as a <, =, > b.
int grevlex_cmp(const Monomial& a, const Monomial& b);

// Sparse polynomial in x, y, z over a field tower.  Terms are kept sorted in
// strictly descending grevlex order with no zero coefficients, which makes
// the representation canonical for a given tower.
class MPoly {
 public:
  using Term = std::pair<Monomial, FieldElement>;

  MPoly();  // zero over Q
  static MPoly zero(const TowerPtr& t);
  static MPoly constant(const TowerPtr& t, const Rat& q);
  static MPoly scalar(const FieldElement& c);
  static MPoly variable(const TowerPtr& t, int var, unsigned exp = 1);
  // Sorts, merges duplicates, drops zeros.
  static MPoly from_terms(const TowerPtr& t, std::vector<Term> terms);

  const TowerPtr& tower() const { return tower_; }
  const std::vector<Term>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  size_t term_count() const { return t_.size(); }
  int degree() const;  // total degree; -1 for the zero polynomial
  bool is_homogeneous() const;
  const Term& leading() const;  // grevlex-largest term; throws on zero
  FieldElement coefficient(const Monomial& m) const;

  MPoly operator-() const;
  MPoly operator+(const MPoly& o) const;
  MPoly operator-(const MPoly& o) const;
  MPoly operator*(const MPoly& o) const;
  MPoly operator*(const FieldElement& s) const;
  MPoly operator*(const Rat& s) const;
  MPoly& operator+=(const MPoly& o);
  MPoly& operator-=(const MPoly& o);
  MPoly pow(unsigned n) const;
  bool operator==(const MPoly& o) const;
  bool operator!=(const MPoly& o) const { return !(*this == o); }

  MPoly partial(int var) const;
  MPoly higher_partial(const std::array<unsigned, 3>& order) const;

  // Evaluation at a projective coordinate triple; coefficients are embedded
  // into the coordinates' tower (which must extend this poly's tower, or be
  // extendable from Q).
  FieldElement evaluate(const std::array<FieldElement, 3>& p) const;

  // f(U, V, W) by nested Horner; images must be polynomials over the same
  // tower (or coercible).  Exact; no scalar is introduced.
  MPoly substitute(const std::array<MPoly, 3>& img) const;

  MPoly embedded(const TowerPtr& bigger) const;

  // Canonical text; parse_poly(tower, str()) round-trips exactly.
  std::string str() const;
  // SHA-256 of descriptor + canonical text.
  std::string content_hash() const;

 private:
  TowerPtr tower_;
  std::vector<Term> t_;  // descending grevlex
};

struct DivisionOutcome {
  bool divisible = false;
  MPoly quotient;
  // When not divisible: the grevlex-leading surviving term that the divisor's
  // leading term cannot cancel.
  Monomial blocked_monomial;
  FieldElement blocked_coeff;
};
// Exact division f = q*g along leading terms.  For f in the ideal (g) this
// always succeeds; otherwise it reports the first blocking term.
DivisionOutcome divide_exact(const MPoly& f, const MPoly& g);

// If a == lambda*b for a scalar lambda (b nonzero), returns lambda.
// Returns 1 when both are zero, nullopt when exactly one is zero or the
// supports differ.
std::optional<FieldElement> proportional(const MPoly& a, const MPoly& b);

// Recorded parametrization of a projective line V(L): the two deterministic
// basis points used, so certificates can replay the restriction.
struct LineParam {
  std::array<FieldElement, 3> p0, p1;  // [s:u] -> s*p0 + u*p1
};

// Binary form q(s,u): c[i] multiplies s^i * u^(deg-i).
struct BinaryForm {
  TowerPtr tower;
  int deg = 0;
  std::vector<FieldElement> c;
  LineParam param;

  FieldElement eval(const FieldElement& s, const FieldElement& u) const;
  UniPoly dehomogenized() const;  // in s at u = 1
  bool is_zero() const;
  // No repeated projective root: u-multiplicity <= 1 and the dehomogenized
  // polynomial is squarefree (gcd with derivative constant).
  bool squarefree() const;
  std::string str() const;
};

// Restriction of f to the line V(line) using the canonical parametrization:
// pivot = first variable with nonzero coefficient, basis points
// a_k*e_m - a_m*e_k for the two remaining variables m in ascending order.
BinaryForm restrict_to_line(const MPoly& f, const MPoly& line);

// Discriminant b^2 - 4ac of a degree-2 binary form.
FieldElement binary_discriminant(const BinaryForm& q);

// Parses polynomial text over x, y, z and the tower's generators; accepts
// + - * / ^ ( ) with rational literals.  Division only by nonzero scalars.
MPoly parse_poly(const TowerPtr& t, const std::string& text);

}  // namespace klein
