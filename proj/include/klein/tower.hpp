#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "klein/rational.hpp"

namespace klein {

class FieldTower;
using TowerPtr = std::shared_ptr<const FieldTower>;

// Element of a number-field tower, stored as a flat dense coefficient vector
// over Q with respect to the product basis of the tower's levels.  For a
// tower Q(g1)(g2) with level degrees d1, d2 the flat layout is
//   index = i + d1*j  <->  g1^i * g2^j,   0 <= i < d1, 0 <= j < d2.
// Elements of different towers never mix implicitly; the only coercion is
// plain rationals into any tower.
class FieldElement {
 public:
  FieldElement();  // zero over Q

  const TowerPtr& tower() const { return tower_; }
  const std::vector<Rat>& flat() const { return c_; }

  bool is_zero() const;
  // True when every coordinate outside the rational one vanishes.
  bool is_rational() const;
  Rat rational_value() const;  // requires is_rational()

  FieldElement operator-() const;
  FieldElement operator+(const FieldElement& o) const;
  FieldElement operator-(const FieldElement& o) const;
  FieldElement operator*(const FieldElement& o) const;
  FieldElement& operator+=(const FieldElement& o);
  FieldElement& operator-=(const FieldElement& o);
  FieldElement& operator*=(const FieldElement& o);
  FieldElement operator*(const Rat& s) const;
  FieldElement operator/(const FieldElement& o) const;

  FieldElement inverse() const;  // throws on zero
  FieldElement pow(long e) const;

  bool operator==(const FieldElement& o) const;
  bool operator!=(const FieldElement& o) const { return !(*this == o); }

  // Canonical text form, parseable back by parse_element (round-trips
  // exactly).  Examples: "z7^2+1", "(2*z7+1)*t-3/7".
  std::string str() const;

  // Total order usable as a map key (lexicographic on flat coords); not a
  // field-meaningful order.
  static int cmp_key(const FieldElement& a, const FieldElement& b);

 private:
  friend class FieldTower;
  TowerPtr tower_;
  std::vector<Rat> c_;
};

class FieldTower : public std::enable_shared_from_this<FieldTower> {
 public:
  struct Level {
    std::string gen;  // generator name as used in element syntax
    // Monic modulus: low coefficients only, each a flat element of the
    // prefix tower; modulus = gen^deg + sum_i coeff[i]*gen^i.
    std::vector<std::vector<Rat>> coeff;
    int deg = 0;
    int dim_below = 1;  // flat dimension of the prefix tower
  };

  // The shared rationals tower (zero levels).
  static TowerPtr rationals();

  // Extends `base` by a monic modulus given via its low coefficients
  // (elements of `base`).  Verifies irreducibility for the shapes in scope:
  // degree 2 over Q or Q(zeta7) via an exact squareness decision on the
  // discriminant, and the fixed cyclotomic modulus 1+t+...+t^6 over Q.
  // Reducible input is rejected with a named root.
  static TowerPtr extend(const TowerPtr& base, const std::string& gen,
                         const std::vector<FieldElement>& low_coeffs);

  const std::vector<Level>& levels() const { return levels_; }
  int depth() const { return static_cast<int>(levels_.size()); }
  int dim() const { return dim_; }
  const TowerPtr& prefix() const { return prefix_; }

  bool same(const TowerPtr& o) const;          // structural equality
  bool extends(const TowerPtr& o) const;       // o is a prefix of this
  std::string descriptor() const;              // human/JSON tower description

  FieldElement zero() const;
  FieldElement one() const;
  FieldElement constant(const Rat& q) const;
  FieldElement from_flat(std::vector<Rat> flat) const;
  // Generator of level `lvl` (0-based) as an element of this full tower.
  FieldElement generator(int lvl) const;
  // Generator element by name; throws if absent.
  FieldElement generator(const std::string& name) const;
  bool has_generator(const std::string& name) const;

  // Lifts an element of Q or of a prefix of this tower into this tower.
  FieldElement embed(const FieldElement& x) const;
  // Inverse of embed: expresses x (element of this tower) in the prefix
  // tower if its top-level coordinates above degree 0 vanish.
  std::optional<FieldElement> descend(const FieldElement& x) const;

  // --- internal arithmetic helpers (flat blocks) ---
  void mul_level(int lvl, const Rat* a, const Rat* b, Rat* out) const;

 private:
  FieldTower() = default;
  TowerPtr prefix_;  // null for rationals
  std::vector<Level> levels_;
  int dim_ = 1;

  friend class FieldElement;
};

// Parses the element syntax over the given tower: integers, rationals,
// generator names, + - * / ^ and parentheses.  "1/7*(2*z7^4+2*z7^2+2*z7+1)"
// is accepted.  Division requires an invertible (nonzero) divisor.
FieldElement parse_element(const TowerPtr& tower, const std::string& text);

// Dense univariate polynomial with coefficients in a tower; used for
// modulus arithmetic, inversion, gcd/squarefree checks and line
// restrictions.  Invariant: no trailing zero coefficient (zero poly has
// empty coefficient list).
struct UniPoly {
  TowerPtr base;
  std::vector<FieldElement> c;  // c[i] multiplies X^i

  int deg() const { return static_cast<int>(c.size()) - 1; }
  bool is_zero() const { return c.empty(); }
  void normalize();

  static UniPoly zero(const TowerPtr& t) { return UniPoly{t, {}}; }
  static UniPoly from_coeffs(const TowerPtr& t, std::vector<FieldElement> cs);

  FieldElement eval(const FieldElement& x) const;
  std::string str(const std::string& var) const;
};

UniPoly uni_add(const UniPoly& a, const UniPoly& b);
UniPoly uni_sub(const UniPoly& a, const UniPoly& b);
UniPoly uni_mul(const UniPoly& a, const UniPoly& b);
UniPoly uni_scale(const UniPoly& a, const FieldElement& s);
// Euclidean division by a poly with invertible leading coefficient.
void uni_divmod(const UniPoly& a, const UniPoly& b, UniPoly* q, UniPoly* r);
UniPoly uni_derivative(const UniPoly& a);
// Monic gcd.
UniPoly uni_gcd(UniPoly a, UniPoly b);
// g = gcd(a,b) monic together with u,v such that u*a + v*b = g.
void uni_ext_gcd(const UniPoly& a, const UniPoly& b, UniPoly* g, UniPoly* u,
                 UniPoly* v);

// Exact squareness decision in the towers in scope (Q and Q(zeta7)).
// `is_square==true` comes with a verified root (root*root == c re-checked
// exactly).  `is_square==false` over Q(zeta7) is certified by a split prime
// p = 1 (mod 7) and an embedding index at which c reduces to a quadratic
// non-residue; those witness fields are recorded for certificates.
struct SquareDecision {
  bool is_square = false;
  FieldElement root;            // valid when is_square
  unsigned long witness_prime = 0;  // valid when !is_square (0 over Q)
  int witness_embedding = -1;       // power j with zeta7 -> r^j
};
SquareDecision decide_square(const FieldElement& c);

// Canonicalizes quadratic extensions of one base field by discriminant
// square-class.  The first non-square discriminant c0 in a class creates the
// tower base[gen]/(gen^2 - c0); later calls with c = s^2*c0 reuse it and
// report sqrt(c) = s*gen.  Square discriminants never create a tower.
class TowerRegistry {
 public:
  explicit TowerRegistry(TowerPtr base, std::string gen_prefix = "t");

  struct SqrtHandle {
    TowerPtr tower;     // == base iff the input was a square in the base
    FieldElement root;  // lives in `tower`, root*root == input (embedded)
  };
  SqrtHandle sqrt(const FieldElement& c);

  const TowerPtr& base() const { return base_; }
  // All extension towers created so far, in creation order.
  const std::vector<TowerPtr>& extensions() const { return towers_; }

 private:
  TowerPtr base_;
  std::string gen_prefix_;
  std::vector<FieldElement> class_disc_;  // representative per class
  std::vector<TowerPtr> towers_;
};

}  // namespace klein
