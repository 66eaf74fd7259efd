#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "klein/covariant.hpp"
#include "klein/mpoly.hpp"

namespace klein {

// Projective point with canonical representative: coordinates scaled so the
// first nonzero one equals 1.
struct ProjPoint {
  std::array<FieldElement, 3> x;

  static ProjPoint of(std::array<FieldElement, 3> coords);
  const TowerPtr& tower() const { return x[0].tower(); }
  bool same_as(const ProjPoint& o) const;  // same-tower exact equality
  std::string str() const;
  std::string key() const;  // canonical dedup key within one tower
};

// Rewrites the point over the shortest prefix tower containing all
// coordinates (normalization is preserved).
ProjPoint minimal_form(const ProjPoint& p);

// Equality across towers.  Supports: equal towers, prefix-related towers,
// and two quadratic extensions of one common base (unified by deciding
// squareness of the discriminant ratio).  For conjugation-closed point
// families (every family used here is closed under the quadratic
// conjugation) set membership computed with this predicate is independent
// of the choice of square root made by the unification.
bool points_equal(const ProjPoint& a, const ProjPoint& b);

// Image of `from`'s top-level generator inside `into`, when both towers are
// quadratic extensions of the same base and the discriminants fall in one
// square class; nullopt when the classes differ (the fields are distinct).
std::optional<FieldElement> quadratic_unifier(const TowerPtr& into,
                                              const TowerPtr& from);

// Rewrites a point of `from` over `into` using a generator image produced
// by quadratic_unifier.
ProjPoint transport_quadratic(const ProjPoint& p, const TowerPtr& into,
                              const FieldElement& gen_image);

struct ProjMatrix {
  std::array<FieldElement, 9> m;  // row-major

  const TowerPtr& tower() const { return m[0].tower(); }
  static ProjMatrix identity(const TowerPtr& t);
  static ProjMatrix from_rows(const std::array<std::array<FieldElement, 3>, 3>& rows);
  const FieldElement& at(int r, int c) const { return m[3 * r + c]; }
  FieldElement& at(int r, int c) { return m[3 * r + c]; }

  ProjMatrix mul(const ProjMatrix& o) const;
  ProjMatrix transpose() const;
  FieldElement det() const;
  ProjMatrix inverse() const;  // adjugate over determinant
  ProjMatrix embedded(const TowerPtr& bigger) const;
  std::array<FieldElement, 3> apply_coords(
      const std::array<FieldElement, 3>& v) const;
  ProjPoint apply(const ProjPoint& p) const;
  bool equal(const ProjMatrix& o) const;
  std::string key() const;
};

// The 168-element matrix group generated by the order-7 diagonal, the
// coordinate 3-cycle and the symmetric involution, closed by breadth-first
// multiplication with exact dedup.  Elements are stored sorted by canonical
// key, so the dump and hash do not depend on traversal order.
struct GroupTable {
  TowerPtr tower;  // cyclotomic tower of the entries
  std::vector<ProjMatrix> elems;
  std::array<ProjMatrix, 3> generators;
  bool exact_closure = true;  // false if projective fallback had to kick in

  int order() const { return static_cast<int>(elems.size()); }
  int index_of(const ProjMatrix& m) const;  // -1 if absent
  std::string dump() const;
  std::string content_hash() const;
};

GroupTable build_group();

// Involution decomposed as a harmonic homology: fixed center (eigenvalue
// +1 column space of I+alpha) and fixed axis (row space of I+alpha).
struct Homology {
  int group_index = -1;
  ProjMatrix alpha;
  ProjPoint center;
  MPoly axis;  // linear form, leading coefficient normalized to 1
};

// All 21 involutions of the group with verified rank conditions
// rank(I+alpha)=1, rank(I-alpha)=2, trace -1.
std::vector<Homology> involutions(const GroupTable& g);

// Orbit of a point under the whole group (exact dedup in the common tower).
std::vector<ProjPoint> orbit(const GroupTable& g, const ProjPoint& seed);

struct InvarianceOutcome {
  bool invariant = false;
  FieldElement factor;  // f(M x) = factor * f(x) when invariant
};
InvarianceOutcome check_invariance(const MPoly& f, const ProjMatrix& M);

enum class OrbitLabel {
  O21,
  O24,
  O28,
  O42,
  O56,
  OnCurve84,
  Generic168,
  Unclassified
};
std::string orbit_label_name(OrbitLabel l);

struct Classification {
  OrbitLabel label = OrbitLabel::Unclassified;
  std::string reason;  // filled for Unclassified
  std::array<bool, 4> vanishing{};  // of the degree 4, 6, 14, 21 forms
};

// Decision by vanishing signature of the four catalogue forms, refined by
// orbit size where the signature alone is ambiguous.
Classification classify_point(const ProjPoint& p, const InvariantCatalogue& cat,
                              const GroupTable& g);

// Evaluation with coercion in either direction between the polynomial's
// tower and the point's tower.
FieldElement value_at(const MPoly& f, const ProjPoint& p);

// Point collection with exact cross-tower duplicate detection.  Points are
// stored in minimal form, grouped by tower; lookups unify quadratic
// extensions of one base through the registry-independent discriminant test.
// The stored families must be conjugation-closed per tower for set-level
// answers to be independent of the square-root choice made by the unifier.
class PointIndex {
 public:
  // false when the point was already present
  bool insert(const ProjPoint& p, const std::string& label);
  bool contains(const ProjPoint& p) const;
  long size() const { return total_; }

 private:
  struct Group {
    TowerPtr tower;
    std::map<std::string, std::string> keys;
  };
  std::vector<Group> groups_;
  mutable std::map<std::pair<std::string, std::string>,
                   std::optional<FieldElement>>
      unifiers_;
  long total_ = 0;

  Group* group_for(const TowerPtr& t);
  static bool quadratic_over_same_base(const TowerPtr& a, const TowerPtr& b);
  const std::string* find(const ProjPoint& q) const;
};

}  // namespace klein
