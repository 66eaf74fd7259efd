#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "klein/covariant.hpp"
#include "klein/symmetry.hpp"

namespace klein {

// One of the 21 reducible first polars of the quartic: the polar with
// respect to an involution center splits exactly as axis * conic.  The two
// nodes are the transverse intersections of the pair, living in a quadratic
// extension registered on demand.
struct ReduciblePolar {
  int involution_index = -1;
  ProjPoint center;
  MPoly axis;   // monic linear form over the group tower
  MPoly conic;  // exact quotient polar / axis
  FieldElement conic_det;          // 4*det of the symmetric matrix, nonzero
  BinaryForm restriction;          // conic restricted to the axis
  FieldElement restriction_disc;   // nonzero: transverse intersection
  std::array<ProjPoint, 2> nodes;
};

// Builds the polars from the involution data; throws if any division,
// smoothness or transversality requirement fails.
std::vector<ReduciblePolar> build_reducible_polars(
    const InvariantCatalogue& cat, const GroupTable& g,
    const std::vector<Homology>& homs, TowerRegistry& reg);

// Least total order with a nonvanishing partial derivative at p
// (0 = the point is not on the curve).
int multiplicity(const MPoly& f, const ProjPoint& p);

// Projective roots of a degree-2 binary form on its recorded line,
// splitting the discriminant in the registry when necessary.
std::array<ProjPoint, 2> binary_roots(const BinaryForm& q, TowerRegistry& reg);

// Tangent-direction certificate: a singular point of an arrangement of
// smooth components is ordinary iff the component gradients at the point are
// pairwise non-proportional.
struct TangentCertificate {
  bool ordinary = false;
  std::string detail;  // offending pair when not ordinary
};
TangentCertificate is_ordinary(const std::vector<const MPoly*>& components,
                               const ProjPoint& p);

// r -> number of points where exactly r components meet.  Optional
// infinitely-near contributions (label, multiplicity) add to the multiplicity
// sum of the index computation but not to the singular-point count.
struct Census {
  std::map<int, long> t;
  std::vector<std::pair<std::string, int>> infinitely_near;

  long singular_count() const;
  long pair_sum() const;  // sum of C(r,2) * t_r
};

// Combinatorial count of pairwise intersections for l lines and k conics:
// C(l,2) + 2kl + 4C(k,2) must equal the census pair sum.
bool census_identity_holds(const Census& c, int lines, int conics);

// (d^2 - sum mult^2) / #singular points, exact.
Rat harbourne_index(int degree, const Census& c);
// Alternate form for conic-line arrangements: (4k + l - sum r*t_r) / #sing.
Rat harbourne_index_conic_line(int lines, int conics, const Census& c);

struct ChernPair {
  Rat c1sq, c2, slope;
};
// Logarithmic Chern numbers of the blown-up pair for k smooth degree-d
// curves with ordinary singularities (requires k >= 3, no point on all
// curves, i.e. t_k absent).
ChernPair chern_slopes(int k, int d, const Census& c);

struct FreenessReport {
  long tau = 0;  // total Tjurina = Milnor number for ordinary singularities
  bool is_free = false;
  bool is_nearly_free = false;
  long disc_free = 0;    // discriminant of r^2-(d-1)r+((d-1)^2-tau)
  long disc_nearly = 0;  // same with tau+1
  long defect = 0;       // ceil(3/4 (d-1)^2) - tau
};
// Integer search r in [0, d-1] against tau = (d-1)^2 - r(d-1-r) and the
// nearly-free variant; defect from the ceiling formula.
FreenessReport tjurina_and_freeness(int total_degree, const Census& c);

struct InequalityReport {
  bool hypothesis = false;  // t_r = 0 for r > 2(l+2k)/3
  Rat lhs, rhs;
  bool holds = false;
};
// t2 + (3/4)t3 + (4k+2l-4)k >= l + sum_{r>=5} (r^2/4 - r) t_r.
InequalityReport conic_inequality_check(const Census& c, int l, int k);

enum class PointClass {
  Node42,     // polar nodes: 1 line + 1 conic
  Triple28,   // 3 lines
  Triple56,   // 3 conics (bitangency points)
  Triple84,   // 1 line + 2 conics, two orbits
  Quad21,     // 4 lines (involution centers)
  Quad84      // 1 line + 3 conics, two orbits
};
std::string point_class_name(PointClass c);

struct CensusPoint {
  ProjPoint p;
  PointClass cls;
  int lines_through = 0;
  int conics_through = 0;
  bool ordinary = false;
};

// Proof-mirroring record for the pencil of polars through one singular
// point of the line arrangement: the lines through the representative, the
// conic component of each line's gradient-map pullback, the partner pairing
// (the pullback of line i splits off line partner[i]), and the two new base
// points per line cut out by the non-partnered conics.
struct PencilData {
  ProjPoint rep;
  std::vector<int> axis_index;       // indices into the involution list
  std::vector<MPoly> lines;          // monic axes through rep
  std::vector<MPoly> conics;         // conic of pullback(grad, lines[i])
  std::vector<int> partner;          // line component index of that pullback
  bool transcription_match = false;  // displayed forms match the computed ones
  std::vector<ProjPoint> new_points; // 2 per line, in registry towers
};

// The full arrangement model: 21 + 21 components, the 483 singular points
// with verified incidences, and the three censuses.
struct ArrangementModel {
  InvariantCatalogue cat;
  GroupTable group;
  std::vector<Homology> homs;
  std::shared_ptr<TowerRegistry> registry;
  std::vector<ReduciblePolar> polars;

  MPoly phi63;  // exact pullback of the degree-21 invariant, over Q
  MPoly phi42;  // exact quotient phi63 / phi21, over Q
  FieldElement conic_product_scale;  // product of the 21 conics = scale*phi42
  FieldElement axis_product_scale;   // product of the 21 axes = scale*phi21

  PencilData pencil28;  // at [1:1:1]
  PencilData pencil21;  // at the quadruple-point representative

  std::vector<CensusPoint> points;  // all 483, pairwise distinct
  Census census_K, census_K1, census_K2;

  const MPoly& phi21() const { return cat.phi21; }
};

// Runs the whole construction; every intermediate requirement is checked
// and a violation throws with a description.
ArrangementModel build_arrangement();

// Per-line incidence table: for each of the 21 axes the number of
// quadruple-orbit and triple-orbit line-arrangement points on it.
struct IncidenceCounts {
  std::vector<int> quad_points_per_line;    // expect 4 each
  std::vector<int> triple_points_per_line;  // expect 4 each
};
IncidenceCounts incidence_counts(const ArrangementModel& m);

// Iterated pullback under the gradient map.
struct IterationReport {
  MPoly phi126;  // pullback of phi42
  MPoly phi189;  // pullback of phi63; equals phi126 * phi42 * phi21 exactly
  bool division_chain_ok = false;
  bool nodes_map_into_nodes = false;   // gradient image of each node is a node
  bool tangency_ok = false;  // grad phi126 || grad conic, not || axis, per node
  bool factors_vanish_at_nodes = false;  // phi21, phi42, phi126 all vanish
  int sample_node_multiplicity = 0;      // direct partial-derivative order
};
IterationReport iterate_pullback(const ArrangementModel& m);

}  // namespace klein
