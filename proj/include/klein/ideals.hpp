#pragma once

#include <memory>
#include <string>
#include <vector>

#include "klein/mpoly.hpp"
#include "klein/symmetry.hpp"

namespace klein {

// Finite set of pairwise-distinct projective points, possibly spread over
// several quadratic extensions of one base tower.
struct PointSet {
  std::string label;
  std::vector<ProjPoint> points;  // minimal form
};

// Normalizes every point to its minimal tower and verifies pairwise
// distinctness across towers; throws on a duplicate.
PointSet make_point_set(std::string label, std::vector<ProjPoint> pts);

// One degree of the evaluation-map bookkeeping behind point_ideal.
struct HilbertRecord {
  int degree = 0;
  long forms = 0;            // dimension of the space of degree-d forms
  long conditions = 0;       // rank of the evaluation map
  long kernel = 0;           // forms - conditions
  long from_generators = 0;  // part of the kernel generated in lower degrees
  long new_generators = 0;
};

struct GroebnerResult;

// Homogeneous ideal over one tower.  Treated as immutable once built; the
// basis cache is filled by buchberger() on a completed run.
struct Ideal {
  TowerPtr tower;
  std::vector<MPoly> generators;
  std::vector<HilbertRecord> hilbert;  // filled by point_ideal
  mutable std::shared_ptr<const GroebnerResult> basis_cache;
};

// Saturated homogeneous ideal of the point set over `tower`.  Generators are
// extracted degree by degree from the kernel of evaluation at the points;
// the search stops at the first degree D where the imposed-conditions count
// equals |points| for the second consecutive time and the accumulated
// generators reproduce the full kernel in degree D+1.  A point whose tower
// strictly extends `tower` contributes one evaluation row per relative basis
// coordinate, so such data must be conjugation-closed for the result to cut
// out exactly the listed points.
Ideal point_ideal(const PointSet& ps, const TowerPtr& tower);

// Pairwise products of the generators.
Ideal ideal_square(const Ideal& I);

struct GroebnerBudget {
  long max_spairs = -1;         // < 0: unlimited
  double wall_seconds = -1;     // < 0: unlimited
  std::string checkpoint_path;  // empty: no checkpoint on abort
};

struct GroebnerResult {
  bool complete = false;
  std::string stop_reason;   // "complete", "spair-budget", "wall-clock"
  std::vector<MPoly> basis;  // reduced (monic, mutually reduced) iff complete
  long spairs_considered = 0;
  long spairs_reduced = 0;
  long reductions_to_zero = 0;
};

// Buchberger's algorithm in graded reverse lexicographic order with the
// sugar selection strategy and the product and chain criteria; the pair
// queue is deterministic, so runs are reproducible.  When a budget runs out
// the state is written to budget.checkpoint_path (if set) and the partial
// basis is returned with complete = false.
GroebnerResult buchberger(const Ideal& I, const GroebnerBudget& budget = {});

// Continues an interrupted run from its checkpoint file.
GroebnerResult buchberger_resume(const std::string& checkpoint_path,
                                 const GroebnerBudget& budget = {});

// Deterministic full reduction of f modulo `basis` (smallest-index reducer
// first, every term reduced).  With a reduced Groebner basis this is the
// canonical normal form: zero iff f lies in the ideal.
MPoly normal_form(const MPoly& f, const std::vector<MPoly>& basis);

// Derivative-vanishing evidence for one point.
struct PointTranscript {
  std::string point;
  int orders_checked = 0;  // all total orders < m were evaluated
  bool vanished = false;
  std::string failing_partial;  // first non-vanishing partial, if any
};

struct MembershipReport {
  bool member = false;
  int m = 0;
  std::vector<PointTranscript> transcript;
};

// f lies in the m-th symbolic power of the ideal of the point set iff every
// partial derivative of total order < m vanishes at every point.  Decided by
// exact evaluation; the symbolic power is never materialized.
MembershipReport symbolic_membership(const MPoly& f, const PointSet& ps,
                                     int m);

}  // namespace klein
