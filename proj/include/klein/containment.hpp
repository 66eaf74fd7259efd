#pragma once

#include <string>
#include <vector>

#include "klein/arrangement.hpp"
#include "klein/certificate.hpp"
#include "klein/ideals.hpp"

namespace klein {

// The three point configurations whose radical ideals are tested for the
// failure of the containment (symbolic cube) inside (ordinary square).
enum class ContainmentCase {
  DualHesse,   // 12 triple points of the 9-line arrangement over Q(w)
  KleinLines,  // 49 singular points of the 21-line arrangement over Q(z7)
  KleinMult3   // 441 points of multiplicity >= 3 of the conic-line pair
};
std::string containment_case_name(ContainmentCase c);

// Everything needed to state, replay and audit one containment failure.
// The symbolic direction (witness lies in the third symbolic power) is a
// derivative-vanishing transcript; the non-membership direction is a reduced
// Groebner basis of the ideal square plus a nonzero normal form.  For the
// large cases the Groebner side is optional and the certificate records
// exactly which directions were established.
struct ContainmentCertificate {
  std::string label;
  PointSet points;

  bool ideal_computed = false;
  Ideal ideal;
  std::vector<int> generator_degrees;
  bool generators_vanish_at_points = false;

  MPoly witness;
  std::string witness_name;
  MembershipReport symbolic;  // m = 3 derivative transcripts
  bool symbolic_established = false;  // order-3 vanishing holds at every point

  // Family evidence path: the witness factors exactly into the line product,
  // the conic product and the degree-126 pullback, so the vanishing order at
  // each point is at least (lines through it) + (conics through it), plus one
  // more at the nodes where the pullback factor vanishes.  The derivative
  // transcript is then run directly on a lightest representative per point
  // class instead of on all points.
  bool symbolic_by_factor_orders = false;
  std::vector<int> factor_order_bounds;  // per point, parallel to points
  std::vector<bool> node_flag;           // per point: order leg from phi126
  std::vector<MPoly> factor_lines;       // the 21 axes
  std::vector<MPoly> factor_conics;      // the 21 conics
  MPoly factor_pullback;                 // the degree-126 factor
  PointSet sample_points;                // direct-transcript representatives

  bool groebner_attempted = false;
  bool groebner_complete = false;
  std::string groebner_stop_reason;
  long groebner_spairs = 0;
  std::vector<MPoly> square_basis;  // reduced basis of the ideal square
  std::string square_basis_hash;    // content hash of the canonical dump
  MPoly witness_normal_form;        // nonzero remainder = non-membership

  bool non_membership_certified = false;  // by this run's Groebner reduction
  bool non_membership_derived = false;    // inherited along the pullback
  std::string derived_from;               // source certificate label

  bool containment_fails = false;  // symbolic member && a non-membership leg
  std::vector<std::string> notes;
};

struct ContainmentOptions {
  bool compute_ideal = true;  // point_ideal + per-generator vanishing audit
  bool run_groebner = true;   // square + reduced basis + witness remainder
  GroebnerBudget budget;
};

// Builds the case data (dual-Hesse is self-contained; the klein cases read
// the point sets and witnesses off the arrangement model) and runs the
// requested directions.  Throws on structural failures; budget exhaustion is
// not a failure and leaves groebner_complete = false.
ContainmentCertificate containment_case(ContainmentCase c,
                                        const ArrangementModel* model,
                                        const ContainmentOptions& opt = {});

// The degree-189 witness against X = T (the 441 points of multiplicity >= 3)
// and X = T union the 42 nodes.  The symbolic direction combines the exact
// factorization of the witness with per-point component counts (order
// additivity) and direct derivative transcripts at class representatives;
// the non-membership direction is recorded as derived from the klein_mult3
// certificate rather than recomputed, and is only marked certified when that
// source certificate is.
std::vector<ContainmentCertificate> nested_containment_family(
    const ArrangementModel& model, const IterationReport& iter,
    const ContainmentCertificate& mult3);

// Sealed JSON image of a certificate: towers, points, generators, witness,
// transcripts, basis and hashes, sufficient for offline replay.
Json containment_to_json(const ContainmentCertificate& cert);

struct RecheckOutcome {
  bool ok = false;
  long checks = 0;
  std::vector<std::string> failures;
};

// Replays a serialized certificate without rerunning Buchberger: envelope
// digest, generator vanishing, derivative transcripts, basis hash, and a
// fresh normal-form reduction of the witness against the stored basis.
RecheckOutcome recheck_containment(const Json& envelope);

}  // namespace klein
