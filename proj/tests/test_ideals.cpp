#include <algorithm>
#include <cstdio>
#include <set>

#include "doctest.h"
#include "klein/containment.hpp"
#include "klein/ideals.hpp"

using namespace klein;

namespace {

TowerPtr QQ() { return FieldTower::rationals(); }

TowerPtr cube_root_tower() {
  auto Q = QQ();
  return FieldTower::extend(Q, "w", {Q->one(), Q->one()});
}

PointSet dual_hesse() {
  auto W = cube_root_tower();
  FieldElement w = W->generator("w");
  std::vector<ProjPoint> pts;
  pts.push_back(ProjPoint::of({W->one(), W->zero(), W->zero()}));
  pts.push_back(ProjPoint::of({W->zero(), W->one(), W->zero()}));
  pts.push_back(ProjPoint::of({W->zero(), W->zero(), W->one()}));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      pts.push_back(ProjPoint::of({w.pow(i), w.pow(j), W->one()}));
  return make_point_set("triple points", std::move(pts));
}

PointSet origin_point() {
  auto Q = QQ();
  return make_point_set(
      "one point", {ProjPoint::of({Q->zero(), Q->zero(), Q->one()})});
}

std::multiset<std::string> leading_monomials(const std::vector<MPoly>& basis) {
  std::multiset<std::string> out;
  for (const auto& b : basis) out.insert(b.leading().first.str());
  return out;
}

}  // namespace

TEST_CASE("ideal of a single rational point") {
  Ideal I = point_ideal(origin_point(), QQ());
  REQUIRE(I.generators.size() == 2);
  CHECK(I.generators[0].str() == "x");
  CHECK(I.generators[1].str() == "y");
}

TEST_CASE("point sets reject duplicates") {
  auto Q = QQ();
  auto p = ProjPoint::of({Q->one(), Q->one(), Q->one()});
  auto q = ProjPoint::of({Q->constant(2), Q->constant(2), Q->constant(2)});
  CHECK_THROWS(make_point_set("dup", {p, q}));  // equal after normalization
}

TEST_CASE("point ideal rejects incompatible towers") {
  auto Q = QQ();
  auto W = cube_root_tower();
  auto U = FieldTower::extend(Q, "u", {Q->constant(-2), Q->zero()});  // u^2=2
  FieldElement w = W->generator("w");
  auto ps = make_point_set("conjugate pair",
                           {ProjPoint::of({W->one(), w, w * w}),
                            ProjPoint::of({W->one(), w * w, w})});
  CHECK_THROWS(point_ideal(ps, U));
}

TEST_CASE("conjugate pair over the rationals via relative coordinates") {
  auto Q = QQ();
  auto W = cube_root_tower();
  FieldElement w = W->generator("w");
  auto ps = make_point_set("conjugate pair",
                           {ProjPoint::of({W->one(), w, w * w}),
                            ProjPoint::of({W->one(), w * w, w})});
  Ideal I = point_ideal(ps, Q);
  REQUIRE(I.generators.size() == 2);
  CHECK(I.generators[0].degree() == 1);
  CHECK(I.generators[1].degree() == 2);
  CHECK(I.generators[0].str() == "x+y+z");
  for (const auto& g : I.generators)
    for (const auto& p : ps.points) CHECK(value_at(g, p).is_zero());
  // the stabilized Hilbert function equals the scheme degree
  CHECK(I.hilbert.back().conditions == 2);
}

TEST_CASE("dual-Hesse ideal: three quartics with the predicted Hilbert trail") {
  Ideal I = point_ideal(dual_hesse(), cube_root_tower());
  REQUIRE(I.generators.size() == 3);
  std::multiset<std::string> got;
  for (const auto& g : I.generators) {
    CHECK(g.degree() == 4);
    got.insert(g.str());
  }
  std::multiset<std::string> expect = {"x^3*y-y*z^3", "x*y^3-x*z^3",
                                       "x^3*z-y^3*z"};
  CHECK(got == expect);

  REQUIRE(I.hilbert.size() == 5);
  const HilbertRecord& d4 = I.hilbert[3];
  CHECK(d4.degree == 4);
  CHECK(d4.forms == 15);
  CHECK(d4.conditions == 12);
  CHECK(d4.kernel == 3);
  CHECK(d4.new_generators == 3);
  const HilbertRecord& d5 = I.hilbert[4];
  CHECK(d5.conditions == 12);
  CHECK(d5.kernel == 9);
  CHECK(d5.from_generators == 9);
  CHECK(d5.new_generators == 0);
}

TEST_CASE("buchberger reduces the textbook pair") {
  auto Q = QQ();
  Ideal I;
  I.tower = Q;
  I.generators = {parse_poly(Q, "x^2-y^2"), parse_poly(Q, "x^2+y^2")};
  GroebnerResult gb = buchberger(I);
  CHECK(gb.complete);
  CHECK(gb.stop_reason == "complete");
  REQUIRE(gb.basis.size() == 2);
  CHECK(gb.basis[0].str() == "y^2");
  CHECK(gb.basis[1].str() == "x^2");

  CHECK(normal_form(parse_poly(Q, "x^2+y^2"), gb.basis).is_zero());
  CHECK(normal_form(parse_poly(Q, "x^2*y^2"), gb.basis).is_zero());
  MPoly r = normal_form(parse_poly(Q, "x+y"), gb.basis);
  CHECK(r.str() == "x+y");
  CHECK(normal_form(r, gb.basis) == r);  // idempotent
}

TEST_CASE("an already reduced basis is returned as-is") {
  auto Q = QQ();
  Ideal I;
  I.tower = Q;
  I.generators = {parse_poly(Q, "x"), parse_poly(Q, "y")};
  GroebnerResult gb = buchberger(I);
  CHECK(gb.complete);
  REQUIRE(gb.basis.size() == 2);
  CHECK(gb.basis[0].str() == "y");
  CHECK(gb.basis[1].str() == "x");
}

TEST_CASE("reduced basis does not depend on generator order") {
  auto W = cube_root_tower();
  Ideal I = ideal_square(point_ideal(dual_hesse(), W));
  REQUIRE(I.generators.size() == 6);
  GroebnerResult fresh = buchberger(I);
  CHECK(fresh.complete);

  Ideal perm = I;
  std::swap(perm.generators[0], perm.generators[5]);
  std::swap(perm.generators[1], perm.generators[3]);
  std::rotate(perm.generators.begin(), perm.generators.begin() + 2,
              perm.generators.end());
  GroebnerResult again = buchberger(perm);
  REQUIRE(again.basis.size() == fresh.basis.size());
  for (size_t i = 0; i < fresh.basis.size(); ++i)
    CHECK(again.basis[i] == fresh.basis[i]);
}

TEST_CASE("budgets abort cleanly and resume from the checkpoint") {
  auto W = cube_root_tower();
  Ideal I = ideal_square(point_ideal(dual_hesse(), W));

  GroebnerBudget tight;
  tight.max_spairs = 10;
  tight.checkpoint_path = "gb_checkpoint_test.json";
  GroebnerResult partial = buchberger(I, tight);
  CHECK_FALSE(partial.complete);
  CHECK(partial.stop_reason == "spair-budget");
  CHECK(partial.spairs_considered == 10);

  GroebnerResult resumed = buchberger_resume("gb_checkpoint_test.json", {});
  CHECK(resumed.complete);
  GroebnerResult fresh = buchberger(I);
  REQUIRE(resumed.basis.size() == fresh.basis.size());
  for (size_t i = 0; i < fresh.basis.size(); ++i)
    CHECK(resumed.basis[i] == fresh.basis[i]);
  std::remove("gb_checkpoint_test.json");

  // a completed run is cached on the ideal, so exhaust the wall budget on a
  // cache-free copy
  Ideal J;
  J.tower = I.tower;
  J.generators = I.generators;
  GroebnerBudget zero_wall;
  zero_wall.wall_seconds = 0;
  GroebnerResult stopped = buchberger(J, zero_wall);
  CHECK_FALSE(stopped.complete);
  CHECK(stopped.stop_reason == "wall-clock");
}

TEST_CASE("symbolic membership by derivative vanishing") {
  auto Q = QQ();
  PointSet ps = origin_point();

  auto r1 = symbolic_membership(parse_poly(Q, "x"), ps, 1);
  CHECK(r1.member);
  auto r2 = symbolic_membership(parse_poly(Q, "x"), ps, 2);
  CHECK_FALSE(r2.member);
  REQUIRE(r2.transcript.size() == 1);
  CHECK_FALSE(r2.transcript[0].vanished);
  CHECK(r2.transcript[0].failing_partial == "f_x");

  CHECK(symbolic_membership(parse_poly(Q, "x^2*y"), ps, 3).member);
  CHECK_FALSE(symbolic_membership(parse_poly(Q, "x^2*y"), ps, 4).member);

  // order additivity on a product
  CHECK(symbolic_membership(parse_poly(Q, "x^2"), ps, 2).member);
  CHECK(symbolic_membership(parse_poly(Q, "y"), ps, 1).member);
  CHECK(symbolic_membership(parse_poly(Q, "x^2*y"), ps, 3).member);
}

TEST_CASE("dual-Hesse containment failure end to end") {
  ContainmentCertificate cert =
      containment_case(ContainmentCase::DualHesse, nullptr);
  CHECK(cert.symbolic.member);
  CHECK(cert.symbolic_established);
  CHECK(cert.groebner_complete);
  CHECK(cert.non_membership_certified);
  CHECK(cert.containment_fails);
  CHECK(cert.generator_degrees == std::vector<int>{4, 4, 4});
  CHECK(cert.generators_vanish_at_points);
  CHECK_FALSE(cert.witness_normal_form.is_zero());

  // the witness does lie in the ideal itself, just not in its square
  auto W = cube_root_tower();
  GroebnerResult gbI = buchberger(cert.ideal);
  CHECK(normal_form(cert.witness.embedded(W), gbI.basis).is_zero());

  // squares of generators do lie in the square
  Ideal sq = ideal_square(cert.ideal);
  GroebnerResult gb2 = buchberger(sq);
  MPoly gg = cert.ideal.generators[0] * cert.ideal.generators[1];
  CHECK(normal_form(gg, gb2.basis).is_zero());
}

TEST_CASE("dual-Hesse certificate replay and tamper detection") {
  ContainmentCertificate cert =
      containment_case(ContainmentCase::DualHesse, nullptr);
  Json env = containment_to_json(cert);
  RecheckOutcome ok = recheck_containment(env);
  CHECK(ok.ok);
  CHECK(ok.checks > 50);

  Json forged = env;
  forged["body"]["witness"]["poly"] = "x";
  RecheckOutcome bad = recheck_containment(forged);
  CHECK_FALSE(bad.ok);
  REQUIRE(!bad.failures.empty());
  CHECK(bad.failures[0].find("integrity") != std::string::npos);

  // re-sealing a modified body defeats the digest but not the replay
  Json reforged;
  Json body = env["body"];
  body["non_membership"]["certified"] = true;
  body["containment_fails"] = true;
  body["groebner"]["witness_normal_form"] = "0";
  reforged = seal_certificate("containment", body);
  RecheckOutcome rb = recheck_containment(reforged);
  CHECK_FALSE(rb.ok);
}

TEST_CASE("ideal square takes all pairwise products") {
  auto Q = QQ();
  Ideal I;
  I.tower = Q;
  I.generators = {parse_poly(Q, "x"), parse_poly(Q, "y"),
                  parse_poly(Q, "z")};
  Ideal sq = ideal_square(I);
  CHECK(sq.generators.size() == 6);
  std::multiset<std::string> got;
  for (const auto& g : sq.generators) got.insert(g.str());
  std::multiset<std::string> expect = {"x^2", "x*y", "x*z",
                                       "y^2", "y*z", "z^2"};
  CHECK(got == expect);
}

TEST_CASE("groebner results are cached on the ideal") {
  auto Q = QQ();
  Ideal I;
  I.tower = Q;
  I.generators = {parse_poly(Q, "x^2-y^2"), parse_poly(Q, "x^2+y^2")};
  CHECK(I.basis_cache == nullptr);
  GroebnerResult first = buchberger(I);
  CHECK(I.basis_cache != nullptr);
  GroebnerResult second = buchberger(I);
  REQUIRE(second.basis.size() == first.basis.size());
  for (size_t i = 0; i < first.basis.size(); ++i)
    CHECK(second.basis[i] == first.basis[i]);
}
