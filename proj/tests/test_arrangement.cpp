#include "doctest.h"

#include "klein/arrangement.hpp"

using namespace klein;

namespace {

const ArrangementModel& model() {
  static ArrangementModel m = build_arrangement();
  return m;
}

Census census_of(std::map<int, long> t) {
  Census c;
  c.t = std::move(t);
  return c;
}

}  // namespace

TEST_CASE("polars split as line times smooth transverse conic") {
  const auto& m = model();
  REQUIRE(m.polars.size() == 21);
  MPoly phi4 = m.cat.phi4.embedded(m.group.tower);
  for (const auto& rp : m.polars) {
    CHECK(rp.axis.degree() == 1);
    CHECK(rp.conic.degree() == 2);
    CHECK(!rp.conic_det.is_zero());
    CHECK(!rp.restriction_disc.is_zero());
    CHECK(rp.axis * rp.conic == polar(phi4, rp.center.x));
  }
}

TEST_CASE("nodes lie on the invariant locus but off the quartic") {
  const auto& m = model();
  int n = 0;
  for (const auto& rp : m.polars)
    for (const auto& q : rp.nodes) {
      ++n;
      CHECK(multiplicity(m.cat.phi6, q) > 0);
      CHECK(multiplicity(m.cat.phi14, q) > 0);
      CHECK(multiplicity(m.cat.phi21, q) == 1);
      CHECK(multiplicity(m.cat.phi4, q) == 0);
      CHECK(multiplicity(m.phi42, q) == 1);
      CHECK(multiplicity(m.phi63, q) == 2);
    }
  CHECK(n == 42);
}

TEST_CASE("the full arrangement has the expected multiplicity tables") {
  const auto& m = model();
  CHECK(m.points.size() == 483);
  CHECK(m.census_K.t == std::map<int, long>{{2, 42}, {3, 252}, {4, 189}});
  CHECK(m.census_K1.t == std::map<int, long>{{3, 28}, {4, 21}});
  CHECK(m.census_K2.t == std::map<int, long>{{2, 168}, {3, 224}});
  CHECK(m.census_K.singular_count() == 483);
  CHECK(m.census_K.pair_sum() == 1932);
  CHECK(census_identity_holds(m.census_K, 21, 21));
  // perturbing any count breaks the pairwise-intersection identity
  Census broken = m.census_K;
  broken.t[2] -= 1;
  CHECK(!census_identity_holds(broken, 21, 21));
  for (const auto& cp : m.points) CHECK(cp.ordinary);
}

TEST_CASE("class populations and incidence patterns") {
  const auto& m = model();
  std::map<PointClass, int> pop;
  for (const auto& cp : m.points) pop[cp.cls]++;
  CHECK(pop[PointClass::Node42] == 42);
  CHECK(pop[PointClass::Triple28] == 28);
  CHECK(pop[PointClass::Triple56] == 56);
  CHECK(pop[PointClass::Triple84] == 168);
  CHECK(pop[PointClass::Quad21] == 21);
  CHECK(pop[PointClass::Quad84] == 168);
}

TEST_CASE("harbourne indices of the three censuses") {
  const auto& m = model();
  CHECK(harbourne_index(63, m.census_K) == Rat(-71, 23));
  CHECK(harbourne_index_conic_line(21, 21, m.census_K) == Rat(-71, 23));
  CHECK(harbourne_index(21, m.census_K1) == Rat(-3));
  CHECK(harbourne_index(42, m.census_K2) == Rat(-33, 14));
}

TEST_CASE("line-arrangement index comparison point") {
  // 45 lines with 120 triple, 45 quadruple and 36 quintuple points
  Census w = census_of({{3, 120}, {4, 45}, {5, 36}});
  CHECK(w.singular_count() == 201);
  CHECK(census_identity_holds(w, 45, 0));
  CHECK(harbourne_index(45, w) == Rat(-225, 67));
  // both indices stay above the -4 bound; the line-arrangement record is
  // the more negative of the two
  CHECK(harbourne_index(63, model().census_K) > harbourne_index(45, w));
  CHECK(harbourne_index(63, model().census_K) > Rat(-4));
  CHECK(harbourne_index(45, w) > Rat(-4));
}

TEST_CASE("index accounts for infinitely near points when present") {
  Census c = census_of({{2, 3}});
  Rat plain = harbourne_index(3, c);
  c.infinitely_near.emplace_back("first neighbourhood", 1);
  CHECK(harbourne_index(3, c) == plain - Rat(1, 3));
}

TEST_CASE("logarithmic chern slope of the conic census") {
  const auto& m = model();
  ChernPair ch = chern_slopes(21, 2, m.census_K2);
  CHECK(ch.c1sq == Rat(1297));
  CHECK(ch.c2 == Rat(577));
  CHECK(ch.slope == Rat(1297, 577));
  CHECK(ch.slope < Rat(8, 3));
  CHECK(ch.slope > Rat(2));
  // a point on all curves is rejected
  Census bad = census_of({{3, 1}});
  CHECK_THROWS_AS(chern_slopes(3, 2, bad), error);
}

TEST_CASE("tjurina number and the freeness window") {
  const auto& m = model();
  FreenessReport fr = tjurina_and_freeness(63, m.census_K);
  CHECK(fr.tau == 2751);
  CHECK(!fr.is_free);
  CHECK(!fr.is_nearly_free);
  CHECK(fr.disc_free == -528);
  CHECK(fr.disc_nearly == -524);
  CHECK(fr.defect == 132);

  // control cases: a triangle of lines is free, a smooth cubic is neither
  FreenessReport tri = tjurina_and_freeness(3, census_of({{2, 3}}));
  CHECK(tri.tau == 3);
  CHECK(tri.is_free);
  FreenessReport smooth = tjurina_and_freeness(3, census_of({}));
  CHECK(smooth.tau == 0);
  CHECK(!smooth.is_free);
  CHECK(!smooth.is_nearly_free);
}

TEST_CASE("quadratic-form inequality for conic-line arrangements") {
  const auto& m = model();
  InequalityReport full = conic_inequality_check(m.census_K, 21, 21);
  CHECK(full.hypothesis);
  CHECK(full.lhs == Rat(2793));
  CHECK(full.rhs == Rat(21));
  CHECK(full.holds);

  InequalityReport conics = conic_inequality_check(m.census_K2, 0, 21);
  CHECK(conics.hypothesis);
  CHECK(conics.lhs == Rat(2016));
  CHECK(conics.rhs == Rat(0));
  CHECK(conics.holds);

  // hypothesis detection: a 10-fold point among 1 line + 1 conic
  InequalityReport bad = conic_inequality_check(census_of({{10, 1}}), 1, 1);
  CHECK(!bad.hypothesis);
}

TEST_CASE("multiplicities at the orbit representatives") {
  const auto& m = model();
  CHECK(multiplicity(m.cat.phi21, m.pencil28.rep) == 3);
  CHECK(multiplicity(m.cat.phi21, m.pencil21.rep) == 4);
  CHECK(multiplicity(m.phi63, m.pencil28.rep) == 3);
  CHECK(multiplicity(m.phi63, m.pencil21.rep) == 4);
  CHECK(multiplicity(m.phi42, m.pencil28.rep) == 0);
  CHECK(multiplicity(m.cat.phi4, m.pencil28.rep) == 0);
  CHECK(multiplicity(m.cat.phi4, m.pencil21.rep) == 0);
}

TEST_CASE("each line carries four quadruple and four triple points") {
  IncidenceCounts inc = incidence_counts(model());
  REQUIRE(inc.quad_points_per_line.size() == 21);
  for (int q : inc.quad_points_per_line) CHECK(q == 4);
  for (int t : inc.triple_points_per_line) CHECK(t == 4);
}

TEST_CASE("pencil through a triple point: self-paired lines") {
  const auto& p = model().pencil28;
  REQUIRE(p.lines.size() == 3);
  REQUIRE(p.conics.size() == 3);
  CHECK(p.partner == std::vector<int>{0, 1, 2});
  CHECK(p.transcription_match);
  CHECK(p.new_points.size() == 6);
}

TEST_CASE("pencil through a quadruple point: lines exchanged in pairs") {
  const auto& p = model().pencil21;
  REQUIRE(p.lines.size() == 4);
  REQUIRE(p.conics.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(p.partner[i] != i);
    CHECK(p.partner[p.partner[i]] == i);
  }
  CHECK(p.transcription_match);
  CHECK(p.new_points.size() == 8);
}

TEST_CASE("two bitangency points lie on all three pencil conics") {
  const auto& m = model();
  int on_all = 0;
  for (const auto& cp : m.points) {
    if (cp.cls != PointClass::Triple56) continue;
    bool all3 = true;
    for (const auto& c : m.pencil28.conics) {
      ProjPoint q = cp.p;
      MPoly cl = c.embedded(q.tower());
      if (!cl.evaluate(q.x).is_zero()) all3 = false;
    }
    if (all3) ++on_all;
  }
  CHECK(on_all == 2);
}

TEST_CASE("product of the 21 conics is exactly the degree-42 form") {
  const auto& m = model();
  CHECK(m.conic_product_scale == m.group.tower->one());
  CHECK(m.cat.phi21 * m.phi42 == m.phi63);
}

TEST_CASE("binary roots of a rational restriction") {
  auto Q = FieldTower::rationals();
  MPoly conic = parse_poly(Q, "x^2+y^2-2*z^2");
  MPoly line = parse_poly(Q, "y-z");
  BinaryForm r = restrict_to_line(conic, line);
  TowerRegistry reg(Q);
  auto roots = binary_roots(r, reg);
  CHECK(!points_equal(roots[0], roots[1]));
  for (const auto& q : roots) {
    CHECK(conic.evaluate(q.x).is_zero());
    CHECK(line.evaluate(q.x).is_zero());
    CHECK(q.tower()->depth() == 0);  // square discriminant, no extension
  }
}

TEST_CASE("tangency detection at a point of contact") {
  auto Q = FieldTower::rationals();
  MPoly conic = parse_poly(Q, "y*z-x^2");
  MPoly line = parse_poly(Q, "z");
  ProjPoint p = ProjPoint::of({Q->zero(), Q->one(), Q->zero()});
  auto cert = is_ordinary({&conic, &line}, p);
  CHECK(!cert.ordinary);

  MPoly lx = parse_poly(Q, "x");
  MPoly ly = parse_poly(Q, "y");
  ProjPoint origin = ProjPoint::of({Q->zero(), Q->zero(), Q->one()});
  CHECK(is_ordinary({&lx, &ly}, origin).ordinary);
}

TEST_CASE("gradient map is equivariant for the dual action") {
  const auto& m = model();
  auto T = m.group.tower;
  std::array<FieldElement, 3> v = {T->constant(2), T->constant(3),
                                   T->constant(5)};
  for (int idx : {3, 17, 90}) {
    const ProjMatrix& M = m.group.elems[idx];
    ProjMatrix dual = M.inverse().transpose();
    std::array<FieldElement, 3> Mv = M.apply_coords(v);
    for (int i = 0; i < 3; ++i) {
      MPoly gi = m.cat.grad4[i].embedded(T);
      FieldElement lhs = gi.evaluate(Mv);
      FieldElement rhs = T->zero();
      for (int j = 0; j < 3; ++j) {
        MPoly gj = m.cat.grad4[j].embedded(T);
        rhs += dual.at(i, j) * gj.evaluate(v);
      }
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("iterated pullback splits off the previous level exactly") {
  const auto& m = model();
  IterationReport rep = iterate_pullback(m);
  CHECK(rep.phi126.degree() == 126);
  CHECK(rep.phi189.degree() == 189);
  CHECK(rep.division_chain_ok);
  CHECK(rep.nodes_map_into_nodes);
  CHECK(rep.tangency_ok);
  CHECK(rep.factors_vanish_at_nodes);
  CHECK(rep.sample_node_multiplicity == 3);
  CHECK(m.cat.phi21 * m.phi42 * rep.phi126 == rep.phi189);
}
