#include "doctest.h"
#include "klein/covariant.hpp"

using namespace klein;

namespace {
TowerPtr Q() { return FieldTower::rationals(); }
}

TEST_CASE("hessian on simple forms") {
  CHECK(hessian(parse_poly(Q(), "x^2 + y^2 + z^2")) ==
        parse_poly(Q(), "8"));
  CHECK(hessian(parse_poly(Q(), "x*y*z")) == parse_poly(Q(), "2*x*y*z"));
  CHECK(jacobian_det(parse_poly(Q(), "x"), parse_poly(Q(), "y"),
                     parse_poly(Q(), "z")) == parse_poly(Q(), "1"));
}

TEST_CASE("catalogue construction and fixed normalizations") {
  auto cat = build_catalogue();

  // The sextic covariant in fully expanded form.
  auto phi6_display =
      parse_poly(Q(), "x*y^5 + y*z^5 + z*x^5 - 5*x^2*y^2*z^2");
  CHECK(hessian(cat.phi4) == phi6_display * Rat(-54));
  CHECK(cat.phi6 == phi6_display);

  CHECK(cat.phi4.degree() == 4);
  CHECK(cat.phi6.degree() == 6);
  CHECK(cat.phi14.degree() == 14);
  CHECK(cat.phi21.degree() == 21);
  CHECK(cat.phi4.is_homogeneous());
  CHECK(cat.phi6.is_homogeneous());
  CHECK(cat.phi14.is_homogeneous());
  CHECK(cat.phi21.is_homogeneous());

  // Gradient components are binomials: powers under pullback stay sparse.
  for (int v = 0; v < 3; ++v) {
    CHECK(cat.grad4[v].term_count() == 2);
    CHECK(cat.grad4[v].degree() == 3);
  }
  CHECK(cat.grad4[0] == parse_poly(Q(), "3*x^2*y + z^3"));
  CHECK(cat.grad4[1] == parse_poly(Q(), "x^3 + 3*y^2*z"));
  CHECK(cat.grad4[2] == parse_poly(Q(), "y^3 + 3*z^2*x"));
}

TEST_CASE("catalogue values at rational points") {
  auto cat = build_catalogue();
  auto one = Q()->one(), zero = Q()->zero();

  // [1:1:1]: quartic=3, sextic=-2, the degree-21 covariant vanishes.
  CHECK(cat.phi4.evaluate({one, one, one}).rational_value() == 3);
  CHECK(cat.phi6.evaluate({one, one, one}).rational_value() == -2);
  CHECK(cat.phi21.evaluate({one, one, one}).is_zero());
  CHECK(!cat.phi14.evaluate({one, one, one}).is_zero());

  // [1:0:0]: on the curve and on the sextic, but not on the higher two.
  CHECK(cat.phi4.evaluate({one, zero, zero}).is_zero());
  CHECK(cat.phi6.evaluate({one, zero, zero}).is_zero());
  CHECK(!cat.phi14.evaluate({one, zero, zero}).is_zero());
  CHECK(!cat.phi21.evaluate({one, zero, zero}).is_zero());

  // Steinerian combination at [1:1:1]: 4*27 + 4 = 112.
  auto st = steinerian_combination(cat);
  CHECK(st.evaluate({one, one, one}).rational_value() == 112);
}

TEST_CASE("polar operator") {
  auto cat = build_catalogue();
  auto e1 = std::array<FieldElement, 3>{Q()->one(), Q()->zero(), Q()->zero()};
  CHECK(polar(cat.phi4, e1) == cat.grad4[0]);

  // Linearity in the point.
  auto p = std::array<FieldElement, 3>{Q()->constant(2), Q()->constant(-1),
                                       Q()->constant(3)};
  auto q = std::array<FieldElement, 3>{Q()->constant(1), Q()->constant(5),
                                       Q()->constant(0)};
  std::array<FieldElement, 3> pq;
  for (int i = 0; i < 3; ++i) pq[i] = p[i] + q[i];
  CHECK(polar(cat.phi4, pq) == polar(cat.phi4, p) + polar(cat.phi4, q));

  // polar of the sextic has degree 5.
  CHECK(polar(cat.phi6, p).degree() == 5);
}

TEST_CASE("pullback composes exactly") {
  auto cat = build_catalogue();
  auto f = parse_poly(Q(), "x*z - y^2");
  auto pb = pullback(cat.grad4, f);
  CHECK(pb.degree() == 6);
  // Spot check: evaluate composition two ways at a point.
  std::array<FieldElement, 3> pt{Q()->constant(2), Q()->constant(3),
                                 Q()->constant(-1)};
  std::array<FieldElement, 3> img;
  for (int v = 0; v < 3; ++v) img[v] = cat.grad4[v].evaluate(pt);
  CHECK(pb.evaluate(pt) == f.evaluate(img));
}

TEST_CASE("companion sextic") {
  auto w = wiman_sextic();
  CHECK(w.degree() == 6);
  CHECK(w.is_homogeneous());
  CHECK(w.term_count() == 6);
  CHECK(parse_poly(Q(), w.str()) == w);
}

TEST_CASE("catalogue dump is stable") {
  auto cat = build_catalogue();
  auto cat2 = build_catalogue();
  CHECK(cat.content_hash() == cat2.content_hash());
  CHECK(cat.dump() == cat2.dump());
  // Re-parse the dumped polynomials.
  CHECK(parse_poly(Q(), cat.phi21.str()) == cat.phi21);
  CHECK(parse_poly(Q(), cat.phi14.str()) == cat.phi14);
}
