#include <vector>

#include "doctest.h"
#include "klein/mpoly.hpp"
#include "klein/tower.hpp"

using namespace klein;

namespace {

TowerPtr cyclo7() {
  static TowerPtr t = [] {
    auto Q = FieldTower::rationals();
    std::vector<FieldElement> ones(6, Q->one());
    return FieldTower::extend(Q, "z7", ones);
  }();
  return t;
}

// Independent oracle: multiply two Z[zeta7] coordinate vectors by naive
// convolution and reduction zeta^6 = -(1+zeta+...+zeta^5), entirely separate
// from the tower arithmetic under test.
std::vector<Rat> naive_mul(const std::vector<Rat>& a,
                           const std::vector<Rat>& b) {
  std::vector<Rat> full(11, Rat(0));
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) full[i + j] += a[i] * b[j];
  for (int e = 10; e >= 6; --e) {
    Rat c = full[e];
    if (c == 0) continue;
    full[e] = 0;
    for (int r = e - 6; r < e; ++r) full[r] -= c;
  }
  full.resize(6);
  return full;
}

}  // namespace

TEST_CASE("rational tower basics") {
  auto Q = FieldTower::rationals();
  CHECK(Q->dim() == 1);
  auto a = Q->constant(rat(2, 3));
  auto b = Q->constant(rat(-1, 6));
  CHECK((a * b).rational_value() == rat(-1, 9));
  CHECK((a + b).rational_value() == rat(1, 2));
  CHECK(a.inverse().rational_value() == rat(3, 2));
  CHECK(a.pow(-2).rational_value() == rat(9, 4));
  CHECK_THROWS(Q->zero().inverse());
}

TEST_CASE("cyclotomic arithmetic against naive oracle") {
  auto T = cyclo7();
  CHECK(T->dim() == 6);
  auto z = T->generator("z7");

  // zeta * zeta^6 = 1, where zeta^6 = -(1+...+zeta^5).
  CHECK(z.pow(7) == T->one());
  CHECK(z.pow(6) * z == T->one());

  // Deterministic battery of products vs the oracle.
  std::vector<std::vector<Rat>> samples;
  for (int s = 0; s < 12; ++s) {
    std::vector<Rat> v(6);
    for (int i = 0; i < 6; ++i)
      v[i] = rat((s * 7 + i * 3) % 11 - 5, 1 + (s + i) % 4);
    samples.push_back(v);
  }
  for (size_t i = 0; i < samples.size(); ++i) {
    for (size_t j = 0; j < samples.size(); ++j) {
      auto prod = T->from_flat(samples[i]) * T->from_flat(samples[j]);
      CHECK(prod.flat() == naive_mul(samples[i], samples[j]));
    }
  }
}

TEST_CASE("Gauss sum identity in Q(zeta7)") {
  auto T = cyclo7();
  auto z = T->generator("z7");
  auto g1 = z + z.pow(2) + z.pow(4);
  auto g2 = z.pow(3) + z.pow(5) + z.pow(6);
  CHECK((g1 * g2).is_rational());
  CHECK((g1 * g2).rational_value() == 2);
  CHECK((g1 + g2).rational_value() == -1);
  // (2*g1 + 1)^2 = -7: the square root of -7 lives in the field.
  auto gauss = g1 * Rat(2) + T->one();
  CHECK((gauss * gauss).rational_value() == -7);
}

TEST_CASE("inverse in the cyclotomic field") {
  auto T = cyclo7();
  auto z = T->generator("z7");
  auto a = T->one() + z;
  auto inv = a.inverse();
  CHECK(a * inv == T->one());
  // A denser element.
  auto b = z.pow(5) * Rat(3) - z.pow(2) * Rat(1, 7) + T->constant(rat(2, 5));
  CHECK(b * b.inverse() == T->one());
}

TEST_CASE("tower extension rejections") {
  auto Q = FieldTower::rationals();
  // Degree < 2.
  CHECK_THROWS_AS(FieldTower::extend(Q, "t", {Q->constant(2)}), error);
  // Reducible quadratic t^2 - 4 names a root.
  try {
    FieldTower::extend(Q, "t", {Q->constant(-4), Q->zero()});
    CHECK(false);
  } catch (const error& e) {
    CHECK(std::string(e.what()).find("root") != std::string::npos);
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
  // x^2+x+1 is fine over Q (discriminant -3).
  auto Qw = FieldTower::extend(Q, "w", {Q->one(), Q->one()});
  auto w = Qw->generator("w");
  CHECK(w.pow(3) == Qw->one());
  CHECK(!(w == Qw->one()));
  // Same modulus is irreducible over Q(zeta7) too: builds the compositum.
  auto T = cyclo7();
  auto Tw = FieldTower::extend(T, "w", {T->one(), T->one()});
  CHECK(Tw->dim() == 12);
  auto ww = Tw->generator("w");
  CHECK(ww.pow(3) == Tw->one());
  auto mixed = (Tw->embed(T->generator("z7")) + ww);
  CHECK(mixed * mixed.inverse() == Tw->one());
}

TEST_CASE("element text round-trips") {
  auto T = cyclo7();
  auto s = parse_element(T, "1/7*(2*z7^4+2*z7^2+2*z7+1)");
  // This is sqrt(-7)/7, so s^2 = -1/7.
  CHECK((s * s).rational_value() == rat(-1, 7));
  CHECK(parse_element(T, s.str()) == s);

  auto e2 = parse_element(T, "-z7^5 - z7^3 + 3/4");
  CHECK(parse_element(T, e2.str()) == e2);
  CHECK(e2.str() == "-z7^5-z7^3+3/4");

  auto Tw = FieldTower::extend(T, "w", {T->one(), T->one()});
  auto e3 = parse_element(Tw, "(z7+1)*w - z7^2 + 2");
  CHECK(parse_element(Tw, e3.str()) == e3);

  CHECK_THROWS(parse_element(T, "x + 1"));
  CHECK_THROWS(parse_element(T, "z7 +"));
  CHECK_THROWS(parse_element(T, "q9"));
}

TEST_CASE("squareness decisions") {
  auto Q = FieldTower::rationals();
  auto d1 = decide_square(Q->constant(rat(49, 4)));
  CHECK(d1.is_square);
  CHECK(d1.root.rational_value() == rat(7, 2));
  CHECK(!decide_square(Q->constant(-1)).is_square);
  CHECK(!decide_square(Q->constant(2)).is_square);

  auto T = cyclo7();
  // -7 becomes a square in Q(zeta7) (Gauss sum), while -3 and 2 do not.
  auto s7 = decide_square(T->constant(-7));
  REQUIRE(s7.is_square);
  CHECK((s7.root * s7.root).rational_value() == -7);
  auto n3 = decide_square(T->constant(-3));
  CHECK(!n3.is_square);
  CHECK(n3.witness_prime > 7);
  CHECK(!decide_square(T->constant(2)).is_square);

  // Squares of irrational elements are recovered exactly.
  auto z = T->generator("z7");
  auto val = (z.pow(4) + z * Rat(2) - T->constant(rat(3, 5)));
  auto dec = decide_square(val * val);
  REQUIRE(dec.is_square);
  CHECK(dec.root * dec.root == val * val);
}

TEST_CASE("registry canonicalizes quadratic extensions by square class") {
  auto T = cyclo7();
  TowerRegistry reg(T);
  auto z = T->generator("z7");

  auto h1 = reg.sqrt(T->constant(-3));
  CHECK(h1.tower->dim() == 12);
  CHECK(h1.root * h1.root == h1.tower->embed(T->constant(-3)));

  // -12 = 4*(-3): same class, same tower, scaled root.
  auto h2 = reg.sqrt(T->constant(-12));
  CHECK(h2.tower.get() == h1.tower.get());
  CHECK(h2.root * h2.root == h2.tower->embed(T->constant(-12)));
  CHECK(reg.extensions().size() == 1);

  // An element-square ratio: (1+z)^2 * (-3) also lands in the first tower.
  auto c = (T->one() + z) * (T->one() + z) * Rat(-3);
  auto h3 = reg.sqrt(c);
  CHECK(h3.tower.get() == h1.tower.get());
  CHECK(h3.root * h3.root == h3.tower->embed(c));

  // A square never extends.
  auto h4 = reg.sqrt(T->constant(-7));
  CHECK(h4.tower.get() == T.get());

  // A genuinely new class makes a second tower.
  auto h5 = reg.sqrt(T->constant(5));
  CHECK(h5.tower.get() != h1.tower.get());
  CHECK(reg.extensions().size() == 2);
  CHECK(h5.root * h5.root == h5.tower->embed(T->constant(5)));
}

TEST_CASE("descend and embed round-trip") {
  auto T = cyclo7();
  auto Tw = FieldTower::extend(T, "w", {T->one(), T->one()});
  auto z = T->generator("z7");
  auto lifted = Tw->embed(z + T->constant(2));
  auto back = Tw->descend(lifted);
  REQUIRE(back.has_value());
  CHECK(*back == z + T->constant(2));
  CHECK(!Tw->descend(Tw->generator("w")).has_value());
}
