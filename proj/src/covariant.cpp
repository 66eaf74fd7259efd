#include "klein/covariant.hpp"

#include "klein/sha256.hpp"

namespace klein {

namespace {

MPoly det3(const std::array<std::array<MPoly, 3>, 3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

MPoly det4(const std::array<std::array<MPoly, 4>, 4>& m) {
  MPoly acc = MPoly::zero(m[0][0].tower());
  for (int c = 0; c < 4; ++c) {
    if (m[0][c].is_zero()) continue;
    std::array<std::array<MPoly, 3>, 3> minor;
    for (int r = 1; r < 4; ++r) {
      int cc = 0;
      for (int k = 0; k < 4; ++k) {
        if (k == c) continue;
        minor[r - 1][cc++] = m[r][k];
      }
    }
    MPoly term = m[0][c] * det3(minor);
    acc = (c % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

}  // namespace

MPoly hessian(const MPoly& f) {
  std::array<std::array<MPoly, 3>, 3> h;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) h[i][j] = f.partial(i).partial(j);
  h[1][0] = h[0][1];
  h[2][0] = h[0][2];
  h[2][1] = h[1][2];
  return det3(h);
}

MPoly bordered_hessian(const MPoly& f, const MPoly& g) {
  std::array<std::array<MPoly, 4>, 4> m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = f.partial(i).partial(j);
  for (int i = 0; i < 3; ++i) {
    m[i][3] = g.partial(i);
    m[3][i] = g.partial(i);
  }
  m[3][3] = MPoly::zero(f.tower());
  return det4(m);
}

MPoly jacobian_det(const MPoly& f, const MPoly& g, const MPoly& h) {
  std::array<std::array<MPoly, 3>, 3> m;
  for (int j = 0; j < 3; ++j) {
    m[0][j] = f.partial(j);
    m[1][j] = g.partial(j);
    m[2][j] = h.partial(j);
  }
  return det3(m);
}

MPoly polar(const MPoly& f, const std::array<FieldElement, 3>& p) {
  MPoly acc = f.partial(0) * p[0];
  acc += f.partial(1) * p[1];
  acc += f.partial(2) * p[2];
  return acc;
}

MPoly pullback(const std::array<MPoly, 3>& map, const MPoly& f) {
  return f.substitute(map);
}

std::string InvariantCatalogue::dump() const {
  std::string s;
  s += "quartic: " + phi4.str() + "\n";
  s += "sextic: " + phi6.str() + " (scale " + rat_str(scale6) + ")\n";
  s += "deg14: " + phi14.str() + " (scale " + rat_str(scale14) + ")\n";
  s += "deg21: " + phi21.str() + " (scale " + rat_str(scale21) + ")\n";
  s += "gradient: [" + grad4[0].str() + ", " + grad4[1].str() + ", " +
       grad4[2].str() + "]\n";
  return s;
}

std::string InvariantCatalogue::content_hash() const {
  return Sha256::hash_hex(dump());
}

InvariantCatalogue build_catalogue() {
  InvariantCatalogue cat;
  auto Q = FieldTower::rationals();
  cat.phi4 = parse_poly(Q, "x^3*y + y^3*z + z^3*x");
  cat.scale6 = rat(-1, 54);
  cat.scale14 = rat(1, 9);
  cat.scale21 = rat(1, 14);
  cat.phi6 = hessian(cat.phi4) * cat.scale6;
  cat.phi14 = bordered_hessian(cat.phi4, cat.phi6) * cat.scale14;
  cat.phi21 = jacobian_det(cat.phi4, cat.phi6, cat.phi14) * cat.scale21;
  for (int v = 0; v < 3; ++v) cat.grad4[v] = cat.phi4.partial(v);
  return cat;
}

MPoly steinerian_combination(const InvariantCatalogue& cat) {
  return cat.phi4.pow(3) * Rat(4) + cat.phi6 * cat.phi6;
}

MPoly wiman_sextic() {
  auto Q = FieldTower::rationals();
  return parse_poly(Q,
                    "10*x^3*y^3 + 9*z*(x^5 + y^5) - 45*x^2*y^2*z^2 "
                    "- 135*x*y*z^4 + 27*z^6");
}

}  // namespace klein
