#include "klein/arrangement.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

namespace klein {

namespace {

void need(bool cond, const std::string& what) {
  if (!cond) throw error("arrangement: " + what);
}

ProjPoint grad_image(const InvariantCatalogue& cat, const ProjPoint& p) {
  return ProjPoint::of({value_at(cat.grad4[0], p), value_at(cat.grad4[1], p),
                        value_at(cat.grad4[2], p)});
}

std::array<FieldElement, 3> gradient_at(const MPoly& f, const ProjPoint& p) {
  return {value_at(f.partial(0), p), value_at(f.partial(1), p),
          value_at(f.partial(2), p)};
}

bool triples_proportional(const std::array<FieldElement, 3>& a,
                          const std::array<FieldElement, 3>& b) {
  // all 2x2 minors of the 2x3 matrix vanish
  return (a[0] * b[1] - a[1] * b[0]).is_zero() &&
         (a[0] * b[2] - a[2] * b[0]).is_zero() &&
         (a[1] * b[2] - a[2] * b[1]).is_zero();
}

std::optional<FieldElement> proportional_binary(const BinaryForm& a,
                                                const BinaryForm& b) {
  if (a.deg != b.deg) return std::nullopt;
  int piv = -1;
  for (size_t i = 0; i < b.c.size(); ++i)
    if (!b.c[i].is_zero()) {
      piv = static_cast<int>(i);
      break;
    }
  if (piv < 0) return std::nullopt;
  FieldElement lam = a.c[piv] / b.c[piv];
  for (size_t i = 0; i < b.c.size(); ++i)
    if (!(a.c[i] == b.c[i] * lam)) return std::nullopt;
  return lam;
}

// Coefficient triple of a linear form, as a projective point (the dual
// point of the line).
ProjPoint dual_point(const MPoly& line) {
  return ProjPoint::of({line.coefficient(Monomial{{1, 0, 0}}),
                        line.coefficient(Monomial{{0, 1, 0}}),
                        line.coefficient(Monomial{{0, 0, 1}})});
}

FieldElement conic_matrix_det(const MPoly& c) {
  const TowerPtr& t = c.tower();
  FieldElement a = c.coefficient(Monomial{{2, 0, 0}});
  FieldElement b = c.coefficient(Monomial{{1, 1, 0}});
  FieldElement cc = c.coefficient(Monomial{{0, 2, 0}});
  FieldElement d = c.coefficient(Monomial{{1, 0, 1}});
  FieldElement e = c.coefficient(Monomial{{0, 1, 1}});
  FieldElement f = c.coefficient(Monomial{{0, 0, 2}});
  FieldElement two = t->constant(2);
  // determinant of [[2a, b, d], [b, 2c, e], [d, e, 2f]]
  return a * two * (cc * two * f * two - e * e) -
         b * (b * f * two - e * d) + d * (b * e - cc * two * d);
}

}  // namespace

// ------------------------------------------------------------ local analysis

int multiplicity(const MPoly& f, const ProjPoint& p) {
  need(!f.is_zero(), "multiplicity of the zero polynomial");
  for (int m = 0; m <= f.degree(); ++m) {
    for (int a = m; a >= 0; --a)
      for (int b = m - a; b >= 0; --b) {
        unsigned c = static_cast<unsigned>(m - a - b);
        MPoly d = f.higher_partial({static_cast<unsigned>(a),
                                    static_cast<unsigned>(b), c});
        if (d.is_zero()) continue;
        if (!value_at(d, p).is_zero()) return m;
      }
  }
  throw error("multiplicity: all partial derivatives vanish at the point");
}

TangentCertificate is_ordinary(const std::vector<const MPoly*>& components,
                               const ProjPoint& p) {
  std::vector<std::array<FieldElement, 3>> grads;
  for (size_t i = 0; i < components.size(); ++i) {
    auto g = gradient_at(*components[i], p);
    if (g[0].is_zero() && g[1].is_zero() && g[2].is_zero())
      throw error("is_ordinary: component " + std::to_string(i) +
                  " is singular at the point");
    grads.push_back(std::move(g));
  }
  TangentCertificate cert;
  cert.ordinary = true;
  for (size_t i = 0; i < grads.size() && cert.ordinary; ++i)
    for (size_t j = i + 1; j < grads.size() && cert.ordinary; ++j)
      if (triples_proportional(grads[i], grads[j])) {
        cert.ordinary = false;
        cert.detail = "components " + std::to_string(i) + " and " +
                      std::to_string(j) + " share their tangent direction";
      }
  return cert;
}

std::array<ProjPoint, 2> binary_roots(const BinaryForm& q, TowerRegistry& reg) {
  need(q.deg == 2, "binary_roots expects a quadratic form");
  const TowerPtr& t = q.tower;
  const FieldElement& c0 = q.c[0];  // u^2
  const FieldElement& c1 = q.c[1];  // s*u
  const FieldElement& c2 = q.c[2];  // s^2
  FieldElement disc = c1 * c1 - c0 * c2 * Rat(4);
  need(!disc.is_zero(), "binary_roots: repeated root (zero discriminant)");

  auto on_line = [&](const FieldElement& s,
                     const FieldElement& u) -> ProjPoint {
    const TowerPtr& bt = s.tower();
    std::array<FieldElement, 3> coords;
    for (int i = 0; i < 3; ++i)
      coords[i] = bt->embed(q.param.p0[i]) * s + bt->embed(q.param.p1[i]) * u;
    return ProjPoint::of(coords);
  };

  std::array<FieldElement, 2> svals{t->zero(), t->zero()};
  std::array<FieldElement, 2> uvals{t->zero(), t->zero()};
  if (c2.is_zero()) {
    // q = u * (c1*s + c0*u): roots [1:0] and [c0:-c1]
    svals = {t->one(), c0};
    uvals = {t->zero(), -c1};
  } else {
    auto h = reg.sqrt(disc);
    const TowerPtr& bt = h.tower;
    FieldElement inv2a = (bt->embed(c2) * Rat(2)).inverse();
    svals = {(h.root - bt->embed(c1)) * inv2a,
             (-h.root - bt->embed(c1)) * inv2a};
    uvals = {bt->one(), bt->one()};
  }
  std::array<ProjPoint, 2> out{on_line(svals[0], uvals[0]),
                               on_line(svals[1], uvals[1])};
  for (int i = 0; i < 2; ++i) {
    const TowerPtr& bt = svals[i].tower();
    FieldElement v = bt->embed(c0) * uvals[i] * uvals[i] +
                     bt->embed(c1) * svals[i] * uvals[i] +
                     bt->embed(c2) * svals[i] * svals[i];
    need(v.is_zero(), "binary_roots: constructed root fails to vanish");
  }
  return out;
}

// ----------------------------------------------------------------- censuses

long Census::singular_count() const {
  long n = 0;
  for (const auto& [r, tr] : t) n += tr;
  return n;
}

long Census::pair_sum() const {
  long n = 0;
  for (const auto& [r, tr] : t) n += (long)r * (r - 1) / 2 * tr;
  return n;
}

bool census_identity_holds(const Census& c, int lines, int conics) {
  long l = lines, k = conics;
  long rhs = l * (l - 1) / 2 + 2 * k * l + 4 * (k * (k - 1) / 2);
  return c.pair_sum() == rhs;
}

Rat harbourne_index(int degree, const Census& c) {
  long count = c.singular_count();
  need(count > 0, "harbourne index of an empty census");
  Rat num = Rat(degree) * degree;
  for (const auto& [r, tr] : c.t) num -= Rat(r) * r * tr;
  for (const auto& [label, m] : c.infinitely_near) {
    (void)label;
    num -= Rat(m) * m;
  }
  return num / count;
}

Rat harbourne_index_conic_line(int lines, int conics, const Census& c) {
  need(c.infinitely_near.empty(),
       "conic-line index form assumes ordinary singularities");
  long count = c.singular_count();
  need(count > 0, "harbourne index of an empty census");
  Rat num = Rat(4) * conics + lines;
  for (const auto& [r, tr] : c.t) num -= Rat(r) * tr;
  return num / count;
}

ChernPair chern_slopes(int k, int d, const Census& c) {
  need(k >= 3, "chern slopes need at least 3 curves");
  need(c.infinitely_near.empty(), "chern slopes need ordinary singularities");
  for (const auto& [r, tr] : c.t)
    need(tr == 0 || r < k, "chern slopes: a point lies on all curves");
  ChernPair out;
  out.c1sq = Rat(9) + Rat((long)d * d - 6 * d) * k;
  out.c2 = Rat(3) + Rat((long)d * d - 3 * d) * k;
  for (const auto& [r, tr] : c.t) {
    out.c1sq += Rat(3 * r - 4) * tr;
    out.c2 += Rat(r - 1) * tr;
  }
  need(out.c2 != 0, "chern slopes: vanishing second Chern number");
  out.slope = out.c1sq / out.c2;
  return out;
}

FreenessReport tjurina_and_freeness(int total_degree, const Census& c) {
  need(c.infinitely_near.empty(),
       "Tjurina-from-census requires ordinary singularities");
  FreenessReport rep;
  for (const auto& [r, tr] : c.t) rep.tau += (long)(r - 1) * (r - 1) * tr;
  long dm1 = total_degree - 1;
  for (long r = 0; r <= dm1; ++r) {
    if (rep.tau == dm1 * dm1 - r * (dm1 - r)) rep.is_free = true;
    if (rep.tau == dm1 * dm1 - r * (dm1 - r) - 1) rep.is_nearly_free = true;
  }
  rep.disc_free = 4 * rep.tau - 3 * dm1 * dm1;
  rep.disc_nearly = 4 * (rep.tau + 1) - 3 * dm1 * dm1;
  Int ceil_part = ceil_div(Int(3) * dm1 * dm1, Int(4));
  rep.defect = ceil_part.get_si() - rep.tau;
  return rep;
}

InequalityReport conic_inequality_check(const Census& c, int l, int k) {
  InequalityReport rep;
  rep.hypothesis = true;
  for (const auto& [r, tr] : c.t)
    if (tr > 0 && 3 * r > 2 * (l + 2 * k)) rep.hypothesis = false;
  auto tr_of = [&](int r) -> long {
    auto it = c.t.find(r);
    return it == c.t.end() ? 0 : it->second;
  };
  rep.lhs = Rat(tr_of(2)) + Rat(3, 4) * tr_of(3) +
            Rat((long)4 * k + 2 * l - 4) * k;
  rep.rhs = Rat(l);
  for (const auto& [r, tr] : c.t)
    if (r >= 5) rep.rhs += (Rat((long)r * r) / 4 - r) * tr;
  rep.holds = rep.lhs >= rep.rhs;
  return rep;
}

// ------------------------------------------------------------------- polars

std::vector<ReduciblePolar> build_reducible_polars(
    const InvariantCatalogue& cat, const GroupTable& g,
    const std::vector<Homology>& homs, TowerRegistry& reg) {
  need(reg.base()->same(g.tower), "registry must sit over the group tower");
  MPoly phi4 = cat.phi4.embedded(g.tower);
  std::vector<ReduciblePolar> out;
  for (size_t i = 0; i < homs.size(); ++i) {
    ReduciblePolar rp;
    rp.involution_index = static_cast<int>(i);
    rp.center = homs[i].center;
    rp.axis = homs[i].axis;

    MPoly polar3 = polar(phi4, rp.center.x);
    need(polar3.degree() == 3, "polar is not a cubic");
    DivisionOutcome div = divide_exact(polar3, rp.axis);
    need(div.divisible, "polar is not divisible by the involution axis");
    rp.conic = div.quotient;
    need(rp.conic.degree() == 2, "polar quotient is not a conic");

    rp.conic_det = conic_matrix_det(rp.conic);
    need(!rp.conic_det.is_zero(), "conic component of a polar is singular");

    rp.restriction = restrict_to_line(rp.conic, rp.axis);
    rp.restriction_disc = binary_discriminant(rp.restriction);
    need(!rp.restriction_disc.is_zero(),
         "line and conic of a polar are tangent");
    rp.nodes = binary_roots(rp.restriction, reg);

    for (const ProjPoint& q : rp.nodes) {
      need(value_at(cat.phi6, q).is_zero(), "node off the degree-6 invariant");
      need(value_at(cat.phi14, q).is_zero(),
           "node off the degree-14 invariant");
      need(value_at(cat.phi21, q).is_zero(),
           "node off the line arrangement");
      need(!value_at(cat.phi4, q).is_zero(), "node on the quartic");
    }
    out.push_back(std::move(rp));
  }
  need(out.size() == 21, "expected 21 reducible polars");
  return out;
}

// ------------------------------------------------------------------ pencils

namespace {

struct PencilSpec {
  ProjPoint rep;
  std::vector<MPoly> stated_lines;    // transcribed displayed forms
  std::vector<MPoly> stated_conics;   // transcribed displayed conic(s)
  // expected partner structure on transcribed indices (i -> j means the
  // pullback of line i splits off line j)
  std::vector<int> stated_partner;
  bool lines_sum_zero = false;  // displayed relation L1+L2+L3 = 0
};

PencilData build_pencil(const InvariantCatalogue& cat, const GroupTable& g,
                        const std::vector<Homology>& homs,
                        const std::vector<ReduciblePolar>& polars,
                        TowerRegistry& reg, const PencilSpec& spec) {
  PencilData out;
  out.rep = spec.rep;
  MPoly phi21 = cat.phi21.embedded(g.tower);

  for (size_t i = 0; i < homs.size(); ++i)
    if (value_at(homs[i].axis, spec.rep).is_zero())
      out.axis_index.push_back(static_cast<int>(i));
  size_t n = spec.stated_lines.size();
  need(out.axis_index.size() == n,
       "unexpected number of arrangement lines through the pencil point");
  for (int idx : out.axis_index) out.lines.push_back(homs[idx].axis);

  // The displayed line forms match the axes through the representative.
  std::vector<int> tline_to_pencil(n, -1);
  for (size_t t = 0; t < n; ++t) {
    const MPoly& L = spec.stated_lines[t];
    need(value_at(L, spec.rep).is_zero(),
         "displayed line misses the representative");
    need(divide_exact(phi21, L).divisible,
         "displayed line is not a component of the line arrangement");
    for (size_t i = 0; i < n; ++i)
      if (proportional(L, out.lines[i])) {
        need(tline_to_pencil[t] == -1, "displayed line matched twice");
        tline_to_pencil[t] = static_cast<int>(i);
      }
    need(tline_to_pencil[t] >= 0, "displayed line not among the axes");
  }
  {
    std::set<int> seen(tline_to_pencil.begin(), tline_to_pencil.end());
    need(seen.size() == n, "displayed lines do not match the axes bijectively");
  }
  if (spec.lines_sum_zero) {
    MPoly s = MPoly::zero(spec.stated_lines[0].tower());
    for (const MPoly& L : spec.stated_lines) s += L;
    need(s.is_zero(), "displayed lines do not sum to zero");
  }

  // Pullback of each line under the gradient map: splits off one pencil
  // line; the quotient conic equals the conic of the corresponding polar.
  out.partner.assign(n, -1);
  for (size_t i = 0; i < n; ++i) {
    MPoly pull = pullback(cat.grad4, out.lines[i]);
    need(pull.degree() == 3, "line pullback is not a cubic");
    MPoly conic = MPoly::zero(g.tower);
    for (size_t j = 0; j < n; ++j) {
      DivisionOutcome d = divide_exact(pull, out.lines[j]);
      if (!d.divisible) continue;
      need(out.partner[i] == -1, "line pullback divisible by two lines");
      out.partner[i] = static_cast<int>(j);
      conic = d.quotient;
    }
    need(out.partner[i] >= 0, "line pullback has no line component in the pencil");
    out.conics.push_back(conic);

    // cross-check against the polar catalogue via the transpose duality:
    // the pullback of a line is the polar with respect to its dual point.
    const MPoly& split_line = out.lines[out.partner[i]];
    int polar_idx = -1;
    for (size_t k = 0; k < polars.size(); ++k)
      if (polars[k].axis == split_line) polar_idx = static_cast<int>(k);
    need(polar_idx >= 0, "no polar with the split-off axis");
    need(points_equal(polars[polar_idx].center, dual_point(out.lines[i])),
         "polar center is not the dual point of the pulled-back line");
    auto lam = proportional(conic, polars[polar_idx].conic);
    need(lam.has_value(), "pencil conic differs from the polar conic");
  }
  // partner structure is an involution matching the displayed pairing
  for (size_t i = 0; i < n; ++i)
    need(out.partner[out.partner[i]] == static_cast<int>(i),
         "line pairing is not an involution");
  for (size_t t = 0; t < n; ++t)
    need(out.partner[tline_to_pencil[t]] ==
             tline_to_pencil[spec.stated_partner[t]],
         "line pairing does not match the displayed pairing");

  // none of the pencil conics passes through the representative
  for (const MPoly& c : out.conics)
    need(!value_at(c, spec.rep).is_zero(),
         "a pencil conic passes through the representative");

  // displayed conics match computed ones (any position; the pairing with
  // the displayed lines is recorded by transcription_match)
  out.transcription_match = true;
  for (const MPoly& pc : spec.stated_conics) {
    bool found = false;
    for (const MPoly& c : out.conics)
      if (proportional(pc, c)) found = true;
    if (!found) out.transcription_match = false;
  }

  // base points: on each line, the conics not paired with it cut out the
  // same two points, transversely, and those map to the representative
  for (size_t i = 0; i < n; ++i) {
    std::vector<int> others, paired;
    for (size_t c = 0; c < n; ++c) {
      if (out.partner[c] == static_cast<int>(i))
        paired.push_back(static_cast<int>(c));
      else
        others.push_back(static_cast<int>(c));
    }
    need(paired.size() == 1, "expected exactly one conic paired with a line");
    need(others.size() == n - 1, "conic bookkeeping failed");

    std::vector<BinaryForm> rs;
    for (int c : others) rs.push_back(restrict_to_line(out.conics[c], out.lines[i]));
    for (size_t a = 1; a < rs.size(); ++a)
      need(proportional_binary(rs[0], rs[a]).has_value(),
           "unpaired conics cut the line in different divisors");
    need(!binary_discriminant(rs[0]).is_zero(),
         "unpaired conic is tangent to the line");

    // the paired conic's divisor on the line is the polar's node divisor
    int polar_idx = -1;
    for (size_t k = 0; k < polars.size(); ++k)
      if (polars[k].axis == out.lines[i]) polar_idx = static_cast<int>(k);
    need(polar_idx >= 0, "no polar with this axis");
    BinaryForm paired_r =
        restrict_to_line(out.conics[paired[0]], out.lines[i]);
    need(proportional_binary(paired_r, polars[polar_idx].restriction)
             .has_value(),
         "paired conic does not cut out the polar nodes");

    auto roots = binary_roots(rs[0], reg);
    for (const ProjPoint& q : roots) {
      need(points_equal(grad_image(cat, q), spec.rep),
           "base point does not map to the representative");
      for (int c : others)
        need(value_at(out.conics[c], q).is_zero(),
             "base point misses an unpaired conic");
      need(!value_at(out.conics[paired[0]], q).is_zero(),
           "base point lies on the paired conic");
      for (size_t j = 0; j < n; ++j)
        if (j != i)
          need(!value_at(out.lines[j], q).is_zero(),
               "base point lies on a second pencil line");
      out.new_points.push_back(q);
    }
  }
  need(out.new_points.size() == 2 * n, "expected two base points per line");
  return out;
}

void collect_orbit_pair(const GroupTable& g, const PencilData& pencil,
                        std::vector<ProjPoint>* orbA,
                        std::vector<ProjPoint>* orbB) {
  *orbA = orbit(g, pencil.new_points[0]);
  need(orbA->size() == 84, "pencil base orbit has unexpected size");
  PointIndex both;
  for (const auto& p : *orbA) need(both.insert(p, "a"), "orbit self-collision");
  const ProjPoint* seedB = nullptr;
  for (const auto& p : pencil.new_points)
    if (!both.contains(p)) {
      seedB = &p;
      break;
    }
  need(seedB != nullptr, "all pencil base points lie in one orbit");
  *orbB = orbit(g, *seedB);
  need(orbB->size() == 84, "pencil base orbit has unexpected size");
  for (const auto& p : *orbB)
    need(both.insert(p, "b"), "the two base orbits intersect");
  for (const auto& p : pencil.new_points)
    need(both.contains(p), "a base point escapes the two orbits");
}

}  // namespace

// ---------------------------------------------------------------- the model

ArrangementModel build_arrangement() {
  ArrangementModel m;
  m.cat = build_catalogue();
  m.group = build_group();
  m.homs = involutions(m.group);
  m.registry = std::make_shared<TowerRegistry>(m.group.tower, "t");
  m.polars =
      build_reducible_polars(m.cat, m.group, m.homs, *m.registry);

  // ---- the 42 polar nodes: distinct, one orbit, off the quartic ----
  PointIndex node_index;
  std::vector<ProjPoint> nodes;
  for (const auto& rp : m.polars)
    for (const auto& q : rp.nodes) {
      need(node_index.insert(q, "node"), "two polars share a node");
      nodes.push_back(q);
    }
  need(node_index.size() == 42, "expected 42 distinct nodes");
  {
    auto orb = orbit(m.group, nodes[0]);
    need(orb.size() == 42, "node orbit has unexpected size");
    for (const auto& q : orb)
      need(node_index.contains(q), "node orbit escapes the node set");
  }

  // ---- the full pullback and the conic arrangement equation ----
  m.phi63 = pullback(m.cat.grad4, m.cat.phi21);
  need(m.phi63.degree() == 63, "pullback of the line arrangement is wrong");
  DivisionOutcome d63 = divide_exact(m.phi63, m.cat.phi21);
  need(d63.divisible, "pullback is not divisible by the line arrangement");
  m.phi42 = d63.quotient;
  need(m.phi42.degree() == 42, "conic arrangement form has wrong degree");
  {
    MPoly prod = MPoly::constant(m.group.tower, 1);
    for (const auto& rp : m.polars) prod = prod * rp.conic;
    auto lam = proportional(prod, m.phi42.embedded(m.group.tower));
    need(lam.has_value(),
         "product of the 21 conics is not the degree-42 form");
    m.conic_product_scale = *lam;
  }
  {
    MPoly prod = MPoly::constant(m.group.tower, 1);
    for (const auto& rp : m.polars) prod = prod * rp.axis;
    auto lam = proportional(prod, m.cat.phi21.embedded(m.group.tower));
    need(lam.has_value(),
         "product of the 21 axes is not the degree-21 invariant");
    m.axis_product_scale = *lam;
  }

  // ---- the two pencils, with the displayed forms ----
  auto T = m.group.tower;
  auto P = [&](const std::string& s) { return parse_poly(T, s); };
  {
    PencilSpec spec;
    spec.rep = ProjPoint::of({T->one(), T->one(), T->one()});
    spec.stated_lines = {
        P("x+(z7^4+z7^3)*y-(z7^4+z7^3+1)*z"),
        P("-(z7^4+z7^3+1)*x+y+(z7^4+z7^3)*z"),
        P("(z7^4+z7^3)*x-(z7^4+z7^3+1)*y+z")};
    MPoly g1 = P(
        "(z7^4+z7^3)*x^2+(z7^5+z7^2)*(z7^5+z7^2+1)*x*y+(z7^5+z7^2)*y^2"
        "+(-z7^5-z7^2+1)*x*z+(-z7^4-z7^3+1)*y*z"
        "+(z7^5+z7^2)*(z7^4+z7^3-1)*z^2");
    std::array<MPoly, 3> cyc = {MPoly::variable(T, 1), MPoly::variable(T, 2),
                                MPoly::variable(T, 0)};
    MPoly g2 = g1.substitute(cyc);
    MPoly g3 = g2.substitute(cyc);
    spec.stated_conics = {g1, g2, g3};
    spec.stated_partner = {0, 1, 2};  // each line maps onto itself
    spec.lines_sum_zero = true;
    m.pencil28 = build_pencil(m.cat, m.group, m.homs, m.polars,
                              *m.registry, spec);
    need(points_equal(grad_image(m.cat, spec.rep), spec.rep),
         "the triple-point representative is not fixed by the gradient map");
    need(m.pencil28.transcription_match,
         "displayed conics at the triple point do not match");
  }
  {
    PencilSpec spec;
    spec.rep = ProjPoint::of({T->one(), parse_element(T, "z7^4+z7^3"),
                              parse_element(T, "-(z7^4+z7^3+1)")});
    spec.stated_lines = {
        P("x+(z7^5+z7)*y+(z7^5+z7^4+z7^2+1)*z"),
        P("x-(z7^5+z7^4+z7^3+z7+1)*y+(z7^5+z7^3+z7^2+1)*z"),
        P("x+(z7^5+1)*y-(z7^3+z7^2+z7)*z"),
        P("x+(z7^2+1)*y+(z7^3+z7^2+z7+1)*z")};
    spec.stated_conics = {
        P("(z7^5+z7)*x^2-(z7^4+z7^3-1)*x*y+(z7^5+z7^3)*y^2"
          "+(-z7^3+z7^2-z7)*x*z+(z7^6-z7^4-z7)*y*z+(z7^5+z7^4)*z^2")};
    spec.stated_partner = {1, 0, 3, 2};  // exchanged in pairs
    m.pencil21 = build_pencil(m.cat, m.group, m.homs, m.polars,
                              *m.registry, spec);
    need(m.pencil21.transcription_match,
         "displayed conic at the quadruple point does not match");
    bool is_center = false;
    for (const auto& h : m.homs)
      if (points_equal(spec.rep, h.center)) is_center = true;
    need(is_center, "quadruple-point representative is not a center");
    need(points_equal(grad_image(m.cat, spec.rep), spec.rep),
         "the quadruple-point representative is not fixed by the gradient map");
  }

  // ---- special orbits ----
  std::vector<ProjPoint> o21;
  for (const auto& h : m.homs) o21.push_back(h.center);
  {
    MPoly st = steinerian_combination(m.cat);
    for (const auto& p : o21)
      need(value_at(st, p).is_zero(),
           "a center misses the degenerate-polar locus");
    need(!value_at(st, m.pencil28.rep).is_zero(),
         "the triple-point representative lies on the degenerate-polar locus");
  }
  std::vector<ProjPoint> o28 =
      orbit(m.group, ProjPoint::of({T->one(), T->one(), T->one()}));
  need(o28.size() == 28, "triple-point orbit has unexpected size");

  TowerPtr comp = FieldTower::extend(T, "w", {T->one(), T->one()});
  FieldElement w = comp->generator("w");
  std::vector<ProjPoint> o56 =
      orbit(m.group, ProjPoint::of({w * w, w, comp->one()}));
  need(o56.size() == 56, "bitangency orbit has unexpected size");

  // each conic passes through 8 bitangency points; 3 conics through each
  std::vector<int> per_conic(m.polars.size(), 0);
  for (const auto& p : o56) {
    int through = 0;
    for (size_t k = 0; k < m.polars.size(); ++k)
      if (value_at(m.polars[k].conic, p).is_zero()) {
        ++through;
        ++per_conic[k];
      }
    need(through == 3, "bitangency point is not on exactly 3 conics");
  }
  for (int c : per_conic)
    need(c == 8, "conic does not carry exactly 8 bitangency points");

  // gradient-map images of the special orbits
  {
    PointIndex idx21, idx28;
    for (const auto& p : o21) idx21.insert(p, "o21");
    for (const auto& p : o28) idx28.insert(p, "o28");
    for (const auto& p : o21)
      need(idx21.contains(grad_image(m.cat, p)),
           "gradient image of a center is not a center");
    for (const auto& p : o28)
      need(idx28.contains(grad_image(m.cat, p)),
           "gradient image of the triple-point orbit escapes it");
    for (const auto& p : o56)
      need(idx28.contains(grad_image(m.cat, p)),
           "gradient image of a bitangency point is not a triple point");
  }

  // ---- the four 84-point orbits ----
  std::vector<ProjPoint> t84a, t84b, q84a, q84b;
  collect_orbit_pair(m.group, m.pencil28, &t84a, &t84b);
  collect_orbit_pair(m.group, m.pencil21, &q84a, &q84b);

  // ---- assemble and verify the 483 singular points ----
  auto add_points = [&](const std::vector<ProjPoint>& pts, PointClass cls) {
    for (const auto& p : pts) {
      CensusPoint cp;
      cp.p = p;
      cp.cls = cls;
      m.points.push_back(cp);
    }
  };
  add_points(nodes, PointClass::Node42);
  add_points(o28, PointClass::Triple28);
  add_points(o56, PointClass::Triple56);
  add_points(t84a, PointClass::Triple84);
  add_points(t84b, PointClass::Triple84);
  add_points(o21, PointClass::Quad21);
  add_points(q84a, PointClass::Quad84);
  add_points(q84b, PointClass::Quad84);

  PointIndex all;
  for (const auto& cp : m.points)
    need(all.insert(cp.p, point_class_name(cp.cls)),
         "two census points coincide");
  need(all.size() == 483, "census does not have 483 points");

  for (auto& cp : m.points) {
    std::vector<const MPoly*> incident;
    for (const auto& rp : m.polars) {
      if (value_at(rp.axis, cp.p).is_zero()) {
        ++cp.lines_through;
        incident.push_back(&rp.axis);
      }
      if (value_at(rp.conic, cp.p).is_zero()) {
        ++cp.conics_through;
        incident.push_back(&rp.conic);
      }
    }
    int el = 0, ec = 0;
    switch (cp.cls) {
      case PointClass::Node42: el = 1; ec = 1; break;
      case PointClass::Triple28: el = 3; ec = 0; break;
      case PointClass::Triple56: el = 0; ec = 3; break;
      case PointClass::Triple84: el = 1; ec = 2; break;
      case PointClass::Quad21: el = 4; ec = 0; break;
      case PointClass::Quad84: el = 1; ec = 3; break;
    }
    need(cp.lines_through == el && cp.conics_through == ec,
         "incidence pattern violates the class of " + cp.p.str());
    cp.ordinary = is_ordinary(incident, cp.p).ordinary;
    need(cp.ordinary, "non-ordinary singular point " + cp.p.str());

    int mult = cp.lines_through + cp.conics_through;
    m.census_K.t[mult]++;
    if (cp.lines_through >= 2) m.census_K1.t[cp.lines_through]++;
    if (cp.conics_through >= 2) m.census_K2.t[cp.conics_through]++;
  }

  // applying a group element permutes the components
  for (int idx : {1, 50}) {
    const ProjMatrix& M = m.group.elems[idx];
    std::array<MPoly, 3> rows;
    for (int r = 0; r < 3; ++r) {
      MPoly li = MPoly::zero(T);
      for (int c = 0; c < 3; ++c) li += MPoly::variable(T, c) * M.at(r, c);
      rows[r] = li;
    }
    for (const auto& rp : m.polars) {
      MPoly ax = rp.axis.substitute(rows);
      MPoly cn = rp.conic.substitute(rows);
      bool ax_found = false, cn_found = false;
      for (const auto& other : m.polars) {
        if (proportional(ax, other.axis)) ax_found = true;
        if (proportional(cn, other.conic)) cn_found = true;
      }
      need(ax_found && cn_found,
           "group element does not permute the components");
    }
  }

  return m;
}

std::string point_class_name(PointClass c) {
  switch (c) {
    case PointClass::Node42: return "node-pair-orbit";
    case PointClass::Triple28: return "triple-3lines";
    case PointClass::Triple56: return "triple-3conics";
    case PointClass::Triple84: return "triple-line-2conics";
    case PointClass::Quad21: return "quad-4lines";
    case PointClass::Quad84: return "quad-line-3conics";
  }
  return "?";
}

IncidenceCounts incidence_counts(const ArrangementModel& m) {
  IncidenceCounts out;
  for (const auto& rp : m.polars) {
    int quads = 0, triples = 0;
    for (const auto& cp : m.points) {
      if (cp.cls != PointClass::Quad21 && cp.cls != PointClass::Triple28)
        continue;
      if (value_at(rp.axis, cp.p).is_zero())
        (cp.cls == PointClass::Quad21 ? quads : triples)++;
    }
    out.quad_points_per_line.push_back(quads);
    out.triple_points_per_line.push_back(triples);
  }
  return out;
}

IterationReport iterate_pullback(const ArrangementModel& m) {
  IterationReport rep;
  rep.phi126 = pullback(m.cat.grad4, m.phi42);
  need(rep.phi126.degree() == 126, "second-level conic pullback degree");
  rep.phi189 = pullback(m.cat.grad4, m.phi63);
  need(rep.phi189.degree() == 189, "second-level arrangement pullback degree");

  DivisionOutcome d1 = divide_exact(rep.phi189, m.cat.phi21);
  need(d1.divisible, "degree-189 form not divisible by the lines");
  DivisionOutcome d2 = divide_exact(d1.quotient, m.phi42);
  need(d2.divisible, "degree-189 form not divisible by the conics");
  rep.division_chain_ok = d2.quotient == rep.phi126;
  need(rep.division_chain_ok, "division chain does not close");

  PointIndex node_index;
  std::vector<const ReduciblePolar*> node_polar;
  std::vector<ProjPoint> nodes;
  for (const auto& rp : m.polars)
    for (const auto& q : rp.nodes) {
      node_index.insert(q, "node");
      node_polar.push_back(&rp);
      nodes.push_back(q);
    }

  rep.nodes_map_into_nodes = true;
  rep.factors_vanish_at_nodes = true;
  rep.tangency_ok = true;
  std::array<MPoly, 3> grad126 = {rep.phi126.partial(0), rep.phi126.partial(1),
                                  rep.phi126.partial(2)};
  for (size_t i = 0; i < nodes.size(); ++i) {
    const ProjPoint& q = nodes[i];
    const ReduciblePolar& rp = *node_polar[i];
    if (!node_index.contains(grad_image(m.cat, q)))
      rep.nodes_map_into_nodes = false;
    if (!value_at(m.phi42, q).is_zero() ||
        !value_at(rep.phi126, q).is_zero() ||
        !value_at(m.cat.phi21, q).is_zero())
      rep.factors_vanish_at_nodes = false;

    std::array<FieldElement, 3> g126 = {value_at(grad126[0], q),
                                        value_at(grad126[1], q),
                                        value_at(grad126[2], q)};
    bool smooth = !(g126[0].is_zero() && g126[1].is_zero() &&
                    g126[2].is_zero());
    auto gc = gradient_at(rp.conic, q);
    auto ga = gradient_at(rp.axis, q);
    if (!smooth || !triples_proportional(g126, gc) ||
        triples_proportional(g126, ga))
      rep.tangency_ok = false;
  }
  need(rep.nodes_map_into_nodes, "gradient image of a node is not a node");
  need(rep.factors_vanish_at_nodes, "a factor misses a node");
  need(rep.tangency_ok, "tangency along the node orbit fails");

  rep.sample_node_multiplicity = multiplicity(rep.phi189, nodes[0]);
  return rep;
}

}  // namespace klein
