#include "klein/symmetry.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "klein/sha256.hpp"

namespace klein {

// ----------------------------------------------------------------- ProjPoint

ProjPoint ProjPoint::of(std::array<FieldElement, 3> coords) {
  const TowerPtr& t = coords[0].tower();
  for (int i = 1; i < 3; ++i)
    if (!coords[i].tower()->same(t))
      throw error("projective point: mixed coordinate towers");
  int piv = -1;
  for (int i = 0; i < 3; ++i)
    if (!coords[i].is_zero()) {
      piv = i;
      break;
    }
  if (piv < 0) throw error("projective point: all coordinates zero");
  FieldElement inv = coords[piv].inverse();
  for (int i = 0; i < 3; ++i) coords[i] = coords[i] * inv;
  ProjPoint p;
  p.x = std::move(coords);
  return p;
}

bool ProjPoint::same_as(const ProjPoint& o) const {
  for (int i = 0; i < 3; ++i)
    if (!(x[i] == o.x[i])) return false;
  return true;
}

std::string ProjPoint::str() const {
  return "[" + x[0].str() + " : " + x[1].str() + " : " + x[2].str() + "]";
}

std::string ProjPoint::key() const {
  return x[0].str() + "|" + x[1].str() + "|" + x[2].str();
}

ProjPoint minimal_form(const ProjPoint& p) {
  std::array<FieldElement, 3> cur = p.x;
  TowerPtr t = p.tower();
  while (t->depth() > 0) {
    std::array<FieldElement, 3> down;
    bool ok = true;
    for (int i = 0; i < 3 && ok; ++i) {
      auto d = t->descend(cur[i]);
      if (d)
        down[i] = *d;
      else
        ok = false;
    }
    if (!ok) break;
    cur = down;
    t = t->prefix();
  }
  ProjPoint q;
  q.x = cur;
  return q;
}

namespace {

// Discriminant of the top quadratic level and the data needed to express
// elements in "sqrt(disc)" coordinates: g = (delta - beta)/2, delta^2 = disc.
struct QuadTop {
  FieldElement beta, gamma, disc;  // over the prefix
};

QuadTop quad_top(const TowerPtr& t) {
  const auto& L = t->levels().back();
  if (L.deg != 2) throw error("quad_top: top level is not quadratic");
  const TowerPtr& pre = t->prefix();
  QuadTop q;
  q.gamma = pre->from_flat(L.coeff[0]);
  q.beta = pre->from_flat(L.coeff[1]);
  q.disc = q.beta * q.beta - q.gamma * Rat(4);
  return q;
}

// Splits a + b*g in the top level: returns (a, b) over the prefix.
std::pair<FieldElement, FieldElement> split_top(const FieldElement& x) {
  const TowerPtr& t = x.tower();
  const TowerPtr& pre = t->prefix();
  int m = pre->dim();
  std::vector<Rat> lo(x.flat().begin(), x.flat().begin() + m);
  std::vector<Rat> hi(x.flat().begin() + m, x.flat().end());
  return {pre->from_flat(std::move(lo)), pre->from_flat(std::move(hi))};
}

}  // namespace

std::optional<FieldElement> quadratic_unifier(const TowerPtr& into,
                                              const TowerPtr& from) {
  if (into->depth() < 1 || from->depth() < 1 ||
      into->levels().back().deg != 2 || from->levels().back().deg != 2 ||
      !into->prefix()->same(from->prefix()))
    throw error("quadratic_unifier: towers are not quadratic over one base");
  QuadTop qa = quad_top(into), qb = quad_top(from);
  FieldElement ratio = qb.disc / qa.disc;
  SquareDecision sd = decide_square(ratio);
  if (!sd.is_square) return std::nullopt;  // distinct fields over the base
  // delta_from -> s * delta_into, so g_from -> (s*(2*g+beta) - beta_from)/2.
  FieldElement g = into->generator(into->depth() - 1);
  return (into->embed(sd.root) * (g * Rat(2) + into->embed(qa.beta)) -
          into->embed(qb.beta)) *
         Rat(1, 2);
}

ProjPoint transport_quadratic(const ProjPoint& p, const TowerPtr& into,
                              const FieldElement& gen_image) {
  ProjPoint out;
  for (int i = 0; i < 3; ++i) {
    auto [u, v] = split_top(p.x[i]);
    out.x[i] = into->embed(u) + into->embed(v) * gen_image;
  }
  return out;  // normalization is preserved by the field map
}

bool points_equal(const ProjPoint& pa, const ProjPoint& pb) {
  ProjPoint a = minimal_form(pa), b = minimal_form(pb);
  const TowerPtr& ta = a.tower();
  const TowerPtr& tb = b.tower();
  if (ta->same(tb)) return a.same_as(b);
  if (ta->extends(tb)) {
    for (int i = 0; i < 3; ++i)
      if (!(a.x[i] == ta->embed(b.x[i]))) return false;
    return true;
  }
  if (tb->extends(ta)) {
    for (int i = 0; i < 3; ++i)
      if (!(b.x[i] == tb->embed(a.x[i]))) return false;
    return true;
  }
  if (ta->depth() >= 1 && tb->depth() >= 1 &&
      ta->levels().back().deg == 2 && tb->levels().back().deg == 2 &&
      ta->prefix()->same(tb->prefix())) {
    auto img = quadratic_unifier(ta, tb);
    if (!img) return false;
    return transport_quadratic(b, ta, *img).same_as(a);
  }
  throw error("points_equal: unsupported tower combination " +
              ta->descriptor() + " vs " + tb->descriptor());
}

// ---------------------------------------------------------------- ProjMatrix

ProjMatrix ProjMatrix::identity(const TowerPtr& t) {
  ProjMatrix r;
  for (int i = 0; i < 9; ++i) r.m[i] = t->zero();
  for (int i = 0; i < 3; ++i) r.at(i, i) = t->one();
  return r;
}

ProjMatrix ProjMatrix::from_rows(
    const std::array<std::array<FieldElement, 3>, 3>& rows) {
  ProjMatrix r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.at(i, j) = rows[i][j];
  return r;
}

ProjMatrix ProjMatrix::mul(const ProjMatrix& o) const {
  ProjMatrix r;
  const TowerPtr& t = tower();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      FieldElement acc = t->zero();
      for (int k = 0; k < 3; ++k) acc += at(i, k) * o.at(k, j);
      r.at(i, j) = acc;
    }
  return r;
}

ProjMatrix ProjMatrix::transpose() const {
  ProjMatrix r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.at(i, j) = at(j, i);
  return r;
}

FieldElement ProjMatrix::det() const {
  return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
         at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
         at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
}

ProjMatrix ProjMatrix::inverse() const {
  FieldElement d = det();
  if (d.is_zero()) throw error("matrix inverse: singular");
  FieldElement dinv = d.inverse();
  ProjMatrix r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
      int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
      // Adjugate: cofactor with transposed indices.
      r.at(j, i) = (at(i1, j1) * at(i2, j2) - at(i1, j2) * at(i2, j1)) * dinv;
    }
  return r;
}

ProjMatrix ProjMatrix::embedded(const TowerPtr& bigger) const {
  ProjMatrix r;
  for (int i = 0; i < 9; ++i) r.m[i] = bigger->embed(m[i]);
  return r;
}

std::array<FieldElement, 3> ProjMatrix::apply_coords(
    const std::array<FieldElement, 3>& v) const {
  std::array<FieldElement, 3> out;
  for (int i = 0; i < 3; ++i) {
    out[i] = at(i, 0) * v[0] + at(i, 1) * v[1] + at(i, 2) * v[2];
  }
  return out;
}

ProjPoint ProjMatrix::apply(const ProjPoint& p) const {
  const TowerPtr& pt = p.tower();
  if (pt->same(tower())) return ProjPoint::of(apply_coords(p.x));
  if (pt->extends(tower()))
    return ProjPoint::of(embedded(pt).apply_coords(p.x));
  if (tower()->extends(pt)) {
    std::array<FieldElement, 3> lifted;
    for (int i = 0; i < 3; ++i) lifted[i] = tower()->embed(p.x[i]);
    return ProjPoint::of(apply_coords(lifted));
  }
  throw error("matrix apply: incompatible towers");
}

bool ProjMatrix::equal(const ProjMatrix& o) const {
  for (int i = 0; i < 9; ++i)
    if (!(m[i] == o.m[i])) return false;
  return true;
}

std::string ProjMatrix::key() const {
  std::string s;
  for (int i = 0; i < 9; ++i) {
    s += m[i].str();
    s += i % 3 == 2 ? ';' : ',';
  }
  return s;
}

// ----------------------------------------------------------------- the group

GroupTable build_group() {
  auto Q = FieldTower::rationals();
  TowerPtr T =
      FieldTower::extend(Q, "z7", std::vector<FieldElement>(6, Q->one()));
  auto E = [&](const std::string& s) { return parse_element(T, s); };

  ProjMatrix g = ProjMatrix::identity(T);
  g.at(0, 0) = E("z7^4");
  g.at(1, 1) = E("z7^2");
  g.at(2, 2) = E("z7");

  ProjMatrix h;
  for (int i = 0; i < 9; ++i) h.m[i] = T->zero();
  h.at(0, 1) = T->one();
  h.at(1, 2) = T->one();
  h.at(2, 0) = T->one();

  // Circulant symmetric involution scaled by (2*z7^4+2*z7^2+2*z7+1)/7,
  // the inverse of the Gauss-sum square root of -7.
  FieldElement s = E("1/7*(2*z7^4+2*z7^2+2*z7+1)");
  FieldElement A = E("z7-z7^6"), B = E("z7^2-z7^5"), C = E("z7^4-z7^3");
  ProjMatrix i_mat = ProjMatrix::from_rows({{{A * s, B * s, C * s},
                                             {B * s, C * s, A * s},
                                             {C * s, A * s, B * s}}});

  for (const ProjMatrix* mm : {&g, &h, &i_mat})
    if (!(mm->det() == T->one()))
      throw error("group generators: determinant is not 1");
  if (!i_mat.mul(i_mat).equal(ProjMatrix::identity(T)))
    throw error("group generators: claimed involution does not square to 1");

  GroupTable table;
  table.tower = T;
  table.generators = {g, h, i_mat};

  std::map<std::string, int> seen;
  std::deque<ProjMatrix> work;
  std::vector<ProjMatrix> found;
  ProjMatrix id = ProjMatrix::identity(T);
  seen[id.key()] = 0;
  found.push_back(id);
  work.push_back(id);
  while (!work.empty()) {
    ProjMatrix cur = work.front();
    work.pop_front();
    for (const ProjMatrix* gen : {&g, &h, &i_mat}) {
      ProjMatrix nxt = cur.mul(*gen);
      std::string k = nxt.key();
      if (seen.emplace(k, 1).second) {
        found.push_back(nxt);
        work.push_back(nxt);
        if (found.size() > 1680)
          throw error("group closure runaway: more than 1680 elements");
      }
    }
  }

  if (found.size() != 168) {
    // Fall back to projective dedup (normalize first nonzero entry to 1)
    // and flag the table; downstream checks treat this as a warning state.
    std::set<std::string> proj;
    for (const auto& mtx : found) {
      ProjMatrix n = mtx;
      for (int i = 0; i < 9; ++i)
        if (!n.m[i].is_zero()) {
          FieldElement inv = n.m[i].inverse();
          for (int j = 0; j < 9; ++j) n.m[j] = n.m[j] * inv;
          break;
        }
      proj.insert(n.key());
    }
    table.exact_closure = false;
    if (proj.size() != 168)
      throw error("group closure: got " + std::to_string(found.size()) +
                  " exact / " + std::to_string(proj.size()) +
                  " projective elements, expected 168");
  }

  std::sort(found.begin(), found.end(),
            [](const ProjMatrix& a, const ProjMatrix& b) {
              return a.key() < b.key();
            });
  table.elems = std::move(found);
  return table;
}

int GroupTable::index_of(const ProjMatrix& m) const {
  for (size_t i = 0; i < elems.size(); ++i)
    if (elems[i].equal(m)) return static_cast<int>(i);
  return -1;
}

std::string GroupTable::dump() const {
  std::string s = "order: " + std::to_string(order()) + "\n";
  for (const auto& m : elems) s += m.key() + "\n";
  return s;
}

std::string GroupTable::content_hash() const {
  return Sha256::hash_hex(dump());
}

// --------------------------------------------------------------- involutions

std::vector<Homology> involutions(const GroupTable& g) {
  std::vector<Homology> out;
  ProjMatrix id = ProjMatrix::identity(g.tower);
  for (size_t idx = 0; idx < g.elems.size(); ++idx) {
    const ProjMatrix& a = g.elems[idx];
    if (a.equal(id)) continue;
    if (!a.mul(a).equal(id)) continue;

    Homology h;
    h.group_index = static_cast<int>(idx);
    h.alpha = a;

    // trace must be -1 for eigenvalues (1,-1,-1).
    FieldElement tr = a.at(0, 0) + a.at(1, 1) + a.at(2, 2);
    if (!(tr == g.tower->constant(-1)))
      throw error("involution with unexpected trace");

    ProjMatrix plus = a, minus = a;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        minus.at(i, j) = -a.at(i, j);
        if (i == j) {
          plus.at(i, j) += g.tower->one();
          minus.at(i, j) += g.tower->one();
        }
      }
    // rank(I+a) = 1: every 2x2 minor vanishes, some entry nonzero.
    bool any = false;
    for (int r0 = 0; r0 < 3; ++r0)
      for (int r1 = r0 + 1; r1 < 3; ++r1)
        for (int c0 = 0; c0 < 3; ++c0)
          for (int c1 = c0 + 1; c1 < 3; ++c1) {
            FieldElement minor = plus.at(r0, c0) * plus.at(r1, c1) -
                                 plus.at(r0, c1) * plus.at(r1, c0);
            if (!minor.is_zero())
              throw error("involution: I+alpha has rank > 1");
          }
    // rank(I-a) = 2: some 2x2 minor nonzero and det = 0.
    if (!minus.det().is_zero())
      throw error("involution: I-alpha has full rank");
    bool rank2 = false;
    for (int r0 = 0; r0 < 3 && !rank2; ++r0)
      for (int r1 = r0 + 1; r1 < 3 && !rank2; ++r1)
        for (int c0 = 0; c0 < 3 && !rank2; ++c0)
          for (int c1 = c0 + 1; c1 < 3 && !rank2; ++c1) {
            FieldElement minor = minus.at(r0, c0) * minus.at(r1, c1) -
                                 minus.at(r0, c1) * minus.at(r1, c0);
            if (!minor.is_zero()) rank2 = true;
          }
    if (!rank2) throw error("involution: I-alpha has rank < 2");

    // Center: a nonzero column of I+alpha.
    std::array<FieldElement, 3> col{g.tower->zero(), g.tower->zero(),
                                    g.tower->zero()};
    for (int c = 0; c < 3 && !any; ++c) {
      for (int r = 0; r < 3; ++r) col[r] = plus.at(r, c);
      if (!(col[0].is_zero() && col[1].is_zero() && col[2].is_zero()))
        any = true;
    }
    if (!any) throw error("involution: I+alpha vanished");
    h.center = ProjPoint::of(col);

    // Axis: a nonzero row of I+alpha as a linear form, normalized monic.
    std::array<FieldElement, 3> row{g.tower->zero(), g.tower->zero(),
                                    g.tower->zero()};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) row[c] = plus.at(r, c);
      if (!(row[0].is_zero() && row[1].is_zero() && row[2].is_zero())) break;
    }
    FieldElement lead = g.tower->zero();
    for (int c = 0; c < 3; ++c)
      if (!row[c].is_zero()) {
        lead = row[c];
        break;
      }
    FieldElement inv = lead.inverse();
    MPoly axis = MPoly::zero(g.tower);
    for (int c = 0; c < 3; ++c)
      axis += MPoly::variable(g.tower, c) * (row[c] * inv);
    h.axis = axis;

    // The homology fixes its center and maps the axis form to -itself.
    if (!a.apply(h.center).same_as(h.center))
      throw error("involution: center is not fixed");
    out.push_back(std::move(h));
  }
  return out;
}

std::vector<ProjPoint> orbit(const GroupTable& g, const ProjPoint& seed) {
  const TowerPtr& pt = seed.tower();
  TowerPtr t;
  if (pt->extends(g.tower))
    t = pt;
  else if (g.tower->extends(pt))
    t = g.tower;
  else
    throw error("orbit: point tower incompatible with group tower");
  ProjPoint base = ProjPoint::of({t->embed(seed.x[0]), t->embed(seed.x[1]),
                                  t->embed(seed.x[2])});
  std::set<std::string> seen;
  std::vector<ProjPoint> out;
  for (const auto& m : g.elems) {
    ProjPoint q = m.apply(base);
    if (seen.insert(q.key()).second) out.push_back(q);
  }
  return out;
}

InvarianceOutcome check_invariance(const MPoly& f, const ProjMatrix& M) {
  std::array<MPoly, 3> img;
  const TowerPtr& t = M.tower();
  for (int i = 0; i < 3; ++i) {
    MPoly li = MPoly::zero(t);
    for (int j = 0; j < 3; ++j) li += MPoly::variable(t, j) * M.at(i, j);
    img[i] = li;
  }
  MPoly composed = f.substitute(img);
  auto lam = proportional(composed, f.tower()->same(t) ? f : f.embedded(t));
  InvarianceOutcome out;
  if (lam) {
    out.invariant = true;
    out.factor = *lam;
  }
  return out;
}

std::string orbit_label_name(OrbitLabel l) {
  switch (l) {
    case OrbitLabel::O21: return "orbit21";
    case OrbitLabel::O24: return "orbit24";
    case OrbitLabel::O28: return "orbit28";
    case OrbitLabel::O42: return "orbit42";
    case OrbitLabel::O56: return "orbit56";
    case OrbitLabel::OnCurve84: return "orbit84-on-curve";
    case OrbitLabel::Generic168: return "orbit168";
    case OrbitLabel::Unclassified: return "unclassified";
  }
  return "unclassified";
}

Classification classify_point(const ProjPoint& p, const InvariantCatalogue& cat,
                              const GroupTable& g) {
  Classification out;
  bool z4 = cat.phi4.evaluate(p.x).is_zero();
  bool z6 = cat.phi6.evaluate(p.x).is_zero();
  bool z14 = cat.phi14.evaluate(p.x).is_zero();
  bool z21 = cat.phi21.evaluate(p.x).is_zero();
  out.vanishing = {z4, z6, z14, z21};

  auto orbit_size = [&]() -> int {
    const TowerPtr& pt = p.tower();
    if (!(pt->extends(g.tower) || g.tower->extends(pt))) return -1;
    return static_cast<int>(orbit(g, p).size());
  };

  if (z4 && z6) {
    if (!z14 && !z21) {
      out.label = OrbitLabel::O24;
    } else {
      out.reason = "vanishing signature outside the catalogued patterns";
    }
    return out;
  }
  if (z4 && z14) {
    if (!z6 && !z21) {
      out.label = OrbitLabel::O56;
    } else {
      out.reason = "vanishing signature outside the catalogued patterns";
    }
    return out;
  }
  if (z6 && z14 && z21 && !z4) {
    out.label = OrbitLabel::O42;
    return out;
  }
  if (z21 && !z4 && !z6 && !z14) {
    int n = orbit_size();
    if (n == 21)
      out.label = OrbitLabel::O21;
    else if (n == 28)
      out.label = OrbitLabel::O28;
    else if (n == 84)
      out.label = OrbitLabel::OnCurve84;
    else
      out.reason = n < 0 ? "orbit not computable in the point's tower"
                         : "unexpected orbit size " + std::to_string(n);
    return out;
  }
  if (!z4 && !z6 && !z14 && !z21) {
    int n = orbit_size();
    if (n == 168)
      out.label = OrbitLabel::Generic168;
    else
      out.reason = n < 0 ? "orbit not computable in the point's tower"
                         : "unexpected orbit size " + std::to_string(n);
    return out;
  }
  out.reason = "vanishing signature outside the catalogued patterns";
  return out;
}

// ------------------------------------------------------- point collections

FieldElement value_at(const MPoly& f, const ProjPoint& p) {
  const TowerPtr& ft = f.tower();
  const TowerPtr& pt = p.tower();
  if (pt->extends(ft)) return f.evaluate(p.x);
  if (ft->extends(pt))
    return f.evaluate(
        {ft->embed(p.x[0]), ft->embed(p.x[1]), ft->embed(p.x[2])});
  throw error("value_at: incompatible towers " + ft->descriptor() + " / " +
              pt->descriptor());
}

bool PointIndex::insert(const ProjPoint& p, const std::string& label) {
  ProjPoint q = minimal_form(p);
  if (find(q)) return false;
  Group* g = group_for(q.tower());
  g->keys.emplace(q.key(), label);
  ++total_;
  return true;
}

bool PointIndex::contains(const ProjPoint& p) const {
  return find(minimal_form(p)) != nullptr;
}

PointIndex::Group* PointIndex::group_for(const TowerPtr& t) {
  for (auto& g : groups_)
    if (g.tower->same(t)) return &g;
  groups_.push_back(Group{t, {}});
  return &groups_.back();
}

bool PointIndex::quadratic_over_same_base(const TowerPtr& a,
                                          const TowerPtr& b) {
  return a->depth() >= 1 && b->depth() >= 1 && a->levels().back().deg == 2 &&
         b->levels().back().deg == 2 && a->prefix()->same(b->prefix());
}

const std::string* PointIndex::find(const ProjPoint& q) const {
  const TowerPtr& tq = q.tower();
  for (const auto& g : groups_) {
    if (g.tower->same(tq)) {
      auto it = g.keys.find(q.key());
      if (it != g.keys.end()) return &it->second;
      continue;
    }
    if (g.tower->extends(tq)) {
      ProjPoint lifted;
      for (int i = 0; i < 3; ++i) lifted.x[i] = g.tower->embed(q.x[i]);
      auto it = g.keys.find(lifted.key());
      if (it != g.keys.end()) return &it->second;
      continue;
    }
    if (tq->extends(g.tower)) continue;  // q needs a strictly larger field
    if (quadratic_over_same_base(g.tower, tq)) {
      auto key = std::make_pair(g.tower->descriptor(), tq->descriptor());
      auto it = unifiers_.find(key);
      if (it == unifiers_.end())
        it = unifiers_.emplace(key, quadratic_unifier(g.tower, tq)).first;
      if (!it->second) continue;  // different square class
      ProjPoint moved = transport_quadratic(q, g.tower, *it->second);
      auto hit = g.keys.find(moved.key());
      if (hit != g.keys.end()) return &hit->second;
      continue;
    }
    throw error("point index: unsupported tower combination " +
                g.tower->descriptor() + " / " + tq->descriptor());
  }
  return nullptr;
}

}  // namespace klein
