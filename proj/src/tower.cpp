#include "klein/tower.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace klein {

namespace {

bool block_zero(const Rat* a, int n) {
  for (int i = 0; i < n; ++i)
    if (a[i] != 0) return false;
  return true;
}

}  // namespace

// ---------------------------------------------------------------- FieldTower

TowerPtr FieldTower::rationals() {
  static TowerPtr q = [] {
    auto t = std::shared_ptr<FieldTower>(new FieldTower());
    t->dim_ = 1;
    return TowerPtr(t);
  }();
  return q;
}

TowerPtr FieldTower::extend(const TowerPtr& base, const std::string& gen,
                            const std::vector<FieldElement>& low_coeffs) {
  if (!base) throw error("extend: null base tower");
  const int deg = static_cast<int>(low_coeffs.size());
  if (deg < 2) throw error("extend: modulus degree must be at least 2");
  if (gen.empty() || gen == "x" || gen == "y" || gen == "z")
    throw error("extend: generator name reserved or empty: '" + gen + "'");
  if (base->has_generator(gen))
    throw error("extend: generator name already used in tower: " + gen);

  // Bring coefficients into the base tower (rationals coerce).
  std::vector<FieldElement> cs;
  cs.reserve(deg);
  for (const auto& c : low_coeffs) {
    if (c.tower()->same(base))
      cs.push_back(c);
    else if (c.tower()->dim() == 1)
      cs.push_back(base->embed(c));
    else
      throw error("extend: modulus coefficient lives in a different tower");
  }

  // Irreducibility for the shapes in scope.
  if (deg == 2) {
    FieldElement b = cs[1], c0 = cs[0];
    FieldElement disc = b * b - c0 * Rat(4);
    SquareDecision sd = decide_square(disc);
    if (sd.is_square) {
      FieldElement root = (sd.root - b) * Rat(1, 2);
      throw error("extend: reducible quadratic modulus, root = " + root.str());
    }
  } else if (deg == 6 && base->dim() == 1) {
    for (const auto& c : cs)
      if (!(c.is_rational() && c.rational_value() == 1))
        throw error("extend: degree-6 modulus supported only in cyclotomic "
                    "form 1+" + gen + "+...+" + gen + "^5+" + gen + "^6");
    // x^6+...+x+1 is the 7th cyclotomic polynomial, irreducible over Q.
  } else {
    throw error("extend: no irreducibility check for this modulus shape");
  }

  auto t = std::shared_ptr<FieldTower>(new FieldTower());
  t->prefix_ = base;
  t->levels_ = base->levels_;
  Level lvl;
  lvl.gen = gen;
  lvl.deg = deg;
  lvl.dim_below = base->dim_;
  for (const auto& c : cs) lvl.coeff.push_back(c.flat());
  t->levels_.push_back(std::move(lvl));
  t->dim_ = base->dim_ * deg;
  return TowerPtr(t);
}

bool FieldTower::same(const TowerPtr& o) const {
  if (!o) return false;
  if (o.get() == this) return true;
  if (o->dim_ != dim_ || o->levels_.size() != levels_.size()) return false;
  for (size_t i = 0; i < levels_.size(); ++i) {
    const Level& a = levels_[i];
    const Level& b = o->levels_[i];
    if (a.gen != b.gen || a.deg != b.deg || a.coeff != b.coeff) return false;
  }
  return true;
}

bool FieldTower::extends(const TowerPtr& o) const {
  if (!o) return false;
  if (o->levels_.size() > levels_.size()) return false;
  for (size_t i = 0; i < o->levels_.size(); ++i) {
    const Level& a = levels_[i];
    const Level& b = o->levels_[i];
    if (a.gen != b.gen || a.deg != b.deg || a.coeff != b.coeff) return false;
  }
  return true;
}

bool FieldTower::has_generator(const std::string& name) const {
  for (const auto& l : levels_)
    if (l.gen == name) return true;
  return false;
}

FieldElement FieldTower::zero() const {
  FieldElement e;
  e.tower_ = shared_from_this();
  e.c_.assign(dim_, Rat(0));
  return e;
}

FieldElement FieldTower::one() const { return constant(Rat(1)); }

FieldElement FieldTower::constant(const Rat& q) const {
  FieldElement e = zero();
  e.c_[0] = q;
  return e;
}

FieldElement FieldTower::from_flat(std::vector<Rat> flat) const {
  if (static_cast<int>(flat.size()) != dim_)
    throw error("from_flat: wrong coefficient count");
  FieldElement e;
  e.tower_ = shared_from_this();
  e.c_ = std::move(flat);
  return e;
}

FieldElement FieldTower::generator(int lvl) const {
  if (lvl < 0 || lvl >= depth()) throw error("generator: level out of range");
  FieldElement e = zero();
  e.c_[levels_[lvl].dim_below] = 1;
  return e;
}

FieldElement FieldTower::generator(const std::string& name) const {
  for (int i = 0; i < depth(); ++i)
    if (levels_[i].gen == name) return generator(i);
  throw error("generator: no generator named '" + name + "' in " +
              descriptor());
}

FieldElement FieldTower::embed(const FieldElement& x) const {
  if (!x.tower()) throw error("embed: uninitialized element");
  if (x.tower()->same(shared_from_this())) return x;
  if (!extends(x.tower()))
    throw error("embed: element tower " + x.tower()->descriptor() +
                " is not a prefix of " + descriptor());
  FieldElement e = zero();
  std::copy(x.flat().begin(), x.flat().end(), e.c_.begin());
  return e;
}

std::optional<FieldElement> FieldTower::descend(const FieldElement& x) const {
  if (!x.tower()->same(shared_from_this()))
    throw error("descend: element not in this tower");
  if (!prefix_) return std::nullopt;
  const int m = prefix_->dim();
  for (int i = m; i < dim_; ++i)
    if (x.flat()[i] != 0) return std::nullopt;
  std::vector<Rat> low(x.flat().begin(), x.flat().begin() + m);
  return prefix_->from_flat(std::move(low));
}

void FieldTower::mul_level(int lvl, const Rat* a, const Rat* b,
                           Rat* out) const {
  if (lvl == 0) {
    out[0] += a[0] * b[0];
    return;
  }
  const Level& L = levels_[lvl - 1];
  const int d = L.deg, m = L.dim_below;
  std::vector<Rat> tmp(static_cast<size_t>(2 * d - 1) * m, Rat(0));
  for (int i = 0; i < d; ++i) {
    if (block_zero(a + i * m, m)) continue;
    for (int j = 0; j < d; ++j) {
      if (block_zero(b + j * m, m)) continue;
      mul_level(lvl - 1, a + i * m, b + j * m, tmp.data() + (i + j) * m);
    }
  }
  std::vector<Rat> scratch(m);
  for (int e = 2 * d - 2; e >= d; --e) {
    Rat* top = tmp.data() + e * m;
    if (block_zero(top, m)) continue;
    for (int r = 0; r < d; ++r) {
      const std::vector<Rat>& cr = L.coeff[r];
      if (block_zero(cr.data(), m)) continue;
      std::fill(scratch.begin(), scratch.end(), Rat(0));
      mul_level(lvl - 1, top, cr.data(), scratch.data());
      Rat* dst = tmp.data() + (e - d + r) * m;
      for (int i = 0; i < m; ++i) dst[i] -= scratch[i];
    }
    for (int i = 0; i < m; ++i) top[i] = 0;
  }
  for (int i = 0; i < d * m; ++i) out[i] += tmp[i];
}

std::string FieldTower::descriptor() const {
  if (levels_.empty()) return "Q";
  std::string s = prefix_->descriptor();
  const Level& L = levels_.back();
  // Render the monic modulus in the generator variable.
  UniPoly mod;
  mod.base = prefix_;
  for (const auto& c : L.coeff) mod.c.push_back(prefix_->from_flat(c));
  mod.c.push_back(prefix_->one());
  mod.normalize();
  s += "[" + L.gen + "]/(" + mod.str(L.gen) + ")";
  return s;
}

// -------------------------------------------------------------- FieldElement

FieldElement::FieldElement() {
  tower_ = FieldTower::rationals();
  c_.assign(1, Rat(0));
}

bool FieldElement::is_zero() const {
  return block_zero(c_.data(), static_cast<int>(c_.size()));
}

bool FieldElement::is_rational() const {
  for (size_t i = 1; i < c_.size(); ++i)
    if (c_[i] != 0) return false;
  return true;
}

Rat FieldElement::rational_value() const {
  if (!is_rational()) throw error("rational_value of irrational element");
  return c_[0];
}

namespace {
// Returns (lhs_tower_element, rhs_tower_element) coerced to one tower, with
// only Q allowed to coerce upward.
std::pair<FieldElement, FieldElement> coerce(const FieldElement& a,
                                             const FieldElement& b) {
  if (a.tower()->same(b.tower())) return {a, b};
  if (a.tower()->dim() == 1) return {b.tower()->embed(a), b};
  if (b.tower()->dim() == 1) return {a, a.tower()->embed(b)};
  throw error("mixed towers: " + a.tower()->descriptor() + " vs " +
              b.tower()->descriptor());
}
}  // namespace

FieldElement FieldElement::operator-() const {
  FieldElement r = *this;
  for (auto& q : r.c_) q = -q;
  return r;
}

FieldElement FieldElement::operator+(const FieldElement& o) const {
  auto [a, b] = coerce(*this, o);
  for (size_t i = 0; i < a.c_.size(); ++i) a.c_[i] += b.c_[i];
  return a;
}

FieldElement FieldElement::operator-(const FieldElement& o) const {
  auto [a, b] = coerce(*this, o);
  for (size_t i = 0; i < a.c_.size(); ++i) a.c_[i] -= b.c_[i];
  return a;
}

FieldElement FieldElement::operator*(const FieldElement& o) const {
  auto [a, b] = coerce(*this, o);
  FieldElement out = a.tower_->zero();
  if (a.is_zero() || b.is_zero()) return out;
  a.tower_->mul_level(a.tower_->depth(), a.c_.data(), b.c_.data(),
                      out.c_.data());
  return out;
}

FieldElement& FieldElement::operator+=(const FieldElement& o) {
  *this = *this + o;
  return *this;
}
FieldElement& FieldElement::operator-=(const FieldElement& o) {
  *this = *this - o;
  return *this;
}
FieldElement& FieldElement::operator*=(const FieldElement& o) {
  *this = *this * o;
  return *this;
}

FieldElement FieldElement::operator*(const Rat& s) const {
  FieldElement r = *this;
  for (auto& q : r.c_) q *= s;
  return r;
}

FieldElement FieldElement::operator/(const FieldElement& o) const {
  return *this * o.inverse();
}

FieldElement FieldElement::inverse() const {
  if (is_zero()) throw error("inverse of zero");
  if (tower_->dim() == 1) return tower_->constant(1 / c_[0]);

  // Extended Euclid against the top-level modulus, coefficients in the
  // prefix tower.
  const TowerPtr& pre = tower_->prefix();
  const FieldTower::Level& L = tower_->levels().back();
  const int m = L.dim_below;
  UniPoly a;
  a.base = pre;
  for (int j = 0; j < L.deg; ++j) {
    std::vector<Rat> blk(c_.begin() + j * m, c_.begin() + (j + 1) * m);
    a.c.push_back(pre->from_flat(std::move(blk)));
  }
  a.normalize();
  UniPoly mod;
  mod.base = pre;
  for (const auto& c : L.coeff) mod.c.push_back(pre->from_flat(c));
  mod.c.push_back(pre->one());
  UniPoly g, u, v;
  uni_ext_gcd(a, mod, &g, &u, &v);
  if (g.deg() != 0)
    throw error("inverse: gcd with modulus not constant (reducible tower?)");
  // u*a + v*mod = g = 1 (monic constant), so a^{-1} = u mod modulus.
  UniPoly q, r;
  uni_divmod(u, mod, &q, &r);
  FieldElement out = tower_->zero();
  for (int j = 0; j <= r.deg(); ++j) {
    const auto& blk = r.c[j].flat();
    std::copy(blk.begin(), blk.end(), out.c_.begin() + j * m);
  }
  return out;
}

FieldElement FieldElement::pow(long e) const {
  if (e == 0) {
    return tower_->one();
  }
  FieldElement base = e < 0 ? inverse() : *this;
  unsigned long n = static_cast<unsigned long>(e < 0 ? -e : e);
  FieldElement acc = tower_->one();
  while (n) {
    if (n & 1) acc *= base;
    base *= base;
    n >>= 1;
  }
  return acc;
}

bool FieldElement::operator==(const FieldElement& o) const {
  auto [a, b] = coerce(*this, o);
  return a.c_ == b.c_;
}

int FieldElement::cmp_key(const FieldElement& a, const FieldElement& b) {
  if (!a.tower()->same(b.tower())) throw error("cmp_key: mixed towers");
  for (size_t i = 0; i < a.c_.size(); ++i) {
    int c = mpq_cmp(a.c_[i].get_mpq_t(), b.c_[i].get_mpq_t());
    if (c != 0) return c < 0 ? -1 : 1;
  }
  return 0;
}

namespace {

bool level_block_rational(const Rat* blk, int m) {
  for (int i = 1; i < m; ++i)
    if (blk[i] != 0) return false;
  return true;
}

// Formats the element of the sub-tower consisting of the first `lvl` levels.
std::string format_level(const FieldTower& t, int lvl, const Rat* blk) {
  if (lvl == 0) return rat_str(blk[0]);
  const FieldTower::Level& L = t.levels()[lvl - 1];
  const int d = L.deg, m = L.dim_below;
  std::vector<std::string> terms;
  for (int e = d - 1; e >= 0; --e) {
    const Rat* cb = blk + e * m;
    if (block_zero(cb, m)) continue;
    std::string piece;
    if (e == 0) {
      piece = format_level(t, lvl - 1, cb);
    } else {
      std::string powstr = L.gen + (e == 1 ? "" : "^" + std::to_string(e));
      if (level_block_rational(cb, m)) {
        const Rat& q = cb[0];
        if (q == 1)
          piece = powstr;
        else if (q == -1)
          piece = "-" + powstr;
        else
          piece = rat_str(q) + "*" + powstr;
      } else {
        piece = "(" + format_level(t, lvl - 1, cb) + ")*" + powstr;
      }
    }
    terms.push_back(piece);
  }
  if (terms.empty()) return "0";
  std::string out;
  for (const auto& p : terms) {
    if (!out.empty() && p[0] != '-') out += "+";
    out += p;
  }
  return out;
}

}  // namespace

std::string FieldElement::str() const {
  return format_level(*tower_, tower_->depth(), c_.data());
}

// ------------------------------------------------------------------- UniPoly

void UniPoly::normalize() {
  while (!c.empty() && c.back().is_zero()) c.pop_back();
}

UniPoly UniPoly::from_coeffs(const TowerPtr& t, std::vector<FieldElement> cs) {
  UniPoly p;
  p.base = t;
  for (auto& e : cs) {
    if (!e.tower()->same(t)) e = t->embed(e);
    p.c.push_back(std::move(e));
  }
  p.normalize();
  return p;
}

FieldElement UniPoly::eval(const FieldElement& x) const {
  FieldElement acc = base->zero();
  for (int i = deg(); i >= 0; --i) acc = acc * x + c[i];
  return acc;
}

std::string UniPoly::str(const std::string& var) const {
  if (is_zero()) return "0";
  std::string out;
  for (int e = deg(); e >= 0; --e) {
    if (c[e].is_zero()) continue;
    std::string piece;
    if (e == 0) {
      piece = c[e].str();
    } else {
      std::string powstr = var + (e == 1 ? "" : "^" + std::to_string(e));
      if (c[e].is_rational()) {
        Rat q = c[e].rational_value();
        if (q == 1)
          piece = powstr;
        else if (q == -1)
          piece = "-" + powstr;
        else
          piece = rat_str(q) + "*" + powstr;
      } else {
        piece = "(" + c[e].str() + ")*" + powstr;
      }
    }
    if (!out.empty() && piece[0] != '-') out += "+";
    out += piece;
  }
  return out;
}

UniPoly uni_add(const UniPoly& a, const UniPoly& b) {
  UniPoly r;
  r.base = a.base;
  r.c.resize(std::max(a.c.size(), b.c.size()), a.base->zero());
  for (size_t i = 0; i < a.c.size(); ++i) r.c[i] = a.c[i];
  for (size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i];
  r.normalize();
  return r;
}

UniPoly uni_sub(const UniPoly& a, const UniPoly& b) {
  UniPoly r;
  r.base = a.base;
  r.c.resize(std::max(a.c.size(), b.c.size()), a.base->zero());
  for (size_t i = 0; i < a.c.size(); ++i) r.c[i] = a.c[i];
  for (size_t i = 0; i < b.c.size(); ++i) r.c[i] -= b.c[i];
  r.normalize();
  return r;
}

UniPoly uni_mul(const UniPoly& a, const UniPoly& b) {
  UniPoly r;
  r.base = a.base;
  if (a.is_zero() || b.is_zero()) return r;
  r.c.assign(a.c.size() + b.c.size() - 1, a.base->zero());
  for (size_t i = 0; i < a.c.size(); ++i) {
    if (a.c[i].is_zero()) continue;
    for (size_t j = 0; j < b.c.size(); ++j) {
      if (b.c[j].is_zero()) continue;
      r.c[i + j] += a.c[i] * b.c[j];
    }
  }
  r.normalize();
  return r;
}

UniPoly uni_scale(const UniPoly& a, const FieldElement& s) {
  UniPoly r = a;
  for (auto& e : r.c) e *= s;
  r.normalize();
  return r;
}

void uni_divmod(const UniPoly& a, const UniPoly& b, UniPoly* q, UniPoly* r) {
  if (b.is_zero()) throw error("uni_divmod: division by zero polynomial");
  UniPoly rem = a;
  UniPoly quo = UniPoly::zero(a.base);
  quo.c.assign(std::max<int>(0, a.deg() - b.deg() + 1), a.base->zero());
  FieldElement lead_inv = b.c.back().inverse();
  while (!rem.is_zero() && rem.deg() >= b.deg()) {
    int shift = rem.deg() - b.deg();
    FieldElement f = rem.c.back() * lead_inv;
    quo.c[shift] = f;
    for (int i = 0; i <= b.deg(); ++i) rem.c[shift + i] -= f * b.c[i];
    rem.normalize();
  }
  quo.normalize();
  if (q) *q = std::move(quo);
  if (r) *r = std::move(rem);
}

UniPoly uni_derivative(const UniPoly& a) {
  UniPoly r;
  r.base = a.base;
  for (int i = 1; i <= a.deg(); ++i) r.c.push_back(a.c[i] * Rat(i));
  r.normalize();
  return r;
}

UniPoly uni_gcd(UniPoly a, UniPoly b) {
  while (!b.is_zero()) {
    UniPoly r;
    uni_divmod(a, b, nullptr, &r);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.is_zero()) a = uni_scale(a, a.c.back().inverse());
  return a;
}

void uni_ext_gcd(const UniPoly& a, const UniPoly& b, UniPoly* g, UniPoly* u,
                 UniPoly* v) {
  UniPoly r0 = a, r1 = b;
  UniPoly s0 = UniPoly::from_coeffs(a.base, {a.base->one()});
  UniPoly s1 = UniPoly::zero(a.base);
  UniPoly t0 = UniPoly::zero(a.base);
  UniPoly t1 = UniPoly::from_coeffs(a.base, {a.base->one()});
  while (!r1.is_zero()) {
    UniPoly q, r;
    uni_divmod(r0, r1, &q, &r);
    r0 = std::move(r1);
    r1 = std::move(r);
    UniPoly s2 = uni_sub(s0, uni_mul(q, s1));
    s0 = std::move(s1);
    s1 = std::move(s2);
    UniPoly t2 = uni_sub(t0, uni_mul(q, t1));
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (!r0.is_zero()) {
    FieldElement inv = r0.c.back().inverse();
    r0 = uni_scale(r0, inv);
    s0 = uni_scale(s0, inv);
    t0 = uni_scale(t0, inv);
  }
  if (g) *g = std::move(r0);
  if (u) *u = std::move(s0);
  if (v) *v = std::move(t0);
}

// -------------------------------------------------------------- TowerRegistry

TowerRegistry::TowerRegistry(TowerPtr base, std::string gen_prefix)
    : base_(std::move(base)), gen_prefix_(std::move(gen_prefix)) {}

TowerRegistry::SqrtHandle TowerRegistry::sqrt(const FieldElement& c_in) {
  FieldElement c = base_->embed(c_in);
  if (c.is_zero()) return {base_, base_->zero()};
  SquareDecision sd = decide_square(c);
  if (sd.is_square) return {base_, sd.root};
  for (size_t k = 0; k < class_disc_.size(); ++k) {
    FieldElement ratio = c / class_disc_[k];
    SquareDecision sq = decide_square(ratio);
    if (sq.is_square) {
      const TowerPtr& T = towers_[k];
      FieldElement root = T->embed(sq.root) * T->generator(T->depth() - 1);
      if (!(root * root == T->embed(c)))
        throw error("registry sqrt: verification failed");
      return {T, root};
    }
  }
  std::string gen = gen_prefix_ + std::to_string(class_disc_.size() + 1);
  TowerPtr T = FieldTower::extend(base_, gen, {-c, base_->zero()});
  class_disc_.push_back(c);
  towers_.push_back(T);
  FieldElement root = T->generator(T->depth() - 1);
  if (!(root * root == T->embed(c)))
    throw error("registry sqrt: verification failed on new tower");
  return {T, root};
}

}  // namespace klein
