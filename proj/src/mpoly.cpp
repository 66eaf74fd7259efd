#include "klein/mpoly.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "klein/sha256.hpp"

namespace klein {

int grevlex_cmp(const Monomial& a, const Monomial& b) {
  unsigned da = a.deg(), db = b.deg();
  if (da != db) return da < db ? -1 : 1;
  // Equal degree: a > b iff the last nonzero entry of a-b is negative.
  for (int i = 2; i >= 0; --i) {
    if (a.e[i] != b.e[i]) return a.e[i] < b.e[i] ? 1 : -1;
  }
  return 0;
}

std::string Monomial::str() const {
  static const char* names[3] = {"x", "y", "z"};
  std::string s;
  for (int i = 0; i < 3; ++i) {
    if (e[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += names[i];
    if (e[i] > 1) s += "^" + std::to_string(e[i]);
  }
  return s;
}

MPoly::MPoly() : tower_(FieldTower::rationals()) {}

MPoly MPoly::zero(const TowerPtr& t) {
  MPoly p;
  p.tower_ = t;
  return p;
}

MPoly MPoly::constant(const TowerPtr& t, const Rat& q) {
  MPoly p = zero(t);
  if (q != 0) p.t_.push_back({Monomial{}, t->constant(q)});
  return p;
}

MPoly MPoly::scalar(const FieldElement& c) {
  MPoly p = zero(c.tower());
  if (!c.is_zero()) p.t_.push_back({Monomial{}, c});
  return p;
}

MPoly MPoly::variable(const TowerPtr& t, int var, unsigned exp) {
  if (var < 0 || var > 2) throw error("variable index out of range");
  MPoly p = zero(t);
  Monomial m;
  m.e[var] = static_cast<uint16_t>(exp);
  p.t_.push_back({m, t->one()});
  return p;
}

MPoly MPoly::from_terms(const TowerPtr& t, std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    return grevlex_cmp(a.first, b.first) > 0;
  });
  MPoly p = zero(t);
  for (auto& tm : terms) {
    FieldElement c =
        tm.second.tower()->same(t) ? tm.second : t->embed(tm.second);
    if (!p.t_.empty() && p.t_.back().first == tm.first) {
      p.t_.back().second += c;
      if (p.t_.back().second.is_zero()) p.t_.pop_back();
    } else if (!c.is_zero()) {
      p.t_.push_back({tm.first, std::move(c)});
    }
  }
  return p;
}

int MPoly::degree() const {
  int d = -1;
  for (const auto& t : t_) d = std::max(d, int(t.first.deg()));
  return d;
}

bool MPoly::is_homogeneous() const {
  if (t_.empty()) return true;
  unsigned d = t_.front().first.deg();
  for (const auto& t : t_)
    if (t.first.deg() != d) return false;
  return true;
}

const MPoly::Term& MPoly::leading() const {
  if (t_.empty()) throw error("leading term of zero polynomial");
  return t_.front();
}

FieldElement MPoly::coefficient(const Monomial& m) const {
  // Terms are sorted descending; binary search.
  int lo = 0, hi = static_cast<int>(t_.size()) - 1;
  while (lo <= hi) {
    int mid = (lo + hi) / 2;
    int c = grevlex_cmp(t_[mid].first, m);
    if (c == 0) return t_[mid].second;
    if (c > 0)
      lo = mid + 1;
    else
      hi = mid - 1;
  }
  return tower_->zero();
}

namespace {
TowerPtr common_tower(const TowerPtr& a, const TowerPtr& b) {
  if (a->same(b)) return a;
  if (a->dim() == 1) return b;
  if (b->dim() == 1) return a;
  if (a->extends(b)) return a;
  if (b->extends(a)) return b;
  throw error("mixed polynomial towers: " + a->descriptor() + " vs " +
              b->descriptor());
}
}  // namespace

MPoly MPoly::operator-() const {
  MPoly r = *this;
  for (auto& t : r.t_) t.second = -t.second;
  return r;
}

MPoly MPoly::operator+(const MPoly& o) const {
  TowerPtr t = common_tower(tower_, o.tower_);
  const MPoly& a = tower_->same(t) ? *this : this->embedded(t);
  const MPoly& b = o.tower_->same(t) ? o : o.embedded(t);
  MPoly r = zero(t);
  r.t_.reserve(a.t_.size() + b.t_.size());
  size_t i = 0, j = 0;
  while (i < a.t_.size() && j < b.t_.size()) {
    int c = grevlex_cmp(a.t_[i].first, b.t_[j].first);
    if (c > 0) {
      r.t_.push_back(a.t_[i++]);
    } else if (c < 0) {
      r.t_.push_back(b.t_[j++]);
    } else {
      FieldElement s = a.t_[i].second + b.t_[j].second;
      if (!s.is_zero()) r.t_.push_back({a.t_[i].first, std::move(s)});
      ++i;
      ++j;
    }
  }
  while (i < a.t_.size()) r.t_.push_back(a.t_[i++]);
  while (j < b.t_.size()) r.t_.push_back(b.t_[j++]);
  return r;
}

MPoly MPoly::operator-(const MPoly& o) const { return *this + (-o); }

MPoly MPoly::operator*(const MPoly& o) const {
  TowerPtr t = common_tower(tower_, o.tower_);
  const MPoly& a = tower_->same(t) ? *this : this->embedded(t);
  const MPoly& b = o.tower_->same(t) ? o : o.embedded(t);
  if (a.is_zero() || b.is_zero()) return zero(t);

  const MPoly& small = a.t_.size() <= b.t_.size() ? a : b;
  const MPoly& big = a.t_.size() <= b.t_.size() ? b : a;

  if (small.t_.size() <= 6) {
    // Shift-and-merge: each term of the small factor maps the big factor to
    // another sorted stream.
    MPoly acc = zero(t);
    for (const auto& ts : small.t_) {
      MPoly shifted = zero(t);
      shifted.t_.reserve(big.t_.size());
      for (const auto& tb : big.t_) {
        FieldElement c = ts.second * tb.second;
        if (!c.is_zero()) shifted.t_.push_back({ts.first * tb.first, c});
      }
      acc += shifted;
    }
    return acc;
  }

  // Hash accumulation for large*large.
  std::unordered_map<uint64_t, size_t> where;
  where.reserve(big.t_.size() * 2);
  std::vector<Term> out;
  out.reserve(big.t_.size() * 2);
  for (const auto& ts : small.t_) {
    for (const auto& tb : big.t_) {
      Monomial m = ts.first * tb.first;
      FieldElement c = ts.second * tb.second;
      if (c.is_zero()) continue;
      auto [it, fresh] = where.try_emplace(m.key(), out.size());
      if (fresh)
        out.push_back({m, std::move(c)});
      else
        out[it->second].second += c;
    }
  }
  return from_terms(t, std::move(out));
}

MPoly MPoly::operator*(const FieldElement& s) const {
  if (s.is_zero()) return zero(common_tower(tower_, s.tower()));
  TowerPtr t = common_tower(tower_, s.tower());
  const MPoly& a = tower_->same(t) ? *this : this->embedded(t);
  FieldElement sc = s.tower()->same(t) ? s : t->embed(s);
  MPoly r = zero(t);
  r.t_.reserve(a.t_.size());
  for (const auto& tm : a.t_) {
    FieldElement c = tm.second * sc;
    if (!c.is_zero()) r.t_.push_back({tm.first, std::move(c)});
  }
  return r;
}

MPoly MPoly::operator*(const Rat& s) const {
  if (s == 0) return zero(tower_);
  MPoly r = *this;
  for (auto& tm : r.t_) tm.second = tm.second * s;
  return r;
}

MPoly& MPoly::operator+=(const MPoly& o) {
  *this = *this + o;
  return *this;
}
MPoly& MPoly::operator-=(const MPoly& o) {
  *this = *this - o;
  return *this;
}

MPoly MPoly::pow(unsigned n) const {
  MPoly acc = constant(tower_, 1);
  MPoly base = *this;
  while (n) {
    if (n & 1) acc = acc * base;
    base = base * base;
    n >>= 1;
  }
  return acc;
}

bool MPoly::operator==(const MPoly& o) const {
  TowerPtr t = common_tower(tower_, o.tower_);
  const MPoly& a = tower_->same(t) ? *this : this->embedded(t);
  const MPoly& b = o.tower_->same(t) ? o : o.embedded(t);
  if (a.t_.size() != b.t_.size()) return false;
  for (size_t i = 0; i < a.t_.size(); ++i) {
    if (!(a.t_[i].first == b.t_[i].first)) return false;
    if (!(a.t_[i].second == b.t_[i].second)) return false;
  }
  return true;
}

MPoly MPoly::partial(int var) const {
  if (var < 0 || var > 2) throw error("partial: variable index out of range");
  std::vector<Term> out;
  out.reserve(t_.size());
  for (const auto& tm : t_) {
    if (tm.first.e[var] == 0) continue;
    Monomial m = tm.first;
    unsigned e = m.e[var];
    m.e[var] = static_cast<uint16_t>(e - 1);
    out.push_back({m, tm.second * Rat(long(e))});
  }
  return from_terms(tower_, std::move(out));
}

MPoly MPoly::higher_partial(const std::array<unsigned, 3>& order) const {
  MPoly r = *this;
  for (int v = 0; v < 3; ++v)
    for (unsigned k = 0; k < order[v]; ++k) r = r.partial(v);
  return r;
}

FieldElement MPoly::evaluate(const std::array<FieldElement, 3>& p) const {
  TowerPtr pt = p[0].tower();
  for (int i = 1; i < 3; ++i)
    if (!p[i].tower()->same(pt))
      throw error("evaluate: coordinates in mixed towers");
  TowerPtr t = common_tower(tower_, pt);
  if (!t->same(pt))
    throw error("evaluate: coordinate tower must contain coefficient tower");
  unsigned maxe[3] = {0, 0, 0};
  for (const auto& tm : t_)
    for (int v = 0; v < 3; ++v) maxe[v] = std::max(maxe[v], unsigned(tm.first.e[v]));
  std::array<std::vector<FieldElement>, 3> pw;
  for (int v = 0; v < 3; ++v) {
    pw[v].reserve(maxe[v] + 1);
    pw[v].push_back(t->one());
    for (unsigned k = 1; k <= maxe[v]; ++k) pw[v].push_back(pw[v][k - 1] * p[v]);
  }
  FieldElement acc = t->zero();
  for (const auto& tm : t_) {
    FieldElement c = t->embed(tm.second);
    acc += c * pw[0][tm.first.e[0]] * pw[1][tm.first.e[1]] * pw[2][tm.first.e[2]];
  }
  return acc;
}

MPoly MPoly::substitute(const std::array<MPoly, 3>& img) const {
  TowerPtr t = common_tower(
      common_tower(tower_, img[0].tower()),
      common_tower(img[1].tower(), img[2].tower()));
  const MPoly U = img[0].tower()->same(t) ? img[0] : img[0].embedded(t);
  const MPoly V = img[1].tower()->same(t) ? img[1] : img[1].embedded(t);
  const MPoly W = img[2].tower()->same(t) ? img[2] : img[2].embedded(t);

  // Nested view: x-exponent (descending) -> y-exponent -> z-entries.
  std::map<int, std::map<int, std::vector<std::pair<int, FieldElement>>>,
           std::greater<int>>
      nest;
  for (const auto& tm : t_)
    nest[tm.first.e[0]][tm.first.e[1]].push_back(
        {tm.first.e[2], t->embed(tm.second)});

  MPoly R = zero(t);
  int prev_a = -1;
  for (auto& [a, rows] : nest) {
    if (prev_a < 0) {
      prev_a = a;
    } else {
      for (int k = 0; k < prev_a - a; ++k) R = R * U;
      prev_a = a;
    }
    // Inner Horner in y then z for this x-layer.
    MPoly layer = zero(t);
    int last_b = -1;
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
      int b = it->first;
      if (last_b < 0) {
        last_b = b;
      } else {
        for (int k = 0; k < last_b - b; ++k) layer = layer * V;
        last_b = b;
      }
      MPoly zpoly = zero(t);
      // Horner in z over the explicit entries.
      std::sort(it->second.begin(), it->second.end(),
                [](const auto& l, const auto& r) { return l.first > r.first; });
      int last_c = -1;
      for (const auto& [cexp, coeff] : it->second) {
        if (last_c < 0) {
          last_c = cexp;
        } else {
          for (int k = 0; k < last_c - cexp; ++k) zpoly = zpoly * W;
          last_c = cexp;
        }
        zpoly += MPoly::scalar(coeff);
      }
      if (last_c > 0)
        for (int k = 0; k < last_c; ++k) zpoly = zpoly * W;
      layer += zpoly;
    }
    if (last_b > 0)
      for (int k = 0; k < last_b; ++k) layer = layer * V;
    R += layer;
  }
  if (prev_a > 0)
    for (int k = 0; k < prev_a; ++k) R = R * U;
  return R;
}

MPoly MPoly::embedded(const TowerPtr& bigger) const {
  MPoly r = zero(bigger);
  r.t_.reserve(t_.size());
  for (const auto& tm : t_) r.t_.push_back({tm.first, bigger->embed(tm.second)});
  return r;
}

std::string MPoly::str() const {
  if (t_.empty()) return "0";
  std::string out;
  for (const auto& tm : t_) {
    std::string piece;
    std::string mono = tm.first.str();
    const FieldElement& c = tm.second;
    if (mono.empty()) {
      piece = c.str();
    } else if (c.is_rational()) {
      Rat q = c.rational_value();
      if (q == 1)
        piece = mono;
      else if (q == -1)
        piece = "-" + mono;
      else
        piece = rat_str(q) + "*" + mono;
    } else {
      piece = "(" + c.str() + ")*" + mono;
    }
    if (!out.empty() && piece[0] != '-') out += "+";
    out += piece;
  }
  return out;
}

std::string MPoly::content_hash() const {
  return Sha256::hash_hex(tower_->descriptor() + "|" + str());
}

DivisionOutcome divide_exact(const MPoly& f, const MPoly& g) {
  if (g.is_zero()) throw error("divide_exact: divisor is zero");
  DivisionOutcome out;
  TowerPtr t = common_tower(f.tower(), g.tower());
  const MPoly& gf = g.tower()->same(t) ? g : g.embedded(t);
  const Monomial glt = gf.leading().first;
  const FieldElement ginv = gf.leading().second.inverse();

  // Working remainder as an ordered map (ascending grevlex; leading = rbegin).
  std::map<uint64_t, std::pair<Monomial, FieldElement>> rem;
  auto rank = [](const Monomial& m) {
    // Order-preserving packing: total degree major, then grevlex tiebreak
    // encoded by complementing (z, y) within the degree block.
    uint64_t d = m.deg();
    uint64_t zC = 0xffff - m.e[2], yC = 0xffff - m.e[1];
    return (d << 36) | (zC << 20) | (yC << 4);
  };
  const MPoly& ff = f.tower()->same(t) ? f : f.embedded(t);
  for (const auto& tm : ff.terms()) rem[rank(tm.first)] = tm;

  std::vector<MPoly::Term> qterms;
  while (!rem.empty()) {
    auto top = std::prev(rem.end());
    Monomial m = top->second.first;
    FieldElement c = top->second.second;
    if (!glt.divides(m)) {
      out.divisible = false;
      out.blocked_monomial = m;
      out.blocked_coeff = c;
      return out;
    }
    Monomial qm = m / glt;
    FieldElement qc = c * ginv;
    qterms.push_back({qm, qc});
    for (const auto& tg : gf.terms()) {
      Monomial mm = qm * tg.first;
      FieldElement delta = qc * tg.second;
      uint64_t k = rank(mm);
      auto it = rem.find(k);
      if (it == rem.end()) {
        if (!delta.is_zero()) rem[k] = {mm, -delta};
      } else {
        it->second.second -= delta;
        if (it->second.second.is_zero()) rem.erase(it);
      }
    }
  }
  out.divisible = true;
  out.quotient = MPoly::from_terms(t, std::move(qterms));
  return out;
}

std::optional<FieldElement> proportional(const MPoly& a, const MPoly& b) {
  TowerPtr t = common_tower(a.tower(), b.tower());
  const MPoly& af = a.tower()->same(t) ? a : a.embedded(t);
  const MPoly& bf = b.tower()->same(t) ? b : b.embedded(t);
  if (af.is_zero() && bf.is_zero()) return t->one();
  if (af.is_zero() || bf.is_zero()) return std::nullopt;
  if (af.term_count() != bf.term_count()) return std::nullopt;
  FieldElement lambda = af.leading().second / bf.leading().second;
  for (size_t i = 0; i < af.terms().size(); ++i) {
    if (!(af.terms()[i].first == bf.terms()[i].first)) return std::nullopt;
    if (!(af.terms()[i].second == lambda * bf.terms()[i].second))
      return std::nullopt;
  }
  return lambda;
}

FieldElement BinaryForm::eval(const FieldElement& s,
                              const FieldElement& u) const {
  FieldElement acc = tower->zero();
  FieldElement sp = tower->one();
  std::vector<FieldElement> spow{tower->one()};
  for (int i = 1; i <= deg; ++i) spow.push_back(spow[i - 1] * s);
  std::vector<FieldElement> upow{tower->one()};
  for (int i = 1; i <= deg; ++i) upow.push_back(upow[i - 1] * u);
  for (int i = 0; i <= deg; ++i) acc += c[i] * spow[i] * upow[deg - i];
  return acc;
}

UniPoly BinaryForm::dehomogenized() const {
  return UniPoly::from_coeffs(tower, c);
}

bool BinaryForm::is_zero() const {
  for (const auto& e : c)
    if (!e.is_zero()) return false;
  return true;
}

bool BinaryForm::squarefree() const {
  if (is_zero()) return false;
  int top = deg;
  while (top >= 0 && c[top].is_zero()) --top;
  if (deg - top > 1) return false;  // u^2 divides
  UniPoly p = dehomogenized();
  UniPoly g = uni_gcd(p, uni_derivative(p));
  return g.deg() == 0;
}

std::string BinaryForm::str() const {
  std::string out;
  for (int i = deg; i >= 0; --i) {
    if (c[i].is_zero()) continue;
    std::string mono;
    if (i > 0) mono += "s" + (i > 1 ? "^" + std::to_string(i) : "");
    if (deg - i > 0) {
      if (!mono.empty()) mono += "*";
      mono += "u" + (deg - i > 1 ? "^" + std::to_string(deg - i) : "");
    }
    std::string piece;
    if (mono.empty())
      piece = c[i].str();
    else if (c[i].is_rational()) {
      Rat q = c[i].rational_value();
      piece = (q == 1 ? mono : q == -1 ? "-" + mono : rat_str(q) + "*" + mono);
    } else {
      piece = "(" + c[i].str() + ")*" + mono;
    }
    if (!out.empty() && piece[0] != '-') out += "+";
    out += piece;
  }
  return out.empty() ? "0" : out;
}

BinaryForm restrict_to_line(const MPoly& f, const MPoly& line) {
  if (line.is_zero() || line.degree() != 1 || !line.is_homogeneous())
    throw error("restrict_to_line: the line must be a nonzero linear form");
  TowerPtr t = common_tower(f.tower(), line.tower());
  const MPoly& L = line.tower()->same(t) ? line : line.embedded(t);
  std::array<FieldElement, 3> a = {t->zero(), t->zero(), t->zero()};
  for (const auto& tm : L.terms()) {
    for (int v = 0; v < 3; ++v)
      if (tm.first.e[v] == 1) a[v] = tm.second;
  }
  int pivot = -1;
  for (int v = 0; v < 3; ++v)
    if (!a[v].is_zero()) {
      pivot = v;
      break;
    }
  if (pivot < 0) throw error("restrict_to_line: zero line");
  int m1 = -1, m2 = -1;
  for (int v = 0; v < 3; ++v) {
    if (v == pivot) continue;
    (m1 < 0 ? m1 : m2) = v;
  }
  LineParam param;
  for (int v = 0; v < 3; ++v) {
    param.p0[v] = t->zero();
    param.p1[v] = t->zero();
  }
  param.p0[m1] = a[pivot];
  param.p0[pivot] = -a[m1];
  param.p1[m2] = a[pivot];
  param.p1[pivot] = -a[m2];

  const MPoly& F = f.tower()->same(t) ? f : f.embedded(t);
  int d = std::max(F.degree(), 0);
  BinaryForm out;
  out.tower = t;
  out.deg = d;
  out.c.assign(d + 1, t->zero());
  out.param = param;

  // coordinate v restricts to the binary linear form p0[v]*s + p1[v]*u;
  // expand each monomial by convolving power tables.
  // pw[v][k] = coefficient vector (length k+1) of (p0 s + p1 u)^k, c[i]*s^i.
  unsigned maxe[3] = {0, 0, 0};
  for (const auto& tm : F.terms())
    for (int v = 0; v < 3; ++v)
      maxe[v] = std::max(maxe[v], unsigned(tm.first.e[v]));
  std::array<std::vector<std::vector<FieldElement>>, 3> pw;
  for (int v = 0; v < 3; ++v) {
    pw[v].push_back({t->one()});
    for (unsigned k = 1; k <= maxe[v]; ++k) {
      const auto& prev = pw[v][k - 1];
      std::vector<FieldElement> cur(k + 1, t->zero());
      for (unsigned i = 0; i < k; ++i) {
        cur[i + 1] += prev[i] * param.p0[v];
        cur[i] += prev[i] * param.p1[v];
      }
      pw[v].push_back(std::move(cur));
    }
  }
  for (const auto& tm : F.terms()) {
    if (int(tm.first.deg()) != d)
      throw error("restrict_to_line: input must be homogeneous");
    // Convolve the three power vectors.
    const auto& A = pw[0][tm.first.e[0]];
    const auto& B = pw[1][tm.first.e[1]];
    const auto& C = pw[2][tm.first.e[2]];
    std::vector<FieldElement> ab(A.size() + B.size() - 1, t->zero());
    for (size_t i = 0; i < A.size(); ++i) {
      if (A[i].is_zero()) continue;
      for (size_t j = 0; j < B.size(); ++j) {
        if (B[j].is_zero()) continue;
        ab[i + j] += A[i] * B[j];
      }
    }
    for (size_t i = 0; i < ab.size(); ++i) {
      if (ab[i].is_zero()) continue;
      for (size_t j = 0; j < C.size(); ++j) {
        if (C[j].is_zero()) continue;
        out.c[i + j] += tm.second * ab[i] * C[j];
      }
    }
  }
  return out;
}

FieldElement binary_discriminant(const BinaryForm& q) {
  if (q.deg != 2) throw error("binary_discriminant: degree must be 2");
  return q.c[1] * q.c[1] - q.c[2] * q.c[0] * Rat(4);
}

}  // namespace klein
