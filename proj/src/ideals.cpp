#include "klein/ideals.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "klein/certificate.hpp"
#include "klein/linalg.hpp"

namespace klein {

namespace {

void need(bool cond, const std::string& what) {
  if (!cond) throw error("ideals: " + what);
}

MPoly times_term(const MPoly& g, const FieldElement& c, const Monomial& m) {
  return g * MPoly::from_terms(g.tower(), {{m, c}});
}

// Degree-d monomials in descending grevlex order.
std::vector<Monomial> degree_monomials(int d) {
  std::vector<Monomial> out;
  for (int a = 0; a <= d; ++a)
    for (int b = 0; b <= d - a; ++b)
      out.push_back(Monomial{{uint16_t(a), uint16_t(b), uint16_t(d - a - b)}});
  std::sort(out.begin(), out.end(),
            [](const Monomial& x, const Monomial& y) {
              return grevlex_cmp(x, y) > 0;
            });
  return out;
}

std::vector<FieldElement> coeff_vector(const MPoly& f,
                                       const std::vector<Monomial>& mons) {
  std::vector<FieldElement> v;
  v.reserve(mons.size());
  for (const auto& m : mons) v.push_back(f.coefficient(m));
  return v;
}

// Coordinates of x with respect to the relative basis of its tower over
// `target` (which must be a prefix).
std::vector<FieldElement> relative_coords(const FieldElement& x,
                                          const TowerPtr& target) {
  const int base = target->dim();
  const auto& flat = x.flat();
  need(flat.size() % base == 0, "relative coordinate split mismatch");
  std::vector<FieldElement> out;
  for (size_t off = 0; off < flat.size(); off += base)
    out.push_back(target->from_flat(
        std::vector<Rat>(flat.begin() + off, flat.begin() + off + base)));
  return out;
}

}  // namespace

PointSet make_point_set(std::string label, std::vector<ProjPoint> pts) {
  PointSet ps;
  ps.label = std::move(label);
  PointIndex idx;
  for (auto& p : pts) {
    ProjPoint q = minimal_form(p);
    need(idx.insert(q, ps.label), "duplicate point " + q.str() + " in " +
                                      ps.label);
    ps.points.push_back(std::move(q));
  }
  return ps;
}

Ideal point_ideal(const PointSet& ps, const TowerPtr& tower) {
  need(!ps.points.empty(), "point ideal of an empty set");
  const long npts = static_cast<long>(ps.points.size());

  struct Row {
    ProjPoint p;  // coordinates in their evaluation tower
    int rel;      // rows contributed
  };
  std::vector<Row> rows;
  long total_rows = 0;
  for (const auto& p : ps.points) {
    if (tower->extends(p.tower())) {
      ProjPoint q;
      for (int i = 0; i < 3; ++i) q.x[i] = tower->embed(p.x[i]);
      rows.push_back({q, 1});
      total_rows += 1;
    } else if (p.tower()->extends(tower)) {
      int rel = p.tower()->dim() / tower->dim();
      rows.push_back({p, rel});
      total_rows += rel;
    } else {
      need(false, "point tower " + p.tower()->descriptor() +
                      " incompatible with ideal tower " + tower->descriptor());
    }
  }

  Ideal I;
  I.tower = tower;
  int consecutive_full = 0;
  for (int d = 1;; ++d) {
    need(d <= 200, "point ideal generation did not stabilize");
    const auto mons = degree_monomials(d);
    const int cols = static_cast<int>(mons.size());

    Mat M = Mat::zero(tower, static_cast<int>(total_rows), cols);
    int r0 = 0;
    for (const auto& row : rows) {
      const TowerPtr& pt = row.p.tower();
      // power tables per coordinate
      std::array<std::vector<FieldElement>, 3> pw;
      for (int v = 0; v < 3; ++v) {
        pw[v].assign(size_t(d) + 1, pt->one());
        for (int e = 1; e <= d; ++e) pw[v][e] = pw[v][e - 1] * row.p.x[v];
      }
      for (int j = 0; j < cols; ++j) {
        FieldElement val =
            pw[0][mons[j].e[0]] * pw[1][mons[j].e[1]] * pw[2][mons[j].e[2]];
        if (row.rel == 1) {
          M.at(r0, j) = val;
        } else {
          auto rc = relative_coords(val, tower);
          need(static_cast<int>(rc.size()) == row.rel,
               "relative coordinate count changed");
          for (int k = 0; k < row.rel; ++k) M.at(r0 + k, j) = rc[k];
        }
      }
      r0 += row.rel;
    }
    auto kernel = kernel_basis(M);
    const long kdim = static_cast<long>(kernel.size());
    const long rank_d = cols - kdim;

    // span of the previously found generators inside degree d
    std::vector<std::vector<FieldElement>> span_rows;
    for (const auto& g : I.generators) {
      int dg = g.degree();
      if (dg > d) continue;
      for (const auto& mu : degree_monomials(d - dg))
        span_rows.push_back(coeff_vector(times_term(g, tower->one(), mu),
                                         mons));
    }
    Mat S = Mat::zero(tower, static_cast<int>(span_rows.size()), cols);
    for (size_t i = 0; i < span_rows.size(); ++i)
      for (int j = 0; j < cols; ++j) S.at(static_cast<int>(i), j) =
          span_rows[i][j];
    std::vector<int> span_pivots = rref(S);
    const long span_dim = static_cast<long>(span_pivots.size());

    // the generated piece must sit inside the kernel
    {
      Mat chk = Mat::zero(tower, static_cast<int>(span_dim + kdim), cols);
      for (long i = 0; i < span_dim; ++i)
        for (int j = 0; j < cols; ++j)
          chk.at(static_cast<int>(i), j) = S.at(static_cast<int>(i), j);
      for (long i = 0; i < kdim; ++i)
        for (int j = 0; j < cols; ++j)
          chk.at(static_cast<int>(span_dim + i), j) = kernel[i][j];
      need(rank(std::move(chk)) == static_cast<int>(kdim),
           "generated piece escapes the evaluation kernel");
    }

    // canonical new generators: kernel vectors reduced modulo the span
    std::vector<std::vector<FieldElement>> cand;
    for (auto& v : kernel) {
      for (long i = 0; i < span_dim; ++i) {
        const int pc = span_pivots[i];
        if (v[pc].is_zero()) continue;
        FieldElement f = v[pc];
        for (int j = 0; j < cols; ++j)
          v[j] -= f * S.at(static_cast<int>(i), j);
      }
      bool zero = true;
      for (const auto& c : v)
        if (!c.is_zero()) {
          zero = false;
          break;
        }
      if (!zero) cand.push_back(std::move(v));
    }
    Mat C = Mat::zero(tower, static_cast<int>(cand.size()), cols);
    for (size_t i = 0; i < cand.size(); ++i)
      for (int j = 0; j < cols; ++j) C.at(static_cast<int>(i), j) =
          cand[i][j];
    const long new_gens = static_cast<long>(rref(C).size());
    for (long i = 0; i < new_gens; ++i) {
      std::vector<MPoly::Term> terms;
      for (int j = 0; j < cols; ++j)
        if (!C.at(static_cast<int>(i), j).is_zero())
          terms.emplace_back(mons[j], C.at(static_cast<int>(i), j));
      I.generators.push_back(MPoly::from_terms(tower, std::move(terms)));
    }
    need(span_dim + new_gens == kdim, "kernel decomposition mismatch");

    I.hilbert.push_back(
        HilbertRecord{d, cols, rank_d, kdim, span_dim, new_gens});

    consecutive_full = (rank_d == npts) ? consecutive_full + 1 : 0;
    if (consecutive_full >= 2 && new_gens == 0) break;
  }
  return I;
}

Ideal ideal_square(const Ideal& I) {
  Ideal S;
  S.tower = I.tower;
  for (size_t i = 0; i < I.generators.size(); ++i)
    for (size_t j = i; j < I.generators.size(); ++j)
      S.generators.push_back(I.generators[i] * I.generators[j]);
  return S;
}

// --------------------------------------------------------------- reduction

MPoly normal_form(const MPoly& f, const std::vector<MPoly>& basis) {
  TowerPtr T = f.tower();
  for (const auto& g : basis) {
    need(!g.is_zero(), "zero element in reduction basis");
    if (g.tower()->extends(T)) T = g.tower();
  }
  MPoly p = f.embedded(T);
  std::vector<MPoly> bs;
  bs.reserve(basis.size());
  for (const auto& g : basis) bs.push_back(g.embedded(T));

  MPoly r = MPoly::zero(T);
  while (!p.is_zero()) {
    const auto& [lm, lc] = p.leading();
    const MPoly* red = nullptr;
    for (const auto& g : bs)
      if (g.leading().first.divides(lm)) {
        red = &g;
        break;
      }
    if (red) {
      p -= times_term(*red, lc / red->leading().second,
                      lm / red->leading().first);
    } else {
      MPoly t = MPoly::from_terms(T, {{lm, lc}});
      r += t;
      p -= t;
    }
  }
  return r;
}

// --------------------------------------------------------------- buchberger

namespace {

Monomial mono_lcm(const Monomial& a, const Monomial& b) {
  return Monomial{{uint16_t(std::max(a.e[0], b.e[0])),
                   uint16_t(std::max(a.e[1], b.e[1])),
                   uint16_t(std::max(a.e[2], b.e[2]))}};
}

bool mono_coprime(const Monomial& a, const Monomial& b) {
  return (a.e[0] == 0 || b.e[0] == 0) && (a.e[1] == 0 || b.e[1] == 0) &&
         (a.e[2] == 0 || b.e[2] == 0);
}

struct SPair {
  long sugar = 0;
  Monomial lcm;
  int i = 0, j = 0;
};

struct SPairCmp {
  bool operator()(const SPair& a, const SPair& b) const {
    if (a.sugar != b.sugar) return a.sugar < b.sugar;
    int c = grevlex_cmp(a.lcm, b.lcm);
    if (c != 0) return c < 0;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  }
};

struct GBState {
  TowerPtr tower;
  std::vector<MPoly> basis;  // monic
  std::vector<long> sugar;
  std::set<std::pair<int, int>> done;
  std::set<SPair, SPairCmp> queue;
  GroebnerResult res;
};

MPoly monic(const MPoly& f) {
  return f * f.leading().second.inverse();
}

void enqueue_pairs(GBState& st, int j) {
  const Monomial& lmj = st.basis[j].leading().first;
  for (int i = 0; i < j; ++i) {
    const Monomial& lmi = st.basis[i].leading().first;
    if (mono_coprime(lmi, lmj)) {
      st.done.insert({i, j});  // product criterion
      continue;
    }
    SPair p;
    p.lcm = mono_lcm(lmi, lmj);
    p.i = i;
    p.j = j;
    p.sugar = std::max(st.sugar[i] + (p.lcm / lmi).deg(),
                       st.sugar[j] + (p.lcm / lmj).deg());
    st.queue.insert(p);
  }
}

void interreduce(GBState& st) {
  // drop elements whose leading monomial is divisible by another's
  std::vector<MPoly> kept;
  for (size_t i = 0; i < st.basis.size(); ++i) {
    bool redundant = false;
    for (size_t j = 0; j < st.basis.size() && !redundant; ++j) {
      if (i == j) continue;
      const Monomial& mi = st.basis[i].leading().first;
      const Monomial& mj = st.basis[j].leading().first;
      if (mj.divides(mi) && !(mi == mj && j > i)) redundant = true;
    }
    if (!redundant) kept.push_back(st.basis[i]);
  }
  // canonical order, then tail-reduce to a fixpoint
  std::sort(kept.begin(), kept.end(), [](const MPoly& a, const MPoly& b) {
    return grevlex_cmp(a.leading().first, b.leading().first) < 0;
  });
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < kept.size(); ++i) {
      std::vector<MPoly> others;
      for (size_t j = 0; j < kept.size(); ++j)
        if (j != i) others.push_back(kept[j]);
      MPoly r = monic(normal_form(kept[i], others));
      if (r != kept[i]) {
        kept[i] = r;
        changed = true;
      }
    }
  }
  st.basis = std::move(kept);
}

GroebnerResult run_buchberger(GBState& st, const GroebnerBudget& budget) {
  const auto start = std::chrono::steady_clock::now();
  auto out_of_budget = [&](std::string* reason) {
    if (budget.max_spairs >= 0 &&
        st.res.spairs_considered >= budget.max_spairs) {
      *reason = "spair-budget";
      return true;
    }
    if (budget.wall_seconds >= 0) {
      double el = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
      if (el > budget.wall_seconds) {
        *reason = "wall-clock";
        return true;
      }
    }
    return false;
  };

  while (!st.queue.empty()) {
    std::string reason;
    if (out_of_budget(&reason)) {
      st.res.complete = false;
      st.res.stop_reason = reason;
      if (!budget.checkpoint_path.empty()) {
        Json pairs = Json::array();
        for (const auto& p : st.queue) pairs.push_back({p.i, p.j});
        Json done = Json::array();
        for (const auto& p : st.done) done.push_back({p.first, p.second});
        Json basis = Json::array();
        for (const auto& g : st.basis) basis.push_back(g.str());
        Json body{{"tower", tower_to_json(st.tower)},
                  {"basis", basis},
                  {"sugar", st.sugar},
                  {"pairs", pairs},
                  {"done", done},
                  {"spairs_considered", st.res.spairs_considered},
                  {"spairs_reduced", st.res.spairs_reduced},
                  {"reductions_to_zero", st.res.reductions_to_zero}};
        write_json_file(budget.checkpoint_path,
                        seal_certificate("groebner-checkpoint", body));
      }
      st.res.basis = st.basis;
      return st.res;
    }

    SPair p = *st.queue.begin();
    st.queue.erase(st.queue.begin());
    st.done.insert({p.i, p.j});
    ++st.res.spairs_considered;

    // chain criterion
    bool skip = false;
    for (int k = 0; k < static_cast<int>(st.basis.size()) && !skip; ++k) {
      if (k == p.i || k == p.j) continue;
      if (!st.basis[k].leading().first.divides(p.lcm)) continue;
      auto key_ik = std::minmax(p.i, k);
      auto key_jk = std::minmax(p.j, k);
      if (st.done.count({key_ik.first, key_ik.second}) &&
          st.done.count({key_jk.first, key_jk.second}))
        skip = true;
    }
    if (skip) continue;

    const MPoly& fi = st.basis[p.i];
    const MPoly& fj = st.basis[p.j];
    MPoly spoly =
        times_term(fi, st.tower->one(), p.lcm / fi.leading().first) -
        times_term(fj, st.tower->one(), p.lcm / fj.leading().first);
    ++st.res.spairs_reduced;
    MPoly r = normal_form(spoly, st.basis);
    if (r.is_zero()) {
      ++st.res.reductions_to_zero;
      continue;
    }
    st.basis.push_back(monic(r));
    st.sugar.push_back(p.sugar);
    enqueue_pairs(st, static_cast<int>(st.basis.size()) - 1);
  }

  interreduce(st);
  st.res.complete = true;
  st.res.stop_reason = "complete";
  st.res.basis = st.basis;
  return st.res;
}

}  // namespace

GroebnerResult buchberger(const Ideal& I, const GroebnerBudget& budget) {
  if (I.basis_cache && I.basis_cache->complete) return *I.basis_cache;
  GBState st;
  st.tower = I.tower;
  for (const auto& g : I.generators) {
    if (g.is_zero()) continue;
    st.basis.push_back(monic(g.embedded(I.tower)));
    st.sugar.push_back(g.degree());
    enqueue_pairs(st, static_cast<int>(st.basis.size()) - 1);
  }
  GroebnerResult res = run_buchberger(st, budget);
  if (res.complete)
    I.basis_cache = std::make_shared<const GroebnerResult>(res);
  return res;
}

GroebnerResult buchberger_resume(const std::string& checkpoint_path,
                                 const GroebnerBudget& budget) {
  Json body = open_certificate(read_json_file(checkpoint_path),
                               "groebner-checkpoint");
  GBState st;
  st.tower = tower_from_json(body.at("tower"));
  for (const auto& s : body.at("basis"))
    st.basis.push_back(parse_poly(st.tower, s.get<std::string>()));
  st.sugar = body.at("sugar").get<std::vector<long>>();
  need(st.sugar.size() == st.basis.size(), "checkpoint size mismatch");
  for (const auto& p : body.at("done"))
    st.done.insert({p.at(0).get<int>(), p.at(1).get<int>()});
  for (const auto& pj : body.at("pairs")) {
    int i = pj.at(0).get<int>(), j = pj.at(1).get<int>();
    SPair p;
    const Monomial& lmi = st.basis[i].leading().first;
    const Monomial& lmj = st.basis[j].leading().first;
    p.lcm = mono_lcm(lmi, lmj);
    p.i = i;
    p.j = j;
    p.sugar = std::max(st.sugar[i] + (p.lcm / lmi).deg(),
                       st.sugar[j] + (p.lcm / lmj).deg());
    st.queue.insert(p);
  }
  st.res.spairs_considered = body.at("spairs_considered").get<long>();
  st.res.spairs_reduced = body.at("spairs_reduced").get<long>();
  st.res.reductions_to_zero = body.at("reductions_to_zero").get<long>();
  return run_buchberger(st, budget);
}

// ------------------------------------------------------ symbolic membership

namespace {

// Evaluates a fixed family of homogeneous forms at many points of one tower,
// sharing the coordinate power tables across the whole family.  Points are
// first rescaled to denominator-free coordinates: a homogeneous form vanishes
// at v iff it vanishes at lambda*v, and integral coordinates keep the bignum
// arithmetic free of per-operation gcd reductions.
class BatchEval {
 public:
  BatchEval(const TowerPtr& t, const std::vector<const MPoly*>& fs)
      : tower_(t) {
    for (const MPoly* f : fs) {
      Form fm;
      if (!f->is_zero()) {
        MPoly g = f->embedded(t);
        const auto& terms = g.terms();
        for (size_t i = 0; i < terms.size();) {
          int a = terms[i].first.e[0];
          AGroup ag;
          ag.a = a;
          while (i < terms.size() && terms[i].first.e[0] == a) {
            const auto& [mono, cf] = terms[i];
            Entry e;
            e.b = mono.e[1];
            e.c = mono.e[2];
            maxdeg_ = std::max(maxdeg_, int(mono.deg()));
            e.rational = cf.is_rational();
            if (e.rational)
              e.q = cf.rational_value();
            else
              e.coeff = cf;
            ag.entries.push_back(std::move(e));
            ++i;
          }
          fm.groups.push_back(std::move(ag));
        }
      }
      forms_.push_back(std::move(fm));
    }
  }

  // Index of the first form with a nonzero value at the point, or -1 if all
  // vanish.  Zero forms vanish by convention.  The coordinates must already
  // live in the evaluation tower.
  int first_nonzero(const std::array<FieldElement, 3>& coords) const {
    std::array<FieldElement, 3> v = cleared(coords);
    std::array<std::vector<FieldElement>, 3> pw;
    for (int i = 0; i < 3; ++i) {
      pw[i].reserve(maxdeg_ + 1);
      pw[i].push_back(tower_->one());
      for (int e = 1; e <= maxdeg_; ++e) pw[i].push_back(pw[i].back() * v[i]);
    }
    for (size_t k = 0; k < forms_.size(); ++k) {
      FieldElement acc = tower_->zero();
      for (const auto& ag : forms_[k].groups) {
        FieldElement mid = tower_->zero();
        for (const auto& e : ag.entries) {
          FieldElement yz = pw[1][e.b] * pw[2][e.c];
          mid += e.rational ? yz * e.q : yz * e.coeff;
        }
        acc += pw[0][ag.a] * mid;
      }
      if (!acc.is_zero()) return static_cast<int>(k);
    }
    return -1;
  }

 private:
  struct Entry {
    int b = 0, c = 0;
    bool rational = false;
    Rat q;
    FieldElement coeff;
  };
  struct AGroup {
    int a = 0;
    std::vector<Entry> entries;
  };
  struct Form {
    std::vector<AGroup> groups;  // empty = the zero form
  };

  std::array<FieldElement, 3> cleared(
      const std::array<FieldElement, 3>& coords) const {
    mpz_class lambda = 1;
    for (const auto& c : coords)
      for (const auto& q : c.flat())
        mpz_lcm(lambda.get_mpz_t(), lambda.get_mpz_t(),
                q.get_den().get_mpz_t());
    if (lambda == 1) return coords;
    Rat s(lambda);
    return {coords[0] * s, coords[1] * s, coords[2] * s};
  }

  TowerPtr tower_;
  std::vector<Form> forms_;
  int maxdeg_ = 0;
};

}  // namespace

MembershipReport symbolic_membership(const MPoly& f, const PointSet& ps,
                                     int m) {
  need(m >= 1, "symbolic power order must be at least 1");
  MembershipReport rep;
  rep.m = m;
  rep.member = true;
  rep.transcript.resize(ps.points.size());

  struct Partial {
    std::string name;
    MPoly poly;
  };
  std::vector<Partial> partials;
  for (int total = 0; total < m; ++total)
    for (int a = total; a >= 0; --a)
      for (int b = total - a; b >= 0; --b) {
        int c = total - a - b;
        std::string name = "f";
        auto app = [&](const char* var, int e) {
          for (int k = 0; k < e; ++k) name += std::string("_") + var;
        };
        app("x", a);
        app("y", b);
        app("z", c);
        partials.push_back(
            {name, f.higher_partial({unsigned(a), unsigned(b), unsigned(c)})});
      }
  std::vector<const MPoly*> fs;
  for (const auto& pt : partials) fs.push_back(&pt.poly);

  // Group the points by tower so each group shares one prepared evaluator.
  std::vector<std::pair<TowerPtr, std::vector<size_t>>> groups;
  for (size_t i = 0; i < ps.points.size(); ++i) {
    const TowerPtr& t = ps.points[i].tower();
    bool placed = false;
    for (auto& g : groups)
      if (g.first->same(t)) {
        g.second.push_back(i);
        placed = true;
        break;
      }
    if (!placed) groups.push_back({t, {i}});
  }

  for (const auto& [pt_tower, idxs] : groups) {
    TowerPtr eval_tower;
    if (pt_tower->extends(f.tower()))
      eval_tower = pt_tower;
    else if (f.tower()->extends(pt_tower))
      eval_tower = f.tower();
    else
      need(false, "point tower incompatible with the polynomial tower");
    BatchEval be(eval_tower, fs);
    for (size_t idx : idxs) {
      const ProjPoint& p = ps.points[idx];
      std::array<FieldElement, 3> coords = p.x;
      if (!eval_tower->same(pt_tower))
        coords = {eval_tower->embed(coords[0]), eval_tower->embed(coords[1]),
                  eval_tower->embed(coords[2])};
      PointTranscript tr;
      tr.point = p.str();
      tr.orders_checked = m;
      int bad = be.first_nonzero(coords);
      tr.vanished = bad < 0;
      if (bad >= 0) {
        tr.failing_partial = partials[bad].name;
        rep.member = false;
      }
      rep.transcript[idx] = std::move(tr);
    }
  }
  return rep;
}

}  // namespace klein
