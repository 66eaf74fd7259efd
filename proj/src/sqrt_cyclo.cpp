#include <array>
#include <vector>

#include "klein/tower.hpp"

// Squareness decision in Q and in Q(zeta7).
//
// Over Q(zeta7): for a prime p = 1 (mod 7) the 7th cyclotomic polynomial
// splits into linear factors mod p, giving six reductions ("embeddings")
// zeta7 -> r^j.  If some embedding of c is a quadratic non-residue mod p,
// c cannot be a square in the field (a square maps to a square under every
// ring homomorphism defined at p), which certifies NON-squareness with the
// pair (p, j) as witness.  In the other direction the code *constructs* a
// candidate square root: Tonelli-Shanks roots mod p, Hensel lifts to p^k,
// a Vandermonde solve for the coefficient vector over all sign patterns,
// rational reconstruction, and finally an exact field verification
// root*root == c.  Only the exact check is trusted.

namespace klein {

namespace {

using std::vector;

Int powmod(const Int& b, const Int& e, const Int& m) {
  Int r;
  mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
  return r;
}

Int invmod(const Int& a, const Int& m) {
  Int r;
  if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()))
    throw error("invmod: not invertible");
  return r;
}

Int mod(const Int& a, const Int& m) {
  Int r = a % m;
  if (r < 0) r += m;
  return r;
}

// Tonelli-Shanks square root of a QR mod odd prime p.
Int sqrt_mod_p(const Int& a_in, const Int& p) {
  Int a = mod(a_in, p);
  if (a == 0) return 0;
  if (powmod(a, (p - 1) / 2, p) != 1) throw error("sqrt_mod_p: non-residue");
  if (p % 4 == 3) return powmod(a, (p + 1) / 4, p);
  Int q = p - 1;
  unsigned long s = 0;
  while (q % 2 == 0) {
    q /= 2;
    ++s;
  }
  Int z = 2;
  while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;
  unsigned long m = s;
  Int c = powmod(z, q, p), t = powmod(a, q, p), r = powmod(a, (q + 1) / 2, p);
  while (t != 1) {
    Int tt = t;
    unsigned long i = 0;
    while (tt != 1) {
      tt = tt * tt % p;
      ++i;
      if (i == m) throw error("sqrt_mod_p: failure");
    }
    Int b = c;  // becomes c^(2^(m-i-1))
    for (unsigned long k = 0; k + i + 1 < m; ++k) b = b * b % p;
    m = i;
    c = b * b % p;
    t = t * c % p;
    r = r * b % p;
  }
  return r;
}

// Newton-lift a simple root r of f (integer coefficients, f'(r) a unit)
// from mod p to mod p^(2^levels).
Int lift_root(const vector<Int>& f, const Int& r0, const Int& p, int levels,
              Int* final_mod) {
  auto feval = [&](const Int& x, const Int& m) {
    Int acc = 0;
    for (int i = static_cast<int>(f.size()) - 1; i >= 0; --i)
      acc = mod(acc * x + f[i], m);
    return acc;
  };
  auto fpeval = [&](const Int& x, const Int& m) {
    Int acc = 0;
    for (int i = static_cast<int>(f.size()) - 1; i >= 1; --i)
      acc = mod(acc * x + f[i] * i, m);
    return acc;
  };
  Int r = r0, m = p;
  for (int i = 0; i < levels; ++i) {
    m = m * m;
    Int fp = fpeval(r, m);
    r = mod(r - feval(r, m) * invmod(fp, m), m);
  }
  if (final_mod) *final_mod = m;
  return r;
}

// Newton-lift s with s^2 = v from mod p to mod p^(2^levels).
Int lift_sqrt(const Int& s0, const Int& v, const Int& p, int levels) {
  Int s = s0, m = p;
  Int inv2;
  for (int i = 0; i < levels; ++i) {
    m = m * m;
    s = mod((s + mod(v, m) * invmod(s, m)) * invmod(Int(2), m), m);
  }
  return s;
}

// Balanced rational reconstruction of x mod M: finds num/den with
// |num|, den <= sqrt(M/2), num = x*den (mod M).
bool rat_reconstruct(const Int& x_in, const Int& M, Rat* out) {
  Int bound;
  mpz_sqrt(bound.get_mpz_t(), Int(M / 2).get_mpz_t());
  Int a = M, b = mod(x_in, M);
  Int u0 = 0, u1 = 1;
  while (b > bound) {
    Int q = a / b;
    Int t = a - q * b;
    a = b;
    b = t;
    Int tu = u0 - q * u1;
    u0 = u1;
    u1 = tu;
  }
  if (u1 == 0) return false;
  Int num = b, den = u1;
  if (den < 0) {
    den = -den;
    num = -num;
  }
  if (den > bound) return false;
  Int g;
  mpz_gcd(g.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  if (g != 1 && !(num == 0 && den == 1)) return false;
  Rat q(num, den);
  q.canonicalize();
  // Confirm num = x*den (mod M).
  if (mod(num - x_in * den, M) != 0) return false;
  *out = q;
  return true;
}

// Gaussian solve of the 6x6 system V*b = rhs mod M (M = p^k, pivots must be
// units mod p).  Returns false if a pivot is non-invertible.
bool solve_mod(std::array<std::array<Int, 6>, 6> V, std::array<Int, 6> rhs,
               const Int& M, std::array<Int, 6>* out) {
  for (int col = 0; col < 6; ++col) {
    int piv = -1;
    for (int r = col; r < 6; ++r) {
      Int g;
      mpz_gcd(g.get_mpz_t(), V[r][col].get_mpz_t(), M.get_mpz_t());
      if (g == 1) {
        piv = r;
        break;
      }
    }
    if (piv < 0) return false;
    std::swap(V[col], V[piv]);
    std::swap(rhs[col], rhs[piv]);
    Int inv = invmod(V[col][col], M);
    for (int c = col; c < 6; ++c) V[col][c] = mod(V[col][c] * inv, M);
    rhs[col] = mod(rhs[col] * inv, M);
    for (int r = 0; r < 6; ++r) {
      if (r == col || V[r][col] == 0) continue;
      Int f = V[r][col];
      for (int c = col; c < 6; ++c) V[r][c] = mod(V[r][c] - f * V[col][c], M);
      rhs[r] = mod(rhs[r] - f * rhs[col], M);
    }
  }
  *out = rhs;
  return true;
}

bool is_cyclotomic7_tower(const TowerPtr& t) {
  if (t->depth() != 1) return false;
  const auto& L = t->levels()[0];
  if (L.deg != 6) return false;
  for (const auto& c : L.coeff)
    if (!(c.size() == 1 && c[0] == 1)) return false;
  return true;
}

SquareDecision decide_square_rational(const Rat& q) {
  SquareDecision d;
  Rat root;
  if (rat_is_square(q, &root)) {
    d.is_square = true;
    d.root = FieldTower::rationals()->constant(root);
  }
  return d;
}

SquareDecision decide_square_cyclo(const FieldElement& c) {
  const TowerPtr& T = c.tower();
  // Scale away denominators: c * D^2 has integer coordinates and the same
  // squareness class; a root scales back by 1/D.
  Int D = 1;
  for (const Rat& q : c.flat())
    mpz_lcm(D.get_mpz_t(), D.get_mpz_t(), q.get_den().get_mpz_t());
  std::array<Int, 6> A;
  for (int i = 0; i < 6; ++i) {
    Rat scaled = c.flat()[i] * Rat(D) * Rat(D);
    if (scaled.get_den() != 1) throw error("decide_square: scaling failed");
    A[i] = scaled.get_num();
  }

  const vector<Int> phi7 = {1, 1, 1, 1, 1, 1, 1};
  int primes_tried = 0;
  Int p = 13;
  while (primes_tried < 48) {
    mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
    if (p % 7 != 1) continue;
    if (D % p == 0) continue;
    ++primes_tried;

    // A primitive 7th root of unity mod p.
    Int r = 0;
    for (Int g = 2;; ++g) {
      Int cand = powmod(g, (p - 1) / 7, p);
      if (cand != 1) {
        r = cand;
        break;
      }
    }
    std::array<Int, 6> roots, v;
    bool skip = false;
    for (int j = 0; j < 6; ++j) {
      roots[j] = powmod(r, j + 1, p);
      Int acc = 0;
      for (int i = 5; i >= 0; --i) acc = mod(acc * roots[j] + A[i], p);
      v[j] = acc;
      if (acc == 0) skip = true;  // p divides a conjugate norm; unusable
    }
    if (skip) continue;
    for (int j = 0; j < 6; ++j) {
      if (powmod(v[j], (p - 1) / 2, p) == p - 1) {
        SquareDecision d;
        d.is_square = false;
        d.witness_prime = p.get_ui();
        d.witness_embedding = j + 1;
        return d;
      }
    }

    // All residues: attempt construction of an exact root.
    std::array<Int, 6> s0;
    for (int j = 0; j < 6; ++j) s0[j] = sqrt_mod_p(v[j], p);

    for (int levels = 4; levels <= 9; ++levels) {
      Int M;
      std::array<Int, 6> rl, sl, vl;
      for (int j = 0; j < 6; ++j) {
        rl[j] = lift_root(phi7, roots[j], p, levels, &M);
        Int acc = 0;
        for (int i = 5; i >= 0; --i) acc = mod(acc * rl[j] + A[i], M);
        vl[j] = acc;
        sl[j] = lift_sqrt(s0[j], vl[j], p, levels);
      }
      std::array<std::array<Int, 6>, 6> V;
      for (int j = 0; j < 6; ++j) {
        Int pw = 1;
        for (int i = 0; i < 6; ++i) {
          V[j][i] = pw;
          pw = mod(pw * rl[j], M);
        }
      }
      for (unsigned mask = 0; mask < 32; ++mask) {
        std::array<Int, 6> rhs;
        rhs[0] = sl[0];
        for (int j = 1; j < 6; ++j)
          rhs[j] = (mask >> (j - 1)) & 1 ? mod(M - sl[j], M) : sl[j];
        std::array<Int, 6> b;
        if (!solve_mod(V, rhs, M, &b)) continue;
        std::vector<Rat> flat(6);
        bool ok = true;
        for (int i = 0; i < 6 && ok; ++i) {
          Rat q;
          ok = rat_reconstruct(b[i], M, &q);
          if (ok) flat[i] = q / Rat(D);
        }
        if (!ok) continue;
        FieldElement cand = T->from_flat(std::move(flat));
        if (cand * cand == c) {
          SquareDecision d;
          d.is_square = true;
          d.root = cand;
          return d;
        }
      }
    }
    // Construction failed at this prime; another prime either witnesses
    // non-squareness or reconstructs successfully.
  }
  throw error("decide_square: undecided after prime budget (unexpected)");
}

}  // namespace

SquareDecision decide_square(const FieldElement& c) {
  const TowerPtr& T = c.tower();
  if (c.is_zero()) {
    SquareDecision d;
    d.is_square = true;
    d.root = T->zero();
    return d;
  }
  if (T->dim() == 1) return decide_square_rational(c.rational_value());
  if (is_cyclotomic7_tower(T)) return decide_square_cyclo(c);
  throw error("decide_square: unsupported tower " + T->descriptor());
}

}  // namespace klein
