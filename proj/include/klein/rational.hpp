#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace klein {

// Exact arbitrary-precision rational, always in canonical form
// (reduced, positive denominator).  GMP maintains canonicality as long as
// inputs are canonical; every constructor below canonicalizes.
using Rat = mpq_class;
using Int = mpz_class;

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Rat rat(long n, long d = 1) {
  if (d == 0) throw error("rational with zero denominator");
  Rat q(n, d);
  q.canonicalize();
  return q;
}

// Parses "a" or "a/b" with optional sign; rejects anything else.
inline Rat rat_from_string(const std::string& s) {
  if (s.empty()) throw error("empty rational literal");
  Rat q;
  if (q.set_str(s, 10) != 0) throw error("bad rational literal: " + s);
  if (q.get_den() == 0) throw error("rational with zero denominator: " + s);
  q.canonicalize();
  return q;
}

inline std::string rat_str(const Rat& q) { return q.get_str(); }

inline Rat rat_pow(const Rat& b, long e) {
  if (e == 0) return Rat(1);
  if (b == 0 && e < 0) throw error("zero to a negative power");
  Rat num, den;
  unsigned long a = static_cast<unsigned long>(e < 0 ? -e : e);
  mpz_pow_ui(num.get_num().get_mpz_t(), b.get_num().get_mpz_t(), a);
  mpz_pow_ui(num.get_den().get_mpz_t(), b.get_den().get_mpz_t(), a);
  num.canonicalize();
  if (e < 0) {
    den = 1 / num;
    return den;
  }
  return num;
}

// q = r^2 for rational r?  If so store the nonnegative root.
inline bool rat_is_square(const Rat& q, Rat* root = nullptr) {
  if (q < 0) return false;
  if (!mpz_perfect_square_p(q.get_num().get_mpz_t()) ||
      !mpz_perfect_square_p(q.get_den().get_mpz_t()))
    return false;
  if (root) {
    Rat r;
    mpz_sqrt(r.get_num().get_mpz_t(), q.get_num().get_mpz_t());
    mpz_sqrt(r.get_den().get_mpz_t(), q.get_den().get_mpz_t());
    r.canonicalize();
    *root = r;
  }
  return true;
}

inline Int ceil_div(const Int& a, const Int& b) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

// Decimal rendering of an exact rational to `digits` places (truncated),
// for human-readable report columns next to the exact string.
inline std::string rat_decimal(const Rat& q, int digits = 6) {
  Int num = q.get_num(), den = q.get_den();
  bool neg = num < 0;
  if (neg) num = -num;
  Int ip = num / den, rem = num % den;
  std::string out = (neg ? "-" : "") + ip.get_str();
  if (digits <= 0) return out;
  out += '.';
  for (int i = 0; i < digits; ++i) {
    rem *= 10;
    Int d = rem / den;
    rem %= den;
    out += static_cast<char>('0' + d.get_si());
  }
  return out;
}

}  // namespace klein
