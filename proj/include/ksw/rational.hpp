#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace ksw {

// Exact rational scalar. All core algebra is carried out over this type;
// floating point appears only in the numeric integrators and eigensolvers.
using Rational = mpq_class;

inline Rational rat_from_string(const std::string& text) {
  mpq_class q;
  if (q.set_str(text, 10) != 0)
    throw std::invalid_argument("not a rational literal: '" + text + "'");
  q.canonicalize();
  return q;
}

inline std::string rat_to_string(const Rational& q) { return q.get_str(); }

inline Rational rat_pow(const Rational& base, unsigned exp) {
  Rational acc(1), b = base;
  unsigned e = exp;
  while (e) {
    if (e & 1u) acc *= b;
    b *= b;
    e >>= 1u;
  }
  return acc;
}

inline int rat_sign(const Rational& q) { return sgn(q); }

inline Rational rat_abs(const Rational& q) { return abs(q); }

inline double rat_to_double(const Rational& q) { return q.get_d(); }

// gcd on positive rationals: gcd(a/b, c/d) = gcd(a*d, c*b) / (b*d).
inline Rational rat_gcd(const Rational& x, const Rational& y) {
  mpz_class a = abs(x.get_num()) * y.get_den();
  mpz_class b = abs(y.get_num()) * x.get_den();
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  Rational r(g, x.get_den() * y.get_den());
  r.canonicalize();
  return r;
}

}  // namespace ksw
