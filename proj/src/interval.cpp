#include "ksw/interval.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace ksw {

void Interval::init(long prec) {
  prec_ = prec;
  mpfr_init2(lo_, prec);
  mpfr_init2(hi_, prec);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

Interval::Interval(long prec) { init(prec); }

Interval::Interval(const Interval& o) {
  init(o.prec_);
  mpfr_set(lo_, o.lo_, MPFR_RNDD);
  mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& o) noexcept : prec_(o.prec_) {
  lo_[0] = o.lo_[0];
  hi_[0] = o.hi_[0];
  // leave the source in a destructible state
  mpfr_init2(o.lo_, o.prec_);
  mpfr_init2(o.hi_, o.prec_);
}

Interval& Interval::operator=(const Interval& o) {
  if (this == &o) return *this;
  if (prec_ != o.prec_) {
    mpfr_set_prec(lo_, o.prec_);
    mpfr_set_prec(hi_, o.prec_);
    prec_ = o.prec_;
  }
  mpfr_set(lo_, o.lo_, MPFR_RNDD);
  mpfr_set(hi_, o.hi_, MPFR_RNDU);
  return *this;
}

Interval& Interval::operator=(Interval&& o) noexcept {
  std::swap(prec_, o.prec_);
  mpfr_swap(lo_, o.lo_);
  mpfr_swap(hi_, o.hi_);
  return *this;
}

Interval::~Interval() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

Interval Interval::from_rational(const Rational& q, long prec) {
  Interval r(prec);
  mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
  return r;
}

Interval Interval::from_double(double x, long prec) {
  Interval r(prec);
  mpfr_set_d(r.lo_, x, MPFR_RNDD);
  mpfr_set_d(r.hi_, x, MPFR_RNDU);
  return r;
}

Interval Interval::from_long(long x, long prec) {
  Interval r(prec);
  mpfr_set_si(r.lo_, x, MPFR_RNDD);
  mpfr_set_si(r.hi_, x, MPFR_RNDU);
  return r;
}

Interval operator+(const Interval& a, const Interval& b) {
  Interval r(std::max(a.prec_, b.prec_));
  mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

Interval operator-(const Interval& a, const Interval& b) {
  Interval r(std::max(a.prec_, b.prec_));
  mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
  mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
  return r;
}

Interval operator*(const Interval& a, const Interval& b) {
  Interval r(std::max(a.prec_, b.prec_));
  mpfr_t t;
  mpfr_init2(t, r.prec_);
  const mpfr_srcptr xs[2] = {a.lo_, a.hi_};
  const mpfr_srcptr ys[2] = {b.lo_, b.hi_};
  bool first = true;
  for (auto x : xs)
    for (auto y : ys) {
      mpfr_mul(t, x, y, MPFR_RNDD);
      if (first || mpfr_cmp(t, r.lo_) < 0) mpfr_set(r.lo_, t, MPFR_RNDD);
      mpfr_mul(t, x, y, MPFR_RNDU);
      if (first || mpfr_cmp(t, r.hi_) > 0) mpfr_set(r.hi_, t, MPFR_RNDU);
      first = false;
    }
  mpfr_clear(t);
  return r;
}

Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains_zero())
    throw std::domain_error("division by an interval containing zero");
  Interval r(std::max(a.prec_, b.prec_));
  mpfr_t t;
  mpfr_init2(t, r.prec_);
  const mpfr_srcptr xs[2] = {a.lo_, a.hi_};
  const mpfr_srcptr ys[2] = {b.lo_, b.hi_};
  bool first = true;
  for (auto x : xs)
    for (auto y : ys) {
      mpfr_div(t, x, y, MPFR_RNDD);
      if (first || mpfr_cmp(t, r.lo_) < 0) mpfr_set(r.lo_, t, MPFR_RNDD);
      mpfr_div(t, x, y, MPFR_RNDU);
      if (first || mpfr_cmp(t, r.hi_) > 0) mpfr_set(r.hi_, t, MPFR_RNDU);
      first = false;
    }
  mpfr_clear(t);
  return r;
}

Interval Interval::operator-() const {
  Interval r(prec_);
  mpfr_neg(r.lo_, hi_, MPFR_RNDD);
  mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  return r;
}

Interval Interval::sqrt() const {
  if (mpfr_sgn(lo_) < 0)
    throw std::domain_error("square root of an interval not certified >= 0");
  Interval r(prec_);
  mpfr_sqrt(r.lo_, lo_, MPFR_RNDD);
  mpfr_sqrt(r.hi_, hi_, MPFR_RNDU);
  return r;
}

Interval Interval::pow(long e) const {
  if (e == 0) return from_long(1, prec_);
  if (e < 0) return from_long(1, prec_) / pow(-e);
  Interval acc = from_long(1, prec_);
  Interval base = *this;
  unsigned long k = static_cast<unsigned long>(e);
  while (k) {
    if (k & 1ul) acc = acc * base;
    base = base * base;
    k >>= 1ul;
  }
  return acc;
}

bool Interval::contains_zero() const {
  return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0;
}

bool Interval::strictly_positive() const { return mpfr_sgn(lo_) > 0; }
bool Interval::strictly_negative() const { return mpfr_sgn(hi_) < 0; }

double Interval::abs_upper() const {
  double a = mpfr_get_d(lo_, MPFR_RNDD);
  double b = mpfr_get_d(hi_, MPFR_RNDU);
  return std::max(std::abs(a), std::abs(b));
}

double Interval::lower() const { return mpfr_get_d(lo_, MPFR_RNDD); }
double Interval::upper() const { return mpfr_get_d(hi_, MPFR_RNDU); }

double Interval::mid() const { return 0.5 * (lower() + upper()); }

std::string Interval::to_string(int digits) const {
  std::vector<char> buf(digits + 64);
  std::string out = "[";
  mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, lo_);
  out += buf.data();
  out += ", ";
  mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, hi_);
  out += buf.data();
  out += "]";
  return out;
}

}  // namespace ksw
