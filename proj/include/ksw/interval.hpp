#pragma once

#include <mpfr.h>

#include <string>

#include "ksw/rational.hpp"

namespace ksw {

// Closed interval with MPFR endpoints and outward (directed) rounding.
// Every arithmetic result encloses the exact real value, so a sign that is
// strict on the interval is certified.
class Interval {
 public:
  static constexpr long kDefaultPrec = 256;  // bits; ~77 decimal digits

  explicit Interval(long prec = kDefaultPrec);
  Interval(const Interval& o);
  Interval(Interval&& o) noexcept;
  Interval& operator=(const Interval& o);
  Interval& operator=(Interval&& o) noexcept;
  ~Interval();

  static Interval from_rational(const Rational& q, long prec = kDefaultPrec);
  static Interval from_double(double x, long prec = kDefaultPrec);
  static Interval from_long(long x, long prec = kDefaultPrec);

  long precision() const { return prec_; }

  friend Interval operator+(const Interval& a, const Interval& b);
  friend Interval operator-(const Interval& a, const Interval& b);
  friend Interval operator*(const Interval& a, const Interval& b);
  // Throws std::domain_error if the divisor interval contains zero.
  friend Interval operator/(const Interval& a, const Interval& b);
  Interval operator-() const;

  // Throws std::domain_error unless the interval is certified nonnegative.
  Interval sqrt() const;
  Interval pow(long e) const;

  bool contains_zero() const;
  bool strictly_positive() const;
  bool strictly_negative() const;
  bool is_nonzero() const { return strictly_positive() || strictly_negative(); }

  // sup |x| over the interval, rounded up.
  double abs_upper() const;
  double lower() const;  // rounded down
  double upper() const;  // rounded up
  double mid() const;
  std::string to_string(int digits = 20) const;

 private:
  void init(long prec);
  mpfr_t lo_, hi_;
  long prec_;
};

}  // namespace ksw
