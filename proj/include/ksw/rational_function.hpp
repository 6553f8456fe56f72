#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "ksw/polynomial.hpp"

namespace ksw {

// Element of the parameter field: a quotient of polynomials over the fixed
// parameter ring. The pair is kept content-reduced (coprime integer contents,
// positive leading denominator coefficient); no polynomial gcd is computed,
// and equality is decided by cross-multiplication.
class RationalFunction {
 public:
  using P = PolynomialT<Rational>;

  // All rational functions live over this one ring.
  static const RingPtr& param_ring() {
    static RingPtr ring =
        Ring::make({"alpha", "l0", "l1", "l2", "l3", "s30"});
    return ring;
  }

  RationalFunction() : RationalFunction(Rational(0)) {}
  RationalFunction(int v) : RationalFunction(Rational(v)) {}
  RationalFunction(const Rational& v)
      : num_(P::constant(param_ring(), v)),
        den_(P::constant(param_ring(), Rational(1))) {}
  explicit RationalFunction(P num) : num_(std::move(num)) {
    den_ = P::constant(param_ring(), Rational(1));
    check_ring();
    normalize();
  }
  RationalFunction(P num, P den) : num_(std::move(num)), den_(std::move(den)) {
    check_ring();
    normalize();
  }

  static RationalFunction variable(const std::string& name) {
    return RationalFunction(P::variable(param_ring(), name));
  }

  const P& num() const { return num_; }
  const P& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return num_ == den_; }

  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  Rational constant_value() const {
    if (!is_constant())
      throw std::invalid_argument("rational function is not constant");
    Rational v = num_.constant_value();
    v /= den_.constant_value();
    return v;
  }

  RationalFunction operator-() const {
    RationalFunction r = *this;
    r.num_ = -r.num_;
    return r;
  }

  friend RationalFunction operator+(const RationalFunction& a,
                                    const RationalFunction& b) {
    return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_,
                            a.den_ * b.den_);
  }
  friend RationalFunction operator-(const RationalFunction& a,
                                    const RationalFunction& b) {
    return RationalFunction(a.num_ * b.den_ - b.num_ * a.den_,
                            a.den_ * b.den_);
  }
  friend RationalFunction operator*(const RationalFunction& a,
                                    const RationalFunction& b) {
    return RationalFunction(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RationalFunction operator/(const RationalFunction& a,
                                    const RationalFunction& b) {
    if (b.is_zero())
      throw std::invalid_argument("division by the zero rational function");
    return RationalFunction(a.num_ * b.den_, a.den_ * b.num_);
  }

  RationalFunction& operator+=(const RationalFunction& o) {
    *this = *this + o;
    return *this;
  }
  RationalFunction& operator-=(const RationalFunction& o) {
    *this = *this - o;
    return *this;
  }
  RationalFunction& operator*=(const RationalFunction& o) {
    *this = *this * o;
    return *this;
  }
  RationalFunction& operator/=(const RationalFunction& o) {
    *this = *this / o;
    return *this;
  }

  RationalFunction inverse() const {
    if (is_zero())
      throw std::invalid_argument("division by the zero rational function");
    return RationalFunction(den_, num_);
  }

  // Cross-multiplication equality; representatives are not required to agree.
  bool operator==(const RationalFunction& o) const {
    return num_ * o.den_ == o.num_ * den_;
  }
  bool operator!=(const RationalFunction& o) const { return !(*this == o); }

  Rational evaluate(const std::map<std::string, Rational>& point) const {
    Rational d = den_.evaluate<Rational>(point);
    if (sgn(d) == 0)
      throw std::invalid_argument(
          "parameter point lies on a denominator locus");
    Rational n = num_.evaluate<Rational>(point);
    n /= d;
    return n;
  }

  double evaluate_double(const std::map<std::string, double>& point) const {
    double d = den_.evaluate<double>(point);
    if (d == 0.0)
      throw std::invalid_argument(
          "parameter point lies on a denominator locus");
    return num_.evaluate<double>(point) / d;
  }

  std::string to_string() const {
    if (den_.is_constant()) return num_.to_string();
    return "(" + num_.to_string() + ")/(" + den_.to_string() + ")";
  }

 private:
  void check_ring() const {
    if (!same_ring(num_.ring(), param_ring()) ||
        !same_ring(den_.ring(), param_ring()))
      throw std::invalid_argument(
          "rational functions live over the parameter ring");
  }

  void normalize() {
    if (den_.is_zero())
      throw std::invalid_argument("zero denominator in rational function");
    if (num_.is_zero()) {
      den_ = P::constant(param_ring(), Rational(1));
      return;
    }
    if (den_.is_constant()) {
      Rational c = den_.constant_value();
      Rational inv = 1 / c;
      num_ = num_ * inv;
      den_ = P::constant(param_ring(), Rational(1));
      return;
    }
    Rational g = rat_gcd(num_.integer_content(), den_.integer_content());
    Rational inv = 1 / g;
    num_ = num_ * inv;
    den_ = den_ * inv;
    if (sgn(den_.terms().back().second) < 0) {
      num_ = -num_;
      den_ = -den_;
    }
  }

  P num_, den_;
};

template <>
struct CoeffTraits<RationalFunction> {
  static bool is_zero(const RationalFunction& c) { return c.is_zero(); }
  static RationalFunction zero() { return RationalFunction(); }
  static RationalFunction one() { return RationalFunction(Rational(1)); }
  static int print_sign(const RationalFunction& c) {
    if (c.is_zero()) return 0;
    return sgn(c.num().terms().back().second);
  }
  static std::string to_string_abs(const RationalFunction& c) {
    RationalFunction a = print_sign(c) < 0 ? -c : c;
    if (a.is_constant()) return rat_to_string(a.constant_value());
    return "(" + a.to_string() + ")";
  }
};

using PolyRF = PolynomialT<RationalFunction>;

// Substitute parameter values (given as rational functions) inside a single
// rational function.
inline RationalFunction rf_substitute(
    const RationalFunction& f,
    const std::map<std::string, RationalFunction>& values) {
  const RingPtr& pr = RationalFunction::param_ring();
  std::map<std::string, RationalFunction> point;
  for (const auto& name : pr->names()) {
    auto it = values.find(name);
    point.emplace(name, it != values.end()
                            ? it->second
                            : RationalFunction::variable(name));
  }
  RationalFunction n = f.num().evaluate<RationalFunction>(point);
  RationalFunction d = f.den().evaluate<RationalFunction>(point);
  return n / d;
}

// Lift a rational-coefficient polynomial over a mixed ring (state variables
// plus parameters) into a polynomial over `state_ring` with coefficients in
// the parameter field. Every variable of the source ring must be either a
// state-ring variable or a parameter.
inline PolyRF lift_to_param_field(const Poly& p, const RingPtr& state_ring) {
  const RingPtr& pr = RationalFunction::param_ring();
  const RingPtr& src = p.ring();
  std::vector<int> state_idx(src->size(), -1), param_idx(src->size(), -1);
  for (std::size_t i = 0; i < src->size(); ++i) {
    state_idx[i] = state_ring->index_of(src->name(i));
    param_idx[i] = pr->index_of(src->name(i));
  }
  std::vector<std::pair<Monomial, RationalFunction>> out;
  out.reserve(p.terms().size());
  for (const auto& t : p.terms()) {
    Monomial ms = Monomial::one(state_ring->size());
    Monomial mp = Monomial::one(pr->size());
    for (std::size_t i = 0; i < src->size(); ++i) {
      unsigned e = t.first[i];
      if (e == 0) continue;
      if (state_idx[i] >= 0) {
        ms.e[state_idx[i]] = static_cast<std::uint16_t>(e);
        ms.deg += e;
      } else if (param_idx[i] >= 0) {
        mp.e[param_idx[i]] = static_cast<std::uint16_t>(e);
        mp.deg += e;
      } else {
        throw std::invalid_argument("variable '" + src->name(i) +
                                    "' is neither a state nor a parameter");
      }
    }
    RationalFunction c(Poly::monomial(pr, mp, t.second));
    out.emplace_back(ms, std::move(c));
  }
  return PolyRF::from_terms(state_ring, std::move(out));
}

// Lift and then substitute parameter bindings (e.g. a weight expressed
// through the other parameters) inside every coefficient.
inline PolyRF lift_bind(const Poly& p, const RingPtr& state_ring,
                        const std::map<std::string, RationalFunction>& bind) {
  PolyRF lifted = lift_to_param_field(p, state_ring);
  if (bind.empty()) return lifted;
  std::vector<std::pair<Monomial, RationalFunction>> out;
  out.reserve(lifted.terms().size());
  for (const auto& t : lifted.terms())
    out.emplace_back(t.first, rf_substitute(t.second, bind));
  return PolyRF::from_terms(state_ring, std::move(out));
}

}  // namespace ksw
