#pragma once

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ksw/monomial.hpp"
#include "ksw/rational.hpp"
#include "ksw/ring.hpp"

namespace ksw {

// Coefficient interface used by PolynomialT. Specialised for Rational here
// and for RationalFunction in rational_function.hpp.
template <class C>
struct CoeffTraits;

// Conversion from a coefficient into an evaluation value type.
template <class V>
inline V coeff_cast(const Rational& c) {
  return V(c);
}
template <>
inline double coeff_cast<double>(const Rational& c) {
  return c.get_d();
}

template <>
struct CoeffTraits<Rational> {
  static bool is_zero(const Rational& c) { return sgn(c) == 0; }
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  // Sign used only by the printer to choose between " + " and " - ".
  static int print_sign(const Rational& c) { return sgn(c); }
  static std::string to_string_abs(const Rational& c) {
    Rational a = abs(c);
    return a.get_str();
  }
};

// Multivariate polynomial with coefficients in C over a shared Ring.
// Terms are a sorted association list: ascending storage order (plain
// lexicographic in the ring's declared variable order), nonzero coefficients
// only. The zero polynomial has no terms and total degree -1.
template <class C>
class PolynomialT {
 public:
  using Coeff = C;
  using Term = std::pair<Monomial, C>;
  using Terms = std::vector<Term>;

  PolynomialT() = default;
  explicit PolynomialT(RingPtr ring) : ring_(std::move(ring)) {}

  static PolynomialT zero(RingPtr ring) { return PolynomialT(std::move(ring)); }

  static PolynomialT constant(RingPtr ring, C value) {
    PolynomialT p(std::move(ring));
    if (!CoeffTraits<C>::is_zero(value))
      p.terms_.emplace_back(Monomial::one(p.ring_->size()), std::move(value));
    return p;
  }

  static PolynomialT variable(RingPtr ring, const std::string& name) {
    std::size_t i = ring->require(name);
    PolynomialT p(std::move(ring));
    p.terms_.emplace_back(Monomial::var(p.ring_->size(), i),
                          CoeffTraits<C>::one());
    return p;
  }

  static PolynomialT monomial(RingPtr ring, Monomial m, C value) {
    PolynomialT p(std::move(ring));
    if (!CoeffTraits<C>::is_zero(value))
      p.terms_.emplace_back(std::move(m), std::move(value));
    return p;
  }

  // Normalises an arbitrary term list: sorts, merges duplicates, drops zeros.
  static PolynomialT from_terms(RingPtr ring, Terms terms) {
    PolynomialT p(std::move(ring));
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
      return storage_less(a.first, b.first);
    });
    for (auto& t : terms) {
      if (!p.terms_.empty() && p.terms_.back().first == t.first) {
        p.terms_.back().second += t.second;
        if (CoeffTraits<C>::is_zero(p.terms_.back().second))
          p.terms_.pop_back();
      } else if (!CoeffTraits<C>::is_zero(t.second)) {
        p.terms_.push_back(std::move(t));
      }
    }
    return p;
  }

  const RingPtr& ring() const { return ring_; }
  const Terms& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].first.is_one());
  }

  C constant_value() const {
    if (terms_.empty()) return CoeffTraits<C>::zero();
    if (!is_constant())
      throw std::invalid_argument("polynomial is not constant");
    return terms_[0].second;
  }

  // Coefficient of the constant monomial (zero polynomial included).
  C constant_term() const {
    if (!terms_.empty() && terms_.front().first.is_one())
      return terms_.front().second;
    return CoeffTraits<C>::zero();
  }

  // Total degree; -1 for the zero polynomial.
  int degree() const {
    int d = -1;
    for (const auto& t : terms_) d = std::max(d, static_cast<int>(t.first.deg));
    return d;
  }

  int degree_in(std::size_t var) const {
    int d = terms_.empty() ? -1 : 0;
    for (const auto& t : terms_)
      d = std::max(d, static_cast<int>(t.first[var]));
    return d;
  }

  std::set<std::size_t> support() const {
    std::set<std::size_t> vars;
    for (const auto& t : terms_)
      for (std::size_t i = 0; i < ring_->size(); ++i)
        if (t.first[i] > 0) vars.insert(i);
    return vars;
  }

  bool operator==(const PolynomialT& o) const {
    if (!same_ring(ring_, o.ring_)) return false;
    if (terms_.size() != o.terms_.size()) return false;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (!(terms_[i].first == o.terms_[i].first)) return false;
      if (!(terms_[i].second == o.terms_[i].second)) return false;
    }
    return true;
  }
  bool operator!=(const PolynomialT& o) const { return !(*this == o); }

  PolynomialT operator-() const {
    PolynomialT r = *this;
    for (auto& t : r.terms_) t.second = -t.second;
    return r;
  }

  PolynomialT& operator+=(const PolynomialT& o) {
    check_same(o);
    Terms merged;
    merged.reserve(terms_.size() + o.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < terms_.size() && j < o.terms_.size()) {
      auto cmp = storage_cmp(terms_[i].first, o.terms_[j].first);
      if (cmp == std::strong_ordering::less) {
        merged.push_back(std::move(terms_[i++]));
      } else if (cmp == std::strong_ordering::greater) {
        merged.push_back(o.terms_[j++]);
      } else {
        C c = terms_[i].second + o.terms_[j].second;
        if (!CoeffTraits<C>::is_zero(c))
          merged.emplace_back(terms_[i].first, std::move(c));
        ++i, ++j;
      }
    }
    for (; i < terms_.size(); ++i) merged.push_back(std::move(terms_[i]));
    for (; j < o.terms_.size(); ++j) merged.push_back(o.terms_[j]);
    terms_ = std::move(merged);
    return *this;
  }

  PolynomialT& operator-=(const PolynomialT& o) { return *this += (-o); }

  friend PolynomialT operator+(PolynomialT a, const PolynomialT& b) {
    a += b;
    return a;
  }
  friend PolynomialT operator-(PolynomialT a, const PolynomialT& b) {
    a -= b;
    return a;
  }

  // Multiply by a single term.
  PolynomialT times_term(const Monomial& m, const C& c) const {
    PolynomialT r(ring_);
    if (CoeffTraits<C>::is_zero(c)) return r;
    r.terms_.reserve(terms_.size());
    for (const auto& t : terms_) {
      C nc = t.second * c;
      if (!CoeffTraits<C>::is_zero(nc))
        r.terms_.emplace_back(t.first.times(m), std::move(nc));
    }
    return r;
  }

  PolynomialT operator*(const C& c) const {
    return times_term(Monomial::one(ring_->size()), c);
  }

  friend PolynomialT operator*(const PolynomialT& a, const PolynomialT& b) {
    a.check_same(b);
    Terms prod;
    prod.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& ta : a.terms_)
      for (const auto& tb : b.terms_) {
        C c = ta.second * tb.second;
        if (!CoeffTraits<C>::is_zero(c))
          prod.emplace_back(ta.first.times(tb.first), std::move(c));
      }
    return from_terms(a.ring_, std::move(prod));
  }

  PolynomialT& operator*=(const PolynomialT& o) {
    *this = *this * o;
    return *this;
  }

  PolynomialT pow(unsigned e) const {
    PolynomialT acc = constant(ring_, CoeffTraits<C>::one());
    PolynomialT b = *this;
    while (e) {
      if (e & 1u) acc *= b;
      if (e >>= 1u) b *= b;
    }
    return acc;
  }

  PolynomialT differentiate(const std::string& var) const {
    std::size_t i = ring_->require(var);
    Terms out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) {
      unsigned e = t.first[i];
      if (e == 0) continue;
      Monomial m = t.first;
      m.e[i] = static_cast<std::uint16_t>(e - 1);
      m.deg -= 1;
      C c = t.second * C(static_cast<int>(e));
      out.emplace_back(std::move(m), std::move(c));
    }
    // Decrementing the same variable in every term preserves storage order.
    PolynomialT r(ring_);
    r.terms_ = std::move(out);
    return r;
  }

  // Substitute variables by polynomials over the same ring. Variables not in
  // the map are left untouched.
  PolynomialT substitute(
      const std::map<std::string, PolynomialT>& images) const {
    std::map<std::size_t, const PolynomialT*> by_index;
    for (const auto& [name, img] : images) {
      if (!same_ring(ring_, img.ring()))
        throw std::invalid_argument("substitution image over a foreign ring");
      by_index[ring_->require(name)] = &img;
    }
    return substitute_indexed(ring_, by_index);
  }

  // Substitute every variable of this ring into a target ring. Variables
  // without an explicit image must exist in the target ring under the same
  // name and map to themselves.
  PolynomialT map_vars(const RingPtr& target,
                       const std::map<std::string, PolynomialT>& images) const {
    std::map<std::size_t, const PolynomialT*> by_index;
    std::vector<PolynomialT> defaults;
    defaults.reserve(ring_->size());
    for (const auto& [name, img] : images) {
      if (!same_ring(target, img.ring()))
        throw std::invalid_argument("substitution image over a foreign ring");
    }
    for (std::size_t i = 0; i < ring_->size(); ++i) {
      auto it = images.find(ring_->name(i));
      if (it != images.end()) {
        by_index[i] = &it->second;
      } else if (degree_in(i) > 0) {
        if (!target->contains(ring_->name(i)))
          throw std::invalid_argument("no image for variable '" +
                                      ring_->name(i) + "'");
        defaults.push_back(variable(target, ring_->name(i)));
        by_index[i] = &defaults.back();
      }
    }
    // defaults must not reallocate after pointers were taken
    return substitute_indexed(target, by_index);
  }

  // Substitute constants for some variables (partial evaluation).
  PolynomialT specialize(const std::map<std::string, C>& values) const {
    std::map<std::string, PolynomialT> images;
    for (const auto& [name, value] : values)
      images.emplace(name, constant(ring_, value));
    return substitute(images);
  }

  // Full evaluation. V must support construction from C (or from double for
  // V=double), addition and multiplication. Only variables that actually
  // occur need a value.
  template <class V>
  V evaluate(const std::map<std::string, V>& point) const;

  // --- content/primitive part (C = Rational only) -------------------------

  // Positive rational c with (1/c)*this having coprime integer coefficients.
  Rational integer_content() const
    requires std::same_as<C, Rational>
  {
    if (terms_.empty()) return Rational(1);
    mpz_class num_gcd = 0, den_lcm = 1;
    for (const auto& t : terms_) {
      mpz_class n = t.second.get_num();
      mpz_class d = t.second.get_den();
      mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), n.get_mpz_t());
      mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), d.get_mpz_t());
    }
    Rational c(num_gcd, den_lcm);
    c.canonicalize();
    return abs(c);
  }

  PolynomialT primitive_part() const
    requires std::same_as<C, Rational>
  {
    if (terms_.empty()) return *this;
    Rational c = integer_content();
    PolynomialT r = *this;
    for (auto& t : r.terms_) t.second /= c;
    return r;
  }

  // --- printing ------------------------------------------------------------

  // Canonical text form: signed sum of coefficient[*var[^exp]] factors, terms
  // in descending lexicographic order of the exponent vector with respect to
  // the ring's declared variable order. The coefficient is always printed.
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      int sign = CoeffTraits<C>::print_sign(it->second);
      std::string body = CoeffTraits<C>::to_string_abs(it->second);
      for (std::size_t i = 0; i < ring_->size(); ++i) {
        unsigned e = it->first[i];
        if (e == 0) continue;
        body += "*" + ring_->name(i);
        if (e > 1) body += "^" + std::to_string(e);
      }
      if (out.empty())
        out = (sign < 0 ? "-" : "") + body;
      else
        out += (sign < 0 ? " - " : " + ") + body;
    }
    return out;
  }

 private:
  void check_same(const PolynomialT& o) const {
    if (!same_ring(ring_, o.ring_))
      throw std::invalid_argument("polynomial rings differ");
  }

  PolynomialT substitute_indexed(
      const RingPtr& target,
      const std::map<std::size_t, const PolynomialT*>& images) const {
    // Powers of images are cached per variable.
    std::map<std::size_t, std::vector<PolynomialT>> powers;
    PolynomialT acc(target);
    for (const auto& t : terms_) {
      PolynomialT factor =
          constant(target, t.second);  // coefficient carried over
      Monomial rest = Monomial::one(target->size());
      for (std::size_t i = 0; i < ring_->size(); ++i) {
        unsigned e = t.first[i];
        if (e == 0) continue;
        auto it = images.find(i);
        if (it == images.end()) {
          // untouched variable: same ring, keep the exponent in place
          assert(same_ring(ring_, target));
          rest.e[i] = static_cast<std::uint16_t>(rest.e[i] + e);
          rest.deg += e;
          continue;
        }
        auto& tab = powers[i];
        if (tab.empty())
          tab.push_back(constant(target, CoeffTraits<C>::one()));
        while (tab.size() <= e) tab.push_back(tab.back() * (*it->second));
        factor *= tab[e];
      }
      acc += factor.times_term(rest, CoeffTraits<C>::one());
    }
    return acc;
  }

  RingPtr ring_;
  Terms terms_;
};

template <class C>
template <class V>
V PolynomialT<C>::evaluate(const std::map<std::string, V>& point) const {
  V acc = V(0);
  for (const auto& t : terms_) {
    V term = coeff_cast<V>(t.second);
    for (std::size_t i = 0; i < ring_->size(); ++i) {
      unsigned e = t.first[i];
      if (e == 0) continue;
      auto it = point.find(ring_->name(i));
      if (it == point.end())
        throw std::invalid_argument("no value for variable '" +
                                    ring_->name(i) + "'");
      for (unsigned k = 0; k < e; ++k) term = term * it->second;
    }
    acc = acc + term;
  }
  return acc;
}

using Poly = PolynomialT<Rational>;

}  // namespace ksw
