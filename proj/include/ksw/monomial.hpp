#pragma once

#include <array>
#include <cassert>
#include <compare>
#include <cstdint>
#include <numeric>

namespace ksw {

// Upper bound on ring size; the largest ring in this project (states +
// parameters + extension and auxiliary radical variables) stays well below.
inline constexpr std::size_t kMaxVars = 24;

// Dense exponent vector with cached total degree.
struct Monomial {
  std::array<std::uint16_t, kMaxVars> e{};
  std::uint32_t deg = 0;
  std::uint8_t n = 0;  // number of ring variables

  static Monomial one(std::size_t nvars) {
    assert(nvars <= kMaxVars);
    Monomial m;
    m.n = static_cast<std::uint8_t>(nvars);
    return m;
  }

  static Monomial var(std::size_t nvars, std::size_t i, unsigned exp = 1) {
    Monomial m = one(nvars);
    assert(i < nvars);
    m.e[i] = static_cast<std::uint16_t>(exp);
    m.deg = exp;
    return m;
  }

  bool is_one() const { return deg == 0; }

  unsigned operator[](std::size_t i) const { return e[i]; }

  Monomial times(const Monomial& o) const {
    assert(n == o.n);
    Monomial r = *this;
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t s = std::uint32_t(e[i]) + o.e[i];
      assert(s <= 0xffff);
      r.e[i] = static_cast<std::uint16_t>(s);
    }
    r.deg = deg + o.deg;
    return r;
  }

  bool divides(const Monomial& o) const {
    assert(n == o.n);
    if (deg > o.deg) return false;
    for (std::size_t i = 0; i < n; ++i)
      if (e[i] > o.e[i]) return false;
    return true;
  }

  Monomial divided_by(const Monomial& o) const {
    assert(o.divides(*this));
    Monomial r = *this;
    for (std::size_t i = 0; i < n; ++i)
      r.e[i] = static_cast<std::uint16_t>(e[i] - o.e[i]);
    r.deg = deg - o.deg;
    return r;
  }

  static Monomial lcm(const Monomial& a, const Monomial& b) {
    assert(a.n == b.n);
    Monomial r = a;
    r.deg = 0;
    for (std::size_t i = 0; i < a.n; ++i) {
      r.e[i] = a.e[i] > b.e[i] ? a.e[i] : b.e[i];
      r.deg += r.e[i];
    }
    return r;
  }

  bool operator==(const Monomial& o) const {
    if (n != o.n || deg != o.deg) return false;
    for (std::size_t i = 0; i < n; ++i)
      if (e[i] != o.e[i]) return false;
    return true;
  }
};

// Storage order: plain lexicographic comparison of exponent vectors in the
// ring's declared variable order. Polynomials keep their terms sorted
// ascending under this comparison, independent of any Groebner order.
inline std::strong_ordering storage_cmp(const Monomial& a, const Monomial& b) {
  assert(a.n == b.n);
  for (std::size_t i = 0; i < a.n; ++i) {
    if (a.e[i] != b.e[i])
      return a.e[i] < b.e[i] ? std::strong_ordering::less
                             : std::strong_ordering::greater;
  }
  return std::strong_ordering::equal;
}

inline bool storage_less(const Monomial& a, const Monomial& b) {
  return storage_cmp(a, b) == std::strong_ordering::less;
}

}  // namespace ksw
