#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ksw/expr.hpp"
#include "ksw/interval.hpp"
#include "ksw/polynomial.hpp"
#include "ksw/rational_function.hpp"

using namespace ksw;

namespace {

RingPtr demo_ring() { return Ring::make({"r1", "r2", "s1", "s2"}); }

// Small random polynomial over `ring`, at most `terms` terms of degree <= 3.
Poly random_poly(std::mt19937_64& rng, const RingPtr& ring, int terms) {
  std::uniform_int_distribution<int> coeff(-9, 9), den(1, 9), nterms(0, terms),
      expo(0, 2);
  Poly p = Poly::zero(ring);
  int k = nterms(rng);
  for (int t = 0; t < k; ++t) {
    Monomial m = Monomial::one(ring->size());
    for (std::size_t i = 0; i < ring->size(); ++i) {
      unsigned e = static_cast<unsigned>(expo(rng));
      m.e[i] = static_cast<std::uint16_t>(e);
      m.deg += e;
    }
    Rational c(coeff(rng), den(rng));
    c.canonicalize();
    p += Poly::monomial(ring, m, c);
  }
  return p;
}

}  // namespace

TEST_CASE("trinomial square expands to six monomials") {
  auto ring = Ring::make({"x", "y", "z"});
  Poly p = parse_polynomial("(x+y+z)^2", ring);
  CHECK(p.term_count() == 6);
  CHECK(p == parse_polynomial("x^2+y^2+z^2+2*x*y+2*x*z+2*y*z", ring));
}

TEST_CASE("canonical printing follows the strict term grammar") {
  auto ring = demo_ring();
  Poly p = parse_polynomial("r1*s2 - r2*s1", ring);
  CHECK(p.to_string() == "1*r1*s2 - 1*r2*s1");

  // descending lexicographic order of exponent vectors, coefficient mandatory
  Poly q = parse_polynomial("s2 + r1^2 + 3", ring);
  CHECK(q.to_string() == "1*r1^2 + 1*s2 + 3");

  Poly z = Poly::zero(ring);
  CHECK(z.to_string() == "0");
  CHECK(z.degree() == -1);
}

TEST_CASE("parser accepts the superset grammar and round-trips") {
  auto ring = demo_ring();
  const char* variants[] = {
      "1*r1*s2 - 1*r2*s1",
      "r1*s2 - r2*s1",
      "(r1*s2) - (s1*r2)",
      "- r2*s1 + s2*r1",
      "r1*s2 - 1/2*r2*s1 - 0.5*s1*r2",
  };
  Poly expect = parse_polynomial(variants[0], ring);
  for (const char* v : variants) CHECK(parse_polynomial(v, ring) == expect);
}

TEST_CASE("print/parse round trip is the identity on random polynomials") {
  auto ring = demo_ring();
  std::mt19937_64 rng(12345);
  for (int i = 0; i < 300; ++i) {
    Poly p = random_poly(rng, ring, 8);
    CHECK(parse_polynomial(p.to_string(), ring) == p);
  }
}

TEST_CASE("ring axioms hold on random triples") {
  auto ring = demo_ring();
  std::mt19937_64 rng(987654321);
  int checked = 0;
  for (int i = 0; i < 1200; ++i) {
    Poly a = random_poly(rng, ring, 5);
    Poly b = random_poly(rng, ring, 5);
    Poly c = random_poly(rng, ring, 5);
    CHECK(a + b == b + a);
    CHECK((a + b) + c == a + (b + c));
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a - a == Poly::zero(ring));
    ++checked;
  }
  CHECK(checked >= 1000);
}

TEST_CASE("differentiation matches finite differences") {
  auto ring = demo_ring();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> pt(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    Poly p = random_poly(rng, ring, 6);
    Poly dp = p.differentiate("s1");
    std::map<std::string, double> x{{"r1", pt(rng)},
                                    {"r2", pt(rng)},
                                    {"s1", pt(rng)},
                                    {"s2", pt(rng)}};
    const double h = 1e-6;
    auto xp = x, xm = x;
    xp["s1"] += h;
    xm["s1"] -= h;
    double fd = (p.evaluate<double>(xp) - p.evaluate<double>(xm)) / (2 * h);
    double exact = dp.evaluate<double>(x);
    CHECK(std::abs(fd - exact) < 1e-5 * (1.0 + std::abs(exact)));
  }
}

TEST_CASE("derivative rules: product and linearity, exact") {
  auto ring = demo_ring();
  std::mt19937_64 rng(77);
  for (int i = 0; i < 100; ++i) {
    Poly a = random_poly(rng, ring, 5);
    Poly b = random_poly(rng, ring, 5);
    Poly lhs = (a * b).differentiate("r2");
    Poly rhs = a.differentiate("r2") * b + a * b.differentiate("r2");
    CHECK(lhs == rhs);
    CHECK((a + b).differentiate("r2") ==
          a.differentiate("r2") + b.differentiate("r2"));
  }
}

TEST_CASE("substitution composes with evaluation") {
  auto ring = demo_ring();
  Poly p = parse_polynomial("r1^2*s2 - 2*r2 + 3", ring);
  std::map<std::string, Poly> images{
      {"r1", parse_polynomial("s1+s2", ring)},
      {"r2", parse_polynomial("s1*s2", ring)},
  };
  Poly q = p.substitute(images);
  std::map<std::string, Rational> x{{"r1", Rational(0)},
                                    {"r2", Rational(0)},
                                    {"s1", Rational(2)},
                                    {"s2", Rational(-3)}};
  // evaluate p at (r1 -> s1+s2, r2 -> s1*s2)
  auto y = x;
  y["r1"] = Rational(2 - 3);
  y["r2"] = Rational(-6);
  CHECK(q.evaluate<Rational>(x) == p.evaluate<Rational>(y));
}

TEST_CASE("specialization removes a variable exactly") {
  auto ring = demo_ring();
  Poly p = parse_polynomial("r1^2*s2 - 2*r1*r2 + s1", ring);
  Poly q = p.specialize({{"r1", Rational(3)}});
  CHECK(q == parse_polynomial("9*s2 - 6*r2 + s1", ring));
  CHECK(q.degree_in(ring->require("r1")) == 0);
}

TEST_CASE("rational function: content reduction and cross equality") {
  RationalFunction half(Rational(1, 2));
  auto A = parse_rational_function("(l1^2+2*l0*l2)/(2*l0)");
  auto B = parse_rational_function("(2*l1^2+4*l0*l2)/(4*l0)");
  CHECK(A == B);
  CHECK((A - B).is_zero());

  // content-reduced pair: integer coefficients with coprime contents
  const auto& num = A.num();
  const auto& den = A.den();
  CHECK(num.integer_content() * den.integer_content() != Rational(0));
  CHECK(rat_gcd(num.integer_content(), den.integer_content()) == Rational(1));
  for (const auto& t : num.terms()) CHECK(t.second.get_den() == 1);
  for (const auto& t : den.terms()) CHECK(t.second.get_den() == 1);

  auto C = A * half;
  CHECK(C == parse_rational_function("(l1^2+2*l0*l2)/(4*l0)"));
  CHECK_THROWS_AS(A / RationalFunction(), std::invalid_argument);
}

TEST_CASE("rational function field axioms on random elements") {
  std::mt19937_64 rng(5150);
  auto rnd = [&](int) {
    Poly n = random_poly(
        rng, RationalFunction::param_ring(), 3);
    Poly d = random_poly(rng, RationalFunction::param_ring(), 3);
    if (d.is_zero()) d = Poly::constant(RationalFunction::param_ring(),
                                        Rational(1));
    return RationalFunction(n, d);
  };
  for (int i = 0; i < 200; ++i) {
    RationalFunction a = rnd(0), b = rnd(1), c = rnd(2);
    CHECK(a + b == b + a);
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a - a).is_zero());
    if (!b.is_zero()) CHECK((a / b) * b == a);
  }
}

TEST_CASE("polynomial view rejects radicals and non-constant division") {
  auto ring = demo_ring();
  CHECK_THROWS_AS(parse_polynomial("sqrt(r1)", ring), std::invalid_argument);
  CHECK_THROWS_AS(parse_polynomial("r1/s1", ring), std::invalid_argument);
  CHECK_NOTHROW(parse_polynomial("r1/2", ring));
  CHECK_THROWS_AS(parse_polynomial("r1 + q7", ring), std::invalid_argument);
}

TEST_CASE("interval evaluation encloses radical values with certified signs") {
  Expr e = Expr::parse("sqrt(2)*sqrt(2) - 2");
  Interval v = e.eval_interval({});
  CHECK(v.contains_zero());
  CHECK(v.abs_upper() < 1e-60);

  Expr f = Expr::parse("sqrt(l0) - 1");
  std::map<std::string, Interval> env{{"l0", Interval::from_rational(Rational(4))}};
  Interval w = f.eval_interval(env);
  CHECK(w.strictly_positive());

  Expr g = Expr::parse("sqrt(0-l0)");
  CHECK_THROWS_AS(g.eval_interval(env), std::domain_error);
}

TEST_CASE("expression derivative feeds interval evaluation") {
  // d/ds2 of s2^2*sqrt(l0) at s2=3, l0=4 equals 12
  Expr e = Expr::parse("s2^2*sqrt(l0)");
  Expr d = e.differentiate("s2");
  std::map<std::string, Interval> env{
      {"s2", Interval::from_rational(Rational(3))},
      {"l0", Interval::from_rational(Rational(4))}};
  Interval v = d.eval_interval(env);
  Interval err = v - Interval::from_rational(Rational(12));
  CHECK(err.contains_zero());
  CHECK(err.abs_upper() < 1e-60);
}

TEST_CASE("lift to the parameter field splits states from parameters") {
  auto big = Ring::make({"s1", "s2", "alpha", "l0"});
  auto states = Ring::make({"s1", "s2"});
  Poly p = parse_polynomial("alpha*l0*s1^2 - 2*l0^2*s2 + 7", big);
  PolyRF q = lift_to_param_field(p, states);
  CHECK(q.term_count() == 3);
  CHECK(q.to_string() ==
        "(1*alpha*l0)*s1^2 - (2*l0^2)*s2 + 7");

  // binding l0 -> -1/2 * l1^2 substitutes inside coefficients
  auto bound = lift_bind(p, states,
                         {{"l0", parse_rational_function("-l1^2/2")}});
  CHECK(bound == PolyRF::from_terms(
                     states,
                     {{Monomial::var(2, 0, 2),
                       parse_rational_function("-alpha*l1^2/2")},
                      {Monomial::var(2, 1),
                       parse_rational_function("-l1^4/2")},
                      {Monomial::one(2), RationalFunction(Rational(7))}}));
}
