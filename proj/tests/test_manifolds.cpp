#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ksw/expr.hpp"
#include "ksw/groebner.hpp"
#include "ksw/manifolds.hpp"

using namespace ksw;

namespace {

std::string thrown_message(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& ex) {
    return ex.what();
  }
  return {};
}

bool mentions(const std::string& message, const std::string& needle) {
  return message.find(needle) != std::string::npos;
}

const Catalog& catalog() {
  static const Catalog cat = load_catalog();
  return cat;
}

bool holds(const Constraint& c, const std::map<std::string, Interval>& env) {
  Interval v = c.expr.eval_interval(env);
  if (c.op == ">0") return v.strictly_positive();
  if (c.op == ">=0") return v.lower() >= 0.0;
  return v.is_nonzero();
}

// One box draw of a parametric family's chart that certifies all chart
// constraints; the returned environment has the definitions filled in.
bool admissible_chart_draw(const Family& f, const Chart& chart,
                           std::uint64_t seed,
                           std::map<std::string, Rational>& values,
                           std::map<std::string, Interval>& env) {
  for (std::uint64_t k = 0; k < 200; ++k) {
    values = sample_admissible(chart.box, {}, 1, seed + k).front();
    env.clear();
    for (const auto& v : values)
      env.emplace(v.first, Interval::from_rational(v.second));
    try {
      bool ok = true;
      for (const auto& d : f.defs) env[d.first] = d.second.eval_interval(env);
      for (const Constraint& c : chart.constraints) ok = ok && holds(c, env);
      if (ok) return true;
    } catch (const std::domain_error&) {
    }
  }
  return false;
}

}  // namespace

TEST_CASE("the family catalog loads and validates") {
  const Catalog& cat = catalog();
  CHECK(cat.families.size() == 16);
  CHECK(cat.unavailable.size() == 2);
  CHECK(cat.state_ring->size() == 6);

  int parametric = 0, extended = 0;
  for (const Family& f : cat.families) {
    parametric += f.parametric ? 1 : 0;
    extended += f.extension ? 1 : 0;
  }
  CHECK(parametric == 5);
  CHECK(extended == 2);

  CHECK(cat.find("117").status == "printed");
  CHECK(cat.find("1133101").status == "certified");
  CHECK(cat.find("D-1").status == "corrected");
  CHECK(cat.find("D-1").circle_match == "1133101");
  CHECK(cat.find("D-2").circle_match == "1133102");
  CHECK_FALSE(cat.find("004401").implicit_relation.empty());
  CHECK_THROWS_AS((void)cat.find("no-such-tag"), std::invalid_argument);
  CHECK(mentions(thrown_message([] { load_catalog("/no/such/file.json"); }),
                 "cannot open"));

  const Family& circle = cat.find("1133101");
  REQUIRE(circle.extension.has_value());
  CHECK(circle.extension->variable == "w");
  CHECK_FALSE(circle.quadric.is_zero());
  CHECK(circle.ring->contains("w"));
}

TEST_CASE("defining relations generate flow-invariant ideals") {
  const Catalog& cat = catalog();
  for (const Family& f : cat.families) {
    if (f.parametric || f.invariance != CheckMode::Exact) continue;
    CAPTURE(f.tag);
    InvarianceReport rep = check_invariance(f);
    CHECK(rep.lie_derivatives.size() ==
          f.equations.size() + (f.extension ? 1 : 0));
    for (const PolyRF& r : rep.residuals) CHECK(r.is_zero());
  }
}

TEST_CASE("invariance certification accepts the known sets and rejects a "
          "non-invariant one") {
  const RingPtr& ring = catalog().state_ring;
  auto var = [&](const char* n) { return PolyRF::variable(ring, n); };

  // the plane {r = 0} and the coordinate set {s1, s2, s3, r3}
  CHECK_NOTHROW(certify_invariance({var("r1"), var("r2"), var("r3")}, ring));
  CHECK_NOTHROW(certify_invariance(
      {var("s1"), var("s2"), var("s3"), var("r3")}, ring));

  PolyRF shifted = var("s1") - PolyRF::constant(ring, RationalFunction(1));
  CHECK(mentions(
      thrown_message([&] { certify_invariance({shifted}, ring); }),
      "not invariant"));
}

TEST_CASE("implicit families are exactly stationary for their weights") {
  const Catalog& cat = catalog();
  int exact = 0;
  for (const Family& f : cat.families) {
    if (f.stationarity != CheckMode::Exact) continue;
    CAPTURE(f.tag);
    ++exact;
    StationarityReport rep = check_stationarity(f);
    CHECK(rep.checked);
    CHECK(rep.ok);
    REQUIRE(rep.residuals.size() == 6);
    for (const PolyRF& r : rep.residuals) CHECK(r.is_zero());
  }
  CHECK(exact == 9);
}

TEST_CASE("parametric families are stationary within interval tolerance") {
  const Catalog& cat = catalog();
  for (const Family& f : cat.families) {
    if (f.stationarity != CheckMode::Numeric) continue;
    CAPTURE(f.tag);
    StationarityReport rep = check_stationarity(f, 10, 1e-30, 1);
    CHECK(rep.checked);
    CHECK(rep.ok);
    CHECK(rep.samples >= 10);
    CHECK(rep.max_residual <= 1e-30);
    CHECK(rep.charts.size() == f.charts.size());
  }
  // two charts contribute ten admissible samples each
  CHECK(check_stationarity(cat.find("004401"), 10, 1e-30, 1).samples == 20);
  // the verdict does not depend on the seed
  CHECK(check_stationarity(cat.find("D-1"), 10, 1e-30, 99).ok);
}

TEST_CASE("raising the evaluation precision tightens the residual bound") {
  const Family& f = catalog().find("004403-2");
  StationarityReport lo = check_stationarity(f, 5, 1.0, 1, 64);
  StationarityReport hi = check_stationarity(f, 5, 1.0, 1, 640);
  REQUIRE(lo.max_residual > 0);
  REQUIRE(lo.max_residual < 1e-6);
  // ten times the precision at least squares the enclosure bound
  CHECK(std::log10(hi.max_residual) <= 2 * std::log10(lo.max_residual) + 2);
}

TEST_CASE("declared reduced fields certify against the ambient flow") {
  const Catalog& cat = catalog();
  for (const Family& f : cat.families) {
    if (f.parametric) continue;
    CAPTURE(f.tag);
    ReducedFieldReport rep = reduce_field(f);
    CHECK(rep.surviving == f.surviving);
  }

  // the flow on {r = 0} rotates (s1, s2) and freezes s3
  const Family& rzero = cat.find("r-zero");
  ReducedFieldReport rep = reduce_field(rzero);
  REQUIRE(rep.components.size() == 3);
  CHECK(rep.components[0].second.to_string() ==
        Expr::parse("s2*s3").to_string());
  CHECK(rep.components[1].second.to_string() ==
        Expr::parse("-s1*s3").to_string());
  CHECK(rep.components[2].second.to_string() ==
        Expr::parse("0").to_string());
}

TEST_CASE("reduction errors name the offending component") {
  Family broken = catalog().find("1133101");
  broken.reduced_components = {{"s2", Expr::parse("1/s3")}};
  CHECK(mentions(thrown_message([&] { reduce_field(broken); }),
                 "chart singularity"));

  broken.reduced_components = {{"s2", Expr::parse("1")}};
  CHECK(mentions(thrown_message([&] { reduce_field(broken); }),
                 "does not reduce"));
}

TEST_CASE("declared reduced integrals are conserved") {
  const Catalog& cat = catalog();
  int declared = 0;
  for (const Family& f : cat.families) {
    if (f.parametric) continue;
    CAPTURE(f.tag);
    for (const Expr& w : f.reduced_integrals) {
      ++declared;
      CHECK(reduced_integral_conserved(f, w));
    }
  }
  CHECK(declared == 4);

  // the 1-D circle field is dissipative: s2 itself is not conserved
  CHECK_FALSE(reduced_integral_conserved(cat.find("1133101"),
                                         Expr::parse("s2")));
  // candidates must live on the reduced manifold
  CHECK(mentions(thrown_message([&] {
                   reduced_integral_conserved(cat.find("117"),
                                              Expr::parse("s1"));
                 }),
                 "does not survive"));
}

TEST_CASE("low-degree polynomial integral bases have the expected size") {
  const Catalog& cat = catalog();

  const Family& rzero = cat.find("r-zero");
  std::vector<PolyRF> basis = polynomial_integrals(rzero, 2);
  REQUIRE(basis.size() == 3);
  PolyRF s3 = PolyRF::variable(rzero.ring, "s3");
  PolyRF circle = PolyRF::variable(rzero.ring, "s1").pow(2) +
                  PolyRF::variable(rzero.ring, "s2").pow(2);
  int found = 0;
  for (const PolyRF& b : basis)
    if (b == s3 || b == s3.pow(2) || b == circle) ++found;
  CHECK(found == 3);

  const Family& angular = cat.find("221100");
  basis = polynomial_integrals(angular, 2);
  REQUIRE(basis.size() == 1);
  CHECK(basis[0] == PolyRF::variable(angular.ring, "r1").pow(2) +
                        PolyRF::variable(angular.ring, "r2").pow(2));

  // the reduced circle field admits no polynomial integral through degree 2
  CHECK(polynomial_integrals(cat.find("1133101"), 2).empty());
  CHECK(polynomial_integrals(cat.find("117"), 2).size() == 2);
  CHECK(polynomial_integrals(cat.find("origin"), 2).empty());
}

TEST_CASE("admissible sampling is deterministic and certified") {
  const Family& f = catalog().find("1133101");
  REQUIRE(f.box.has_value());
  auto a = sample_admissible(*f.box, f.constraints, 5, 42);
  auto b = sample_admissible(*f.box, f.constraints, 5, 42);
  CHECK(a == b);
  CHECK(a != sample_admissible(*f.box, f.constraints, 5, 43));
  for (const auto& point : a)
    for (const auto& r : f.box->ranges) {
      const Rational& v = point.at(r.first);
      CHECK(v >= r.second.first);
      CHECK(v <= r.second.second);
    }

  SampleBox box;
  box.ranges = {{"l0", {Rational(1), Rational(2)}}};
  Constraint impossible{Expr::parse("-l0"), ">0"};
  CHECK(mentions(thrown_message([&] {
                   sample_admissible(box, {impossible}, 3, 1, 5);
                 }),
                 "empty chart"));
}

TEST_CASE("implicitization clears a radical-free smoke map") {
  std::vector<std::pair<std::string, Expr>> images{
      {"x", Expr::parse("t")}, {"y", Expr::parse("t^2")}};
  Implicitization impl = implicitize_images(images);
  CHECK(impl.eliminated == std::vector<std::string>{"t"});
  REQUIRE(impl.relations.size() == 1);
  CHECK(impl.relations[0] == parse_polynomial("x^2 - y", impl.ring));
}

TEST_CASE("the radical curve family implicitizes onto its recorded relation") {
  const Family& f = catalog().find("004401");
  // parameter draws from the chart box; the recorded relation's denominator
  // must not degenerate
  Constraint regular{Expr::parse("alpha^2*l0+2*l2"), "!=0"};
  for (const Chart& chart : f.charts) {
    CAPTURE(chart.name);
    SampleBox params;
    for (const auto& r : chart.box.ranges)
      if (r.first != "s3") params.ranges.push_back(r);
    auto points = sample_admissible(params, {regular}, 5, 11);
    for (const auto& point : points) {
      ImplicitizeOptions opt;
      opt.parameter_values = point;
      Implicitization impl = implicitize(f, chart.name, opt);
      REQUIRE_FALSE(impl.relations.empty());
      CHECK(impl.eliminated.front() == "sigma");

      std::map<std::string, Expr> nums;
      for (const auto& v : point) nums.emplace(v.first, Expr::number(v.second));
      Poly relation =
          f.implicit_relation.substitute(nums).to_polynomial(impl.ring);
      IdealBasisT<Rational> gb =
          buchberger(impl.relations, MonomialOrder::grevlex(impl.ring));
      CHECK(normal_form(relation, gb).is_zero());
    }
  }
}

TEST_CASE("both sign branches of a chart satisfy its implicitization") {
  const Family& f = catalog().find("004401");
  for (const Chart& chart : f.charts) {
    CAPTURE(chart.name);
    std::map<std::string, Rational> values;
    std::map<std::string, Interval> env;
    REQUIRE(admissible_chart_draw(f, chart, 1000, values, env));

    std::map<std::string, Rational> params = values;
    params.erase("s3");
    ImplicitizeOptions opt;
    opt.parameter_values = params;
    Implicitization impl = implicitize(f, chart.name, opt);

    for (long sg : {1L, -1L}) {
      std::map<std::string, Interval> point = env;
      point["sigma"] = Interval::from_long(sg);
      for (const auto& image : chart.map)
        point[image.first] = image.second.eval_interval(point);
      for (const Poly& rel : impl.relations)
        CHECK(evaluate_interval(rel, point).abs_upper() <= 1e-30);
    }
  }
}

TEST_CASE("circle charts implicitize onto the circle families") {
  const Catalog& cat = catalog();
  for (const char* tag : {"D-1", "D-2"}) {
    CAPTURE(tag);
    MatchReport rep = match_implicit_family(cat, cat.find(tag), 10, 5);
    CHECK(rep.ok);
    CHECK(rep.samples == 10);
    CHECK(rep.implicit_tag == cat.find(tag).circle_match);
  }
  CHECK(mentions(thrown_message([&] {
                   match_implicit_family(cat, cat.find("004401"), 2, 1);
                 }),
                 "no implicit counterpart"));
}

TEST_CASE("interval evaluation of polynomials encloses the exact value") {
  RingPtr ring = Ring::make({"x", "y"});
  Poly p = parse_polynomial("x^2*y - 2*x + 1", ring);
  std::map<std::string, Interval> env{
      {"x", Interval::from_rational(Rational(3))},
      {"y", Interval::from_rational(Rational(1, 2))}};
  Interval v = evaluate_interval(p, env);
  // exact value 9/2 - 6 + 1 = -1/2
  CHECK(v.lower() <= -0.5);
  CHECK(v.upper() >= -0.5);
  CHECK(v.abs_upper() <= 0.5);  // dyadic inputs make the enclosure tight

  std::map<std::string, Interval> incomplete{
      {"x", Interval::from_rational(Rational(1))}};
  CHECK(mentions(thrown_message([&] { evaluate_interval(p, incomplete); }),
                 "no interval value"));
}
