#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <string>
#include <vector>

#include "ksw/expr.hpp"
#include "ksw/groebner.hpp"
#include "ksw/kirchhoff.hpp"

using namespace ksw;

namespace {

Poly lie(const ModelSystem& m, const Poly& integral) {
  Poly acc = Poly::zero(m.ring);
  for (std::size_t i = 0; i < m.states.size(); ++i)
    acc += m.field[i] * integral.differentiate(m.states[i]);
  return acc;
}

std::map<std::string, Rational> sample(const Rational& alpha,
                                       const Rational& l0, const Rational& l1,
                                       const Rational& l2,
                                       const Rational& l3) {
  return {{"alpha", alpha}, {"l0", l0}, {"l1", l1}, {"l2", l2}, {"l3", l3}};
}

}  // namespace

TEST_CASE("both systems conserve all four integrals exactly") {
  for (const ModelSystem* m : {&full_model(), &reduced_model()}) {
    REQUIRE(m->field.size() == 6);
    REQUIRE(m->integrals.size() == 4);
    for (const Poly& integral : m->integrals)
      CHECK(lie(*m, integral).is_zero());
  }
  // The second control parameter stays symbolic in the full system.
  CHECK(full_model().ring->contains("beta"));
}

TEST_CASE("gauge transformation matches the reduced system") {
  TransformationReport rep = verify_transformation();
  CHECK(rep.field_matches);
  CHECK(rep.v1_exact);
  CHECK(rep.v2_exact);
  CHECK(rep.v3_scaled);
  CHECK(rep.h_admixture_pure);
  CHECK(rep.v3_scale == Rational(2, 9));
  CHECK(rep.h_admixture == Rational(2, 9));
  CHECK(rep.all_ok());
}

TEST_CASE("published stationary system differs from grad K only by signs") {
  const StationaryReference& ref = stationary_reference();
  REQUIRE(ref.signs.size() == 6);
  CHECK(ref.signs == std::vector<int>{1, 1, 1, 1, -1, -1});
  const std::vector<Poly>& grad = energy_gradient();
  for (std::size_t i = 0; i < 6; ++i) {
    Poly expected = ref.display[i];
    if (ref.signs[i] < 0) expected = -expected;
    CHECK(grad[i] == expected);
  }
}

TEST_CASE("eliminating r3 clears exactly one pivot denominator") {
  const EliminatedSystem& sys = eliminated_system();
  const std::vector<Poly>& grad = energy_gradient();
  REQUIRE(sys.equations.size() == 5);
  CHECK(sys.cleared == std::vector<bool>{false, false, true, false, false});
  std::size_t r3 = sys.ring->index_of("r3");
  for (const Poly& eq : sys.equations) CHECK(eq.degree_in(r3) == 0);

  // A cleared equation differs from pivot*grad[i] by a multiple of the
  // solved component; an untouched one is grad[i] itself.
  for (std::size_t i = 0; i < 5; ++i) {
    if (sys.cleared[i]) {
      Poly b = grad[i].differentiate("r3");
      CHECK(sys.pivot * grad[i] - sys.equations[i] == -(b * grad[5]));
    } else {
      CHECK(sys.equations[i] == grad[i]);
    }
  }

  // Linear coefficient of s3 in the cleared third equation at the origin.
  std::map<std::string, Rational> rest{
      {"s1", 0}, {"s2", 0}, {"r1", 0}, {"r2", 0}};
  Poly lin = sys.equations[2].differentiate("s3").specialize(rest).specialize(
      {{"s3", Rational(0)}});
  CHECK(lin == parse_polynomial("2*alpha^2*l0^2 + 4*l0*l2 + l1^2", sys.ring));
}

TEST_CASE("the one-parameter stationary family satisfies grad K") {
  // Pick l2 on the constraint locus, the rest generic, and a free scale t.
  Rational alpha = 1, l0 = 2, l1 = 3, l3 = 1, t = 6;
  Rational l2("-13/4");  // -(alpha^2*l0^2 + l1^2)/(2*l0)
  std::map<std::string, Rational> point = sample(alpha, l0, l1, l2, l3);
  point["s3"] = t;
  point["s1"] = -l1 * t / (alpha * l0);
  point["s2"] = 0;
  point["r1"] = -t / alpha;
  point["r2"] = 0;
  point["r3"] = l0 * t / l1;
  for (const Poly& g : energy_gradient())
    CHECK(g.evaluate<Rational>(point) == 0);
}

TEST_CASE("zero-state Hessian has the expected entries and determinant") {
  const ZeroJacobianReport& rep = zero_jacobian();
  const RingPtr& ring = reduced_model().ring;
  auto v = [&](const std::string& n) { return Poly::variable(ring, n); };
  // State order: s1, s2, s3, r1, r2, r3.
  CHECK(rep.hessian[0][0] == v("l0"));
  CHECK(rep.hessian[1][1] == v("l0"));
  CHECK(rep.hessian[2][2] == v("l0") * Rational(2));
  CHECK(rep.hessian[3][3] == v("l2") * Rational(-2));
  CHECK(rep.hessian[4][4] == v("l2") * Rational(-2));
  CHECK(rep.hessian[5][5] == parse_polynomial("-alpha^2*l0 - 2*l2", ring));
  CHECK(rep.hessian[0][3] == -v("l1"));
  CHECK(rep.hessian[1][4] == -v("l1"));
  CHECK(rep.hessian[2][5] == -v("l1"));
  CHECK(rep.hessian[2][3] == v("alpha") * v("l0"));
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      CHECK(rep.hessian[i][j] == rep.hessian[j][i]);
  CHECK(rep.constant == Rational(-1));
  Poly prod = Poly::constant(ring, 1);
  for (const Poly& f : rep.factors) prod *= f;
  CHECK(rep.determinant == -prod);
}

TEST_CASE("admissibility screening") {
  CHECK(admissible_sample(sample(Rational("3/2"), 2, 1, Rational("-5/3"), 1)));
  CHECK_FALSE(admissible_sample(sample(0, 2, 1, 1, 1)));        // alpha = 0
  CHECK_FALSE(admissible_sample(sample(1, 2, 1, -1, 1)));       // pivot = 0
  CHECK_FALSE(admissible_sample(sample(1, 2, 1, Rational("-1/4"), 1)));
  // the last point kills l1^2 + 2*l0*l2
  CHECK(admissibility_loci().size() == 12);
}

TEST_CASE("specialisation guards") {
  const EliminatedSystem& sys = eliminated_system();
  CHECK_THROWS_AS(sys.specialize({{"alpha", Rational(1)}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(sys.specialize(sample(1, 2, 1, -1, 1)),
                  std::invalid_argument);  // pivot vanishes
}

TEST_CASE("specialised stationary ideal matches the reference basis") {
  REQUIRE(reference_basis().size() == 8);
  const EliminatedSystem& sys = eliminated_system();
  MonomialOrder order = MonomialOrder::lex(stationary_ring());
  int compared = 0;
  std::vector<std::map<std::string, Rational>> candidates = {
      sample(Rational("3/2"), 2, 1, Rational("-5/3"), 1),
      sample(Rational("-2/3"), 1, Rational("5/2"), 3, Rational("-7/4")),
  };
  for (const auto& params : candidates) {
    REQUIRE(admissible_sample(params));
    IdealBasis mine = buchberger(sys.specialize(params), order);
    IdealBasis ref = buchberger(specialize_reference(params), order);
    CHECK(mine.polys == ref.polys);
    ++compared;
  }
  CHECK(compared == 2);
}
