#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "ksw/expr.hpp"
#include "ksw/qmatrix.hpp"
#include "ksw/rational_function.hpp"

// Second-variation stability analysis: quadratic forms of conserved
// quantities at stationary points, their restriction to the joint level set
// of the first integrals, Sylvester sign tests with re-checkable witnesses,
// the one-dimensional reduced verdicts on the circle families, and the
// full-space linearization spectrum.  Exact arithmetic throughout except for
// root isolation, which is double-precision with an exact characteristic
// polynomial when the input is rational.

namespace ksw {

// ---------------------------------------------------------------------------
// Quadratic forms over the parameter field

struct QuadraticForm {
  RingPtr ring;                     // deviation coordinates z1..zn
  Matrix<RationalFunction> matrix;  // symmetric Gram matrix of the form

  // Coefficient of the monomial zi*zj in the form itself (the full cross
  // coefficient for i != j, i.e. twice the Gram entry).
  RationalFunction coefficient(const std::string& zi,
                               const std::string& zj) const;
  // The form as a degree-2 polynomial in the deviations.
  PolyRF polynomial() const;
  // Gram matrix evaluated at a rational parameter point.
  Matrix<Rational> evaluate(const std::map<std::string, Rational>& at) const;
};

// ---------------------------------------------------------------------------
// Deviation charts: affine changes of coordinates around a base point

struct DeviationChart {
  RingPtr z_ring;  // deviation names, declared order
  // Each ambient state as a degree-<=1 polynomial in the deviations; the
  // constant parts are the base point (rational functions of the parameters).
  std::vector<std::pair<std::string, PolyRF>> states;
};

// Invert declared deviation forms z_i = f_i(states; parameters): each f_i
// must be affine in the states and the state-coefficient matrix invertible
// over the parameter field.  Throws std::invalid_argument otherwise.
DeviationChart invert_deviations(
    const RingPtr& state_ring,
    const std::vector<std::pair<std::string, Expr>>& deviations);

// The printed deviation forms around the helical base point (base
// parametrized by s30), and their inverted chart over the reduced states.
const std::vector<std::pair<std::string, Expr>>& helical_deviations();
const DeviationChart& helical_chart();

// Degree buckets of a state-space quantity expanded through a chart.
struct LocalExpansion {
  RationalFunction value;   // value at the base point
  PolyRF linear;            // first variation
  QuadraticForm quadratic;  // second variation
  PolyRF higher;            // everything of degree >= 3
};
LocalExpansion expand_through(const PolyRF& quantity,
                              const DeviationChart& chart);

// Second variation of a stationary quantity.  Throws std::invalid_argument
// citing the first deviation with a nonzero first-variation coefficient when
// the base point is not stationary for the quantity.
QuadraticForm second_variation(const PolyRF& quantity,
                               const DeviationChart& chart);

// The weighted combination of the conserved quantities with the l2 weight
// bound to the helical family's value, lifted over the reduced states.
const PolyRF& bound_energy_combination();

// The model's conserved quantities lifted over the reduced states,
// paired with their names ("H", "V1", "V2", "V3").
const std::vector<std::pair<std::string, PolyRF>>& lifted_integrals();

// ---------------------------------------------------------------------------
// Linear constraints from the first variations of the integrals

struct ConstraintSet {
  RingPtr ring;                    // deviation ring
  std::vector<std::string> names;  // source quantity of each row
  Matrix<RationalFunction> rows;   // one linear form per row
  std::size_t rank = 0;
};

// First variations of the given quantities through the chart; quantities
// whose first variation vanishes identically contribute zero rows (the rank
// accounts for that).
ConstraintSet constraint_variations(
    const std::vector<std::pair<std::string, PolyRF>>& quantities,
    const DeviationChart& chart);

// Restrict a quadratic form to the null space of the constraints by solving
// for the named deviations and substituting.  Requires exactly rank-many
// variables; a rank-0 constraint set returns the form unchanged.  Throws
// "cannot eliminate" naming the singular pivot determinant when the chosen
// variables are not solvable.
QuadraticForm restrict_form(const QuadraticForm& q, const ConstraintSet& c,
                            const std::vector<std::string>& solve_for);

// ---------------------------------------------------------------------------
// Sylvester sign tests

enum class Definiteness {
  PositiveDefinite,
  NegativeDefinite,
  Indefinite,
  Degenerate,
};

struct StabilityVerdict {
  Definiteness kind = Definiteness::Degenerate;
  std::vector<Rational> minors;  // leading principal minors, sizes 1..n
  // Re-checkable witnesses for an indefinite form: directions with positive
  // and negative value (empty otherwise).
  std::vector<Rational> direction_plus;
  std::vector<Rational> direction_minus;
  std::string note;  // "inconclusive at second order" when degenerate
};

// Classify a symmetric rational matrix by its leading principal minors;
// witnesses come from an exact congruence diagonalization.
StabilityVerdict sylvester(const Matrix<Rational>& symmetric);
// The same after evaluating a parametric form at a rational point.
StabilityVerdict sylvester(const QuadraticForm& q,
                           const std::map<std::string, Rational>& at);

// Value of the (re-checkable) quadratic form at a rational direction.
Rational form_value(const Matrix<Rational>& symmetric,
                    const std::vector<Rational>& direction);

// Sign-definiteness of the origin Hessian of the weighted combination at a
// numeric parameter point (all five weights required, l0 nonzero).
StabilityVerdict zero_solution_stability(
    const std::map<std::string, Rational>& params);

// ---------------------------------------------------------------------------
// Parametric softening of the zero-solution condition

struct SofteningReport {
  RationalFunction gradient;  // derivative of the condition polynomial
  Rational l0;                // stationary value of the softened weight
  Rational value;             // condition polynomial at the stationary weight
  bool negative = false;      // strict satisfaction at the stationary weight
};

// Minimize the zero-solution condition polynomial over one weight.  Only the
// "l0" direction is meaningful; requires alpha != 0 and the l1, l2 values.
SofteningReport soften(const std::string& direction,
                       const std::map<std::string, Rational>& params);

// ---------------------------------------------------------------------------
// Reduced one-dimensional stability on the circle families

enum class OneDimVerdict { AsymptoticallyStable, Unstable, Inconclusive };

struct Equilibrium1D {
  double s2 = 0;           // equilibrium of the reduced equation
  double coefficient = 0;  // linear coefficient of the disturbed equation
  OneDimVerdict verdict = OneDimVerdict::Inconclusive;
};

struct Reduced1DReport {
  std::string family;  // which circle family's reduced field was used
  std::vector<Equilibrium1D> equilibria;  // negative root first
};

// Equilibria s2 = -+sqrt(l0/l3) of the reduced circle field and the sign of
// the linearization there, certified with interval arithmetic.  The family
// tag selects the sign branch of the radical in the field's denominator.
// Throws "no real equilibrium" when l0/l3 <= 0.
Reduced1DReport reduced_1d_stability(
    const std::map<std::string, Rational>& params,
    const std::string& family_tag = "1133101");

// ---------------------------------------------------------------------------
// Full-space linearization

struct SpectrumReport {
  // Monic characteristic polynomial, coefficients in degree-descending order
  // including the leading 1; filled only on the exact (rational) path.
  std::vector<Rational> char_poly;
  std::vector<std::complex<double>> roots;
  double max_real = 0;
  double residual = 0;  // sup-norm of the vector field at the point
};

// Exact characteristic polynomial (trace recursion) of a rational matrix,
// roots isolated from the companion matrix at double precision and checked
// against the Gershgorin bound.
SpectrumReport analyze_matrix(const Matrix<Rational>& a);

// Spectrum of the vector-field Jacobian at a stationary point, exact path.
// `params` must provide "alpha"; the point must give all six states and have
// field residual at most 1e-10 (else std::invalid_argument).
SpectrumReport fullspace_linearization(
    const std::map<std::string, Rational>& point,
    const std::map<std::string, Rational>& params);

// Double-precision path for irrational stationary points.
SpectrumReport fullspace_linearization(const std::map<std::string, double>& point,
                                       double alpha);

// The full-space stationary point lifted from a circle-family equilibrium
// s2 = sign * sqrt(l0/l3); requires l0*l3 > 0 and alpha != 0.
std::map<std::string, double> helical_circle_point(
    const std::map<std::string, Rational>& params, int sign = -1);

}  // namespace ksw
