#include "ksw/stability.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ksw/interval.hpp"
#include "ksw/kirchhoff.hpp"

namespace ksw {

namespace {

const RingPtr& state_ring() {
  static const RingPtr ring = Ring::make(reduced_model().states);
  return ring;
}

Rational require(const std::map<std::string, Rational>& params,
                 const std::string& name, const char* what) {
  auto it = params.find(name);
  if (it == params.end())
    throw std::invalid_argument(std::string(what) + " requires a value for '" +
                                name + "'");
  return it->second;
}

// p with every variable of its ring replaced by the corresponding image.
PolyRF substitute_vars(const PolyRF& p, const RingPtr& target,
                       const std::vector<PolyRF>& images) {
  PolyRF acc = PolyRF::zero(target);
  for (const auto& t : p.terms()) {
    PolyRF term = PolyRF::constant(target, t.second);
    for (std::size_t i = 0; i < p.ring()->size(); ++i)
      if (unsigned e = t.first[i]; e > 0) term = term * images[i].pow(e);
    acc = acc + term;
  }
  return acc;
}

// Gram matrix of a homogeneous degree-2 polynomial.
Matrix<RationalFunction> gram_of(const PolyRF& part, const RingPtr& ring) {
  std::size_t n = ring->size();
  Matrix<RationalFunction> m(n, n);
  const RationalFunction half(Rational(1, 2));
  for (const auto& t : part.terms()) {
    int a = -1, b = -1;
    for (std::size_t i = 0; i < n; ++i) {
      unsigned e = t.first[i];
      if (e == 0) continue;
      if (e == 2) {
        a = b = static_cast<int>(i);
      } else if (a < 0) {
        a = static_cast<int>(i);
      } else {
        b = static_cast<int>(i);
      }
    }
    if (a < 0 || b < 0) throw std::logic_error("non-quadratic term in form");
    if (a == b) {
      m.at(a, a) = t.second;
    } else {
      RationalFunction c = t.second * half;
      m.at(a, b) = c;
      m.at(b, a) = c;
    }
  }
  return m;
}

std::vector<RationalFunction> linear_coefficients(const PolyRF& p,
                                                  const RingPtr& ring) {
  std::vector<RationalFunction> row(ring->size(), RationalFunction());
  for (const auto& t : p.terms()) {
    if (t.first.deg != 1) throw std::logic_error("non-linear term in form");
    for (std::size_t i = 0; i < ring->size(); ++i)
      if (t.first[i] == 1) row[i] = t.second;
  }
  return row;
}

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// QuadraticForm

RationalFunction QuadraticForm::coefficient(const std::string& zi,
                                            const std::string& zj) const {
  int a = ring->index_of(zi), b = ring->index_of(zj);
  if (a < 0 || b < 0)
    throw std::invalid_argument("unknown deviation '" + (a < 0 ? zi : zj) +
                                "'");
  if (a == b) return matrix.at(a, a);
  return matrix.at(a, b) * RationalFunction(Rational(2));
}

PolyRF QuadraticForm::polynomial() const {
  std::size_t n = ring->size();
  std::vector<std::pair<Monomial, RationalFunction>> terms;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      RationalFunction c =
          i == j ? matrix.at(i, i) : matrix.at(i, j) * RationalFunction(2);
      if (c.is_zero()) continue;
      Monomial m = i == j ? Monomial::var(n, i, 2)
                          : Monomial::var(n, i).times(Monomial::var(n, j));
      terms.emplace_back(m, std::move(c));
    }
  return PolyRF::from_terms(ring, std::move(terms));
}

Matrix<Rational> QuadraticForm::evaluate(
    const std::map<std::string, Rational>& at) const {
  std::size_t n = ring->size();
  Matrix<Rational> m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m.at(i, j) = matrix.at(i, j).evaluate(at);
  return m;
}

// ---------------------------------------------------------------------------
// Deviation charts

DeviationChart invert_deviations(
    const RingPtr& states,
    const std::vector<std::pair<std::string, Expr>>& deviations) {
  std::size_t n = states->size();
  if (deviations.size() != n)
    throw std::invalid_argument("need exactly one deviation per state");
  std::vector<std::string> z_names;
  std::set<std::string> seen;
  for (const auto& d : deviations) {
    if (!seen.insert(d.first).second)
      throw std::invalid_argument("duplicate deviation '" + d.first + "'");
    if (states->contains(d.first))
      throw std::invalid_argument("deviation '" + d.first +
                                  "' collides with a state variable");
    z_names.push_back(d.first);
  }
  RingPtr z_ring = Ring::make(z_names);

  // z = A x + b over the parameter field
  Matrix<RationalFunction> a(n, n);
  std::vector<RationalFunction> b(n, RationalFunction());
  for (std::size_t i = 0; i < n; ++i) {
    PolyFraction fr = expr_fraction(deviations[i].second, states);
    if (!fr.den.is_constant())
      throw std::invalid_argument("deviation '" + deviations[i].first +
                                  "' divides by a state expression");
    PolyRF form = fr.num * fr.den.constant_value().inverse();
    if (form.degree() > 1)
      throw std::invalid_argument("deviation '" + deviations[i].first +
                                  "' is not affine in the states");
    b[i] = form.constant_term();
    std::vector<RationalFunction> row = linear_coefficients(
        form - PolyRF::constant(states, b[i]), states);
    for (std::size_t j = 0; j < n; ++j) a.at(i, j) = row[j];
  }

  // columns of A^{-1} via one exact solve per unit vector
  Matrix<RationalFunction> inv(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<RationalFunction> unit(n, RationalFunction());
    unit[j] = RationalFunction(1);
    auto col = a.solve(unit);
    if (!col) throw std::invalid_argument("the deviation map is singular");
    for (std::size_t i = 0; i < n; ++i) inv.at(i, j) = (*col)[i];
  }

  DeviationChart chart;
  chart.z_ring = z_ring;
  for (std::size_t i = 0; i < n; ++i) {
    // x_i = sum_j inv[i][j] (z_j - b_j)
    std::vector<std::pair<Monomial, RationalFunction>> terms;
    RationalFunction base;
    for (std::size_t j = 0; j < n; ++j) {
      if (!inv.at(i, j).is_zero())
        terms.emplace_back(Monomial::var(n, j), inv.at(i, j));
      base = base - inv.at(i, j) * b[j];
    }
    if (!base.is_zero()) terms.emplace_back(Monomial::one(n), base);
    chart.states.emplace_back(states->name(i),
                              PolyRF::from_terms(z_ring, std::move(terms)));
  }
  return chart;
}

const std::vector<std::pair<std::string, Expr>>& helical_deviations() {
  static const std::vector<std::pair<std::string, Expr>> devs = {
      {"z1", Expr::parse("r1 + s3/alpha")},
      {"z2", Expr::parse("r2")},
      {"z3", Expr::parse("r3 - l0*s3/l1")},
      {"z4", Expr::parse("s1 + l1*s3/(alpha*l0)")},
      {"z5", Expr::parse("s2")},
      {"z6", Expr::parse("s3 - s30")},
  };
  return devs;
}

const DeviationChart& helical_chart() {
  static const DeviationChart chart =
      invert_deviations(state_ring(), helical_deviations());
  return chart;
}

LocalExpansion expand_through(const PolyRF& quantity,
                              const DeviationChart& chart) {
  const RingPtr& zr = chart.z_ring;
  std::vector<PolyRF> images;
  images.reserve(chart.states.size());
  for (const auto& s : chart.states) images.push_back(s.second);
  PolyRF total = substitute_vars(quantity, zr, images);

  std::vector<std::pair<Monomial, RationalFunction>> lin, quad, high;
  LocalExpansion out;
  for (const auto& t : total.terms()) {
    if (t.first.deg == 0)
      out.value = t.second;
    else if (t.first.deg == 1)
      lin.push_back(t);
    else if (t.first.deg == 2)
      quad.push_back(t);
    else
      high.push_back(t);
  }
  out.linear = PolyRF::from_terms(zr, std::move(lin));
  out.quadratic.ring = zr;
  out.quadratic.matrix = gram_of(PolyRF::from_terms(zr, std::move(quad)), zr);
  out.higher = PolyRF::from_terms(zr, std::move(high));
  return out;
}

QuadraticForm second_variation(const PolyRF& quantity,
                               const DeviationChart& chart) {
  LocalExpansion e = expand_through(quantity, chart);
  if (!e.linear.is_zero()) {
    const auto& t = e.linear.terms().front();
    std::string dir;
    for (std::size_t i = 0; i < chart.z_ring->size(); ++i)
      if (t.first[i] == 1) dir = chart.z_ring->name(i);
    throw std::invalid_argument(
        "the base point is not stationary for the quantity: the first "
        "variation in direction '" +
        dir + "' is '" + t.second.to_string() + "'");
  }
  return e.quadratic;
}

const PolyRF& bound_energy_combination() {
  static const PolyRF k = lift_bind(
      energy_combination(), state_ring(),
      {{"l2", parse_rational_function("-(alpha^2*l0^2+l1^2)/(2*l0)")}});
  return k;
}

const std::vector<std::pair<std::string, PolyRF>>& lifted_integrals() {
  static const std::vector<std::pair<std::string, PolyRF>> lifted = [] {
    const ModelSystem& m = reduced_model();
    std::vector<std::pair<std::string, PolyRF>> out;
    for (std::size_t i = 0; i < m.integrals.size(); ++i)
      out.emplace_back(m.integral_names[i],
                       lift_to_param_field(m.integrals[i], state_ring()));
    return out;
  }();
  return lifted;
}

// ---------------------------------------------------------------------------
// Constraints and restriction

ConstraintSet constraint_variations(
    const std::vector<std::pair<std::string, PolyRF>>& quantities,
    const DeviationChart& chart) {
  ConstraintSet c;
  c.ring = chart.z_ring;
  c.rows = Matrix<RationalFunction>(quantities.size(), chart.z_ring->size());
  for (std::size_t i = 0; i < quantities.size(); ++i) {
    c.names.push_back(quantities[i].first);
    LocalExpansion e = expand_through(quantities[i].second, chart);
    std::vector<RationalFunction> row =
        linear_coefficients(e.linear, chart.z_ring);
    for (std::size_t j = 0; j < row.size(); ++j) c.rows.at(i, j) = row[j];
  }
  c.rank = c.rows.rank();
  return c;
}

QuadraticForm restrict_form(const QuadraticForm& q, const ConstraintSet& c,
                            const std::vector<std::string>& solve_for) {
  if (!same_ring(q.ring, c.ring))
    throw std::invalid_argument("form and constraints use different rings");
  if (c.rank == 0) return q;
  if (solve_for.size() != c.rank)
    throw std::invalid_argument(
        "must eliminate exactly as many deviations as independent "
        "constraints (" +
        std::to_string(c.rank) + ")");

  std::size_t n = q.ring->size(), r = c.rank;
  std::vector<std::size_t> sel;
  std::vector<bool> chosen(n, false);
  for (const auto& name : solve_for) {
    int idx = q.ring->index_of(name);
    if (idx < 0)
      throw std::invalid_argument("unknown deviation '" + name + "'");
    if (chosen[idx])
      throw std::invalid_argument("deviation '" + name + "' listed twice");
    chosen[idx] = true;
    sel.push_back(static_cast<std::size_t>(idx));
  }

  // independent representatives of the constraint rows
  Matrix<RationalFunction> red = c.rows;
  red.rref();

  Matrix<RationalFunction> pivot(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) pivot.at(i, j) = red.at(i, sel[j]);
  if (pivot.det().is_zero())
    throw std::invalid_argument("cannot eliminate '" + join_names(solve_for) +
                                "': the constraint pivot for these "
                                "deviations is singular");

  // solve pivot * x_sel = -rest * x_rest, one kept deviation at a time
  std::vector<std::size_t> rest;
  for (std::size_t j = 0; j < n; ++j)
    if (!chosen[j]) rest.push_back(j);
  RingPtr reduced = Ring::make([&] {
    std::vector<std::string> names;
    for (std::size_t j : rest) names.push_back(q.ring->name(j));
    return names;
  }());

  std::vector<PolyRF> images(n, PolyRF::zero(reduced));
  for (std::size_t k = 0; k < rest.size(); ++k)
    images[rest[k]] = PolyRF::variable(reduced, reduced->name(k));
  for (std::size_t k = 0; k < rest.size(); ++k) {
    std::vector<RationalFunction> rhs(r, RationalFunction());
    for (std::size_t i = 0; i < r; ++i) rhs[i] = -red.at(i, rest[k]);
    auto x = pivot.solve(rhs);
    if (!x)
      throw std::invalid_argument("cannot eliminate '" +
                                  join_names(solve_for) +
                                  "': the constraint pivot for these "
                                  "deviations is singular");
    for (std::size_t i = 0; i < r; ++i)
      if (!(*x)[i].is_zero())
        images[sel[i]] =
            images[sel[i]] +
            PolyRF::variable(reduced, reduced->name(k)) *
                PolyRF::constant(reduced, (*x)[i]);
  }

  PolyRF restricted = substitute_vars(q.polynomial(), reduced, images);
  QuadraticForm out;
  out.ring = reduced;
  out.matrix = gram_of(restricted, reduced);
  return out;
}

// ---------------------------------------------------------------------------
// Sylvester verdicts

StabilityVerdict sylvester(const Matrix<Rational>& symmetric) {
  std::size_t n = symmetric.rows();
  if (symmetric.cols() != n)
    throw std::invalid_argument("sign test of a non-square matrix");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (symmetric.at(i, j) != symmetric.at(j, i))
        throw std::invalid_argument("sign test of a non-symmetric matrix");

  StabilityVerdict v;
  v.minors = symmetric.leading_principal_minors();
  bool any_zero = false, all_pos = true, alternating = true;
  for (std::size_t k = 0; k < n; ++k) {
    int s = sgn(v.minors[k]);
    if (s == 0) any_zero = true;
    if (s <= 0) all_pos = false;
    if (s * (k % 2 == 0 ? -1 : 1) <= 0) alternating = false;
  }
  if (any_zero) {
    v.kind = Definiteness::Degenerate;
    v.note = "inconclusive at second order";
    return v;
  }
  if (all_pos) {
    v.kind = Definiteness::PositiveDefinite;
    return v;
  }
  if (alternating) {
    v.kind = Definiteness::NegativeDefinite;
    return v;
  }
  v.kind = Definiteness::Indefinite;
  CongruenceResult<Rational> diag = congruence_diagonalize(symmetric);
  for (std::size_t k = 0; k < n; ++k) {
    int s = sgn(diag.diagonal[k]);
    if (s == 0) continue;
    std::vector<Rational>& dir = s > 0 ? v.direction_plus : v.direction_minus;
    if (!dir.empty()) continue;
    dir.resize(n);
    for (std::size_t i = 0; i < n; ++i) dir[i] = diag.basis.at(i, k);
  }
  return v;
}

StabilityVerdict sylvester(const QuadraticForm& q,
                           const std::map<std::string, Rational>& at) {
  return sylvester(q.evaluate(at));
}

Rational form_value(const Matrix<Rational>& symmetric,
                    const std::vector<Rational>& direction) {
  std::size_t n = symmetric.rows();
  if (direction.size() != n)
    throw std::invalid_argument("direction length mismatch");
  Rational acc(0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Rational term = symmetric.at(i, j);
      term *= direction[i];
      term *= direction[j];
      acc += term;
    }
  return acc;
}

StabilityVerdict zero_solution_stability(
    const std::map<std::string, Rational>& params) {
  Rational l0 = require(params, "l0", "the zero-solution analysis");
  if (sgn(l0) == 0)
    throw std::invalid_argument(
        "the zero-solution analysis requires a nonzero 'l0'");
  const ZeroJacobianReport& zj = zero_jacobian();
  std::size_t n = zj.hessian.size();
  Matrix<Rational> h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      h.at(i, j) = zj.hessian[i][j].evaluate<Rational>(params);
  return sylvester(h);
}

// ---------------------------------------------------------------------------
// Softening

SofteningReport soften(const std::string& direction,
                       const std::map<std::string, Rational>& params) {
  if (direction != "l0")
    throw std::invalid_argument(
        "softening minimizes the zero-solution condition over 'l0' only");
  Rational alpha = require(params, "alpha", "softening");
  if (sgn(alpha) == 0)
    throw std::invalid_argument("softening requires a nonzero 'alpha'");
  Rational l1 = require(params, "l1", "softening");
  Rational l2 = require(params, "l2", "softening");

  SofteningReport rep;
  rep.gradient = parse_rational_function("2*l2 + 2*alpha^2*l0");
  Rational a2 = alpha * alpha;
  rep.l0 = -l2 / a2;
  rep.value = -(l2 * l2) / a2 - l1 * l1;
  rep.negative = sgn(rep.value) < 0;
  return rep;
}

// ---------------------------------------------------------------------------
// Reduced one-dimensional verdicts

Reduced1DReport reduced_1d_stability(
    const std::map<std::string, Rational>& params,
    const std::string& family_tag) {
  bool plus_branch;
  if (family_tag == "1133101")
    plus_branch = true;
  else if (family_tag == "1133102")
    plus_branch = false;
  else
    throw std::invalid_argument("no reduced circle field for family '" +
                                family_tag + "'");
  Rational alpha = require(params, "alpha", "the reduced analysis");
  Rational l0 = require(params, "l0", "the reduced analysis");
  Rational l1 = require(params, "l1", "the reduced analysis");
  Rational l3 = require(params, "l3", "the reduced analysis");
  if (sgn(l0) * sgn(l3) <= 0)
    throw std::invalid_argument(
        "no real equilibrium: 'l0'/'l3' is not positive");

  Interval ia = Interval::from_rational(alpha);
  Interval il0 = Interval::from_rational(l0);
  Interval il1 = Interval::from_rational(l1);
  Interval w =
      (Interval::from_long(4) * ia.pow(2) * il0.pow(2) + il1.pow(2)).sqrt();
  Interval den = plus_branch ? il1 + w : il1 - w;
  Interval root = Interval::from_rational(l0 / l3).sqrt();

  Reduced1DReport rep;
  rep.family = family_tag;
  for (int sign : {-1, 1}) {
    Interval s2 = sign < 0 ? -root : root;
    Interval num = Interval::from_long(4) * ia * il0 * s2;
    Equilibrium1D e;
    e.s2 = s2.mid();
    Interval prod = num * den;
    if (den.is_nonzero()) e.coefficient = (num / den).mid();
    if (prod.strictly_negative())
      e.verdict = OneDimVerdict::AsymptoticallyStable;
    else if (prod.strictly_positive())
      e.verdict = OneDimVerdict::Unstable;
    else
      e.verdict = OneDimVerdict::Inconclusive;
    rep.equilibria.push_back(e);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Spectra

SpectrumReport analyze_matrix(const Matrix<Rational>& a) {
  std::size_t n = a.rows();
  if (a.cols() != n)
    throw std::invalid_argument("spectrum of a non-square matrix");

  // trace recursion for the monic characteristic polynomial
  std::vector<Rational> c{Rational(1)};
  Matrix<Rational> mk = a;
  for (std::size_t k = 1; k <= n; ++k) {
    if (k > 1) {
      Matrix<Rational> shifted = mk;
      for (std::size_t i = 0; i < n; ++i) shifted.at(i, i) += c.back();
      mk = a * shifted;
    }
    Rational tr(0);
    for (std::size_t i = 0; i < n; ++i) tr += mk.at(i, i);
    tr /= Rational(static_cast<long>(k));
    c.push_back(-tr);
  }

  SpectrumReport rep;
  rep.char_poly = c;
  if (n == 0) return rep;

  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(static_cast<int>(n),
                                               static_cast<int>(n));
  for (std::size_t i = 1; i < n; ++i)
    comp(static_cast<int>(i), static_cast<int>(i - 1)) = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    comp(static_cast<int>(i), static_cast<int>(n - 1)) =
        -rat_to_double(c[n - i]);
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
  if (es.info() != Eigen::Success)
    throw std::logic_error("companion eigen-solve failed");

  double bound = 0;
  for (std::size_t k = 1; k <= n; ++k)
    bound = std::max(bound, std::fabs(rat_to_double(c[k])));
  bound += 1.0;
  for (int i = 0; i < static_cast<int>(n); ++i) {
    std::complex<double> root = es.eigenvalues()(i);
    if (std::abs(root) > bound * (1 + 1e-9))
      throw std::logic_error("root isolation escaped the localization bound");
    rep.roots.push_back(root);
  }
  std::sort(rep.roots.begin(), rep.roots.end(),
            [](const std::complex<double>& x, const std::complex<double>& y) {
              if (x.real() != y.real()) return x.real() > y.real();
              return x.imag() > y.imag();
            });
  rep.max_real = rep.roots.front().real();
  return rep;
}

namespace {

template <class V>
double field_residual(const std::map<std::string, V>& env) {
  const ModelSystem& m = reduced_model();
  double worst = 0;
  for (const Poly& f : m.field) {
    V v = f.template evaluate<V>(env);
    double d;
    if constexpr (std::is_same_v<V, Rational>)
      d = std::fabs(rat_to_double(v));
    else
      d = std::fabs(v);
    worst = std::max(worst, d);
  }
  return worst;
}

[[noreturn]] void throw_not_equilibrium(double resid) {
  std::ostringstream os;
  os << "not an equilibrium: the field residual is " << resid;
  throw std::invalid_argument(os.str());
}

}  // namespace

SpectrumReport fullspace_linearization(
    const std::map<std::string, Rational>& point,
    const std::map<std::string, Rational>& params) {
  const ModelSystem& m = reduced_model();
  std::map<std::string, Rational> env = point;
  env.insert(params.begin(), params.end());
  double resid = field_residual(env);
  if (resid > 1e-10) throw_not_equilibrium(resid);

  std::size_t n = m.states.size();
  Matrix<Rational> jac(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      jac.at(i, j) =
          m.field[i].differentiate(m.states[j]).evaluate<Rational>(env);
  SpectrumReport rep = analyze_matrix(jac);
  rep.residual = resid;
  return rep;
}

SpectrumReport fullspace_linearization(
    const std::map<std::string, double>& point, double alpha) {
  const ModelSystem& m = reduced_model();
  std::map<std::string, double> env = point;
  env.emplace("alpha", alpha);
  double resid = field_residual(env);
  if (resid > 1e-10) throw_not_equilibrium(resid);

  std::size_t n = m.states.size();
  Eigen::MatrixXd jac(static_cast<int>(n), static_cast<int>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      jac(static_cast<int>(i), static_cast<int>(j)) =
          m.field[i].differentiate(m.states[j]).evaluate<double>(env);
  Eigen::EigenSolver<Eigen::MatrixXd> es(jac);
  if (es.info() != Eigen::Success)
    throw std::logic_error("jacobian eigen-solve failed");

  // Gershgorin bound of the Jacobian itself
  double bound = 0;
  for (int i = 0; i < static_cast<int>(n); ++i) {
    double radius = 0;
    for (int j = 0; j < static_cast<int>(n); ++j) radius += std::fabs(jac(i, j));
    bound = std::max(bound, radius);
  }
  SpectrumReport rep;
  rep.residual = resid;
  for (int i = 0; i < static_cast<int>(n); ++i) {
    std::complex<double> root = es.eigenvalues()(i);
    if (std::abs(root) > bound * (1 + 1e-9) + 1e-12)
      throw std::logic_error("root isolation escaped the localization bound");
    rep.roots.push_back(root);
  }
  std::sort(rep.roots.begin(), rep.roots.end(),
            [](const std::complex<double>& x, const std::complex<double>& y) {
              if (x.real() != y.real()) return x.real() > y.real();
              return x.imag() > y.imag();
            });
  rep.max_real = rep.roots.front().real();
  return rep;
}

std::map<std::string, double> helical_circle_point(
    const std::map<std::string, Rational>& params, int sign) {
  Rational alpha = require(params, "alpha", "the helical lift");
  Rational l0 = require(params, "l0", "the helical lift");
  Rational l1 = require(params, "l1", "the helical lift");
  Rational l3 = require(params, "l3", "the helical lift");
  if (sgn(alpha) == 0)
    throw std::invalid_argument("the helical lift requires a nonzero 'alpha'");
  if (sgn(l0) * sgn(l3) <= 0)
    throw std::invalid_argument(
        "the helical lift requires 'l0'*'l3' to be positive");

  double a = rat_to_double(alpha), d0 = rat_to_double(l0),
         d1 = rat_to_double(l1);
  double w = std::sqrt(4 * a * a * d0 * d0 + d1 * d1);
  double s2 = (sign < 0 ? -1.0 : 1.0) * std::sqrt(rat_to_double(l0 / l3));
  double r2 = -(d1 - w) * s2 / (2 * a * a * d0);
  return {{"s1", 0.0}, {"s2", s2}, {"s3", 0.0},
          {"r1", 0.0}, {"r2", r2}, {"r3", 0.0}};
}

}  // namespace ksw
