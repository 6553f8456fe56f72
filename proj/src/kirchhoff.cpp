#include "ksw/kirchhoff.hpp"

#include <cassert>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ksw/data_dir.hpp"
#include "ksw/qmatrix.hpp"
#include "ksw/expr.hpp"

namespace ksw {
namespace {

Poly parse(const std::string& text, const RingPtr& ring) {
  return parse_polynomial(text, ring);
}

// Lie derivative of a scalar along a vector field: sum_i field[i] * dI/dx_i.
Poly lie_derivative(const ModelSystem& m, const Poly& integral) {
  Poly acc = Poly::zero(m.ring);
  for (std::size_t i = 0; i < m.states.size(); ++i)
    acc += m.field[i] * integral.differentiate(m.states[i]);
  return acc;
}

void check_conserved(const ModelSystem& m) {
  for (std::size_t i = 0; i < m.integrals.size(); ++i) {
    Poly d = lie_derivative(m, m.integrals[i]);
    if (!d.is_zero()) {
      std::string text = d.to_string();
      if (text.size() > 160) text = text.substr(0, 160) + "...";
      throw std::logic_error("model integral " + m.integral_names[i] +
                             " is not conserved; Lie derivative = " + text);
    }
  }
}

ModelSystem build_full_model() {
  ModelSystem m;
  m.ring = Ring::make({"M1", "M2", "M3", "g1", "g2", "g3", "alpha", "beta"});
  m.states = {"M1", "M2", "M3", "g1", "g2", "g3"};
  const char* field[] = {
      "M2*M3 + alpha*(g2*M1 + g1*M2) + 2*beta*(g2*M2 - g3*M3)"
      " - 4*g2*g3*(2*alpha^2 + beta^2) + 4*alpha*beta*g1*g3",
      "4*g1*g3*(alpha^2 + 2*beta^2) - beta*(g2*M1 + g1*M2) - M1*M3"
      " - 2*alpha*(g1*M1 - g3*M3) - 4*alpha*beta*g2*g3",
      "4*g1*g2*(alpha^2 - beta^2) + beta*(g3*M1 + g1*M3)"
      " - alpha*(g3*M2 + g2*M3) - 4*alpha*beta*(g1^2 - g2^2)",
      "g2*(2*M3 + alpha*g1) + beta*(g2^2 - g3^2) - g3*M2",
      "-g1*(2*M3 + beta*g2) - alpha*(g1^2 - g3^2) + g3*M1",
      "g1*(M2 + beta*g3) - g2*(M1 + alpha*g3)",
  };
  for (const char* f : field) m.field.push_back(parse(f, m.ring));
  m.integral_names = {"H", "V1", "V2", "V3"};
  Poly two_h = parse(
      "M1^2 + M2^2 + 2*M3^2 + 2*alpha*(g3*M1 + g1*M3)"
      " + 2*beta*(g3*M2 + g2*M3) + 4*(beta*g1 - alpha*g2)^2"
      " - 4*g3^2*(alpha^2 + beta^2)",
      m.ring);
  m.integrals.push_back(two_h * Rational(1, 2));
  m.integrals.push_back(parse("g1*M1 + g2*M2 + g3*M3", m.ring));
  m.integrals.push_back(parse("g1^2 + g2^2 + g3^2", m.ring));
  m.integrals.push_back(parse(
      "(3*(beta*g1 - alpha*g2)*(beta*M1 - alpha*M2)"
      " + (2*alpha*g1 + 2*beta*g2 + M3)"
      "*((alpha^2 + beta^2)*g3 + alpha*M1 + beta*M2))^2"
      " + (M3 - alpha*g1 - beta*g2)^2*((beta*M1 - alpha*M2)^2"
      " + (alpha^2 + beta^2)*(2*alpha*g1 + 2*beta*g2 + M3)^2)",
      m.ring));
  check_conserved(m);
  return m;
}

ModelSystem build_reduced_model() {
  ModelSystem m;
  m.ring = Ring::make(
      {"s1", "s2", "s3", "r1", "r2", "r3", "alpha", "l0", "l1", "l2", "l3"});
  m.states = {"s1", "s2", "s3", "r1", "r2", "r3"};
  const char* field[] = {
      "(alpha*r1 + s3)*s2 - alpha^2*r2*r3",
      "(alpha*r3 - s1)*(alpha*r1 + s3)",
      "-alpha*r2*s3",
      "(alpha*r1 + 2*s3)*r2 - r3*s2",
      "r3*s1 - r1*(alpha*r1 + 2*s3)",
      "r1*s2 - r2*s1",
  };
  for (const char* f : field) m.field.push_back(parse(f, m.ring));
  m.integral_names = {"H", "V1", "V2", "V3"};
  Poly two_h = parse(
      "s1^2 + s2^2 + 2*s3^2 + 2*alpha*r1*s3 - alpha^2*r3^2", m.ring);
  m.integrals.push_back(two_h * Rational(1, 2));
  m.integrals.push_back(parse("s1*r1 + s2*r2 + s3*r3", m.ring));
  m.integrals.push_back(parse("r1^2 + r2^2 + r3^2", m.ring));
  Poly two_v3 = parse(
      "(alpha*r1*s1 + alpha*r2*s2 + s1*s3)^2"
      " + s3^2*(s2^2 + (alpha*r1 + s3)^2)",
      m.ring);
  m.integrals.push_back(two_v3 * Rational(1, 2));
  check_conserved(m);
  return m;
}

// c with p == c*q, or ok=false when p is not a constant multiple of q.
Rational proportionality(const Poly& p, const Poly& q, bool* ok) {
  *ok = false;
  if (q.is_zero()) return 0;
  if (p.is_zero()) {
    *ok = true;
    return 0;
  }
  const auto& pl = p.terms().back();
  const auto& ql = q.terms().back();
  if (!(pl.first == ql.first)) return 0;
  Rational c = pl.second / ql.second;
  if (p == q * c) {
    *ok = true;
    return c;
  }
  return 0;
}

const char* kPivotText = "alpha^2*l0 + 2*l2";

// Parameter loci that divide coefficients of the shipped reference basis;
// a specialisation on one of these can change the stationary ideal.
const char* kReferenceLociText[] = {
    "1*alpha^4*l0^2 + 4*alpha^2*l0*l2 + 1*alpha^2*l1^2 + 4*l2^2",
    "1*alpha^4*l0^3 + 4*alpha^2*l0^2*l2 + 4*l0*l2^2 + 2*l1^2*l2",
    "1*alpha^16*l0^8 + 16*alpha^14*l0^7*l2 + 1*alpha^14*l0^6*l1^2"
    " + 112*alpha^12*l0^6*l2^2 + 16*alpha^12*l0^5*l1^2*l2"
    " + 448*alpha^10*l0^5*l2^3 + 100*alpha^10*l0^4*l1^2*l2^2"
    " + 4*alpha^10*l0^3*l1^4*l2 + 1120*alpha^8*l0^4*l2^4"
    " + 320*alpha^8*l0^3*l1^2*l2^3 + 24*alpha^8*l0^2*l1^4*l2^2"
    " + 1792*alpha^6*l0^3*l2^5 + 560*alpha^6*l0^2*l1^2*l2^4"
    " + 48*alpha^6*l0*l1^4*l2^3 + 4*alpha^6*l1^6*l2^2"
    " + 1792*alpha^4*l0^2*l2^6 + 512*alpha^4*l0*l1^2*l2^5"
    " + 32*alpha^4*l1^4*l2^4 + 1024*alpha^2*l0*l2^7"
    " + 192*alpha^2*l1^2*l2^6 + 256*l2^8",
};

const char* kDeterminantFactorTexts[] = {
    "l1^2 + 2*l0*l2",
    "alpha^2*l0^2 + l1^2 + 2*l0*l2",
    "alpha^2*l0^2 + l1^2 + 4*l0*l2",
};

}  // namespace

const ModelSystem& full_model() {
  static const ModelSystem m = build_full_model();
  return m;
}

const ModelSystem& reduced_model() {
  static const ModelSystem m = build_reduced_model();
  return m;
}

TransformationReport verify_transformation() {
  const ModelSystem& full = full_model();
  const ModelSystem& red = reduced_model();
  RingPtr big = Ring::make({"M1", "M2", "M3", "g1", "g2", "g3", "s1", "s2",
                            "s3", "r1", "r2", "r3", "alphat", "betat"});
  Poly at = Poly::variable(big, "alphat");
  Poly bt = Poly::variable(big, "betat");
  Rational third(1, 3);
  std::map<std::string, Poly> images;
  images.emplace("M1", Poly::variable(big, "s1") - at * Poly::variable(big, "r3") * third);
  images.emplace("M2", Poly::variable(big, "s2") - bt * Poly::variable(big, "r3") * third);
  images.emplace("M3", Poly::variable(big, "s3") + at * Poly::variable(big, "r1") * third +
                           bt * Poly::variable(big, "r2") * third);
  images.emplace("g1", Poly::variable(big, "r1"));
  images.emplace("g2", Poly::variable(big, "r2"));
  images.emplace("g3", Poly::variable(big, "r3"));
  images.emplace("alpha", at * third);
  images.emplace("beta", bt * third);

  std::vector<Poly> t;  // transported full field, order M1..M3, g1..g3
  t.reserve(6);
  for (const Poly& f : full.field) t.push_back(f.map_vars(big, images));
  // d/dt of the new states: r_i inherits the g_i component, s_i is the
  // matching combination of the M and g3/g1/g2 components.
  std::vector<Poly> trans = {
      t[0] + at * t[5] * third,
      t[1] + bt * t[5] * third,
      t[2] - at * t[3] * third - bt * t[4] * third,
      t[3],
      t[4],
      t[5],
  };
  std::map<std::string, Poly> rename{{"alpha", at}};
  std::map<std::string, Rational> drop_b{{"betat", Rational(0)}};

  TransformationReport rep;
  rep.field_matches = true;
  for (std::size_t i = 0; i < 6; ++i) {
    Poly lhs = trans[i].specialize(drop_b);
    Poly rhs = red.field[i].map_vars(big, rename);
    if (lhs != rhs) rep.field_matches = false;
  }

  std::vector<Poly> ti, ri;
  for (const Poly& p : full.integrals)
    ti.push_back(p.map_vars(big, images).specialize(drop_b));
  for (const Poly& p : red.integrals) ri.push_back(p.map_vars(big, rename));

  rep.v1_exact = (ti[1] == ri[1]);
  rep.v2_exact = (ti[2] == ri[2]);
  rep.v3_scale = proportionality(ti[3], at * at * ri[3], &rep.v3_scaled);
  rep.h_admixture =
      proportionality(ti[0] - ri[0], at * at * ri[2], &rep.h_admixture_pure);
  return rep;
}

const Poly& energy_combination() {
  static const Poly k = [] {
    const ModelSystem& m = reduced_model();
    Poly l0 = Poly::variable(m.ring, "l0");
    Poly l1 = Poly::variable(m.ring, "l1");
    Poly l2 = Poly::variable(m.ring, "l2");
    Poly l3 = Poly::variable(m.ring, "l3");
    return l0 * m.integrals[0] - l1 * m.integrals[1] - l2 * m.integrals[2] -
           l3 * m.integrals[3];
  }();
  return k;
}

const std::vector<Poly>& energy_gradient() {
  static const std::vector<Poly> grad = [] {
    const ModelSystem& m = reduced_model();
    std::vector<Poly> g;
    g.reserve(m.states.size());
    for (const std::string& x : m.states)
      g.push_back(energy_combination().differentiate(x));
    return g;
  }();
  return grad;
}

const StationaryReference& stationary_reference() {
  static const StationaryReference ref = [] {
    const RingPtr& ring = reduced_model().ring;
    StationaryReference r;
    const char* display[] = {
        "l0*s1 - l1*r1 - alpha^2*l3*r1^2*s1 - alpha^2*l3*r1*r2*s2"
        " - 2*alpha*l3*r1*s1*s3 - alpha*l3*r2*s2*s3 - l3*s1*s3^2",
        "l0*s2 - l1*r2 - alpha^2*l3*r1*r2*s1 - alpha^2*l3*r2^2*s2"
        " - alpha*l3*r2*s1*s3 - l3*s2*s3^2",
        "alpha*l0*r1 - l1*r3 - alpha*l3*r1*s1^2 - alpha*l3*r2*s1*s2"
        " + 2*l0*s3 - alpha^2*l3*r1^2*s3 - l3*s1^2*s3 - l3*s2^2*s3"
        " - 3*alpha*l3*r1*s3^2 - 2*l3*s3^3",
        "alpha*l0*s3 - 2*l2*r1 - l1*s1 - alpha^2*l3*r1*s1^2"
        " - alpha^2*l3*r2*s1*s2 - alpha*l3*s1^2*s3 - alpha^2*l3*r1*s3^2"
        " - alpha*l3*s3^3",
        "2*l2*r2 + l1*s2 + alpha^2*l3*r1*s1*s2 + alpha^2*l3*r2*s2^2"
        " + alpha*l3*s1*s2*s3",
        "(alpha^2*l0 + 2*l2)*r3 + l1*s3",
    };
    for (const char* d : display) r.display.push_back(parse(d, ring));
    const std::vector<Poly>& grad = energy_gradient();
    for (std::size_t i = 0; i < grad.size(); ++i) {
      if (grad[i] == r.display[i])
        r.signs.push_back(1);
      else if (grad[i] == -r.display[i])
        r.signs.push_back(-1);
      else
        throw std::logic_error(
            "stationary display form does not match the gradient at index " +
            std::to_string(i));
    }
    return r;
  }();
  return ref;
}

const EliminatedSystem& eliminated_system() {
  static const EliminatedSystem sys = [] {
    const ModelSystem& m = reduced_model();
    EliminatedSystem e;
    e.ring = m.ring;
    e.pivot = parse(kPivotText, m.ring);
    e.r3_numerator = parse("-l1*s3", m.ring);
    const std::vector<Poly>& grad = energy_gradient();
    // The r3 component must be exactly pivot*r3 - r3_numerator (up to sign):
    // that is the equation being solved for r3.
    Poly solved = e.pivot * Poly::variable(m.ring, "r3") - e.r3_numerator;
    if (grad[5] != -solved && grad[5] != solved)
      throw std::logic_error("the r3 gradient component is not the pencil");
    std::map<std::string, Poly> r3_zero{{"r3", Poly::zero(m.ring)}};
    for (std::size_t i = 0; i + 1 < grad.size(); ++i) {
      const Poly& f = grad[i];
      assert(f.degree_in(m.ring->index_of("r3")) <= 1);
      Poly b = f.differentiate("r3");
      Poly a = f.substitute(r3_zero);
      if (b.is_zero()) {
        e.equations.push_back(a);
        e.cleared.push_back(false);
      } else {
        e.equations.push_back(e.pivot * a + e.r3_numerator * b);
        e.cleared.push_back(true);
      }
    }
    return e;
  }();
  return sys;
}

std::vector<Poly> EliminatedSystem::specialize(
    const std::map<std::string, Rational>& params) const {
  for (const char* name : {"alpha", "l0", "l1", "l2", "l3"})
    if (!params.count(name))
      throw std::invalid_argument(std::string("missing value for parameter '") +
                                  name + "'");
  Rational p = pivot.evaluate<Rational>(params);
  if (p == 0)
    throw std::invalid_argument(
        "degenerate pencil: the r3 pivot alpha^2*l0 + 2*l2 vanishes at the "
        "given parameter point");
  std::map<std::string, Rational> values(params.begin(), params.end());
  std::vector<Poly> out;
  out.reserve(equations.size());
  for (const Poly& f : equations)
    out.push_back(f.specialize(values).map_vars(stationary_ring(), {}));
  return out;
}

const RingPtr& stationary_ring() {
  static const RingPtr ring = Ring::make({"r1", "r2", "s2", "s1", "s3"});
  return ring;
}

const std::vector<Poly>& reference_basis() {
  static const std::vector<Poly> basis = [] {
    std::string path = data_file("reference_basis_lex.txt");
    std::ifstream in(path);
    if (!in)
      throw std::invalid_argument("cannot open reference basis file: " + path);
    std::vector<Poly> out;
    std::string line;
    while (std::getline(in, line)) {
      std::size_t start = line.find_first_not_of(" \t\r");
      if (start == std::string::npos || line[start] == '#') continue;
      out.push_back(parse(line, reduced_model().ring));
    }
    if (out.empty())
      throw std::invalid_argument("reference basis file is empty: " + path);
    return out;
  }();
  return basis;
}

std::vector<Poly> specialize_reference(
    const std::map<std::string, Rational>& params) {
  std::vector<Poly> out;
  out.reserve(reference_basis().size());
  for (const Poly& g : reference_basis())
    out.push_back(g.specialize(params).map_vars(stationary_ring(), {}));
  return out;
}

const ZeroJacobianReport& zero_jacobian() {
  static const ZeroJacobianReport rep = [] {
    const ModelSystem& m = reduced_model();
    ZeroJacobianReport r;
    std::map<std::string, Rational> origin;
    for (const std::string& x : m.states) origin.emplace(x, Rational(0));
    const std::vector<Poly>& grad = energy_gradient();
    r.hessian.resize(m.states.size());
    for (std::size_t i = 0; i < m.states.size(); ++i)
      for (std::size_t j = 0; j < m.states.size(); ++j)
        r.hessian[i].push_back(
            grad[i].differentiate(m.states[j]).specialize(origin));
    r.determinant = det_cofactor(r.hessian, Poly::zero(m.ring));
    Poly prod = Poly::constant(m.ring, 1);
    for (const char* f : kDeterminantFactorTexts) {
      r.factors.push_back(parse(f, m.ring));
      prod *= r.factors.back();
    }
    if (r.determinant == -prod)
      r.constant = -1;
    else if (r.determinant == prod)
      r.constant = 1;
    else
      throw std::logic_error(
          "zero-state Hessian determinant does not match its factorisation");
    return r;
  }();
  return rep;
}

const std::vector<Poly>& admissibility_loci() {
  static const std::vector<Poly> loci = [] {
    const RingPtr& ring = reduced_model().ring;
    std::vector<Poly> out;
    for (const char* v : {"alpha", "l0", "l1", "l2", "l3"})
      out.push_back(Poly::variable(ring, v));
    out.push_back(parse(kPivotText, ring));
    for (const char* f : kDeterminantFactorTexts) out.push_back(parse(f, ring));
    for (const char* f : kReferenceLociText) out.push_back(parse(f, ring));
    return out;
  }();
  return loci;
}

bool admissible_sample(const std::map<std::string, Rational>& params) {
  for (const Poly& p : admissibility_loci())
    if (p.evaluate<Rational>(params) == 0) return false;
  return true;
}

}  // namespace ksw
