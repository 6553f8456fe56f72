#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ksw/expr.hpp"
#include "ksw/groebner.hpp"
#include "ksw/interval.hpp"
#include "ksw/kirchhoff.hpp"
#include "ksw/rational_function.hpp"

namespace ksw {

// ---------------------------------------------------------------------------
// Family catalog
//
// Candidate stationary solutions and invariant sets of the reduced system,
// loaded from data/families.json. Implicit families are cut out by
// polynomial relations over the six states (optionally extended by one
// algebraic symbol whose square is a parameter polynomial); parametric
// families chart the set through radical expressions of free variables and
// a +/-1 branch symbol named "sigma".
// ---------------------------------------------------------------------------

// Inequality or non-vanishing condition on a radical expression of the
// parameters (and, inside a chart, its free variables).
struct Constraint {
  Expr expr;
  std::string op;  // ">0" | ">=0" | "!=0"
};

// Closed rational box, one interval per sampled symbol.
struct SampleBox {
  std::vector<std::pair<std::string, std::pair<Rational, Rational>>> ranges;
};

struct Chart {
  std::string name;
  // every state variable -> radical expression over parameters, free
  // variables, named definitions, and "sigma"
  std::vector<std::pair<std::string, Expr>> map;
  SampleBox box;
  std::vector<Constraint> constraints;
};

// Quadratic field extension used by a family: `variable` squares to a
// parameter polynomial and is taken with the nonnegative branch.
struct Extension {
  std::string variable;
  Expr square;
};

enum class CheckMode { Exact, Numeric, None };

struct Family {
  std::string tag, name, status, note;
  bool parametric = false;
  CheckMode stationarity = CheckMode::None;
  CheckMode invariance = CheckMode::None;

  // Ring of the six states, plus the extension symbol when present.
  RingPtr ring;
  std::optional<Extension> extension;
  PolyRF quadric;  // ext^2 - square, zero polynomial without an extension

  // implicit families: defining relations over `ring`
  std::vector<PolyRF> equations;

  // integral weights bound by the family (name -> expression in the others;
  // parametric families may reference their named definitions)
  std::vector<std::pair<std::string, Expr>> weights;

  // declared flow on the family
  std::vector<std::string> surviving;
  std::vector<std::pair<std::string, Expr>> reduced_components;
  std::vector<Expr> reduced_integrals;

  // parametric families
  std::vector<std::string> free_variables;
  std::vector<std::pair<std::string, Expr>> defs;  // evaluated in order
  std::vector<Chart> charts;

  // admissibility data for numeric work on implicit families
  std::optional<SampleBox> box;
  std::vector<Constraint> constraints;

  // tag of the implicit family this chart parameterises, when known
  std::string circle_match;

  // known radical-free relation satisfied by the charts, when recorded
  // (polynomial grammar over states and parameters); empty otherwise
  Expr implicit_relation;
};

struct Catalog {
  RingPtr state_ring;  // the six states, no extension
  std::vector<Family> families;
  std::vector<std::pair<std::string, std::string>> unavailable;  // tag, note

  const Family& find(const std::string& tag) const;
};

// Load and validate a family catalog. With no argument the file
// "families.json" is resolved through the data directory lookup.
Catalog load_catalog();
Catalog load_catalog(const std::string& path);

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

// Groebner basis (graded reverse lexicographic) of the ideal generated by a
// family's defining relations together with its extension quadric.
IdealBasisT<RationalFunction> family_basis(const Family& f,
                                           const GBBudget& budget = {});

struct InvarianceReport {
  std::vector<PolyRF> lie_derivatives;  // one per defining relation
  std::vector<PolyRF> residuals;        // normal forms, all zero
};

// Membership of every Lie derivative in the family's ideal. Throws
// std::invalid_argument("... not invariant ...") carrying the offending
// residual when certification fails.
InvarianceReport certify_invariance(const std::vector<PolyRF>& relations,
                                    const RingPtr& ring,
                                    const GBBudget& budget = {});
InvarianceReport check_invariance(const Family& f, const GBBudget& budget = {});

struct StationarityReport {
  CheckMode mode = CheckMode::None;
  bool checked = false;  // false when the family asserts no stationarity
  bool ok = true;
  // exact mode: normal form of each energy-gradient component
  std::vector<PolyRF> residuals;
  // numeric mode
  int samples = 0;          // admissible samples evaluated over all branches
  double max_residual = 0;  // enclosure bound on |gradient|
  std::vector<std::string> charts;
};

// Stationarity of the energy combination on the family: exact ideal
// membership of the gradient for implicit families, interval evaluation at
// admissible random samples for parametric ones. Throws "empty chart" when
// rejection sampling cannot fill the requested sample count. `prec` is the
// binary precision of the interval evaluation; raising it tightens the
// residual bound.
StationarityReport check_stationarity(const Family& f, int samples = 10,
                                      double tol = 1e-30,
                                      std::uint64_t seed = 1,
                                      long prec = Interval::kDefaultPrec);

struct ReducedFieldReport {
  std::vector<std::string> surviving;
  std::vector<std::pair<std::string, Expr>> components;
};

// Certifies that the ambient field of every surviving variable equals the
// declared reduced component on the family (cross-multiplied ideal
// membership). Throws "chart singularity" when a declared denominator
// vanishes on the family, "does not reduce" on a mismatch.
ReducedFieldReport reduce_field(const Family& f, const GBBudget& budget = {});

// Exact conservation of a candidate integral along the declared reduced
// field (zero Lie derivative modulo the extension quadric). The candidate
// must be polynomial in the surviving variables.
bool reduced_integral_conserved(const Family& f, const Expr& candidate);

// Basis of all nonconstant polynomial integrals of the declared reduced
// field up to the given total degree (coefficients in the parameter field).
std::vector<PolyRF> polynomial_integrals(const Family& f, int max_degree);

// ---------------------------------------------------------------------------
// Admissible sampling
// ---------------------------------------------------------------------------

// Deterministic rejection sampler: rational points from the box, kept when
// every constraint is certified by interval arithmetic. Throws "empty chart"
// when the attempt budget (attempt_factor * count) runs out first.
std::vector<std::map<std::string, Rational>> sample_admissible(
    const SampleBox& box, const std::vector<Constraint>& constraints,
    int count, std::uint64_t seed, int attempt_factor = 200);

// ---------------------------------------------------------------------------
// Implicitization
// ---------------------------------------------------------------------------

struct ImplicitizeOptions {
  // parameters fixed to rational values before eliminating
  std::map<std::string, Rational> parameter_values;
  // named definitions kept as coordinates (with their defining relations)
  // instead of being eliminated; the catalog's circle charts keep "w"
  std::vector<std::string> keep;
  GBBudget budget;
};

struct Implicitization {
  RingPtr ring;  // kept definitions, then states, then free parameters
  std::vector<Poly> relations;          // basis of the elimination ideal
  std::vector<std::string> eliminated;  // branch, radical and free symbols
  GBStats stats;
};

// Radical-free relations satisfied by a coordinate map: one auxiliary
// variable per distinct radicand (plus one for the branch symbol), each with
// its defining quadric, then block elimination of the auxiliaries.
Implicitization implicitize_images(
    const std::vector<std::pair<std::string, Expr>>& images,
    const std::vector<std::pair<std::string, Expr>>& kept_defs = {},
    const std::map<std::string, Rational>& parameter_values = {},
    const GBBudget& budget = {});

Implicitization implicitize(const Family& f, const std::string& chart_name,
                            const ImplicitizeOptions& opt = {});

// ---------------------------------------------------------------------------
// Chart / implicit-family agreement
// ---------------------------------------------------------------------------

struct MatchReport {
  std::string chart_tag, implicit_tag;
  int samples = 0;
  bool ok = false;
};

// At rational parameter samples admissible for the implicit family, the
// chart's implicitization (keeping the shared extension symbol) and the
// implicit family's relations generate the same ideal.
MatchReport match_implicit_family(const Catalog& cat, const Family& chart_fam,
                                  int samples, std::uint64_t seed,
                                  const GBBudget& budget = {});

// Interval enclosure of a rational-coefficient polynomial at a boxed point.
Interval evaluate_interval(const Poly& p,
                           const std::map<std::string, Interval>& env,
                           long prec = Interval::kDefaultPrec);

}  // namespace ksw
