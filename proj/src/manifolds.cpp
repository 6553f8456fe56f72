#include "ksw/manifolds.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "ksw/data_dir.hpp"
#include "ksw/qmatrix.hpp"

namespace ksw {
namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// JSON helpers
// ---------------------------------------------------------------------------

const json& field(const json& j, const char* key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end())
    throw std::invalid_argument(ctx + ": missing field '" + key + "'");
  return *it;
}

std::string str_field(const json& j, const char* key, const std::string& ctx) {
  const json& v = field(j, key, ctx);
  if (!v.is_string())
    throw std::invalid_argument(ctx + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

std::string opt_str_field(const json& j, const char* key) {
  auto it = j.find(key);
  return it != j.end() && it->is_string() ? it->get<std::string>()
                                          : std::string();
}

Expr parse_expr_in(const std::string& text,
                   const std::set<std::string>& allowed,
                   const std::string& ctx) {
  Expr e;
  try {
    e = Expr::parse(text);
  } catch (const std::exception& ex) {
    throw std::invalid_argument(ctx + ": " + ex.what());
  }
  for (const std::string& s : e.symbols())
    if (!allowed.count(s))
      throw std::invalid_argument(ctx + ": unknown symbol '" + s + "' in '" +
                                  text + "'");
  return e;
}

CheckMode mode_of(const std::string& s, const std::string& ctx) {
  if (s == "exact") return CheckMode::Exact;
  if (s == "numeric") return CheckMode::Numeric;
  if (s == "none") return CheckMode::None;
  throw std::invalid_argument(ctx + ": unknown check mode '" + s + "'");
}

SampleBox parse_box(const json& jb, const std::set<std::string>& allowed,
                    const std::string& ctx) {
  if (!jb.is_object())
    throw std::invalid_argument(ctx + ": sample box must be an object");
  SampleBox box;
  for (auto it = jb.begin(); it != jb.end(); ++it) {
    if (!allowed.count(it.key()))
      throw std::invalid_argument(ctx + ": box variable '" + it.key() +
                                  "' is not samplable here");
    const json& r = it.value();
    if (!r.is_array() || r.size() != 2 || !r[0].is_string() ||
        !r[1].is_string())
      throw std::invalid_argument(ctx + ": range of '" + it.key() +
                                  "' must be a [lo, hi] pair of rationals");
    Rational lo = rat_from_string(r[0].get<std::string>());
    Rational hi = rat_from_string(r[1].get<std::string>());
    if (lo > hi)
      throw std::invalid_argument(ctx + ": empty range for '" + it.key() +
                                  "'");
    box.ranges.emplace_back(it.key(), std::make_pair(lo, hi));
  }
  if (box.ranges.empty())
    throw std::invalid_argument(ctx + ": sample box is empty");
  return box;
}

std::vector<Constraint> parse_constraints(const json& jc,
                                          const std::set<std::string>& allowed,
                                          const std::string& ctx) {
  if (!jc.is_array())
    throw std::invalid_argument(ctx + ": constraints must be an array");
  std::vector<Constraint> out;
  for (const json& item : jc) {
    Constraint c;
    c.op = str_field(item, "op", ctx);
    if (c.op != ">0" && c.op != ">=0" && c.op != "!=0")
      throw std::invalid_argument(ctx + ": unknown constraint operator '" +
                                  c.op + "'");
    c.expr = parse_expr_in(str_field(item, "expr", ctx), allowed, ctx);
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Catalog loading
// ---------------------------------------------------------------------------

Family parse_family(const json& jf, const RingPtr& state_ring,
                    const std::set<std::string>& params,
                    const std::set<std::string>& ext_symbols) {
  Family f;
  f.tag = str_field(jf, "tag", "family catalog");
  const std::string ctx = "family '" + f.tag + "'";
  f.name = str_field(jf, "name", ctx);
  f.status = str_field(jf, "status", ctx);
  if (f.status != "printed" && f.status != "corrected" &&
      f.status != "certified" && f.status != "supplementary")
    throw std::invalid_argument(ctx + ": unknown status '" + f.status + "'");
  f.note = opt_str_field(jf, "note");

  const std::string kind = str_field(jf, "kind", ctx);
  if (kind != "implicit" && kind != "parametric")
    throw std::invalid_argument(ctx + ": unknown kind '" + kind + "'");
  f.parametric = kind == "parametric";

  const json& checks = field(jf, "checks", ctx);
  f.stationarity = mode_of(str_field(checks, "stationarity", ctx), ctx);
  f.invariance = mode_of(str_field(checks, "invariance", ctx), ctx);

  std::set<std::string> states(state_ring->names().begin(),
                               state_ring->names().end());

  if (!f.parametric) {
    // ring, extension and quadric
    std::set<std::string> eq_syms = states;
    eq_syms.insert(params.begin(), params.end());
    if (jf.contains("extension")) {
      const json& je = jf.at("extension");
      Extension ext;
      ext.variable = str_field(je, "variable", ctx);
      if (!ext_symbols.count(ext.variable))
        throw std::invalid_argument(ctx + ": extension symbol '" +
                                    ext.variable +
                                    "' is not declared by the catalog");
      const std::string sign = str_field(je, "sign", ctx);
      if (sign != ">=0")
        throw std::invalid_argument(ctx + ": extension sign must be '>=0'");
      ext.square = parse_expr_in(str_field(je, "square", ctx), params,
                                 ctx + " extension square");
      f.ring = state_ring->extended({ext.variable});
      eq_syms.insert(ext.variable);
      f.extension = std::move(ext);
    } else {
      f.ring = state_ring;
    }
    if (f.extension) {
      RationalFunction sq = f.extension->square.to_rational_function();
      f.quadric = PolyRF::variable(f.ring, f.extension->variable).pow(2) -
                  PolyRF::constant(f.ring, sq);
    } else {
      f.quadric = PolyRF(f.ring);
    }

    // defining relations
    const json& jeqs = field(jf, "equations", ctx);
    if (!jeqs.is_array() || jeqs.empty())
      throw std::invalid_argument(ctx + ": equations must be a nonempty array");
    for (const json& je : jeqs) {
      if (!je.is_string())
        throw std::invalid_argument(ctx + ": equations must be strings");
      const std::string text = je.get<std::string>();
      Expr e = parse_expr_in(text, eq_syms, ctx);
      PolyFraction fr = expr_fraction(e, f.ring);
      if (!fr.den.is_constant())
        throw std::invalid_argument(ctx + ": defining relation '" + text +
                                    "' is not polynomial");
      PolyRF p = fr.num * fr.den.constant_value().inverse();
      if (p.is_zero())
        throw std::invalid_argument(ctx + ": defining relation '" + text +
                                    "' is zero");
      f.equations.push_back(std::move(p));
    }

    // declared reduction
    if (jf.contains("reduced_field")) {
      const json& jr = jf.at("reduced_field");
      const json& jsurv = field(jr, "surviving", ctx);
      if (!jsurv.is_array())
        throw std::invalid_argument(ctx + ": surviving must be an array");
      std::set<std::string> surv_set;
      for (const json& js : jsurv) {
        const std::string s = js.get<std::string>();
        if (!states.count(s))
          throw std::invalid_argument(ctx + ": surviving variable '" + s +
                                      "' is not a state");
        if (!surv_set.insert(s).second)
          throw std::invalid_argument(ctx + ": duplicate surviving variable '" +
                                      s + "'");
        f.surviving.push_back(s);
      }
      std::set<std::string> comp_syms = surv_set;
      comp_syms.insert(params.begin(), params.end());
      if (f.extension) comp_syms.insert(f.extension->variable);
      const json& jcomp = field(jr, "components", ctx);
      if (!jcomp.is_object() || jcomp.size() != f.surviving.size())
        throw std::invalid_argument(
            ctx + ": components must declare exactly the surviving variables");
      for (const std::string& s : f.surviving) {
        if (!jcomp.contains(s))
          throw std::invalid_argument(ctx + ": missing reduced component for '" +
                                      s + "'");
        f.reduced_components.emplace_back(
            s, parse_expr_in(jcomp.at(s).get<std::string>(), comp_syms,
                             ctx + " reduced component " + s));
      }
      if (jf.contains("reduced_integrals")) {
        for (const json& ji : jf.at("reduced_integrals"))
          f.reduced_integrals.push_back(parse_expr_in(
              ji.get<std::string>(), comp_syms, ctx + " reduced integral"));
      }
    } else if (jf.contains("reduced_integrals")) {
      throw std::invalid_argument(ctx +
                                  ": reduced integrals without a reduction");
    }

    // admissibility data
    if (jf.contains("admissible")) {
      const json& ja = jf.at("admissible");
      f.box = parse_box(field(ja, "sample_box", ctx), params, ctx);
      if (ja.contains("constraints"))
        f.constraints = parse_constraints(ja.at("constraints"), params, ctx);
    }

    // weights (implicit families bind them to parameter expressions)
    const json& jw = field(jf, "weights", ctx);
    if (!jw.is_object())
      throw std::invalid_argument(ctx + ": weights must be an object");
    std::set<std::string> bound;
    for (auto it = jw.begin(); it != jw.end(); ++it) bound.insert(it.key());
    std::set<std::string> weight_syms;
    for (const std::string& p : params)
      if (!bound.count(p)) weight_syms.insert(p);
    for (auto it = jw.begin(); it != jw.end(); ++it) {
      if (!params.count(it.key()) || it.key() == "alpha")
        throw std::invalid_argument(ctx + ": '" + it.key() +
                                    "' is not a bindable weight");
      f.weights.emplace_back(it.key(),
                             parse_expr_in(it.value().get<std::string>(),
                                           weight_syms, ctx + " weight"));
    }
    return f;
  }

  // ------------------------------------------------------------------ charts
  f.ring = state_ring;
  f.quadric = PolyRF(f.ring);

  std::set<std::string> free_set;
  if (jf.contains("free_variables")) {
    for (const json& jv : jf.at("free_variables")) {
      const std::string v = jv.get<std::string>();
      if (params.count(v))
        throw std::invalid_argument(ctx + ": free variable '" + v +
                                    "' shadows a parameter");
      if (!free_set.insert(v).second)
        throw std::invalid_argument(ctx + ": duplicate free variable '" + v +
                                    "'");
      f.free_variables.push_back(v);
    }
  }

  // named definitions, evaluated in order; each may use the previous ones
  std::set<std::string> def_set;
  std::map<std::string, std::set<std::string>> def_base;
  if (jf.contains("defs")) {
    for (const json& jd : jf.at("defs")) {
      const std::string name = str_field(jd, "name", ctx);
      if (params.count(name) || free_set.count(name) || name == "sigma" ||
          def_set.count(name))
        throw std::invalid_argument(ctx + ": definition name '" + name +
                                    "' collides");
      std::set<std::string> allowed = params;
      allowed.insert(free_set.begin(), free_set.end());
      allowed.insert(def_set.begin(), def_set.end());
      Expr e = parse_expr_in(str_field(jd, "expr", ctx), allowed,
                             ctx + " definition " + name);
      std::set<std::string> base;
      for (const std::string& s : e.symbols()) {
        auto it = def_base.find(s);
        if (it != def_base.end())
          base.insert(it->second.begin(), it->second.end());
        else
          base.insert(s);
      }
      def_base.emplace(name, std::move(base));
      def_set.insert(name);
      f.defs.emplace_back(name, std::move(e));
    }
  }

  // weights may reference the definitions (and the free variables)
  const json& jw = field(jf, "weights", ctx);
  std::set<std::string> bound;
  for (auto it = jw.begin(); it != jw.end(); ++it) bound.insert(it.key());
  std::set<std::string> weight_syms;
  for (const std::string& p : params)
    if (!bound.count(p)) weight_syms.insert(p);
  weight_syms.insert(free_set.begin(), free_set.end());
  weight_syms.insert(def_set.begin(), def_set.end());
  for (auto it = jw.begin(); it != jw.end(); ++it) {
    if (!params.count(it.key()) || it.key() == "alpha")
      throw std::invalid_argument(ctx + ": '" + it.key() +
                                  "' is not a bindable weight");
    f.weights.emplace_back(it.key(),
                           parse_expr_in(it.value().get<std::string>(),
                                         weight_syms, ctx + " weight"));
  }

  // base symbols (parameters and free variables) a chart needs to evaluate
  // everything: all definitions, the map, the constraints, the weights
  std::set<std::string> needed;
  auto need = [&](const Expr& e) {
    for (const std::string& s : e.symbols()) {
      if (s == "sigma") continue;
      auto it = def_base.find(s);
      if (it != def_base.end())
        needed.insert(it->second.begin(), it->second.end());
      else
        needed.insert(s);
    }
  };
  for (const auto& d : f.defs) need(d.second);
  for (const auto& wgt : f.weights) need(wgt.second);

  const json& jcharts = field(jf, "charts", ctx);
  if (!jcharts.is_array() || jcharts.empty())
    throw std::invalid_argument(ctx + ": charts must be a nonempty array");
  std::set<std::string> chart_names;
  std::set<std::string> map_syms = params;
  map_syms.insert(free_set.begin(), free_set.end());
  map_syms.insert(def_set.begin(), def_set.end());
  std::set<std::string> box_syms = params;
  box_syms.insert(free_set.begin(), free_set.end());
  for (const json& jc : jcharts) {
    Chart chart;
    chart.name = str_field(jc, "name", ctx);
    if (!chart_names.insert(chart.name).second)
      throw std::invalid_argument(ctx + ": duplicate chart '" + chart.name +
                                  "'");
    const std::string cctx = ctx + " chart '" + chart.name + "'";
    const json& jmap = field(jc, "map", cctx);
    if (!jmap.is_object() || jmap.size() != state_ring->size())
      throw std::invalid_argument(cctx +
                                  ": map must assign every state variable");
    std::set<std::string> with_sigma = map_syms;
    with_sigma.insert("sigma");
    std::set<std::string> chart_needed = needed;
    std::swap(needed, chart_needed);
    for (const std::string& s : state_ring->names()) {
      if (!jmap.contains(s))
        throw std::invalid_argument(cctx + ": missing map image for '" + s +
                                    "'");
      Expr e = parse_expr_in(jmap.at(s).get<std::string>(), with_sigma,
                             cctx + " image of " + s);
      need(e);
      chart.map.emplace_back(s, std::move(e));
    }
    chart.box = parse_box(field(jc, "sample_box", cctx), box_syms, cctx);
    if (jc.contains("constraints"))
      chart.constraints = parse_constraints(jc.at("constraints"), map_syms,
                                            cctx);
    for (const Constraint& c : chart.constraints) need(c.expr);
    std::swap(needed, chart_needed);

    std::set<std::string> boxed;
    for (const auto& r : chart.box.ranges) boxed.insert(r.first);
    for (const std::string& s : chart_needed)
      if (!boxed.count(s))
        throw std::invalid_argument(cctx + ": '" + s +
                                    "' is needed but not sampled");
    for (const std::string& p : params)
      if (!boxed.count(p) && !bound.count(p))
        throw std::invalid_argument(cctx + ": parameter '" + p +
                                    "' is neither sampled nor bound");
    f.charts.push_back(std::move(chart));
  }

  f.circle_match = opt_str_field(jf, "circle_match");
  if (jf.contains("implicit_relation")) {
    std::set<std::string> rel_syms = states;
    rel_syms.insert(params.begin(), params.end());
    f.implicit_relation =
        parse_expr_in(str_field(jf, "implicit_relation", ctx), rel_syms,
                      ctx + " implicit relation");
  }
  return f;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

// Deterministic rational draws on a 4096-step grid.
class RationalSampler {
 public:
  explicit RationalSampler(std::uint64_t seed) : rng_(seed) {}

  Rational draw(const Rational& lo, const Rational& hi) {
    static constexpr long kGrid = 4096;
    const long k = static_cast<long>(rng_() % (kGrid + 1));
    Rational t(k, kGrid);
    t.canonicalize();
    return lo + (hi - lo) * t;
  }

 private:
  std::mt19937_64 rng_;
};

bool constraint_holds(const Constraint& c,
                      const std::map<std::string, Interval>& env, long prec) {
  Interval v = c.expr.eval_interval(env, prec);
  if (c.op == ">0") return v.strictly_positive();
  if (c.op == ">=0") return v.lower() >= 0.0;
  if (c.op == "!=0") return v.is_nonzero();
  throw std::logic_error("unknown constraint operator '" + c.op + "'");
}

// ---------------------------------------------------------------------------
// Implicitization internals
// ---------------------------------------------------------------------------

// Rewrites every square root into an auxiliary symbol, deduplicated by the
// printed form of its (already rewritten) radicand.
struct RadicalTable {
  std::vector<std::pair<std::string, Expr>> aux;     // symbol -> radicand
  std::map<std::string, std::string> by_key;         // radicand -> symbol
  std::map<std::string, std::string> kept_by_key;    // radicand -> kept name
  bool sigma_seen = false;
};

Expr rewrite_radicals(const Expr& e, RadicalTable& table) {
  using K = Expr::Kind;
  if (e.empty()) throw std::invalid_argument("empty expression");
  switch (e.node().kind) {
    case K::Number:
      return e;
    case K::Symbol:
      if (e.node().name == "sigma") table.sigma_seen = true;
      return e;
    case K::Add:
      return Expr::add(rewrite_radicals(e.left(), table),
                       rewrite_radicals(e.right(), table));
    case K::Sub:
      return Expr::sub(rewrite_radicals(e.left(), table),
                       rewrite_radicals(e.right(), table));
    case K::Mul:
      return Expr::mul(rewrite_radicals(e.left(), table),
                       rewrite_radicals(e.right(), table));
    case K::Div:
      return Expr::div(rewrite_radicals(e.left(), table),
                       rewrite_radicals(e.right(), table));
    case K::Neg:
      return Expr::neg(rewrite_radicals(e.left(), table));
    case K::Pow:
      return Expr::pow(rewrite_radicals(e.left(), table), e.node().exponent);
    case K::Sqrt: {
      Expr arg = rewrite_radicals(e.left(), table);
      const std::string key = arg.to_string();
      if (auto it = table.kept_by_key.find(key); it != table.kept_by_key.end())
        return Expr::symbol(it->second);
      if (auto it = table.by_key.find(key); it != table.by_key.end())
        return Expr::symbol(it->second);
      std::string name = "rt" + std::to_string(table.aux.size());
      table.by_key.emplace(key, name);
      table.aux.emplace_back(name, arg);
      return Expr::symbol(std::move(name));
    }
  }
  throw std::logic_error("unhandled expression node");
}

// A radical-free expression as a quotient of rational-coefficient
// polynomials over the implicitization ring.
struct QFraction {
  Poly num, den;
};

QFraction q_const(const RingPtr& ring, const Rational& v) {
  return {Poly::constant(ring, v), Poly::constant(ring, Rational(1))};
}

QFraction qfraction(const Expr& e, const RingPtr& ring,
                    const std::map<std::string, Rational>& values) {
  using K = Expr::Kind;
  switch (e.node().kind) {
    case K::Number:
      return q_const(ring, e.node().value);
    case K::Symbol: {
      const std::string& n = e.node().name;
      if (ring->contains(n))
        return {Poly::variable(ring, n), Poly::constant(ring, Rational(1))};
      auto it = values.find(n);
      if (it != values.end()) return q_const(ring, it->second);
      throw std::logic_error("unclassified symbol '" + n + "'");
    }
    case K::Add: {
      QFraction a = qfraction(e.left(), ring, values);
      QFraction b = qfraction(e.right(), ring, values);
      return {a.num * b.den + b.num * a.den, a.den * b.den};
    }
    case K::Sub: {
      QFraction a = qfraction(e.left(), ring, values);
      QFraction b = qfraction(e.right(), ring, values);
      return {a.num * b.den - b.num * a.den, a.den * b.den};
    }
    case K::Mul: {
      QFraction a = qfraction(e.left(), ring, values);
      QFraction b = qfraction(e.right(), ring, values);
      return {a.num * b.num, a.den * b.den};
    }
    case K::Div: {
      QFraction a = qfraction(e.left(), ring, values);
      QFraction b = qfraction(e.right(), ring, values);
      if (b.num.is_zero())
        throw std::invalid_argument("division by zero in '" + e.to_string() +
                                    "'");
      return {a.num * b.den, a.den * b.num};
    }
    case K::Neg: {
      QFraction a = qfraction(e.left(), ring, values);
      return {Poly(a.num.ring()) - a.num, a.den};
    }
    case K::Pow: {
      long ex = e.node().exponent;
      if (ex == 0) return q_const(ring, Rational(1));
      QFraction a = qfraction(e.left(), ring, values);
      if (ex < 0) {
        if (a.num.is_zero())
          throw std::invalid_argument("division by zero in '" + e.to_string() +
                                      "'");
        std::swap(a.num, a.den);
        ex = -ex;
      }
      return {a.num.pow(static_cast<unsigned>(ex)),
              a.den.pow(static_cast<unsigned>(ex))};
    }
    case K::Sqrt:
      throw std::logic_error("radical survived rewriting");
  }
  throw std::logic_error("unhandled expression node");
}

Poly specialize_coeffs(const PolyRF& p,
                       const std::map<std::string, Rational>& values) {
  std::vector<std::pair<Monomial, Rational>> terms;
  for (const auto& t : p.terms()) {
    Rational v = t.second.evaluate(values);
    if (sgn(v) != 0) terms.emplace_back(t.first, std::move(v));
  }
  return Poly::from_terms(p.ring(), std::move(terms));
}

}  // namespace

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

const Family& Catalog::find(const std::string& tag) const {
  for (const Family& f : families)
    if (f.tag == tag) return f;
  throw std::invalid_argument("no family tagged '" + tag + "'");
}

Catalog load_catalog() { return load_catalog(data_file("families.json")); }

Catalog load_catalog(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open family catalog '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw std::invalid_argument("family catalog '" + path +
                                "' is not valid JSON: " + ex.what());
  }

  const std::string ctx = "family catalog";
  if (!j.contains("version") || !j.at("version").is_number_integer() ||
      j.at("version").get<int>() != 1)
    throw std::invalid_argument(ctx + ": unsupported version");

  Catalog cat;
  const ModelSystem& model = reduced_model();
  cat.state_ring = Ring::make(model.states);

  const json& jstates = field(j, "state_variables", ctx);
  if (!jstates.is_array() || jstates.size() != model.states.size())
    throw std::invalid_argument(ctx + ": unexpected state variables");
  for (std::size_t i = 0; i < model.states.size(); ++i)
    if (jstates[i].get<std::string>() != model.states[i])
      throw std::invalid_argument(ctx + ": unexpected state variables");

  std::set<std::string> params;
  for (const json& jp : field(j, "parameters", ctx)) {
    const std::string p = jp.get<std::string>();
    if (!RationalFunction::param_ring()->contains(p))
      throw std::invalid_argument(ctx + ": unknown parameter '" + p + "'");
    params.insert(p);
  }
  if (params.empty()) throw std::invalid_argument(ctx + ": no parameters");

  std::set<std::string> ext_symbols;
  if (j.contains("extension_symbols"))
    for (const json& js : j.at("extension_symbols")) {
      const std::string s = js.get<std::string>();
      if (params.count(s) || cat.state_ring->contains(s))
        throw std::invalid_argument(ctx + ": extension symbol '" + s +
                                    "' collides");
      ext_symbols.insert(s);
    }

  std::set<std::string> tags;
  for (const json& jf : field(j, "families", ctx)) {
    Family f;
    try {
      f = parse_family(jf, cat.state_ring, params, ext_symbols);
    } catch (const json::exception& ex) {
      throw std::invalid_argument(ctx + ": malformed family entry: " +
                                  ex.what());
    }
    if (!tags.insert(f.tag).second)
      throw std::invalid_argument(ctx + ": duplicate tag '" + f.tag + "'");
    cat.families.push_back(std::move(f));
  }
  if (j.contains("unavailable"))
    for (const json& ju : j.at("unavailable")) {
      const std::string tag = str_field(ju, "tag", ctx);
      if (!tags.insert(tag).second)
        throw std::invalid_argument(ctx + ": duplicate tag '" + tag + "'");
      cat.unavailable.emplace_back(tag, str_field(ju, "note", ctx));
    }

  for (const Family& f : cat.families)
    if (!f.circle_match.empty()) {
      const Family& target = cat.find(f.circle_match);
      if (target.parametric || !target.extension)
        throw std::invalid_argument(
            "family '" + f.tag + "': match target '" + target.tag +
            "' is not an implicit family with an extension");
    }
  return cat;
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

IdealBasisT<RationalFunction> family_basis(const Family& f,
                                           const GBBudget& budget) {
  if (f.parametric)
    throw std::invalid_argument("family '" + f.tag +
                                "' is a chart; it has no defining relations");
  std::vector<PolyRF> gens = f.equations;
  if (f.extension) gens.push_back(f.quadric);
  return buchberger(gens, MonomialOrder::grevlex(f.ring), budget);
}

InvarianceReport certify_invariance(const std::vector<PolyRF>& relations,
                                    const RingPtr& ring,
                                    const GBBudget& budget) {
  if (relations.empty())
    throw std::invalid_argument("no relations to certify");
  const ModelSystem& model = reduced_model();
  std::vector<PolyRF> flow;
  flow.reserve(model.states.size());
  for (const Poly& component : model.field)
    flow.push_back(lift_to_param_field(component, ring));

  IdealBasisT<RationalFunction> gb =
      buchberger(relations, MonomialOrder::grevlex(ring), budget);
  InvarianceReport rep;
  for (const PolyRF& rel : relations) {
    PolyRF lie(ring);
    for (std::size_t i = 0; i < model.states.size(); ++i)
      lie = lie + rel.differentiate(model.states[i]) * flow[i];
    PolyRF res = normal_form(lie, gb, budget);
    if (!res.is_zero())
      throw std::invalid_argument(
          "the set is not invariant: the flow derivative of '" +
          rel.to_string() + "' has residual '" + res.to_string() + "'");
    rep.lie_derivatives.push_back(std::move(lie));
    rep.residuals.push_back(std::move(res));
  }
  return rep;
}

InvarianceReport check_invariance(const Family& f, const GBBudget& budget) {
  if (f.parametric)
    throw std::invalid_argument("family '" + f.tag +
                                "' is a chart; invariance certification "
                                "needs defining relations");
  std::vector<PolyRF> rels = f.equations;
  if (f.extension) rels.push_back(f.quadric);
  return certify_invariance(rels, f.ring, budget);
}

StationarityReport check_stationarity(const Family& f, int samples, double tol,
                                      std::uint64_t seed, long prec) {
  StationarityReport rep;
  rep.mode = f.stationarity;
  if (f.stationarity == CheckMode::None) return rep;
  rep.checked = true;

  if (f.stationarity == CheckMode::Exact) {
    std::map<std::string, RationalFunction> bind;
    for (const auto& w : f.weights)
      bind.emplace(w.first, w.second.to_rational_function());
    IdealBasisT<RationalFunction> gb = family_basis(f);
    rep.ok = true;
    for (const Poly& g : energy_gradient()) {
      PolyRF res = normal_form(lift_bind(g, f.ring, bind), gb);
      if (!res.is_zero()) rep.ok = false;
      rep.residuals.push_back(std::move(res));
    }
    return rep;
  }

  // numeric mode: interval residuals at admissible random samples
  if (f.charts.empty())
    throw std::invalid_argument("family '" + f.tag +
                                "' asks for a numeric check but has no charts");
  if (samples <= 0) throw std::invalid_argument("sample count must be positive");
  if (prec < 2) throw std::invalid_argument("precision must be at least two bits");
  const std::vector<Poly>& grads = energy_gradient();
  RationalSampler rng(seed);
  for (const Chart& chart : f.charts) {
    rep.charts.push_back(chart.name);
    int admitted = 0;
    long attempts = 0;
    const long attempt_budget = 200L * samples;
    while (admitted < samples && attempts < attempt_budget) {
      ++attempts;
      std::map<std::string, Interval> env;
      for (const auto& r : chart.box.ranges)
        env[r.first] = Interval::from_rational(
            rng.draw(r.second.first, r.second.second), prec);
      try {
        for (const auto& d : f.defs)
          env[d.first] = d.second.eval_interval(env, prec);
        bool ok_draw = true;
        for (const Constraint& c : chart.constraints)
          if (!constraint_holds(c, env, prec)) {
            ok_draw = false;
            break;
          }
        if (!ok_draw) continue;
        for (const auto& w : f.weights)
          env[w.first] = w.second.eval_interval(env, prec);
        double worst = 0;
        for (int sg : {1, -1}) {
          std::map<std::string, Interval> point = env;
          point["sigma"] = Interval::from_long(sg, prec);
          for (const auto& image : chart.map)
            point[image.first] = image.second.eval_interval(point, prec);
          for (const Poly& g : grads)
            worst = std::max(worst,
                             evaluate_interval(g, point, prec).abs_upper());
        }
        ++admitted;
        rep.max_residual = std::max(rep.max_residual, worst);
      } catch (const std::domain_error&) {
        continue;  // a radicand straddled zero at this draw
      }
    }
    if (admitted < samples)
      throw std::invalid_argument(
          "empty chart: only " + std::to_string(admitted) + " of " +
          std::to_string(samples) + " admissible samples found in chart '" +
          chart.name + "' of family '" + f.tag + "'");
    rep.samples += admitted;
  }
  rep.ok = rep.max_residual <= tol;
  return rep;
}

ReducedFieldReport reduce_field(const Family& f, const GBBudget& budget) {
  if (f.parametric)
    throw std::invalid_argument("family '" + f.tag +
                                "' is a chart; reduction applies to implicit "
                                "families");
  const ModelSystem& model = reduced_model();
  IdealBasisT<RationalFunction> gb = family_basis(f, budget);
  for (const auto& comp : f.reduced_components) {
    PolyFraction fr = expr_fraction(comp.second, f.ring);
    if (normal_form(fr.den, gb, budget).is_zero())
      throw std::invalid_argument("chart singularity: the denominator '" +
                                  fr.den.to_string() + "' of the reduced '" +
                                  comp.first + "' component vanishes on "
                                  "family '" + f.tag + "'");
    std::size_t idx = 0;
    while (model.states[idx] != comp.first) ++idx;
    PolyRF ambient = lift_to_param_field(model.field[idx], f.ring);
    PolyRF res = normal_form(ambient * fr.den - fr.num, gb, budget);
    if (!res.is_zero())
      throw std::invalid_argument(
          "the ambient field does not reduce to the declared '" + comp.first +
          "' component on family '" + f.tag + "': residual '" +
          res.to_string() + "'");
  }
  return {f.surviving, f.reduced_components};
}

namespace {

// Numerator of the Lie derivative of `p` along the declared reduced field,
// over the common denominator of all components; reduced by the extension
// quadric when one is present.
PolyRF reduced_lie_numerator(const Family& f, const PolyRF& p,
                             const std::vector<PolyRF>& nums,
                             const std::vector<PolyRF>& dens) {
  PolyRF lie(f.ring);
  for (std::size_t i = 0; i < f.surviving.size(); ++i) {
    PolyRF term = p.differentiate(f.surviving[i]) * nums[i];
    for (std::size_t j = 0; j < dens.size(); ++j)
      if (j != i) term = term * dens[j];
    lie = lie + term;
  }
  if (f.extension)
    lie = normal_form(lie, std::vector<PolyRF>{f.quadric},
                      MonomialOrder::grevlex(f.ring));
  return lie;
}

void component_fractions(const Family& f, std::vector<PolyRF>& nums,
                         std::vector<PolyRF>& dens) {
  for (const auto& comp : f.reduced_components) {
    PolyFraction fr = expr_fraction(comp.second, f.ring);
    nums.push_back(std::move(fr.num));
    dens.push_back(std::move(fr.den));
  }
}

}  // namespace

bool reduced_integral_conserved(const Family& f, const Expr& candidate) {
  if (f.parametric)
    throw std::invalid_argument("family '" + f.tag + "' declares no reduction");
  std::set<std::string> allowed(f.surviving.begin(), f.surviving.end());
  for (const std::string& s : candidate.symbols())
    if (!allowed.count(s) && !RationalFunction::param_ring()->contains(s) &&
        !(f.extension && s == f.extension->variable))
      throw std::invalid_argument("candidate integral uses '" + s +
                                  "', which does not survive the reduction");
  PolyFraction wf = expr_fraction(candidate, f.ring);
  if (!wf.den.is_constant())
    throw std::invalid_argument("candidate integral must be polynomial");
  PolyRF W = wf.num * wf.den.constant_value().inverse();

  std::vector<PolyRF> nums, dens;
  component_fractions(f, nums, dens);
  return reduced_lie_numerator(f, W, nums, dens).is_zero();
}

std::vector<PolyRF> polynomial_integrals(const Family& f, int max_degree) {
  if (f.parametric)
    throw std::invalid_argument("family '" + f.tag + "' declares no reduction");
  if (max_degree < 1)
    throw std::invalid_argument("maximum degree must be at least 1");
  if (f.surviving.empty()) return {};

  std::vector<PolyRF> nums, dens;
  component_fractions(f, nums, dens);

  // candidate monomials in the surviving variables, total degree 1..max
  std::vector<PolyRF> cands;
  std::vector<unsigned> expo(f.surviving.size(), 0);
  auto emit = [&]() {
    PolyRF m = PolyRF::constant(f.ring, RationalFunction(1));
    for (std::size_t i = 0; i < expo.size(); ++i)
      if (expo[i] > 0)
        m = m * PolyRF::variable(f.ring, f.surviving[i]).pow(expo[i]);
    cands.push_back(std::move(m));
  };
  auto walk = [&](auto&& self, std::size_t pos, int left) -> void {
    if (pos == expo.size()) {
      if (left < max_degree) emit();  // at least one unit of degree used
      return;
    }
    for (int e = 0; e <= left; ++e) {
      expo[pos] = static_cast<unsigned>(e);
      self(self, pos + 1, left - e);
    }
    expo[pos] = 0;
  };
  walk(walk, 0, max_degree);

  // Lie-derivative numerators are linear in the candidate; collect the
  // monomial coefficients into a matrix and solve for its kernel.
  std::vector<PolyRF> lies;
  lies.reserve(cands.size());
  std::vector<Monomial> rows;
  auto row_of = [&](const Monomial& m) {
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rows[i] == m) return i;
    rows.push_back(m);
    return rows.size() - 1;
  };
  for (const PolyRF& cand : cands) {
    PolyRF lie = reduced_lie_numerator(f, cand, nums, dens);
    for (const auto& t : lie.terms()) row_of(t.first);
    lies.push_back(std::move(lie));
  }

  std::vector<PolyRF> basis;
  if (rows.empty()) {
    basis = cands;  // every candidate is conserved
    return basis;
  }
  Matrix<RationalFunction> A(rows.size(), cands.size());
  for (std::size_t c = 0; c < cands.size(); ++c)
    for (const auto& t : lies[c].terms()) A.at(row_of(t.first), c) = t.second;
  for (const std::vector<RationalFunction>& v : A.null_space()) {
    PolyRF integral(f.ring);
    for (std::size_t c = 0; c < cands.size(); ++c)
      if (!v[c].is_zero()) integral = integral + cands[c] * v[c];
    basis.push_back(std::move(integral));
  }
  return basis;
}

// ---------------------------------------------------------------------------
// Admissible sampling
// ---------------------------------------------------------------------------

std::vector<std::map<std::string, Rational>> sample_admissible(
    const SampleBox& box, const std::vector<Constraint>& constraints,
    int count, std::uint64_t seed, int attempt_factor) {
  if (count <= 0) throw std::invalid_argument("sample count must be positive");
  if (box.ranges.empty()) throw std::invalid_argument("sample box is empty");
  const long prec = Interval::kDefaultPrec;
  RationalSampler rng(seed);
  std::vector<std::map<std::string, Rational>> out;
  long attempts = 0;
  const long attempt_budget = static_cast<long>(attempt_factor) * count;
  while (static_cast<int>(out.size()) < count && attempts < attempt_budget) {
    ++attempts;
    std::map<std::string, Rational> point;
    std::map<std::string, Interval> env;
    for (const auto& r : box.ranges) {
      Rational v = rng.draw(r.second.first, r.second.second);
      env.emplace(r.first, Interval::from_rational(v, prec));
      point.emplace(r.first, std::move(v));
    }
    bool ok = true;
    try {
      for (const Constraint& c : constraints)
        if (!constraint_holds(c, env, prec)) {
          ok = false;
          break;
        }
    } catch (const std::domain_error&) {
      ok = false;
    }
    if (ok) out.push_back(std::move(point));
  }
  if (static_cast<int>(out.size()) < count)
    throw std::invalid_argument("empty chart: only " +
                                std::to_string(out.size()) + " of " +
                                std::to_string(count) +
                                " admissible samples in " +
                                std::to_string(attempts) + " attempts");
  return out;
}

// ---------------------------------------------------------------------------
// Implicitization
// ---------------------------------------------------------------------------

Implicitization implicitize_images(
    const std::vector<std::pair<std::string, Expr>>& images,
    const std::vector<std::pair<std::string, Expr>>& kept_defs,
    const std::map<std::string, Rational>& parameter_values,
    const GBBudget& budget) {
  if (images.empty())
    throw std::invalid_argument("no coordinate images to implicitize");

  // reserved names
  for (const auto& group : {images, kept_defs})
    for (const auto& item : group)
      for (const std::string& s : item.second.symbols())
        if (s.size() > 2 && s.compare(0, 2, "rt") == 0 &&
            s.find_first_not_of("0123456789", 2) == std::string::npos)
          throw std::invalid_argument("symbol '" + s +
                                      "' is reserved for radical auxiliaries");

  RadicalTable table;
  // kept definitions first, so their radicands claim the kept symbols
  std::vector<std::pair<std::string, Expr>> kept_rel;
  std::vector<bool> kept_quadric;
  for (const auto& kd : kept_defs) {
    if (kd.second.empty())
      throw std::invalid_argument("empty definition for '" + kd.first + "'");
    if (kd.second.node().kind == Expr::Kind::Sqrt) {
      Expr arg = rewrite_radicals(kd.second.left(), table);
      table.kept_by_key.emplace(arg.to_string(), kd.first);
      kept_rel.emplace_back(kd.first, std::move(arg));
      kept_quadric.push_back(true);
    } else {
      kept_rel.emplace_back(kd.first, rewrite_radicals(kd.second, table));
      kept_quadric.push_back(false);
    }
  }
  std::vector<std::pair<std::string, Expr>> rimages;
  rimages.reserve(images.size());
  for (const auto& im : images)
    rimages.emplace_back(im.first, rewrite_radicals(im.second, table));

  // classify the symbols: kept coordinates vs eliminated auxiliaries
  std::set<std::string> coord_names, kept_names, aux_names;
  for (const auto& im : images)
    if (!coord_names.insert(im.first).second)
      throw std::invalid_argument("duplicate coordinate '" + im.first + "'");
  for (const auto& kr : kept_rel)
    if (!kept_names.insert(kr.first).second || coord_names.count(kr.first))
      throw std::invalid_argument("duplicate kept definition '" + kr.first +
                                  "'");
  for (const auto& a : table.aux) aux_names.insert(a.first);

  std::vector<std::string> free_syms, kept_params;
  std::set<std::string> seen;
  auto classify = [&](const Expr& e) {
    for (const std::string& s : e.symbols()) {
      if (s == "sigma" || coord_names.count(s) || kept_names.count(s) ||
          aux_names.count(s) || parameter_values.count(s) || seen.count(s))
        continue;
      seen.insert(s);
      if (RationalFunction::param_ring()->contains(s))
        kept_params.push_back(s);
      else
        free_syms.push_back(s);
    }
  };
  for (const auto& im : rimages) classify(im.second);
  for (const auto& a : table.aux) classify(a.second);
  for (const auto& kr : kept_rel) classify(kr.second);
  std::sort(kept_params.begin(), kept_params.end(),
            [](const std::string& a, const std::string& b) {
              const RingPtr& pr = RationalFunction::param_ring();
              return pr->require(a) < pr->require(b);
            });

  std::vector<std::string> elim;
  if (table.sigma_seen) elim.push_back("sigma");
  for (const auto& a : table.aux) elim.push_back(a.first);
  for (const std::string& s : free_syms) elim.push_back(s);

  std::vector<std::string> kept_list;
  for (const auto& kr : kept_rel) kept_list.push_back(kr.first);
  for (const auto& im : images) kept_list.push_back(im.first);
  for (const std::string& s : kept_params) kept_list.push_back(s);

  std::vector<std::string> all = elim;
  all.insert(all.end(), kept_list.begin(), kept_list.end());
  RingPtr big = Ring::make(all);

  std::vector<Poly> gens;
  if (table.sigma_seen)
    gens.push_back(Poly::variable(big, "sigma").pow(2) -
                   Poly::constant(big, Rational(1)));
  for (const auto& a : table.aux) {
    QFraction q = qfraction(a.second, big, parameter_values);
    gens.push_back(Poly::variable(big, a.first).pow(2) * q.den - q.num);
  }
  for (std::size_t i = 0; i < kept_rel.size(); ++i) {
    QFraction q = qfraction(kept_rel[i].second, big, parameter_values);
    Poly lhs = Poly::variable(big, kept_rel[i].first);
    if (kept_quadric[i]) lhs = lhs.pow(2);
    gens.push_back(lhs * q.den - q.num);
  }
  for (const auto& im : rimages) {
    QFraction q = qfraction(im.second, big, parameter_values);
    Poly g = Poly::variable(big, im.first) * q.den - q.num;
    if (!g.is_zero()) gens.push_back(g);
  }

  RingPtr clean = Ring::make(kept_list);
  if (gens.empty()) return {clean, {}, elim, {}};

  IdealBasisT<Rational> gb =
      elim.empty() ? buchberger(gens, MonomialOrder::grevlex(big), budget)
                   : eliminate(gens, elim, budget);
  std::vector<Poly> relations;
  relations.reserve(gb.polys.size());
  for (const Poly& p : gb.polys) relations.push_back(p.map_vars(clean, {}));
  return {clean, std::move(relations), std::move(elim), gb.stats};
}

Implicitization implicitize(const Family& f, const std::string& chart_name,
                            const ImplicitizeOptions& opt) {
  if (!f.parametric)
    throw std::invalid_argument("family '" + f.tag + "' has no charts");
  const Chart* chart = nullptr;
  for (const Chart& c : f.charts)
    if (c.name == chart_name) chart = &c;
  if (!chart)
    throw std::invalid_argument("no chart named '" + chart_name +
                                "' in family '" + f.tag + "'");
  std::set<std::string> keep(opt.keep.begin(), opt.keep.end());
  for (const std::string& k : opt.keep) {
    bool found = false;
    for (const auto& d : f.defs) found = found || d.first == k;
    if (!found)
      throw std::invalid_argument("keep target '" + k +
                                  "' is not a definition of family '" + f.tag +
                                  "'");
  }

  std::map<std::string, Expr> env;
  std::vector<std::pair<std::string, Expr>> kept_defs;
  for (const auto& d : f.defs) {
    Expr expanded = d.second.substitute(env);
    if (keep.count(d.first))
      kept_defs.emplace_back(d.first, std::move(expanded));
    else
      env.emplace(d.first, std::move(expanded));
  }
  std::vector<std::pair<std::string, Expr>> images;
  images.reserve(chart->map.size());
  for (const auto& im : chart->map)
    images.emplace_back(im.first, im.second.substitute(env));
  return implicitize_images(images, kept_defs, opt.parameter_values,
                            opt.budget);
}

// ---------------------------------------------------------------------------
// Chart / implicit-family agreement
// ---------------------------------------------------------------------------

MatchReport match_implicit_family(const Catalog& cat, const Family& chart_fam,
                                  int samples, std::uint64_t seed,
                                  const GBBudget& budget) {
  if (chart_fam.circle_match.empty())
    throw std::invalid_argument("family '" + chart_fam.tag +
                                "' names no implicit counterpart");
  const Family& target = cat.find(chart_fam.circle_match);
  if (target.parametric || !target.extension)
    throw std::invalid_argument("family '" + target.tag +
                                "' is not an implicit family with an "
                                "extension");
  if (!target.box)
    throw std::invalid_argument("family '" + target.tag +
                                "' has no sample box");
  if (chart_fam.charts.empty())
    throw std::invalid_argument("family '" + chart_fam.tag +
                                "' has no charts");
  const std::string& ext = target.extension->variable;
  bool defines_ext = false;
  for (const auto& d : chart_fam.defs)
    defines_ext = defines_ext || d.first == ext;
  if (!defines_ext)
    throw std::invalid_argument("family '" + chart_fam.tag +
                                "' does not define '" + ext + "'");

  std::vector<std::map<std::string, Rational>> points =
      sample_admissible(*target.box, target.constraints, samples, seed);

  MatchReport rep{chart_fam.tag, target.tag, static_cast<int>(points.size()),
                  true};
  for (const auto& point : points) {
    ImplicitizeOptions opt;
    opt.parameter_values = point;
    opt.keep = {ext};
    opt.budget = budget;
    Implicitization impl =
        implicitize(chart_fam, chart_fam.charts.front().name, opt);

    std::vector<Poly> reference;
    for (const PolyRF& eq : target.equations)
      reference.push_back(specialize_coeffs(eq, point).map_vars(impl.ring, {}));
    reference.push_back(
        specialize_coeffs(target.quadric, point).map_vars(impl.ring, {}));

    if (!same_ideal(impl.relations, reference,
                    MonomialOrder::grevlex(impl.ring), budget)) {
      rep.ok = false;
      break;
    }
  }
  return rep;
}

Interval evaluate_interval(const Poly& p,
                           const std::map<std::string, Interval>& env,
                           long prec) {
  Interval acc = Interval::from_long(0, prec);
  const RingPtr& ring = p.ring();
  for (const auto& t : p.terms()) {
    Interval term = Interval::from_rational(t.second, prec);
    for (std::size_t i = 0; i < ring->size(); ++i) {
      const unsigned e = t.first[i];
      if (e == 0) continue;
      auto it = env.find(ring->name(i));
      if (it == env.end())
        throw std::invalid_argument("no interval value for variable '" +
                                    ring->name(i) + "'");
      term = term * it->second.pow(static_cast<long>(e));
    }
    acc = acc + term;
  }
  return acc;
}

}  // namespace ksw
