#include "ksw/expr.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ksw {

namespace {

Expr::NodePtr make_node(Expr::Node n) {
  return std::make_shared<const Expr::Node>(std::move(n));
}

}  // namespace

Expr Expr::number(Rational v) {
  Node n;
  n.kind = Kind::Number;
  n.value = std::move(v);
  return Expr(make_node(std::move(n)));
}

Expr Expr::symbol(const std::string& name) {
  Node n;
  n.kind = Kind::Symbol;
  n.name = name;
  return Expr(make_node(std::move(n)));
}

static bool is_number(const Expr& e, int sign_or_zero /* -2: any */) {
  if (e.empty() || e.node().kind != Expr::Kind::Number) return false;
  if (sign_or_zero == -2) return true;
  return sgn(e.node().value) == sign_or_zero;
}

Expr Expr::add(Expr x, Expr y) {
  if (is_number(x, 0)) return y;
  if (is_number(y, 0)) return x;
  if (is_number(x, -2) && is_number(y, -2))
    return number(Rational(x.node().value + y.node().value));
  Node n;
  n.kind = Kind::Add;
  n.a = x.root_;
  n.b = y.root_;
  return Expr(make_node(std::move(n)));
}

Expr Expr::sub(Expr x, Expr y) {
  if (is_number(y, 0)) return x;
  if (is_number(x, -2) && is_number(y, -2))
    return number(Rational(x.node().value - y.node().value));
  if (is_number(x, 0)) return neg(y);
  Node n;
  n.kind = Kind::Sub;
  n.a = x.root_;
  n.b = y.root_;
  return Expr(make_node(std::move(n)));
}

Expr Expr::mul(Expr x, Expr y) {
  if (is_number(x, 0) || is_number(y, 0)) return number(Rational(0));
  if (is_number(x, -2) && is_number(y, -2))
    return number(Rational(x.node().value * y.node().value));
  if (is_number(x, -2) && x.node().value == 1) return y;
  if (is_number(y, -2) && y.node().value == 1) return x;
  Node n;
  n.kind = Kind::Mul;
  n.a = x.root_;
  n.b = y.root_;
  return Expr(make_node(std::move(n)));
}

Expr Expr::div(Expr x, Expr y) {
  if (is_number(y, -2)) {
    if (sgn(y.node().value) == 0)
      throw std::invalid_argument("division by zero in expression");
    if (is_number(x, -2))
      return number(Rational(x.node().value / y.node().value));
  }
  Node n;
  n.kind = Kind::Div;
  n.a = x.root_;
  n.b = y.root_;
  return Expr(make_node(std::move(n)));
}

Expr Expr::neg(Expr x) {
  if (is_number(x, -2)) return number(Rational(-x.node().value));
  Node n;
  n.kind = Kind::Neg;
  n.a = x.root_;
  return Expr(make_node(std::move(n)));
}

Expr Expr::pow(Expr x, long e) {
  if (e == 1) return x;
  if (e == 0) return number(Rational(1));
  if (is_number(x, -2)) {
    const Rational& v = x.node().value;
    if (e > 0) return number(rat_pow(v, static_cast<unsigned>(e)));
    if (sgn(v) == 0)
      throw std::invalid_argument("zero raised to a negative power");
    return number(Rational(1 / rat_pow(v, static_cast<unsigned>(-e))));
  }
  Node n;
  n.kind = Kind::Pow;
  n.a = x.root_;
  n.exponent = e;
  return Expr(make_node(std::move(n)));
}

Expr Expr::sqrt(Expr x) {
  Node n;
  n.kind = Kind::Sqrt;
  n.a = x.root_;
  return Expr(make_node(std::move(n)));
}

// ---------------------------------------------------------------------------
// parser

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  Expr run() {
    Expr e = expr();
    skip_ws();
    if (pos_ != s_.size())
      throw std::invalid_argument("unexpected character '" +
                                  std::string(1, s_[pos_]) + "' at offset " +
                                  std::to_string(pos_) + " in '" + s_ + "'");
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (eat('+'))
        e = Expr::add(e, term());
      else if (eat('-'))
        e = Expr::sub(e, term());
      else
        return e;
    }
  }

  Expr term() {
    Expr e = factor();
    for (;;) {
      if (eat('*'))
        e = Expr::mul(e, factor());
      else if (eat('/'))
        e = Expr::div(e, factor());
      else
        return e;
    }
  }

  Expr factor() {
    bool negated = eat('-');
    Expr e = base();
    if (eat('^')) e = Expr::pow(e, integer());
    return negated ? Expr::neg(e) : e;
  }

  Expr base() {
    skip_ws();
    if (pos_ >= s_.size())
      throw std::invalid_argument("unexpected end of expression in '" + s_ +
                                  "'");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!eat(')'))
        throw std::invalid_argument("missing ')' in '" + s_ + "'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string name = identifier();
      if (name == "sqrt") {
        if (!eat('('))
          throw std::invalid_argument("sqrt requires parentheses in '" + s_ +
                                      "'");
        Expr e = expr();
        if (!eat(')'))
          throw std::invalid_argument("missing ')' after sqrt in '" + s_ +
                                      "'");
        return Expr::sqrt(e);
      }
      return Expr::symbol(name);
    }
    throw std::invalid_argument("unexpected character '" + std::string(1, c) +
                                "' at offset " + std::to_string(pos_) +
                                " in '" + s_ + "'");
  }

  std::string identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
            s_[pos_] == '_'))
      ++pos_;
    return s_.substr(start, pos_ - start);
  }

  long integer() {
    skip_ws();
    bool neg = eat('-');
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           std::isdigit(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    if (start == pos_)
      throw std::invalid_argument("exponent must be an integer in '" + s_ +
                                  "'");
    long v = std::stol(s_.substr(start, pos_ - start));
    return neg ? -v : v;
  }

  Expr number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           std::isdigit(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    std::string digits = s_.substr(start, pos_ - start);
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      std::size_t fstart = pos_;
      while (pos_ < s_.size() &&
             std::isdigit(static_cast<unsigned char>(s_[pos_])))
        ++pos_;
      std::string frac = s_.substr(fstart, pos_ - fstart);
      if (frac.empty())
        throw std::invalid_argument("malformed decimal literal in '" + s_ +
                                    "'");
      Rational v = rat_from_string(digits + frac);
      mpz_class den(1);
      for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
      Rational q(v.get_num(), v.get_den() * den);
      q.canonicalize();
      return Expr::number(q);
    }
    return Expr::number(rat_from_string(digits));
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr Expr::parse(const std::string& text) { return Parser(text).run(); }

// ---------------------------------------------------------------------------
// traversals

std::set<std::string> Expr::symbols() const {
  std::set<std::string> out;
  if (!root_) return out;
  std::vector<NodePtr> stack{root_};
  while (!stack.empty()) {
    NodePtr n = stack.back();
    stack.pop_back();
    if (n->kind == Kind::Symbol) out.insert(n->name);
    if (n->a) stack.push_back(n->a);
    if (n->b) stack.push_back(n->b);
  }
  return out;
}

Expr Expr::substitute(const std::map<std::string, Expr>& images) const {
  if (!root_) return *this;
  const Node& n = *root_;
  switch (n.kind) {
    case Kind::Number:
      return *this;
    case Kind::Symbol: {
      auto it = images.find(n.name);
      return it == images.end() ? *this : it->second;
    }
    case Kind::Add:
      return add(Expr(n.a).substitute(images), Expr(n.b).substitute(images));
    case Kind::Sub:
      return sub(Expr(n.a).substitute(images), Expr(n.b).substitute(images));
    case Kind::Mul:
      return mul(Expr(n.a).substitute(images), Expr(n.b).substitute(images));
    case Kind::Div:
      return div(Expr(n.a).substitute(images), Expr(n.b).substitute(images));
    case Kind::Neg:
      return neg(Expr(n.a).substitute(images));
    case Kind::Pow:
      return pow(Expr(n.a).substitute(images), n.exponent);
    case Kind::Sqrt:
      return sqrt(Expr(n.a).substitute(images));
  }
  throw std::logic_error("unreachable");
}

Expr Expr::differentiate(const std::string& var) const {
  if (!root_) return number(Rational(0));
  const Node& n = *root_;
  switch (n.kind) {
    case Kind::Number:
      return number(Rational(0));
    case Kind::Symbol:
      return number(Rational(n.name == var ? 1 : 0));
    case Kind::Add:
      return add(Expr(n.a).differentiate(var), Expr(n.b).differentiate(var));
    case Kind::Sub:
      return sub(Expr(n.a).differentiate(var), Expr(n.b).differentiate(var));
    case Kind::Mul:
      return add(mul(Expr(n.a).differentiate(var), Expr(n.b)),
                 mul(Expr(n.a), Expr(n.b).differentiate(var)));
    case Kind::Div:
      // (a/b)' = a'/b - a b'/b^2
      return sub(div(Expr(n.a).differentiate(var), Expr(n.b)),
                 div(mul(Expr(n.a), Expr(n.b).differentiate(var)),
                     pow(Expr(n.b), 2)));
    case Kind::Neg:
      return neg(Expr(n.a).differentiate(var));
    case Kind::Pow:
      return mul(mul(number(Rational(static_cast<int>(n.exponent))),
                     pow(Expr(n.a), n.exponent - 1)),
                 Expr(n.a).differentiate(var));
    case Kind::Sqrt:
      return div(Expr(n.a).differentiate(var),
                 mul(number(Rational(2)), sqrt(Expr(n.a))));
  }
  throw std::logic_error("unreachable");
}

Interval Expr::eval_interval(const std::map<std::string, Interval>& env,
                             long prec) const {
  if (!root_) throw std::invalid_argument("empty expression");
  const Node& n = *root_;
  switch (n.kind) {
    case Kind::Number:
      return Interval::from_rational(n.value, prec);
    case Kind::Symbol: {
      auto it = env.find(n.name);
      if (it == env.end())
        throw std::invalid_argument("no value for symbol '" + n.name + "'");
      return it->second;
    }
    case Kind::Add:
      return Expr(n.a).eval_interval(env, prec) +
             Expr(n.b).eval_interval(env, prec);
    case Kind::Sub:
      return Expr(n.a).eval_interval(env, prec) -
             Expr(n.b).eval_interval(env, prec);
    case Kind::Mul:
      return Expr(n.a).eval_interval(env, prec) *
             Expr(n.b).eval_interval(env, prec);
    case Kind::Div:
      return Expr(n.a).eval_interval(env, prec) /
             Expr(n.b).eval_interval(env, prec);
    case Kind::Neg:
      return -Expr(n.a).eval_interval(env, prec);
    case Kind::Pow:
      return Expr(n.a).eval_interval(env, prec).pow(n.exponent);
    case Kind::Sqrt:
      return Expr(n.a).eval_interval(env, prec).sqrt();
  }
  throw std::logic_error("unreachable");
}

double Expr::eval_double(const std::map<std::string, double>& env) const {
  if (!root_) throw std::invalid_argument("empty expression");
  const Node& n = *root_;
  switch (n.kind) {
    case Kind::Number:
      return rat_to_double(n.value);
    case Kind::Symbol: {
      auto it = env.find(n.name);
      if (it == env.end())
        throw std::invalid_argument("no value for symbol '" + n.name + "'");
      return it->second;
    }
    case Kind::Add:
      return Expr(n.a).eval_double(env) + Expr(n.b).eval_double(env);
    case Kind::Sub:
      return Expr(n.a).eval_double(env) - Expr(n.b).eval_double(env);
    case Kind::Mul:
      return Expr(n.a).eval_double(env) * Expr(n.b).eval_double(env);
    case Kind::Div:
      return Expr(n.a).eval_double(env) / Expr(n.b).eval_double(env);
    case Kind::Neg:
      return -Expr(n.a).eval_double(env);
    case Kind::Pow: {
      double b = Expr(n.a).eval_double(env);
      double r = 1.0;
      long e = n.exponent < 0 ? -n.exponent : n.exponent;
      for (long i = 0; i < e; ++i) r *= b;
      return n.exponent < 0 ? 1.0 / r : r;
    }
    case Kind::Sqrt:
      return std::sqrt(Expr(n.a).eval_double(env));
  }
  throw std::logic_error("unreachable");
}

Poly Expr::to_polynomial(const RingPtr& ring) const {
  if (!root_) throw std::invalid_argument("empty expression");
  const Node& n = *root_;
  switch (n.kind) {
    case Kind::Number:
      return Poly::constant(ring, n.value);
    case Kind::Symbol:
      if (!ring->contains(n.name))
        throw std::invalid_argument("variable '" + n.name +
                                    "' is not in the ring");
      return Poly::variable(ring, n.name);
    case Kind::Add:
      return Expr(n.a).to_polynomial(ring) + Expr(n.b).to_polynomial(ring);
    case Kind::Sub:
      return Expr(n.a).to_polynomial(ring) - Expr(n.b).to_polynomial(ring);
    case Kind::Mul:
      return Expr(n.a).to_polynomial(ring) * Expr(n.b).to_polynomial(ring);
    case Kind::Div: {
      Poly d = Expr(n.b).to_polynomial(ring);
      if (!d.is_constant())
        throw std::invalid_argument(
            "division by a non-constant is not polynomial: '" +
            Expr(n.b).to_string() + "'");
      Rational c = d.constant_value();
      if (sgn(c) == 0) throw std::invalid_argument("division by zero");
      Rational inv = 1 / c;
      return Expr(n.a).to_polynomial(ring) * inv;
    }
    case Kind::Neg:
      return -Expr(n.a).to_polynomial(ring);
    case Kind::Pow: {
      Poly b = Expr(n.a).to_polynomial(ring);
      if (n.exponent >= 0) return b.pow(static_cast<unsigned>(n.exponent));
      if (!b.is_constant())
        throw std::invalid_argument(
            "negative power of a non-constant is not polynomial");
      Rational c = b.constant_value();
      if (sgn(c) == 0) throw std::invalid_argument("division by zero");
      return Poly::constant(
          ring, Rational(1 / rat_pow(c, static_cast<unsigned>(-n.exponent))));
    }
    case Kind::Sqrt:
      throw std::invalid_argument(
          "radical expression has no polynomial view: '" + to_string() + "'");
  }
  throw std::logic_error("unreachable");
}

RationalFunction Expr::to_rational_function() const {
  if (!root_) throw std::invalid_argument("empty expression");
  const Node& n = *root_;
  switch (n.kind) {
    case Kind::Number:
      return RationalFunction(n.value);
    case Kind::Symbol:
      return RationalFunction::variable(n.name);
    case Kind::Add:
      return Expr(n.a).to_rational_function() +
             Expr(n.b).to_rational_function();
    case Kind::Sub:
      return Expr(n.a).to_rational_function() -
             Expr(n.b).to_rational_function();
    case Kind::Mul:
      return Expr(n.a).to_rational_function() *
             Expr(n.b).to_rational_function();
    case Kind::Div:
      return Expr(n.a).to_rational_function() /
             Expr(n.b).to_rational_function();
    case Kind::Neg:
      return -Expr(n.a).to_rational_function();
    case Kind::Pow: {
      RationalFunction b = Expr(n.a).to_rational_function();
      RationalFunction acc(Rational(1));
      long e = n.exponent < 0 ? -n.exponent : n.exponent;
      for (long i = 0; i < e; ++i) acc *= b;
      return n.exponent < 0 ? acc.inverse() : acc;
    }
    case Kind::Sqrt:
      throw std::invalid_argument(
          "radical expression is not a rational function: '" + to_string() +
          "'");
  }
  throw std::logic_error("unreachable");
}

std::string Expr::to_string() const {
  if (!root_) return "";
  const Node& n = *root_;
  switch (n.kind) {
    case Kind::Number:
      return rat_to_string(n.value);
    case Kind::Symbol:
      return n.name;
    case Kind::Add:
      return "(" + Expr(n.a).to_string() + " + " + Expr(n.b).to_string() + ")";
    case Kind::Sub:
      return "(" + Expr(n.a).to_string() + " - " + Expr(n.b).to_string() + ")";
    case Kind::Mul:
      return "(" + Expr(n.a).to_string() + "*" + Expr(n.b).to_string() + ")";
    case Kind::Div:
      return "(" + Expr(n.a).to_string() + "/" + Expr(n.b).to_string() + ")";
    case Kind::Neg:
      return "(-" + Expr(n.a).to_string() + ")";
    case Kind::Pow:
      return "(" + Expr(n.a).to_string() + ")^" + std::to_string(n.exponent);
    case Kind::Sqrt:
      return "sqrt(" + Expr(n.a).to_string() + ")";
  }
  throw std::logic_error("unreachable");
}

Poly parse_polynomial(const std::string& text, const RingPtr& ring) {
  return Expr::parse(text).to_polynomial(ring);
}

RationalFunction parse_rational_function(const std::string& text) {
  return Expr::parse(text).to_rational_function();
}

PolyFraction expr_fraction(const Expr& e, const RingPtr& ring) {
  if (e.empty()) throw std::invalid_argument("empty expression");
  const PolyRF one = PolyRF::constant(ring, RationalFunction(1));
  const Expr::Node& n = e.node();
  switch (n.kind) {
    case Expr::Kind::Number:
      return {PolyRF::constant(ring, RationalFunction(n.value)), one};
    case Expr::Kind::Symbol:
      if (ring->contains(n.name)) return {PolyRF::variable(ring, n.name), one};
      return {PolyRF::constant(ring, RationalFunction::variable(n.name)), one};
    case Expr::Kind::Add: {
      PolyFraction a = expr_fraction(Expr(n.a), ring);
      PolyFraction b = expr_fraction(Expr(n.b), ring);
      return {a.num * b.den + b.num * a.den, a.den * b.den};
    }
    case Expr::Kind::Sub: {
      PolyFraction a = expr_fraction(Expr(n.a), ring);
      PolyFraction b = expr_fraction(Expr(n.b), ring);
      return {a.num * b.den - b.num * a.den, a.den * b.den};
    }
    case Expr::Kind::Mul: {
      PolyFraction a = expr_fraction(Expr(n.a), ring);
      PolyFraction b = expr_fraction(Expr(n.b), ring);
      return {a.num * b.num, a.den * b.den};
    }
    case Expr::Kind::Div: {
      PolyFraction a = expr_fraction(Expr(n.a), ring);
      PolyFraction b = expr_fraction(Expr(n.b), ring);
      if (b.num.is_zero())
        throw std::invalid_argument("division by zero in expression");
      return {a.num * b.den, a.den * b.num};
    }
    case Expr::Kind::Neg: {
      PolyFraction a = expr_fraction(Expr(n.a), ring);
      return {-a.num, a.den};
    }
    case Expr::Kind::Pow: {
      PolyFraction a = expr_fraction(Expr(n.a), ring);
      unsigned e2 = static_cast<unsigned>(n.exponent < 0 ? -n.exponent
                                                         : n.exponent);
      PolyFraction r{a.num.pow(e2), a.den.pow(e2)};
      if (n.exponent >= 0) return r;
      if (r.num.is_zero())
        throw std::invalid_argument("division by zero in expression");
      return {r.den, r.num};
    }
    case Expr::Kind::Sqrt:
      throw std::invalid_argument(
          "radical expression has no polynomial-fraction view: '" +
          e.to_string() + "'");
  }
  throw std::logic_error("unreachable");
}

}  // namespace ksw
