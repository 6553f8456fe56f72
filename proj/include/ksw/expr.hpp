#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>

#include "ksw/interval.hpp"
#include "ksw/polynomial.hpp"
#include "ksw/rational_function.hpp"

namespace ksw {

struct PolyFraction;

// Expression tree for the text grammar shared by polynomials, rational
// functions and radical expressions:
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := ['-'] base ['^' integer]
//   base   := number | name | '(' expr ')' | 'sqrt' '(' expr ')'
//
// Numbers are decimal integers, fractions (via '/') or decimal literals; all
// are exact rationals. One parser serves three views: a plain polynomial, a
// rational function over the parameter ring, and a radical expression
// evaluated with interval arithmetic.
class Expr {
 public:
  enum class Kind { Number, Symbol, Add, Sub, Mul, Div, Neg, Pow, Sqrt };

  struct Node;
  using NodePtr = std::shared_ptr<const Node>;
  struct Node {
    Kind kind;
    Rational value;     // Number
    std::string name;   // Symbol
    NodePtr a, b;       // operands
    long exponent = 0;  // Pow
  };

  Expr() = default;

  static Expr parse(const std::string& text);

  static Expr number(Rational v);
  static Expr symbol(const std::string& name);
  static Expr add(Expr x, Expr y);
  static Expr sub(Expr x, Expr y);
  static Expr mul(Expr x, Expr y);
  static Expr div(Expr x, Expr y);
  static Expr neg(Expr x);
  static Expr pow(Expr x, long e);
  static Expr sqrt(Expr x);

  bool empty() const { return !root_; }
  const Node& node() const { return *root_; }

  // Children as expressions (empty when absent); for tree walkers.
  Expr left() const { return root_ && root_->a ? Expr(root_->a) : Expr(); }
  Expr right() const { return root_ && root_->b ? Expr(root_->b) : Expr(); }

  std::set<std::string> symbols() const;
  Expr substitute(const std::map<std::string, Expr>& images) const;
  Expr differentiate(const std::string& var) const;

  // Enclosure of the value over interval assignments of the symbols.
  Interval eval_interval(const std::map<std::string, Interval>& env,
                         long prec = Interval::kDefaultPrec) const;
  double eval_double(const std::map<std::string, double>& env) const;

  // View as a polynomial. Radicals are rejected; division is allowed only by
  // nonzero constants; negative powers only of nonzero constants.
  Poly to_polynomial(const RingPtr& ring) const;

  // View as an element of the parameter field. Radicals are rejected.
  RationalFunction to_rational_function() const;

  std::string to_string() const;

 private:
  explicit Expr(NodePtr root) : root_(std::move(root)) {}
  NodePtr root_;

  friend PolyFraction expr_fraction(const Expr& e, const RingPtr& ring);
};

// Parse text straight into a polynomial over `ring` (the lenient superset
// grammar: coefficients optional, parentheses allowed).
Poly parse_polynomial(const std::string& text, const RingPtr& ring);

RationalFunction parse_rational_function(const std::string& text);

// A quotient of polynomials over a state ring with coefficients in the
// parameter field. Not reduced; equality questions go through
// cross-multiplication or ideal membership.
struct PolyFraction {
  PolyRF num, den;
};

// View an expression as such a quotient: symbols resolve to `ring` variables
// first, then to parameters; radicals are rejected.
PolyFraction expr_fraction(const Expr& e, const RingPtr& ring);

}  // namespace ksw
