#ifndef GRIC_EXPR_HPP
#define GRIC_EXPR_HPP

#include <memory>
#include <string>
#include <vector>

namespace gric {

// Scalar fields on the base manifold as immutable expression trees.
// Grammar (whitespace insignificant):
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := atom ("^" int)? | "-" factor
//   atom   := number | ident | "(" expr ")" | func "(" expr ")"
//   func   := "sqrt" | "sin" | "cos" | "exp"
//   ident  := "x" int            (1-based coordinate index)
class Expression {
 public:
  enum class Kind {
    Constant, Variable,
    Neg, Sqrt, Sin, Cos, Exp,
    Add, Sub, Mul, Div,
    Pow
  };

  struct Node {
    Kind kind;
    double value = 0.0;   // Constant
    int index = 0;        // Variable: 0-based; Pow: integer exponent
    std::shared_ptr<const Node> a, b;
  };

  Expression() = default;
  explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

  static Expression constant(double v);
  static Expression variable(int index0);  // 0-based
  static Expression unary(Kind k, const Expression& a);
  static Expression binary(Kind k, const Expression& a, const Expression& b);
  static Expression pow(const Expression& a, int exponent);

  Expression operator+(const Expression& o) const { return binary(Kind::Add, *this, o); }
  Expression operator-(const Expression& o) const { return binary(Kind::Sub, *this, o); }
  Expression operator*(const Expression& o) const { return binary(Kind::Mul, *this, o); }
  Expression operator/(const Expression& o) const { return binary(Kind::Div, *this, o); }
  Expression operator-() const { return unary(Kind::Neg, *this); }

  bool empty() const { return !root_; }
  const Node* root() const { return root_.get(); }

  // Canonical printer; output re-parses to the identical tree.
  std::string print() const;

  // Plain pointwise evaluation (throws the same domain errors as jets).
  double eval(const std::vector<double>& x) const;

  bool same_tree(const Expression& o) const;

 private:
  std::shared_ptr<const Node> root_;
};

// Parses src against the grammar above; variable indices must be < n.
Expression parse_expression(const std::string& src, int n);

}  // namespace gric

#endif
