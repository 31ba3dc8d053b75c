#include "gric/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "gric/errors.hpp"

namespace gric {

Expression Expression::constant(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = v;
  return Expression(n);
}

Expression Expression::variable(int index0) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->index = index0;
  return Expression(n);
}

Expression Expression::unary(Kind k, const Expression& a) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = std::shared_ptr<const Node>(a.root_);
  return Expression(n);
}

Expression Expression::binary(Kind k, const Expression& a, const Expression& b) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = a.root_;
  n->b = b.root_;
  return Expression(n);
}

Expression Expression::pow(const Expression& a, int exponent) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Pow;
  n->index = exponent;
  n->a = a.root_;
  return Expression(n);
}

namespace {

std::string print_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_node(const Expression::Node* n, std::string& out) {
  using K = Expression::Kind;
  switch (n->kind) {
    case K::Constant:
      // Parsed trees only ever hold nonnegative constants; a programmatic
      // negative constant prints as a negation so output stays in-grammar.
      if (n->value < 0) {
        out += "-(" + print_number(-n->value) + ")";
      } else {
        out += print_number(n->value);
      }
      break;
    case K::Variable:
      out += "x" + std::to_string(n->index + 1);
      break;
    case K::Neg:
      out += "-";
      // factor := "-" factor; wrap operand as an atom
      out += "(";
      print_node(n->a.get(), out);
      out += ")";
      break;
    case K::Sqrt: out += "sqrt("; print_node(n->a.get(), out); out += ")"; break;
    case K::Sin:  out += "sin(";  print_node(n->a.get(), out); out += ")"; break;
    case K::Cos:  out += "cos(";  print_node(n->a.get(), out); out += ")"; break;
    case K::Exp:  out += "exp(";  print_node(n->a.get(), out); out += ")"; break;
    case K::Add:
    case K::Sub:
    case K::Mul:
    case K::Div:
      out += "(";
      print_node(n->a.get(), out);
      out += n->kind == K::Add ? "+" : n->kind == K::Sub ? "-" :
             n->kind == K::Mul ? "*" : "/";
      print_node(n->b.get(), out);
      out += ")";
      break;
    case K::Pow:
      out += "(";
      print_node(n->a.get(), out);
      out += ")^" + std::to_string(n->index);
      break;
  }
}

double eval_node(const Expression::Node* n, const std::vector<double>& x) {
  using K = Expression::Kind;
  switch (n->kind) {
    case K::Constant: return n->value;
    case K::Variable: return x.at(static_cast<std::size_t>(n->index));
    case K::Neg: return -eval_node(n->a.get(), x);
    case K::Sqrt: {
      double v = eval_node(n->a.get(), x);
      if (v <= 0) throw SqrtOfNonpositive();
      return std::sqrt(v);
    }
    case K::Sin: return std::sin(eval_node(n->a.get(), x));
    case K::Cos: return std::cos(eval_node(n->a.get(), x));
    case K::Exp: return std::exp(eval_node(n->a.get(), x));
    case K::Add: return eval_node(n->a.get(), x) + eval_node(n->b.get(), x);
    case K::Sub: return eval_node(n->a.get(), x) - eval_node(n->b.get(), x);
    case K::Mul: return eval_node(n->a.get(), x) * eval_node(n->b.get(), x);
    case K::Div: {
      double d = eval_node(n->b.get(), x);
      if (d == 0) throw DivisionByZeroConstantTerm();
      return eval_node(n->a.get(), x) / d;
    }
    case K::Pow: return std::pow(eval_node(n->a.get(), x), n->index);
  }
  throw DomainError("unreachable expression kind");
}

bool same_node(const Expression::Node* a, const Expression::Node* b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->value != b->value || a->index != b->index) return false;
  return same_node(a->a.get(), b->a.get()) && same_node(a->b.get(), b->b.get());
}

class Parser {
 public:
  Parser(const std::string& src, int n) : src_(src), n_(n) {}

  Expression parse() {
    skip_ws();
    Expression e = expr();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError(pos_, "end of input or operator");
    if (e.empty()) throw ParseError(pos_, "expression");
    return e;
  }

 private:
  const std::string& src_;
  int n_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  bool accept(char c) {
    if (peek(c)) { ++pos_; return true; }
    return false;
  }

  void expect(char c, const char* what) {
    if (!accept(c)) throw ParseError(pos_, what);
  }

  Expression expr() {
    Expression e = term();
    for (;;) {
      if (accept('+')) e = e + term();
      else if (accept('-')) e = e - term();
      else break;
    }
    return e;
  }

  Expression term() {
    Expression e = factor();
    for (;;) {
      if (accept('*')) e = e * factor();
      else if (accept('/')) e = e / factor();
      else break;
    }
    return e;
  }

  Expression factor() {
    if (accept('-')) return -factor();
    Expression a = atom();
    if (accept('^')) return Expression::pow(a, integer());
    return a;
  }

  int integer() {
    skip_ws();
    std::size_t start = pos_;
    bool neg = false;
    if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+')) {
      neg = src_[pos_] == '-';
      ++pos_;
    }
    if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
      throw ParseError(pos_, "integer exponent");
    long v = 0;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      v = v * 10 + (src_[pos_] - '0');
      if (v > 1000000) throw ParseError(start, "representable exponent");
      ++pos_;
    }
    return static_cast<int>(neg ? -v : v);
  }

  Expression atom() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError(pos_, "number, identifier, function or '('");
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expression e = expr();
      expect(')', "')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return ident_or_func();
    throw ParseError(pos_, "number, identifier, function or '('");
  }

  Expression number() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
      ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // not an exponent after all
      }
    }
    std::string tok = src_.substr(start, pos_ - start);
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) throw ParseError(start, "number");
    return Expression::constant(v);
  }

  Expression ident_or_func() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    std::string name = src_.substr(start, pos_ - start);
    if (name == "x") {
      if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
        throw ParseError(pos_, "coordinate index after 'x'");
      long idx = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        idx = idx * 10 + (src_[pos_] - '0');
        if (idx > 1000000) throw VariableOutOfRange("coordinate index too large");
        ++pos_;
      }
      if (idx < 1 || idx > n_)
        throw VariableOutOfRange("coordinate x" + std::to_string(idx) +
                                 " out of range for dimension " + std::to_string(n_));
      return Expression::variable(static_cast<int>(idx - 1));
    }
    Expression::Kind k;
    if (name == "sqrt") k = Expression::Kind::Sqrt;
    else if (name == "sin") k = Expression::Kind::Sin;
    else if (name == "cos") k = Expression::Kind::Cos;
    else if (name == "exp") k = Expression::Kind::Exp;
    else throw ParseError(start, "'sqrt', 'sin', 'cos', 'exp' or coordinate");
    expect('(', "'(' after function name");
    Expression e = expr();
    expect(')', "')'");
    return Expression::unary(k, e);
  }
};

}  // namespace

std::string Expression::print() const {
  std::string out;
  if (root_) print_node(root_.get(), out);
  return out;
}

double Expression::eval(const std::vector<double>& x) const {
  if (!root_) throw DomainError("empty expression");
  return eval_node(root_.get(), x);
}

bool Expression::same_tree(const Expression& o) const {
  return same_node(root_.get(), o.root_.get());
}

Expression parse_expression(const std::string& src, int n) {
  return Parser(src, n).parse();
}

}  // namespace gric
