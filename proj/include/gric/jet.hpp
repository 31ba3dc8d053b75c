#ifndef GRIC_JET_HPP
#define GRIC_JET_HPP

#include <map>
#include <memory>
#include <vector>

#include "gric/expr.hpp"

namespace gric {

// Enumeration of multi-indices |m| <= order in n variables, shared between
// all jets at the same truncation order. Cached per (n, order).
class JetLayout {
 public:
  static std::shared_ptr<const JetLayout> get(int n, int order);

  int dim() const { return n_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(exps_.size()); }
  const std::vector<int>& exponent(int k) const { return exps_[k]; }
  int total_degree(int k) const { return degree_[k]; }
  // Position of a multi-index, or -1 when |m| > order.
  int find(const std::vector<int>& m) const;

 private:
  JetLayout(int n, int order);
  int n_, order_;
  std::vector<std::vector<int>> exps_;
  std::vector<int> degree_;
  std::map<std::vector<int>, int> pos_;
};

// Truncated multivariate Taylor expansion of a scalar field at a base point.
// Coefficients are monomial Taylor coefficients d^m f / m!; raw partial
// derivatives are a view (partial()). Jets carry a differentiability budget:
// each partial_derivative consumes one order and errors once exhausted.
class Jet {
 public:
  Jet() = default;
  Jet(std::shared_ptr<const JetLayout> layout, std::vector<double> base_point,
      std::vector<double> coeffs, int budget);

  static Jet constant(const std::shared_ptr<const JetLayout>& layout,
                      const std::vector<double>& base_point, double v);
  static Jet variable(const std::shared_ptr<const JetLayout>& layout,
                      const std::vector<double>& base_point, int i);

  const std::shared_ptr<const JetLayout>& layout() const { return layout_; }
  const std::vector<double>& base_point() const { return base_; }
  const std::vector<double>& coeffs() const { return c_; }
  int budget() const { return budget_; }
  int order() const { return layout_->order(); }
  bool valid() const { return layout_ != nullptr; }

  double value() const { return c_.empty() ? 0.0 : c_[0]; }
  double coeff(const std::vector<int>& m) const;
  // Raw partial derivative d^m f at the base point (= coeff * m!).
  double partial(const std::vector<int>& m) const;

  Jet operator+(const Jet& o) const;
  Jet operator-(const Jet& o) const;
  Jet operator*(const Jet& o) const;
  Jet operator/(const Jet& o) const;
  Jet operator-() const;
  Jet operator*(double s) const;
  Jet& operator+=(const Jet& o) { *this = valid() ? *this + o : o; return *this; }

  Jet sqrt() const;
  Jet sin() const;
  Jet cos() const;
  Jet exp() const;
  Jet pow(int e) const;
  Jet reciprocal() const;

  // d/dx_i as a jet; consumes one unit of budget.
  Jet partial_derivative(int i) const;

  bool is_zero() const;
  double max_abs_coeff() const;
  // Largest |coefficient| over multi-indices with |m| <= through_order.
  double max_abs_coeff_through(int through_order) const;

 private:
  void check_same(const Jet& o) const;
  // f(this) for an analytic f given by Taylor coefficients at value().
  Jet compose(const std::vector<double>& series) const;

  std::shared_ptr<const JetLayout> layout_;
  std::vector<double> base_;
  std::vector<double> c_;
  int budget_ = 0;
};

inline Jet operator*(double s, const Jet& j) { return j * s; }

// Taylor coefficients of e at x0 up to the layout order; budget = K.
Jet evaluate_jet(const Expression& e, const std::vector<double>& x0, int K);

// Central-difference estimate of the same jet, orders K <= 2; O(h^2) error.
// h <= 0 selects the default step 1e-4 * max(1, |x0_i|) per axis.
Jet finite_difference_jet(const Expression& e, const std::vector<double>& x0,
                          int K, double h = 0.0);

}  // namespace gric

#endif
