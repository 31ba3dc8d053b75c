#include "gric/jet.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "gric/errors.hpp"

namespace gric {

namespace {

void enumerate(int n, int order, std::vector<int>& cur, int remaining, int axis,
               std::vector<std::vector<int>>& out) {
  if (axis == n) {
    if (remaining == 0) out.push_back(cur);
    return;
  }
  if (axis == n - 1) {
    cur[axis] = remaining;
    out.push_back(cur);
    cur[axis] = 0;
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    cur[axis] = k;
    enumerate(n, order, cur, remaining - k, axis + 1, out);
  }
  cur[axis] = 0;
}

double factorial(int k) {
  double f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

JetLayout::JetLayout(int n, int order) : n_(n), order_(order) {
  std::vector<int> cur(static_cast<std::size_t>(std::max(n, 1)), 0);
  if (n == 0) {
    exps_.push_back({});
  } else {
    for (int d = 0; d <= order; ++d) {
      std::vector<std::vector<int>> level;
      enumerate(n, order, cur, d, 0, level);
      for (auto& m : level) exps_.push_back(m);
    }
  }
  for (int k = 0; k < static_cast<int>(exps_.size()); ++k) {
    int deg = 0;
    for (int e : exps_[k]) deg += e;
    degree_.push_back(deg);
    pos_[exps_[k]] = k;
  }
}

std::shared_ptr<const JetLayout> JetLayout::get(int n, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{n, order}];
  if (!slot) slot = std::shared_ptr<const JetLayout>(new JetLayout(n, order));
  return slot;
}

int JetLayout::find(const std::vector<int>& m) const {
  auto it = pos_.find(m);
  return it == pos_.end() ? -1 : it->second;
}

Jet::Jet(std::shared_ptr<const JetLayout> layout, std::vector<double> base_point,
         std::vector<double> coeffs, int budget)
    : layout_(std::move(layout)), base_(std::move(base_point)),
      c_(std::move(coeffs)), budget_(budget) {
  c_.resize(static_cast<std::size_t>(layout_->size()), 0.0);
}

Jet Jet::constant(const std::shared_ptr<const JetLayout>& layout,
                  const std::vector<double>& base_point, double v) {
  std::vector<double> c(static_cast<std::size_t>(layout->size()), 0.0);
  c[0] = v;
  return Jet(layout, base_point, std::move(c), layout->order());
}

Jet Jet::variable(const std::shared_ptr<const JetLayout>& layout,
                  const std::vector<double>& base_point, int i) {
  if (i < 0 || i >= layout->dim())
    throw VariableOutOfRange("jet variable index out of range");
  std::vector<double> c(static_cast<std::size_t>(layout->size()), 0.0);
  c[0] = base_point[static_cast<std::size_t>(i)];
  std::vector<int> m(static_cast<std::size_t>(layout->dim()), 0);
  m[static_cast<std::size_t>(i)] = 1;
  int k = layout->find(m);
  if (k >= 0) c[static_cast<std::size_t>(k)] = 1.0;
  return Jet(layout, base_point, std::move(c), layout->order());
}

void Jet::check_same(const Jet& o) const {
  if (layout_ != o.layout_ || base_ != o.base_) throw ChartMismatch();
}

double Jet::coeff(const std::vector<int>& m) const {
  int k = layout_->find(m);
  return k < 0 ? 0.0 : c_[static_cast<std::size_t>(k)];
}

double Jet::partial(const std::vector<int>& m) const {
  double f = 1;
  for (int e : m) f *= factorial(e);
  return coeff(m) * f;
}

Jet Jet::operator+(const Jet& o) const {
  check_same(o);
  std::vector<double> c(c_);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] += o.c_[k];
  return Jet(layout_, base_, std::move(c), std::min(budget_, o.budget_));
}

Jet Jet::operator-(const Jet& o) const {
  check_same(o);
  std::vector<double> c(c_);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] -= o.c_[k];
  return Jet(layout_, base_, std::move(c), std::min(budget_, o.budget_));
}

Jet Jet::operator-() const {
  std::vector<double> c(c_);
  for (double& v : c) v = -v;
  return Jet(layout_, base_, std::move(c), budget_);
}

Jet Jet::operator*(double s) const {
  std::vector<double> c(c_);
  for (double& v : c) v *= s;
  return Jet(layout_, base_, std::move(c), budget_);
}

Jet Jet::operator*(const Jet& o) const {
  check_same(o);
  const JetLayout& L = *layout_;
  std::vector<double> c(static_cast<std::size_t>(L.size()), 0.0);
  std::vector<int> sum(static_cast<std::size_t>(std::max(L.dim(), 1)), 0);
  for (int a = 0; a < L.size(); ++a) {
    if (c_[static_cast<std::size_t>(a)] == 0.0) continue;
    for (int b = 0; b < L.size(); ++b) {
      if (o.c_[static_cast<std::size_t>(b)] == 0.0) continue;
      if (L.total_degree(a) + L.total_degree(b) > L.order()) continue;
      const auto& ma = L.exponent(a);
      const auto& mb = L.exponent(b);
      sum.resize(ma.size());
      for (std::size_t i = 0; i < ma.size(); ++i) sum[i] = ma[i] + mb[i];
      int k = L.find(sum);
      c[static_cast<std::size_t>(k)] +=
          c_[static_cast<std::size_t>(a)] * o.c_[static_cast<std::size_t>(b)];
    }
  }
  return Jet(layout_, base_, std::move(c), std::min(budget_, o.budget_));
}

Jet Jet::compose(const std::vector<double>& series) const {
  // f(c0 + w) = sum_k f^(k)(c0)/k! * w^k, w nilpotent to the layout order.
  Jet w = *this;
  w.c_[0] = 0.0;
  Jet acc = Jet::constant(layout_, base_, series[0]);
  acc.budget_ = budget_;
  Jet wp = w;
  for (int k = 1; k <= layout_->order(); ++k) {
    if (k > 1) wp = wp * w;
    acc = acc + wp * series[static_cast<std::size_t>(k)];
  }
  return acc;
}

Jet Jet::sqrt() const {
  double c0 = value();
  if (c0 <= 0) throw SqrtOfNonpositive();
  std::vector<double> s(static_cast<std::size_t>(order()) + 1);
  // d_k = binom(1/2, k) c0^(1/2 - k)
  double coefk = std::sqrt(c0);
  s[0] = coefk;
  double binom = 1.0;
  for (int k = 1; k <= order(); ++k) {
    binom *= (0.5 - (k - 1)) / k;
    s[static_cast<std::size_t>(k)] = binom * std::pow(c0, 0.5 - k);
  }
  return compose(s);
}

Jet Jet::exp() const {
  double e0 = std::exp(value());
  std::vector<double> s(static_cast<std::size_t>(order()) + 1);
  for (int k = 0; k <= order(); ++k) s[static_cast<std::size_t>(k)] = e0 / factorial(k);
  return compose(s);
}

Jet Jet::sin() const {
  double c0 = value();
  double sn = std::sin(c0), cs = std::cos(c0);
  std::vector<double> s(static_cast<std::size_t>(order()) + 1);
  const double cycle[4] = {sn, cs, -sn, -cs};
  for (int k = 0; k <= order(); ++k) s[static_cast<std::size_t>(k)] = cycle[k % 4] / factorial(k);
  return compose(s);
}

Jet Jet::cos() const {
  double c0 = value();
  double sn = std::sin(c0), cs = std::cos(c0);
  std::vector<double> s(static_cast<std::size_t>(order()) + 1);
  const double cycle[4] = {cs, -sn, -cs, sn};
  for (int k = 0; k <= order(); ++k) s[static_cast<std::size_t>(k)] = cycle[k % 4] / factorial(k);
  return compose(s);
}

Jet Jet::reciprocal() const {
  double c0 = value();
  if (c0 == 0) throw DivisionByZeroConstantTerm();
  std::vector<double> s(static_cast<std::size_t>(order()) + 1);
  double v = 1.0 / c0;
  for (int k = 0; k <= order(); ++k) {
    s[static_cast<std::size_t>(k)] = v;
    v *= -1.0 / c0;
  }
  return compose(s);
}

Jet Jet::operator/(const Jet& o) const { return *this * o.reciprocal(); }

Jet Jet::pow(int e) const {
  if (e < 0) return reciprocal().pow(-e);
  Jet acc = Jet::constant(layout_, base_, 1.0);
  acc.budget_ = budget_;
  Jet b = *this;
  int k = e;
  while (k > 0) {
    if (k & 1) acc = acc * b;
    k >>= 1;
    if (k) b = b * b;
  }
  return acc;
}

Jet Jet::partial_derivative(int i) const {
  if (budget_ <= 0) throw JetOrderExhausted();
  const JetLayout& L = *layout_;
  std::vector<double> c(static_cast<std::size_t>(L.size()), 0.0);
  std::vector<int> m;
  for (int k = 0; k < L.size(); ++k) {
    m = L.exponent(k);
    m[static_cast<std::size_t>(i)] += 1;
    int src = L.find(m);
    // Coefficients at the top order are unknown after differentiation and
    // stay zero; the budget marks them untrusted.
    if (src >= 0)
      c[static_cast<std::size_t>(k)] =
          c_[static_cast<std::size_t>(src)] * m[static_cast<std::size_t>(i)];
  }
  return Jet(layout_, base_, std::move(c), budget_ - 1);
}

bool Jet::is_zero() const {
  for (double v : c_)
    if (v != 0.0) return false;
  return true;
}

double Jet::max_abs_coeff() const {
  double m = 0;
  for (double v : c_) m = std::max(m, std::abs(v));
  return m;
}

double Jet::max_abs_coeff_through(int through_order) const {
  double m = 0;
  for (int k = 0; k < layout_->size(); ++k)
    if (layout_->total_degree(k) <= through_order)
      m = std::max(m, std::abs(c_[static_cast<std::size_t>(k)]));
  return m;
}

namespace {

Jet eval_jet_node(const Expression::Node* n,
                  const std::shared_ptr<const JetLayout>& L,
                  const std::vector<double>& x0) {
  using K = Expression::Kind;
  switch (n->kind) {
    case K::Constant: return Jet::constant(L, x0, n->value);
    case K::Variable: return Jet::variable(L, x0, n->index);
    case K::Neg: return -eval_jet_node(n->a.get(), L, x0);
    case K::Sqrt: return eval_jet_node(n->a.get(), L, x0).sqrt();
    case K::Sin: return eval_jet_node(n->a.get(), L, x0).sin();
    case K::Cos: return eval_jet_node(n->a.get(), L, x0).cos();
    case K::Exp: return eval_jet_node(n->a.get(), L, x0).exp();
    case K::Add: return eval_jet_node(n->a.get(), L, x0) + eval_jet_node(n->b.get(), L, x0);
    case K::Sub: return eval_jet_node(n->a.get(), L, x0) - eval_jet_node(n->b.get(), L, x0);
    case K::Mul: return eval_jet_node(n->a.get(), L, x0) * eval_jet_node(n->b.get(), L, x0);
    case K::Div: return eval_jet_node(n->a.get(), L, x0) / eval_jet_node(n->b.get(), L, x0);
    case K::Pow: return eval_jet_node(n->a.get(), L, x0).pow(n->index);
  }
  throw DomainError("unreachable expression kind");
}

}  // namespace

Jet evaluate_jet(const Expression& e, const std::vector<double>& x0, int K) {
  auto L = JetLayout::get(static_cast<int>(x0.size()), K);
  if (!e.root()) throw DomainError("empty expression");
  return eval_jet_node(e.root(), L, x0);
}

Jet finite_difference_jet(const Expression& e, const std::vector<double>& x0,
                          int K, double h) {
  if (K < 0 || K > 2) throw DomainError("finite_difference_jet supports orders 0..2");
  int n = static_cast<int>(x0.size());
  auto L = JetLayout::get(n, K);
  std::vector<double> steps(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    steps[static_cast<std::size_t>(i)] =
        h > 0 ? h : 1e-4 * std::max(1.0, std::abs(x0[static_cast<std::size_t>(i)]));

  auto at = [&](const std::vector<double>& x) { return e.eval(x); };
  std::vector<double> c(static_cast<std::size_t>(L->size()), 0.0);
  double f0 = at(x0);
  c[0] = f0;
  if (K >= 1) {
    for (int i = 0; i < n; ++i) {
      std::vector<double> xp = x0, xm = x0;
      double hi = steps[static_cast<std::size_t>(i)];
      xp[static_cast<std::size_t>(i)] += hi;
      xm[static_cast<std::size_t>(i)] -= hi;
      std::vector<int> m(static_cast<std::size_t>(n), 0);
      m[static_cast<std::size_t>(i)] = 1;
      c[static_cast<std::size_t>(L->find(m))] = (at(xp) - at(xm)) / (2 * hi);
    }
  }
  if (K >= 2) {
    for (int i = 0; i < n; ++i) {
      double hi = steps[static_cast<std::size_t>(i)];
      std::vector<double> xp = x0, xm = x0;
      xp[static_cast<std::size_t>(i)] += hi;
      xm[static_cast<std::size_t>(i)] -= hi;
      std::vector<int> m(static_cast<std::size_t>(n), 0);
      m[static_cast<std::size_t>(i)] = 2;
      // Taylor coefficient: second partial / 2
      c[static_cast<std::size_t>(L->find(m))] =
          (at(xp) - 2 * f0 + at(xm)) / (hi * hi) / 2.0;
      for (int j = i + 1; j < n; ++j) {
        double hj = steps[static_cast<std::size_t>(j)];
        std::vector<double> xpp = x0, xpm = x0, xmp = x0, xmm = x0;
        xpp[static_cast<std::size_t>(i)] += hi; xpp[static_cast<std::size_t>(j)] += hj;
        xpm[static_cast<std::size_t>(i)] += hi; xpm[static_cast<std::size_t>(j)] -= hj;
        xmp[static_cast<std::size_t>(i)] -= hi; xmp[static_cast<std::size_t>(j)] += hj;
        xmm[static_cast<std::size_t>(i)] -= hi; xmm[static_cast<std::size_t>(j)] -= hj;
        std::vector<int> mm(static_cast<std::size_t>(n), 0);
        mm[static_cast<std::size_t>(i)] = 1;
        mm[static_cast<std::size_t>(j)] = 1;
        c[static_cast<std::size_t>(L->find(mm))] =
            (at(xpp) - at(xpm) - at(xmp) + at(xmm)) / (4 * hi * hj);
      }
    }
  }
  return Jet(L, x0, std::move(c), K);
}

}  // namespace gric
