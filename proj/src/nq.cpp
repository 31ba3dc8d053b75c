#include "gric/nq.hpp"

#include <algorithm>
#include <cmath>

#include "gric/errors.hpp"

namespace gric {

namespace {

// Sorts a triple, returning the permutation sign (0 on repeats).
int sort3(std::array<int, 3>& k) {
  int sign = 1;
  for (int pass = 0; pass < 2; ++pass)
    for (int i = 0; i < 2; ++i)
      if (k[i] > k[i + 1]) {
        std::swap(k[i], k[i + 1]);
        sign = -sign;
      }
  if (k[0] == k[1] || k[1] == k[2]) return 0;
  return sign;
}

}  // namespace

Jet NQStructure::c_read(int a, int b, int g) const {
  std::array<int, 3> key{a, b, g};
  int sign = sort3(key);
  if (sign == 0) return zero_jet();
  auto it = c.find(key);
  if (it == c.end()) return zero_jet();
  return sign < 0 ? -it->second : it->second;
}

Jet NQStructure::c_raised(int a, int b, int g) const {
  return c_read(a, b, g) * static_cast<double>(metric.sign(a));
}

NQStructure NQStructure::from_expressions(
    std::shared_ptr<const GradedChart> chart, MetricSplit metric,
    const std::vector<std::vector<Expression>>& rho_expr,
    const std::map<std::array<int, 3>, Expression>& c_expr) {
  const int n = chart->n, d = chart->r + chart->s;
  if (static_cast<int>(metric.g_plus.size()) != chart->r ||
      static_cast<int>(metric.g_minus.size()) != chart->s)
    throw SchemaError("signature lengths do not match ranks");
  if (static_cast<int>(rho_expr.size()) != n)
    throw SchemaError("rho must have base_dim rows");
  NQStructure S;
  S.chart = chart;
  S.metric = std::move(metric);
  S.rho_expr = rho_expr;
  S.c_expr = c_expr;
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rho_expr[static_cast<std::size_t>(i)].size()) != d)
      throw SchemaError("rho rows must have rank_plus + rank_minus columns");
    std::vector<Jet> row;
    for (int alpha = 0; alpha < d; ++alpha)
      row.push_back(evaluate_jet(rho_expr[static_cast<std::size_t>(i)]
                                         [static_cast<std::size_t>(alpha)],
                                 chart->base_point, chart->jet_order));
    S.rho.push_back(std::move(row));
  }
  for (const auto& [key, ex] : c_expr) {
    if (!(key[0] < key[1] && key[1] < key[2]) || key[0] < 0 || key[2] >= d)
      throw SchemaError("c indices must satisfy 0 <= a < b < g < rank_plus + rank_minus");
    S.c[key] = evaluate_jet(ex, chart->base_point, chart->jet_order);
  }
  return S;
}

NQStructure NQStructure::at_point(const std::vector<double>& base_point) const {
  if (rho_expr.empty() && chart->n > 0)
    throw SchemaError("structure has no expression sources to re-base");
  auto new_chart = GradedChart::make(chart->n, chart->r, chart->s, base_point,
                                     chart->jet_order);
  return from_expressions(new_chart, metric, rho_expr, c_expr);
}

GradedElement build_hamiltonian(const NQStructure& S) {
  const auto& chart = S.chart;
  GradedElement H = GradedElement::zero(chart);
  for (int i = 0; i < chart->n; ++i)
    for (int alpha = 0; alpha < chart->r + chart->s; ++alpha) {
      const Jet& c = S.rho_at(i, alpha);
      if (c.is_zero()) continue;
      H += GradedElement::monomial(chart, c, {i}, {alpha});
    }
  // -(1/6) c_{abc} e^a e^b e^c: antisymmetry collapses the 1/6 onto the
  // stored a<b<g components with coefficient -1.
  for (const auto& [key, cj] : S.c) {
    if (cj.is_zero()) continue;
    H += GradedElement::monomial(chart, -cj, {}, {key[0], key[1], key[2]});
  }
  return H;
}

Derivation q_e_derivation(const NQStructure& S) {
  const auto& chart = S.chart;
  GradedElement H = build_hamiltonian(S);
  Derivation D = Derivation::zero(chart, 1, 1);
  for (int i = 0; i < chart->n; ++i) {
    D.on_x[static_cast<std::size_t>(i)] = poisson_bracket(
        H, GradedElement::generator(chart, {Generator::Kind::X, i}), S.metric);
    D.on_p[static_cast<std::size_t>(i)] = poisson_bracket(
        H, GradedElement::generator(chart, {Generator::Kind::P, i}), S.metric);
  }
  for (int alpha = 0; alpha < chart->r + chart->s; ++alpha)
    D.on_e[static_cast<std::size_t>(alpha)] = poisson_bracket(
        H, GradedElement::generator(chart, {Generator::Kind::E, alpha}), S.metric);
  return D;
}

double MasterResidual::max_residual() const {
  return std::max(pp, std::max(pee, e4));
}

MasterResidual check_master_equation(const NQStructure& S, double tol) {
  GradedElement H = build_hamiltonian(S);
  MasterResidual res;
  res.residual = poisson_bracket(H, H, S.metric);
  res.tol = tol;
  for (const auto& t : res.residual.terms()) {
    double v = std::abs(t.coeff.value());
    if (t.pmono.size() == 2) res.pp = std::max(res.pp, v);
    else if (t.pmono.size() == 1) res.pee = std::max(res.pee, v);
    else res.e4 = std::max(res.e4, v);
  }
  return res;
}

GradedElement tautological_section(const std::shared_ptr<const GradedChart>& chart,
                                   const MetricSplit& metric) {
  GradedElement tau = GradedElement::zero(chart);
  Jet one = Jet::constant(chart->layout, chart->base_point, 1.0);
  for (int a = 0; a < chart->r; ++a)
    tau += GradedElement::monomial(chart, one * static_cast<double>(metric.sign(a)),
                                   {}, {a, chart->xi_id(a)});
  return tau;
}

CourantData export_courant_data(const NQStructure& S) {
  CourantData d;
  d.base_point = S.chart->base_point;
  d.pairing_plus = S.metric.g_plus;
  d.pairing_minus = S.metric.g_minus;
  for (int i = 0; i < S.chart->n; ++i) {
    std::vector<double> row;
    for (int alpha = 0; alpha < S.chart->r + S.chart->s; ++alpha)
      row.push_back(S.rho_at(i, alpha).value());
    d.anchor.push_back(std::move(row));
  }
  for (const auto& [key, cj] : S.c)
    d.bracket.push_back({key[0], key[1], key[2], cj.value()});
  return d;
}

}  // namespace gric
