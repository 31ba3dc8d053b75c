#ifndef GRIC_NQ_HPP
#define GRIC_NQ_HPP

#include <array>
#include <map>
#include <vector>

#include "gric/expr.hpp"
#include "gric/graded.hpp"

namespace gric {

// Structure functions of the NQ structure: anchor components rho^i_alpha and
// totally antisymmetric c_{alpha beta gamma} (stored for alpha<beta<gamma),
// evaluated as jets at the chart base point.
struct NQStructure {
  std::shared_ptr<const GradedChart> chart;
  MetricSplit metric;
  std::vector<std::vector<Jet>> rho;        // [i][alpha], n rows, r+s columns
  std::map<std::array<int, 3>, Jet> c;      // key sorted, 0-based global e ids

  // Expression sources, kept when the model was loaded from expressions so
  // the structure can be re-based at another point. Empty for jet-valued
  // structures (the exact-case export).
  std::vector<std::vector<Expression>> rho_expr;
  std::map<std::array<int, 3>, Expression> c_expr;

  Jet zero_jet() const {
    return Jet::constant(chart->layout, chart->base_point, 0.0);
  }
  const Jet& rho_at(int i, int alpha) const {
    return rho[static_cast<std::size_t>(i)][static_cast<std::size_t>(alpha)];
  }
  // c with arbitrary index order: permutation sign applied, repeats read 0.
  Jet c_read(int a, int b, int g) const;
  // Raised first index: c^a_{bg} = g^{aa'} c_{a'bg} (diagonal raising).
  Jet c_raised(int a, int b, int g) const;

  static NQStructure from_expressions(
      std::shared_ptr<const GradedChart> chart, MetricSplit metric,
      const std::vector<std::vector<Expression>>& rho_expr,
      const std::map<std::array<int, 3>, Expression>& c_expr);

  // Clone at a new base point (requires expression sources).
  NQStructure at_point(const std::vector<double>& base_point) const;
};

// H = rho^i_alpha p_i e^alpha - (1/6) c_{abc} e^a e^b e^c  (degree 3).
GradedElement build_hamiltonian(const NQStructure& S);

// The derivation f -> {H, f}; zero on the fiber coordinates xi.
Derivation q_e_derivation(const NQStructure& S);

// {H,H} with its nonzero coefficients grouped by monomial shape. The groups
// correspond to distinct Courant axioms: p.p (anchor isotropy), p.e.e
// (anchor morphism), e^4 (Jacobi/Leibniz).
struct MasterResidual {
  GradedElement residual;
  double pp = 0, pee = 0, e4 = 0;  // max |coefficient| at the base point
  double tol = 0;
  bool valid() const { return pp <= tol && pee <= tol && e4 <= tol; }
  double max_residual() const;
};

MasterResidual check_master_equation(const NQStructure& S, double tol);

// tau = sum_a g_a e^a xi^a (undotted sector only, degree 2).
GradedElement tautological_section(const std::shared_ptr<const GradedChart>& chart,
                                   const MetricSplit& metric);

// Courant-algebroid dictionary evaluated at the base point.
struct CourantData {
  std::vector<std::vector<double>> anchor;  // n x (r+s)
  struct BracketConstant { int a, b, g; double value; };  // 0-based, a<b<g
  std::vector<BracketConstant> bracket;
  std::vector<int> pairing_plus, pairing_minus;
  std::vector<double> base_point;
};

CourantData export_courant_data(const NQStructure& S);

}  // namespace gric

#endif
