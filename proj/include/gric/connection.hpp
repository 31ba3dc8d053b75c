#ifndef GRIC_CONNECTION_HPP
#define GRIC_CONNECTION_HPP

#include <string>
#include <vector>

#include "gric/nq.hpp"

namespace gric {

// Connection Q = Q_E + psi^a_{b alpha} e^alpha xi^b d/dxi^a on V*.
// Upper and first lower index range over the undotted sector only.
struct Connection {
  NQStructure structure;
  std::vector<Jet> psi;  // flattened [a][b][alpha], size r*r*(r+s)

  const Jet& psi_at(int a, int b, int alpha) const {
    const int r = structure.chart->r, d = structure.chart->r + structure.chart->s;
    return psi[static_cast<std::size_t>((a * r + b) * d + alpha)];
  }
  Jet& psi_at(int a, int b, int alpha) {
    const int r = structure.chart->r, d = structure.chart->r + structure.chart->s;
    return psi[static_cast<std::size_t>((a * r + b) * d + alpha)];
  }
  // lambda_b = psi^a_{b a} (trace over the undotted pair).
  std::vector<Jet> lambda() const;
};

Connection make_connection(NQStructure S, std::vector<Jet> psi);

// Invariant-torsion connection: free undotted block psi_plus (r*r*r, flattened
// [a][b][c]), dotted block forced to psi^a_{b adot} = c^a_{b adot}.
Connection make_invariant_torsion(const NQStructure& S,
                                  const std::vector<Jet>& psi_plus);

Derivation connection_derivation(const Connection& Q);

// Torsion Q(tau), computed through the derivation engine.
GradedElement torsion(const Connection& Q);
// The same section assembled directly from (rho, c, psi):
//   rho_a^i p_i xi^a - 1/2 c_{a b g} e^b e^g xi^a - psi^a_{b al} e^al xi^b e_a.
GradedElement torsion_closed_form(const Connection& Q);

struct TorsionInvariance {
  bool invariant = false;
  double torsion_residual = 0;  // max |coeff| of iota(Q tau) - Q tau
  double eq_residual = 0;       // max |psi^a_{b adot} - c^a_{b adot}| at base
};
TorsionInvariance check_torsion_invariance(const Connection& Q, double tol);

// Curvature Q^2 restricted to the xi directions; construction fails if Q^2
// does not vanish on x, e, p (a master-equation failure upstream).
struct End2Element {
  std::shared_ptr<const GradedChart> chart;
  std::vector<GradedElement> comp;  // Q^2(xi^a), r entries
};

End2Element curvature(const Connection& Q, double tol = 1e-8);

// Anti-self-dual part (1/2)(D - iota D iota): keeps exactly the mixed
// e^c e^ddot xi^b terms.
End2Element project_antiselfdual(const End2Element& D);

// C: D -> d/de^a (pi D) xi^a. Matrix indexed (b, adot) in the xi^b e^adot
// monomial convention (Koszul sign -1 against the internal e^adot xi^b form).
std::vector<std::vector<double>> contract(const End2Element& D);

struct RicciTensor {
  std::vector<std::vector<double>> R;  // r x s, coefficient of xi^b e^adot
  std::vector<double> lambda;          // trace at the base point
  std::string path;                    // "engine" or "closed_form"
  std::vector<double> base_point;
};

RicciTensor ricci_engine(const Connection& Q);

// Closed-form evaluation
//   R_{b adot} = c^c_{b adot} lambda_c - rho^i_a d_i c^a_{b adot}
//              + rho^i_adot d_i lambda_b + c_{cdot a adot} c^{a cdot}_b
// with diagonal index raising and c^{a cdot}_b = g^{aa'} g^{cdot cdot'}
// c_{a' cdot' b} (slot order calibrated against the engine path).
RicciTensor ricci_closed_form(const NQStructure& S, const std::vector<Jet>& lambda);

// div(e_a) = -lambda_a.
std::vector<Jet> divergence(const Connection& Q);

// Courant algebroid connection coefficients Gamma^c_{alpha b} = psi^c_{b alpha};
// Leibniz contract: nabla(f u) = f nabla u + (Q_E f) (x) u.
struct GeneralizedConnectionReport {
  // full[alpha][c][b] = Gamma^c_{alpha b} at the base point
  std::vector<std::vector<std::vector<double>>> full;
  // restricted[c][a][b]: undotted directions only; for invariant-torsion
  // connections this block determines Q
  std::vector<std::vector<std::vector<double>>> restricted;
  bool invariant_torsion = false;
};

GeneralizedConnectionReport export_generalized_connection(const Connection& Q,
                                                          double tol = 1e-10);

}  // namespace gric

#endif
