#ifndef GRIC_EXACT_HPP
#define GRIC_EXACT_HPP

#include <array>
#include <map>
#include <vector>

#include "gric/connection.hpp"

namespace gric {

// Exact model: pseudo-Riemannian metric g_ij(x) and closed 3-form eta on the
// base, defining the T(+)T* algebroid with H = d + eta.
struct ExactModel {
  int m = 0;
  std::vector<std::vector<Expression>> metric;  // m x m, symmetric
  std::map<std::array<int, 3>, Expression> eta; // 0-based i<j<k
  std::vector<double> base_point;
  int jet_order = 3;  // K >= 2
};

// Pseudo-orthonormal frame E_a = E_a^i d_i with <E_a,E_b> = signs_a delta_ab,
// as a jet identity up to the layout order.
struct AdaptedFrame {
  std::vector<std::vector<Jet>> frame;  // [a][i]
  std::vector<int> signs;
};

struct ClosednessReport {
  bool closed = false;
  double residual = 0;  // max |(d eta)_{ijkl}| at the base point
};

ClosednessReport check_closed(const ExactModel& M, double tol);

// Gram-Schmidt over jets applied to the coordinate frame in declared order.
AdaptedFrame build_frame(const ExactModel& M);

// Sections s_a = E_a + F_a, s_adot = E_a - F_a of T(+)T* with the halved
// pairing <X+xi, Y+zeta> = (1/2)(xi(Y) + zeta(X)); anchor = tangent part,
// c_{abg} = <[s_a,s_b], s_g> with the eta-twisted Dorfman bracket. The result
// is jet-valued and must pass the master equation.
NQStructure build_nq_from_exact(const ExactModel& M);
NQStructure build_nq_from_exact(const ExactModel& M, const AdaptedFrame& F);

// Invariant-torsion connection whose undotted block carries the Levi-Civita
// connection in the frame E_a, transported through TM ~ V+.
Connection levi_civita_connection(const ExactModel& M, const NQStructure& N);
Connection levi_civita_connection(const ExactModel& M, const NQStructure& N,
                                  const AdaptedFrame& F);

// Independent classical pipeline: Christoffels, contorsion (1/2) g^{-1} eta
// (full torsion tensor g^{-1} eta), Riemann, Ricci; expressed in the frame:
// result[b][a] = Ric_eta(E_a, E_b), the (b, adot) graded matrix convention.
std::vector<std::vector<double>> classical_ricci_with_torsion(const ExactModel& M,
                                                              const AdaptedFrame& F);

struct CompareReport {
  std::vector<std::vector<double>> graded_engine;
  std::vector<std::vector<double>> graded_closed_form;
  std::vector<std::vector<double>> classical;
  std::vector<double> lambda;
  double max_deviation = 0;
};

// Runs the graded path (both routes) and the classical path; the three
// matrices must agree.
CompareReport compare_exact(const ExactModel& M);

}  // namespace gric

#endif
