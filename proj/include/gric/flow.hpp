#ifndef GRIC_FLOW_HPP
#define GRIC_FLOW_HPP

#include <array>
#include <map>
#include <vector>

#include "gric/connection.hpp"

namespace gric {

// Flow over a point base (quadratic Lie algebra): the ambient pairing G is
// diagonal +-1 in a fixed basis, c0 is a fixed valid structure tensor, and the
// state is the current adapted frame F (columns; the first r span V+). The
// per-step structure constants are c0(F., F., F.).
struct FlowState {
  std::vector<int> sig_plus, sig_minus;     // target signature of F^T G F
  std::vector<double> ambient_g;            // diagonal of G, d = r + s entries
  std::map<std::array<int, 3>, double> c0;  // sorted keys, 0-based
  std::vector<std::vector<double>> frame;   // [row i][col alpha]
  std::vector<double> lambda;               // r constants
  double t = 0;
  std::vector<std::pair<double, double>> step_log;  // (time, ric norm)

  int r() const { return static_cast<int>(sig_plus.size()); }
  int s() const { return static_cast<int>(sig_minus.size()); }
};

// Checks F^T G F = diag(sig_plus, sig_minus) within tol; returns the max
// absolute defect.
double frame_defect(const FlowState& st);

// The n = 0 NQ structure carried by the current frame.
NQStructure structure_of_state(const FlowState& st);

// Closed-form Ricci of the invariant-torsion connection with the state's
// constant lambda.
RicciTensor ricci_of_state(const FlowState& st);

double ric_frobenius_norm(const RicciTensor& R);

// A_{a adot} = -direction * g^{adot adot} R_{a adot}; direction +1 is
// "forward" (the default, norm-decreasing on the tilted-double smoke test).
std::vector<std::vector<double>> deformation_from_ric(const RicciTensor& R,
                                                      const MetricSplit& metric,
                                                      int direction);

// One explicit Euler step: rotate V+ columns by dt*A into V- (V- compensating
// to preserve G-orthogonality to first order), then re-orthonormalize by
// G-Gram-Schmidt. Throws StepRejected when re-orthonormalization degenerates
// or a sign flips (dt too large).
FlowState euler_step(const FlowState& st, double dt, int direction);

struct TrajectoryRecord {
  double t = 0;
  double ric_norm = 0;
  std::vector<std::vector<double>> frame;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;  // steps + 1 entries when complete
  bool aborted = false;                   // StepRejected mid-run
  std::string abort_reason;
};

Trajectory run_flow(const FlowState& st, int steps, double dt, int direction);

}  // namespace gric

#endif
