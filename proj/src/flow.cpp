#include "gric/flow.hpp"

#include <algorithm>
#include <cmath>

#include "gric/errors.hpp"

namespace gric {

namespace {

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

double c0_read(const std::map<std::array<int, 3>, double>& c0, int i, int j,
               int k) {
  std::array<int, 3> key{i, j, k};
  int sign = sort3(key);
  if (sign == 0) return 0.0;
  auto it = c0.find(key);
  if (it == c0.end()) return 0.0;
  return sign * it->second;
}

}  // namespace

double frame_defect(const FlowState& st) {
  const int d = st.r() + st.s();
  double defect = 0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      double acc = 0;
      for (int i = 0; i < d; ++i)
        acc += st.frame[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] *
               st.ambient_g[static_cast<std::size_t>(i)] *
               st.frame[static_cast<std::size_t>(i)][static_cast<std::size_t>(b)];
      double want = 0;
      if (a == b)
        want = a < st.r() ? st.sig_plus[static_cast<std::size_t>(a)]
                          : st.sig_minus[static_cast<std::size_t>(a - st.r())];
      defect = std::max(defect, std::abs(acc - want));
    }
  return defect;
}

NQStructure structure_of_state(const FlowState& st) {
  const int d = st.r() + st.s();
  if (static_cast<int>(st.ambient_g.size()) != d ||
      static_cast<int>(st.frame.size()) != d)
    throw SchemaError("flow state dimensions are inconsistent");
  auto chart = GradedChart::make(0, st.r(), st.s(), {}, 0);
  NQStructure S;
  S.chart = chart;
  S.metric.g_plus = st.sig_plus;
  S.metric.g_minus = st.sig_minus;
  for (int alpha = 0; alpha < d; ++alpha)
    for (int beta = alpha + 1; beta < d; ++beta)
      for (int gamma = beta + 1; gamma < d; ++gamma) {
        double acc = 0;
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
              double c = c0_read(st.c0, i, j, k);
              if (c != 0.0)
                acc += c *
                       st.frame[static_cast<std::size_t>(i)][static_cast<std::size_t>(alpha)] *
                       st.frame[static_cast<std::size_t>(j)][static_cast<std::size_t>(beta)] *
                       st.frame[static_cast<std::size_t>(k)][static_cast<std::size_t>(gamma)];
            }
        if (acc != 0.0)
          S.c[{alpha, beta, gamma}] = Jet::constant(chart->layout, {}, acc);
      }
  return S;
}

RicciTensor ricci_of_state(const FlowState& st) {
  NQStructure S = structure_of_state(st);
  if (static_cast<int>(st.lambda.size()) != st.r())
    throw SchemaError("lambda must have rank_plus entries");
  std::vector<Jet> lam;
  for (double v : st.lambda)
    lam.push_back(Jet::constant(S.chart->layout, {}, v));
  return ricci_closed_form(S, lam);
}

double ric_frobenius_norm(const RicciTensor& R) {
  double acc = 0;
  for (const auto& row : R.R)
    for (double v : row) acc += v * v;
  return std::sqrt(acc);
}

std::vector<std::vector<double>> deformation_from_ric(const RicciTensor& R,
                                                      const MetricSplit& metric,
                                                      int direction) {
  std::vector<std::vector<double>> A = R.R;
  for (std::size_t a = 0; a < A.size(); ++a)
    for (std::size_t ad = 0; ad < A[a].size(); ++ad)
      A[a][ad] *= -direction * metric.g_minus[ad];
  return A;
}

FlowState euler_step(const FlowState& st, double dt, int direction) {
  const int r = st.r(), s = st.s(), d = r + s;
  RicciTensor ric = ricci_of_state(st);
  MetricSplit metric{st.sig_plus, st.sig_minus};
  std::vector<std::vector<double>> A = deformation_from_ric(ric, metric, direction);
  FlowState next = st;
  // f_a += dt A_{a adot} f_adot; f_adot += dt B_{adot a} f_a with
  // B_{adot a} = -g_adot A_{a adot} g_a so that G(f_a, f_adot) is preserved
  // to first order.
  for (int i = 0; i < d; ++i)
    for (int a = 0; a < r; ++a)
      for (int ad = 0; ad < s; ++ad) {
        double Aa = A[static_cast<std::size_t>(a)][static_cast<std::size_t>(ad)];
        next.frame[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] +=
            dt * Aa * st.frame[static_cast<std::size_t>(i)][static_cast<std::size_t>(r + ad)];
        double B = -static_cast<double>(st.sig_minus[static_cast<std::size_t>(ad)]) * Aa *
                   static_cast<double>(st.sig_plus[static_cast<std::size_t>(a)]);
        next.frame[static_cast<std::size_t>(i)][static_cast<std::size_t>(r + ad)] +=
            dt * B * st.frame[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
      }
  // G-Gram-Schmidt on the columns, in order.
  auto gdot = [&](int ca, int cb) {
    double acc = 0;
    for (int i = 0; i < d; ++i)
      acc += next.frame[static_cast<std::size_t>(i)][static_cast<std::size_t>(ca)] *
             st.ambient_g[static_cast<std::size_t>(i)] *
             next.frame[static_cast<std::size_t>(i)][static_cast<std::size_t>(cb)];
    return acc;
  };
  for (int col = 0; col < d; ++col) {
    for (int prev = 0; prev < col; ++prev) {
      int sg = prev < r ? st.sig_plus[static_cast<std::size_t>(prev)]
                        : st.sig_minus[static_cast<std::size_t>(prev - r)];
      double proj = gdot(col, prev) * sg;
      for (int i = 0; i < d; ++i)
        next.frame[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)] -=
            proj * next.frame[static_cast<std::size_t>(i)][static_cast<std::size_t>(prev)];
    }
    double q = gdot(col, col);
    int want = col < r ? st.sig_plus[static_cast<std::size_t>(col)]
                       : st.sig_minus[static_cast<std::size_t>(col - r)];
    if (std::abs(q) < 1e-9 || (q > 0) != (want > 0))
      throw StepRejected("re-orthonormalization failed at column " +
                         std::to_string(col + 1) + "; reduce dt");
    double inv = 1.0 / std::sqrt(std::abs(q));
    for (int i = 0; i < d; ++i)
      next.frame[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)] *= inv;
  }
  next.t = st.t + dt;
  next.step_log.push_back({next.t, ric_frobenius_norm(ric)});
  return next;
}

Trajectory run_flow(const FlowState& st, int steps, double dt, int direction) {
  Trajectory traj;
  FlowState cur = st;
  traj.records.push_back({cur.t, ric_frobenius_norm(ricci_of_state(cur)), cur.frame});
  for (int k = 0; k < steps; ++k) {
    try {
      cur = euler_step(cur, dt, direction);
    } catch (const StepRejected& e) {
      traj.aborted = true;
      traj.abort_reason = e.what();
      return traj;
    }
    traj.records.push_back({cur.t, ric_frobenius_norm(ricci_of_state(cur)), cur.frame});
  }
  return traj;
}

}  // namespace gric
