// Acceptance gate: one line per criterion, "PASS"/"FAIL" verdicts, exit 0
// only when every criterion holds. Each check evaluates the library against
// an oracle built independently in this file (or in test_util.hpp).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "gric/errors.hpp"
#include "gric/exact.hpp"
#include "gric/flow.hpp"

#include "test_util.hpp"

using namespace gric;
using gric_test::appendix_ricci;
using gric_test::max_abs_diff;
using gric_test::random_double_structure;
using gric_test::random_point_structure;
using gric_test::random_polynomial;
using gric_test::random_psi;
using gric_test::random_r2s1_structure;
using gric_test::random_structure;
using gric_test::uniform;
using gric_test::uniform_int;

namespace {

int failures = 0;

void report(int criterion, const std::string& what, bool ok,
            const std::string& detail) {
  std::printf("%s  criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion,
              what.c_str(), detail.c_str());
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(const char* f, double a, double b = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

// --- criterion 1: {H,.} reproduces the displayed structure field exactly ---
void criterion_bracket_anchor() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  for (int it = 0; it < 20 && ok; ++it) {
    int n = uniform_int(1, 3);
    int r = uniform_int(1, 3);
    int s = uniform_int(0, 4 - r);
    NQStructure S = random_structure(n, r, s, 2, true);
    Derivation Q = q_e_derivation(S);
    gric_test::ExpectedQE E = gric_test::expected_q_e(S);
    for (int i = 0; i < n; ++i) {
      ok = ok && Q.on_x[static_cast<std::size_t>(i)].exactly_equal(E.on_x[static_cast<std::size_t>(i)]);
      ok = ok && Q.on_p[static_cast<std::size_t>(i)].exactly_equal(E.on_p[static_cast<std::size_t>(i)]);
    }
    for (int al = 0; al < r + s; ++al)
      ok = ok && Q.on_e[static_cast<std::size_t>(al)].exactly_equal(E.on_e[static_cast<std::size_t>(al)]);
    for (int a = 0; a < r; ++a)
      ok = ok && Q.on_xi[static_cast<std::size_t>(a)].is_zero();
  }
  double dt = seconds_since(t0);
  report(1, "structure-field display reproduced exactly on 20 random models",
         ok && dt < 1.0, fmt("runtime %.3fs", dt));
}

// --- criterion 2: master-equation discrimination -------------------------
void criterion_master_discrimination() {
  NQStructure so3 = gric_test::so3_structure();
  bool ok = check_master_equation(so3, 1e-12).valid();

  auto chart6 = GradedChart::make(0, 3, 3, {}, 0);
  NQStructure dbl;
  dbl.chart = chart6;
  dbl.metric = MetricSplit{{1, 1, 1}, {-1, -1, -1}};
  dbl.c[{0, 1, 2}] = Jet::constant(chart6->layout, {}, 1.0);
  dbl.c[{3, 4, 5}] = Jet::constant(chart6->layout, {}, 1.0);
  ok = ok && check_master_equation(dbl, 1e-12).valid();

  auto chart = GradedChart::make(1, 1, 1, {0.0}, 2);
  std::vector<std::vector<Expression>> rho{
      {parse_expression("1", 1), parse_expression("0", 1)}};
  NQStructure broken =
      NQStructure::from_expressions(chart, MetricSplit::euclidean(1, 1), rho, {});
  MasterResidual res = check_master_equation(broken, 1e-10);
  ok = ok && !res.valid() && std::abs(res.pp - 1.0) <= 1e-12;
  report(2, "Jacobi/isotropy discrimination with grouped residuals", ok,
         fmt("violation p.p group %.17g", res.pp));
}

// --- criterion 3: engine torsion equals the displayed closed form ---------
void criterion_torsion_identity() {
  bool ok = true;
  double worst = 0;
  for (int it = 0; it < 20 && ok; ++it) {
    bool constant = it % 2 == 0;
    NQStructure S = constant
                        ? random_point_structure(uniform_int(1, 3), uniform_int(0, 2))
                        : random_structure(uniform_int(1, 2), 2, 1, 2, true);
    Connection Q = make_connection(S, random_psi(S, constant));
    GradedElement T = torsion(Q);
    GradedElement C = torsion_closed_form(Q);
    if (constant) {
      ok = ok && T.exactly_equal(C);
    } else {
      double dev = (T - C).max_abs_value();
      worst = std::max(worst, dev);
      ok = ok && dev <= 1e-10;
    }
  }
  report(3, "torsion engine matches the closed form on 20 random models", ok,
         fmt("max polynomial deviation %.2e", worst));
}

// --- criterion 4: invariance of torsion iff the dotted-block identity -----
void criterion_invariance_equivalence() {
  bool ok = true;
  NQStructure S = random_double_structure(0.7);
  const int r = S.chart->r, s = S.chart->s;
  std::vector<Jet> zero_pp(static_cast<std::size_t>(r * r * r), S.zero_jet());
  Connection Q = make_invariant_torsion(S, zero_pp);
  ok = ok && check_torsion_invariance(Q, 1e-12).invariant;

  Connection P = Q;
  P.psi_at(0, 1, r + 1) += Jet::constant(S.chart->layout, {}, 1e-3);
  TorsionInvariance pv = check_torsion_invariance(P, 1e-6);
  ok = ok && !pv.invariant && std::abs(pv.eq_residual - 1e-3) <= 1e-12;

  for (int it = 0; it < 20; ++it) {
    Connection G = make_connection(S, random_psi(S, true));
    TorsionInvariance gi = check_torsion_invariance(G, 1e-8);
    double eq = 0;
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b)
        for (int ad = 0; ad < s; ++ad)
          eq = std::max(eq, std::abs(G.psi_at(a, b, r + ad).value() -
                                     S.c_raised(a, b, r + ad).value()));
    ok = ok && gi.invariant == (eq <= 1e-8) &&
         std::abs(gi.eq_residual - eq) <= 1e-12;
  }
  report(4, "torsion invariance equivalent to the dotted-block identity", ok,
         fmt("perturbation residual %.2e", pv.eq_residual));
}

// --- criterion 5: contraction of the curvature vs the direct formula ------
void criterion_curvature_oracle() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  double worst = 0;
  for (int it = 0; it < 50 && ok; ++it) {
    NQStructure S;
    bool constant;
    switch (it % 3) {
      case 0:
        S = random_double_structure(uniform(0.0, 1.0));
        constant = true;
        break;
      case 1:
        S = random_r2s1_structure(3);
        constant = false;
        break;
      default: {
        ExactModel M;
        M.m = 2;
        M.base_point = {uniform(0.3, 0.8), uniform(0.3, 0.8)};
        M.jet_order = 3;
        std::vector<std::vector<std::string>> g{
            {"2+x1^2/3", "x1*x2/6"}, {"x1*x2/6", "2+x2^2/4"}};
        for (const auto& row : g) {
          std::vector<Expression> er;
          for (const auto& src : row) er.push_back(parse_expression(src, 2));
          M.metric.push_back(std::move(er));
        }
        S = build_nq_from_exact(M);
        constant = false;
        break;
      }
    }
    Connection Q = make_connection(S, random_psi(S, constant));
    auto R = contract(curvature(Q));
    auto expect = appendix_ricci(S, Q.psi);
    double dev = max_abs_diff(R, expect);
    worst = std::max(worst, dev);
    ok = ok && dev <= 1e-9;
  }
  double dt = seconds_since(t0);
  report(5, "curvature contraction equals the independent tensor formula",
         ok && dt < 5.0, fmt("max deviation %.2e, runtime %.3fs", worst, dt));
}

// --- criterion 6: closed-form Ricci agrees with the engine ----------------
void criterion_ricci_agreement() {
  bool ok = true;
  double worst = 0;
  for (int it = 0; it < 50 && ok; ++it) {
    bool point = it % 2 == 0;
    NQStructure S =
        point ? random_double_structure(uniform(0.0, 1.0)) : random_r2s1_structure(3);
    const int r = S.chart->r;
    std::vector<Jet> pp(static_cast<std::size_t>(r * r * r), S.zero_jet());
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) {
        Jet lam = point ? Jet::constant(S.chart->layout, {}, uniform(-1, 1))
                        : evaluate_jet(parse_expression(random_polynomial(2, 2), 2),
                                       S.chart->base_point, S.chart->jet_order);
        pp[static_cast<std::size_t>((a * r + b) * r + a)] = lam * (1.0 / r);
      }
    Connection Q = make_invariant_torsion(S, pp);
    RicciTensor eng = ricci_engine(Q);
    RicciTensor cf = ricci_closed_form(S, Q.lambda());
    double dev = max_abs_diff(eng.R, cf.R);
    worst = std::max(worst, dev);
    ok = ok && dev <= 1e-9;
  }

  // trace-free perturbations of the undotted block leave Ric unchanged
  NQStructure S = random_double_structure(0.8);
  const int r = S.chart->r;
  std::vector<Jet> pp(static_cast<std::size_t>(r * r * r), S.zero_jet());
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      pp[static_cast<std::size_t>((a * r + b) * r + a)] =
          Jet::constant(S.chart->layout, {}, uniform(-1, 1) / r);
  RicciTensor base = ricci_engine(make_invariant_torsion(S, pp));
  std::vector<double> delta(static_cast<std::size_t>(r * r * r));
  for (auto& v : delta) v = uniform(-1, 1);
  for (int b = 0; b < r; ++b) {
    double tr = 0;
    for (int a = 0; a < r; ++a) tr += delta[static_cast<std::size_t>((a * r + b) * r + a)];
    for (int a = 0; a < r; ++a)
      delta[static_cast<std::size_t>((a * r + b) * r + a)] -= tr / r;
  }
  for (int k = 0; k < r * r * r; ++k)
    pp[static_cast<std::size_t>(k)] +=
        Jet::constant(S.chart->layout, {}, delta[static_cast<std::size_t>(k)]);
  RicciTensor pert = ricci_engine(make_invariant_torsion(S, pp));
  double tdev = max_abs_diff(base.R, pert.R);
  ok = ok && tdev <= 1e-10;
  report(6, "closed-form Ricci equals the engine on 50 invariant-torsion models",
         ok, fmt("max deviation %.2e, trace-free drift %.2e", worst, tdev));
}

// --- criterion 7: graded vs classical pipelines on the exact corpus -------
void criterion_exact_corpus() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;

  auto model = [](int m, std::vector<std::vector<std::string>> g,
                  std::vector<double> base) {
    ExactModel M;
    M.m = m;
    M.base_point = std::move(base);
    M.jet_order = 3;
    for (const auto& row : g) {
      std::vector<Expression> er;
      for (const auto& src : row) er.push_back(parse_expression(src, m));
      M.metric.push_back(std::move(er));
    }
    return M;
  };

  // (a) flat: everything vanishes
  CompareReport flat =
      compare_exact(model(2, {{"1", "0"}, {"0", "1"}}, {0.2, 0.6}));
  double flat_norm = 0;
  for (const auto& row : flat.graded_engine)
    for (double v : row) flat_norm = std::max(flat_norm, std::abs(v));
  ok = ok && flat.max_deviation <= 1e-6 && flat_norm <= 1e-12;

  // (b) unit 2-sphere: all three matrices equal the identity
  CompareReport sph =
      compare_exact(model(2, {{"1", "0"}, {"0", "sin(x1)^2"}}, {1.0, 0.5}));
  double sph_err = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      sph_err = std::max(
          sph_err, std::abs(sph.classical[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] -
                            (a == b ? 1.0 : 0.0)));
  ok = ok && sph.max_deviation <= 1e-6 && sph_err <= 1e-6;

  // (c) random polynomial perturbation of flat 3-space, no twist
  auto rq = [] {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.6f*x%d*x%d", uniform(-0.08, 0.08),
                  uniform_int(1, 3), uniform_int(1, 3));
    return std::string(buf);
  };
  std::vector<std::vector<std::string>> gp{
      {"1+" + rq(), rq(), rq()}, {"0", "1+" + rq(), rq()}, {"0", "0", "1+" + rq()}};
  gp[1][0] = gp[0][1];
  gp[2][0] = gp[0][2];
  gp[2][1] = gp[1][2];
  CompareReport poly = compare_exact(model(3, gp, {0.25, 0.35, 0.45}));
  ok = ok && poly.max_deviation <= 1e-6;

  // (d) round S3: scan the volume-form scale for the flat twisted connection
  double best_k = -1, best_norm = 1e9;
  for (double k = 0.0; k <= 3.01; k += 0.25) {
    ExactModel M = model(3,
                         {{"1", "0", "0"},
                          {"0", "sin(x1)^2", "0"},
                          {"0", "0", "sin(x1)^2*sin(x2)^2"}},
                         {1.1, 0.8, 0.4});
    char vol[64];
    std::snprintf(vol, sizeof vol, "%.17g*sin(x1)^2*sin(x2)", k);
    M.eta[{0, 1, 2}] = parse_expression(vol, 3);
    CompareReport rep = compare_exact(M);
    ok = ok && rep.max_deviation <= 1e-6;
    double norm = 0;
    for (const auto& row : rep.graded_engine)
      for (double v : row) norm = std::max(norm, std::abs(v));
    if (norm < best_norm) { best_norm = norm; best_k = k; }
  }
  ok = ok && best_k == 2.0 && best_norm <= 1e-6;

  double dt = seconds_since(t0);
  report(7, "three-path agreement on flat/sphere/polynomial/twisted-S3 corpus",
         ok && dt < 30.0,
         fmt("S3 parallelizing scale 2.0, residual %.2e, runtime %.3fs",
             best_norm, dt));
}

// --- criterion 8: jet kernel vs central differences -----------------------
void criterion_jet_kernel() {
  bool ok = true;
  double worst = 0;
  for (int it = 0; it < 200 && ok; ++it) {
    int n = uniform_int(1, 3);
    std::vector<double> x0;
    for (int i = 0; i < n; ++i) x0.push_back(uniform(0.3, 1.3));
    Expression e = parse_expression(gric_test::random_expression(n, 3), n);
    int K = uniform_int(1, 2);
    Jet a = evaluate_jet(e, x0, K);
    Jet b = finite_difference_jet(e, x0, K);
    for (int k = 0; k < a.layout()->size(); ++k) {
      const auto& m = a.layout()->exponent(k);
      double pa = a.partial(m), pb = b.partial(m);
      double rel = std::abs(pa - pb) / std::max({1.0, std::abs(pa), std::abs(pb)});
      worst = std::max(worst, rel);
      ok = ok && rel <= 1e-5;
    }
  }
  report(8, "jet coefficients match central differences on 200 expressions",
         ok, fmt("max relative deviation %.2e", worst));
}

// --- criterion 9: flow fixed point and step-halving consistency -----------
void criterion_flow() {
  FlowState st;
  st.sig_plus = {1, 1, 1};
  st.sig_minus = {-1, -1, -1};
  st.ambient_g = {1, 1, 1, -1, -1, -1};
  st.c0[{0, 1, 2}] = 1.0;
  st.c0[{3, 4, 5}] = 1.0;
  st.frame.assign(6, std::vector<double>(6, 0.0));
  for (int i = 0; i < 6; ++i) st.frame[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
  st.lambda = {0.4, 0.3, 0.2};

  auto dist = [](const FlowState& a, const FlowState& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.frame.size(); ++i)
      for (std::size_t c = 0; c < a.frame[i].size(); ++c)
        m = std::max(m, std::abs(a.frame[i][c] - b.frame[i][c]));
    return m;
  };

  double fixed_change = dist(st, euler_step(st, 0.01, 1));
  bool ok = fixed_change <= 1e-13;

  // tilt V+ by a hyperbolic boost in the (0,3) plane
  FlowState tilted = st;
  double ch = std::cosh(0.3), sh = std::sinh(0.3);
  for (int i = 0; i < 6; ++i) {
    double cp = tilted.frame[static_cast<std::size_t>(i)][0];
    double cq = tilted.frame[static_cast<std::size_t>(i)][3];
    tilted.frame[static_cast<std::size_t>(i)][0] = ch * cp + sh * cq;
    tilted.frame[static_cast<std::size_t>(i)][3] = sh * cp + ch * cq;
  }
  auto defect = [&](double dt) {
    FlowState big = euler_step(tilted, dt, 1);
    FlowState half = euler_step(euler_step(tilted, dt / 2, 1), dt / 2, 1);
    return dist(big, half);
  };
  double order = std::log2(defect(0.02) / defect(0.01));
  ok = ok && order >= 1.9;
  report(9, "flow fixed point and Euler step-halving consistency", ok,
         fmt("fixed-point drift %.2e, observed order %.3f", fixed_change, order));
}

}  // namespace

int main() {
  criterion_bracket_anchor();
  criterion_master_discrimination();
  criterion_torsion_identity();
  criterion_invariance_equivalence();
  criterion_curvature_oracle();
  criterion_ricci_agreement();
  criterion_exact_corpus();
  criterion_jet_kernel();
  criterion_flow();
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all 9 criteria passed\n");
  return 0;
}
