#include "gric/connection.hpp"

#include <algorithm>
#include <cmath>

#include "gric/errors.hpp"

namespace gric {

std::vector<Jet> Connection::lambda() const {
  const int r = structure.chart->r;
  std::vector<Jet> lam;
  for (int b = 0; b < r; ++b) {
    Jet acc = structure.zero_jet();
    for (int a = 0; a < r; ++a) acc = acc + psi_at(a, b, a);
    lam.push_back(std::move(acc));
  }
  return lam;
}

Connection make_connection(NQStructure S, std::vector<Jet> psi) {
  const int r = S.chart->r, d = S.chart->r + S.chart->s;
  if (static_cast<int>(psi.size()) != r * r * d)
    throw SchemaError("psi must have r*r*(r+s) entries");
  return Connection{std::move(S), std::move(psi)};
}

Connection make_invariant_torsion(const NQStructure& S,
                                  const std::vector<Jet>& psi_plus) {
  const int r = S.chart->r, s = S.chart->s, d = r + s;
  if (static_cast<int>(psi_plus.size()) != r * r * r)
    throw SchemaError("psi_plus must have r*r*r entries");
  std::vector<Jet> psi(static_cast<std::size_t>(r * r * d));
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) {
      for (int c = 0; c < r; ++c)
        psi[static_cast<std::size_t>((a * r + b) * d + c)] =
            psi_plus[static_cast<std::size_t>((a * r + b) * r + c)];
      for (int ad = 0; ad < s; ++ad)
        psi[static_cast<std::size_t>((a * r + b) * d + r + ad)] =
            S.c_raised(a, b, r + ad);
    }
  return Connection{S, std::move(psi)};
}

Derivation connection_derivation(const Connection& Q) {
  const auto& S = Q.structure;
  const auto& chart = S.chart;
  Derivation D = q_e_derivation(S);
  for (int a = 0; a < chart->r; ++a) {
    GradedElement acc = GradedElement::zero(chart);
    for (int b = 0; b < chart->r; ++b)
      for (int alpha = 0; alpha < chart->r + chart->s; ++alpha) {
        const Jet& c = Q.psi_at(a, b, alpha);
        if (c.is_zero()) continue;
        acc += GradedElement::monomial(chart, c, {}, {alpha, chart->xi_id(b)});
      }
    D.on_xi[static_cast<std::size_t>(a)] = acc;
  }
  return D;
}

GradedElement torsion(const Connection& Q) {
  Derivation D = connection_derivation(Q);
  return D.apply(tautological_section(Q.structure.chart, Q.structure.metric));
}

GradedElement torsion_closed_form(const Connection& Q) {
  const auto& S = Q.structure;
  const auto& chart = S.chart;
  const int r = chart->r, d = chart->r + chart->s;
  GradedElement T = GradedElement::zero(chart);
  for (int a = 0; a < r; ++a) {
    for (int i = 0; i < chart->n; ++i) {
      const Jet& c = S.rho_at(i, a);
      if (!c.is_zero())
        T += GradedElement::monomial(chart, c, {i}, {chart->xi_id(a)});
    }
    for (int beta = 0; beta < d; ++beta)
      for (int gamma = beta + 1; gamma < d; ++gamma) {
        Jet c = S.c_read(a, beta, gamma);
        if (!c.is_zero())
          T += GradedElement::monomial(chart, -c, {}, {beta, gamma, chart->xi_id(a)});
      }
  }
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      for (int alpha = 0; alpha < d; ++alpha) {
        Jet c = Q.psi_at(a, b, alpha) * static_cast<double>(S.metric.sign(a));
        if (!c.is_zero())
          T += GradedElement::monomial(chart, -c, {}, {alpha, chart->xi_id(b), a});
      }
  return T;
}

TorsionInvariance check_torsion_invariance(const Connection& Q, double tol) {
  TorsionInvariance res;
  GradedElement T = torsion(Q);
  res.torsion_residual = (T.apply_involution() - T).max_abs_value();
  const auto& S = Q.structure;
  for (int a = 0; a < S.chart->r; ++a)
    for (int b = 0; b < S.chart->r; ++b)
      for (int ad = 0; ad < S.chart->s; ++ad) {
        double diff = Q.psi_at(a, b, S.chart->r + ad).value() -
                      S.c_raised(a, b, S.chart->r + ad).value();
        res.eq_residual = std::max(res.eq_residual, std::abs(diff));
      }
  res.invariant = res.torsion_residual <= tol;
  return res;
}

End2Element curvature(const Connection& Q, double tol) {
  const auto& chart = Q.structure.chart;
  Derivation D = connection_derivation(Q);
  // Q^2 must vanish outside the xi directions; otherwise the structure does
  // not satisfy the master equation and the curvature is not an End2 element.
  double residual = 0;
  for (int i = 0; i < chart->n; ++i) {
    residual = std::max(residual, D.apply(D.on_x[static_cast<std::size_t>(i)]).max_abs_value());
    residual = std::max(residual, D.apply(D.on_p[static_cast<std::size_t>(i)]).max_abs_value());
  }
  for (int alpha = 0; alpha < chart->r + chart->s; ++alpha)
    residual = std::max(residual, D.apply(D.on_e[static_cast<std::size_t>(alpha)]).max_abs_value());
  if (residual > tol)
    throw End2ViolationError("Q^2 does not vanish on x, e, p (residual " +
                             std::to_string(residual) +
                             "); master equation fails upstream");
  End2Element E;
  E.chart = chart;
  for (int a = 0; a < chart->r; ++a) {
    GradedElement comp = D.apply(D.on_xi[static_cast<std::size_t>(a)]);
    for (const auto& t : comp.terms()) {
      int nxi = 0;
      for (int id : t.omono)
        if (chart->is_xi(id)) ++nxi;
      if (nxi != 1)
        throw End2ViolationError("curvature term without exactly one xi factor");
    }
    E.comp.push_back(std::move(comp));
  }
  return E;
}

End2Element project_antiselfdual(const End2Element& D) {
  End2Element P;
  P.chart = D.chart;
  for (const auto& c : D.comp)
    P.comp.push_back(0.5 * (c - c.apply_involution()));
  return P;
}

std::vector<std::vector<double>> contract(const End2Element& D) {
  const auto& chart = D.chart;
  End2Element P = project_antiselfdual(D);
  GradedElement acc = GradedElement::zero(chart);
  for (int a = 0; a < chart->r; ++a)
    acc += P.comp[static_cast<std::size_t>(a)].partial_odd_left(a);
  std::vector<std::vector<double>> R(
      static_cast<std::size_t>(chart->r),
      std::vector<double>(static_cast<std::size_t>(chart->s), 0.0));
  for (int b = 0; b < chart->r; ++b)
    for (int ad = 0; ad < chart->s; ++ad)
      R[static_cast<std::size_t>(b)][static_cast<std::size_t>(ad)] =
          acc.coefficient({}, {chart->xi_id(b), chart->r + ad}).value();
  return R;
}

RicciTensor ricci_engine(const Connection& Q) {
  RicciTensor ric;
  ric.R = contract(curvature(Q));
  for (const auto& l : Q.lambda()) ric.lambda.push_back(l.value());
  ric.path = "engine";
  ric.base_point = Q.structure.chart->base_point;
  return ric;
}

RicciTensor ricci_closed_form(const NQStructure& S, const std::vector<Jet>& lambda) {
  const auto& chart = S.chart;
  const int r = chart->r, s = chart->s;
  if (static_cast<int>(lambda.size()) != r)
    throw SchemaError("lambda must have r entries");
  RicciTensor ric;
  ric.path = "closed_form";
  ric.base_point = chart->base_point;
  for (const auto& l : lambda) ric.lambda.push_back(l.value());
  ric.R.assign(static_cast<std::size_t>(r),
               std::vector<double>(static_cast<std::size_t>(s), 0.0));
  for (int b = 0; b < r; ++b)
    for (int ad = 0; ad < s; ++ad) {
      const int gad = r + ad;  // global dotted id
      Jet acc = S.zero_jet();
      for (int c = 0; c < r; ++c) {
        Jet t = S.c_raised(c, b, gad) * lambda[static_cast<std::size_t>(c)];
        acc = acc + t;
      }
      for (int i = 0; i < chart->n; ++i) {
        for (int a = 0; a < r; ++a) {
          Jet dc = S.c_raised(a, b, gad);
          if (dc.is_zero()) continue;
          acc = acc - S.rho_at(i, a) * dc.partial_derivative(i);
        }
        const Jet& rad = S.rho_at(i, gad);
        if (!rad.is_zero())
          acc = acc + rad * lambda[static_cast<std::size_t>(b)].partial_derivative(i);
      }
      for (int a = 0; a < r; ++a)
        for (int cd = 0; cd < s; ++cd) {
          const int gcd = r + cd;
          Jet t = S.c_read(gcd, a, gad) * S.c_read(a, gcd, b);
          if (t.is_zero()) continue;
          acc = acc - t * static_cast<double>(S.metric.sign(a) * S.metric.sign(gcd));
        }
      ric.R[static_cast<std::size_t>(b)][static_cast<std::size_t>(ad)] = acc.value();
    }
  return ric;
}

std::vector<Jet> divergence(const Connection& Q) {
  std::vector<Jet> div = Q.lambda();
  for (auto& d : div) d = -d;
  return div;
}

GeneralizedConnectionReport export_generalized_connection(const Connection& Q,
                                                          double tol) {
  const auto& chart = Q.structure.chart;
  const int r = chart->r, d = chart->r + chart->s;
  GeneralizedConnectionReport rep;
  rep.full.assign(static_cast<std::size_t>(d),
                  std::vector<std::vector<double>>(
                      static_cast<std::size_t>(r),
                      std::vector<double>(static_cast<std::size_t>(r), 0.0)));
  for (int alpha = 0; alpha < d; ++alpha)
    for (int c = 0; c < r; ++c)
      for (int b = 0; b < r; ++b)
        rep.full[static_cast<std::size_t>(alpha)][static_cast<std::size_t>(c)]
                [static_cast<std::size_t>(b)] = Q.psi_at(c, b, alpha).value();
  rep.restricted.assign(static_cast<std::size_t>(r),
                        std::vector<std::vector<double>>(
                            static_cast<std::size_t>(r),
                            std::vector<double>(static_cast<std::size_t>(r), 0.0)));
  for (int c = 0; c < r; ++c)
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b)
        rep.restricted[static_cast<std::size_t>(c)][static_cast<std::size_t>(a)]
                      [static_cast<std::size_t>(b)] = Q.psi_at(c, b, a).value();
  rep.invariant_torsion = check_torsion_invariance(Q, tol).invariant;
  return rep;
}

}  // namespace gric
