#include "gric/graded.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gric/errors.hpp"

namespace gric {

std::shared_ptr<const GradedChart> GradedChart::make(int n, int r, int s,
                                                     std::vector<double> base_point,
                                                     int jet_order) {
  if (r + s < 1 || n < 0 || r < 0 || s < 0)
    throw SchemaError("chart requires n >= 0 and r + s >= 1");
  if (static_cast<int>(base_point.size()) != n)
    throw SchemaError("base point length does not match base dimension");
  auto c = std::make_shared<GradedChart>();
  c->n = n;
  c->r = r;
  c->s = s;
  c->base_point = std::move(base_point);
  c->jet_order = jet_order;
  c->layout = JetLayout::get(n, jet_order);
  return c;
}

std::string GradedChart::odd_name(int odd_id) const {
  if (odd_id < r) return "e" + std::to_string(odd_id + 1);
  if (odd_id < r + s) return "ed" + std::to_string(odd_id - r + 1);
  return "xi" + std::to_string(odd_id - r - s + 1);
}

namespace {

void check_chart(const std::shared_ptr<const GradedChart>& a,
                 const std::shared_ptr<const GradedChart>& b) {
  if (a.get() == b.get()) return;
  if (!a || !b || !a->same_as(*b)) throw ChartMismatch();
}

// Sorts odd ids in place; returns +-1 permutation parity, 0 on repetition.
int sort_odd(std::vector<int>& ids) {
  int sign = 1;
  for (std::size_t i = 1; i < ids.size(); ++i) {
    int v = ids[i];
    std::size_t j = i;
    while (j > 0 && ids[j - 1] > v) {
      ids[j] = ids[j - 1];
      --j;
      sign = -sign;
    }
    ids[j] = v;
  }
  for (std::size_t i = 1; i < ids.size(); ++i)
    if (ids[i] == ids[i - 1]) return 0;
  return sign;
}

std::string jet_to_string(const Jet& j) {
  char buf[64];
  const JetLayout& L = *j.layout();
  bool constant = true;
  for (int k = 1; k < L.size(); ++k)
    if (j.coeffs()[static_cast<std::size_t>(k)] != 0.0) { constant = false; break; }
  if (constant) {
    std::snprintf(buf, sizeof buf, "%.17g", j.value());
    return buf;
  }
  std::string out = "(";
  bool first = true;
  for (int k = 0; k < L.size(); ++k) {
    double v = j.coeffs()[static_cast<std::size_t>(k)];
    if (v == 0.0 && k > 0) continue;
    if (!first) out += v < 0 ? " - " : " + ";
    std::snprintf(buf, sizeof buf, "%.17g", first ? v : std::abs(v));
    out += buf;
    first = false;
    const auto& m = L.exponent(k);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      out += "*dx" + std::to_string(i + 1);
      if (m[i] > 1) out += "^" + std::to_string(m[i]);
    }
  }
  out += ")";
  return out;
}

}  // namespace

GradedElement GradedElement::zero(const std::shared_ptr<const GradedChart>& chart) {
  return GradedElement(chart);
}

GradedElement GradedElement::scalar(const std::shared_ptr<const GradedChart>& chart,
                                    double v) {
  return from_jet(chart, Jet::constant(chart->layout, chart->base_point, v));
}

GradedElement GradedElement::from_jet(const std::shared_ptr<const GradedChart>& chart,
                                      Jet j) {
  return monomial(chart, std::move(j), {}, {});
}

GradedElement GradedElement::generator(const std::shared_ptr<const GradedChart>& chart,
                                       Generator g) {
  switch (g.kind) {
    case Generator::Kind::X:
      return from_jet(chart, Jet::variable(chart->layout, chart->base_point, g.index));
    case Generator::Kind::P:
      return monomial(chart, Jet::constant(chart->layout, chart->base_point, 1.0),
                      {g.index}, {});
    case Generator::Kind::E:
      return monomial(chart, Jet::constant(chart->layout, chart->base_point, 1.0),
                      {}, {g.index});
    case Generator::Kind::Xi:
      return monomial(chart, Jet::constant(chart->layout, chart->base_point, 1.0),
                      {}, {chart->xi_id(g.index)});
  }
  throw DomainError("unreachable generator kind");
}

GradedElement GradedElement::monomial(const std::shared_ptr<const GradedChart>& chart,
                                      Jet coeff, std::vector<int> pmono,
                                      std::vector<int> odd_ids) {
  GradedElement u(chart);
  int sign = sort_odd(odd_ids);
  if (sign == 0 || coeff.is_zero()) return u;
  std::sort(pmono.begin(), pmono.end());
  for (int id : odd_ids)
    if (id < 0 || id >= chart->odd_generator_count())
      throw DomainError("odd generator id out of range");
  for (int i : pmono)
    if (i < 0 || i >= chart->n) throw DomainError("momentum index out of range");
  u.terms_.push_back(Term{sign < 0 ? -coeff : std::move(coeff),
                          std::move(pmono), std::move(odd_ids)});
  return u;
}

void GradedElement::canonicalize() {
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) {
    if (a.pmono != b.pmono) return a.pmono < b.pmono;
    return a.omono < b.omono;
  });
  std::vector<Term> merged;
  for (auto& t : terms_) {
    if (!merged.empty() && merged.back().pmono == t.pmono &&
        merged.back().omono == t.omono) {
      merged.back().coeff = merged.back().coeff + t.coeff;
    } else {
      merged.push_back(std::move(t));
    }
  }
  terms_.clear();
  for (auto& t : merged)
    if (!t.coeff.is_zero()) terms_.push_back(std::move(t));
}

GradedElement GradedElement::operator+(const GradedElement& o) const {
  if (!chart_) return o;
  if (!o.chart_) return *this;
  check_chart(chart_, o.chart_);
  GradedElement r(chart_);
  r.terms_ = terms_;
  r.terms_.insert(r.terms_.end(), o.terms_.begin(), o.terms_.end());
  r.canonicalize();
  return r;
}

GradedElement GradedElement::operator-() const {
  GradedElement r(chart_);
  r.terms_ = terms_;
  for (auto& t : r.terms_) t.coeff = -t.coeff;
  return r;
}

GradedElement GradedElement::operator-(const GradedElement& o) const {
  return *this + (-o);
}

GradedElement GradedElement::operator*(double sc) const {
  GradedElement r(chart_);
  if (sc == 0.0) return r;
  r.terms_ = terms_;
  for (auto& t : r.terms_) t.coeff = t.coeff * sc;
  return r;
}

GradedElement GradedElement::scale(const Jet& j) const {
  GradedElement r(chart_);
  for (const auto& t : terms_) {
    Jet c = t.coeff * j;
    if (!c.is_zero()) r.terms_.push_back(Term{std::move(c), t.pmono, t.omono});
  }
  r.canonicalize();
  return r;
}

GradedElement GradedElement::operator*(const GradedElement& o) const {
  check_chart(chart_, o.chart_);
  GradedElement r(chart_);
  for (const auto& a : terms_) {
    for (const auto& b : o.terms_) {
      // Koszul sign: inversions between the two sorted odd monomials.
      bool zero = false;
      int inv = 0;
      for (int av : a.omono) {
        for (int bv : b.omono) {
          if (bv == av) { zero = true; break; }
          if (bv < av) ++inv;
        }
        if (zero) break;
      }
      if (zero) continue;
      int sign = (inv % 2 == 0) ? 1 : -1;
      Jet c = a.coeff * b.coeff;
      if (sign < 0) c = -c;
      if (c.is_zero()) continue;
      std::vector<int> pm = a.pmono;
      pm.insert(pm.end(), b.pmono.begin(), b.pmono.end());
      std::sort(pm.begin(), pm.end());
      std::vector<int> om;
      om.reserve(a.omono.size() + b.omono.size());
      std::merge(a.omono.begin(), a.omono.end(), b.omono.begin(), b.omono.end(),
                 std::back_inserter(om));
      r.terms_.push_back(Term{std::move(c), std::move(pm), std::move(om)});
    }
  }
  r.canonicalize();
  return r;
}

GradedElement GradedElement::apply_involution() const {
  GradedElement r(chart_);
  r.terms_ = terms_;
  for (auto& t : r.terms_) {
    int dotted = 0;
    for (int id : t.omono)
      if (chart_->is_dotted_e(id)) ++dotted;
    if (dotted % 2 == 1) t.coeff = -t.coeff;
  }
  return r;
}

GradedElement GradedElement::partial_x(int i) const {
  GradedElement r(chart_);
  for (const auto& t : terms_) {
    Jet d = t.coeff.partial_derivative(i);
    if (!d.is_zero()) r.terms_.push_back(Term{std::move(d), t.pmono, t.omono});
  }
  r.canonicalize();
  return r;
}

GradedElement GradedElement::partial_p(int i) const {
  GradedElement r(chart_);
  for (const auto& t : terms_) {
    auto it = std::find(t.pmono.begin(), t.pmono.end(), i);
    if (it == t.pmono.end()) continue;
    int mult = static_cast<int>(std::count(t.pmono.begin(), t.pmono.end(), i));
    std::vector<int> pm = t.pmono;
    pm.erase(std::find(pm.begin(), pm.end(), i));
    r.terms_.push_back(Term{t.coeff * static_cast<double>(mult), std::move(pm), t.omono});
  }
  r.canonicalize();
  return r;
}

GradedElement GradedElement::partial_odd_left(int odd_id) const {
  GradedElement r(chart_);
  for (const auto& t : terms_) {
    auto it = std::find(t.omono.begin(), t.omono.end(), odd_id);
    if (it == t.omono.end()) continue;
    int pos = static_cast<int>(it - t.omono.begin());
    std::vector<int> om = t.omono;
    om.erase(om.begin() + pos);
    Jet c = (pos % 2 == 0) ? t.coeff : -t.coeff;
    r.terms_.push_back(Term{std::move(c), t.pmono, std::move(om)});
  }
  r.canonicalize();
  return r;
}

GradedElement GradedElement::partial_odd_right(int odd_id) const {
  GradedElement r(chart_);
  for (const auto& t : terms_) {
    auto it = std::find(t.omono.begin(), t.omono.end(), odd_id);
    if (it == t.omono.end()) continue;
    int from_right = static_cast<int>(t.omono.end() - it) - 1;
    std::vector<int> om = t.omono;
    om.erase(om.begin() + (it - t.omono.begin()));
    Jet c = (from_right % 2 == 0) ? t.coeff : -t.coeff;
    r.terms_.push_back(Term{std::move(c), t.pmono, std::move(om)});
  }
  r.canonicalize();
  return r;
}

int GradedElement::degree() const {
  if (terms_.empty()) return -1;
  int d = -1;
  for (const auto& t : terms_) {
    int td = 2 * static_cast<int>(t.pmono.size()) + static_cast<int>(t.omono.size());
    if (d == -1) d = td;
    else if (d != td) throw DomainError("element is not homogeneous");
  }
  return d;
}

bool GradedElement::is_homogeneous() const {
  if (terms_.empty()) return true;
  int d = 2 * static_cast<int>(terms_[0].pmono.size()) +
          static_cast<int>(terms_[0].omono.size());
  for (const auto& t : terms_)
    if (2 * static_cast<int>(t.pmono.size()) + static_cast<int>(t.omono.size()) != d)
      return false;
  return true;
}

bool GradedElement::exactly_equal(const GradedElement& o) const {
  if (terms_.size() != o.terms_.size()) return false;
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    if (terms_[k].pmono != o.terms_[k].pmono) return false;
    if (terms_[k].omono != o.terms_[k].omono) return false;
    if (terms_[k].coeff.coeffs() != o.terms_[k].coeff.coeffs()) return false;
  }
  return true;
}

double GradedElement::max_abs_value() const {
  double m = 0;
  for (const auto& t : terms_) m = std::max(m, std::abs(t.coeff.value()));
  return m;
}

double GradedElement::max_abs_coeff_through(int through_order) const {
  double m = 0;
  for (const auto& t : terms_)
    m = std::max(m, t.coeff.max_abs_coeff_through(through_order));
  return m;
}

Jet GradedElement::coefficient(const std::vector<int>& pmono,
                               std::vector<int> odd_ids) const {
  int sign = sort_odd(odd_ids);
  std::vector<int> pm = pmono;
  std::sort(pm.begin(), pm.end());
  if (sign == 0) return Jet::constant(chart_->layout, chart_->base_point, 0.0);
  for (const auto& t : terms_)
    if (t.pmono == pm && t.omono == odd_ids)
      return sign < 0 ? -t.coeff : t.coeff;
  return Jet::constant(chart_->layout, chart_->base_point, 0.0);
}

std::string GradedElement::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& t : terms_) {
    if (!out.empty()) out += " + ";
    out += jet_to_string(t.coeff);
    for (int i : t.pmono) out += " p" + std::to_string(i + 1);
    for (int id : t.omono) out += " " + chart_->odd_name(id);
  }
  return out;
}

GradedElement poisson_bracket(const GradedElement& u, const GradedElement& v,
                              const MetricSplit& g) {
  const auto& chart = u.chart();
  check_chart(chart, v.chart());
  if (static_cast<int>(g.g_plus.size()) != chart->r ||
      static_cast<int>(g.g_minus.size()) != chart->s)
    throw DomainError("metric split does not match chart ranks");
  GradedElement res = GradedElement::zero(chart);
  for (int i = 0; i < chart->n; ++i) {
    GradedElement up = u.partial_p(i);
    if (!up.is_zero()) res += up * v.partial_x(i);
    GradedElement vp = v.partial_p(i);
    if (!vp.is_zero()) res += -(u.partial_x(i) * vp);
  }
  for (int alpha = 0; alpha < chart->r + chart->s; ++alpha) {
    GradedElement ur = u.partial_odd_right(alpha);
    if (ur.is_zero()) continue;
    GradedElement vl = v.partial_odd_left(alpha);
    if (vl.is_zero()) continue;
    res += static_cast<double>(g.sign(alpha)) * (ur * vl);
  }
  return res;
}

Derivation Derivation::zero(const std::shared_ptr<const GradedChart>& chart,
                            int parity, int degree) {
  Derivation d;
  d.parity = parity;
  d.degree = degree;
  d.chart = chart;
  d.on_x.assign(static_cast<std::size_t>(chart->n), GradedElement::zero(chart));
  d.on_e.assign(static_cast<std::size_t>(chart->r + chart->s), GradedElement::zero(chart));
  d.on_p.assign(static_cast<std::size_t>(chart->n), GradedElement::zero(chart));
  d.on_xi.assign(static_cast<std::size_t>(chart->r), GradedElement::zero(chart));
  return d;
}

const GradedElement& Derivation::on_odd(int odd_id) const {
  if (odd_id < chart->r + chart->s) return on_e[static_cast<std::size_t>(odd_id)];
  return on_xi[static_cast<std::size_t>(odd_id - chart->r - chart->s)];
}

GradedElement Derivation::apply(const GradedElement& u) const {
  check_chart(chart, u.chart());
  Jet one = Jet::constant(chart->layout, chart->base_point, 1.0);
  GradedElement res = GradedElement::zero(chart);
  for (const auto& t : u.terms()) {
    // chain rule through the x-dependence of the coefficient
    for (int i = 0; i < chart->n; ++i) {
      if (on_x[static_cast<std::size_t>(i)].is_zero()) continue;
      Jet df = t.coeff.partial_derivative(i);
      if (df.is_zero()) continue;
      res += on_x[static_cast<std::size_t>(i)].scale(df) *
             GradedElement::monomial(chart, one, t.pmono, t.omono);
    }
    // momentum slots (even, no signs)
    for (std::size_t j = 0; j < t.pmono.size(); ++j) {
      if (j > 0 && t.pmono[j] == t.pmono[j - 1]) continue;  // handled via multiplicity
      int idx = t.pmono[j];
      const GradedElement& dp = on_p[static_cast<std::size_t>(idx)];
      if (dp.is_zero()) continue;
      int mult = static_cast<int>(std::count(t.pmono.begin(), t.pmono.end(), idx));
      std::vector<int> pm = t.pmono;
      pm.erase(std::find(pm.begin(), pm.end(), idx));
      res += static_cast<double>(mult) *
             (GradedElement::monomial(chart, t.coeff, pm, {}) * dp *
              GradedElement::monomial(chart, one, {}, t.omono));
    }
    // odd slots, passing the derivation over the preceding odd factors
    for (std::size_t k = 0; k < t.omono.size(); ++k) {
      const GradedElement& dg = on_odd(t.omono[k]);
      if (dg.is_zero()) continue;
      double sgn = (parity == 1 && k % 2 == 1) ? -1.0 : 1.0;
      std::vector<int> before(t.omono.begin(), t.omono.begin() + static_cast<long>(k));
      std::vector<int> after(t.omono.begin() + static_cast<long>(k) + 1, t.omono.end());
      res += sgn * (GradedElement::monomial(chart, t.coeff, t.pmono, before) * dg *
                    GradedElement::monomial(chart, one, {}, after));
    }
  }
  return res;
}

}  // namespace gric
