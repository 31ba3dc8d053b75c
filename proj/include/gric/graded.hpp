#ifndef GRIC_GRADED_HPP
#define GRIC_GRADED_HPP

#include <memory>
#include <string>
#include <vector>

#include "gric/jet.hpp"

namespace gric {

// Local coordinates (x^i, e^a, e^adot, p_i) on the degree-2 chart plus one
// fiber coordinate xi^a per undotted e^a. Odd generator ids are global:
//   [0, r)        e^a      (undotted, degree 1)
//   [r, r+s)      e^adot   (dotted, degree 1)
//   [r+s, r+s+r)  xi^a     (degree 1)
// and this is also the canonical total order on odd generators.
struct GradedChart {
  int n = 0, r = 0, s = 0;
  std::vector<double> base_point;
  int jet_order = 0;
  std::shared_ptr<const JetLayout> layout;

  static std::shared_ptr<const GradedChart> make(int n, int r, int s,
                                                 std::vector<double> base_point,
                                                 int jet_order);

  int odd_generator_count() const { return 2 * r + s; }
  bool is_dotted_e(int odd_id) const { return odd_id >= r && odd_id < r + s; }
  bool is_e(int odd_id) const { return odd_id < r + s; }
  bool is_xi(int odd_id) const { return odd_id >= r + s; }
  int xi_id(int a) const { return r + s + a; }

  bool same_as(const GradedChart& o) const {
    return n == o.n && r == o.r && s == o.s && jet_order == o.jet_order &&
           base_point == o.base_point;
  }
  std::string odd_name(int odd_id) const;
};

// Diagonal constant pairing blocks g_ab, g_adot_bdot with entries +-1.
struct MetricSplit {
  std::vector<int> g_plus;   // r entries
  std::vector<int> g_minus;  // s entries

  int sign(int alpha) const {
    return alpha < static_cast<int>(g_plus.size())
               ? g_plus[static_cast<std::size_t>(alpha)]
               : g_minus[static_cast<std::size_t>(alpha) - g_plus.size()];
  }
  static MetricSplit euclidean(int r, int s) {
    return MetricSplit{std::vector<int>(static_cast<std::size_t>(r), 1),
                       std::vector<int>(static_cast<std::size_t>(s), 1)};
  }
};

struct Generator {
  enum class Kind { X, E, P, Xi };
  Kind kind;
  int index;
};

// Canonical-form polynomial in the generators: each term is an x-jet
// coefficient times a momentum monomial times a strictly increasing odd
// monomial, with Koszul signs absorbed into the coefficients.
class GradedElement {
 public:
  struct Term {
    Jet coeff;
    std::vector<int> pmono;  // sorted momentum indices, repetitions allowed
    std::vector<int> omono;  // strictly increasing odd generator ids
  };

  GradedElement() = default;
  explicit GradedElement(std::shared_ptr<const GradedChart> chart)
      : chart_(std::move(chart)) {}

  static GradedElement zero(const std::shared_ptr<const GradedChart>& chart);
  static GradedElement scalar(const std::shared_ptr<const GradedChart>& chart, double v);
  static GradedElement from_jet(const std::shared_ptr<const GradedChart>& chart, Jet j);
  static GradedElement generator(const std::shared_ptr<const GradedChart>& chart, Generator g);
  // Term builder; odd ids may come in any order, the Koszul sign is applied.
  static GradedElement monomial(const std::shared_ptr<const GradedChart>& chart,
                                Jet coeff, std::vector<int> pmono,
                                std::vector<int> odd_ids);

  const std::shared_ptr<const GradedChart>& chart() const { return chart_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  GradedElement operator+(const GradedElement& o) const;
  GradedElement operator-(const GradedElement& o) const;
  GradedElement operator-() const;
  GradedElement operator*(const GradedElement& o) const;
  GradedElement operator*(double sc) const;
  GradedElement scale(const Jet& j) const;
  GradedElement& operator+=(const GradedElement& o) { *this = *this + o; return *this; }

  // x, p, e^adot fixed up to sign; each term scales by (-1)^{#dotted}.
  GradedElement apply_involution() const;

  GradedElement partial_x(int i) const;          // jet derivative of coefficients
  GradedElement partial_p(int i) const;
  GradedElement partial_odd_left(int odd_id) const;
  GradedElement partial_odd_right(int odd_id) const;

  // Degree of a homogeneous element; -1 for 0; throws for inhomogeneous input.
  int degree() const;
  bool is_homogeneous() const;

  bool exactly_equal(const GradedElement& o) const;
  // Largest coefficient magnitude at the base point.
  double max_abs_value() const;
  // Largest coefficient magnitude over jet orders <= through_order.
  double max_abs_coeff_through(int through_order) const;
  // Coefficient jet of a given monomial (zero jet if absent).
  Jet coefficient(const std::vector<int>& pmono, std::vector<int> odd_ids) const;

  std::string to_string() const;

 private:
  void canonicalize();
  std::shared_ptr<const GradedChart> chart_;
  std::vector<Term> terms_;
};

inline GradedElement operator*(double sc, const GradedElement& u) { return u * sc; }

// Degree -2 graded Poisson bracket induced by w = dp dx + (1/2) g de de.
// Generator table (anchored so that {H,.} reproduces the structure field Q):
//   {p_i, x^j} = delta_i^j   (hence {x^j, p_i} = -delta)
//   {e^alpha, e^beta} = g^{alpha beta}
//   {p_i, f(x)} = +df/dx^i
// xi^a is central.
GradedElement poisson_bracket(const GradedElement& u, const GradedElement& v,
                              const MetricSplit& g);

// Vector field given by its action on every generator, extended by the
// graded Leibniz rule.
struct Derivation {
  int parity = 1;  // 0 even, 1 odd
  int degree = 1;
  std::shared_ptr<const GradedChart> chart;
  std::vector<GradedElement> on_x;   // n entries
  std::vector<GradedElement> on_e;   // r+s entries
  std::vector<GradedElement> on_p;   // n entries
  std::vector<GradedElement> on_xi;  // r entries

  static Derivation zero(const std::shared_ptr<const GradedChart>& chart,
                         int parity, int degree);
  const GradedElement& on_odd(int odd_id) const;
  GradedElement apply(const GradedElement& u) const;
};

}  // namespace gric

#endif
