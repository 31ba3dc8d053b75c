#include "gric/model_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "gric/errors.hpp"

namespace gric {

namespace {

void require_keys(const ordered_json& j, const std::string& what,
                  const std::set<std::string>& required,
                  const std::set<std::string>& optional) {
  if (!j.is_object()) throw SchemaError(what + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!required.count(key) && !optional.count(key))
      throw SchemaError("unknown field \"" + key + "\" in " + what);
  }
  for (const auto& key : required)
    if (!j.contains(key))
      throw SchemaError("missing field \"" + key + "\" in " + what);
}

int get_int(const ordered_json& j, const std::string& key) {
  if (!j.at(key).is_number_integer())
    throw SchemaError("field \"" + key + "\" must be an integer");
  return j.at(key).get<int>();
}

double get_real(const ordered_json& v, const std::string& what) {
  if (!v.is_number()) throw SchemaError(what + " must be a number");
  return v.get<double>();
}

std::vector<double> get_real_vector(const ordered_json& j, const std::string& key) {
  if (!j.at(key).is_array())
    throw SchemaError("field \"" + key + "\" must be an array");
  std::vector<double> out;
  for (const auto& v : j.at(key)) out.push_back(get_real(v, "entry of " + key));
  return out;
}

std::vector<int> get_sign_vector(const ordered_json& j, const std::string& key,
                                 int count) {
  if (!j.at(key).is_array() || static_cast<int>(j.at(key).size()) != count)
    throw SchemaError("field \"" + key + "\" must be an array of " +
                      std::to_string(count) + " signs");
  std::vector<int> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number_integer() || (v.get<int>() != 1 && v.get<int>() != -1))
      throw SchemaError("entries of \"" + key + "\" must be +1 or -1");
    out.push_back(v.get<int>());
  }
  return out;
}

Expression get_expr(const ordered_json& v, int n, const std::string& what) {
  if (!v.is_string()) throw SchemaError(what + " must be an expression string");
  return parse_expression(v.get<std::string>(), n);
}

Jet get_jet(const ordered_json& v, const std::shared_ptr<const JetLayout>& layout,
            const std::vector<double>& base, const std::string& what,
            bool with_indices = false) {
  if (with_indices)
    require_keys(v, what, {"indices", "coeffs", "budget"}, {});
  else
    require_keys(v, what, {"coeffs", "budget"}, {});
  if (!v.at("coeffs").is_array() ||
      static_cast<int>(v.at("coeffs").size()) != layout->size())
    throw SchemaError(what + ".coeffs must have " +
                      std::to_string(layout->size()) + " entries");
  std::vector<double> coeffs;
  for (const auto& c : v.at("coeffs"))
    coeffs.push_back(get_real(c, what + ".coeffs entry"));
  int budget = v.at("budget").is_number_integer() ? v.at("budget").get<int>() : -1;
  if (budget < 0 || budget > layout->order())
    throw SchemaError(what + ".budget must be in [0, jet_order]");
  return Jet(layout, base, std::move(coeffs), budget);
}

std::array<int, 3> get_indices(const ordered_json& v, int limit,
                               const std::string& what) {
  if (!v.is_array() || v.size() != 3)
    throw SchemaError(what + " must be an array of three 1-based indices");
  std::array<int, 3> key{};
  for (int t = 0; t < 3; ++t) {
    const auto& e = v[static_cast<std::size_t>(t)];
    if (!e.is_number_integer())
      throw SchemaError(what + " entries must be integers");
    key[static_cast<std::size_t>(t)] = e.get<int>() - 1;
  }
  if (!(0 <= key[0] && key[0] < key[1] && key[1] < key[2] && key[2] < limit))
    throw SchemaError(what + " must be strictly increasing 1-based indices <= " +
                      std::to_string(limit));
  return key;
}

std::vector<Expression> get_expr_block(const ordered_json& v, int d0, int d1,
                                       int d2, int n, const std::string& what) {
  if (!v.is_array() || static_cast<int>(v.size()) != d0)
    throw SchemaError(what + " must be a " + std::to_string(d0) + "x" +
                      std::to_string(d1) + "x" + std::to_string(d2) + " array");
  std::vector<Expression> out;
  for (const auto& plane : v) {
    if (!plane.is_array() || static_cast<int>(plane.size()) != d1)
      throw SchemaError(what + " rows must have " + std::to_string(d1) + " entries");
    for (const auto& row : plane) {
      if (!row.is_array() || static_cast<int>(row.size()) != d2)
        throw SchemaError(what + " innermost arrays must have " +
                          std::to_string(d2) + " entries");
      for (const auto& e : row) out.push_back(get_expr(e, n, "entry of " + what));
    }
  }
  return out;
}

ordered_json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open input file: " + path);
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("invalid JSON in " + path + ": " + e.what());
  }
}

}  // namespace

ModelFile parse_model(const ordered_json& j) {
  require_keys(j, "model file",
               {"base_dim", "rank_plus", "rank_minus", "signature_plus",
                "signature_minus", "base_point", "jet_order"},
               {"rho", "c", "rho_jets", "c_jets", "psi", "invariant_torsion"});
  const int n = get_int(j, "base_dim");
  const int r = get_int(j, "rank_plus");
  const int s = get_int(j, "rank_minus");
  const int K = get_int(j, "jet_order");
  if (n < 0 || r < 0 || s < 0 || r + s < 1 || K < 0)
    throw SchemaError("invalid dimensions: need base_dim >= 0, rank_plus + rank_minus >= 1, jet_order >= 0");
  MetricSplit metric{get_sign_vector(j, "signature_plus", r),
                     get_sign_vector(j, "signature_minus", s)};
  std::vector<double> base = get_real_vector(j, "base_point");
  if (static_cast<int>(base.size()) != n)
    throw SchemaError("base_point must have base_dim entries");
  auto chart = GradedChart::make(n, r, s, base, K);
  const int d = r + s;

  if (j.contains("rho") != j.contains("c") ||
      j.contains("rho_jets") != j.contains("c_jets") ||
      j.contains("rho") == j.contains("rho_jets"))
    throw SchemaError("provide exactly one of (rho, c) or (rho_jets, c_jets)");

  ModelFile mf;
  if (j.contains("rho")) {
    const auto& rho_j = j.at("rho");
    if (!rho_j.is_array() || static_cast<int>(rho_j.size()) != n)
      throw SchemaError("rho must have base_dim rows");
    std::vector<std::vector<Expression>> rho_expr;
    for (const auto& row : rho_j) {
      if (!row.is_array() || static_cast<int>(row.size()) != d)
        throw SchemaError("rho rows must have rank_plus + rank_minus entries");
      std::vector<Expression> r_out;
      for (const auto& e : row) r_out.push_back(get_expr(e, n, "entry of rho"));
      rho_expr.push_back(std::move(r_out));
    }
    std::map<std::array<int, 3>, Expression> c_expr;
    if (!j.at("c").is_array()) throw SchemaError("c must be an array");
    for (const auto& item : j.at("c")) {
      require_keys(item, "c entry", {"indices", "expr"}, {});
      auto key = get_indices(item.at("indices"), d, "c indices");
      if (c_expr.count(key)) throw SchemaError("duplicate c indices");
      c_expr.emplace(key, get_expr(item.at("expr"), n, "c expr"));
    }
    mf.structure = NQStructure::from_expressions(chart, metric, rho_expr, c_expr);
  } else {
    NQStructure S;
    S.chart = chart;
    S.metric = metric;
    const auto& rho_j = j.at("rho_jets");
    if (!rho_j.is_array() || static_cast<int>(rho_j.size()) != n)
      throw SchemaError("rho_jets must have base_dim rows");
    for (const auto& row : rho_j) {
      if (!row.is_array() || static_cast<int>(row.size()) != d)
        throw SchemaError("rho_jets rows must have rank_plus + rank_minus entries");
      std::vector<Jet> r_out;
      for (const auto& e : row)
        r_out.push_back(get_jet(e, chart->layout, base, "rho_jets entry"));
      S.rho.push_back(std::move(r_out));
    }
    if (!j.at("c_jets").is_array()) throw SchemaError("c_jets must be an array");
    for (const auto& item : j.at("c_jets")) {
      if (!item.is_object() || !item.contains("indices"))
        throw SchemaError("c_jets entries must be objects with indices");
      auto key = get_indices(item.at("indices"), d, "c_jets indices");
      if (S.c.count(key)) throw SchemaError("duplicate c_jets indices");
      S.c.emplace(key, get_jet(item, chart->layout, base, "c_jets entry", true));
    }
    mf.structure = std::move(S);
  }

  if (j.contains("psi") && j.contains("invariant_torsion"))
    throw SchemaError("provide at most one of psi, invariant_torsion");
  if (j.contains("psi")) {
    mf.connection.kind = ConnectionSpec::Kind::Psi;
    mf.connection.psi = get_expr_block(j.at("psi"), r, r, d, n, "psi");
  } else if (j.contains("invariant_torsion")) {
    const auto& it = j.at("invariant_torsion");
    require_keys(it, "invariant_torsion", {}, {"psi_plus", "lambda"});
    if (it.contains("psi_plus") == it.contains("lambda"))
      throw SchemaError("invariant_torsion needs exactly one of psi_plus, lambda");
    if (it.contains("psi_plus")) {
      mf.connection.kind = ConnectionSpec::Kind::InvariantPsiPlus;
      mf.connection.psi_plus =
          get_expr_block(it.at("psi_plus"), r, r, r, n, "psi_plus");
    } else {
      mf.connection.kind = ConnectionSpec::Kind::InvariantLambda;
      if (!it.at("lambda").is_array() ||
          static_cast<int>(it.at("lambda").size()) != r)
        throw SchemaError("invariant_torsion.lambda must have rank_plus entries");
      for (const auto& e : it.at("lambda"))
        mf.connection.lambda.push_back(get_expr(e, n, "lambda entry"));
    }
  }
  return mf;
}

ModelFile load_model(const std::string& path) {
  return parse_model(read_file(path));
}

Connection build_connection(const ModelFile& mf) {
  const auto& S = mf.structure;
  const auto& chart = S.chart;
  const int r = chart->r, d = chart->r + chart->s;
  auto eval_block = [&](const std::vector<Expression>& block) {
    std::vector<Jet> jets;
    for (const auto& e : block)
      jets.push_back(evaluate_jet(e, chart->base_point, chart->jet_order));
    return jets;
  };
  switch (mf.connection.kind) {
    case ConnectionSpec::Kind::Psi:
      return make_connection(S, eval_block(mf.connection.psi));
    case ConnectionSpec::Kind::InvariantPsiPlus:
      return make_invariant_torsion(S, eval_block(mf.connection.psi_plus));
    case ConnectionSpec::Kind::InvariantLambda: {
      // pure-trace default psi^a_{bc} = delta^a_c lambda_b / r
      std::vector<Jet> lam = eval_block(mf.connection.lambda);
      std::vector<Jet> psi_plus(static_cast<std::size_t>(r * r * r), S.zero_jet());
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b)
          psi_plus[static_cast<std::size_t>((a * r + b) * r + a)] =
              lam[static_cast<std::size_t>(b)] * (1.0 / r);
      return make_invariant_torsion(S, psi_plus);
    }
    case ConnectionSpec::Kind::None:
      break;
  }
  (void)d;
  throw SchemaError("model file has no connection block (psi or invariant_torsion)");
}

std::vector<Jet> lambda_jets(const Connection& Q) { return Q.lambda(); }

namespace {

ordered_json jet_to_json(const Jet& j) {
  ordered_json out = ordered_json::object();
  out["coeffs"] = j.coeffs();
  out["budget"] = j.budget();
  return out;
}

}  // namespace

ordered_json structure_to_json(const NQStructure& S) {
  const auto& chart = S.chart;
  ordered_json j = ordered_json::object();
  j["base_dim"] = chart->n;
  j["rank_plus"] = chart->r;
  j["rank_minus"] = chart->s;
  j["signature_plus"] = S.metric.g_plus;
  j["signature_minus"] = S.metric.g_minus;
  j["base_point"] = chart->base_point;
  j["jet_order"] = chart->jet_order;
  ordered_json rho = ordered_json::array();
  for (const auto& row : S.rho) {
    ordered_json r_out = ordered_json::array();
    for (const auto& jet : row) r_out.push_back(jet_to_json(jet));
    rho.push_back(std::move(r_out));
  }
  j["rho_jets"] = std::move(rho);
  ordered_json c = ordered_json::array();
  for (const auto& [key, jet] : S.c) {
    ordered_json item = ordered_json::object();
    item["indices"] = {key[0] + 1, key[1] + 1, key[2] + 1};
    item["coeffs"] = jet.coeffs();
    item["budget"] = jet.budget();
    c.push_back(std::move(item));
  }
  j["c_jets"] = std::move(c);
  return j;
}

ExactModel parse_exact_model(const ordered_json& j) {
  require_keys(j, "exact model file", {"dim", "metric", "base_point"},
               {"eta", "jet_order"});
  ExactModel M;
  M.m = get_int(j, "dim");
  if (M.m < 1) throw SchemaError("dim must be >= 1");
  M.base_point = get_real_vector(j, "base_point");
  M.jet_order = j.contains("jet_order") ? get_int(j, "jet_order") : 3;
  if (M.jet_order < 2) throw SchemaError("jet_order must be >= 2");
  const auto& g = j.at("metric");
  if (!g.is_array() || static_cast<int>(g.size()) != M.m)
    throw SchemaError("metric must be a dim x dim array");
  for (const auto& row : g) {
    if (!row.is_array() || static_cast<int>(row.size()) != M.m)
      throw SchemaError("metric must be a dim x dim array");
    std::vector<Expression> r_out;
    for (const auto& e : row) r_out.push_back(get_expr(e, M.m, "metric entry"));
    M.metric.push_back(std::move(r_out));
  }
  if (j.contains("eta")) {
    if (!j.at("eta").is_array()) throw SchemaError("eta must be an array");
    for (const auto& item : j.at("eta")) {
      require_keys(item, "eta entry", {"indices", "expr"}, {});
      auto key = get_indices(item.at("indices"), M.m, "eta indices");
      if (M.eta.count(key)) throw SchemaError("duplicate eta indices");
      M.eta.emplace(key, get_expr(item.at("expr"), M.m, "eta expr"));
    }
  }
  return M;
}

ExactModel load_exact_model(const std::string& path) {
  return parse_exact_model(read_file(path));
}

FlowScenario parse_flow_scenario(const ordered_json& j,
                                 const std::string& base_dir) {
  require_keys(j, "flow scenario", {"model", "dt", "steps", "lambda"},
               {"direction"});
  if (!j.at("model").is_string())
    throw SchemaError("model must be a path string");
  std::filesystem::path model_path(j.at("model").get<std::string>());
  if (model_path.is_relative() && !base_dir.empty())
    model_path = std::filesystem::path(base_dir) / model_path;
  ModelFile mf = load_model(model_path.string());
  const auto& S = mf.structure;
  if (S.chart->n != 0)
    throw SchemaError("flow scenarios require a point-base model (base_dim 0)");
  FlowScenario sc;
  sc.dt = get_real(j.at("dt"), "dt");
  if (!j.at("steps").is_number_integer() || j.at("steps").get<int>() < 0)
    throw SchemaError("steps must be a nonnegative integer");
  sc.steps = j.at("steps").get<int>();
  if (j.contains("direction")) {
    std::string dir = j.at("direction").is_string()
                          ? j.at("direction").get<std::string>()
                          : std::string();
    if (dir == "forward") sc.direction = 1;
    else if (dir == "backward") sc.direction = -1;
    else throw SchemaError("direction must be \"forward\" or \"backward\"");
  }
  FlowState st;
  st.sig_plus = S.metric.g_plus;
  st.sig_minus = S.metric.g_minus;
  const int d = S.chart->r + S.chart->s;
  for (int sg : st.sig_plus) st.ambient_g.push_back(sg);
  for (int sg : st.sig_minus) st.ambient_g.push_back(sg);
  for (const auto& [key, jet] : S.c) st.c0[key] = jet.value();
  st.frame.assign(static_cast<std::size_t>(d),
                  std::vector<double>(static_cast<std::size_t>(d), 0.0));
  for (int i = 0; i < d; ++i)
    st.frame[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
  st.lambda = get_real_vector(j, "lambda");
  if (static_cast<int>(st.lambda.size()) != S.chart->r)
    throw SchemaError("lambda must have rank_plus entries");
  sc.state = std::move(st);
  return sc;
}

FlowScenario load_flow_scenario(const std::string& path) {
  return parse_flow_scenario(read_file(path),
                             std::filesystem::path(path).parent_path().string());
}

namespace {

void append_number(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

void dump_rec(const ordered_json& j, std::string& out, bool pretty, int depth) {
  const std::string indent = pretty ? std::string(2 * (depth + 1), ' ') : "";
  const std::string closing = pretty ? std::string(2 * depth, ' ') : "";
  const char* nl = pretty ? "\n" : "";
  const char* colon = pretty ? ": " : ":";
  switch (j.type()) {
    case ordered_json::value_t::object: {
      if (j.empty()) { out += "{}"; return; }
      out += "{";
      out += nl;
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) { out += ","; out += nl; }
        first = false;
        out += indent;
        out += ordered_json(key).dump();
        out += colon;
        dump_rec(value, out, pretty, depth + 1);
      }
      out += nl;
      out += closing;
      out += "}";
      return;
    }
    case ordered_json::value_t::array: {
      if (j.empty()) { out += "[]"; return; }
      out += "[";
      out += nl;
      bool first = true;
      for (const auto& value : j) {
        if (!first) { out += ","; out += nl; }
        first = false;
        out += indent;
        dump_rec(value, out, pretty, depth + 1);
      }
      out += nl;
      out += closing;
      out += "]";
      return;
    }
    case ordered_json::value_t::number_float:
      append_number(out, j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string dump_json(const ordered_json& j, bool pretty) {
  std::string out;
  dump_rec(j, out, pretty, 0);
  return out;
}

ordered_json master_report(const MasterResidual& m) {
  ordered_json j = ordered_json::object();
  j["valid"] = m.valid();
  j["tol"] = m.tol;
  ordered_json groups = ordered_json::object();
  groups["pp"] = m.pp;
  groups["pee"] = m.pee;
  groups["e4"] = m.e4;
  j["residual"] = std::move(groups);
  j["max_residual"] = m.max_residual();
  return j;
}

ordered_json ricci_report(const RicciTensor& ric) {
  ordered_json j = ordered_json::object();
  j["ric"] = ric.R;
  j["lambda"] = ric.lambda;
  j["path"] = ric.path;
  j["base_point"] = ric.base_point;
  return j;
}

ordered_json courant_report(const CourantData& d) {
  ordered_json j = ordered_json::object();
  j["anchor"] = d.anchor;
  ordered_json bracket = ordered_json::array();
  for (const auto& b : d.bracket) {
    ordered_json item = ordered_json::object();
    item["indices"] = {b.a + 1, b.b + 1, b.g + 1};
    item["value"] = b.value;
    bracket.push_back(std::move(item));
  }
  j["bracket"] = std::move(bracket);
  j["pairing_plus"] = d.pairing_plus;
  j["pairing_minus"] = d.pairing_minus;
  j["base_point"] = d.base_point;
  return j;
}

ordered_json connection_report(const GeneralizedConnectionReport& rep) {
  ordered_json j = ordered_json::object();
  j["full"] = rep.full;
  j["restricted"] = rep.restricted;
  j["invariant_torsion"] = rep.invariant_torsion;
  return j;
}

ordered_json compare_report(const CompareReport& rep) {
  ordered_json j = ordered_json::object();
  j["graded_engine"] = rep.graded_engine;
  j["graded_closed_form"] = rep.graded_closed_form;
  j["classical"] = rep.classical;
  j["lambda"] = rep.lambda;
  j["max_deviation"] = rep.max_deviation;
  return j;
}

}  // namespace gric
