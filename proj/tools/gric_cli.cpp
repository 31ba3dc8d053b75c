#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gric/errors.hpp"
#include "gric/model_io.hpp"

namespace {

using gric::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitSchemaError = 2;
constexpr int kExitNumericError = 3;

struct Options {
  std::string input;
  std::vector<std::vector<double>> points;
  double tol = 0;
  std::string path = "both";
  bool pretty = false;
  std::string direction;
};

void emit(const ordered_json& j, bool pretty) {
  std::printf("%s\n", gric::dump_json(j, pretty).c_str());
}

// Evaluation points: the model's own base point unless --point overrides.
std::vector<std::vector<double>> evaluation_points(const Options& opt,
                                                   const std::vector<double>& base) {
  if (opt.points.empty()) return {base};
  return opt.points;
}

gric::ModelFile rebased(const gric::ModelFile& mf, const std::vector<double>& pt) {
  if (static_cast<int>(pt.size()) != mf.structure.chart->n)
    throw gric::SchemaError("--point must have base_dim entries");
  if (pt == mf.structure.chart->base_point) return mf;
  gric::ModelFile out = mf;
  out.structure = mf.structure.at_point(pt);
  return out;
}

int run_validate(const Options& opt) {
  gric::ModelFile mf = gric::load_model(opt.input);
  int exit_code = kExitOk;
  for (const auto& pt : evaluation_points(opt, mf.structure.chart->base_point)) {
    gric::MasterResidual res =
        gric::check_master_equation(rebased(mf, pt).structure, opt.tol);
    ordered_json rep = gric::master_report(res);
    rep["base_point"] = pt;
    emit(rep, opt.pretty);
    if (!res.valid()) exit_code = kExitValidationFailure;
  }
  return exit_code;
}

// Shared master-equation gate: ricci/torsion/curvature refuse structures that
// fail the master equation, reporting the grouped residual.
bool master_gate(const gric::NQStructure& S, bool pretty) {
  gric::MasterResidual res = gric::check_master_equation(S, 1e-8);
  if (res.valid()) return true;
  ordered_json rep = ordered_json::object();
  rep["error"] = "master equation violated";
  rep["master"] = gric::master_report(res);
  emit(rep, pretty);
  return false;
}

int run_ricci(const Options& opt) {
  gric::ModelFile mf = gric::load_model(opt.input);
  int exit_code = kExitOk;
  for (const auto& pt : evaluation_points(opt, mf.structure.chart->base_point)) {
    gric::ModelFile local = rebased(mf, pt);
    if (!master_gate(local.structure, opt.pretty)) {
      exit_code = kExitValidationFailure;
      continue;
    }
    gric::Connection Q = gric::build_connection(local);
    if (opt.path == "engine") {
      emit(gric::ricci_report(gric::ricci_engine(Q)), opt.pretty);
    } else if (opt.path == "closed") {
      emit(gric::ricci_report(gric::ricci_closed_form(local.structure, Q.lambda())),
           opt.pretty);
    } else {
      gric::RicciTensor eng = gric::ricci_engine(Q);
      gric::RicciTensor cf = gric::ricci_closed_form(local.structure, Q.lambda());
      double dev = 0;
      for (std::size_t b = 0; b < eng.R.size(); ++b)
        for (std::size_t ad = 0; ad < eng.R[b].size(); ++ad)
          dev = std::max(dev, std::abs(eng.R[b][ad] - cf.R[b][ad]));
      ordered_json rep = ordered_json::object();
      rep["engine"] = gric::ricci_report(eng);
      rep["closed_form"] = gric::ricci_report(cf);
      rep["max_deviation"] = dev;
      rep["agree"] = dev <= opt.tol;
      emit(rep, opt.pretty);
      if (dev > opt.tol) exit_code = kExitValidationFailure;
    }
  }
  return exit_code;
}

int run_torsion(const Options& opt) {
  gric::ModelFile mf = gric::load_model(opt.input);
  int exit_code = kExitOk;
  for (const auto& pt : evaluation_points(opt, mf.structure.chart->base_point)) {
    gric::ModelFile local = rebased(mf, pt);
    if (!master_gate(local.structure, opt.pretty)) {
      exit_code = kExitValidationFailure;
      continue;
    }
    gric::Connection Q = gric::build_connection(local);
    gric::GradedElement T = gric::torsion(Q);
    gric::TorsionInvariance inv = gric::check_torsion_invariance(Q, opt.tol);
    ordered_json rep = ordered_json::object();
    rep["torsion"] = T.to_string();
    rep["invariant"] = inv.invariant;
    rep["torsion_residual"] = inv.torsion_residual;
    rep["eq_residual"] = inv.eq_residual;
    rep["base_point"] = pt;
    emit(rep, opt.pretty);
    if (!inv.invariant) exit_code = kExitValidationFailure;
  }
  return exit_code;
}

int run_curvature(const Options& opt) {
  gric::ModelFile mf = gric::load_model(opt.input);
  int exit_code = kExitOk;
  for (const auto& pt : evaluation_points(opt, mf.structure.chart->base_point)) {
    gric::ModelFile local = rebased(mf, pt);
    if (!master_gate(local.structure, opt.pretty)) {
      exit_code = kExitValidationFailure;
      continue;
    }
    gric::Connection Q = gric::build_connection(local);
    gric::End2Element D = gric::curvature(Q, opt.tol);
    ordered_json rep = ordered_json::object();
    ordered_json comps = ordered_json::array();
    for (const auto& c : D.comp) comps.push_back(c.to_string());
    rep["components"] = std::move(comps);
    rep["base_point"] = pt;
    emit(rep, opt.pretty);
  }
  return exit_code;
}

int run_exact_compare(const Options& opt) {
  gric::ExactModel M = gric::load_exact_model(opt.input);
  int exit_code = kExitOk;
  for (const auto& pt : evaluation_points(opt, M.base_point)) {
    if (static_cast<int>(pt.size()) != M.m)
      throw gric::SchemaError("--point must have dim entries");
    gric::ExactModel local = M;
    local.base_point = pt;
    gric::CompareReport rep = gric::compare_exact(local);
    ordered_json j = gric::compare_report(rep);
    j["base_point"] = pt;
    emit(j, opt.pretty);
    if (rep.max_deviation > opt.tol) exit_code = kExitValidationFailure;
  }
  return exit_code;
}

int run_exact_export(const Options& opt) {
  gric::ExactModel M = gric::load_exact_model(opt.input);
  for (const auto& pt : evaluation_points(opt, M.base_point)) {
    if (static_cast<int>(pt.size()) != M.m)
      throw gric::SchemaError("--point must have dim entries");
    gric::ExactModel local = M;
    local.base_point = pt;
    emit(gric::structure_to_json(gric::build_nq_from_exact(local)), opt.pretty);
  }
  return kExitOk;
}

int run_flow(const Options& opt) {
  gric::FlowScenario sc = gric::load_flow_scenario(opt.input);
  if (opt.direction == "forward") sc.direction = 1;
  else if (opt.direction == "backward") sc.direction = -1;
  else if (!opt.direction.empty())
    throw gric::SchemaError("direction must be \"forward\" or \"backward\"");
  gric::Trajectory traj =
      gric::run_flow(sc.state, sc.steps, sc.dt, sc.direction);
  for (const auto& rec : traj.records) {
    ordered_json j = ordered_json::object();
    j["t"] = rec.t;
    j["ric_norm"] = rec.ric_norm;
    j["frame"] = rec.frame;
    emit(j, opt.pretty);
  }
  if (traj.aborted) {
    std::fprintf(stderr, "flow aborted: %s\n", traj.abort_reason.c_str());
    return kExitNumericError;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalized Ricci tensor engine for degree-2 NQ symplectic manifolds"};
  app.require_subcommand(1);

  Options opt;
  std::vector<std::string> point_args;
  auto add_common = [&](CLI::App* sub, double default_tol) {
    sub->add_option("input", opt.input, "input JSON file")->required();
    sub->add_option("--point", point_args,
                    "evaluation point override, comma-separated reals "
                    "(repeatable)");
    sub->add_option("--tol", opt.tol, "tolerance")->default_val(default_tol);
    sub->add_flag("--pretty", opt.pretty, "indented output");
    sub->add_flag("--json", "compact JSON output (default)");
    return sub;
  };

  auto* validate = add_common(app.add_subcommand("validate", "check the master equation"), 1e-8);
  auto* ricci = add_common(app.add_subcommand("ricci", "generalized Ricci tensor"), 1e-7);
  ricci->add_option("--path", opt.path, "computation path")
      ->check(CLI::IsMember({"engine", "closed", "both"}))
      ->default_val("both");
  auto* torsion = add_common(app.add_subcommand("torsion", "torsion and its invariance"), 1e-10);
  auto* curvature = add_common(app.add_subcommand("curvature", "curvature components"), 1e-8);
  auto* exact_compare = add_common(
      app.add_subcommand("exact-compare", "three-path comparison for exact models"), 1e-6);
  auto* exact_export = add_common(
      app.add_subcommand("exact-export", "emit the jet-valued structure of an exact model"), 1e-6);
  auto* flow = add_common(app.add_subcommand("flow", "generalized Ricci flow trajectory"), 1e-8);
  flow->add_option("--direction", opt.direction, "forward or backward")
      ->check(CLI::IsMember({"forward", "backward"}));

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& p : point_args) {
      std::vector<double> pt;
      std::string cur;
      std::stringstream ss(p);
      while (std::getline(ss, cur, ',')) {
        try {
          std::size_t used = 0;
          pt.push_back(std::stod(cur, &used));
          if (used != cur.size()) throw std::invalid_argument(cur);
        } catch (const std::exception&) {
          throw gric::SchemaError("invalid --point entry: " + cur);
        }
      }
      opt.points.push_back(std::move(pt));
    }
    if (validate->parsed()) return run_validate(opt);
    if (ricci->parsed()) return run_ricci(opt);
    if (torsion->parsed()) return run_torsion(opt);
    if (curvature->parsed()) return run_curvature(opt);
    if (exact_compare->parsed()) return run_exact_compare(opt);
    if (exact_export->parsed()) return run_exact_export(opt);
    if (flow->parsed()) return run_flow(opt);
  } catch (const gric::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSchemaError;
  } catch (const gric::SchemaError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSchemaError;
  } catch (const gric::VariableOutOfRange& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSchemaError;
  } catch (const gric::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitNumericError;
  } catch (const gric::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSchemaError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSchemaError;
  }
  return kExitOk;
}
