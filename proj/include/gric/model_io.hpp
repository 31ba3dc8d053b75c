#ifndef GRIC_MODEL_IO_HPP
#define GRIC_MODEL_IO_HPP

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gric/exact.hpp"
#include "gric/flow.hpp"

namespace gric {

using ordered_json = nlohmann::ordered_json;

// Connection block of a model file: a full psi expression array, an
// invariant-torsion block with explicit psi_plus, or an invariant-torsion
// block given only by lambda (psi_plus defaults to the pure-trace tensor
// psi^a_{bc} = delta^a_c lambda_b / r; any trace-free completion yields the
// same Ricci).
struct ConnectionSpec {
  enum class Kind { None, Psi, InvariantPsiPlus, InvariantLambda };
  Kind kind = Kind::None;
  std::vector<Expression> psi;       // flattened [a][b][alpha] (Kind::Psi)
  std::vector<Expression> psi_plus;  // flattened [a][b][c]
  std::vector<Expression> lambda;    // r entries
};

struct ModelFile {
  NQStructure structure;
  ConnectionSpec connection;
};

// Parses the model JSON (schema: base_dim, rank_plus, rank_minus,
// signature_plus, signature_minus, base_point, jet_order, rho, c, optional
// psi / invariant_torsion). Unknown fields are rejected with SchemaError.
// Structure functions are either expression strings ("rho"/"c") or stored
// jet coefficient arrays ("rho_jets"/"c_jets", the exact-export format).
ModelFile parse_model(const ordered_json& j);
ModelFile load_model(const std::string& path);

// Builds the connection from the spec; SchemaError when kind is None.
Connection build_connection(const ModelFile& mf);

// Lambda jets for the closed-form path: from the connection when present.
std::vector<Jet> lambda_jets(const Connection& Q);

// Serializes a (jet-valued) structure back to the model schema using
// "rho_jets"/"c_jets". Jet coefficients are listed in the layout order
// (graded by total degree, then lexicographic) together with the remaining
// differentiability budget.
ordered_json structure_to_json(const NQStructure& S);

// Exact model JSON: dim, metric, eta, base_point, jet_order.
ExactModel parse_exact_model(const ordered_json& j);
ExactModel load_exact_model(const std::string& path);

// Flow scenario JSON: model (path, resolved relative to the scenario file),
// dt, steps, direction, lambda. The referenced model must be point-base
// (base_dim 0); the initial frame is the identity, so tilted starts are
// expressed through the structure constants themselves.
struct FlowScenario {
  FlowState state;
  double dt = 0;
  int steps = 0;
  int direction = 1;  // +1 forward, -1 backward
};

FlowScenario parse_flow_scenario(const ordered_json& j,
                                 const std::string& base_dir);
FlowScenario load_flow_scenario(const std::string& path);

// Deterministic JSON rendering: insertion key order, floats with %.17g.
std::string dump_json(const ordered_json& j, bool pretty);

// Report builders used by the CLI (and tested for byte stability).
ordered_json master_report(const MasterResidual& m);
ordered_json ricci_report(const RicciTensor& ric);
ordered_json courant_report(const CourantData& d);
ordered_json connection_report(const GeneralizedConnectionReport& rep);
ordered_json compare_report(const CompareReport& rep);

}  // namespace gric

#endif
