#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "fwbb/bnb.hpp"
#include "fwbb/problems/graph_isomorphism.hpp"
#include "fwbb/problems/network_design.hpp"
#include "fwbb/problems/oedp.hpp"
#include "fwbb/problems/quadratic.hpp"

namespace fwbb {

using InstancePayload =
    std::variant<QuadraticInstance, GraphIsomorphismInstance, OEDPInstance, NetworkDesignInstance>;

/// Parsed instance file: the payload plus dotted-key settings overrides, kept
/// as (key, value-as-text) pairs in file order.
struct InstanceFile {
  InstancePayload payload;
  std::vector<std::pair<std::string, std::string>> settings;
};

/// "quadratic", "gip", "oedp" or "network".
const char* instance_kind(const InstancePayload& payload);

/// Throws SchemaError (message after the kind prefix starts with the JSON path, e.g. "$.arcs[2].tail")
/// on malformed input or unknown fields; the payload is validated afterwards.
InstanceFile parse_instance(std::string_view text);
InstanceFile load_instance(const std::string& path);
/// Canonical text form; parse_instance(serialize_instance(f)) reproduces f.
std::string serialize_instance(const InstanceFile& file);

/// Applies one dotted-key override. Keys:
///   seed
///   branch_and_bound.{verbose, abs_gap, rel_gap, fw_gap_decay, fw_epsilon_start,
///     fw_epsilon_min, min_lower_bound, max_fw_iter, node_limit, time_limit_s,
///     branching, premature_stop, premature_stop_k, postprocess}
///   frank_wolfe.{variant, lazy, max_fw_iter, line_search, line_search_max_iter,
///     line_search_tol, shadow_pool_factor}
///   heuristic.{simple_rounding_prob, probability_rounding_prob, follow_gradient_prob,
///     hyperplane_aware_rounding_prob, follow_gradient_steps}
///   domain.warm_start (false drops a prepared warm start)
/// Throws SchemaError naming the key on unknown keys or unparsable values.
void apply_override(Settings& settings, std::string_view key, std::string_view value);

struct PreparedRun {
  Problem problem;
  Settings settings;
};

/// Problem plus the pack's default settings, then the file's overrides.
PreparedRun prepare_run(const InstanceFile& file);

/// Solution document: status, objective, bounds, counters, x, and a verdict
/// for graph isomorphism.
std::string solution_json(const InstanceFile& file, const SolveOutput& out);
/// Header time_s,nodes,lb,ub; ub is empty while there is no incumbent.
std::string trace_csv(const std::vector<TraceRow>& trace);
/// One-line human summary.
std::string summary_line(const InstanceFile& file, const SolveOutput& out);

/// 0 when solved or certified (optimal, infeasible, or a user stop with a
/// verdict), 2 when a limit ended the run without a certificate.
int exit_code(const InstanceFile& file, const SolveResult& result);

}  // namespace fwbb
