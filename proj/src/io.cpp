#include "fwbb/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "fwbb/errors.hpp"

namespace fwbb {

using nlohmann::json;

namespace {

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
  throw SolverError(ErrorKind::SchemaError, path + ": " + what);
}

// Typed access to a JSON value that remembers where it lives.
class Node {
 public:
  Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return value_; }

  void expect_object(std::initializer_list<const char*> allowed) const {
    if (!value_.is_object()) schema_fail(path_, "expected an object");
    for (const auto& [key, _] : value_.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) schema_fail(path_ + "." + key, "unknown field");
    }
  }
  bool has(const char* key) const { return value_.contains(key); }
  Node at(const char* key) const {
    if (!value_.contains(key)) schema_fail(path_ + "." + key, "missing required field");
    return {value_.at(key), path_ + "." + key};
  }
  std::vector<Node> items() const {
    if (!value_.is_array()) schema_fail(path_, "expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < value_.size(); ++i)
      out.emplace_back(value_[i], path_ + "[" + std::to_string(i) + "]");
    return out;
  }
  double number() const {
    if (!value_.is_number()) schema_fail(path_, "expected a number");
    const double v = value_.get<double>();
    if (!std::isfinite(v)) schema_fail(path_, "expected a finite number");
    return v;
  }
  std::size_t index() const {
    if (!value_.is_number_integer() || value_.get<long long>() < 0)
      schema_fail(path_, "expected a nonnegative integer");
    return value_.get<std::size_t>();
  }
  bool boolean() const {
    if (!value_.is_boolean()) schema_fail(path_, "expected a boolean");
    return value_.get<bool>();
  }
  std::string string() const {
    if (!value_.is_string()) schema_fail(path_, "expected a string");
    return value_.get<std::string>();
  }
  Vector numbers() const {
    Vector out;
    for (const Node& n : items()) out.push_back(n.number());
    return out;
  }
  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    for (const Node& n : items()) out.push_back(n.index());
    return out;
  }
  // Array of equal-length numeric rows, flattened row-major.
  Vector matrix(std::size_t rows, std::size_t cols) const {
    const auto r = items();
    if (r.size() != rows) schema_fail(path_, "expected " + std::to_string(rows) + " rows");
    Vector out;
    for (const Node& row : r) {
      const Vector v = row.numbers();
      if (v.size() != cols) schema_fail(row.path(), "expected " + std::to_string(cols) + " entries");
      out.insert(out.end(), v.begin(), v.end());
    }
    return out;
  }
  std::vector<Edge> edges(std::size_t n) const {
    std::vector<Edge> out;
    for (const Node& e : items()) {
      const auto uv = e.indices();
      if (uv.size() != 2) schema_fail(e.path(), "an edge is a pair of vertex indices");
      if (uv[0] >= n || uv[1] >= n) schema_fail(e.path(), "vertex index out of range");
      if (uv[0] == uv[1]) schema_fail(e.path(), "self-loops are not allowed");
      out.emplace_back(uv[0], uv[1]);
    }
    return out;
  }

 private:
  const json& value_;
  std::string path_;
};

// Re-raise payload validation failures as schema errors.
template <class T>
void validate_payload(const T& payload) {
  try {
    payload.validate();
  } catch (const SolverError& e) {
    schema_fail("$", e.what());
  }
}

json matrix_json(const Vector& flat, std::size_t rows, std::size_t cols) {
  json out = json::array();
  for (std::size_t i = 0; i < rows; ++i)
    out.push_back(Vector(flat.begin() + static_cast<std::ptrdiff_t>(i * cols),
                         flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols)));
  return out;
}

json edges_json(const Vector& adj, std::size_t n) {
  json out = json::array();
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (adj[u * n + v] != 0.0) out.push_back({u, v});
  return out;
}

QuadraticInstance parse_quadratic(const Node& root) {
  root.expect_object({"kind", "settings", "n", "q", "c", "lower", "upper", "integer_vars"});
  QuadraticInstance inst;
  inst.n = root.at("n").index();
  inst.q = root.at("q").matrix(inst.n, inst.n);
  inst.c = root.at("c").numbers();
  inst.lower = root.at("lower").numbers();
  inst.upper = root.at("upper").numbers();
  inst.integer_vars = root.at("integer_vars").indices();
  validate_payload(inst);
  return inst;
}

GraphIsomorphismInstance parse_gip(const Node& root) {
  root.expect_object({"kind", "settings", "n", "edges_a", "edges_b"});
  GraphIsomorphismInstance inst;
  inst.n = root.at("n").index();
  inst.a = adjacency_from_edges(inst.n, root.at("edges_a").edges(inst.n));
  inst.b = adjacency_from_edges(inst.n, root.at("edges_b").edges(inst.n));
  validate_payload(inst);
  return inst;
}

OEDPInstance parse_oedp(const Node& root) {
  root.expect_object({"kind", "settings", "criterion", "m", "n", "a", "budget", "upper"});
  OEDPInstance inst;
  const Node crit = root.at("criterion");
  const std::string c = crit.string();
  if (c == "A") inst.criterion = OEDPCriterion::A;
  else if (c == "D") inst.criterion = OEDPCriterion::D;
  else schema_fail(crit.path(), "expected \"A\" or \"D\"");
  inst.m = root.at("m").index();
  inst.n = root.at("n").index();
  inst.a = root.at("a").matrix(inst.m, inst.n);
  inst.budget = root.at("budget").number();
  inst.upper = root.at("upper").numbers();
  validate_payload(inst);
  return inst;
}

NetworkDesignInstance parse_network(const Node& root) {
  root.expect_object({"kind", "settings", "num_nodes", "arcs", "destinations", "mu", "p"});
  NetworkDesignInstance inst;
  inst.num_nodes = root.at("num_nodes").index();
  if (root.has("mu")) inst.mu = root.at("mu").number();
  if (root.has("p")) inst.p = root.at("p").number();
  for (const Node& arc : root.at("arcs").items()) {
    arc.expect_object({"tail", "head", "alpha", "beta", "gamma", "rho", "candidate", "design_cost"});
    const std::size_t tail = arc.at("tail").index(), head = arc.at("head").index();
    if (tail >= inst.num_nodes || head >= inst.num_nodes) schema_fail(arc.path(), "arc endpoint out of range");
    inst.arcs.push_back({tail, head});
    inst.alpha.push_back(arc.at("alpha").number());
    inst.beta.push_back(arc.at("beta").number());
    inst.gamma.push_back(arc.at("gamma").number());
    inst.rho.push_back(arc.at("rho").number());
    const bool candidate = arc.has("candidate") && arc.at("candidate").boolean();
    if (candidate) {
      inst.candidate_arcs.push_back(inst.arcs.size() - 1);
      inst.design_cost.push_back(arc.at("design_cost").number());
    } else if (arc.has("design_cost")) {
      schema_fail(arc.path() + ".design_cost", "only candidate arcs have a design cost");
    }
  }
  bool any_big_m = false, all_big_m = true;
  Vector big_m;
  for (const Node& dest : root.at("destinations").items()) {
    dest.expect_object({"node", "big_m", "demands"});
    const std::size_t node = dest.at("node").index();
    if (node >= inst.num_nodes) schema_fail(dest.path() + ".node", "node out of range");
    inst.destinations.push_back(node);
    if (dest.has("big_m")) {
      any_big_m = true;
      big_m.push_back(dest.at("big_m").number());
    } else {
      all_big_m = false;
    }
    std::vector<Demand> demands;
    for (const Node& d : dest.at("demands").items()) {
      d.expect_object({"source", "amount"});
      const std::size_t source = d.at("source").index();
      if (source >= inst.num_nodes) schema_fail(d.path() + ".source", "node out of range");
      const double amount = d.at("amount").number();
      if (amount < 0.0) schema_fail(d.path() + ".amount", "demand must be nonnegative");
      demands.push_back({source, amount});
    }
    inst.demands.push_back(std::move(demands));
  }
  if (any_big_m && !all_big_m) schema_fail(root.path() + ".destinations", "give big_m for all destinations or none");
  inst.big_m = std::move(big_m);
  validate_payload(inst);
  try {
    // Reachability of every demand is checked by the oracle itself.
    FlowLMO check(inst.num_nodes, inst.arcs, inst.destinations, inst.demands);
  } catch (const SolverError& e) {
    schema_fail(root.path(), e.what());
  }
  return inst;
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

json scalar_value(const std::string& text) {
  // Values that parse as JSON scalars are stored as such, everything else as a string.
  try {
    json v = json::parse(text);
    if (v.is_primitive() && !v.is_null()) return v;
  } catch (const json::exception&) {
  }
  return text;
}

}  // namespace

const char* instance_kind(const InstancePayload& payload) {
  switch (payload.index()) {
    case 0: return "quadratic";
    case 1: return "gip";
    case 2: return "oedp";
    default: return "network";
  }
}

InstanceFile parse_instance(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    schema_fail("$", std::string("invalid JSON: ") + e.what());
  }
  const Node root(doc, "$");
  if (!doc.is_object()) schema_fail("$", "expected an object");
  const Node kind_node = root.at("kind");
  const std::string kind = kind_node.string();
  InstanceFile file;
  if (kind == "quadratic") file.payload = parse_quadratic(root);
  else if (kind == "gip") file.payload = parse_gip(root);
  else if (kind == "oedp") file.payload = parse_oedp(root);
  else if (kind == "network") file.payload = parse_network(root);
  else schema_fail(kind_node.path(), "unknown kind \"" + kind + "\"");
  if (root.has("settings")) {
    const Node s = root.at("settings");
    if (!s.raw().is_object()) schema_fail(s.path(), "expected an object");
    Settings probe;
    for (const auto& [key, value] : s.raw().items()) {
      const std::string path = s.path() + "." + key;
      if (!value.is_primitive() || value.is_null()) schema_fail(path, "expected a scalar value");
      try {
        apply_override(probe, key, scalar_text(value));
      } catch (const SolverError& e) {
        schema_fail(path, e.what());
      }
      file.settings.emplace_back(key, scalar_text(value));
    }
  }
  return file;
}

InstanceFile load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SolverError(ErrorKind::InvalidArgument, "cannot open instance file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

std::string serialize_instance(const InstanceFile& file) {
  json doc;
  doc["kind"] = instance_kind(file.payload);
  std::visit(
      [&](const auto& inst) {
        using T = std::decay_t<decltype(inst)>;
        if constexpr (std::is_same_v<T, QuadraticInstance>) {
          doc["n"] = inst.n;
          doc["q"] = matrix_json(inst.q, inst.n, inst.n);
          doc["c"] = inst.c;
          doc["lower"] = inst.lower;
          doc["upper"] = inst.upper;
          doc["integer_vars"] = inst.integer_vars;
        } else if constexpr (std::is_same_v<T, GraphIsomorphismInstance>) {
          doc["n"] = inst.n;
          doc["edges_a"] = edges_json(inst.a, inst.n);
          doc["edges_b"] = edges_json(inst.b, inst.n);
        } else if constexpr (std::is_same_v<T, OEDPInstance>) {
          doc["criterion"] = to_string(inst.criterion);
          doc["m"] = inst.m;
          doc["n"] = inst.n;
          doc["a"] = matrix_json(inst.a, inst.m, inst.n);
          doc["budget"] = inst.budget;
          doc["upper"] = inst.upper;
        } else {
          doc["num_nodes"] = inst.num_nodes;
          doc["mu"] = inst.mu;
          doc["p"] = inst.p;
          json arcs = json::array();
          std::vector<std::optional<double>> design(inst.arcs.size());
          for (std::size_t k = 0; k < inst.candidate_arcs.size(); ++k)
            design[inst.candidate_arcs[k]] = inst.design_cost[k];
          for (std::size_t e = 0; e < inst.arcs.size(); ++e) {
            json arc = {{"tail", inst.arcs[e].tail}, {"head", inst.arcs[e].head},
                        {"alpha", inst.alpha[e]},    {"beta", inst.beta[e]},
                        {"gamma", inst.gamma[e]},    {"rho", inst.rho[e]},
                        {"candidate", design[e].has_value()}};
            if (design[e]) arc["design_cost"] = *design[e];
            arcs.push_back(std::move(arc));
          }
          doc["arcs"] = std::move(arcs);
          json dests = json::array();
          for (std::size_t z = 0; z < inst.destinations.size(); ++z) {
            json dest = {{"node", inst.destinations[z]}};
            if (!inst.big_m.empty()) dest["big_m"] = inst.big_m[z];
            json demands = json::array();
            for (const Demand& d : inst.demands[z])
              demands.push_back({{"source", d.source}, {"amount", d.amount}});
            dest["demands"] = std::move(demands);
            dests.push_back(std::move(dest));
          }
          doc["destinations"] = std::move(dests);
        }
      },
      file.payload);
  if (!file.settings.empty()) {
    json s = json::object();
    for (const auto& [key, value] : file.settings) s[key] = scalar_value(value);
    doc["settings"] = std::move(s);
  }
  return doc.dump(2) + "\n";
}

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
  throw SolverError(ErrorKind::SchemaError,
                    std::string(key) + ": expected " + expected + ", got \"" + std::string(value) + "\"");
}

double parse_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out))
    bad_value(key, value, "a finite number");
  return out;
}

long parse_long(std::string_view key, std::string_view value) {
  long out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value, "an integer");
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value, "true or false");
}

}  // namespace

void apply_override(Settings& s, std::string_view key, std::string_view value) {
  Tolerances& tol = s.branch_and_bound.tolerances;
  FrankWolfeSettings& fw = s.frank_wolfe;
  HeuristicSettings& h = s.heuristic;
  auto number = [&] { return parse_double(key, value); };
  auto integer = [&] { return parse_long(key, value); };
  auto flag = [&] { return parse_bool(key, value); };
  auto positive_int = [&] {
    const long v = integer();
    if (v < 1) bad_value(key, value, "a positive integer");
    return v;
  };

  if (key == "seed") {
    const long v = integer();
    if (v < 0) bad_value(key, value, "a nonnegative integer");
    s.seed = static_cast<std::uint64_t>(v);
  } else if (key == "branch_and_bound.verbose") {
    s.branch_and_bound.verbose = flag();
  } else if (key == "branch_and_bound.abs_gap") {
    tol.abs_gap = number();
  } else if (key == "branch_and_bound.rel_gap") {
    tol.rel_gap = number();
  } else if (key == "branch_and_bound.fw_gap_decay") {
    tol.fw_gap_decay = number();
  } else if (key == "branch_and_bound.fw_epsilon_start") {
    tol.fw_epsilon_start = number();
  } else if (key == "branch_and_bound.fw_epsilon_min") {
    tol.fw_epsilon_min = number();
  } else if (key == "branch_and_bound.min_lower_bound") {
    tol.min_lower_bound = number();
  } else if (key == "branch_and_bound.max_fw_iter" || key == "frank_wolfe.max_fw_iter") {
    tol.max_fw_iter = static_cast<int>(positive_int());
  } else if (key == "branch_and_bound.node_limit") {
    tol.node_limit = positive_int();
  } else if (key == "branch_and_bound.time_limit_s") {
    const double v = number();
    if (v < 0.0) bad_value(key, value, "a nonnegative number");
    tol.time_limit_s = v;
  } else if (key == "branch_and_bound.branching") {
    if (value == "most_infeasible") s.branch_and_bound.branching = BranchingStrategy::MostInfeasible;
    else if (value == "gradient") s.branch_and_bound.branching = BranchingStrategy::GradientBased;
    else bad_value(key, value, "most_infeasible or gradient");
  } else if (key == "branch_and_bound.premature_stop") {
    s.branch_and_bound.premature_stop = flag();
  } else if (key == "branch_and_bound.premature_stop_k") {
    s.branch_and_bound.premature_stop_k = static_cast<int>(positive_int());
  } else if (key == "branch_and_bound.postprocess") {
    s.branch_and_bound.postprocess = flag();
  } else if (key == "frank_wolfe.variant") {
    if (value == "Standard") fw.variant = FWVariant::Standard;
    else if (value == "AwayFW") fw.variant = FWVariant::AwayFW;
    else if (value == "PairwiseFW") fw.variant = FWVariant::PairwiseFW;
    else if (value == "BPCG") fw.variant = FWVariant::BPCG;
    else if (value == "DICG") fw.variant = FWVariant::DICG;
    else bad_value(key, value, "Standard, AwayFW, PairwiseFW, BPCG or DICG");
  } else if (key == "frank_wolfe.lazy") {
    fw.lazy = flag();
  } else if (key == "frank_wolfe.line_search") {
    if (value == "agnostic") fw.line_search.kind = LineSearchKind::Agnostic;
    else if (value == "secant") fw.line_search.kind = LineSearchKind::Secant;
    else if (value == "backtracking") fw.line_search.kind = LineSearchKind::Backtracking;
    else bad_value(key, value, "agnostic, secant or backtracking");
  } else if (key == "frank_wolfe.line_search_max_iter") {
    fw.line_search.max_iter = static_cast<int>(positive_int());
  } else if (key == "frank_wolfe.line_search_tol") {
    fw.line_search.tol = number();
  } else if (key == "frank_wolfe.shadow_pool_factor") {
    const long v = integer();
    if (v < 0) bad_value(key, value, "a nonnegative integer");
    fw.shadow_pool_factor = static_cast<std::size_t>(v);
  } else if (key == "heuristic.simple_rounding_prob") {
    h.simple_rounding_prob = number();
  } else if (key == "heuristic.probability_rounding_prob") {
    h.probability_rounding_prob = number();
  } else if (key == "heuristic.follow_gradient_prob") {
    h.follow_gradient_prob = number();
  } else if (key == "heuristic.hyperplane_aware_rounding_prob") {
    h.hyperplane_aware_rounding_prob = number();
  } else if (key == "heuristic.follow_gradient_steps") {
    h.follow_gradient_steps = static_cast<int>(positive_int());
  } else if (key == "domain.warm_start") {
    if (!flag()) s.domain.active_set.reset();
  } else {
    throw SolverError(ErrorKind::SchemaError, std::string(key) + ": unknown setting");
  }
}

PreparedRun prepare_run(const InstanceFile& file) {
  PreparedRun run;
  std::visit(
      [&](const auto& inst) {
        using T = std::decay_t<decltype(inst)>;
        if constexpr (std::is_same_v<T, QuadraticInstance>) {
          run.problem = make_quadratic_problem(inst);
        } else if constexpr (std::is_same_v<T, GraphIsomorphismInstance>) {
          run.problem = make_gip_problem(inst);
          run.settings = gip_settings();
        } else if constexpr (std::is_same_v<T, OEDPInstance>) {
          run.problem = make_oedp_problem(inst);
          run.settings = oedp_settings(inst, run.problem);
        } else {
          run.problem = make_network_design_problem(inst);
        }
      },
      file.payload);
  for (const auto& [key, value] : file.settings) apply_override(run.settings, key, value);
  return run;
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string solution_json(const InstanceFile& file, const SolveOutput& out) {
  const SolveResult& r = out.result;
  json doc;
  doc["kind"] = instance_kind(file.payload);
  doc["status"] = to_string(r.status);
  doc["message"] = r.message;
  doc["objective"] = finite_or_null(r.primal);
  doc["dual_bound"] = finite_or_null(r.dual_bound);
  doc["nodes"] = r.nodes;
  doc["lmo_calls"] = r.lmo_calls;
  doc["fw_iterations"] = r.fw_iterations;
  doc["time_s"] = r.time_s;
  doc["postprocessed_improved"] = r.postprocessed_improved;
  doc["x"] = out.x ? json(*out.x) : json(nullptr);
  if (std::holds_alternative<GraphIsomorphismInstance>(file.payload))
    doc["verdict"] = to_string(gip_verdict(r));
  if (const auto* nd = std::get_if<NetworkDesignInstance>(&file.payload); nd && out.x) {
    json built = json::array();
    for (std::size_t k = 0; k < nd->num_design(); ++k)
      if ((*out.x)[k] > 0.5) built.push_back(nd->candidate_arcs[k]);
    doc["built_arcs"] = std::move(built);
  }
  return doc.dump(2) + "\n";
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::string out = "time_s,nodes,lb,ub\n";
  char buf[128];
  for (const TraceRow& row : trace) {
    std::snprintf(buf, sizeof buf, "%.6f,%ld,%.17g,", row.time_s, row.nodes, row.lb);
    out += buf;
    if (std::isfinite(row.ub)) {
      std::snprintf(buf, sizeof buf, "%.17g", row.ub);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::string summary_line(const InstanceFile& file, const SolveOutput& out) {
  const SolveResult& r = out.result;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s: status=%s objective=%.10g bound=%.10g nodes=%ld time=%.3fs",
                instance_kind(file.payload), to_string(r.status), r.primal, r.dual_bound, r.nodes,
                r.time_s);
  std::string line = buf;
  if (std::holds_alternative<GraphIsomorphismInstance>(file.payload))
    line += std::string(" verdict=") + to_string(gip_verdict(r));
  return line;
}

int exit_code(const InstanceFile& file, const SolveResult& result) {
  switch (result.status) {
    case SolvingStage::OptimalReached:
    case SolvingStage::Infeasible:
      return 0;
    case SolvingStage::UserStop:
      if (std::holds_alternative<GraphIsomorphismInstance>(file.payload) &&
          gip_verdict(result) != IsomorphismVerdict::Inconclusive)
        return 0;
      return 2;
    default:
      return 2;
  }
}

}  // namespace fwbb
