#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "fwbb/core.hpp"
#include "fwbb/fw.hpp"
#include "fwbb/heuristics.hpp"
#include "fwbb/lmo.hpp"

namespace fwbb {

enum class SolvingStage { Solving, OptimalReached, UserStop, TimeLimit, NodeLimit, Infeasible, Exhausted };
enum class BranchingStrategy { MostInfeasible, GradientBased };

const char* to_string(SolvingStage stage);
const char* to_string(BranchingStrategy strategy);

/// Warm start of a node: an active set, or (DICG) a gradient whose LMO
/// vertex under the node bounds is the start point.
struct GradientStart {
  Vector gradient;
};
using NodeStart = std::variant<ActiveSet, Vector, GradientStart>;

struct BnBNode {
  long id = 0;
  int depth = 0;
  IntegerBounds local_bounds;
  NodeStart start;
  ShadowPool shadow_pool;
  double lower_bound = -std::numeric_limits<double>::infinity();
};

/// What callbacks get to see about the node just evaluated.
struct NodeInfo {
  long id = 0;
  int depth = 0;
  double lower_bound = -std::numeric_limits<double>::infinity();
  double primal = std::numeric_limits<double>::infinity();
  double fw_gap = std::numeric_limits<double>::infinity();
  std::span<const double> iterate;
};

struct TraceRow {
  double time_s = 0.0;
  long nodes = 0;
  double lb = -std::numeric_limits<double>::infinity();
  double ub = std::numeric_limits<double>::infinity();
};

/// Open nodes, incumbent and global state of a branch-and-bound run.
class Tree {
 public:
  explicit Tree(Tolerances tolerances = {});

  void push(BnBNode node);
  /// Removes the open node with the smallest lower bound (ties: lowest id).
  BnBNode pop_best();
  bool empty() const { return open_.empty(); }
  std::size_t open_count() const { return open_.size(); }
  /// Number of open nodes with lower bound strictly below `value`, counting up to `cap`.
  std::size_t open_below(double value, std::size_t cap) const;
  std::optional<double> best_open_bound() const;

  /// Registers a candidate; returns true if it became the incumbent.
  bool offer_incumbent(Vector x, double value);
  const std::optional<Vector>& incumbent() const { return incumbent_; }
  double incumbent_value() const { return incumbent_value_; }
  bool has_incumbent() const { return incumbent_.has_value(); }

  /// Bound of a node that stays open without children (callback veto, FW limits).
  void add_unresolved(double lower_bound);
  /// min(open bounds, unresolved bounds, incumbent); +inf without any.
  double global_lower_bound() const;

  SolvingStage stage() const { return stage_; }
  const std::string& message() const { return message_; }
  /// Ends the main loop after the current node with stage UserStop.
  void request_stop(std::string message);
  void set_stage(SolvingStage stage, std::string message = {});

  long nodes_processed() const { return nodes_processed_; }
  void count_node() { ++nodes_processed_; }
  long next_id() { return next_id_++; }
  const Tolerances& tolerances() const { return tolerances_; }

 private:
  Tolerances tolerances_;
  std::set<std::pair<double, long>> order_;
  std::unordered_map<long, BnBNode> open_;
  std::optional<Vector> incumbent_;
  double incumbent_value_ = std::numeric_limits<double>::infinity();
  std::optional<double> unresolved_min_;
  SolvingStage stage_ = SolvingStage::Solving;
  std::string message_;
  long nodes_processed_ = 0;
  long next_id_ = 1;
};

/// True when the evaluating node should stop early: its valid bound already
/// reaches the incumbent (within abs_gap), or at least k open nodes have a
/// strictly smaller bound.
bool premature_stop_check(const Tree& tree, double node_lower_bound, int k);

/// Branching variable, or nothing if the iterate is integral on integer_vars.
/// MostInfeasible: max distance to the nearest integer. GradientBased: max
/// |gradient| among variables with fractionality >= 1e-6. Ties: lowest index.
std::optional<std::size_t> select_branching_variable(BranchingStrategy strategy,
                                                     std::span<const double> x,
                                                     std::span<const double> gradient,
                                                     const std::vector<std::size_t>& integer_vars);

struct BnBCallbackFlags {
  bool worse_than_incumbent = false;
  bool node_infeasible = false;
  bool lb_update = false;
};

/// Called after every node evaluation (node != nullptr) and once more when the
/// open set runs empty (node == nullptr). May call tree.request_stop().
using BnBCallback = std::function<void(Tree& tree, const NodeInfo* node, const BnBCallbackFlags& flags)>;
/// Returns false to veto branching on the node.
using BranchCallback = std::function<bool(const Tree& tree, const NodeInfo& node)>;
using SolutionCallback =
    std::function<void(const Tree& tree, std::span<const double> x, double value, const std::string& origin)>;

struct BranchAndBoundSettings {
  bool verbose = false;
  Tolerances tolerances;
  BranchingStrategy branching = BranchingStrategy::MostInfeasible;
  bool premature_stop = true;
  int premature_stop_k = 2;
  bool postprocess = true;
  BnBCallback bnb_callback;
  BranchCallback branch_callback;
  SolutionCallback solution_callback;
};

struct FrankWolfeSettings {
  FWVariant variant = FWVariant::BPCG;
  bool lazy = true;
  LineSearch line_search;
  /// Shadow-pool capacity is this factor times the problem dimension.
  std::size_t shadow_pool_factor = 10;
};

struct DomainSettings {
  /// Optional initial active set (must be domain-feasible if a domain oracle exists).
  std::optional<ActiveSet> active_set;
};

struct Settings {
  BranchAndBoundSettings branch_and_bound;
  FrankWolfeSettings frank_wolfe;
  HeuristicSettings heuristic;
  DomainSettings domain;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Dense bounds over all variables (continuous ones are +-inf) -> domain point.
using DomainPointFn =
    std::function<std::optional<Vector>(std::span<const double> lower, std::span<const double> upper)>;

struct Problem {
  ObjectiveFn objective;
  GradientFn gradient;
  std::shared_ptr<SelfManagedLMO> lmo;
  /// Defaults to lmo->get_integer_variables() when empty.
  std::vector<std::size_t> integer_vars;
  DomainOracle domain_oracle;
  DomainPointFn domain_point;
  std::optional<HyperplaneData> hyperplane;
};

struct SolveResult {
  SolvingStage status = SolvingStage::Solving;
  std::string message;
  double primal = std::numeric_limits<double>::infinity();
  double dual_bound = -std::numeric_limits<double>::infinity();
  long nodes = 0;
  long lmo_calls = 0;
  long fw_iterations = 0;
  double time_s = 0.0;
  bool postprocessed_improved = false;
  std::vector<TraceRow> trace;
};

struct SolveOutput {
  std::optional<Vector> x;
  std::shared_ptr<TimeTrackingLMO> lmo;
  SolveResult result;
};

SolveOutput solve(const Problem& problem, const Settings& settings);

/// ub - lb <= max(abs_gap, rel_gap * max(|ub|, 1e-10)).
bool gap_closed(double lb, double ub, const Tolerances& tol);

}  // namespace fwbb
