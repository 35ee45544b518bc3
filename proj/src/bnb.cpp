#include "fwbb/bnb.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>

#include "fwbb/errors.hpp"

namespace fwbb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_prunable(ErrorKind kind) {
  return kind == ErrorKind::NodeInfeasible || kind == ErrorKind::AssignmentInfeasible ||
         kind == ErrorKind::OracleFailure || kind == ErrorKind::BudgetInfeasible ||
         kind == ErrorKind::UnreachableDemand || kind == ErrorKind::WarmStartFailure;
}

double fractionality(double v) { return std::abs(v - std::round(v)); }

}  // namespace

const char* to_string(SolvingStage stage) {
  switch (stage) {
    case SolvingStage::Solving: return "Solving";
    case SolvingStage::OptimalReached: return "OptimalReached";
    case SolvingStage::UserStop: return "UserStop";
    case SolvingStage::TimeLimit: return "TimeLimit";
    case SolvingStage::NodeLimit: return "NodeLimit";
    case SolvingStage::Infeasible: return "Infeasible";
    case SolvingStage::Exhausted: return "Exhausted";
  }
  return "?";
}

const char* to_string(BranchingStrategy strategy) {
  return strategy == BranchingStrategy::MostInfeasible ? "MostInfeasible" : "GradientBased";
}

bool gap_closed(double lb, double ub, const Tolerances& tol) {
  if (!std::isfinite(ub)) return false;
  const double gap = ub - lb;
  return gap <= tol.abs_gap || gap / std::max(std::abs(ub), 1e-10) <= tol.rel_gap;
}

Tree::Tree(Tolerances tolerances) : tolerances_(std::move(tolerances)) {}

void Tree::push(BnBNode node) {
  order_.emplace(node.lower_bound, node.id);
  const long id = node.id;
  open_.emplace(id, std::move(node));
}

BnBNode Tree::pop_best() {
  if (order_.empty()) throw SolverError(ErrorKind::InvalidArgument, "no open node to select");
  const auto [lb, id] = *order_.begin();
  order_.erase(order_.begin());
  auto it = open_.find(id);
  BnBNode node = std::move(it->second);
  open_.erase(it);
  return node;
}

std::size_t Tree::open_below(double value, std::size_t cap) const {
  std::size_t count = 0;
  for (auto it = order_.begin(); it != order_.end() && count < cap && it->first < value; ++it) ++count;
  return count;
}

std::optional<double> Tree::best_open_bound() const {
  if (order_.empty()) return std::nullopt;
  return order_.begin()->first;
}

bool Tree::offer_incumbent(Vector x, double value) {
  if (!(value < incumbent_value_)) return false;
  incumbent_ = std::move(x);
  incumbent_value_ = value;
  return true;
}

void Tree::add_unresolved(double lower_bound) {
  unresolved_min_ = unresolved_min_ ? std::min(*unresolved_min_, lower_bound) : lower_bound;
}

double Tree::global_lower_bound() const {
  double lb = incumbent_value_;
  if (auto b = best_open_bound()) lb = std::min(lb, *b);
  if (unresolved_min_) lb = std::min(lb, *unresolved_min_);
  return lb;
}

void Tree::request_stop(std::string message) { set_stage(SolvingStage::UserStop, std::move(message)); }

void Tree::set_stage(SolvingStage stage, std::string message) {
  stage_ = stage;
  message_ = std::move(message);
}

bool premature_stop_check(const Tree& tree, double node_lower_bound, int k) {
  if (tree.has_incumbent() &&
      node_lower_bound >= tree.incumbent_value() - tree.tolerances().abs_gap)
    return true;
  if (k <= 0) return false;
  return tree.open_below(node_lower_bound, static_cast<std::size_t>(k)) >= static_cast<std::size_t>(k);
}

std::optional<std::size_t> select_branching_variable(BranchingStrategy strategy,
                                                     std::span<const double> x,
                                                     std::span<const double> gradient,
                                                     const std::vector<std::size_t>& integer_vars) {
  std::optional<std::size_t> best;
  double best_score = -1.0;
  for (std::size_t var : integer_vars) {
    const double frac = fractionality(x[var]);
    if (frac <= kIntegralityTol) continue;
    const double score = strategy == BranchingStrategy::MostInfeasible ? frac : std::abs(gradient[var]);
    // integer_vars is sorted, so strict > keeps the lowest index on ties.
    if (score > best_score) {
      best_score = score;
      best = var;
    }
  }
  return best;
}

void Settings::validate() const {
  branch_and_bound.tolerances.validate();
  heuristic.validate();
  if (branch_and_bound.premature_stop_k < 1)
    throw SolverError(ErrorKind::InvalidArgument, "premature_stop_k must be >= 1");
  const LineSearch& ls = frank_wolfe.line_search;
  if (ls.max_iter < 1 || !(ls.tol > 0.0) || !(ls.domain_shrink > 0.0 && ls.domain_shrink < 1.0) ||
      !(ls.tau > 0.0 && ls.tau < 1.0) || !(ls.initial_lipschitz > 0.0))
    throw SolverError(ErrorKind::InvalidArgument, "invalid line-search parameters");
}

namespace {

using Clock = std::chrono::steady_clock;

class Driver {
 public:
  Driver(const Problem& problem, const Settings& settings)
      : problem_(problem),
        settings_(settings),
        tol_(settings.branch_and_bound.tolerances),
        tree_(settings.branch_and_bound.tolerances),
        rng_(settings.seed),
        start_(Clock::now()) {}

  SolveOutput run() {
    settings_.validate();
    if (!problem_.objective || !problem_.gradient || !problem_.lmo)
      throw SolverError(ErrorKind::InvalidArgument, "problem needs objective, gradient and LMO");
    lmo_ = std::make_shared<TimeTrackingLMO>(problem_.lmo);
    dim_ = lmo_->dimension();
    int_vars_ = problem_.integer_vars.empty() ? lmo_->get_integer_variables() : problem_.integer_vars;
    std::sort(int_vars_.begin(), int_vars_.end());
    global_ = lmo_->build_global_bounds(int_vars_);
    fw_settings_.variant = settings_.frank_wolfe.variant;
    fw_settings_.lazy = settings_.frank_wolfe.lazy;
    fw_settings_.line_search = settings_.frank_wolfe.line_search;
    if (problem_.domain_oracle && !fw_settings_.line_search.domain_oracle)
      fw_settings_.line_search.domain_oracle = problem_.domain_oracle;
    fw_settings_.max_iter = tol_.max_fw_iter;

    BnBNode root;
    root.id = tree_.next_id();
    root.local_bounds = IntegerBounds(int_vars_);
    root.shadow_pool = ShadowPool(settings_.frank_wolfe.shadow_pool_factor * dim_);
    try {
      apply_node_bounds(*lmo_, global_, root.local_bounds);
      if (settings_.domain.active_set)
        root.start = *settings_.domain.active_set;
      else
        root.start = ActiveSet(lmo_->compute_extreme_point(Vector(dim_, 1.0)));
      tree_.push(std::move(root));
    } catch (const SolverError& e) {
      if (!is_prunable(e.kind())) throw;
      tree_.set_stage(SolvingStage::Infeasible, e.what());
    }

    main_loop();
    if (settings_.branch_and_bound.postprocess) postprocess();
    return finish();
  }

 private:
  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

  void main_loop() {
    while (tree_.stage() == SolvingStage::Solving) {
      const double lb = tree_.global_lower_bound();
      if (tree_.has_incumbent() && gap_closed(lb, tree_.incumbent_value(), tol_)) {
        tree_.set_stage(SolvingStage::OptimalReached);
        break;
      }
      if (tree_.empty()) {
        if (auto& cb = settings_.branch_and_bound.bnb_callback) cb(tree_, nullptr, {});
        if (tree_.stage() != SolvingStage::Solving) break;
        if (!tree_.has_incumbent() && !std::isfinite(lb) && lb > 0)
          tree_.set_stage(SolvingStage::Infeasible, "no integer-feasible point");
        else if ((!tree_.has_incumbent() || !gap_closed(lb, tree_.incumbent_value(), tol_)) &&
                 tol_.time_limit_s && elapsed() >= *tol_.time_limit_s)
          tree_.set_stage(SolvingStage::TimeLimit);
        else if (!tree_.has_incumbent() || !gap_closed(lb, tree_.incumbent_value(), tol_))
          tree_.set_stage(SolvingStage::Exhausted, "open set empty with unresolved node bounds");
        else
          tree_.set_stage(SolvingStage::OptimalReached);
        break;
      }
      if (tol_.node_limit && tree_.nodes_processed() >= *tol_.node_limit) {
        tree_.set_stage(SolvingStage::NodeLimit);
        break;
      }
      // The root is always evaluated so even a zero time limit reports a bound.
      if (tol_.time_limit_s && tree_.nodes_processed() > 0 && elapsed() >= *tol_.time_limit_s) {
        tree_.set_stage(SolvingStage::TimeLimit);
        break;
      }
      BnBNode node = tree_.pop_best();
      if (tree_.has_incumbent() && node.lower_bound >= tree_.incumbent_value() - tol_.abs_gap) continue;
      if (tol_.min_lower_bound && node.lower_bound > *tol_.min_lower_bound) continue;
      process(std::move(node));
    }
  }

  std::pair<Vector, Vector> dense_bounds() const {
    Vector lo(dim_, -kInf), hi(dim_, kInf);
    for (std::size_t var : int_vars_) {
      lo[var] = lmo_->get_bound(var, BoundSense::GreaterThan);
      hi[var] = lmo_->get_bound(var, BoundSense::LessThan);
    }
    return {std::move(lo), std::move(hi)};
  }

  double safe_objective(std::span<const double> x) const {
    if (problem_.domain_oracle && !problem_.domain_oracle(x)) return kInf;
    try {
      return problem_.objective(x);
    } catch (const SolverError& e) {
      if (e.kind() == ErrorKind::DomainViolation) return kInf;
      throw;
    }
  }

  Vector gradient_at(std::span<const double> x) const {
    Vector g(dim_, 0.0);
    try {
      problem_.gradient(g, x);
    } catch (const SolverError& e) {
      if (e.kind() != ErrorKind::DomainViolation) throw;
      std::fill(g.begin(), g.end(), 0.0);
    }
    return g;
  }

  bool integral(std::span<const double> x) const {
    for (std::size_t var : int_vars_)
      if (!is_integral(x[var])) return false;
    return true;
  }

  // Offers an integer-feasible point to the tree; only strict improvements are kept.
  bool consider(std::span<const double> x, const std::string& origin) {
    if (x.size() != dim_ || !integral(x)) return false;
    Vector snapped(x.begin(), x.end());
    for (std::size_t var : int_vars_) snapped[var] = std::round(snapped[var]);
    const Vector raw(x.begin(), x.end());
    for (const Vector* cand : std::array<const Vector*, 2>{&snapped, &raw}) {
      const double value = safe_objective(*cand);
      if (!std::isfinite(value) || !(value < tree_.incumbent_value())) return false;
      if (!lmo_->is_linear_feasible(*cand)) continue;
      tree_.offer_incumbent(*cand, value);
      if (auto& cb = settings_.branch_and_bound.solution_callback) cb(tree_, *cand, value, origin);
      return true;
    }
    return false;
  }

  FWSettings fw_settings(double epsilon) const {
    FWSettings s = fw_settings_;
    s.epsilon = epsilon;
    if (tol_.time_limit_s) s.time_limit_s = std::max(0.0, *tol_.time_limit_s - elapsed());
    return s;
  }

  FWResult run_fw(const FWSettings& s, const ActiveSet& as, const Vector& dicg_start, ShadowPool* pool,
                  const IterationCallback& cb) {
    FWResult r = s.variant == FWVariant::DICG
                     ? solve_node_dicg(s, problem_.objective, problem_.gradient, *lmo_, dicg_start, pool, cb)
                     : solve_node_fw(s, problem_.objective, problem_.gradient, *lmo_, as, pool, cb);
    fw_iterations_ += r.iterations;
    return r;
  }

  void offer_result(const FWResult& r) {
    consider(r.iterate, "iterate");
    if (r.active_set)
      for (const Vector& v : r.active_set->vertices()) consider(v, "vertex");
    if (r.last_vertex) consider(*r.last_vertex, "vertex");
  }

  struct Outcome {
    bool infeasible = false;
    double lower_bound = -kInf;
    std::optional<FWResult> fw;
  };

  void process(BnBNode node) {
    tree_.count_node();
    const double lb_before = trace_lb_;
    NodeInfo info;
    info.id = node.id;
    info.depth = node.depth;
    info.lower_bound = node.lower_bound;
    BnBCallbackFlags flags;
    Outcome out;
    try {
      out = evaluate(node, info);
    } catch (const SolverError& e) {
      if (!is_prunable(e.kind())) throw;
      out.infeasible = true;
    }
    flags.node_infeasible = out.infeasible;
    flags.worse_than_incumbent =
        !out.infeasible && tree_.has_incumbent() &&
        info.lower_bound >= tree_.incumbent_value() - tol_.abs_gap;

    trace_lb_ = std::max(trace_lb_, tree_.global_lower_bound());
    flags.lb_update = trace_lb_ > lb_before;
    trace_.push_back({elapsed(), tree_.nodes_processed(), trace_lb_, tree_.incumbent_value()});
    if (settings_.branch_and_bound.verbose) log_node(info);
    if (out.fw) info.iterate = out.fw->iterate;
    if (auto& cb = settings_.branch_and_bound.bnb_callback) cb(tree_, &info, flags);
  }

  void log_node(const NodeInfo& info) const {
    const double ub = tree_.incumbent_value();
    const double gap = std::isfinite(ub) ? ub - trace_lb_ : kInf;
    std::printf("node %6ld depth %3d  lb %.8e  ub %.8e  gap %.3e  lmo %7ld  t %.3fs\n", info.id,
                info.depth, trace_lb_, ub, gap, lmo_->call_count(), elapsed());
  }

  Outcome evaluate(BnBNode& node, NodeInfo& info) {
    Outcome out;
    if (!node.local_bounds.consistent())
      throw SolverError(ErrorKind::NodeInfeasible, "crossed node bounds");
    apply_node_bounds(*lmo_, global_, node.local_bounds);
    const bool dicg = fw_settings_.variant == FWVariant::DICG;
    const double eps = node_epsilon(tol_, node.depth);

    std::optional<ActiveSet> as;
    Vector dicg_start;
    if (auto* a = std::get_if<ActiveSet>(&node.start)) {
      as = std::move(*a);
    } else if (auto* v = std::get_if<Vector>(&node.start)) {
      dicg_start = *v;
    } else {
      as = ActiveSet(lmo_->compute_extreme_point(std::get<GradientStart>(node.start).gradient));
    }
    if (!as) as = ActiveSet(lmo_->compute_extreme_point(dicg_start.empty() ? Vector(dim_, 1.0) : gradient_at(dicg_start)));
    if (dicg && dicg_start.empty()) dicg_start = as->iterate();

    if (problem_.domain_oracle) {
      const Vector x = dicg ? dicg_start : as->iterate();
      if (!problem_.domain_oracle(x)) {
        if (!problem_.domain_point)
          throw SolverError(ErrorKind::NodeInfeasible, "start point outside the domain");
        const auto [lo, hi] = dense_bounds();
        const auto point = problem_.domain_point(lo, hi);
        if (!point) throw SolverError(ErrorKind::NodeInfeasible, "no domain point under the node bounds");
        as = project_into_domain(*lmo_, *point, problem_.domain_oracle, std::move(*as), tol_.max_fw_iter);
        dicg_start = as->iterate();
      }
    }

    IterationCallback cb;
    if (settings_.branch_and_bound.premature_stop) {
      const double parent_lb = node.lower_bound;
      const int k = settings_.branch_and_bound.premature_stop_k;
      cb = [this, parent_lb, k](const IterationState& st) {
        if (!std::isfinite(st.lower_bound)) return true;
        return !premature_stop_check(tree_, std::max(parent_lb, st.lower_bound), k);
      };
    }
    FWResult res = run_fw(fw_settings(eps), *as, dicg_start, &node.shadow_pool, cb);
    double node_lb = std::max(node.lower_bound, res.lower_bound);
    info.lower_bound = node_lb;
    info.primal = res.primal;
    info.fw_gap = res.fw_gap;
    if (res.status == FWStatus::DomainFailure) {
      tree_.add_unresolved(node_lb);
      out.lower_bound = node_lb;
      out.fw = std::move(res);
      return out;
    }
    offer_result(res);

    HeuristicContext ctx{res.iterate, int_vars_, *lmo_, problem_.objective, problem_.gradient,
                         problem_.hyperplane ? &*problem_.hyperplane : nullptr, rng_};
    for (const HeuristicCandidate& c : run_heuristics(settings_.heuristic, ctx)) consider(c.point, c.name);

    auto closed = [&] {
      return tree_.has_incumbent() && node_lb >= tree_.incumbent_value() - tol_.abs_gap;
    };
    auto finalize = [&](FWResult r) {
      info.lower_bound = node_lb;
      out.lower_bound = node_lb;
      out.fw = std::move(r);
      return out;
    };
    if (tol_.min_lower_bound && node_lb > *tol_.min_lower_bound) return finalize(std::move(res));
    if (closed()) return finalize(std::move(res));

    Vector grad = gradient_at(res.iterate);
    auto var = select_branching_variable(settings_.branch_and_bound.branching, res.iterate, grad, int_vars_);
    if (!var) {
      // Integral iterate whose bound has not closed: tighten once at eps_min.
      FWResult again = run_fw(fw_settings(tol_.fw_epsilon_min),
                              res.active_set ? *res.active_set : *as, res.iterate, &node.shadow_pool, {});
      if (again.status != FWStatus::DomainFailure) {
        node_lb = std::max(node_lb, again.lower_bound);
        info.primal = again.primal;
        info.fw_gap = again.fw_gap;
        offer_result(again);
        res = std::move(again);
      }
      if (closed()) return finalize(std::move(res));
      grad = gradient_at(res.iterate);
      var = select_branching_variable(settings_.branch_and_bound.branching, res.iterate, grad, int_vars_);
      if (!var) {
        tree_.add_unresolved(node_lb);
        return finalize(std::move(res));
      }
    }

    info.lower_bound = node_lb;
    info.iterate = res.iterate;
    if (auto& bcb = settings_.branch_and_bound.branch_callback; bcb && !bcb(tree_, info)) {
      tree_.add_unresolved(node_lb);
      return finalize(std::move(res));
    }
    branch(node, res, *var, grad, node_lb);
    return finalize(std::move(res));
  }

  void branch(BnBNode& node, const FWResult& res, std::size_t var, const Vector& grad, double node_lb) {
    const double value = res.iterate[var];
    const double fl = std::floor(value);
    const double ce = fl + 1.0;
    NodeStart left_start = GradientStart{grad}, right_start = GradientStart{grad};
    if (res.active_set) {
      try {
        auto [l, r] = res.active_set->split(var, fl, ce);
        left_start = std::move(l);
        right_start = std::move(r);
      } catch (const SolverError& e) {
        if (e.kind() != ErrorKind::SplitInfeasible) throw;
      }
    }
    const double tol = kIntegralityTol;
    BnBNode left, right;
    left.id = tree_.next_id();
    right.id = tree_.next_id();
    left.depth = right.depth = node.depth + 1;
    left.local_bounds = node.local_bounds.tightened(var, fl, BoundSense::LessThan);
    right.local_bounds = node.local_bounds.tightened(var, ce, BoundSense::GreaterThan);
    left.start = std::move(left_start);
    right.start = std::move(right_start);
    left.shadow_pool = node.shadow_pool;
    right.shadow_pool = std::move(node.shadow_pool);
    left.shadow_pool.filter([&](const Vector& v) { return v[var] <= fl + tol; });
    right.shadow_pool.filter([&](const Vector& v) { return v[var] >= ce - tol; });
    left.lower_bound = right.lower_bound = node_lb;
    tree_.push(std::move(left));
    tree_.push(std::move(right));
  }

  void postprocess() {
    if (!tree_.has_incumbent() || int_vars_.size() >= dim_) return;
    IntegerBounds fixed(int_vars_);
    const Vector incumbent = *tree_.incumbent();
    for (std::size_t var : int_vars_) {
      fixed.set(var, std::round(incumbent[var]), BoundSense::GreaterThan);
      fixed.set(var, std::round(incumbent[var]), BoundSense::LessThan);
    }
    try {
      apply_node_bounds(*lmo_, global_, fixed);
      const Vector start = lmo_->compute_extreme_point(gradient_at(incumbent));
      FWSettings s = fw_settings(tol_.fw_epsilon_min);
      s.time_limit_s.reset();
      const ActiveSet as(start);
      FWResult r = run_fw(s, as, start, nullptr, {});
      if (r.status != FWStatus::DomainFailure) {
        const long before = trace_.empty() ? 0 : trace_.back().nodes;
        postprocessed_improved_ = consider(r.iterate, "postprocessing");
        if (postprocessed_improved_)
          trace_.push_back({elapsed(), before, trace_lb_, tree_.incumbent_value()});
      }
    } catch (const SolverError& e) {
      if (!is_prunable(e.kind())) throw;
    }
  }

  SolveOutput finish() {
    if (lmo_) {
      try {
        apply_node_bounds(*lmo_, global_, IntegerBounds(int_vars_));
      } catch (const SolverError& e) {
        if (!is_prunable(e.kind())) throw;
      }
    }
    SolveOutput out;
    out.x = tree_.incumbent();
    out.lmo = lmo_;
    SolveResult& r = out.result;
    r.status = tree_.stage();
    r.message = tree_.message();
    r.primal = tree_.incumbent_value();
    r.dual_bound = std::max(trace_lb_, tree_.global_lower_bound());
    if (r.status == SolvingStage::Infeasible) r.dual_bound = kInf;
    r.nodes = tree_.nodes_processed();
    r.lmo_calls = lmo_ ? lmo_->call_count() : 0;
    r.fw_iterations = fw_iterations_;
    r.time_s = elapsed();
    r.postprocessed_improved = postprocessed_improved_;
    r.trace = std::move(trace_);
    return out;
  }

  const Problem& problem_;
  const Settings& settings_;
  const Tolerances& tol_;
  Tree tree_;
  Rng rng_;
  Clock::time_point start_;
  std::shared_ptr<TimeTrackingLMO> lmo_;
  std::size_t dim_ = 0;
  std::vector<std::size_t> int_vars_;
  IntegerBounds global_;
  FWSettings fw_settings_;
  double trace_lb_ = -kInf;
  std::vector<TraceRow> trace_;
  long fw_iterations_ = 0;
  bool postprocessed_improved_ = false;
};

}  // namespace

SolveOutput solve(const Problem& problem, const Settings& settings) {
  return Driver(problem, settings).run();
}

}  // namespace fwbb
