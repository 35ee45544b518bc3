#include "fwbb/lmo.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fwbb/errors.hpp"

namespace fwbb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_infeasibility(ErrorKind kind) {
  return kind == ErrorKind::BudgetInfeasible || kind == ErrorKind::AssignmentInfeasible ||
         kind == ErrorKind::UnreachableDemand || kind == ErrorKind::NodeInfeasible;
}

}  // namespace

void check_direction(std::span<const double> direction, std::size_t dimension) {
  if (direction.size() != dimension)
    throw SolverError(ErrorKind::InvalidArgument,
                      "direction has length " + std::to_string(direction.size()) + ", expected " +
                          std::to_string(dimension));
  for (double d : direction)
    if (std::isnan(d)) throw SolverError(ErrorKind::InvalidArgument, "direction contains NaN");
}

bool SelfManagedLMO::build_lmo_correct(const IntegerBounds& node_bounds,
                                       const IntegerBounds& global_bounds) const {
  for (std::size_t var : get_integer_variables()) {
    for (BoundSense sense : {BoundSense::GreaterThan, BoundSense::LessThan}) {
      auto target = node_bounds.get(var, sense);
      if (!target) target = global_bounds.get(var, sense);
      if (!target) continue;
      if (get_bound(var, sense) != *target) return false;
      // Branched bounds may never be looser than the global ones.
      if (auto global = global_bounds.get(var, sense)) {
        if (sense == BoundSense::GreaterThan && *target < *global) return false;
        if (sense == BoundSense::LessThan && *target > *global) return false;
      }
    }
  }
  return true;
}

Vector SelfManagedLMO::compute_inface_extreme_point(std::span<const double>, std::span<const double>) {
  throw SolverError(ErrorKind::InvalidArgument, "oracle has no in-face extreme point oracle");
}

double SelfManagedLMO::dicg_maximum_step(std::span<const double>, std::span<const double>) const {
  throw SolverError(ErrorKind::InvalidArgument, "oracle has no maximum-step oracle");
}

Vector BoundedLMO::bounded_compute_inface_extreme_point(std::span<const double>, std::span<const double>,
                                                        std::span<const double>, std::span<const double>,
                                                        std::span<const std::size_t>) {
  throw SolverError(ErrorKind::InvalidArgument, "oracle has no in-face extreme point oracle");
}

double BoundedLMO::bounded_dicg_maximum_step(std::span<const double>, std::span<const double>,
                                             std::span<const double>, std::span<const double>,
                                             std::span<const std::size_t>) const {
  throw SolverError(ErrorKind::InvalidArgument, "oracle has no maximum-step oracle");
}

namespace {

struct MergedBounds {
  std::vector<std::size_t> vars;
  Vector lower;
  Vector upper;
};

MergedBounds merge(const IntegerBounds& node, const IntegerBounds& global) {
  MergedBounds m;
  m.vars = global.integer_vars().empty() ? node.integer_vars() : global.integer_vars();
  m.lower.reserve(m.vars.size());
  m.upper.reserve(m.vars.size());
  for (std::size_t var : m.vars) {
    auto lo = node.lower(var);
    if (!lo) lo = global.lower(var);
    auto hi = node.upper(var);
    if (!hi) hi = global.upper(var);
    const double l = lo.value_or(-kInf);
    const double u = hi.value_or(kInf);
    if (l > u)
      throw SolverError(ErrorKind::NodeInfeasible,
                        "crossed bounds on variable " + std::to_string(var));
    m.lower.push_back(l);
    m.upper.push_back(u);
  }
  return m;
}

void check_vertex(std::span<const double> v, const MergedBounds& m, std::size_t dimension) {
  if (v.size() != dimension)
    throw SolverError(ErrorKind::ContractViolation, "oracle returned a vertex of wrong length");
  for (std::size_t k = 0; k < m.vars.size(); ++k) {
    const double value = v[m.vars[k]];
    if (!is_integral(value) || value < m.lower[k] - kIntegralityTol ||
        value > m.upper[k] + kIntegralityTol)
      throw SolverError(ErrorKind::ContractViolation,
                        "oracle vertex violates integrality/bounds on variable " +
                            std::to_string(m.vars[k]));
  }
}

}  // namespace

Vector managed_compute_extreme_point(BoundedLMO& lmo, const IntegerBounds& node_bounds,
                                     const IntegerBounds& global_bounds,
                                     std::span<const double> direction) {
  check_direction(direction, lmo.dimension());
  const MergedBounds m = merge(node_bounds, global_bounds);
  Vector v;
  try {
    v = lmo.bounded_compute_extreme_point(direction, m.lower, m.upper, m.vars);
  } catch (const SolverError& e) {
    if (is_infeasibility(e.kind())) throw SolverError(ErrorKind::OracleFailure, e.what());
    throw;
  }
  check_vertex(v, m, lmo.dimension());
  return v;
}

ManagedLMO::ManagedLMO(std::shared_ptr<BoundedLMO> inner, std::span<const double> lower_bounds,
                       std::span<const double> upper_bounds, std::vector<std::size_t> int_vars)
    : inner_(std::move(inner)),
      global_(lower_bounds, upper_bounds, int_vars),
      node_(int_vars) {
  for (std::size_t var : int_vars)
    if (var >= inner_->dimension())
      throw SolverError(ErrorKind::InvalidArgument, "integer variable out of range");
}

Vector ManagedLMO::compute_extreme_point(std::span<const double> direction) {
  return managed_compute_extreme_point(*inner_, node_, global_, direction);
}

IntegerBounds ManagedLMO::build_global_bounds(const std::vector<std::size_t>&) const {
  return global_;
}

double ManagedLMO::get_bound(std::size_t idx, BoundSense sense) const {
  if (auto b = node_.get(idx, sense)) return *b;
  if (auto b = global_.get(idx, sense)) return *b;
  return sense == BoundSense::GreaterThan ? -kInf : kInf;
}

std::vector<std::size_t> ManagedLMO::get_lower_bound_list() const { return global_.integer_vars(); }
std::vector<std::size_t> ManagedLMO::get_upper_bound_list() const { return global_.integer_vars(); }
std::vector<std::size_t> ManagedLMO::get_integer_variables() const { return global_.integer_vars(); }

void ManagedLMO::set_bound(std::size_t idx, double value, BoundSense sense) {
  node_.set(idx, value, sense);
}

void ManagedLMO::delete_bounds(std::span<const BoundUpdate> cons_delete) {
  for (const auto& [idx, sense] : cons_delete) node_.erase(idx, sense);
}

bool ManagedLMO::is_linear_feasible(std::span<const double> point) const {
  if (point.size() != dimension()) return false;
  for (std::size_t var : global_.integer_vars()) {
    if (point[var] < get_bound(var, BoundSense::GreaterThan) - kAtol) return false;
    if (point[var] > get_bound(var, BoundSense::LessThan) + kAtol) return false;
  }
  return inner_->is_simple_linear_feasible(point);
}

std::pair<Vector, Vector> ManagedLMO::merged_dense() const {
  MergedBounds m = merge(node_, global_);
  return {std::move(m.lower), std::move(m.upper)};
}

Vector ManagedLMO::compute_inface_extreme_point(std::span<const double> direction,
                                                std::span<const double> x) {
  check_direction(direction, dimension());
  const MergedBounds m = merge(node_, global_);
  Vector v = inner_->bounded_compute_inface_extreme_point(direction, x, m.lower, m.upper, m.vars);
  check_vertex(v, m, dimension());
  return v;
}

double ManagedLMO::dicg_maximum_step(std::span<const double> direction,
                                     std::span<const double> x) const {
  const MergedBounds m = merge(node_, global_);
  return inner_->bounded_dicg_maximum_step(direction, x, m.lower, m.upper, m.vars);
}

TimeTrackingLMO::TimeTrackingLMO(std::shared_ptr<SelfManagedLMO> inner) : inner_(std::move(inner)) {}

Vector TimeTrackingLMO::compute_extreme_point(std::span<const double> direction) {
  const auto start = std::chrono::steady_clock::now();
  Vector v = inner_->compute_extreme_point(direction);
  total_time_s_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ++call_count_;
  return v;
}

Vector TimeTrackingLMO::compute_inface_extreme_point(std::span<const double> direction,
                                                     std::span<const double> x) {
  const auto start = std::chrono::steady_clock::now();
  Vector v = inner_->compute_inface_extreme_point(direction, x);
  total_time_s_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ++inface_calls_;
  return v;
}

void apply_node_bounds(SelfManagedLMO& lmo, const IntegerBounds& global_bounds,
                       const IntegerBounds& node_bounds) {
  std::vector<BoundUpdate> deletions;
  for (BoundSense sense : {BoundSense::GreaterThan, BoundSense::LessThan}) {
    const auto listed = sense == BoundSense::GreaterThan ? lmo.get_lower_bound_list()
                                                         : lmo.get_upper_bound_list();
    for (std::size_t var : listed) {
      if (node_bounds.get(var, sense)) continue;
      const auto global = global_bounds.get(var, sense);
      if (global && lmo.get_bound(var, sense) != *global) deletions.emplace_back(var, sense);
    }
  }
  lmo.delete_bounds(deletions);
  for (const auto& [var, value] : node_bounds.lower_map())
    if (lmo.get_bound(var, BoundSense::GreaterThan) != value)
      lmo.set_bound(var, value, BoundSense::GreaterThan);
  for (const auto& [var, value] : node_bounds.upper_map())
    if (lmo.get_bound(var, BoundSense::LessThan) != value)
      lmo.set_bound(var, value, BoundSense::LessThan);
  if (!lmo.build_lmo_correct(node_bounds, global_bounds))
    throw SolverError(ErrorKind::OracleFailure, "oracle bounds disagree with the node after rebuild");
}

}  // namespace fwbb
