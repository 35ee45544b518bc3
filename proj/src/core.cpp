#include "fwbb/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fwbb/errors.hpp"
#include "fwbb/kernels.hpp"

namespace fwbb {

bool is_integral(double value, double tol) { return std::abs(value - std::round(value)) <= tol; }

ActiveSet::ActiveSet(Vector vertex) {
  vertices_.push_back(std::move(vertex));
  weights_.push_back(1.0);
}

ActiveSet::ActiveSet(std::vector<Vector> vertices, std::vector<double> weights) {
  if (vertices.empty() || vertices.size() != weights.size())
    throw SolverError(ErrorKind::InvalidArgument, "active set needs matching nonempty vertex/weight lists");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw SolverError(ErrorKind::InvalidArgument, "negative active-set weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-8)
    throw SolverError(ErrorKind::InvalidArgument, "active-set weights must sum to 1");
  for (std::size_t i = 0; i < vertices.size(); ++i) add(std::move(vertices[i]), weights[i]);
  cleanup();
}

Vector ActiveSet::iterate() const {
  Vector x(dimension(), 0.0);
  for (std::size_t k = 0; k < vertices_.size(); ++k) kernels::axpy(weights_[k], vertices_[k], x);
  return x;
}

std::pair<std::size_t, std::size_t> ActiveSet::argmin_argmax(std::span<const double> direction) const {
  Vector scores(vertices_.size());
  kernels::vertex_scores(vertices_, direction, scores);
  std::size_t lo = 0, hi = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] < scores[lo]) lo = k;
    if (scores[k] > scores[hi]) hi = k;
  }
  return {lo, hi};
}

std::optional<std::size_t> ActiveSet::find(std::span<const double> v) const {
  for (std::size_t k = 0; k < vertices_.size(); ++k) {
    const Vector& u = vertices_[k];
    bool same = u.size() == v.size();
    for (std::size_t i = 0; same && i < u.size(); ++i) same = std::abs(u[i] - v[i]) <= kDuplicateTol;
    if (same) return k;
  }
  return std::nullopt;
}

std::size_t ActiveSet::add(Vector v, double weight) {
  if (!vertices_.empty() && v.size() != dimension())
    throw SolverError(ErrorKind::InvalidArgument, "vertex dimension mismatch");
  if (auto k = find(v)) {
    weights_[*k] += weight;
    return *k;
  }
  vertices_.push_back(std::move(v));
  weights_.push_back(weight);
  return vertices_.size() - 1;
}

void ActiveSet::scale_weights(double factor) {
  for (double& w : weights_) w *= factor;
}

std::vector<Vector> ActiveSet::cleanup() {
  std::vector<Vector> dropped;
  std::size_t keep = 0;
  for (std::size_t k = 0; k < vertices_.size(); ++k) {
    if (weights_[k] < kDropThreshold) {
      dropped.push_back(std::move(vertices_[k]));
    } else {
      if (keep != k) {
        vertices_[keep] = std::move(vertices_[k]);
        weights_[keep] = weights_[k];
      }
      ++keep;
    }
  }
  vertices_.resize(keep);
  weights_.resize(keep);
  if (keep == 0) throw SolverError(ErrorKind::InvalidArgument, "active set emptied by cleanup");
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  for (double& w : weights_) w /= total;
  return dropped;
}

std::vector<Vector> ActiveSet::collapse_to(std::size_t i) {
  std::vector<Vector> others;
  Vector keep = std::move(vertices_[i]);
  for (std::size_t k = 0; k < vertices_.size(); ++k)
    if (k != i) others.push_back(std::move(vertices_[k]));
  vertices_.clear();
  weights_.clear();
  vertices_.push_back(std::move(keep));
  weights_.push_back(1.0);
  return others;
}

std::pair<ActiveSet, ActiveSet> ActiveSet::split(std::size_t var, double floor_val,
                                                 double ceil_val) const {
  std::vector<Vector> lv, rv;
  std::vector<double> lw, rw;
  for (std::size_t k = 0; k < vertices_.size(); ++k) {
    const double value = vertices_[k].at(var);
    if (value <= floor_val + kIntegralityTol) {
      lv.push_back(vertices_[k]);
      lw.push_back(weights_[k]);
    } else if (value >= ceil_val - kIntegralityTol) {
      rv.push_back(vertices_[k]);
      rw.push_back(weights_[k]);
    } else {
      throw SolverError(ErrorKind::SplitInfeasible,
                        "vertex is fractional in branching variable " + std::to_string(var));
    }
  }
  if (lv.empty() || rv.empty())
    throw SolverError(ErrorKind::SplitInfeasible, "split leaves an empty side");
  auto normalise = [](std::vector<double>& w) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= total;
  };
  normalise(lw);
  normalise(rw);
  return {ActiveSet(std::move(lv), std::move(lw)), ActiveSet(std::move(rv), std::move(rw))};
}

bool ActiveSet::invariants_hold(double tol) const {
  if (vertices_.empty()) return false;
  double total = 0.0;
  for (double w : weights_) {
    if (w < 0.0) return false;
    total += w;
  }
  return std::abs(total - 1.0) <= tol;
}

IntegerBounds::IntegerBounds(std::vector<std::size_t> integer_vars)
    : integer_vars_(std::move(integer_vars)) {
  std::sort(integer_vars_.begin(), integer_vars_.end());
  integer_vars_.erase(std::unique(integer_vars_.begin(), integer_vars_.end()), integer_vars_.end());
}

IntegerBounds::IntegerBounds(std::span<const double> lower, std::span<const double> upper,
                             std::vector<std::size_t> integer_vars)
    : IntegerBounds(integer_vars) {
  if (lower.size() != integer_vars.size() || upper.size() != integer_vars.size())
    throw SolverError(ErrorKind::InvalidArgument, "dense bounds must match the integer variables");
  for (std::size_t k = 0; k < integer_vars.size(); ++k) {
    lower_[integer_vars[k]] = lower[k];
    upper_[integer_vars[k]] = upper[k];
  }
}

bool IntegerBounds::is_integer(std::size_t var) const {
  return std::binary_search(integer_vars_.begin(), integer_vars_.end(), var);
}

void IntegerBounds::set(std::size_t var, double value, BoundSense sense) {
  if (!is_integer(var))
    throw SolverError(ErrorKind::InvalidArgument,
                      "bound on non-integer variable " + std::to_string(var));
  (sense == BoundSense::GreaterThan ? lower_ : upper_)[var] = value;
}

void IntegerBounds::erase(std::size_t var, BoundSense sense) {
  (sense == BoundSense::GreaterThan ? lower_ : upper_).erase(var);
}

std::optional<double> IntegerBounds::lower(std::size_t var) const {
  auto it = lower_.find(var);
  return it == lower_.end() ? std::nullopt : std::optional<double>(it->second);
}

std::optional<double> IntegerBounds::upper(std::size_t var) const {
  auto it = upper_.find(var);
  return it == upper_.end() ? std::nullopt : std::optional<double>(it->second);
}

std::optional<double> IntegerBounds::get(std::size_t var, BoundSense sense) const {
  return sense == BoundSense::GreaterThan ? lower(var) : upper(var);
}

IntegerBounds IntegerBounds::tightened(std::size_t var, double value, BoundSense sense) const {
  IntegerBounds child = *this;
  const auto current = get(var, sense);
  if (sense == BoundSense::GreaterThan)
    child.set(var, current ? std::max(*current, value) : value, sense);
  else
    child.set(var, current ? std::min(*current, value) : value, sense);
  return child;
}

bool IntegerBounds::consistent() const {
  for (const auto& [var, lo] : lower_) {
    auto it = upper_.find(var);
    if (it != upper_.end() && lo > it->second) return false;
  }
  return true;
}

void Tolerances::validate() const {
  auto fail = [](const char* what) { throw SolverError(ErrorKind::InvalidArgument, what); };
  if (!(fw_gap_decay > 0.0 && fw_gap_decay < 1.0)) fail("fw_gap_decay must lie in (0, 1)");
  if (!(fw_epsilon_min <= fw_epsilon_start)) fail("fw_epsilon_min must not exceed fw_epsilon_start");
  if (!(fw_epsilon_min > 0.0)) fail("fw_epsilon_min must be positive");
  if (!(abs_gap > 0.0)) fail("abs_gap must be positive");
  if (!(rel_gap >= 0.0)) fail("rel_gap must be nonnegative");
  if (max_fw_iter < 1) fail("max_fw_iter must be at least 1");
}

double node_epsilon(const Tolerances& tol, int depth) {
  // Repeated multiplication (rather than pow) keeps the schedule on the
  // decimal grid, e.g. 1e-2 * 0.8 * 0.8 == 6.4e-3.
  double eps = tol.fw_epsilon_start;
  for (int d = 0; d < depth && eps > tol.fw_epsilon_min; ++d) eps *= tol.fw_gap_decay;
  return std::max(tol.fw_epsilon_min, eps);
}

}  // namespace fwbb
