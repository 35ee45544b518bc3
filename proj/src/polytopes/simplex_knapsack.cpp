#include "fwbb/polytopes/simplex_knapsack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fwbb/errors.hpp"
#include "fwbb/kernels.hpp"

namespace fwbb {

Vector knapsack_extreme_point(std::span<const double> direction, double budget,
                              std::span<const double> lower, std::span<const double> upper) {
  const std::size_t m = direction.size();
  if (lower.size() != m || upper.size() != m)
    throw SolverError(ErrorKind::InvalidArgument, "knapsack bounds of wrong length");
  const double lo_sum = kernels::compensated_sum(lower);
  const double hi_sum = kernels::compensated_sum(upper);
  const double slack = kAtol * std::max(1.0, std::abs(budget));
  if (lo_sum > budget + slack || hi_sum < budget - slack)
    throw SolverError(ErrorKind::BudgetInfeasible, "budget outside [sum(lower), sum(upper)]");

  Vector x(lower.begin(), lower.end());
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return direction[a] < direction[b]; });
  double remaining = budget - lo_sum;
  for (std::size_t i : order) {
    if (remaining <= 0.0) break;
    const double room = upper[i] - lower[i];
    if (room >= remaining) {
      x[i] = lower[i] + remaining;
      remaining = 0.0;
    } else {
      x[i] = upper[i];
      remaining -= room;
    }
  }
  return x;
}

SimplexKnapsackLMO::SimplexKnapsackLMO(double budget, Vector upper)
    : budget_(budget), upper_(std::move(upper)) {
  for (double u : upper_)
    if (!(u >= 0.0)) throw SolverError(ErrorKind::InvalidArgument, "upper bounds must be nonnegative");
  if (kernels::compensated_sum(upper_) < budget_)
    throw SolverError(ErrorKind::InvalidArgument, "sum of upper bounds below the budget");
}

std::pair<Vector, Vector> SimplexKnapsackLMO::dense_box(std::span<const double> lower,
                                                        std::span<const double> upper,
                                                        std::span<const std::size_t> int_vars) const {
  Vector lo(dimension(), 0.0), hi = upper_;
  for (std::size_t k = 0; k < int_vars.size(); ++k) {
    const std::size_t i = int_vars[k];
    lo[i] = std::max(lo[i], lower[k]);
    hi[i] = std::min(hi[i], upper[k]);
    if (lo[i] > hi[i]) throw SolverError(ErrorKind::NodeInfeasible, "crossed knapsack bounds");
  }
  return {std::move(lo), std::move(hi)};
}

Vector SimplexKnapsackLMO::bounded_compute_extreme_point(std::span<const double> direction,
                                                         std::span<const double> lower,
                                                         std::span<const double> upper,
                                                         std::span<const std::size_t> int_vars) {
  check_direction(direction, dimension());
  auto [lo, hi] = dense_box(lower, upper, int_vars);
  return knapsack_extreme_point(direction, budget_, lo, hi);
}

bool SimplexKnapsackLMO::is_simple_linear_feasible(std::span<const double> point) const {
  if (point.size() != dimension()) return false;
  for (std::size_t i = 0; i < point.size(); ++i)
    if (point[i] < -kAtol || point[i] > upper_[i] + kAtol) return false;
  return std::abs(kernels::compensated_sum(point) - budget_) <= kAtol * std::max(1.0, budget_);
}

Vector SimplexKnapsackLMO::bounded_compute_inface_extreme_point(std::span<const double> direction,
                                                                std::span<const double> x,
                                                                std::span<const double> lower,
                                                                std::span<const double> upper,
                                                                std::span<const std::size_t> int_vars) {
  check_direction(direction, dimension());
  auto [lo, hi] = dense_box(lower, upper, int_vars);
  // Coordinates on a bound are frozen; the budget constraint stays active.
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (std::abs(x[i] - lo[i]) <= kAtol)
      hi[i] = lo[i];
    else if (std::abs(x[i] - hi[i]) <= kAtol)
      lo[i] = hi[i];
  }
  return knapsack_extreme_point(direction, budget_, lo, hi);
}

double SimplexKnapsackLMO::bounded_dicg_maximum_step(std::span<const double> direction,
                                                     std::span<const double> x,
                                                     std::span<const double> lower,
                                                     std::span<const double> upper,
                                                     std::span<const std::size_t> int_vars) const {
  auto [lo, hi] = dense_box(lower, upper, int_vars);
  double gamma_max = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = direction[i];
    if (d == 0.0) continue;
    if ((d > 0.0 && std::abs(x[i] - lo[i]) <= kAtol) || (d < 0.0 && std::abs(x[i] - hi[i]) <= kAtol))
      return 0.0;
    gamma_max = d > 0.0 ? std::min(gamma_max, (x[i] - lo[i]) / d)
                        : std::min(gamma_max, (x[i] - hi[i]) / d);
  }
  return std::max(0.0, gamma_max);
}

}  // namespace fwbb
