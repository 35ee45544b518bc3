#pragma once

#include "fwbb/lmo.hpp"

namespace fwbb {

/// Scaled, truncated probability simplex {x : 0 <= x <= u, sum x = N}.
class SimplexKnapsackLMO final : public BoundedLMO {
 public:
  SimplexKnapsackLMO(double budget, Vector upper);

  std::size_t dimension() const override { return upper_.size(); }
  double budget() const { return budget_; }
  const Vector& upper() const { return upper_; }

  Vector bounded_compute_extreme_point(std::span<const double> direction,
                                       std::span<const double> lower,
                                       std::span<const double> upper,
                                       std::span<const std::size_t> int_vars) override;
  bool is_simple_linear_feasible(std::span<const double> point) const override;

  bool has_inface_oracles() const override { return true; }
  Vector bounded_compute_inface_extreme_point(std::span<const double> direction,
                                              std::span<const double> x,
                                              std::span<const double> lower,
                                              std::span<const double> upper,
                                              std::span<const std::size_t> int_vars) override;
  double bounded_dicg_maximum_step(std::span<const double> direction, std::span<const double> x,
                                   std::span<const double> lower, std::span<const double> upper,
                                   std::span<const std::size_t> int_vars) const override;

  /// Dense per-coordinate box after applying node bounds.
  std::pair<Vector, Vector> dense_box(std::span<const double> lower, std::span<const double> upper,
                                      std::span<const std::size_t> int_vars) const;

 private:
  double budget_;
  Vector upper_;
};

/// Continuous knapsack by sorting: start at `lower`, then fill coordinates in
/// ascending direction order (ties by index) up to `upper` until the budget is
/// used. Throws BudgetInfeasible unless sum(lower) <= budget <= sum(upper).
Vector knapsack_extreme_point(std::span<const double> direction, double budget,
                              std::span<const double> lower, std::span<const double> upper);

}  // namespace fwbb
