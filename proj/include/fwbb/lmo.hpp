#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "fwbb/core.hpp"

namespace fwbb {

/// Returns a vertex minimising <direction, v> over the oracle's current region.
class LinearMinimizationOracle {
 public:
  virtual ~LinearMinimizationOracle() = default;
  virtual std::size_t dimension() const = 0;
  virtual Vector compute_extreme_point(std::span<const double> direction) = 0;
};

/// Throws InvalidArgument on NaN entries or a length mismatch.
void check_direction(std::span<const double> direction, std::size_t dimension);

using BoundUpdate = std::pair<std::size_t, BoundSense>;

/// Oracle that owns its node bounds (the "full interface" pathway).
///
/// Bound indices are variable indices. After any sequence of set_bound /
/// delete_bounds, compute_extreme_point respects exactly the stored bounds.
class SelfManagedLMO : public LinearMinimizationOracle {
 public:
  virtual IntegerBounds build_global_bounds(const std::vector<std::size_t>& integer_vars) const = 0;
  virtual double get_bound(std::size_t idx, BoundSense sense) const = 0;
  virtual std::vector<std::size_t> get_lower_bound_list() const = 0;
  virtual std::vector<std::size_t> get_upper_bound_list() const = 0;
  virtual std::vector<std::size_t> get_integer_variables() const = 0;
  virtual void set_bound(std::size_t idx, double value, BoundSense sense) = 0;
  /// Resets the listed bounds to their global values.
  virtual void delete_bounds(std::span<const BoundUpdate> cons_delete) = 0;
  virtual bool is_linear_feasible(std::span<const double> point) const = 0;

  /// True when the stored bounds agree with `node_bounds` (and global bounds elsewhere).
  virtual bool build_lmo_correct(const IntegerBounds& node_bounds,
                                 const IntegerBounds& global_bounds) const;

  /// DICG support: in-face extreme point over the minimal face containing x,
  /// and the largest gamma in [0, 1] keeping x - gamma * d feasible.
  virtual bool has_inface_oracles() const { return false; }
  virtual Vector compute_inface_extreme_point(std::span<const double> direction,
                                              std::span<const double> x);
  virtual double dicg_maximum_step(std::span<const double> direction,
                                   std::span<const double> x) const;
};

/// Oracle whose bound management is left to the framework: it only needs to
/// solve the bounded linear problem and check the non-bound constraints.
class BoundedLMO {
 public:
  virtual ~BoundedLMO() = default;
  virtual std::size_t dimension() const = 0;
  /// lower[k] / upper[k] are the bounds of int_vars[k].
  virtual Vector bounded_compute_extreme_point(std::span<const double> direction,
                                               std::span<const double> lower,
                                               std::span<const double> upper,
                                               std::span<const std::size_t> int_vars) = 0;
  virtual bool is_simple_linear_feasible(std::span<const double> point) const = 0;

  virtual bool has_inface_oracles() const { return false; }
  virtual Vector bounded_compute_inface_extreme_point(std::span<const double> direction,
                                                      std::span<const double> x,
                                                      std::span<const double> lower,
                                                      std::span<const double> upper,
                                                      std::span<const std::size_t> int_vars);
  virtual double bounded_dicg_maximum_step(std::span<const double> direction,
                                           std::span<const double> x,
                                           std::span<const double> lower,
                                           std::span<const double> upper,
                                           std::span<const std::size_t> int_vars) const;
};

/// Merges node bounds over global bounds (node wins), rejects crossed bounds
/// with NodeInfeasible, delegates to the bounded oracle and checks the result
/// is integral and within the merged bounds (OracleFailure otherwise).
Vector managed_compute_extreme_point(BoundedLMO& lmo, const IntegerBounds& node_bounds,
                                     const IntegerBounds& global_bounds,
                                     std::span<const double> direction);

/// Framework-managed pathway: wraps a BoundedLMO and keeps the node bounds itself.
class ManagedLMO final : public SelfManagedLMO {
 public:
  ManagedLMO(std::shared_ptr<BoundedLMO> inner, std::span<const double> lower_bounds,
             std::span<const double> upper_bounds, std::vector<std::size_t> int_vars);

  std::size_t dimension() const override { return inner_->dimension(); }
  Vector compute_extreme_point(std::span<const double> direction) override;

  IntegerBounds build_global_bounds(const std::vector<std::size_t>& integer_vars) const override;
  double get_bound(std::size_t idx, BoundSense sense) const override;
  std::vector<std::size_t> get_lower_bound_list() const override;
  std::vector<std::size_t> get_upper_bound_list() const override;
  std::vector<std::size_t> get_integer_variables() const override;
  void set_bound(std::size_t idx, double value, BoundSense sense) override;
  void delete_bounds(std::span<const BoundUpdate> cons_delete) override;
  bool is_linear_feasible(std::span<const double> point) const override;

  bool has_inface_oracles() const override { return inner_->has_inface_oracles(); }
  Vector compute_inface_extreme_point(std::span<const double> direction,
                                      std::span<const double> x) override;
  double dicg_maximum_step(std::span<const double> direction,
                           std::span<const double> x) const override;

  BoundedLMO& inner() { return *inner_; }
  const IntegerBounds& node_bounds() const { return node_; }
  const IntegerBounds& global_bounds() const { return global_; }

 private:
  std::pair<Vector, Vector> merged_dense() const;

  std::shared_ptr<BoundedLMO> inner_;
  IntegerBounds global_;
  IntegerBounds node_;
};

/// Transparent wrapper counting and timing extreme-point computations.
class TimeTrackingLMO final : public SelfManagedLMO {
 public:
  explicit TimeTrackingLMO(std::shared_ptr<SelfManagedLMO> inner);

  std::size_t dimension() const override { return inner_->dimension(); }
  Vector compute_extreme_point(std::span<const double> direction) override;

  IntegerBounds build_global_bounds(const std::vector<std::size_t>& integer_vars) const override {
    return inner_->build_global_bounds(integer_vars);
  }
  double get_bound(std::size_t idx, BoundSense sense) const override {
    return inner_->get_bound(idx, sense);
  }
  std::vector<std::size_t> get_lower_bound_list() const override {
    return inner_->get_lower_bound_list();
  }
  std::vector<std::size_t> get_upper_bound_list() const override {
    return inner_->get_upper_bound_list();
  }
  std::vector<std::size_t> get_integer_variables() const override {
    return inner_->get_integer_variables();
  }
  void set_bound(std::size_t idx, double value, BoundSense sense) override {
    inner_->set_bound(idx, value, sense);
  }
  void delete_bounds(std::span<const BoundUpdate> cons_delete) override {
    inner_->delete_bounds(cons_delete);
  }
  bool is_linear_feasible(std::span<const double> point) const override {
    return inner_->is_linear_feasible(point);
  }
  bool build_lmo_correct(const IntegerBounds& node_bounds,
                         const IntegerBounds& global_bounds) const override {
    return inner_->build_lmo_correct(node_bounds, global_bounds);
  }
  bool has_inface_oracles() const override { return inner_->has_inface_oracles(); }
  Vector compute_inface_extreme_point(std::span<const double> direction,
                                      std::span<const double> x) override;
  double dicg_maximum_step(std::span<const double> direction,
                           std::span<const double> x) const override {
    return inner_->dicg_maximum_step(direction, x);
  }

  long call_count() const { return call_count_; }
  long inface_call_count() const { return inface_calls_; }
  double total_time_s() const { return total_time_s_; }
  SelfManagedLMO& inner() { return *inner_; }

 private:
  std::shared_ptr<SelfManagedLMO> inner_;
  long call_count_ = 0;
  long inface_calls_ = 0;
  double total_time_s_ = 0.0;
};

/// Brings a self-managed oracle from whatever state it is in to the bounds of
/// a node: bounds without a node override are reset to their global value,
/// node bounds are then set. Throws OracleFailure if build_lmo_correct fails.
void apply_node_bounds(SelfManagedLMO& lmo, const IntegerBounds& global_bounds,
                       const IntegerBounds& node_bounds);

}  // namespace fwbb
