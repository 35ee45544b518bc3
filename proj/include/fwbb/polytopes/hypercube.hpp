#pragma once

#include "fwbb/lmo.hpp"

namespace fwbb {

/// Axis-aligned box [lower, upper]; the unit cube by default.
class HypercubeLMO final : public BoundedLMO {
 public:
  explicit HypercubeLMO(std::size_t dim);
  HypercubeLMO(Vector lower, Vector upper);

  std::size_t dimension() const override { return lower_.size(); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  /// Unrestricted extreme point of the box (ties d_i == 0 go to the lower bound).
  Vector compute_extreme_point(std::span<const double> direction) const;

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

 private:
  std::pair<Vector, Vector> effective_box(std::span<const double> lower,
                                          std::span<const double> upper,
                                          std::span<const std::size_t> int_vars) const;

  Vector lower_;
  Vector upper_;
};

}  // namespace fwbb
