#pragma once

#include <utility>

#include "fwbb/lmo.hpp"

namespace fwbb {

/// Birkhoff polytope of n x n doubly stochastic matrices with integer (0/1)
/// bounds on every entry, managing its own node bounds.
///
/// Variables are the matrix entries in column-major order: linear index
/// idx = col * n + row (0-based).
class BirkhoffLMO final : public SelfManagedLMO {
 public:
  explicit BirkhoffLMO(std::size_t n, double atol = 1e-9, double rtol = 1e-9);

  std::size_t n() const { return n_; }
  std::size_t dimension() const override { return n_ * n_; }

  static std::pair<std::size_t, std::size_t> decode(std::size_t idx, std::size_t n) {
    return {idx % n, idx / n};
  }
  static std::size_t encode(std::size_t row, std::size_t col, std::size_t n) {
    return col * n + row;
  }

  /// Permutation matrix minimising <D, X> under the stored bounds.
  /// Throws AssignmentInfeasible when the bounds admit no permutation.
  Vector compute_extreme_point(std::span<const double> direction) override;

  IntegerBounds build_global_bounds(const std::vector<std::size_t>& integer_vars) const override;
  double get_bound(std::size_t idx, BoundSense sense) const override;
  std::vector<std::size_t> get_lower_bound_list() const override;
  std::vector<std::size_t> get_upper_bound_list() const override;
  std::vector<std::size_t> get_integer_variables() const override;
  void set_bound(std::size_t idx, double value, BoundSense sense) override;
  void delete_bounds(std::span<const BoundUpdate> cons_delete) override;
  bool is_linear_feasible(std::span<const double> point) const override;

  bool has_inface_oracles() const override { return true; }
  /// Extreme point on the minimal face containing x: entries of x at 1 are
  /// forced, entries at 0 forbidden.
  Vector compute_inface_extreme_point(std::span<const double> direction,
                                      std::span<const double> x) override;
  /// Largest gamma in [0, 1] with x - gamma * d inside [0, 1] entry-wise;
  /// 0 when d pushes an entry already on the boundary outward.
  double dicg_maximum_step(std::span<const double> direction,
                           std::span<const double> x) const override;

  const Vector& lower_bounds() const { return lower_; }
  const Vector& upper_bounds() const { return upper_; }
  const std::vector<std::size_t>& fixed_to_one_rows() const { return fixed_rows_; }
  const std::vector<std::size_t>& fixed_to_one_cols() const { return fixed_cols_; }
  const std::vector<std::size_t>& index_map_rows() const { return map_rows_; }
  const std::vector<std::size_t>& index_map_cols() const { return map_cols_; }
  bool updated_lmo() const { return updated_lmo_; }

 private:
  void resync_fixings();
  void rebuild_index_maps();
  Vector solve_restricted(std::span<const double> direction,
                          std::span<const std::pair<std::size_t, std::size_t>> forced,
                          std::span<const double> face_point) const;

  std::size_t n_;
  double atol_;
  double rtol_;
  Vector lower_;
  Vector upper_;
  std::vector<std::size_t> fixed_rows_;
  std::vector<std::size_t> fixed_cols_;
  std::vector<std::size_t> map_rows_;
  std::vector<std::size_t> map_cols_;
  bool updated_lmo_ = false;
};

}  // namespace fwbb
