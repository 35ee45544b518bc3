#include "fwbb/polytopes/birkhoff.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fwbb/errors.hpp"
#include "fwbb/polytopes/hungarian.hpp"

namespace fwbb {

BirkhoffLMO::BirkhoffLMO(std::size_t n, double atol, double rtol)
    : n_(n), atol_(atol), rtol_(rtol), lower_(n * n, 0.0), upper_(n * n, 1.0) {
  if (n == 0) throw SolverError(ErrorKind::InvalidArgument, "Birkhoff dimension must be positive");
  if (n > kMaxAssignmentDim)
    throw SolverError(ErrorKind::DimensionTooLarge, "Birkhoff dimension " + std::to_string(n) +
                                                        " exceeds " +
                                                        std::to_string(kMaxAssignmentDim));
  rebuild_index_maps();
}

IntegerBounds BirkhoffLMO::build_global_bounds(const std::vector<std::size_t>&) const {
  const Vector lo(n_ * n_, 0.0), hi(n_ * n_, 1.0);
  return IntegerBounds(lo, hi, get_integer_variables());
}

double BirkhoffLMO::get_bound(std::size_t idx, BoundSense sense) const {
  if (idx >= lower_.size()) throw SolverError(ErrorKind::InvalidArgument, "bound index out of range");
  return sense == BoundSense::GreaterThan ? lower_[idx] : upper_[idx];
}

std::vector<std::size_t> BirkhoffLMO::get_integer_variables() const {
  std::vector<std::size_t> vars(n_ * n_);
  std::iota(vars.begin(), vars.end(), std::size_t{0});
  return vars;
}

std::vector<std::size_t> BirkhoffLMO::get_lower_bound_list() const { return get_integer_variables(); }
std::vector<std::size_t> BirkhoffLMO::get_upper_bound_list() const { return get_integer_variables(); }

void BirkhoffLMO::resync_fixings() {
  fixed_rows_.clear();
  fixed_cols_.clear();
  for (std::size_t idx = 0; idx < lower_.size(); ++idx) {
    if (lower_[idx] >= 1.0 - atol_) {
      const auto [r, c] = decode(idx, n_);
      fixed_rows_.push_back(r);
      fixed_cols_.push_back(c);
    }
  }
}

void BirkhoffLMO::rebuild_index_maps() {
  std::vector<char> row_fixed(n_, 0), col_fixed(n_, 0);
  for (std::size_t r : fixed_rows_) row_fixed[r] = 1;
  for (std::size_t c : fixed_cols_) col_fixed[c] = 1;
  map_rows_.clear();
  map_cols_.clear();
  for (std::size_t i = 0; i < n_; ++i) {
    if (!row_fixed[i]) map_rows_.push_back(i);
    if (!col_fixed[i]) map_cols_.push_back(i);
  }
}

void BirkhoffLMO::set_bound(std::size_t idx, double value, BoundSense sense) {
  if (sense != BoundSense::GreaterThan && sense != BoundSense::LessThan)
    throw SolverError(ErrorKind::InvalidSense,
                      "allowed values for sense are GreaterThan and LessThan");
  if (idx >= lower_.size()) throw SolverError(ErrorKind::InvalidArgument, "bound index out of range");
  if (updated_lmo_) {
    resync_fixings();
    updated_lmo_ = false;
  }
  if (sense == BoundSense::GreaterThan) {
    lower_[idx] = value;
    if (value >= 1.0 - atol_) {
      const auto [r, c] = decode(idx, n_);
      bool present = false;
      for (std::size_t k = 0; k < fixed_rows_.size(); ++k)
        present = present || (fixed_rows_[k] == r && fixed_cols_[k] == c);
      if (!present) {
        fixed_rows_.push_back(r);
        fixed_cols_.push_back(c);
      }
    }
  } else {
    upper_[idx] = value;
  }
  rebuild_index_maps();
}

void BirkhoffLMO::delete_bounds(std::span<const BoundUpdate> cons_delete) {
  for (const auto& [idx, sense] : cons_delete) {
    if (idx >= lower_.size()) throw SolverError(ErrorKind::InvalidArgument, "bound index out of range");
    if (sense == BoundSense::GreaterThan) {
      lower_[idx] = 0.0;
      const auto [r, c] = decode(idx, n_);
      for (std::size_t k = 0; k < fixed_rows_.size();) {
        if (fixed_rows_[k] == r && fixed_cols_[k] == c) {
          fixed_rows_.erase(fixed_rows_.begin() + static_cast<std::ptrdiff_t>(k));
          fixed_cols_.erase(fixed_cols_.begin() + static_cast<std::ptrdiff_t>(k));
        } else {
          ++k;
        }
      }
    } else {
      upper_[idx] = 1.0;
    }
  }
  rebuild_index_maps();
  updated_lmo_ = true;
}

bool BirkhoffLMO::is_linear_feasible(std::span<const double> point) const {
  if (point.size() != dimension()) return false;
  for (std::size_t idx = 0; idx < point.size(); ++idx)
    if (point[idx] < lower_[idx] - atol_ || point[idx] > upper_[idx] + atol_) return false;
  for (std::size_t i = 0; i < n_; ++i) {
    double row = 0.0, col = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      row += point[encode(i, j, n_)];
      col += point[encode(j, i, n_)];
    }
    if (std::abs(row - 1.0) > atol_ || std::abs(col - 1.0) > atol_) return false;
  }
  return true;
}

// Forced (row, col) pairs are taken out of the assignment; the rest is solved
// on the remaining rows/cols with entries at upper bound 0 (or at 0 in
// face_point, when given) forbidden.
Vector BirkhoffLMO::solve_restricted(std::span<const double> direction,
                                     std::span<const std::pair<std::size_t, std::size_t>> forced,
                                     std::span<const double> face_point) const {
  std::vector<char> row_used(n_, 0), col_used(n_, 0);
  Vector x(n_ * n_, 0.0);
  for (const auto& [r, c] : forced) {
    if (row_used[r] || col_used[c] || upper_[encode(r, c, n_)] < 0.5)
      throw SolverError(ErrorKind::AssignmentInfeasible,
                        "conflicting fixings at (" + std::to_string(r) + ", " + std::to_string(c) + ")");
    row_used[r] = col_used[c] = 1;
    x[encode(r, c, n_)] = 1.0;
  }
  std::vector<std::size_t> rows, cols;
  for (std::size_t i = 0; i < n_; ++i) {
    if (!row_used[i]) rows.push_back(i);
    if (!col_used[i]) cols.push_back(i);
  }
  const std::size_t m = rows.size();
  std::vector<double> cost(m * m);
  std::vector<unsigned char> forbidden(m * m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t idx = encode(rows[i], cols[j], n_);
      cost[i * m + j] = direction[idx];
      const bool face_zero = !face_point.empty() && face_point[idx] <= atol_;
      if (upper_[idx] < 0.5 || face_zero) forbidden[i * m + j] = 1;
    }
  }
  const Assignment a = hungarian(cost, m, forbidden);
  for (std::size_t i = 0; i < m; ++i) x[encode(rows[i], cols[a.col_of_row[i]], n_)] = 1.0;
  return x;
}

Vector BirkhoffLMO::compute_extreme_point(std::span<const double> direction) {
  check_direction(direction, dimension());
  std::vector<std::pair<std::size_t, std::size_t>> forced;
  for (std::size_t k = 0; k < fixed_rows_.size(); ++k) forced.emplace_back(fixed_rows_[k], fixed_cols_[k]);
  return solve_restricted(direction, forced, {});
}

Vector BirkhoffLMO::compute_inface_extreme_point(std::span<const double> direction,
                                                 std::span<const double> x) {
  check_direction(direction, dimension());
  if (x.size() != dimension()) throw SolverError(ErrorKind::InvalidArgument, "iterate of wrong length");
  std::vector<char> seen(n_ * n_, 0);
  std::vector<std::pair<std::size_t, std::size_t>> forced;
  for (std::size_t k = 0; k < fixed_rows_.size(); ++k) {
    forced.emplace_back(fixed_rows_[k], fixed_cols_[k]);
    seen[encode(fixed_rows_[k], fixed_cols_[k], n_)] = 1;
  }
  for (std::size_t idx = 0; idx < x.size(); ++idx) {
    if (!seen[idx] && x[idx] >= 1.0 - atol_) forced.push_back(decode(idx, n_));
  }
  return solve_restricted(direction, forced, x);
}

double BirkhoffLMO::dicg_maximum_step(std::span<const double> direction,
                                      std::span<const double> x) const {
  double gamma_max = 1.0;
  for (std::size_t idx = 0; idx < x.size(); ++idx) {
    const double d = direction[idx];
    const double xi = x[idx];
    if (d < 0.0 && std::abs(xi - 1.0) <= atol_ + rtol_) return 0.0;
    if (d > 0.0 && std::abs(xi) <= atol_ + rtol_) return 0.0;
    if (d > 0.0) gamma_max = std::min(gamma_max, xi / d);
    if (d < 0.0) gamma_max = std::min(gamma_max, -(1.0 - xi) / d);
  }
  return std::max(0.0, gamma_max);
}

}  // namespace fwbb
