#include "fwbb/polytopes/hypercube.hpp"

#include <algorithm>
#include <cmath>

#include "fwbb/errors.hpp"

namespace fwbb {

HypercubeLMO::HypercubeLMO(std::size_t dim) : lower_(dim, 0.0), upper_(dim, 1.0) {}

HypercubeLMO::HypercubeLMO(Vector lower, Vector upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size())
    throw SolverError(ErrorKind::InvalidArgument, "box bounds of different length");
  for (std::size_t i = 0; i < lower_.size(); ++i)
    if (!(lower_[i] <= upper_[i]))
      throw SolverError(ErrorKind::InvalidArgument, "box lower bound above upper bound");
}

Vector HypercubeLMO::compute_extreme_point(std::span<const double> direction) const {
  check_direction(direction, dimension());
  Vector v(dimension());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = direction[i] < 0.0 ? upper_[i] : lower_[i];
  return v;
}

std::pair<Vector, Vector> HypercubeLMO::effective_box(std::span<const double> lower,
                                                      std::span<const double> upper,
                                                      std::span<const std::size_t> int_vars) const {
  Vector lo = lower_, hi = upper_;
  for (std::size_t k = 0; k < int_vars.size(); ++k) {
    const std::size_t i = int_vars[k];
    lo[i] = std::max(lo[i], lower[k]);
    hi[i] = std::min(hi[i], upper[k]);
    if (lo[i] > hi[i]) throw SolverError(ErrorKind::NodeInfeasible, "empty box after node bounds");
  }
  return {std::move(lo), std::move(hi)};
}

Vector HypercubeLMO::bounded_compute_extreme_point(std::span<const double> direction,
                                                   std::span<const double> lower,
                                                   std::span<const double> upper,
                                                   std::span<const std::size_t> int_vars) {
  check_direction(direction, dimension());
  auto [lo, hi] = effective_box(lower, upper, int_vars);
  Vector v(dimension());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = direction[i] < 0.0 ? hi[i] : lo[i];
  return v;
}

bool HypercubeLMO::is_simple_linear_feasible(std::span<const double> point) const {
  if (point.size() != dimension()) return false;
  for (std::size_t i = 0; i < point.size(); ++i)
    if (point[i] < lower_[i] - kAtol || point[i] > upper_[i] + kAtol) return false;
  return true;
}

Vector HypercubeLMO::bounded_compute_inface_extreme_point(std::span<const double> direction,
                                                          std::span<const double> x,
                                                          std::span<const double> lower,
                                                          std::span<const double> upper,
                                                          std::span<const std::size_t> int_vars) {
  check_direction(direction, dimension());
  auto [lo, hi] = effective_box(lower, upper, int_vars);
  Vector v(dimension());
  for (std::size_t i = 0; i < v.size(); ++i) {
    // Coordinates sitting on a bound stay there: that is the minimal face.
    if (std::abs(x[i] - lo[i]) <= kAtol)
      v[i] = lo[i];
    else if (std::abs(x[i] - hi[i]) <= kAtol)
      v[i] = hi[i];
    else
      v[i] = direction[i] < 0.0 ? hi[i] : lo[i];
  }
  return v;
}

double HypercubeLMO::bounded_dicg_maximum_step(std::span<const double> direction,
                                               std::span<const double> x,
                                               std::span<const double> lower,
                                               std::span<const double> upper,
                                               std::span<const std::size_t> int_vars) const {
  auto [lo, hi] = effective_box(lower, upper, int_vars);
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
