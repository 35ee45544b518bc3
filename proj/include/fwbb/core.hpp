#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace fwbb {

using Vector = std::vector<double>;

/// Default absolute tolerance for float comparisons.
inline constexpr double kAtol = 1e-9;
/// Integrality tolerance for integer variables.
inline constexpr double kIntegralityTol = 1e-6;

bool is_integral(double value, double tol = kIntegralityTol);

/// Convex combination of vertices: the representation of a Frank-Wolfe iterate.
///
/// Weights below kDropThreshold are removed (and the rest renormalised) by
/// cleanup(); inserting a vertex that coincides with a stored one (within
/// kDuplicateTol per coordinate) merges the weights.
class ActiveSet {
 public:
  static constexpr double kDropThreshold = 1e-12;
  static constexpr double kDuplicateTol = 1e-9;

  ActiveSet() = default;
  explicit ActiveSet(Vector vertex);
  /// Weights must be nonnegative and sum to 1 (within 1e-8); they are renormalised.
  ActiveSet(std::vector<Vector> vertices, std::vector<double> weights);

  std::size_t size() const { return vertices_.size(); }
  bool empty() const { return vertices_.empty(); }
  std::size_t dimension() const { return vertices_.empty() ? 0 : vertices_.front().size(); }

  const Vector& vertex(std::size_t i) const { return vertices_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<Vector>& vertices() const { return vertices_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Sum of weight_i * vertex_i.
  Vector iterate() const;

  /// (index minimising <direction, v>, index maximising it); ties go to the lowest index.
  std::pair<std::size_t, std::size_t> argmin_argmax(std::span<const double> direction) const;

  /// Index of a stored vertex equal to v within kDuplicateTol, if any.
  std::optional<std::size_t> find(std::span<const double> v) const;

  /// Adds weight to v (merging with a duplicate); does not renormalise.
  std::size_t add(Vector v, double weight);

  void set_weight(std::size_t i, double w) { weights_[i] = w; }
  void scale_weights(double factor);

  /// Removes vertices with weight < kDropThreshold, renormalises, returns the removed vertices.
  std::vector<Vector> cleanup();

  /// Replaces the set by the single vertex at index i; returns the others.
  std::vector<Vector> collapse_to(std::size_t i);

  /// Splits on an integer coordinate: left keeps v[var] <= floor_val, right v[var] >= ceil_val.
  /// Throws SplitInfeasible when a vertex is fractional in var or a side would be empty.
  std::pair<ActiveSet, ActiveSet> split(std::size_t var, double floor_val, double ceil_val) const;

  /// Weights nonnegative, summing to 1 within tol, and the set nonempty.
  bool invariants_hold(double tol = 1e-10) const;

 private:
  std::vector<Vector> vertices_;
  std::vector<double> weights_;
};

enum class BoundSense { GreaterThan, LessThan };

/// Per-integer-variable lower/upper bounds of a node (absent entries mean "inherit").
class IntegerBounds {
 public:
  IntegerBounds() = default;
  explicit IntegerBounds(std::vector<std::size_t> integer_vars);
  /// Dense form: lower[k] / upper[k] belong to integer_vars[k].
  IntegerBounds(std::span<const double> lower, std::span<const double> upper,
                std::vector<std::size_t> integer_vars);

  const std::vector<std::size_t>& integer_vars() const { return integer_vars_; }
  bool is_integer(std::size_t var) const;

  void set(std::size_t var, double value, BoundSense sense);
  void erase(std::size_t var, BoundSense sense);
  std::optional<double> lower(std::size_t var) const;
  std::optional<double> upper(std::size_t var) const;
  std::optional<double> get(std::size_t var, BoundSense sense) const;

  const std::map<std::size_t, double>& lower_map() const { return lower_; }
  const std::map<std::size_t, double>& upper_map() const { return upper_; }

  /// Copy with one more bound; never widens an existing interval.
  IntegerBounds tightened(std::size_t var, double value, BoundSense sense) const;

  /// lower <= upper wherever both exist.
  bool consistent() const;

  bool operator==(const IntegerBounds&) const = default;

 private:
  std::vector<std::size_t> integer_vars_;
  std::map<std::size_t, double> lower_;
  std::map<std::size_t, double> upper_;
};

struct Tolerances {
  double abs_gap = 1e-6;
  double rel_gap = 0.01;
  double fw_gap_decay = 0.8;
  double fw_epsilon_start = 1e-2;
  double fw_epsilon_min = 1e-6;
  std::optional<double> min_lower_bound;
  int max_fw_iter = 10000;
  std::optional<long> node_limit;
  std::optional<double> time_limit_s;

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

/// FW tolerance at a given tree depth: max(eps_min, eps_start * decay^depth).
double node_epsilon(const Tolerances& tol, int depth);

}  // namespace fwbb
