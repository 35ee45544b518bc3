#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "fwbb/core.hpp"
#include "fwbb/lmo.hpp"

namespace fwbb {

enum class FWVariant { Standard, AwayFW, PairwiseFW, BPCG, DICG };
enum class LineSearchKind { Agnostic, Secant, Backtracking };

using ObjectiveFn = std::function<double(std::span<const double>)>;
/// Writes the gradient at x into storage (length n).
using GradientFn = std::function<void(std::span<double> storage, std::span<const double> x)>;
using DomainOracle = std::function<bool(std::span<const double>)>;

struct LineSearch {
  LineSearchKind kind = LineSearchKind::Secant;
  int max_iter = 40;
  double tol = 1e-8;
  double domain_shrink = 0.8;
  /// Backtracking: L is multiplied by 1/tau on failure and by tau after success.
  double tau = 0.5;
  double initial_lipschitz = 1.0;
  DomainOracle domain_oracle;
};

/// Largest step in [0, gamma_max] kept after shrinking by `shrink` until
/// x + gamma * d is in the domain; 0 if none is found.
double shrink_to_domain(const DomainOracle& domain, std::span<const double> x,
                        std::span<const double> d, double gamma_max, double shrink);

/// Approximate minimiser of phi(gamma) = f(x + gamma d) on [0, gamma_max] via a
/// safeguarded secant iteration on phi'. Requires phi'(0) < 0 unless
/// gamma_max == 0; throws NonDescentDirection otherwise.
/// `dphi0` may pass a precomputed phi'(0).
double secant_line_search(const GradientFn& grad, std::span<const double> x,
                          std::span<const double> d, double gamma_max, const LineSearch& params,
                          std::optional<double> dphi0 = std::nullopt);

/// <gradient, iterate - fw_vertex>
double fw_gap(std::span<const double> gradient, std::span<const double> iterate,
              std::span<const double> fw_vertex);

/// Vertices dropped from active sets, kept for lazy lookups. Deduplicated,
/// FIFO eviction beyond `capacity` (0 disables the pool).
class ShadowPool {
 public:
  explicit ShadowPool(std::size_t capacity = 0) : capacity_(capacity) {}

  void add(Vector v);
  void set_capacity(std::size_t capacity);
  /// Keeps only the vertices for which keep(v) holds.
  void filter(const std::function<bool(const Vector&)>& keep);

  std::size_t size() const { return vertices_.size(); }
  bool empty() const { return vertices_.empty(); }
  std::size_t capacity() const { return capacity_; }
  const std::vector<Vector>& vertices() const { return vertices_; }

 private:
  std::size_t capacity_;
  std::vector<Vector> vertices_;
};

struct IterationState {
  int t = 0;
  double primal = 0.0;
  /// Latest gap: exact after an LMO call, the lazy estimate otherwise.
  double fw_gap = 0.0;
  bool gap_is_exact = false;
  /// Best valid lower bound found so far (-inf before the first LMO call).
  double lower_bound = -std::numeric_limits<double>::infinity();
  long lmo_calls = 0;
  std::span<const double> x;
  const ActiveSet* active_set = nullptr;
};

/// Return false to stop the solve with status CallbackStop.
using IterationCallback = std::function<bool(const IterationState&)>;

struct FWSettings {
  FWVariant variant = FWVariant::BPCG;
  bool lazy = true;
  LineSearch line_search;
  int max_iter = 10000;
  std::optional<double> time_limit_s;
  double epsilon = 1e-7;
};

enum class FWStatus { GapReached, IterLimit, TimeLimit, CallbackStop, DomainFailure };

const char* to_string(FWVariant variant);
const char* to_string(FWStatus status);

struct FWResult {
  Vector iterate;
  std::optional<ActiveSet> active_set;
  double primal = 0.0;
  /// Last exact FW gap (+inf when the LMO was never called).
  double fw_gap = std::numeric_limits<double>::infinity();
  /// Best primal - gap over iterations with an exact gap.
  double lower_bound = -std::numeric_limits<double>::infinity();
  /// Last vertex returned by the LMO (integer-feasible candidate).
  std::optional<Vector> last_vertex;
  int iterations = 0;
  long lmo_calls = 0;
  FWStatus status = FWStatus::IterLimit;
};

/// Corrective Frank-Wolfe family on an active set (Standard, AwayFW,
/// PairwiseFW, BPCG). Vertices dropped from the active set go to `pool`
/// (when given); lazy variants scan the active set and the pool before
/// calling the LMO.
FWResult solve_node_fw(const FWSettings& settings, const ObjectiveFn& f, const GradientFn& grad,
                       SelfManagedLMO& lmo, ActiveSet warm_start, ShadowPool* pool = nullptr,
                       const IterationCallback& callback = {});

/// Decomposition-invariant conditional gradient: no active set, in-face away
/// vertex and explicit maximum step. Lazy mode reuses pool vertices as the
/// global vertex.
FWResult solve_node_dicg(const FWSettings& settings, const ObjectiveFn& f, const GradientFn& grad,
                         SelfManagedLMO& lmo, Vector start, ShadowPool* pool = nullptr,
                         const IterationCallback& callback = {});

/// Dispatches on settings.variant; DICG starts from the active-set iterate.
FWResult solve_node(const FWSettings& settings, const ObjectiveFn& f, const GradientFn& grad,
                    SelfManagedLMO& lmo, ActiveSet warm_start, ShadowPool* pool = nullptr,
                    const IterationCallback& callback = {});

/// Stops once the iterate has been inside the domain for more than
/// `threshold` checks (the check happens before the counter is incremented).
class DomainCounterCallback {
 public:
  DomainCounterCallback(DomainOracle domain, int threshold = 5)
      : domain_(std::move(domain)), threshold_(threshold) {}
  bool operator()(const IterationState& state);
  int counter() const { return counter_; }

 private:
  DomainOracle domain_;
  int threshold_;
  int counter_ = 0;
};

/// Projects x0 onto the feasible region by lazy BPCG on 0.5 * ||x - x0||^2
/// starting from `start`, stopping a few iterations after the iterate enters
/// the domain. Throws WarmStartFailure if it never does within max_iter.
ActiveSet project_into_domain(SelfManagedLMO& lmo, std::span<const double> x0,
                              const DomainOracle& domain, ActiveSet start, int max_iter = 10000);

}  // namespace fwbb
