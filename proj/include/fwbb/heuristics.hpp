#pragma once

#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fwbb/core.hpp"
#include "fwbb/fw.hpp"
#include "fwbb/lmo.hpp"

namespace fwbb {

using Rng = std::mt19937_64;

/// Scaled truncated simplex {sum x = budget, lower <= x <= upper}, used by
/// hyperplane-aware rounding. `upper` is dense over all variables.
struct HyperplaneData {
  double budget = 0.0;
  Vector upper;
};

/// Everything a heuristic may look at. The LMO is synchronised to the node.
struct HeuristicContext {
  std::span<const double> iterate;
  const std::vector<std::size_t>& integer_vars;
  SelfManagedLMO& lmo;
  const ObjectiveFn& objective;
  const GradientFn& gradient;
  const HyperplaneData* hyperplane = nullptr;
  Rng& rng;
};

using HeuristicFn = std::function<std::optional<Vector>(const HeuristicContext&)>;

struct CustomHeuristic {
  std::string name;
  double activation_prob = 0.0;
  HeuristicFn fn;
};

struct HeuristicSettings {
  double simple_rounding_prob = 1.0;
  double probability_rounding_prob = 0.0;
  double follow_gradient_prob = 0.0;
  double hyperplane_aware_rounding_prob = 0.0;
  int follow_gradient_steps = 3;
  std::vector<CustomHeuristic> custom;

  void validate() const;
};

struct HeuristicCandidate {
  std::string name;
  Vector point;
};

/// Round half away from zero on integer variables, clamp into the node
/// bounds, accept iff the LMO reports the point feasible.
std::optional<Vector> simple_rounding(std::span<const double> iterate,
                                      const std::vector<std::size_t>& integer_vars,
                                      const SelfManagedLMO& lmo);

/// Each integer variable becomes ceil with probability equal to its
/// fractional part (floor otherwise); then clamped and feasibility-checked.
std::optional<Vector> probability_rounding(std::span<const double> iterate,
                                           const std::vector<std::size_t>& integer_vars,
                                           const SelfManagedLMO& lmo, Rng& rng);

/// Repeated LMO calls on the gradient, starting at the iterate; returns the
/// vertex with the best objective value seen.
std::optional<Vector> follow_gradient(std::span<const double> iterate, const ObjectiveFn& f,
                                      const GradientFn& grad, SelfManagedLMO& lmo, int steps);

/// Floors the integer coordinates, then hands the residual budget out one
/// unit at a time by decreasing fractional part (ties to the lowest index),
/// respecting lower/upper. Nothing if the budget cannot be restored.
std::optional<Vector> hyperplane_aware_rounding(std::span<const double> iterate,
                                                const std::vector<std::size_t>& integer_vars,
                                                double budget, std::span<const double> lower,
                                                std::span<const double> upper);

/// Draws one uniform number per heuristic (fixed order: simple, probability,
/// follow-gradient, hyperplane, then custom ones) and runs those whose draw
/// falls below their activation probability.
std::vector<HeuristicCandidate> run_heuristics(const HeuristicSettings& settings,
                                               const HeuristicContext& ctx);

}  // namespace fwbb
