#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "fwbb/lmo.hpp"

namespace fwbb {

struct Arc {
  std::size_t tail;
  std::size_t head;
};

/// Demand of `amount` units from `source` to the destination owning the list.
struct Demand {
  std::size_t source;
  double amount;
};

/// Uncapacitated multi-commodity flow, one commodity per destination.
/// Flow variable (arc e, destination block z) lives at z * |arcs| + e.
/// Extreme points route every demand along one shortest path.
class FlowLMO final : public LinearMinimizationOracle {
 public:
  /// destinations[z] is the node id of destination z and demands[z] its sources.
  /// Throws UnreachableDemand if a positive demand has no path.
  FlowLMO(std::size_t num_nodes, std::vector<Arc> arcs, std::vector<std::size_t> destinations,
          std::vector<std::vector<Demand>> demands);

  std::size_t dimension() const override { return arcs_.size() * destinations_.size(); }
  std::size_t num_nodes() const { return num_nodes_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const std::vector<std::size_t>& destinations() const { return destinations_; }
  const std::vector<std::vector<Demand>>& demands() const { return demands_; }

  /// Destinations are routed in parallel; the result is identical to the serial one.
  Vector compute_extreme_point(std::span<const double> direction) override;
  Vector compute_extreme_point_serial(std::span<const double> direction);

  /// Max over nodes and blocks of |outflow - inflow - supply|, and the most negative flow.
  double balance_residual(std::span<const double> flows) const;
  bool is_feasible(std::span<const double> flows, double tol = 1e-9) const;

  /// Number of negative direction entries clamped to zero so far.
  long clamped_entries() const { return clamped_; }

 private:
  Vector route(std::span<const double> costs, bool parallel) const;
  void route_destination(std::size_t z, std::span<const double> costs, std::span<double> out) const;
  std::vector<double> clamp_costs(std::span<const double> direction);

  std::size_t num_nodes_;
  std::vector<Arc> arcs_;
  std::vector<std::size_t> destinations_;
  std::vector<std::vector<Demand>> demands_;
  std::vector<std::vector<std::size_t>> in_arcs_;
  long clamped_ = 0;
  bool warned_ = false;
};

}  // namespace fwbb
