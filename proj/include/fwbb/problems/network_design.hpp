#pragma once

#include <cstdint>
#include <memory>

#include "fwbb/bnb.hpp"
#include "fwbb/polytopes/flow.hpp"
#include "fwbb/polytopes/hypercube.hpp"

namespace fwbb {

/// Network design with the linking constraints x_e^z <= M^z y_e moved into a
/// penalty. Variables: y (one binary per candidate arc) followed by one flow
/// block of |arcs| entries per destination.
struct NetworkDesignInstance {
  std::size_t num_nodes = 0;
  std::vector<Arc> arcs;
  /// Indices into arcs of the candidate (buildable) arcs, in y order.
  std::vector<std::size_t> candidate_arcs;
  Vector alpha, beta, gamma, rho;  // per arc: travel cost alpha + beta x + gamma x^rho
  Vector design_cost;              // per candidate arc
  std::vector<std::size_t> destinations;
  std::vector<std::vector<Demand>> demands;  // per destination
  double mu = 1e3;
  double p = 1.5;
  Vector big_m;  // per destination; defaults to its total demand

  void validate() const;
  std::size_t num_design() const { return candidate_arcs.size(); }
  std::size_t dimension() const { return candidate_arcs.size() + arcs.size() * destinations.size(); }
};

double nd_objective(const NetworkDesignInstance& inst, std::span<const double> x);
void nd_gradient(const NetworkDesignInstance& inst, std::span<double> storage, std::span<const double> x);
/// Design cost plus travel cost, without the penalty.
double nd_operating_cost(const NetworkDesignInstance& inst, std::span<const double> x);
/// Penalty term alone.
double nd_penalty(const NetworkDesignInstance& inst, std::span<const double> x);

/// Product of the unit cube (design block) and the shortest-path flow oracle.
class NetworkDesignLMO final : public BoundedLMO {
 public:
  explicit NetworkDesignLMO(const NetworkDesignInstance& inst);

  std::size_t dimension() const override { return num_design_ + flow_.dimension(); }
  Vector bounded_compute_extreme_point(std::span<const double> direction,
                                       std::span<const double> lower,
                                       std::span<const double> upper,
                                       std::span<const std::size_t> int_vars) override;
  bool is_simple_linear_feasible(std::span<const double> point) const override;

  FlowLMO& flow() { return flow_; }
  const FlowLMO& flow() const { return flow_; }

 private:
  std::size_t num_design_;
  HypercubeLMO cube_;
  FlowLMO flow_;
  double balance_tol_;
};

Problem make_network_design_problem(const NetworkDesignInstance& inst);

/// Two sources routed to one destination; building the candidate arc 1->2
/// shortens the route of the first source.
NetworkDesignInstance small_traffic_instance();

/// Random geometric graph on the unit square: a bidirectional ring backbone of
/// existing arcs plus candidate arcs between nodes closer than `radius`.
NetworkDesignInstance generate_network_design(std::size_t num_nodes, std::size_t num_destinations,
                                              std::size_t sources_per_destination, double radius,
                                              std::uint64_t seed);

}  // namespace fwbb
