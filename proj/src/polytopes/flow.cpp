#include "fwbb/polytopes/flow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <queue>
#include <string>

#include "fwbb/errors.hpp"
#include "fwbb/kernels.hpp"

namespace fwbb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNoArc = std::numeric_limits<std::size_t>::max();

}  // namespace

FlowLMO::FlowLMO(std::size_t num_nodes, std::vector<Arc> arcs, std::vector<std::size_t> destinations,
                 std::vector<std::vector<Demand>> demands)
    : num_nodes_(num_nodes),
      arcs_(std::move(arcs)),
      destinations_(std::move(destinations)),
      demands_(std::move(demands)),
      in_arcs_(num_nodes) {
  if (demands_.size() != destinations_.size())
    throw SolverError(ErrorKind::InvalidArgument, "one demand list per destination required");
  for (std::size_t e = 0; e < arcs_.size(); ++e) {
    if (arcs_[e].tail >= num_nodes_ || arcs_[e].head >= num_nodes_)
      throw SolverError(ErrorKind::InvalidArgument, "arc endpoint out of range");
    in_arcs_[arcs_[e].head].push_back(e);
  }
  for (std::size_t z = 0; z < destinations_.size(); ++z) {
    if (destinations_[z] >= num_nodes_)
      throw SolverError(ErrorKind::InvalidArgument, "destination out of range");
    for (const Demand& d : demands_[z]) {
      if (d.source >= num_nodes_ || !(d.amount >= 0.0) || !std::isfinite(d.amount))
        throw SolverError(ErrorKind::InvalidArgument, "invalid demand");
    }
  }
  // Reachability under unit costs.
  const Vector ones(dimension(), 1.0);
  (void)route(ones, false);
}

std::vector<double> FlowLMO::clamp_costs(std::span<const double> direction) {
  check_direction(direction, dimension());
  std::vector<double> costs(direction.begin(), direction.end());
  long clamped = 0;
  for (double& c : costs) {
    if (c < 0.0) {
      c = 0.0;
      ++clamped;
    }
  }
  if (clamped > 0) {
    clamped_ += clamped;
    if (!warned_) {
      std::clog << "warning: flow oracle clamped " << clamped
                << " negative arc cost(s) to zero\n";
      warned_ = true;
    }
  }
  return costs;
}

void FlowLMO::route_destination(std::size_t z, std::span<const double> costs,
                                std::span<double> out) const {
  const std::size_t m = arcs_.size();
  const std::size_t dest = destinations_[z];
  const double* cost = costs.data() + z * m;
  std::vector<double> dist(num_nodes_, kInf);
  std::vector<std::size_t> next_arc(num_nodes_, kNoArc);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[dest] = 0.0;
  queue.emplace(0.0, dest);
  while (!queue.empty()) {
    const auto [du, u] = queue.top();
    queue.pop();
    if (du > dist[u]) continue;
    for (std::size_t e : in_arcs_[u]) {
      const std::size_t t = arcs_[e].tail;
      const double candidate = du + cost[e];
      if (candidate < dist[t]) {
        dist[t] = candidate;
        next_arc[t] = e;
        queue.emplace(candidate, t);
      }
    }
  }
  double* flow = out.data() + z * m;
  for (const Demand& d : demands_[z]) {
    if (d.amount <= 0.0 || d.source == dest) continue;
    if (dist[d.source] == kInf)
      throw SolverError(ErrorKind::UnreachableDemand,
                        "node " + std::to_string(d.source) + " cannot reach destination " +
                            std::to_string(dest));
    for (std::size_t v = d.source; v != dest; v = arcs_[next_arc[v]].head) flow[next_arc[v]] += d.amount;
  }
}

Vector FlowLMO::route(std::span<const double> costs, bool parallel) const {
  Vector out(dimension(), 0.0);
  const auto blocks = static_cast<std::ptrdiff_t>(destinations_.size());
  if (!parallel || blocks < 2) {
    for (std::ptrdiff_t z = 0; z < blocks; ++z) route_destination(static_cast<std::size_t>(z), costs, out);
    return out;
  }
  // Exceptions may not cross the parallel region; the first one is rethrown.
  std::vector<std::string> errors(destinations_.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t z = 0; z < blocks; ++z) {
    try {
      route_destination(static_cast<std::size_t>(z), costs, out);
    } catch (const SolverError& e) {
      errors[static_cast<std::size_t>(z)] = e.what();
    }
  }
  for (const std::string& msg : errors)
    if (!msg.empty()) throw SolverError(ErrorKind::UnreachableDemand, msg);
  return out;
}

Vector FlowLMO::compute_extreme_point(std::span<const double> direction) {
  return route(clamp_costs(direction), true);
}

Vector FlowLMO::compute_extreme_point_serial(std::span<const double> direction) {
  return route(clamp_costs(direction), false);
}

double FlowLMO::balance_residual(std::span<const double> flows) const {
  if (flows.size() != dimension()) return kInf;
  const std::size_t m = arcs_.size();
  double worst = 0.0;
  for (std::size_t z = 0; z < destinations_.size(); ++z) {
    std::vector<double> net(num_nodes_, 0.0);
    for (std::size_t e = 0; e < m; ++e) {
      const double f = flows[z * m + e];
      worst = std::max(worst, -f);
      net[arcs_[e].tail] += f;
      net[arcs_[e].head] -= f;
    }
    double total = 0.0;
    for (const Demand& d : demands_[z]) {
      if (d.source == destinations_[z]) continue;
      net[d.source] -= d.amount;
      total += d.amount;
    }
    net[destinations_[z]] += total;
    for (double r : net) worst = std::max(worst, std::abs(r));
  }
  return worst;
}

bool FlowLMO::is_feasible(std::span<const double> flows, double tol) const {
  return balance_residual(flows) <= tol;
}

}  // namespace fwbb
