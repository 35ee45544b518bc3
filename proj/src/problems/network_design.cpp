#include "fwbb/problems/network_design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "fwbb/errors.hpp"

namespace fwbb {

void NetworkDesignInstance::validate() const {
  auto fail = [](const char* what) { throw SolverError(ErrorKind::InvalidArgument, what); };
  const std::size_t m = arcs.size();
  if (alpha.size() != m || beta.size() != m || gamma.size() != m || rho.size() != m)
    fail("arc cost coefficients must have one entry per arc");
  if (design_cost.size() != candidate_arcs.size()) fail("one design cost per candidate arc required");
  if (demands.size() != destinations.size()) fail("one demand list per destination required");
  if (!big_m.empty() && big_m.size() != destinations.size()) fail("one big-M per destination required");
  for (const Arc& a : arcs)
    if (a.tail >= num_nodes || a.head >= num_nodes || a.tail == a.head) fail("arc endpoints must be distinct nodes");
  std::vector<bool> seen(m, false);
  for (std::size_t e : candidate_arcs) {
    if (e >= m) fail("candidate arc index out of range");
    if (seen[e]) fail("candidate arc listed twice");
    seen[e] = true;
  }
  for (std::size_t e = 0; e < m; ++e) {
    if (!(rho[e] > 1.0)) fail("rho must exceed 1");
    if (!(beta[e] >= 0.0) || !(gamma[e] >= 0.0)) fail("beta and gamma must be nonnegative");
  }
  for (std::size_t z = 0; z < destinations.size(); ++z) {
    if (destinations[z] >= num_nodes) fail("destination out of range");
    for (const Demand& d : demands[z])
      if (d.source >= num_nodes || !(d.amount >= 0.0)) fail("demands need a valid source and a nonnegative amount");
  }
  if (!(mu > 0.0)) fail("mu must be positive");
  if (!(p > 1.0)) fail("p must exceed 1");
  for (std::size_t z = 0; z < destinations.size(); ++z) {
    double total = 0.0;
    for (const Demand& d : demands[z]) total += d.amount;
    if (!big_m.empty() && big_m[z] < total - 1e-12) fail("big-M below the total demand of a destination");
  }
}

namespace {

double big_m_of(const NetworkDesignInstance& inst, std::size_t z) {
  if (!inst.big_m.empty()) return inst.big_m[z];
  double total = 0.0;
  for (const Demand& d : inst.demands[z]) total += d.amount;
  return total;
}

double total_flow(const NetworkDesignInstance& inst, std::span<const double> x, std::size_t e) {
  const std::size_t r = inst.num_design(), m = inst.arcs.size();
  double s = 0.0;
  for (std::size_t z = 0; z < inst.destinations.size(); ++z) s += x[r + z * m + e];
  return std::max(s, 0.0);
}

}  // namespace

double nd_operating_cost(const NetworkDesignInstance& inst, std::span<const double> x) {
  double value = 0.0;
  for (std::size_t k = 0; k < inst.num_design(); ++k) value += inst.design_cost[k] * x[k];
  for (std::size_t e = 0; e < inst.arcs.size(); ++e) {
    const double xe = total_flow(inst, x, e);
    value += inst.alpha[e] + inst.beta[e] * xe + inst.gamma[e] * std::pow(xe, inst.rho[e]);
  }
  return value;
}

double nd_penalty(const NetworkDesignInstance& inst, std::span<const double> x) {
  const std::size_t r = inst.num_design(), m = inst.arcs.size();
  double value = 0.0;
  for (std::size_t z = 0; z < inst.destinations.size(); ++z) {
    const double big_m = big_m_of(inst, z);
    for (std::size_t k = 0; k < r; ++k) {
      const double excess = x[r + z * m + inst.candidate_arcs[k]] - big_m * x[k];
      if (excess > 0.0) value += std::pow(excess, inst.p);
    }
  }
  return inst.mu * value;
}

double nd_objective(const NetworkDesignInstance& inst, std::span<const double> x) {
  return nd_operating_cost(inst, x) + nd_penalty(inst, x);
}

void nd_gradient(const NetworkDesignInstance& inst, std::span<double> storage, std::span<const double> x) {
  const std::size_t r = inst.num_design(), m = inst.arcs.size();
  for (std::size_t k = 0; k < r; ++k) storage[k] = inst.design_cost[k];
  for (std::size_t e = 0; e < m; ++e) {
    const double xe = total_flow(inst, x, e);
    const double d = inst.beta[e] + inst.rho[e] * inst.gamma[e] * std::pow(xe, inst.rho[e] - 1.0);
    for (std::size_t z = 0; z < inst.destinations.size(); ++z) storage[r + z * m + e] = d;
  }
  for (std::size_t z = 0; z < inst.destinations.size(); ++z) {
    const double big_m = big_m_of(inst, z);
    for (std::size_t k = 0; k < r; ++k) {
      const std::size_t idx = r + z * m + inst.candidate_arcs[k];
      const double excess = x[idx] - big_m * x[k];
      if (excess <= 0.0) continue;
      const double dp = inst.p * inst.mu * std::pow(excess, inst.p - 1.0);
      storage[idx] += dp;
      storage[k] -= big_m * dp;
    }
  }
}

NetworkDesignLMO::NetworkDesignLMO(const NetworkDesignInstance& inst)
    : num_design_(inst.num_design()),
      cube_(inst.num_design()),
      flow_(inst.num_nodes, inst.arcs, inst.destinations, inst.demands) {
  double total = 0.0;
  for (const auto& list : inst.demands)
    for (const Demand& d : list) total += d.amount;
  balance_tol_ = 1e-7 * std::max(1.0, total);
}

Vector NetworkDesignLMO::bounded_compute_extreme_point(std::span<const double> direction,
                                                       std::span<const double> lower,
                                                       std::span<const double> upper,
                                                       std::span<const std::size_t> int_vars) {
  check_direction(direction, dimension());
  Vector v = cube_.bounded_compute_extreme_point(direction.first(num_design_), lower, upper, int_vars);
  const Vector flows = flow_.compute_extreme_point(direction.subspan(num_design_));
  v.insert(v.end(), flows.begin(), flows.end());
  return v;
}

bool NetworkDesignLMO::is_simple_linear_feasible(std::span<const double> point) const {
  if (point.size() != dimension()) return false;
  if (!cube_.is_simple_linear_feasible(point.first(num_design_))) return false;
  return flow_.balance_residual(point.subspan(num_design_)) <= balance_tol_;
}

Problem make_network_design_problem(const NetworkDesignInstance& inst) {
  inst.validate();
  auto data = std::make_shared<const NetworkDesignInstance>(inst);
  Problem p;
  p.objective = [data](std::span<const double> x) { return nd_objective(*data, x); };
  p.gradient = [data](std::span<double> g, std::span<const double> x) { nd_gradient(*data, g, x); };
  auto lmo = std::make_shared<NetworkDesignLMO>(*data);
  const std::size_t r = data->num_design();
  std::vector<std::size_t> int_vars(r);
  std::iota(int_vars.begin(), int_vars.end(), std::size_t{0});
  const Vector lo(r, 0.0), hi(r, 1.0);
  p.lmo = std::make_shared<ManagedLMO>(lmo, lo, hi, int_vars);
  p.integer_vars = int_vars;
  return p;
}

NetworkDesignInstance small_traffic_instance() {
  // Nodes: S1=0, 1..5, D=6, S2=7.
  NetworkDesignInstance inst;
  inst.num_nodes = 8;
  inst.arcs = {{0, 1}, {1, 2}, {1, 3}, {3, 4}, {4, 5}, {5, 6}, {2, 6}, {7, 3}};
  inst.candidate_arcs = {1};
  const std::size_t m = inst.arcs.size();
  inst.alpha.assign(m, 0.0);
  inst.beta.assign(m, 1.0);
  inst.gamma.assign(m, 1.0);
  inst.rho.assign(m, 2.0);
  inst.design_cost = {0.5};
  inst.destinations = {6};
  inst.demands = {{{0, 1.0}, {7, 1.0}}};
  return inst;
}

NetworkDesignInstance generate_network_design(std::size_t num_nodes, std::size_t num_destinations,
                                              std::size_t sources_per_destination, double radius,
                                              std::uint64_t seed) {
  if (num_nodes < 3) throw SolverError(ErrorKind::InvalidArgument, "need at least 3 nodes");
  if (num_destinations < 1 || num_destinations > num_nodes)
    throw SolverError(ErrorKind::InvalidArgument, "invalid number of destinations");
  if (sources_per_destination < 1 || sources_per_destination >= num_nodes)
    throw SolverError(ErrorKind::InvalidArgument, "invalid number of sources per destination");
  if (!(radius > 0.0)) throw SolverError(ErrorKind::InvalidArgument, "radius must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<double, double>> pos(num_nodes);
  for (auto& [px, py] : pos) {
    px = unit(rng);
    py = unit(rng);
  }
  auto dist = [&](std::size_t a, std::size_t b) {
    return std::hypot(pos[a].first - pos[b].first, pos[a].second - pos[b].second);
  };

  NetworkDesignInstance inst;
  inst.num_nodes = num_nodes;
  auto add_arc = [&](std::size_t a, std::size_t b, bool candidate) {
    const double len = std::max(dist(a, b), 1e-3);
    inst.arcs.push_back({a, b});
    inst.alpha.push_back(0.0);
    // Candidate arcs are faster roads: lower free-flow time, milder congestion.
    inst.beta.push_back(candidate ? 0.5 * len : len);
    inst.gamma.push_back(candidate ? 0.05 * len : 0.15 * len);
    inst.rho.push_back(2.0);
    if (candidate) {
      inst.candidate_arcs.push_back(inst.arcs.size() - 1);
      inst.design_cost.push_back(0.2 * len * (0.5 + unit(rng)));
    }
  };
  std::vector<std::vector<char>> linked(num_nodes, std::vector<char>(num_nodes, 0));
  for (std::size_t i = 0; i < num_nodes; ++i) {
    const std::size_t j = (i + 1) % num_nodes;
    add_arc(i, j, false);
    add_arc(j, i, false);
    linked[i][j] = linked[j][i] = 1;
  }
  for (std::size_t i = 0; i < num_nodes; ++i)
    for (std::size_t j = 0; j < num_nodes; ++j)
      if (i != j && !linked[i][j] && dist(i, j) < radius) add_arc(i, j, true);

  std::vector<std::size_t> nodes(num_nodes);
  std::iota(nodes.begin(), nodes.end(), std::size_t{0});
  std::shuffle(nodes.begin(), nodes.end(), rng);
  for (std::size_t z = 0; z < num_destinations; ++z) {
    const std::size_t dest = nodes[z];
    inst.destinations.push_back(dest);
    std::vector<std::size_t> others;
    for (std::size_t v = 0; v < num_nodes; ++v)
      if (v != dest) others.push_back(v);
    std::shuffle(others.begin(), others.end(), rng);
    std::vector<Demand> list;
    for (std::size_t k = 0; k < sources_per_destination; ++k)
      list.push_back({others[k], std::round((1.0 + 4.0 * unit(rng)) * 4.0) / 4.0});
    std::sort(list.begin(), list.end(), [](const Demand& a, const Demand& b) { return a.source < b.source; });
    inst.demands.push_back(std::move(list));
  }
  return inst;
}

}  // namespace fwbb
