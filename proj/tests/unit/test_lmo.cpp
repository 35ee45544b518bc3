#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fwbb/errors.hpp"
#include "fwbb/lmo.hpp"
#include "fwbb/polytopes/birkhoff.hpp"
#include "fwbb/polytopes/hypercube.hpp"
#include "fwbb/polytopes/simplex_knapsack.hpp"
#include "support/oracles.hpp"

using namespace fwbb;

namespace {

std::vector<std::size_t> iota_vars(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const SolverError& e) {
    return e.kind();
  }
  FAIL("expected a SolverError");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("managed hypercube: sign pattern and node bound") {
  HypercubeLMO cube(3);
  const auto vars = iota_vars(3);
  const Vector lo(3, 0.0), hi(3, 1.0);
  const IntegerBounds global(lo, hi, vars);
  IntegerBounds node(vars);
  const Vector d{1.0, -1.0, 1.0};
  CHECK(managed_compute_extreme_point(cube, node, global, d) == Vector{0.0, 1.0, 0.0});
  node.set(0, 1.0, BoundSense::GreaterThan);
  CHECK(managed_compute_extreme_point(cube, node, global, d) == Vector{1.0, 1.0, 0.0});
}

TEST_CASE("managed oracle rejects crossed bounds before calling the inner oracle") {
  HypercubeLMO cube(2);
  const auto vars = iota_vars(2);
  const Vector lo(2, 0.0), hi(2, 1.0);
  const IntegerBounds global(lo, hi, vars);
  IntegerBounds node(vars);
  node.set(1, 1.0, BoundSense::GreaterThan);
  node.set(1, 0.0, BoundSense::LessThan);
  CHECK(kind_of([&] { managed_compute_extreme_point(cube, node, global, Vector{1.0, 1.0}); }) ==
        ErrorKind::NodeInfeasible);
}

TEST_CASE("managed simplex oracle matches exhaustive vertex scan under random fixings") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> pick(0, 5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 6;
    const Vector u(n, 2.0);
    const double budget = 5.0;
    auto inner = std::make_shared<SimplexKnapsackLMO>(budget, u);
    const auto vars = iota_vars(n);
    const Vector lo(n, 0.0);
    ManagedLMO lmo(inner, lo, u, vars);
    std::vector<int> ilo(n, 0), ihi(n, 2);
    for (int f = 0; f < 2; ++f) {
      const auto i = static_cast<std::size_t>(pick(rng));
      if (pick(rng) % 2 == 0) {
        lmo.set_bound(i, 1.0, BoundSense::GreaterThan);
        ilo[i] = 1;
      } else {
        lmo.set_bound(i, 1.0, BoundSense::LessThan);
        ihi[i] = std::min(ihi[i], 1);
      }
    }
    Vector d(n);
    for (double& x : d) x = g(rng);
    double best = oracle::kInf;
    oracle::for_each_integer_point(ilo, ihi, [&](const Vector& x) {
      double s = 0.0, v = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += x[i], v += d[i] * x[i];
      if (s == budget) best = std::min(best, v);
    });
    bool feasible = best < oracle::kInf;
    if (!feasible) {
      CHECK_THROWS_AS(lmo.compute_extreme_point(d), SolverError);
      continue;
    }
    const Vector v = lmo.compute_extreme_point(d);
    double val = 0.0;
    for (std::size_t i = 0; i < n; ++i) val += d[i] * v[i];
    CHECK(val == doctest::Approx(best).epsilon(1e-12));
    CHECK(lmo.is_linear_feasible(v));
  }
}

TEST_CASE("global bounds of Birkhoff and hypercube") {
  BirkhoffLMO b(3);
  const auto gb = b.build_global_bounds(iota_vars(9));
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(*gb.lower(i) == 0.0);
    CHECK(*gb.upper(i) == 1.0);
    CHECK(b.get_bound(i, BoundSense::GreaterThan) == 0.0);
    CHECK(b.get_bound(i, BoundSense::LessThan) == 1.0);
  }
  auto inner = std::make_shared<HypercubeLMO>(2);
  const Vector lo(2, 0.0), hi(2, 1.0);
  ManagedLMO m(inner, lo, hi, iota_vars(2));
  const auto mb = m.build_global_bounds(iota_vars(2));
  CHECK(*mb.lower(0) == 0.0);
  CHECK(*mb.upper(1) == 1.0);
  for (std::size_t i : m.get_lower_bound_list()) CHECK(m.get_bound(i, BoundSense::GreaterThan) == *mb.lower(i));
  for (std::size_t i : m.get_upper_bound_list()) CHECK(m.get_bound(i, BoundSense::LessThan) == *mb.upper(i));
}

TEST_CASE("time tracking wrapper is transparent and counts calls") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  auto raw = std::make_shared<BirkhoffLMO>(4);
  auto other = std::make_shared<BirkhoffLMO>(4);
  TimeTrackingLMO tracked(raw);
  for (int k = 0; k < 25; ++k) {
    Vector d(16);
    for (double& x : d) x = g(rng);
    CHECK(tracked.compute_extreme_point(d) == other->compute_extreme_point(d));
  }
  CHECK(tracked.call_count() == 25);
  CHECK(tracked.total_time_s() >= 0.0);
}

TEST_CASE("directions with NaN are rejected") {
  auto inner = std::make_shared<HypercubeLMO>(2);
  const Vector lo(2, 0.0), hi(2, 1.0);
  ManagedLMO m(inner, lo, hi, iota_vars(2));
  const Vector bad{1.0, std::numeric_limits<double>::quiet_NaN()};
  CHECK(kind_of([&] { m.compute_extreme_point(bad); }) == ErrorKind::InvalidArgument);
  BirkhoffLMO b(2);
  CHECK_THROWS_AS(b.compute_extreme_point(Vector{0.0, bad[1], 0.0, 0.0}), SolverError);
}

TEST_CASE("apply_node_bounds brings the oracle to exactly the node bounds") {
  auto lmo = std::make_shared<BirkhoffLMO>(3);
  const auto vars = iota_vars(9);
  const auto global = lmo->build_global_bounds(vars);
  IntegerBounds a(vars), b(vars);
  a.set(0, 1.0, BoundSense::GreaterThan);
  a.set(4, 0.0, BoundSense::LessThan);
  b.set(8, 1.0, BoundSense::GreaterThan);
  apply_node_bounds(*lmo, global, a);
  CHECK(lmo->build_lmo_correct(a, global));
  apply_node_bounds(*lmo, global, b);
  CHECK(lmo->build_lmo_correct(b, global));
  CHECK(lmo->get_bound(0, BoundSense::GreaterThan) == 0.0);
  CHECK(lmo->get_bound(4, BoundSense::LessThan) == 1.0);
  const Vector v = lmo->compute_extreme_point(Vector(9, 0.0));
  CHECK(v[8] == 1.0);
}

TEST_CASE("extreme points are deterministic") {
  SimplexKnapsackLMO k(3.0, Vector(5, 1.0));
  const Vector d{0.1, 0.1, -0.2, 0.1, 0.0};
  CHECK(k.bounded_compute_extreme_point(d, {}, {}, {}) == k.bounded_compute_extreme_point(d, {}, {}, {}));
}
