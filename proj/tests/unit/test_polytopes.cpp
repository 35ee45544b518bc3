#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "fwbb/errors.hpp"
#include "fwbb/polytopes/birkhoff.hpp"
#include "fwbb/polytopes/flow.hpp"
#include "fwbb/polytopes/hungarian.hpp"
#include "fwbb/polytopes/hypercube.hpp"
#include "fwbb/polytopes/simplex_knapsack.hpp"
#include "fwbb/problems/network_design.hpp"
#include "support/oracles.hpp"

using namespace fwbb;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const SolverError& e) {
    return e.kind();
  }
  FAIL("expected a SolverError");
  return ErrorKind::InvalidArgument;
}

double dot(const Vector& a, const Vector& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Min of <d, P> over permutation matrices within the Birkhoff oracle's bounds.
std::optional<double> filtered_permutation_min(const BirkhoffLMO& lmo, const Vector& d) {
  const std::size_t n = lmo.n();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::optional<double> best;
  do {
    Vector x(n * n, 0.0);
    for (std::size_t r = 0; r < n; ++r) x[BirkhoffLMO::encode(r, perm[r], n)] = 1.0;
    bool ok = true;
    for (std::size_t i = 0; i < x.size() && ok; ++i)
      ok = x[i] >= lmo.lower_bounds()[i] - 1e-12 && x[i] <= lmo.upper_bounds()[i] + 1e-12;
    if (ok && (!best || dot(d, x) < *best)) best = dot(d, x);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

bool is_permutation_matrix(const Vector& x, std::size_t n) {
  for (double v : x)
    if (v != 0.0 && v != 1.0) return false;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0, c = 0.0;
    for (std::size_t j = 0; j < n; ++j) r += x[BirkhoffLMO::encode(i, j, n)], c += x[BirkhoffLMO::encode(j, i, n)];
    if (r != 1.0 || c != 1.0) return false;
  }
  return true;
}

}  // namespace

// ---- knapsack ----

TEST_CASE("knapsack fills the cheapest coordinates") {
  const Vector d{3.0, 1.0, 2.0}, zero(3, 0.0), one(3, 1.0);
  CHECK(knapsack_extreme_point(d, 2.0, zero, one) == Vector{0.0, 1.0, 1.0});
  CHECK(knapsack_extreme_point(d, 2.0, Vector{1.0, 0.0, 0.0}, one) == Vector{1.0, 1.0, 0.0});
  const Vector u{2.0, 3.0, 1.0};
  CHECK(knapsack_extreme_point(d, 6.0, zero, u) == u);
}

TEST_CASE("knapsack rejects an unreachable budget") {
  const Vector d(3, 1.0), zero(3, 0.0), one(3, 1.0);
  CHECK(kind_of([&] { knapsack_extreme_point(d, 4.0, zero, one); }) == ErrorKind::BudgetInfeasible);
  CHECK(kind_of([&] { knapsack_extreme_point(d, 1.0, Vector{1.0, 1.0, 0.0}, one); }) ==
        ErrorKind::BudgetInfeasible);
}

TEST_CASE("knapsack vertex is optimal among enumerated integer vertices") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 6;
    Vector d(n);
    for (double& x : d) x = g(rng);
    const std::vector<int> u{1, 2, 1, 3, 2, 1};
    const Vector uu(u.begin(), u.end()), zero(n, 0.0);
    const int budget = 4;
    const Vector v = knapsack_extreme_point(d, budget, zero, uu);
    double best = oracle::kInf;
    for (const auto& p : oracle::truncated_simplex_points(u, budget)) best = std::min(best, dot(d, p));
    CHECK(dot(d, v) == doctest::Approx(best).epsilon(1e-12));
    CHECK(std::accumulate(v.begin(), v.end(), 0.0) == doctest::Approx(budget));
  }
}

// ---- hungarian ----

TEST_CASE("hungarian small cases") {
  const Vector c{1.0, 2.0, 2.0, 1.0};
  const auto a = hungarian(c, 2);
  CHECK(a.col_of_row == std::vector<std::size_t>{0, 1});
  CHECK(a.value == 2.0);
  const Vector z{0.0, 5.0, 5.0, 0.0};
  const std::vector<unsigned char> f{0, 1, 1, 0};
  const auto b = hungarian(z, 2, f);
  CHECK(b.col_of_row == std::vector<std::size_t>{0, 1});
  CHECK(b.value == 0.0);
}

TEST_CASE("hungarian reports infeasibility and dimension cap") {
  const Vector z(4, 0.0);
  const std::vector<unsigned char> f{1, 1, 0, 0};
  CHECK(kind_of([&] { hungarian(z, 2, f); }) == ErrorKind::AssignmentInfeasible);
  const Vector big((kMaxAssignmentDim + 1) * (kMaxAssignmentDim + 1), 0.0);
  CHECK(kind_of([&] { hungarian(big, kMaxAssignmentDim + 1); }) == ErrorKind::DimensionTooLarge);
}

TEST_CASE("hungarian equals enumeration on random 6x6 with forbidden entries") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> cost(-20, 20);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 6;
    Vector c(n * n);
    std::vector<unsigned char> f(n * n);
    for (auto& x : c) x = cost(rng);
    for (auto& x : f) x = u(rng) < 0.2;
    const auto best = oracle::assignment_min(c, n, f);
    if (!best) {
      CHECK(kind_of([&] { hungarian(c, n, f); }) == ErrorKind::AssignmentInfeasible);
      continue;
    }
    const auto a = hungarian(c, n, f);
    CHECK(a.value == *best);
    for (std::size_t r = 0; r < n; ++r) CHECK_FALSE(f[r * n + a.col_of_row[r]]);
  }
}

// ---- Birkhoff ----

TEST_CASE("Birkhoff index arithmetic is column-major") {
  CHECK(BirkhoffLMO::decode(4, 3) == std::pair<std::size_t, std::size_t>{1, 1});
  CHECK(BirkhoffLMO::decode(5, 3) == std::pair<std::size_t, std::size_t>{2, 1});
  CHECK(BirkhoffLMO::encode(2, 1, 3) == 5);
}

TEST_CASE("Birkhoff extreme point without fixings") {
  BirkhoffLMO lmo(2);
  // Column-major D = [[0,1],[1,0]].
  CHECK(lmo.compute_extreme_point(Vector{0.0, 1.0, 1.0, 0.0}) == Vector{1.0, 0.0, 0.0, 1.0});
}

TEST_CASE("Birkhoff fixing keeps the fixed entry and solves the reduced problem") {
  BirkhoffLMO lmo(3);
  lmo.set_bound(BirkhoffLMO::encode(0, 0, 3), 1.0, BoundSense::GreaterThan);
  Vector d(9, 0.0);
  d[BirkhoffLMO::encode(0, 1, 3)] = -10.0;  // favours (0,1), which the fixing rules out
  d[BirkhoffLMO::encode(1, 2, 3)] = -1.0;
  const Vector v = lmo.compute_extreme_point(d);
  CHECK(v[BirkhoffLMO::encode(0, 0, 3)] == 1.0);
  CHECK(v[BirkhoffLMO::encode(1, 2, 3)] == 1.0);
  CHECK(v[BirkhoffLMO::encode(2, 1, 3)] == 1.0);
  CHECK(lmo.index_map_rows() == std::vector<std::size_t>{1, 2});
  CHECK(lmo.index_map_cols() == std::vector<std::size_t>{1, 2});
}

TEST_CASE("Birkhoff set_bound bookkeeping") {
  BirkhoffLMO lmo(3);
  lmo.set_bound(4, 1.0, BoundSense::GreaterThan);
  CHECK(lmo.fixed_to_one_rows() == std::vector<std::size_t>{1});
  CHECK(lmo.fixed_to_one_cols() == std::vector<std::size_t>{1});
  CHECK(lmo.index_map_rows() == std::vector<std::size_t>{0, 2});
  CHECK(lmo.index_map_cols() == std::vector<std::size_t>{0, 2});
  lmo.set_bound(1, 0.0, BoundSense::LessThan);
  CHECK(lmo.upper_bounds()[1] == 0.0);
  CHECK(lmo.fixed_to_one_rows().size() == 1);
  const BoundUpdate del[] = {{4, BoundSense::GreaterThan}};
  lmo.delete_bounds(del);
  CHECK(lmo.updated_lmo());
  CHECK(lmo.index_map_rows() == std::vector<std::size_t>{0, 1, 2});
  CHECK(lmo.index_map_cols() == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("Birkhoff extreme points equal filtered enumeration over random sessions") {
  std::mt19937_64 rng(1234);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int session = 0; session < 40; ++session) {
    const std::size_t n = 2 + session % 4;
    BirkhoffLMO lmo(n);
    std::uniform_int_distribution<std::size_t> idx(0, n * n - 1);
    for (int op = 0; op < 12; ++op) {
      const std::size_t i = idx(rng);
      const double r = u(rng);
      if (r < 0.3) lmo.set_bound(i, 1.0, BoundSense::GreaterThan);
      else if (r < 0.6) lmo.set_bound(i, 0.0, BoundSense::LessThan);
      else {
        const BoundUpdate del[] = {{i, r < 0.8 ? BoundSense::GreaterThan : BoundSense::LessThan}};
        lmo.delete_bounds(del);
      }
      Vector d(n * n);
      for (double& x : d) x = g(rng);
      const auto best = filtered_permutation_min(lmo, d);
      if (!best) {
        CHECK_THROWS_AS(lmo.compute_extreme_point(d), SolverError);
        continue;
      }
      const Vector v = lmo.compute_extreme_point(d);
      CHECK(is_permutation_matrix(v, n));
      CHECK(lmo.is_linear_feasible(v));
      CHECK(dot(d, v) == doctest::Approx(*best).epsilon(1e-12));
    }
  }
}

TEST_CASE("Birkhoff feasibility check") {
  BirkhoffLMO lmo(3);
  Vector id(9, 0.0);
  for (std::size_t i = 0; i < 3; ++i) id[BirkhoffLMO::encode(i, i, 3)] = 1.0;
  CHECK(lmo.is_linear_feasible(id));
  Vector bad = id;
  bad[0] = 0.9;
  CHECK_FALSE(lmo.is_linear_feasible(bad));
}

TEST_CASE("Birkhoff in-face oracle stays on the minimal face") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  const std::size_t n = 5;
  BirkhoffLMO lmo(n);
  Vector d(n * n);
  for (double& x : d) x = g(rng);
  // X a permutation: the face is a point.
  const Vector p = lmo.compute_extreme_point(d);
  Vector d2(n * n);
  for (double& x : d2) x = g(rng);
  CHECK(lmo.compute_inface_extreme_point(d2, p) == p);
  // X uniform: the face is the whole polytope.
  const Vector uni(n * n, 1.0 / n);
  CHECK(lmo.compute_inface_extreme_point(d2, uni) == lmo.compute_extreme_point(d2));
  // X a mix of three permutations: vertex support within support(X).
  for (int trial = 0; trial < 30; ++trial) {
    Vector x(n * n, 0.0);
    for (int k = 0; k < 3; ++k) {
      Vector dk(n * n);
      for (double& v : dk) v = g(rng);
      const Vector pk = lmo.compute_extreme_point(dk);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += pk[i] / 3.0;
    }
    for (double& v : d2) v = g(rng);
    const Vector a = lmo.compute_inface_extreme_point(d2, x);
    CHECK(is_permutation_matrix(a, n));
    for (std::size_t i = 0; i < x.size(); ++i)
      if (a[i] == 1.0) CHECK(x[i] > 0.0);
  }
}

TEST_CASE("Birkhoff maximum step") {
  const std::size_t n = 3;
  BirkhoffLMO lmo(n);
  const Vector uni(n * n, 1.0 / 3.0);
  CHECK(lmo.dicg_maximum_step(Vector(n * n, 0.0), uni) == 1.0);
  Vector x(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) x[BirkhoffLMO::encode(i, i, n)] = 1.0;
  Vector d(n * n, 0.0);
  d[BirkhoffLMO::encode(0, 1, n)] = 1.0;  // pushes a zero entry below 0
  CHECK(lmo.dicg_maximum_step(d, x) == 0.0);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    Vector dir(n * n);
    for (double& v : dir) v = 0.3 * g(rng);
    const double gm = lmo.dicg_maximum_step(dir, uni);
    CHECK(gm >= 0.0);
    CHECK(gm <= 1.0);
    bool at_bound = gm == 1.0;
    for (std::size_t i = 0; i < uni.size(); ++i) {
      const double y = uni[i] - gm * dir[i];
      CHECK(y >= -1e-12);
      CHECK(y <= 1.0 + 1e-12);
      at_bound = at_bound || std::abs(y) <= 1e-9 || std::abs(y - 1.0) <= 1e-9;
    }
    CHECK(at_bound);
  }
}

// ---- flows ----

TEST_CASE("flow oracle picks the cheaper of two parallel arcs") {
  FlowLMO lmo(2, {{0, 1}, {0, 1}}, {1}, {{{0, 3.0}}});
  CHECK(lmo.compute_extreme_point(Vector{1.0, 2.0}) == Vector{3.0, 0.0});
}

TEST_CASE("flow oracle on the small traffic network conserves flow") {
  const auto inst = small_traffic_instance();
  FlowLMO lmo(inst.num_nodes, inst.arcs, inst.destinations, inst.demands);
  const Vector v = lmo.compute_extreme_point(Vector(inst.arcs.size(), 1.0));
  CHECK(lmo.is_feasible(v));
  // S1 -> 1 -> 2 -> D is the unique 3-arc route.
  CHECK(v[0] == 1.0);
  CHECK(v[1] == 1.0);
  CHECK(v[6] == 1.0);
}

TEST_CASE("flow oracle rejects unreachable demand") {
  CHECK(kind_of([] { FlowLMO(3, {{0, 1}}, {2}, {{{0, 1.0}}}); }) == ErrorKind::UnreachableDemand);
}

TEST_CASE("flow oracle is optimal and balanced on random DAGs") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t nodes = 7;
    std::vector<Arc> arcs;
    for (std::size_t i = 0; i + 1 < nodes; ++i) arcs.push_back({i, i + 1});
    for (std::size_t i = 0; i < nodes; ++i)
      for (std::size_t j = i + 2; j < nodes; ++j)
        if (u(rng) < 0.4) arcs.push_back({i, j});
    std::vector<std::size_t> dests{nodes - 1, nodes - 2};
    std::vector<std::vector<Demand>> demands{{{0, 1.5}, {2, 2.0}}, {{1, 0.5}, {3, 1.0}}};
    FlowLMO lmo(nodes, arcs, dests, demands);
    Vector d(lmo.dimension());
    for (double& x : d) x = u(rng) * 5.0;
    const Vector v = lmo.compute_extreme_point(d);
    CHECK(lmo.is_feasible(v));
    CHECK(v == lmo.compute_extreme_point_serial(d));
    // Floyd-Warshall per destination block.
    double best = 0.0;
    for (std::size_t z = 0; z < dests.size(); ++z) {
      std::vector<std::vector<double>> dist(nodes, std::vector<double>(nodes, oracle::kInf));
      for (std::size_t i = 0; i < nodes; ++i) dist[i][i] = 0.0;
      for (std::size_t e = 0; e < arcs.size(); ++e)
        dist[arcs[e].tail][arcs[e].head] = std::min(dist[arcs[e].tail][arcs[e].head], d[z * arcs.size() + e]);
      for (std::size_t k = 0; k < nodes; ++k)
        for (std::size_t i = 0; i < nodes; ++i)
          for (std::size_t j = 0; j < nodes; ++j) dist[i][j] = std::min(dist[i][j], dist[i][k] + dist[k][j]);
      for (const Demand& dm : demands[z]) best += dm.amount * dist[dm.source][dests[z]];
    }
    CHECK(dot(d, v) == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("flow oracle clamps negative costs") {
  FlowLMO lmo(2, {{0, 1}, {0, 1}}, {1}, {{{0, 1.0}}});
  const Vector v = lmo.compute_extreme_point(Vector{-1.0, 0.5});
  CHECK(v == Vector{1.0, 0.0});
  CHECK(lmo.clamped_entries() == 1);
}

// ---- hypercube ----

TEST_CASE("hypercube in-face and maximum step") {
  HypercubeLMO cube(3);
  const std::vector<std::size_t> vars{0, 1, 2};
  const Vector lo(3, 0.0), hi(3, 1.0);
  const Vector x{0.0, 0.5, 1.0};
  const Vector a = cube.bounded_compute_inface_extreme_point(Vector{-1.0, -1.0, 1.0}, x, lo, hi, vars);
  CHECK(a[0] == 0.0);
  CHECK(a[2] == 1.0);
  CHECK(cube.bounded_dicg_maximum_step(Vector{1.0, 0.0, 0.0}, x, lo, hi, vars) == 0.0);
  CHECK(cube.bounded_dicg_maximum_step(Vector{0.0, 1.0, 0.0}, x, lo, hi, vars) == doctest::Approx(0.5));
}
