#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fwbb/errors.hpp"
#include "fwbb/problems/graph_isomorphism.hpp"
#include "fwbb/problems/network_design.hpp"
#include "fwbb/problems/oedp.hpp"
#include "support/oracles.hpp"

using namespace fwbb;

namespace {

constexpr double kFdTol = 1e-5;

Vector random_nd_point(const NetworkDesignInstance& inst, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Vector x(inst.dimension());
  for (std::size_t k = 0; k < inst.num_design(); ++k) x[k] = u(rng);
  for (std::size_t i = inst.num_design(); i < x.size(); ++i) x[i] = 2.0 * u(rng);
  return x;
}

Vector random_positive(std::size_t m, std::mt19937_64& rng, double lo = 0.2, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector x(m);
  for (double& v : x) v = u(rng);
  return x;
}

Vector random_graph(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution edge(p);
  Vector a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (edge(rng)) a[i * n + j] = a[j * n + i] = 1.0;
  return a;
}

OEDPInstance identity_oedp(std::size_t n, OEDPCriterion c) {
  OEDPInstance inst;
  inst.m = inst.n = n;
  inst.a.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) inst.a[i * n + i] = 1.0;
  inst.budget = static_cast<double>(n);
  inst.upper.assign(n, 1.0);
  inst.criterion = c;
  return inst;
}

template <class F>
void check_convex(F f, const std::vector<Vector>& points) {
  for (std::size_t k = 0; k + 1 < points.size(); k += 2) {
    const Vector& x = points[k];
    const Vector& y = points[k + 1];
    for (double t : {0.25, 0.5, 0.75}) {
      Vector z(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) z[i] = t * x[i] + (1.0 - t) * y[i];
      CHECK(f(z) <= t * f(x) + (1.0 - t) * f(y) + 1e-8);
    }
  }
}

}  // namespace

// ---- network design ----------------------------------------------------------

TEST_CASE("network design: penalty vanishes when linking constraints hold") {
  const auto inst = small_traffic_instance();
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    Vector x = random_nd_point(inst, rng);
    for (std::size_t k = 0; k < inst.num_design(); ++k) x[k] = 1.0;
    // Flows up to the total demand respect x <= M y with y = 1.
    for (std::size_t i = inst.num_design(); i < x.size(); ++i) x[i] = std::min(x[i], 2.0);
    CHECK(nd_penalty(inst, x) == 0.0);
    CHECK(nd_objective(inst, x) == nd_operating_cost(inst, x));
  }
  Vector zero(inst.dimension(), 0.0);
  const double sum_alpha = std::accumulate(inst.alpha.begin(), inst.alpha.end(), 0.0);
  CHECK(nd_objective(inst, zero) == doctest::Approx(sum_alpha));
  // Flow on an unbuilt candidate arc is penalised.
  zero[inst.num_design() + inst.candidate_arcs[0]] = 1.0;
  CHECK(nd_penalty(inst, zero) == doctest::Approx(inst.mu));
}

TEST_CASE("network design: zero point costs the fixed travel terms") {
  auto inst = small_traffic_instance();
  std::fill(inst.alpha.begin(), inst.alpha.end(), 0.7);
  const Vector zero(inst.dimension(), 0.0);
  CHECK(nd_objective(inst, zero) == doctest::Approx(0.7 * static_cast<double>(inst.arcs.size())));
}

TEST_CASE("network design: gradient matches finite differences") {
  std::mt19937_64 rng(2);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto inst = generate_network_design(8, 2, 2, 0.5, seed);
    for (int trial = 0; trial < 5; ++trial) {
      const Vector x = random_nd_point(inst, rng);
      Vector g(x.size());
      nd_gradient(inst, g, x);
      CHECK(oracle::gradient_error([&](const Vector& p) { return nd_objective(inst, p); }, g, x) <= kFdTol);
    }
  }
}

TEST_CASE("network design: objective is convex") {
  const auto inst = generate_network_design(8, 2, 2, 0.5, 3);
  std::mt19937_64 rng(3);
  std::vector<Vector> pts;
  for (int k = 0; k < 200; ++k) pts.push_back(random_nd_point(inst, rng));
  check_convex([&](const Vector& x) { return nd_objective(inst, x); }, pts);
}

TEST_CASE("network design: generated instances validate and route") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = generate_network_design(10, 2, 3, 0.4, seed);
    CHECK_NOTHROW(inst.validate());
    CHECK_NOTHROW(make_network_design_problem(inst));
  }
  auto bad = small_traffic_instance();
  bad.arcs[0].head = 99;
  CHECK_THROWS_AS(bad.validate(), SolverError);
}

// ---- graph isomorphism -------------------------------------------------------

TEST_CASE("GIP objective examples") {
  const std::size_t n = 10;
  const Vector a = adjacency_from_edges(n, petersen_edges());
  GraphIsomorphismInstance same{n, a, a};
  Vector id(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) id[i * n + i] = 1.0;
  CHECK(gip_objective(same, id) == 0.0);
  Vector g(n * n);
  gip_gradient(same, g, id);
  CHECK(std::all_of(g.begin(), g.end(), [](double v) { return v == 0.0; }));

  const auto perm = petersen_relabeling();
  GraphIsomorphismInstance relabeled{n, a, relabel(a, n, perm)};
  CHECK(gip_objective(relabeled, permutation_matrix(perm)) == 0.0);
  CHECK(gip_objective(relabeled, id) > 0.0);
}

TEST_CASE("GIP gradient matches finite differences") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 5 + trial % 4;
    GraphIsomorphismInstance inst{n, random_graph(n, 0.4, rng), random_graph(n, 0.4, rng)};
    const Vector x = random_positive(n * n, rng, 0.0, 1.0);
    Vector g(n * n);
    gip_gradient(inst, g, x);
    CHECK(oracle::gradient_error([&](const Vector& p) { return gip_objective(inst, p); }, g, x) <= kFdTol);
  }
}

TEST_CASE("GIP objective is convex") {
  std::mt19937_64 rng(5);
  const std::size_t n = 6;
  GraphIsomorphismInstance inst{n, random_graph(n, 0.5, rng), random_graph(n, 0.5, rng)};
  std::vector<Vector> pts;
  for (int k = 0; k < 200; ++k) pts.push_back(random_positive(n * n, rng, 0.0, 1.0));
  check_convex([&](const Vector& x) { return gip_objective(inst, x); }, pts);
}

TEST_CASE("GIP objective is zero exactly at permutations with XA = BX") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t n = 4 + trial % 3;
    const Vector a = random_graph(n, 0.5, rng);
    const Vector b = trial % 2 == 0 ? relabel(a, n, random_permutation(n, rng())) : random_graph(n, 0.5, rng);
    GraphIsomorphismInstance inst{n, a, b};
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    bool any_zero = false;
    do {
      const Vector x = permutation_matrix(perm);
      bool commutes = true;
      for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v) commutes = commutes && a[u * n + v] == b[perm[u] * n + perm[v]];
      const bool zero = gip_objective(inst, x) <= 1e-12;
      CHECK(zero == commutes);
      any_zero = any_zero || zero;
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(any_zero == oracle::isomorphic(a, b, n));
  }
}

TEST_CASE("GIP helpers") {
  const std::size_t n = 10;
  const auto cubic = random_cubic_graph(n, 3);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0.0;
    for (std::size_t j = 0; j < n; ++j) deg += cubic[i * n + j];
    CHECK(deg == 3.0);
    CHECK(cubic[i * n + i] == 0.0);
  }
  CHECK(random_cubic_graph(n, 3) == cubic);
  CHECK_THROWS_AS(random_cubic_graph(5, 1), SolverError);
  const auto p = random_permutation(8, 11);
  std::vector<std::size_t> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < 8; ++i) CHECK(sorted[i] == i);
  CHECK(std::string(to_string(IsomorphismVerdict::Inconclusive)) == "inconclusive");
}

TEST_CASE("GIP verdicts follow the incumbent and the bound") {
  SolveResult r;
  r.primal = 0.0;
  r.dual_bound = 0.0;
  CHECK(gip_verdict(r) == IsomorphismVerdict::Isomorphic);
  r.primal = 2.0;
  r.dual_bound = 0.7;
  CHECK(gip_verdict(r) == IsomorphismVerdict::NonIsomorphic);
  r.dual_bound = 0.0;
  CHECK(gip_verdict(r) == IsomorphismVerdict::Inconclusive);
}

// ---- optimal experiment design ----------------------------------------------

TEST_CASE("OEDP identity examples") {
  const std::size_t n = 5;
  const Vector ones(n, 1.0);
  Vector g(n);
  const auto a = identity_oedp(n, OEDPCriterion::A);
  CHECK(oedp_objective(a, ones) == doctest::Approx(static_cast<double>(n)));
  oedp_gradient(a, g, ones);
  for (double v : g) CHECK(v == doctest::Approx(-1.0));
  const auto d = identity_oedp(n, OEDPCriterion::D);
  CHECK(oedp_objective(d, ones) == doctest::Approx(0.0).epsilon(1e-12));
  oedp_gradient(d, g, ones);
  for (double v : g) CHECK(v == doctest::Approx(-1.0));
}

TEST_CASE("OEDP domain oracle") {
  const auto inst = generate_oedp(12, 4, 6, 2, OEDPCriterion::A, 3);
  CHECK_FALSE(oedp_domain_oracle(inst, Vector(12, 0.0)));
  const auto rows = independent_rows(inst, inst.upper);
  REQUIRE(rows.size() == 4);
  Vector x(12, 0.0);
  for (std::size_t i : rows) x[i] = 1.0;
  CHECK(oedp_domain_oracle(inst, x));
  x[rows.back()] = 0.0;
  CHECK_FALSE(oedp_domain_oracle(inst, x));
  CHECK_THROWS_AS(oedp_objective(inst, x), SolverError);
  Vector neg(12, 1.0);
  neg[0] = -0.5;
  CHECK_FALSE(oedp_domain_oracle(inst, neg));
}

TEST_CASE("OEDP gradients match finite differences") {
  std::mt19937_64 rng(7);
  for (auto c : {OEDPCriterion::A, OEDPCriterion::D}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto inst = generate_oedp(15, 4, 6, 3, c, seed);
      const Vector x = random_positive(inst.m, rng);
      REQUIRE(oedp_domain_oracle(inst, x));
      Vector g(inst.m);
      oedp_gradient(inst, g, x);
      CAPTURE(to_string(c));
      CHECK(oracle::gradient_error([&](const Vector& p) { return oedp_objective(inst, p); }, g, x) <= kFdTol);
    }
  }
}

TEST_CASE("OEDP objectives are convex") {
  std::mt19937_64 rng(8);
  for (auto c : {OEDPCriterion::A, OEDPCriterion::D}) {
    const auto inst = generate_oedp(12, 4, 6, 3, c, 2);
    std::vector<Vector> pts;
    for (int k = 0; k < 200; ++k) pts.push_back(random_positive(inst.m, rng, 0.05, 3.0));
    check_convex([&](const Vector& x) { return oedp_objective(inst, x); }, pts);
  }
}

TEST_CASE("OEDP matrix rank and validation") {
  CHECK(matrix_rank(Vector{1, 0, 0, 1, 1, 1}, 3, 2) == 2);
  CHECK(matrix_rank(Vector{1, 2, 2, 4, 3, 6}, 3, 2) == 1);
  auto inst = identity_oedp(3, OEDPCriterion::A);
  CHECK_NOTHROW(inst.validate());
  inst.budget = 2.0;  // below n
  CHECK_THROWS_AS(inst.validate(), SolverError);
  inst = identity_oedp(3, OEDPCriterion::A);
  inst.a[8] = 0.0;
  CHECK_THROWS_AS(inst.validate(), SolverError);
}

TEST_CASE("OEDP domain point examples") {
  const auto sq = identity_oedp(4, OEDPCriterion::D);
  const auto p = oedp_domain_point(sq, Vector(4, 0.0), sq.upper);
  REQUIRE(p);
  CHECK(*p == Vector(4, 1.0));
  const auto inst = generate_oedp(10, 3, 5, 2, OEDPCriterion::A, 1);
  CHECK_FALSE(oedp_domain_point(inst, Vector(10, 1.0), inst.upper).has_value());
}

TEST_CASE("OEDP domain points satisfy budget, bounds and the domain") {
  std::mt19937_64 rng(9);
  int produced = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto c = seed % 2 ? OEDPCriterion::A : OEDPCriterion::D;
    const auto inst = generate_oedp(20, 4, 8, 3, c, seed);
    Vector lo(inst.m, 0.0), hi = inst.upper;
    // Random node bounds: a few fixings on either side.
    for (int k = 0; k < 4; ++k) {
      const std::size_t i = rng() % inst.m;
      if (rng() % 2) hi[i] = 0.0;
      else lo[i] = std::min(1.0, hi[i]);
    }
    const auto x = oedp_domain_point(inst, lo, hi);
    if (!x) continue;
    ++produced;
    CHECK(std::accumulate(x->begin(), x->end(), 0.0) == doctest::Approx(inst.budget));
    for (std::size_t i = 0; i < inst.m; ++i) {
      CHECK((*x)[i] >= lo[i]);
      CHECK((*x)[i] <= hi[i]);
      CHECK(is_integral((*x)[i]));
    }
    CHECK(oedp_domain_oracle(inst, *x));
  }
  CHECK(produced >= 20);
}

TEST_CASE("OEDP warm start lands in the domain") {
  for (auto c : {OEDPCriterion::A, OEDPCriterion::D}) {
    const auto inst = generate_oedp(20, 4, 6, 2, c, 5);
    const auto problem = make_oedp_problem(inst);
    const auto x0 = oedp_domain_point(inst, Vector(inst.m, 0.0), inst.upper);
    REQUIRE(x0);
    const ActiveSet as = oedp_warm_start(inst, *problem.lmo, *x0);
    CHECK(oedp_domain_oracle(inst, as.iterate()));
    CHECK(as.invariants_hold());
    const Settings s = oedp_settings(inst, problem);
    REQUIRE(s.domain.active_set);
    CHECK(oedp_domain_oracle(inst, s.domain.active_set->iterate()));
    CHECK(s.heuristic.hyperplane_aware_rounding_prob == 0.7);
    REQUIRE(problem.hyperplane);
    CHECK(problem.hyperplane->budget == inst.budget);
  }
}

TEST_CASE("OEDP warm start from a vertex keeps a small active set") {
  // 0/1 bounds with budget n: every integer point is a vertex.
  auto inst = generate_oedp(6, 4, 4, 1, OEDPCriterion::D, 3);
  const auto problem = make_oedp_problem(inst);
  const auto x0 = oedp_domain_point(inst, Vector(inst.m, 0.0), inst.upper);
  REQUIRE(x0);
  const ActiveSet as = oedp_warm_start(inst, *problem.lmo, *x0);
  CHECK(oedp_domain_oracle(inst, as.iterate()));
  CHECK(as.size() <= 4);
}
