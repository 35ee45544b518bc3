#include "fwbb/problems/graph_isomorphism.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "fwbb/errors.hpp"
#include "fwbb/kernels.hpp"
#include "fwbb/polytopes/birkhoff.hpp"

namespace fwbb {

void GraphIsomorphismInstance::validate() const {
  auto fail = [](const char* what) { throw SolverError(ErrorKind::InvalidArgument, what); };
  if (n == 0) fail("graph must have at least one vertex");
  if (a.size() != n * n || b.size() != n * n) fail("adjacency matrices must be n x n");
  for (const auto* m : {&a, &b}) {
    for (std::size_t i = 0; i < n; ++i) {
      if ((*m)[i * n + i] != 0.0) fail("adjacency diagonal must be zero");
      for (std::size_t j = 0; j < n; ++j) {
        const double v = (*m)[i * n + j];
        if (v != 0.0 && v != 1.0) fail("adjacency entries must be 0 or 1");
        if (v != (*m)[j * n + i]) fail("adjacency matrix must be symmetric");
      }
    }
  }
}

namespace {

// Adjacency matrices are symmetric, so the row-major input is also its own
// column-major form.
Vector residual(const GraphIsomorphismInstance& inst, std::span<const double> x) {
  const std::size_t n = inst.n;
  Vector xa(n * n), bx(n * n);
  kernels::matmul(x, inst.a, xa, n);
  kernels::matmul(inst.b, x, bx, n);
  for (std::size_t k = 0; k < xa.size(); ++k) xa[k] -= bx[k];
  return xa;
}

}  // namespace

double gip_objective(const GraphIsomorphismInstance& inst, std::span<const double> x) {
  return kernels::squared_norm(residual(inst, x));
}

void gip_gradient(const GraphIsomorphismInstance& inst, std::span<double> storage, std::span<const double> x) {
  const std::size_t n = inst.n;
  const Vector r = residual(inst, x);
  Vector bt_r(n * n);
  // A^T = A and B^T = B.
  kernels::matmul(r, inst.a, storage, n);
  kernels::matmul(inst.b, r, bt_r, n);
  for (std::size_t k = 0; k < n * n; ++k) storage[k] = 2.0 * (storage[k] - bt_r[k]);
}

const char* to_string(IsomorphismVerdict verdict) {
  switch (verdict) {
    case IsomorphismVerdict::Isomorphic: return "isomorphic";
    case IsomorphismVerdict::NonIsomorphic: return "non-isomorphic";
    case IsomorphismVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

BnBCallback gip_tree_callback() {
  return [](Tree& tree, const NodeInfo*, const BnBCallbackFlags&) {
    if (tree.has_incumbent() && tree.incumbent_value() <= kIsomorphismTol) {
      tree.request_stop("Optimal solution found.");
      return;
    }
    if (tree.global_lower_bound() > kIsomorphismTol)
      tree.request_stop("Tree lower bound already positive. No solution possible.");
  };
}

BranchCallback gip_branch_callback() {
  // A node whose bound is already positive cannot contain a zero-cost
  // permutation, so its children are not needed.
  return [](const Tree&, const NodeInfo& node) { return node.lower_bound <= kIsomorphismTol; };
}

Settings gip_settings() {
  Settings s;
  s.frank_wolfe.variant = FWVariant::DICG;
  s.frank_wolfe.lazy = true;
  s.frank_wolfe.line_search.kind = LineSearchKind::Secant;
  s.branch_and_bound.tolerances.max_fw_iter = 1000;
  s.branch_and_bound.bnb_callback = gip_tree_callback();
  s.branch_and_bound.branch_callback = gip_branch_callback();
  return s;
}

Problem make_gip_problem(const GraphIsomorphismInstance& inst) {
  inst.validate();
  auto data = std::make_shared<const GraphIsomorphismInstance>(inst);
  Problem p;
  p.objective = [data](std::span<const double> x) { return gip_objective(*data, x); };
  p.gradient = [data](std::span<double> g, std::span<const double> x) { gip_gradient(*data, g, x); };
  p.lmo = std::make_shared<BirkhoffLMO>(data->n);
  return p;
}

IsomorphismVerdict gip_verdict(const SolveResult& result) {
  if (result.primal <= kIsomorphismTol) return IsomorphismVerdict::Isomorphic;
  if (result.dual_bound > kIsomorphismTol) return IsomorphismVerdict::NonIsomorphic;
  return IsomorphismVerdict::Inconclusive;
}

std::vector<double> adjacency_from_edges(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<double> adj(n * n, 0.0);
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n || u == v) throw SolverError(ErrorKind::InvalidArgument, "invalid edge");
    adj[u * n + v] = adj[v * n + u] = 1.0;
  }
  return adj;
}

std::vector<Edge> petersen_edges() {
  return {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {5, 7}, {7, 9}, {9, 6},
          {6, 8}, {8, 5}, {0, 5}, {1, 6}, {2, 7}, {3, 8}, {4, 9}};
}

std::vector<std::size_t> petersen_relabeling() { return {2, 7, 0, 9, 5, 1, 8, 4, 6, 3}; }

std::vector<double> relabel(const std::vector<double>& adjacency, std::size_t n,
                            const std::vector<std::size_t>& perm) {
  std::vector<double> out(n * n, 0.0);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) out[perm[u] * n + perm[v]] = adjacency[u * n + v];
  return out;
}

std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

std::vector<double> random_cubic_graph(std::size_t n, std::uint64_t seed) {
  if (n < 4 || n % 2 != 0)
    throw SolverError(ErrorKind::InvalidArgument, "3-regular graphs need an even vertex count >= 4");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> points(3 * n);
  for (std::size_t k = 0; k < points.size(); ++k) points[k] = k / 3;
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::shuffle(points.begin(), points.end(), rng);
    std::vector<double> adj(n * n, 0.0);
    bool simple = true;
    for (std::size_t k = 0; simple && k < points.size(); k += 2) {
      const std::size_t u = points[k], v = points[k + 1];
      if (u == v || adj[u * n + v] != 0.0) simple = false;
      else adj[u * n + v] = adj[v * n + u] = 1.0;
    }
    if (simple) return adj;
  }
  throw SolverError(ErrorKind::InvalidArgument, "pairing model did not produce a simple graph");
}

Vector permutation_matrix(const std::vector<std::size_t>& perm) {
  const std::size_t n = perm.size();
  Vector x(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) x[BirkhoffLMO::encode(perm[j], j, n)] = 1.0;
  return x;
}

}  // namespace fwbb
