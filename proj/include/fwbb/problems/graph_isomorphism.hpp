#pragma once

#include <cstdint>
#include <vector>

#include "fwbb/bnb.hpp"

namespace fwbb {

/// Two graphs given by n x n symmetric 0/1 adjacency matrices (row-major).
/// The decision variable X is an n x n matrix in column-major order, matching
/// BirkhoffLMO's indexing.
struct GraphIsomorphismInstance {
  std::size_t n = 0;
  std::vector<double> a;
  std::vector<double> b;

  void validate() const;
};

/// ||XA - BX||_F^2
double gip_objective(const GraphIsomorphismInstance& inst, std::span<const double> x);
/// 2 (R A^T - B^T R) with R = XA - BX.
void gip_gradient(const GraphIsomorphismInstance& inst, std::span<double> storage, std::span<const double> x);

/// Verdict thresholds: an incumbent at most this value proves isomorphism, a
/// global lower bound above it proves non-isomorphism.
inline constexpr double kIsomorphismTol = 1e-8;

enum class IsomorphismVerdict { Isomorphic, NonIsomorphic, Inconclusive };
const char* to_string(IsomorphismVerdict verdict);

BnBCallback gip_tree_callback();
BranchCallback gip_branch_callback();

/// DICG, lazy, secant line search, the two callbacks above.
Settings gip_settings();
Problem make_gip_problem(const GraphIsomorphismInstance& inst);

IsomorphismVerdict gip_verdict(const SolveResult& result);

using Edge = std::pair<std::size_t, std::size_t>;

std::vector<double> adjacency_from_edges(std::size_t n, const std::vector<Edge>& edges);
std::vector<Edge> petersen_edges();
/// Permutation used to draw the second Petersen representation.
std::vector<std::size_t> petersen_relabeling();
/// Edge (u, v) becomes (perm[u], perm[v]).
std::vector<double> relabel(const std::vector<double>& adjacency, std::size_t n,
                            const std::vector<std::size_t>& perm);
/// Uniform random permutation of 0..n-1.
std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed);
/// Simple random 3-regular graph via the pairing model (rejection sampling).
std::vector<double> random_cubic_graph(std::size_t n, std::uint64_t seed);
/// Column-major permutation matrix P with P[perm[j], j] = 1.
Vector permutation_matrix(const std::vector<std::size_t>& perm);

}  // namespace fwbb
