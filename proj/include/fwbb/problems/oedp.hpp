#pragma once

#include <cstdint>
#include <optional>

#include "fwbb/bnb.hpp"

namespace fwbb {

enum class OEDPCriterion { A, D };
const char* to_string(OEDPCriterion criterion);

/// Choose N experiments (integer repetitions x_i <= u_i) among the m rows of
/// A to make the information matrix A^T diag(x) A as informative as possible.
struct OEDPInstance {
  std::size_t m = 0;
  std::size_t n = 0;
  /// Row-major m x n; must have rank n.
  Vector a;
  double budget = 0.0;
  Vector upper;
  OEDPCriterion criterion = OEDPCriterion::A;

  /// Checks shapes, integrality of budget and bounds, n <= N <= sum(u), and rank(A) = n.
  void validate() const;
};

/// Numerical rank of a row-major m x n matrix (column-pivoted QR).
std::size_t matrix_rank(std::span<const double> a, std::size_t m, std::size_t n);

/// True iff A^T diag(x) A factorises with every squared pivot above
/// 1e-13 times its largest diagonal entry.
bool oedp_domain_oracle(const OEDPInstance& inst, std::span<const double> x);
/// A: trace(X^-1). D: -log det X. Throws DomainViolation outside the domain.
double oedp_objective(const OEDPInstance& inst, std::span<const double> x);
void oedp_gradient(const OEDPInstance& inst, std::span<double> storage, std::span<const double> x);

/// Greedy scan in ascending row order keeping rows that are linearly
/// independent of those already kept, among rows with allowed[i]; stops at n rows.
std::vector<std::size_t> independent_rows(const OEDPInstance& inst, std::span<const double> allowed_upper);

/// Integer domain point under dense bounds (lower/upper over all m variables),
/// or nothing when none is found: start at the lower bounds, fill a set of
/// independent experiments first, then the smallest entries.
std::optional<Vector> oedp_domain_point(const OEDPInstance& inst, std::span<const double> lower,
                                        std::span<const double> upper);

Problem make_oedp_problem(const OEDPInstance& inst);

/// Projection warm start: BPCG on 0.5 ||x - x0||^2 from the vertex for the
/// direction (1, ..., m), stopped a few iterations after entering the domain.
ActiveSet oedp_warm_start(const OEDPInstance& inst, SelfManagedLMO& lmo, std::span<const double> x0,
                          int max_iter = 10000);

/// BPCG with secant line search, hyperplane-aware rounding with probability
/// 0.7, and a root warm start built from the domain point at the root bounds.
Settings oedp_settings(const OEDPInstance& inst, const Problem& problem);

/// Gaussian experiment matrix with rank n, bounds u_i in 1..max_upper.
OEDPInstance generate_oedp(std::size_t m, std::size_t n, double budget, double max_upper,
                           OEDPCriterion criterion, std::uint64_t seed);

}  // namespace fwbb
