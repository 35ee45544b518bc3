#pragma once

#include <cstdint>

#include "fwbb/bnb.hpp"

namespace fwbb {

/// f(x) = 0.5 x^T Q x + c^T x over the box [lower, upper], integrality on integer_vars.
struct QuadraticInstance {
  std::size_t n = 0;
  Vector q;  // row-major n x n, symmetric positive semidefinite
  Vector c;
  Vector lower;
  Vector upper;
  std::vector<std::size_t> integer_vars;

  /// Throws InvalidArgument on inconsistent sizes or bounds.
  void validate() const;
};

double quadratic_objective(const QuadraticInstance& inst, std::span<const double> x);
void quadratic_gradient(const QuadraticInstance& inst, std::span<double> storage, std::span<const double> x);

/// Objective, gradient and a managed box LMO (the problem keeps its own copy of the data).
Problem make_quadratic_problem(const QuadraticInstance& inst);

/// Q = M^T M / n + 0.1 I with Gaussian M, minimiser drawn uniformly in the box
/// (so the continuous optimum is usually fractional); bounds [0, box] on every
/// coordinate, all variables integer.
QuadraticInstance generate_quadratic(std::size_t n, int box, std::uint64_t seed);

}  // namespace fwbb
