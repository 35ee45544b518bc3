#include "fwbb/problems/quadratic.hpp"

#include <random>

#include "fwbb/errors.hpp"
#include "fwbb/polytopes/hypercube.hpp"

namespace fwbb {

void QuadraticInstance::validate() const {
  if (n == 0) throw SolverError(ErrorKind::InvalidArgument, "quadratic instance needs n >= 1");
  if (q.size() != n * n || c.size() != n || lower.size() != n || upper.size() != n)
    throw SolverError(ErrorKind::InvalidArgument, "quadratic instance arrays have wrong sizes");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lower[i] <= upper[i])) throw SolverError(ErrorKind::InvalidArgument, "lower bound above upper bound");
    for (std::size_t j = 0; j < i; ++j)
      if (q[i * n + j] != q[j * n + i]) throw SolverError(ErrorKind::InvalidArgument, "Q must be symmetric");
  }
  for (std::size_t var : integer_vars)
    if (var >= n) throw SolverError(ErrorKind::InvalidArgument, "integer variable out of range");
}

double quadratic_objective(const QuadraticInstance& inst, std::span<const double> x) {
  const std::size_t n = inst.n;
  double value = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double qx = 0.0;
    for (std::size_t j = 0; j < n; ++j) qx += inst.q[i * n + j] * x[j];
    value += x[i] * (0.5 * qx + inst.c[i]);
  }
  return value;
}

void quadratic_gradient(const QuadraticInstance& inst, std::span<double> storage, std::span<const double> x) {
  const std::size_t n = inst.n;
  for (std::size_t i = 0; i < n; ++i) {
    double qx = inst.c[i];
    for (std::size_t j = 0; j < n; ++j) qx += inst.q[i * n + j] * x[j];
    storage[i] = qx;
  }
}

Problem make_quadratic_problem(const QuadraticInstance& inst) {
  inst.validate();
  auto data = std::make_shared<const QuadraticInstance>(inst);
  Problem p;
  p.objective = [data](std::span<const double> x) { return quadratic_objective(*data, x); };
  p.gradient = [data](std::span<double> g, std::span<const double> x) { quadratic_gradient(*data, g, x); };
  auto box = std::make_shared<HypercubeLMO>(inst.lower, inst.upper);
  Vector lo, hi;
  for (std::size_t var : inst.integer_vars) {
    lo.push_back(inst.lower[var]);
    hi.push_back(inst.upper[var]);
  }
  p.lmo = std::make_shared<ManagedLMO>(box, lo, hi, inst.integer_vars);
  p.integer_vars = inst.integer_vars;
  return p;
}

QuadraticInstance generate_quadratic(std::size_t n, int box, std::uint64_t seed) {
  if (n == 0 || box < 1) throw SolverError(ErrorKind::InvalidArgument, "need n >= 1 and box >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, static_cast<double>(box));
  QuadraticInstance inst;
  inst.n = n;
  Vector m(n * n);
  for (double& v : m) v = normal(rng);
  inst.q.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += m[k * n + i] * m[k * n + j];
      inst.q[i * n + j] = s / static_cast<double>(n) + (i == j ? 0.1 : 0.0);
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) inst.q[j * n + i] = inst.q[i * n + j];
  Vector center(n);
  for (double& v : center) v = uniform(rng);
  inst.c.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inst.c[i] -= inst.q[i * n + j] * center[j];
  inst.lower.assign(n, 0.0);
  inst.upper.assign(n, static_cast<double>(box));
  for (std::size_t i = 0; i < n; ++i) inst.integer_vars.push_back(i);
  return inst;
}

}  // namespace fwbb
