#include "fwbb/problems/oedp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fwbb/errors.hpp"
#include "fwbb/kernels.hpp"
#include "fwbb/polytopes/simplex_knapsack.hpp"

namespace fwbb {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kPivotRelTol = 1e-13;

Eigen::Map<const RowMatrix> rows_of(const OEDPInstance& inst) {
  return {inst.a.data(), static_cast<Eigen::Index>(inst.m), static_cast<Eigen::Index>(inst.n)};
}

// Cholesky factor of the information matrix, or nothing outside the domain.
std::optional<Eigen::LLT<Eigen::MatrixXd>> factorize(const OEDPInstance& inst, std::span<const double> x) {
  const std::size_t n = inst.n;
  Vector buf(n * n);
  kernels::information_matrix(inst.a, x, inst.m, n, buf);
  Eigen::Map<const Eigen::MatrixXd> info(buf.data(), n, n);
  const Eigen::MatrixXd sym = 0.5 * (info + info.transpose());
  const double scale = sym.diagonal().maxCoeff();
  if (!(scale > 0.0) || !std::isfinite(scale)) return std::nullopt;
  Eigen::LLT<Eigen::MatrixXd> llt(sym);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Eigen::MatrixXd l = llt.matrixL();
  for (std::size_t k = 0; k < n; ++k) {
    const double piv = l(k, k);
    if (!(piv * piv > kPivotRelTol * scale)) return std::nullopt;
  }
  return llt;
}

Eigen::LLT<Eigen::MatrixXd> factorize_or_throw(const OEDPInstance& inst, std::span<const double> x) {
  auto llt = factorize(inst, x);
  if (!llt) throw SolverError(ErrorKind::DomainViolation, "information matrix is not positive definite");
  return std::move(*llt);
}

}  // namespace

const char* to_string(OEDPCriterion criterion) { return criterion == OEDPCriterion::A ? "A" : "D"; }

std::size_t matrix_rank(std::span<const double> a, std::size_t m, std::size_t n) {
  if (m == 0 || n == 0) return 0;
  Eigen::Map<const RowMatrix> mat(a.data(), m, n);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(mat);
  return static_cast<std::size_t>(qr.rank());
}

void OEDPInstance::validate() const {
  auto fail = [](const char* what) { throw SolverError(ErrorKind::InvalidArgument, what); };
  if (n == 0 || m < n) fail("OEDP needs m >= n >= 1");
  if (a.size() != m * n) fail("experiment matrix must be m x n");
  if (upper.size() != m) fail("one upper bound per experiment required");
  for (double v : a)
    if (!std::isfinite(v)) fail("experiment matrix entries must be finite");
  if (budget != std::round(budget)) fail("budget must be an integer");
  if (budget < static_cast<double>(n)) fail("budget must be at least n");
  double total = 0.0;
  for (double u : upper) {
    if (u < 0.0 || u != std::round(u)) fail("upper bounds must be nonnegative integers");
    total += u;
  }
  if (total < budget) fail("upper bounds must sum to at least the budget");
  if (matrix_rank(a, m, n) != n) fail("experiment matrix must have full column rank");
}

bool oedp_domain_oracle(const OEDPInstance& inst, std::span<const double> x) {
  for (double v : x)
    if (v < -kAtol) return false;
  return factorize(inst, x).has_value();
}

double oedp_objective(const OEDPInstance& inst, std::span<const double> x) {
  const auto llt = factorize_or_throw(inst, x);
  if (inst.criterion == OEDPCriterion::D) {
    const Eigen::MatrixXd l = llt.matrixL();
    return -2.0 * l.diagonal().array().log().sum();
  }
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(inst.n, inst.n));
  return inv.trace();
}

void oedp_gradient(const OEDPInstance& inst, std::span<double> storage, std::span<const double> x) {
  const auto llt = factorize_or_throw(inst, x);
  const auto a = rows_of(inst);
  const Eigen::MatrixXd at = a.transpose();
  if (inst.criterion == OEDPCriterion::D) {
    // a_i^T X^-1 a_i = ||L^-1 a_i||^2
    const Eigen::MatrixXd w = llt.matrixL().solve(at);
    for (std::size_t i = 0; i < inst.m; ++i) storage[i] = -w.col(i).squaredNorm();
  } else {
    const Eigen::MatrixXd w = llt.solve(at);
    for (std::size_t i = 0; i < inst.m; ++i) storage[i] = -w.col(i).squaredNorm();
  }
}

std::vector<std::size_t> independent_rows(const OEDPInstance& inst, std::span<const double> allowed_upper) {
  const auto a = rows_of(inst);
  std::vector<Eigen::VectorXd> basis;
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < inst.m && picked.size() < inst.n; ++i) {
    if (!(allowed_upper[i] > 0.0)) continue;
    Eigen::VectorXd r = a.row(i).transpose();
    const double norm0 = r.norm();
    if (norm0 == 0.0) continue;
    // Two Gram-Schmidt passes for numerical stability.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) r -= q.dot(r) * q;
    const double rn = r.norm();
    if (rn <= 1e-10 * norm0) continue;
    basis.push_back(r / rn);
    picked.push_back(i);
  }
  return picked;
}

std::optional<Vector> oedp_domain_point(const OEDPInstance& inst, std::span<const double> lower,
                                        std::span<const double> upper) {
  const std::size_t m = inst.m;
  Vector lb(m), ub(m);
  for (std::size_t i = 0; i < m; ++i) {
    lb[i] = std::max(0.0, std::isfinite(lower[i]) ? lower[i] : 0.0);
    ub[i] = std::min(inst.upper[i], std::isfinite(upper[i]) ? upper[i] : inst.upper[i]);
    if (lb[i] > ub[i]) return std::nullopt;
  }
  const double n_budget = inst.budget;
  if (kernels::compensated_sum(lb) > n_budget + kAtol) return std::nullopt;
  if (!oedp_domain_oracle(inst, ub)) return std::nullopt;

  Vector x = lb;
  const std::vector<std::size_t> s = independent_rows(inst, ub);
  // argmin of x over idx with x < ub, ties to the lowest index.
  auto add_to_min = [&](const std::vector<std::size_t>& idx) {
    std::optional<std::size_t> best;
    for (std::size_t i : idx)
      if (x[i] < ub[i] && (!best || x[i] < x[*best])) best = i;
    if (best) x[*best] += 1.0;
    return best.has_value();
  };
  std::vector<std::size_t> all(m);
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (;;) {
    const double total = kernels::compensated_sum(x);
    if (std::abs(total - n_budget) <= kAtol) {
      if (oedp_domain_oracle(inst, x)) return x;
      return std::nullopt;
    }
    if (total > n_budget) return std::nullopt;
    if (add_to_min(s)) continue;
    if (!add_to_min(all)) return std::nullopt;
  }
}

Problem make_oedp_problem(const OEDPInstance& inst) {
  inst.validate();
  auto data = std::make_shared<const OEDPInstance>(inst);
  Problem p;
  p.objective = [data](std::span<const double> x) { return oedp_objective(*data, x); };
  p.gradient = [data](std::span<double> g, std::span<const double> x) { oedp_gradient(*data, g, x); };
  p.domain_oracle = [data](std::span<const double> x) { return oedp_domain_oracle(*data, x); };
  p.domain_point = [data](std::span<const double> lo, std::span<const double> hi) {
    return oedp_domain_point(*data, lo, hi);
  };
  auto inner = std::make_shared<SimplexKnapsackLMO>(data->budget, data->upper);
  std::vector<std::size_t> int_vars(data->m);
  std::iota(int_vars.begin(), int_vars.end(), std::size_t{0});
  const Vector lo(data->m, 0.0);
  p.lmo = std::make_shared<ManagedLMO>(inner, lo, data->upper, int_vars);
  p.integer_vars = int_vars;
  p.hyperplane = HyperplaneData{data->budget, data->upper};
  return p;
}

ActiveSet oedp_warm_start(const OEDPInstance& inst, SelfManagedLMO& lmo, std::span<const double> x0,
                          int max_iter) {
  Vector direction(inst.m);
  std::iota(direction.begin(), direction.end(), 1.0);
  ActiveSet start(lmo.compute_extreme_point(direction));
  const auto shared = std::make_shared<const OEDPInstance>(inst);
  DomainOracle domain = [shared](std::span<const double> x) { return oedp_domain_oracle(*shared, x); };
  return project_into_domain(lmo, x0, domain, std::move(start), max_iter);
}

Settings oedp_settings(const OEDPInstance& inst, const Problem& problem) {
  Settings s;
  s.frank_wolfe.variant = FWVariant::BPCG;
  s.frank_wolfe.line_search.kind = LineSearchKind::Secant;
  s.heuristic.hyperplane_aware_rounding_prob = 0.7;
  const Vector lo(inst.m, 0.0);
  const auto x0 = oedp_domain_point(inst, lo, inst.upper);
  if (!x0) throw SolverError(ErrorKind::WarmStartFailure, "no domain point at the root bounds");
  s.domain.active_set = oedp_warm_start(inst, *problem.lmo, *x0);
  return s;
}

OEDPInstance generate_oedp(std::size_t m, std::size_t n, double budget, double max_upper,
                           OEDPCriterion criterion, std::uint64_t seed) {
  if (n == 0 || m < n) throw SolverError(ErrorKind::InvalidArgument, "OEDP generator needs m >= n >= 1");
  if (!(max_upper >= 1.0) || max_upper != std::round(max_upper))
    throw SolverError(ErrorKind::InvalidArgument, "max_upper must be a positive integer");
  if (budget < static_cast<double>(n) || budget != std::round(budget) ||
      budget > max_upper * static_cast<double>(m))
    throw SolverError(ErrorKind::InvalidArgument, "budget must be an integer in [n, m * max_upper]");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> ubound(1, static_cast<int>(max_upper));
  OEDPInstance inst;
  inst.m = m;
  inst.n = n;
  inst.budget = budget;
  inst.criterion = criterion;
  for (int attempt = 0;; ++attempt) {
    inst.a.resize(m * n);
    for (double& v : inst.a) v = gauss(rng);
    if (matrix_rank(inst.a, m, n) == n) break;
    if (attempt > 100) throw SolverError(ErrorKind::InvalidArgument, "could not draw a full-rank matrix");
  }
  inst.upper.resize(m);
  for (double& u : inst.upper) u = ubound(rng);
  // Raise bounds round-robin until the budget fits.
  double total = std::accumulate(inst.upper.begin(), inst.upper.end(), 0.0);
  for (std::size_t i = 0; total < budget; i = (i + 1) % m) {
    if (inst.upper[i] < max_upper) {
      inst.upper[i] += 1.0;
      total += 1.0;
    }
  }
  return inst;
}

}  // namespace fwbb
