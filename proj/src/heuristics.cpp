#include "fwbb/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fwbb/errors.hpp"

namespace fwbb {

namespace {

void clamp_to_node(Vector& x, const std::vector<std::size_t>& integer_vars, const SelfManagedLMO& lmo) {
  for (std::size_t var : integer_vars) {
    x[var] = std::max(x[var], lmo.get_bound(var, BoundSense::GreaterThan));
    x[var] = std::min(x[var], lmo.get_bound(var, BoundSense::LessThan));
  }
}

std::optional<Vector> accept_if_feasible(Vector x, const SelfManagedLMO& lmo) {
  if (lmo.is_linear_feasible(x)) return x;
  return std::nullopt;
}

void check_prob(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0))
    throw SolverError(ErrorKind::InvalidArgument, std::string(name) + " must lie in [0, 1]");
}

}  // namespace

void HeuristicSettings::validate() const {
  check_prob(simple_rounding_prob, "simple_rounding_prob");
  check_prob(probability_rounding_prob, "probability_rounding_prob");
  check_prob(follow_gradient_prob, "follow_gradient_prob");
  check_prob(hyperplane_aware_rounding_prob, "hyperplane_aware_rounding_prob");
  for (const auto& h : custom) check_prob(h.activation_prob, h.name.c_str());
  if (follow_gradient_steps < 1)
    throw SolverError(ErrorKind::InvalidArgument, "follow_gradient_steps must be >= 1");
}

std::optional<Vector> simple_rounding(std::span<const double> iterate,
                                      const std::vector<std::size_t>& integer_vars,
                                      const SelfManagedLMO& lmo) {
  Vector x(iterate.begin(), iterate.end());
  for (std::size_t var : integer_vars) x[var] = std::round(x[var]);
  clamp_to_node(x, integer_vars, lmo);
  return accept_if_feasible(std::move(x), lmo);
}

std::optional<Vector> probability_rounding(std::span<const double> iterate,
                                           const std::vector<std::size_t>& integer_vars,
                                           const SelfManagedLMO& lmo, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Vector x(iterate.begin(), iterate.end());
  for (std::size_t var : integer_vars) {
    const double lo = std::floor(x[var]);
    const double frac = x[var] - lo;
    if (frac <= kIntegralityTol) {
      x[var] = lo;
    } else if (frac >= 1.0 - kIntegralityTol) {
      x[var] = lo + 1.0;
    } else {
      x[var] = uniform(rng) < frac ? lo + 1.0 : lo;
    }
  }
  clamp_to_node(x, integer_vars, lmo);
  return accept_if_feasible(std::move(x), lmo);
}

std::optional<Vector> follow_gradient(std::span<const double> iterate, const ObjectiveFn& f,
                                      const GradientFn& grad, SelfManagedLMO& lmo, int steps) {
  if (steps < 1) throw SolverError(ErrorKind::InvalidArgument, "follow_gradient needs steps >= 1");
  Vector x(iterate.begin(), iterate.end());
  Vector g(x.size());
  std::optional<Vector> best;
  double best_value = std::numeric_limits<double>::infinity();
  for (int k = 0; k < steps; ++k) {
    try {
      grad(g, x);
    } catch (const SolverError& e) {
      if (e.kind() == ErrorKind::DomainViolation) break;
      throw;
    }
    Vector v = lmo.compute_extreme_point(g);
    double value = std::numeric_limits<double>::infinity();
    try {
      value = f(v);
    } catch (const SolverError& e) {
      if (e.kind() != ErrorKind::DomainViolation) throw;
    }
    if (!best || value < best_value) {
      best = v;
      best_value = value;
    }
    if (v == x) break;
    x = std::move(v);
  }
  return best;
}

std::optional<Vector> hyperplane_aware_rounding(std::span<const double> iterate,
                                                const std::vector<std::size_t>& integer_vars,
                                                double budget, std::span<const double> lower,
                                                std::span<const double> upper) {
  Vector x(iterate.begin(), iterate.end());
  std::vector<double> frac(x.size(), 0.0);
  std::vector<char> is_int(x.size(), 0);
  for (std::size_t var : integer_vars) {
    is_int[var] = 1;
    const double fl = std::floor(x[var] + kIntegralityTol);
    frac[var] = std::max(0.0, x[var] - fl);
    x[var] = std::clamp(fl, lower[var], upper[var]);
  }
  double total = 0.0;
  for (double xi : x) total += xi;
  // Integer budgets: the residual is a whole number of units.
  long residual = std::lround(budget - total);
  if (std::abs(budget - total - static_cast<double>(residual)) > 1e-6) return std::nullopt;

  std::vector<std::size_t> order(integer_vars.begin(), integer_vars.end());
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return frac[a] > frac[b] || (frac[a] == frac[b] && a < b);
  });
  while (residual > 0) {
    bool progress = false;
    for (std::size_t var : order) {
      if (residual == 0) break;
      if (x[var] + 1.0 <= upper[var] + kAtol) {
        x[var] += 1.0;
        --residual;
        progress = true;
      }
    }
    if (!progress) return std::nullopt;
  }
  while (residual < 0) {
    bool progress = false;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      if (residual == 0) break;
      if (x[*it] - 1.0 >= lower[*it] - kAtol) {
        x[*it] -= 1.0;
        ++residual;
        progress = true;
      }
    }
    if (!progress) return std::nullopt;
  }
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < lower[i] - kAtol || x[i] > upper[i] + kAtol) return std::nullopt;
  return x;
}

std::vector<HeuristicCandidate> run_heuristics(const HeuristicSettings& settings,
                                               const HeuristicContext& ctx) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<HeuristicCandidate> out;
  auto keep = [&](const std::string& name, std::optional<Vector> c) {
    if (c) out.push_back({name, std::move(*c)});
  };
  if (uniform(ctx.rng) < settings.simple_rounding_prob)
    keep("simple_rounding", simple_rounding(ctx.iterate, ctx.integer_vars, ctx.lmo));
  if (uniform(ctx.rng) < settings.probability_rounding_prob)
    keep("probability_rounding", probability_rounding(ctx.iterate, ctx.integer_vars, ctx.lmo, ctx.rng));
  if (uniform(ctx.rng) < settings.follow_gradient_prob)
    keep("follow_gradient", follow_gradient(ctx.iterate, ctx.objective, ctx.gradient, ctx.lmo,
                                            settings.follow_gradient_steps));
  if (uniform(ctx.rng) < settings.hyperplane_aware_rounding_prob && ctx.hyperplane) {
    const std::size_t n = ctx.iterate.size();
    Vector lo(n, 0.0), hi = ctx.hyperplane->upper;
    for (std::size_t var : ctx.integer_vars) {
      lo[var] = std::max(lo[var], ctx.lmo.get_bound(var, BoundSense::GreaterThan));
      hi[var] = std::min(hi[var], ctx.lmo.get_bound(var, BoundSense::LessThan));
    }
    auto c = hyperplane_aware_rounding(ctx.iterate, ctx.integer_vars, ctx.hyperplane->budget, lo, hi);
    if (c && ctx.lmo.is_linear_feasible(*c)) keep("hyperplane_aware_rounding", std::move(c));
  }
  for (const CustomHeuristic& h : settings.custom)
    if (uniform(ctx.rng) < h.activation_prob) keep(h.name, h.fn(ctx));
  return out;
}

}  // namespace fwbb
