#include "fwbb/fw.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "fwbb/errors.hpp"
#include "fwbb/kernels.hpp"

namespace fwbb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Iterations between re-synchronisations of x from the active set.
constexpr int kResyncPeriod = 32;
// Lazy acceptance factor: a cached vertex must reach phi / kLazyFactor.
constexpr double kLazyFactor = 2.0;

using Clock = std::chrono::steady_clock;

Vector add_scaled(std::span<const double> x, double gamma, std::span<const double> d) {
  Vector y(x.begin(), x.end());
  kernels::axpy(gamma, d, y);
  return y;
}

Vector difference(std::span<const double> a, std::span<const double> b) {
  Vector d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

bool is_domain_violation(const SolverError& e) {
  return e.kind() == ErrorKind::DomainViolation || e.kind() == ErrorKind::DomainFailure;
}

// Step-size state carried across iterations (Lipschitz estimate for backtracking).
class StepSizer {
 public:
  StepSizer(const LineSearch& params, const ObjectiveFn& f, const GradientFn& grad, bool allow_agnostic)
      : params_(params), f_(f), grad_(grad), lipschitz_(params.initial_lipschitz) {
    if (params.kind == LineSearchKind::Agnostic && !allow_agnostic)
      throw SolverError(ErrorKind::InvalidArgument, "agnostic step size is only available for Standard FW");
  }

  // Step along x + gamma d, gamma in [0, gamma_max]; dphi0 = <g, d> < 0.
  double step(std::span<const double> x, std::span<const double> d, double dphi0, double fx,
              double gamma_max, int t) {
    if (gamma_max <= 0.0 || dphi0 >= 0.0) return 0.0;
    switch (params_.kind) {
      case LineSearchKind::Agnostic: {
        const double gamma = std::min(gamma_max, 2.0 / (t + 2.0));
        return shrink_to_domain(params_.domain_oracle, x, d, gamma, params_.domain_shrink);
      }
      case LineSearchKind::Secant:
        return secant_line_search(grad_, x, d, gamma_max, params_, dphi0);
      case LineSearchKind::Backtracking:
        return backtrack(x, d, dphi0, fx, gamma_max);
    }
    return 0.0;
  }

 private:
  double backtrack(std::span<const double> x, std::span<const double> d, double dphi0, double fx,
                   double gamma_max) {
    const double dnorm2 = kernels::squared_norm(d);
    if (dnorm2 == 0.0) return 0.0;
    lipschitz_ = std::max(lipschitz_ * params_.tau, 1e-12);
    for (int k = 0; k < 200; ++k) {
      const double gamma = std::min(gamma_max, -dphi0 / (lipschitz_ * dnorm2));
      const Vector y = add_scaled(x, gamma, d);
      double fy = kInf;
      if (!params_.domain_oracle || params_.domain_oracle(y)) {
        try {
          fy = f_(y);
        } catch (const SolverError& e) {
          if (!is_domain_violation(e)) throw;
        }
      }
      if (std::isfinite(fy) &&
          fy <= fx + gamma * dphi0 + 0.5 * lipschitz_ * gamma * gamma * dnorm2)
        return gamma;
      lipschitz_ /= params_.tau;
    }
    return 0.0;
  }

  const LineSearch& params_;
  const ObjectiveFn& f_;
  const GradientFn& grad_;
  double lipschitz_;
};

struct Deadline {
  std::optional<Clock::time_point> at;
  explicit Deadline(std::optional<double> seconds) {
    if (seconds) at = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                         std::chrono::duration<double>(*seconds));
  }
  bool passed() const { return at && Clock::now() >= *at; }
};

double evaluate(const ObjectiveFn& f, std::span<const double> x) {
  try {
    return f(x);
  } catch (const SolverError& e) {
    if (is_domain_violation(e)) return kInf;
    throw;
  }
}

bool evaluate_gradient(const GradientFn& grad, std::span<double> g, std::span<const double> x) {
  try {
    grad(g, x);
  } catch (const SolverError& e) {
    if (is_domain_violation(e)) return false;
    throw;
  }
  for (double v : g)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

const char* to_string(FWVariant variant) {
  switch (variant) {
    case FWVariant::Standard: return "Standard";
    case FWVariant::AwayFW: return "AwayFW";
    case FWVariant::PairwiseFW: return "PairwiseFW";
    case FWVariant::BPCG: return "BPCG";
    case FWVariant::DICG: return "DICG";
  }
  return "?";
}

const char* to_string(FWStatus status) {
  switch (status) {
    case FWStatus::GapReached: return "GapReached";
    case FWStatus::IterLimit: return "IterLimit";
    case FWStatus::TimeLimit: return "TimeLimit";
    case FWStatus::CallbackStop: return "CallbackStop";
    case FWStatus::DomainFailure: return "DomainFailure";
  }
  return "?";
}

double shrink_to_domain(const DomainOracle& domain, std::span<const double> x,
                        std::span<const double> d, double gamma_max, double shrink) {
  if (!domain || gamma_max <= 0.0) return std::max(gamma_max, 0.0);
  double gamma = gamma_max;
  for (int k = 0; k < 500 && gamma > 1e-14; ++k) {
    if (domain(add_scaled(x, gamma, d))) return gamma;
    gamma *= shrink;
  }
  return 0.0;
}

double secant_line_search(const GradientFn& grad, std::span<const double> x,
                          std::span<const double> d, double gamma_max, const LineSearch& params,
                          std::optional<double> dphi0) {
  if (gamma_max <= 0.0) return 0.0;
  Vector g(x.size());
  auto dphi = [&](double gamma) {
    const Vector y = add_scaled(x, gamma, d);
    if (!evaluate_gradient(grad, g, y))
      throw SolverError(ErrorKind::DomainFailure, "gradient undefined inside the line-search interval");
    return kernels::dot(g, d);
  };
  const double d0 = dphi0 ? *dphi0 : dphi(0.0);
  if (!(d0 < 0.0))
    throw SolverError(ErrorKind::NonDescentDirection, "line-search direction is not a descent direction");

  double hi = shrink_to_domain(params.domain_oracle, x, d, gamma_max, params.domain_shrink);
  if (hi <= 0.0) return 0.0;
  double d_hi = dphi(hi);
  if (d_hi <= 0.0) return hi;

  // Illinois-safeguarded secant on [lo, hi] with phi'(lo) < 0 < phi'(hi).
  double lo = 0.0, d_lo = d0;
  int side = 0;
  for (int k = 0; k < params.max_iter; ++k) {
    double gamma = lo - d_lo * (hi - lo) / (d_hi - d_lo);
    if (!(gamma > lo && gamma < hi)) gamma = 0.5 * (lo + hi);
    const double dg = dphi(gamma);
    if (std::abs(dg) <= params.tol) return gamma;
    if (dg < 0.0) {
      lo = gamma;
      d_lo = dg;
      if (side == -1) d_hi *= 0.5;
      side = -1;
    } else {
      hi = gamma;
      d_hi = dg;
      if (side == 1) d_lo *= 0.5;
      side = 1;
    }
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
  }
  // phi is decreasing on [0, lo], so lo never increases the objective.
  return lo;
}

double fw_gap(std::span<const double> gradient, std::span<const double> iterate,
              std::span<const double> fw_vertex) {
  return kernels::dot(gradient, iterate) - kernels::dot(gradient, fw_vertex);
}

void ShadowPool::add(Vector v) {
  if (capacity_ == 0) return;
  for (const Vector& u : vertices_) {
    bool same = u.size() == v.size();
    for (std::size_t i = 0; same && i < u.size(); ++i) same = std::abs(u[i] - v[i]) <= ActiveSet::kDuplicateTol;
    if (same) return;
  }
  if (vertices_.size() >= capacity_) vertices_.erase(vertices_.begin());
  vertices_.push_back(std::move(v));
}

void ShadowPool::set_capacity(std::size_t capacity) {
  capacity_ = capacity;
  if (vertices_.size() > capacity_)
    vertices_.erase(vertices_.begin(),
                    vertices_.begin() + static_cast<std::ptrdiff_t>(vertices_.size() - capacity_));
}

void ShadowPool::filter(const std::function<bool(const Vector&)>& keep) {
  std::erase_if(vertices_, [&](const Vector& v) { return !keep(v); });
}

namespace {

// Shared bookkeeping of the active-set solvers.
class ActiveSetSolver {
 public:
  ActiveSetSolver(const FWSettings& s, const ObjectiveFn& f, const GradientFn& grad, SelfManagedLMO& lmo,
                  ActiveSet as, ShadowPool* pool, const IterationCallback& callback)
      : s_(s),
        f_(f),
        grad_(grad),
        lmo_(lmo),
        as_(std::move(as)),
        pool_(pool),
        callback_(callback),
        sizer_(s.line_search, f, grad, s.variant == FWVariant::Standard),
        deadline_(s.time_limit_s) {
    if (as_.empty()) throw SolverError(ErrorKind::InvalidArgument, "empty warm-start active set");
    x_ = as_.iterate();
    g_.assign(x_.size(), 0.0);
  }

  FWResult run() {
    try {
      return iterate();
    } catch (const SolverError& e) {
      if (!is_domain_violation(e)) throw;
      return finish(FWStatus::DomainFailure);
    }
  }

 private:
  FWResult iterate() {
    fx_ = evaluate(f_, x_);
    if (!std::isfinite(fx_)) return finish(FWStatus::DomainFailure);
    const bool corrective = s_.variant != FWVariant::Standard;
    for (int t = 0;; ++t) {
      iterations_ = t;
      if (t >= s_.max_iter) return finish(FWStatus::IterLimit);
      if (deadline_.passed()) return finish(FWStatus::TimeLimit);
      if (!evaluate_gradient(grad_, g_, x_)) return finish(FWStatus::DomainFailure);

      std::size_t a = 0, sl = 0;
      double local_gap = 0.0;
      if (corrective) {
        std::tie(sl, a) = as_.argmin_argmax(g_);
        local_gap = kernels::dot(g_, as_.vertex(a)) - kernels::dot(g_, as_.vertex(sl));
      }

      std::optional<Vector> v;
      double gap = 0.0;
      bool exact = false;
      enum class Move { Corrective, Global } move = Move::Global;

      if (!s_.lazy || !phi_) {
        v = call_lmo();
        gap = fw_gap(g_, x_, *v);
        exact = true;
        if (!phi_) phi_ = std::max(gap, 0.0);
        move = corrective && local_gap >= gap ? Move::Corrective : Move::Global;
      } else if (corrective && local_gap >= *phi_ / kLazyFactor) {
        gap = *phi_;
        move = Move::Corrective;
      } else if (auto w = cached_vertex(*phi_ / kLazyFactor)) {
        gap = *phi_;
        v = std::move(*w);
      } else {
        v = call_lmo();
        gap = fw_gap(g_, x_, *v);
        exact = true;
        if (gap < *phi_ / kLazyFactor) phi_ = *phi_ / 2.0;
        move = corrective && local_gap >= gap ? Move::Corrective : Move::Global;
      }

      if (exact) {
        last_gap_ = gap;
        lower_bound_ = std::max(lower_bound_, fx_ - gap);
      }
      if (callback_ && !notify(t, gap, exact)) return finish(FWStatus::CallbackStop);
      if (exact && gap <= s_.epsilon) return finish(FWStatus::GapReached);

      if (move == Move::Corrective)
        corrective_step(a, sl, v, t);
      else
        global_step(std::move(*v), t);

      if ((t + 1) % kResyncPeriod == 0) {
        x_ = as_.iterate();
        fx_ = evaluate(f_, x_);
      }
      if (!std::isfinite(fx_)) return finish(FWStatus::DomainFailure);
    }
  }

  Vector call_lmo() {
    ++lmo_calls_;
    Vector v = lmo_.compute_extreme_point(g_);
    last_vertex_ = v;
    return v;
  }

  // Best cached vertex (active set first, then pool) reaching the threshold.
  std::optional<Vector> cached_vertex(double threshold) const {
    const double gx = kernels::dot(g_, x_);
    auto scan = [&](const std::vector<Vector>& vs) -> std::optional<std::size_t> {
      if (vs.empty()) return std::nullopt;
      Vector scores(vs.size());
      kernels::vertex_scores(vs, g_, scores);
      std::size_t best = 0;
      for (std::size_t k = 1; k < vs.size(); ++k)
        if (scores[k] < scores[best]) best = k;
      if (gx - scores[best] >= threshold) return best;
      return std::nullopt;
    };
    if (auto k = scan(as_.vertices())) return as_.vertex(*k);
    if (pool_)
      if (auto k = scan(pool_->vertices())) return pool_->vertices()[*k];
    return std::nullopt;
  }

  bool notify(int t, double gap, bool exact) {
    IterationState st;
    st.t = t;
    st.primal = fx_;
    st.fw_gap = gap;
    st.gap_is_exact = exact;
    st.lower_bound = lower_bound_;
    st.lmo_calls = lmo_calls_;
    st.x = x_;
    st.active_set = &as_;
    return callback_(st);
  }

  void drop_to_pool(std::vector<Vector> dropped) {
    if (!pool_) return;
    for (Vector& d : dropped) pool_->add(std::move(d));
  }

  double line_search(std::span<const double> d, double gamma_max, int t) {
    const double dphi0 = kernels::dot(g_, d);
    return sizer_.step(x_, d, dphi0, fx_, gamma_max, t);
  }

  void accept(std::span<const double> d, double gamma) {
    kernels::axpy(gamma, d, x_);
    fx_ = evaluate(f_, x_);
  }

  void global_step(Vector v, int t) {
    const Vector d = difference(v, x_);
    const double gamma = line_search(d, 1.0, t);
    if (gamma <= 0.0) {
      if (pool_) pool_->add(std::move(v));
      return;
    }
    if (gamma >= 1.0) {
      const std::size_t idx = as_.add(std::move(v), 0.0);
      drop_to_pool(as_.collapse_to(idx));
      x_ = as_.vertex(0);
      fx_ = evaluate(f_, x_);
      return;
    }
    as_.scale_weights(1.0 - gamma);
    as_.add(std::move(v), gamma);
    drop_to_pool(as_.cleanup());
    accept(d, gamma);
  }

  // Moves weight from vertex `from` to `to` (possibly new): x + gamma (to - from).
  void pairwise_step(std::size_t from, const Vector& to, int t) {
    const double w_from = as_.weight(from);
    const Vector d = difference(to, as_.vertex(from));
    double gamma = line_search(d, w_from, t);
    if (gamma <= 0.0) return;
    gamma = std::min(gamma, w_from);
    const bool drop = gamma >= w_from;
    as_.set_weight(from, drop ? 0.0 : w_from - gamma);
    as_.add(to, gamma);
    drop_to_pool(as_.cleanup());
    accept(d, gamma);
  }

  void away_step(std::size_t a, int t) {
    const double w_a = as_.weight(a);
    if (w_a >= 1.0) return;
    const double gamma_max = w_a / (1.0 - w_a);
    const Vector d = difference(x_, as_.vertex(a));
    double gamma = line_search(d, gamma_max, t);
    if (gamma <= 0.0) return;
    gamma = std::min(gamma, gamma_max);
    as_.scale_weights(1.0 + gamma);
    as_.set_weight(a, gamma >= gamma_max ? 0.0 : as_.weight(a) - gamma);
    drop_to_pool(as_.cleanup());
    accept(d, gamma);
  }

  void corrective_step(std::size_t a, std::size_t s, const std::optional<Vector>& v, int t) {
    switch (s_.variant) {
      case FWVariant::BPCG:
        if (a != s) pairwise_step(a, as_.vertex(s), t);
        return;
      case FWVariant::PairwiseFW:
        pairwise_step(a, v ? *v : as_.vertex(s), t);
        return;
      case FWVariant::AwayFW: {
        const double gx = kernels::dot(g_, x_);
        const double away_gain = kernels::dot(g_, as_.vertex(a)) - gx;
        const double local_gain = gx - kernels::dot(g_, as_.vertex(s));
        if (away_gain >= local_gain)
          away_step(a, t);
        else
          global_step(as_.vertex(s), t);
        return;
      }
      default:
        return;
    }
  }

  FWResult finish(FWStatus status) {
    FWResult r;
    r.iterate = as_.iterate();
    r.primal = r.iterate == x_ ? fx_ : evaluate(f_, r.iterate);
    if (!std::isfinite(r.primal) && status != FWStatus::DomainFailure) {
      // x drifted from the active set into the domain boundary; keep the tracked value.
      r.primal = fx_;
      r.iterate = x_;
    }
    r.active_set = as_;
    r.fw_gap = last_gap_;
    r.lower_bound = lower_bound_;
    r.last_vertex = last_vertex_;
    r.iterations = iterations_;
    r.lmo_calls = lmo_calls_;
    r.status = std::isfinite(r.primal) ? status : FWStatus::DomainFailure;
    return r;
  }

  const FWSettings& s_;
  const ObjectiveFn& f_;
  const GradientFn& grad_;
  SelfManagedLMO& lmo_;
  ActiveSet as_;
  ShadowPool* pool_;
  const IterationCallback& callback_;
  StepSizer sizer_;
  Deadline deadline_;
  Vector x_;
  Vector g_;
  double fx_ = kInf;
  std::optional<double> phi_;
  double last_gap_ = kInf;
  double lower_bound_ = -kInf;
  std::optional<Vector> last_vertex_;
  int iterations_ = 0;
  long lmo_calls_ = 0;
};

}  // namespace

FWResult solve_node_fw(const FWSettings& settings, const ObjectiveFn& f, const GradientFn& grad,
                       SelfManagedLMO& lmo, ActiveSet warm_start, ShadowPool* pool,
                       const IterationCallback& callback) {
  if (settings.variant == FWVariant::DICG)
    throw SolverError(ErrorKind::InvalidArgument, "DICG does not run on an active set");
  return ActiveSetSolver(settings, f, grad, lmo, std::move(warm_start), pool, callback).run();
}

namespace {

FWResult dicg_loop(const FWSettings& settings, const ObjectiveFn& f, const GradientFn& grad,
                   SelfManagedLMO& lmo, Vector start, ShadowPool* pool,
                   const IterationCallback& callback) {
  if (!lmo.has_inface_oracles())
    throw SolverError(ErrorKind::InvalidArgument, "DICG needs in-face and maximum-step oracles");
  StepSizer sizer(settings.line_search, f, grad, false);
  const Deadline deadline(settings.time_limit_s);
  FWResult r;
  Vector x = std::move(start);
  Vector g(x.size());
  double fx = evaluate(f, x);
  std::optional<double> phi;
  auto done = [&](FWStatus status, int t) {
    r.iterate = x;
    r.primal = fx;
    r.iterations = t;
    r.status = std::isfinite(fx) ? status : FWStatus::DomainFailure;
    return r;
  };
  if (!std::isfinite(fx)) return done(FWStatus::DomainFailure, 0);

  for (int t = 0;; ++t) {
    if (t >= settings.max_iter) return done(FWStatus::IterLimit, t);
    if (deadline.passed()) return done(FWStatus::TimeLimit, t);
    if (!evaluate_gradient(grad, g, x)) return done(FWStatus::DomainFailure, t);

    Vector v;
    double gap = 0.0;
    bool exact = false;
    const double gx = kernels::dot(g, x);
    if (settings.lazy && phi && pool && !pool->empty()) {
      Vector scores(pool->size());
      kernels::vertex_scores(pool->vertices(), g, scores);
      const auto best = static_cast<std::size_t>(std::min_element(scores.begin(), scores.end()) - scores.begin());
      if (gx - scores[best] >= *phi / kLazyFactor) {
        v = pool->vertices()[best];
        gap = *phi;
      }
    }
    if (v.empty()) {
      v = lmo.compute_extreme_point(g);
      ++r.lmo_calls;
      r.last_vertex = v;
      gap = gx - kernels::dot(g, v);
      exact = true;
      if (!phi)
        phi = std::max(gap, 0.0);
      else if (gap < *phi / kLazyFactor)
        phi = *phi / 2.0;
      if (pool) pool->add(v);
      r.fw_gap = gap;
      r.lower_bound = std::max(r.lower_bound, fx - gap);
    }
    if (callback) {
      IterationState st;
      st.t = t;
      st.primal = fx;
      st.fw_gap = gap;
      st.gap_is_exact = exact;
      st.lower_bound = r.lower_bound;
      st.lmo_calls = r.lmo_calls;
      st.x = x;
      if (!callback(st)) return done(FWStatus::CallbackStop, t);
    }
    if (exact && gap <= settings.epsilon) return done(FWStatus::GapReached, t);

    // In-face away vertex maximises <g, .> over the minimal face of x.
    Vector neg_g(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) neg_g[i] = -g[i];
    const Vector a = lmo.compute_inface_extreme_point(neg_g, x);
    Vector d = difference(v, a);  // x + gamma (v - a) == x - gamma (a - v)
    Vector minus_d(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) minus_d[i] = -d[i];
    double gamma_max = lmo.dicg_maximum_step(minus_d, x);
    if (gamma_max <= 0.0 || kernels::dot(g, d) >= 0.0) {
      d = difference(v, x);
      gamma_max = 1.0;
    }
    const double gamma = sizer.step(x, d, kernels::dot(g, d), fx, gamma_max, t);
    if (gamma > 0.0) {
      kernels::axpy(std::min(gamma, gamma_max), d, x);
      // Clean round-off so the minimal face is detected reliably.
      for (double& xi : x) {
        if (std::abs(xi) <= 1e-12) xi = 0.0;
        if (std::abs(xi - 1.0) <= 1e-12) xi = 1.0;
      }
      fx = evaluate(f, x);
      if (!std::isfinite(fx)) return done(FWStatus::DomainFailure, t + 1);
    }
  }
}

}  // namespace

FWResult solve_node_dicg(const FWSettings& settings, const ObjectiveFn& f, const GradientFn& grad,
                         SelfManagedLMO& lmo, Vector start, ShadowPool* pool,
                         const IterationCallback& callback) {
  const Vector fallback = start;
  try {
    return dicg_loop(settings, f, grad, lmo, std::move(start), pool, callback);
  } catch (const SolverError& e) {
    if (!is_domain_violation(e)) throw;
    FWResult r;
    r.iterate = fallback;
    r.primal = kInf;
    r.status = FWStatus::DomainFailure;
    return r;
  }
}

FWResult solve_node(const FWSettings& settings, const ObjectiveFn& f, const GradientFn& grad,
                    SelfManagedLMO& lmo, ActiveSet warm_start, ShadowPool* pool,
                    const IterationCallback& callback) {
  if (settings.variant == FWVariant::DICG)
    return solve_node_dicg(settings, f, grad, lmo, warm_start.iterate(), pool, callback);
  return solve_node_fw(settings, f, grad, lmo, std::move(warm_start), pool, callback);
}

bool DomainCounterCallback::operator()(const IterationState& state) {
  if (domain_(state.x)) {
    if (counter_ > threshold_) return false;
    ++counter_;
  }
  return true;
}

ActiveSet project_into_domain(SelfManagedLMO& lmo, std::span<const double> x0,
                              const DomainOracle& domain, ActiveSet start, int max_iter) {
  const Vector target(x0.begin(), x0.end());
  ObjectiveFn f = [&](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - target[i]) * (x[i] - target[i]);
    return 0.5 * s;
  };
  GradientFn grad = [&](std::span<double> storage, std::span<const double> x) {
    for (std::size_t i = 0; i < x.size(); ++i) storage[i] = x[i] - target[i];
  };
  FWSettings settings;
  settings.variant = FWVariant::BPCG;
  settings.lazy = true;
  settings.max_iter = max_iter;
  settings.epsilon = 1e-10;
  DomainCounterCallback counter(domain);
  IterationCallback cb = [&](const IterationState& st) { return counter(st); };
  FWResult r = solve_node_fw(settings, f, grad, lmo, std::move(start), nullptr, cb);
  if (!r.active_set || !domain(r.active_set->iterate()))
    throw SolverError(ErrorKind::WarmStartFailure, "projection never entered the objective's domain");
  return std::move(*r.active_set);
}

}  // namespace fwbb
