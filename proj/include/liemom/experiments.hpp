//
// Project LieMomentum
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "liemom/trajectory.hpp"

namespace liemom {

enum class InitMode { NearMin, NearMax, Haar };

inline std::string_view init_mode_name(InitMode m) {
  switch (m) {
    case InitMode::NearMin: return "near_min";
    case InitMode::NearMax: return "near_max";
    case InitMode::Haar: return "haar";
  }
  return "unknown";
}

inline InitMode parse_init_mode(std::string_view s) {
  if (s == "near_min" || s == "near-min") return InitMode::NearMin;
  if (s == "near_max" || s == "near-max") return InitMode::NearMax;
  if (s == "haar") return InitMode::Haar;
  throw ConfigError("init_mode", "unknown init mode '" + std::string(s) + "' (near_min, near_max, haar)");
}

struct SweepConfig {
  int n = 10;
  std::vector<double> kappas{1e2, 1e3, 1e4, 1e5};
  std::vector<Scheme> schemes{Scheme::HeavyBall, Scheme::NAGSC};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  long max_iters = 20'000'000;
  double eps = 1e-12;
  InitMode init_mode = InitMode::NearMin;
  double init_radius = 0.01;  // in units of a/A
  double a = std::numbers::pi;
  std::optional<double> h;      // overrides the default step
  std::optional<double> gamma;  // overrides the default friction
  bool monitor_energy = true;
  bool monitor_lyapunov = true;
  long record_every = 0;        // 0: about 2000 rows per run

  void validate() const {
    if (n < 2) throw ConfigError("n", "must be at least 2");
    if (kappas.empty()) throw ConfigError("kappas", "list is empty");
    for (double k : kappas) SpectrumSpec{n, k}.validate();
    if (schemes.empty()) throw ConfigError("schemes", "list is empty");
    if (seeds.empty()) throw ConfigError("seeds", "list is empty");
    if (max_iters < 1) throw ConfigError("max_iters", "must be positive");
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("eps", "must lie in (0, 1)");
    if (!(init_radius > 0.0)) throw ConfigError("init_radius", "must be positive");
    if (!(a > 0.0 && a < 2.0 * std::numbers::pi)) throw ConfigError("a", "must lie in (0, 2*pi)");
    if (h && !(*h > 0.0)) throw ConfigError("h", "step size must be positive");
    if (gamma && !(*gamma > 0.0)) throw ConfigError("gamma", "friction must be positive");
  }

  // Radius 0.01 * a / A of the ball used for near-min starts and Lyapunov checks.
  double ball_radius() const {
    const double A = ad_norm_constant(n);
    return A > 0.0 ? init_radius * a / A : init_radius * a;
  }
};

struct Problem {
  BrockettPotential potential;
  GroupElement g0;
  Smoothness smoothness;
  SchemeParams params;
};

// Potential from (n, kappa, seed), then the initial point, drawn from the same generator.
inline Problem make_problem(const SweepConfig& cfg, Scheme scheme, double kappa, std::uint64_t seed) {
  Rng rng(seed);
  BrockettPotential pot = BrockettPotential::from_spec(SpectrumSpec{cfg.n, kappa}, rng);
  const Smoothness sm = estimate_L_mu(pot.eigenvalues());
  SchemeParams params = select_params(sm.L, sm.mu, scheme, cfg.a);
  if (cfg.h) params.h = *cfg.h;
  if (cfg.gamma) params.gamma = *cfg.gamma;
  params.validate();
  GroupElement g0;
  switch (cfg.init_mode) {
    case InitMode::NearMin:
      g0 = right_exp(pot.known_minimizer(), cfg.ball_radius() * random_unit_skew(cfg.n, rng));
      break;
    case InitMode::NearMax:
      // X = R (identity permutation) is the global maximum
      g0 = right_exp(pot.stationary_point(identity_permutation(cfg.n)), cfg.ball_radius() * random_unit_skew(cfg.n, rng));
      break;
    case InitMode::Haar:
      g0 = sample_haar_rotation(cfg.n, rng);
      break;
  }
  return {std::move(pot), std::move(g0), sm, params};
}

inline RunOptions run_options(const SweepConfig& cfg) {
  RunOptions o;
  o.max_iters = cfg.max_iters;
  o.eps = cfg.eps;
  o.monitor_energy = cfg.monitor_energy;
  o.monitor_lyapunov = cfg.monitor_lyapunov;
  o.lyapunov_radius = cfg.ball_radius();
  o.record_every = cfg.record_every;
  return o;
}

inline long auto_record_stride(const SchemeParams& p, const Smoothness& sm, double eps) {
  // rough iteration count: log(1/eps) / (1 - c) with 1 - c ~ h * sqrt(mu) for the momentum schemes
  const double per_step = p.scheme == Scheme::GD ? 2.0 * p.h * sm.mu : std::max(1e-12, p.h * std::sqrt(sm.mu));
  const double expected = std::log(1.0 / eps) / per_step;
  return std::max(1L, static_cast<long>(expected / 2000.0));
}

inline RunTrace run_single(const SweepConfig& cfg, Scheme scheme, double kappa, std::uint64_t seed) {
  cfg.validate();
  const Problem pr = make_problem(cfg, scheme, kappa, seed);
  RunOptions o = run_options(cfg);
  if (o.record_every <= 0) o.record_every = auto_record_stride(pr.params, pr.smoothness, cfg.eps);
  return run_trajectory(pr.potential, pr.params, OptimizerState::at_rest(pr.g0), pr.potential.known_minimizer(), o,
                        pr.smoothness);
}

// ---- rate extraction ------------------------------------------------------

struct RateEstimate {
  double c = kNaN;
  long hit = 0;          // first index with subopt <= eps * subopt_0 (or last index)
  long window_begin = 0;
  long window_end = 0;
  bool converged = false;
};

// Geometric mean of successive ratios over [K/2, K - 10], K being the first iterate at
// relative suboptimality eps. Needs at least 50 steps in the window.
inline RateEstimate estimate_rate(std::span<const double> subopt, double eps) {
  if (subopt.empty()) throw TailTooShort("empty trace");
  RateEstimate r;
  const double threshold = eps * subopt.front();
  long hit = static_cast<long>(subopt.size()) - 1;
  for (std::size_t k = 0; k < subopt.size(); ++k) {
    if (subopt[k] <= threshold) {
      hit = static_cast<long>(k);
      r.converged = true;
      break;
    }
  }
  r.hit = hit;
  r.window_begin = hit / 2;
  r.window_end = hit - 10;
  const long len = r.window_end - r.window_begin;
  if (len < 50) throw TailTooShort("rate window has " + std::to_string(std::max(0L, len)) + " steps; need 50");
  const double s0 = subopt[r.window_begin];
  const double s1 = subopt[r.window_end];
  if (!(s0 > 0.0 && s1 > 0.0)) throw TailTooShort("nonpositive suboptimality inside the rate window");
  r.c = std::exp((std::log(s1) - std::log(s0)) / static_cast<double>(len));
  return r;
}

inline RateEstimate estimate_rate(const RunTrace& tr) { return estimate_rate(tr.subopt, tr.eps); }

// ---- sweeps ----------------------------------------------------------------

struct LinearFit {
  double slope = kNaN;
  double intercept = kNaN;
  double r_squared = kNaN;
  std::vector<double> residuals;
};

inline LinearFit ordinary_least_squares(std::span<const double> x, std::span<const double> y) {
  const std::size_t m = x.size();
  if (m < 2 || y.size() != m) throw InsufficientPoints("least squares needs at least two paired points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InsufficientPoints("all abscissae coincide");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    f.residuals.push_back(r);
    sse += r * r;
  }
  f.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return f;
}

// Everything a sweep keeps from one trajectory (the full trace is dropped).
struct RunSummary {
  Scheme scheme = Scheme::HeavyBall;
  double kappa = 0.0;
  std::uint64_t seed = 0;
  SchemeParams params;
  Smoothness smoothness;
  long iterations = 0;
  bool converged = false;
  double initial_subopt = kNaN;
  double final_subopt = kNaN;
  std::optional<double> c_emp;
  std::string rate_error;
  long subopt_increases = 0;
  double max_orthogonality_defect = 0.0;
  EnergyReport energy;
  LyapunovReport lyapunov;
  std::vector<TraceRow> rows;
};

inline RunSummary summarize(const RunTrace& tr, Scheme scheme, double kappa, std::uint64_t seed) {
  RunSummary s;
  s.scheme = scheme;
  s.kappa = kappa;
  s.seed = seed;
  s.params = tr.params;
  s.smoothness = tr.smoothness;
  s.iterations = tr.iterations;
  s.converged = tr.converged;
  s.initial_subopt = tr.initial_subopt();
  s.final_subopt = tr.final_subopt();
  s.subopt_increases = tr.subopt_increases;
  s.max_orthogonality_defect = tr.max_orthogonality_defect;
  s.energy = tr.energy;
  s.lyapunov = tr.lyapunov;
  s.rows = tr.rows;
  if (!tr.converged) {
    s.rate_error = "NonConvergence: max_iters reached";
  } else {
    try {
      s.c_emp = estimate_rate(tr).c;
    } catch (const TailTooShort& e) {
      s.rate_error = std::string("TailTooShort: ") + e.what();
    }
  }
  return s;
}

struct RateFit {
  Scheme scheme = Scheme::HeavyBall;
  std::vector<double> kappas;                 // surviving points
  std::vector<double> c_emp;                  // median over seeds
  std::vector<std::vector<double>> c_seeds;   // per-seed values behind each median
  std::optional<LinearFit> fit;               // log10(1 - c) against log10(kappa)
  std::string error;
};

struct SweepResult {
  SweepConfig config;
  std::vector<RunSummary> runs;  // ordered by (scheme, kappa, seed)
  std::vector<RateFit> fits;     // one per scheme

  bool all_fits_ok() const {
    return std::all_of(fits.begin(), fits.end(), [](const RateFit& f) { return f.fit.has_value(); });
  }
};

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

inline RateFit fit_rates(Scheme scheme, const std::vector<RunSummary>& runs, std::span<const double> kappas) {
  RateFit f;
  f.scheme = scheme;
  std::vector<double> x, y;
  for (double kappa : kappas) {
    std::vector<double> cs;
    for (const RunSummary& r : runs)
      if (r.scheme == scheme && r.kappa == kappa && r.c_emp) cs.push_back(*r.c_emp);
    if (cs.empty()) continue;
    const double c = median(cs);
    if (!(c < 1.0)) continue;
    f.kappas.push_back(kappa);
    f.c_emp.push_back(c);
    f.c_seeds.push_back(cs);
    x.push_back(std::log10(kappa));
    y.push_back(std::log10(1.0 - c));
  }
  if (x.size() < 4) {
    f.error = "InsufficientPoints: " + std::to_string(x.size()) + " surviving kappa values; need 4";
    return f;
  }
  f.fit = ordinary_least_squares(x, y);
  return f;
}

inline int worker_count(std::size_t tasks) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LIE_MOMENTUM_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) hw = static_cast<unsigned>(v);
  }
  return static_cast<int>(std::max<std::size_t>(1, std::min<std::size_t>(hw, tasks)));
}

// Runs fn(i) for i in [0, count) on up to `threads` workers; results land by index,
// so the outcome does not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        if (failed) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

inline SweepResult sweep_and_fit(const SweepConfig& cfg, int threads = 0) {
  cfg.validate();
  if (cfg.kappas.size() < 4) {
    throw InsufficientPoints("sweep needs at least 4 kappa values, got " + std::to_string(cfg.kappas.size()));
  }
  const auto [lo, hi] = std::minmax_element(cfg.kappas.begin(), cfg.kappas.end());
  if (std::log10(*hi / *lo) < 2.0 - 1e-12) throw InsufficientPoints("kappa values must span at least two decades");

  struct Task {
    Scheme scheme;
    double kappa;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (Scheme s : cfg.schemes)
    for (double k : cfg.kappas)
      for (std::uint64_t seed : cfg.seeds) tasks.push_back({s, k, seed});

  SweepResult res;
  res.config = cfg;
  res.runs.resize(tasks.size());
  // start the most expensive runs first
  std::vector<std::size_t> order(tasks.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return tasks[a].kappa > tasks[b].kappa; });
  parallel_for(tasks.size(), threads > 0 ? threads : worker_count(tasks.size()), [&](std::size_t j) {
    const Task& t = tasks[order[j]];
    res.runs[order[j]] = summarize(run_single(cfg, t.scheme, t.kappa, t.seed), t.scheme, t.kappa, t.seed);
  });
  for (Scheme s : cfg.schemes) res.fits.push_back(fit_rates(s, res.runs, cfg.kappas));
  return res;
}

}  // namespace liemom
