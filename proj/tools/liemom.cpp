//
// Project LieMomentum
// SPDX-License-Identifier: Apache-2.0
//
// liemom: run single optimizations, rate sweeps, the ODE reference and the
// verification battery from the command line.
//
// Exit codes: 0 ok, 1 config error, 2 non-convergence / insufficient data,
// 3 invariant violation.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "liemom/liemom.hpp"

namespace fs = std::filesystem;
using namespace liemom;

namespace {

enum Exit { kOk = 0, kConfig = 1, kNoConvergence = 2, kViolation = 3 };

// Flag values; unset flags leave the file/default value alone.
struct Overrides {
  std::optional<int> n;
  std::optional<double> kappa;
  std::vector<double> kappas;
  std::optional<std::string> scheme;
  std::vector<std::string> schemes;
  std::optional<std::uint64_t> seed;
  std::vector<std::uint64_t> seeds;
  std::optional<double> h, gamma, a, eps;
  std::optional<long> max_iters;
  std::optional<std::string> init_mode;
  std::string config_path;
  std::string output_dir = "liemom_out";
  bool quiet = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON config file (flags override its values)");
  cmd->add_option("--output-dir", o.output_dir, "Directory for CSV/JSON/SVG output")->capture_default_str();
  cmd->add_option("--n", o.n, "Dimension of SO(n)");
  cmd->add_option("--a", o.a, "Radius parameter a in (0, 2 pi)");
  cmd->add_option("--init-mode", o.init_mode, "near_min, near_max or haar");
  cmd->add_flag("-q,--quiet", o.quiet, "Only print the summary line");
}

void add_run_params(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--kappa", o.kappa, "Condition number");
  cmd->add_option("--seed", o.seed, "Seed for potential and initial point");
  cmd->add_option("--h", o.h, "Step size (default: per-scheme choice)");
  cmd->add_option("--gamma", o.gamma, "Friction (default: 2 sqrt(mu))");
  cmd->add_option("--max-iters", o.max_iters, "Iteration budget");
  cmd->add_option("--eps", o.eps, "Stop at relative suboptimality eps");
}

SweepConfig resolve(SweepConfig cfg, const Overrides& o) {
  if (!o.config_path.empty()) {
    json j;
    try {
      j = json::parse(read_file(o.config_path));
    } catch (const json::exception& e) {
      throw ConfigError("config", std::string("cannot parse ") + o.config_path + ": " + e.what());
    } catch (const std::runtime_error& e) {
      throw ConfigError("config", e.what());
    }
    if (!j.is_object()) throw ConfigError("config", "top level must be a JSON object");
    apply_json(cfg, j);
  }
  if (o.n) cfg.n = *o.n;
  if (o.kappa) cfg.kappas = {*o.kappa};
  if (!o.kappas.empty()) cfg.kappas = o.kappas;
  if (o.scheme) cfg.schemes = {parse_scheme(*o.scheme)};
  if (!o.schemes.empty()) {
    cfg.schemes.clear();
    for (const auto& s : o.schemes) cfg.schemes.push_back(parse_scheme(s));
  }
  if (o.seed) cfg.seeds = {*o.seed};
  if (!o.seeds.empty()) cfg.seeds = o.seeds;
  if (o.h) cfg.h = *o.h;
  if (o.gamma) cfg.gamma = *o.gamma;
  if (o.a) cfg.a = *o.a;
  if (o.eps) cfg.eps = *o.eps;
  if (o.max_iters) cfg.max_iters = *o.max_iters;
  if (o.init_mode) cfg.init_mode = parse_init_mode(*o.init_mode);
  cfg.validate();
  return cfg;
}

std::string run_stem(Scheme s, double kappa, std::uint64_t seed) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "run_%s_kappa%g_seed%llu", std::string(scheme_name(s)).c_str(), kappa,
                static_cast<unsigned long long>(seed));
  return buf;
}

json header(const char* command, const SweepConfig& cfg) {
  return json{{"version", kVersion}, {"command", command}, {"config", to_json(cfg)}};
}

// ---- run ---------------------------------------------------------------------

int cmd_run(const Overrides& o) {
  SweepConfig base;
  base.kappas = {1000.0};
  base.schemes = {Scheme::NAGSC};
  base.seeds = {1};
  base.max_iters = 10'000'000;
  const SweepConfig cfg = resolve(base, o);
  if (cfg.kappas.size() != 1) throw ConfigError("kappa", "run takes a single kappa");
  if (cfg.schemes.size() != 1) throw ConfigError("scheme", "run takes a single scheme");
  if (cfg.seeds.size() != 1) throw ConfigError("seed", "run takes a single seed");
  const Scheme scheme = cfg.schemes.front();
  const double kappa = cfg.kappas.front();
  const std::uint64_t seed = cfg.seeds.front();

  const RunTrace tr = run_single(cfg, scheme, kappa, seed);
  const RunSummary sum = summarize(tr, scheme, kappa, seed);

  const fs::path dir = o.output_dir;
  const std::string stem = run_stem(scheme, kappa, seed);
  write_file_atomic(dir / (stem + ".csv"), trace_csv(tr.rows));
  json out = header("run", cfg);
  out["result"] = to_json(sum);
  out["theoretical_rate"] = tr.theoretical_rate ? json(*tr.theoretical_rate) : json(nullptr);
  write_file_atomic(dir / (stem + ".json"), out.dump(2) + "\n");
  write_file_atomic(dir / (stem + ".svg"),
                    svg::render(svg::convergence_plot(stem, {svg::convergence_series(std::string(scheme_name(scheme)),
                                                                                     tr.rows)})));

  std::printf("%s n=%d kappa=%g seed=%llu: %s after %ld iterations, final suboptimality %.3e", std::string(scheme_name(scheme)).c_str(),
              cfg.n, kappa, static_cast<unsigned long long>(seed), tr.converged ? "converged" : "NOT converged",
              tr.iterations, tr.final_subopt());
  if (sum.c_emp) std::printf(", c_emp %.6f", *sum.c_emp);
  std::printf("\n");
  if (!o.quiet) {
    std::printf("  h = %.6g, gamma = %.6g, L = %.6g, mu = %.6g\n", tr.params.h, tr.params.gamma, tr.smoothness.L,
                tr.smoothness.mu);
    if (!sum.rate_error.empty()) std::printf("  rate: %s\n", sum.rate_error.c_str());
    std::printf("  output: %s\n", (dir / stem).string().c_str());
  }
  if (tr.lyapunov.violations > 0) {
    std::fprintf(stderr, "invariant violated: Lyapunov contraction failed in %ld steps\n", tr.lyapunov.violations);
    return kViolation;
  }
  return tr.converged ? kOk : kNoConvergence;
}

// ---- sweep -------------------------------------------------------------------

int cmd_sweep(const Overrides& o) {
  const SweepConfig cfg = resolve(SweepConfig{}, o);
  const int threads = worker_count(cfg.schemes.size() * cfg.kappas.size() * cfg.seeds.size());
  if (!o.quiet) std::printf("sweep: %zu runs on %d worker(s)\n", cfg.schemes.size() * cfg.kappas.size() * cfg.seeds.size(), threads);
  const SweepResult res = sweep_and_fit(cfg, threads);

  const fs::path dir = o.output_dir;
  json out = header("sweep", cfg);
  json runs = json::array();
  long lyap_violations = 0;
  for (const RunSummary& r : res.runs) {
    runs.push_back(to_json(r));
    lyap_violations += r.lyapunov.violations;
    write_file_atomic(dir / (run_stem(r.scheme, r.kappa, r.seed) + ".csv"), trace_csv(r.rows));
  }
  json fits = json::array();
  for (const RateFit& f : res.fits) fits.push_back(to_json(f));
  out["fits"] = fits;
  out["runs"] = runs;
  write_file_atomic(dir / "sweep_summary.json", out.dump(2) + "\n");
  write_file_atomic(dir / "rates.svg", svg::render(svg::rate_plot(res)));

  // convergence curves at the largest kappa, first seed
  const double kmax = *std::max_element(cfg.kappas.begin(), cfg.kappas.end());
  std::vector<svg::Series> curves;
  for (const RunSummary& r : res.runs)
    if (r.kappa == kmax && r.seed == cfg.seeds.front())
      curves.push_back(svg::convergence_series(std::string(scheme_name(r.scheme)), r.rows));
  char title[64];
  std::snprintf(title, sizeof title, "kappa = %g, seed %llu", kmax, static_cast<unsigned long long>(cfg.seeds.front()));
  write_file_atomic(dir / "convergence.svg", svg::render(svg::convergence_plot(title, std::move(curves))));

  if (!o.quiet) {
    for (const RunSummary& r : res.runs) {
      std::printf("  %-10s kappa=%-8g seed=%-3llu iters=%-9ld c_emp=%s\n", std::string(scheme_name(r.scheme)).c_str(),
                  r.kappa, static_cast<unsigned long long>(r.seed), r.iterations,
                  r.c_emp ? std::to_string(*r.c_emp).c_str() : r.rate_error.c_str());
    }
  }
  for (const RateFit& f : res.fits) {
    if (f.fit)
      std::printf("%s: slope %.4f (intercept %.4f, R^2 %.5f)\n", std::string(scheme_name(f.scheme)).c_str(), f.fit->slope,
                  f.fit->intercept, f.fit->r_squared);
    else
      std::printf("%s: no fit (%s)\n", std::string(scheme_name(f.scheme)).c_str(), f.error.c_str());
  }
  if (!o.quiet) std::printf("output: %s\n", dir.string().c_str());
  if (lyap_violations > 0) {
    std::fprintf(stderr, "invariant violated: %ld Lyapunov contraction failures\n", lyap_violations);
    return kViolation;
  }
  return res.all_fits_ok() ? kOk : kNoConvergence;
}

// ---- ode ---------------------------------------------------------------------

int cmd_ode(const Overrides& o, double dt, double T, long record_every) {
  SweepConfig base;
  base.kappas = {100.0};
  base.seeds = {1};
  const SweepConfig cfg = resolve(base, o);
  if (cfg.kappas.size() != 1) throw ConfigError("kappa", "ode takes a single kappa");
  if (cfg.seeds.size() != 1) throw ConfigError("seed", "ode takes a single seed");
  if (!(dt > 0.0)) throw ConfigError("dt", "must be positive");
  if (!(T > 0.0)) throw ConfigError("T", "must be positive");
  const double kappa = cfg.kappas.front();
  const std::uint64_t seed = cfg.seeds.front();
  const Problem pr = make_problem(cfg, Scheme::HeavyBall, kappa, seed);
  const double gamma = cfg.gamma.value_or(2.0 * std::sqrt(pr.smoothness.mu));
  OdeOptions opt;
  opt.g_star = pr.potential.known_minimizer();
  opt.record_every = std::max(1L, record_every);
  const OdeTrace tr = integrate_ode(pr.g0, AlgebraElement::zero(cfg.n), pr.potential, gamma, dt, T, opt);
  const double c = ode_theoretical_rate(pr.smoothness.mu);
  const OdeRateCheck chk = check_ode_rate(tr, c, 1e-6);

  char stem[96];
  std::snprintf(stem, sizeof stem, "ode_kappa%g_seed%llu", kappa, static_cast<unsigned long long>(seed));
  const fs::path dir = o.output_dir;
  write_file_atomic(dir / (std::string(stem) + ".csv"), trace_csv(tr.rows));
  json out = header("ode", cfg);
  out["dt"] = dt;
  out["T"] = T;
  out["gamma"] = gamma;
  out["rate"] = c;
  out["checked"] = chk.checked;
  out["violations"] = chk.violations;
  out["max_relative_increase"] = chk.max_relative_increase;
  out["first_violation_t"] = chk.first_violation_t ? json(*chk.first_violation_t) : json(nullptr);
  out["max_orthogonality_defect"] = tr.max_orthogonality_defect;
  out["final_energy"] = tr.rows.back().energy;
  write_file_atomic(dir / (std::string(stem) + ".json"), out.dump(2) + "\n");

  std::printf("ode kappa=%g seed=%llu T=%g dt=%g: L_ODE %.3e -> %.3e, e^{ct} L monotone violations %ld/%ld (c = %.4g)\n",
              kappa, static_cast<unsigned long long>(seed), T, dt, tr.rows.front().lyapunov, tr.rows.back().lyapunov,
              chk.violations, chk.checked, c);
  return chk.violations == 0 ? kOk : kViolation;
}

// ---- verify --------------------------------------------------------------------

int cmd_verify(const std::vector<std::string>& only, std::uint64_t seed, const std::string& fault, bool quiet) {
  verify::Options opt;
  opt.only = only;
  opt.seed = seed;
  if (!fault.empty()) {
    if (fault != "hb-friction") throw ConfigError("inject-fault", "unknown fault '" + fault + "' (hb-friction)");
    opt.flip_heavy_ball_friction = true;
  }
  const auto results = verify::run(opt);
  const verify::CheckResult* first_fail = nullptr;
  for (const auto& r : results) {
    if (!quiet || !r.passed)
      std::printf("%s  %-12s %-64s worst %-10.3g tol %-8.3g %s\n", r.passed ? "PASS" : "FAIL", r.group.c_str(),
                  r.name.c_str(), r.worst, r.tolerance, r.detail.c_str());
    if (!r.passed && !first_fail) first_fail = &r;
  }
  const long passed = std::count_if(results.begin(), results.end(), [](const auto& r) { return r.passed; });
  std::printf("%ld/%zu checks passed\n", passed, results.size());
  if (first_fail) {
    std::fprintf(stderr, "invariant violated: %s\n", first_fail->name.c_str());
    return kViolation;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Momentum optimizers on SO(n): runs, rate sweeps, ODE reference and self-checks"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Overrides run_o, sweep_o, ode_o;
  auto* run = app.add_subcommand("run", "Optimize one Brockett instance and write its trace");
  add_common(run, run_o);
  add_run_params(run, run_o);
  run->add_option("--scheme", run_o.scheme, "gd, heavy-ball, nag-sc or splitting");

  auto* sweep = app.add_subcommand("sweep", "Fit log(1 - c) against log(kappa) over a grid of runs");
  add_common(sweep, sweep_o);
  sweep->add_option("--kappas", sweep_o.kappas, "Comma-separated condition numbers")->delimiter(',');
  sweep->add_option("--schemes", sweep_o.schemes, "Comma-separated schemes")->delimiter(',');
  sweep->add_option("--seeds", sweep_o.seeds, "Comma-separated seeds")->delimiter(',');
  sweep->add_option("--h", sweep_o.h, "Step size override for every run");
  sweep->add_option("--gamma", sweep_o.gamma, "Friction override for every run");
  sweep->add_option("--max-iters", sweep_o.max_iters, "Iteration budget per run");
  sweep->add_option("--eps", sweep_o.eps, "Relative suboptimality target");

  double dt = 1e-4, T = 10.0;
  long ode_record = 10;
  auto* ode = app.add_subcommand("ode", "Integrate the damped flow with RK4 and check the e^{ct} L decay");
  add_common(ode, ode_o);
  ode->add_option("--kappa", ode_o.kappa, "Condition number");
  ode->add_option("--seed", ode_o.seed, "Seed");
  ode->add_option("--gamma", ode_o.gamma, "Friction (default: 2 sqrt(mu))");
  ode->add_option("--dt", dt, "Time step")->capture_default_str();
  ode->add_option("--T", T, "Final time")->capture_default_str();
  ode->add_option("--record-every", ode_record, "Row stride of the trace")->capture_default_str();

  std::vector<std::string> only;
  std::uint64_t verify_seed = verify::Options{}.seed;
  std::string fault;
  bool verify_quiet = false;
  auto* ver = app.add_subcommand("verify", "Run the property battery");
  ver->add_option("--only", only, "Comma-separated groups: lie-core, potentials, optimizers, diagnostics")
      ->delimiter(',');
  ver->add_option("--seed", verify_seed, "Base seed")->capture_default_str();
  ver->add_option("--inject-fault", fault, "Test fixture: hb-friction")->group("");
  ver->add_flag("-q,--quiet", verify_quiet, "Only print failures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return cmd_run(run_o);
    if (*sweep) return cmd_sweep(sweep_o);
    if (*ode) return cmd_ode(ode_o, dt, T, ode_record);
    if (*ver) return cmd_verify(only, verify_seed, fault, verify_quiet);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error in '%s': %s\n", e.field().c_str(), e.what());
    return kConfig;
  } catch (const DegenerateSpectrum& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const InsufficientPoints& e) {
    std::fprintf(stderr, "insufficient data: %s\n", e.what());
    return kNoConvergence;
  } catch (const TailTooShort& e) {
    std::fprintf(stderr, "insufficient data: %s\n", e.what());
    return kNoConvergence;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfig;
  }
  return kOk;
}
