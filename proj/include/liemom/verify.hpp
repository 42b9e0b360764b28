//
// Project LieMomentum
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "liemom/diagnostics.hpp"
#include "liemom/dlog.hpp"
#include "liemom/experiments.hpp"
#include "liemom/optimizers.hpp"
#include "liemom/potentials.hpp"
#include "liemom/random.hpp"
#include "liemom/so_n.hpp"
#include "liemom/trajectory.hpp"

namespace liemom::verify {

struct CheckResult {
  std::string group;
  std::string name;
  bool passed = false;
  double worst = 0.0;      // largest observed error or violation count
  double tolerance = 0.0;
  std::string detail;
};

struct Options {
  std::vector<std::string> only;        // empty: every group
  std::uint64_t seed = 2024;
  // Test fixture: flips the sign of the Heavy-Ball friction inside the energy check,
  // which the decrease monitor must catch.
  bool flip_heavy_ball_friction = false;
};

inline const std::vector<std::string>& group_names() {
  static const std::vector<std::string> g{"lie-core", "potentials", "optimizers", "diagnostics"};
  return g;
}

namespace detail {

inline CheckResult make(std::string group, std::string name, double worst, double tol, std::string detail = {}) {
  return {std::move(group), std::move(name), worst <= tol, worst, tol, std::move(detail)};
}

inline AlgebraElement skew_with_norm(int n, double r, Rng& rng) { return r * random_unit_skew(n, rng); }

// ---- lie-core ---------------------------------------------------------------

inline CheckResult group_axioms(Rng& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + trial % 4;
    const GroupElement a = sample_haar_rotation(n, rng), b = sample_haar_rotation(n, rng),
                       c = sample_haar_rotation(n, rng);
    const GroupElement e = GroupElement::identity(n);
    worst = std::max(worst, (((a * b) * c).matrix() - (a * (b * c)).matrix()).norm());
    worst = std::max(worst, ((a * a.inverse()).matrix() - e.matrix()).norm());
    worst = std::max(worst, ((a * e).matrix() - a.matrix()).norm());
    worst = std::max(worst, (a * b).orthogonality_defect());
  }
  return make("lie-core", "group axioms (assoc, inverse, identity, closure)", worst, 1e-12);
}

inline CheckResult exp_on_group(Rng& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 9;
    const GroupElement g = group_exp(skew_with_norm(n, 0.1 + 0.05 * trial, rng));
    worst = std::max({worst, g.orthogonality_defect(), std::abs(g.matrix().determinant() - 1.0)});
  }
  return make("lie-core", "exp lands in SO(n)", worst, 1e-12);
}

inline CheckResult exp_log_roundtrip(Rng& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 9;
    // plane angles stay below |xi| / sqrt(2) < pi
    const double r = 4.0 * (trial + 1) / 201.0;
    const AlgebraElement xi = skew_with_norm(n, r, rng);
    const AlgebraElement back = group_log(group_exp(xi));
    worst = std::max(worst, (back - xi).norm() / std::max(1.0, xi.norm()));
  }
  return make("lie-core", "log(exp(xi)) = xi", worst, 1e-10);
}

inline CheckResult ad_skew_adjoint(Rng& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 3 + trial % 6;
    const AlgebraElement x = random_unit_skew(n, rng), y = random_unit_skew(n, rng), z = random_unit_skew(n, rng);
    worst = std::max(worst, std::abs(inner(bracket(x, y), z) + inner(y, bracket(x, z))));
  }
  return make("lie-core", "<ad_X Y, Z> = -<Y, ad_X Z>", worst, 1e-12);
}

// log g with d(g, e) <= radius
inline GroupElement random_near_identity(int n, double radius, Rng& rng) {
  return group_exp(skew_with_norm(n, radius * std::uniform_real_distribution<double>(0.05, 1.0)(rng), rng));
}

inline CheckResult dlog_fixes_log(Rng& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + trial % 6;
    const GroupElement g = random_near_identity(n, 2.5, rng);
    const AlgebraElement xi = random_skew(n, rng);
    const AlgebraElement x = group_log(g);
    const double lhs = inner(dlog_apply(g, xi), x);
    const double rhs = inner(x, xi);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, x.norm() * xi.norm()));
  }
  return make("lie-core", "<dlog(g) xi, log g> = <log g, xi>", worst, 1e-10);
}

inline CheckResult dlog_quadratic_bound(Rng& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + trial % 6;
    const GroupElement g = random_near_identity(n, 2.5, rng);
    const AlgebraElement xi = random_skew(n, rng);
    worst = std::max(worst, inner(dlog_apply(g, xi), xi) - xi.squared_norm());
  }
  return make("lie-core", "<dlog(g) xi, xi> <= |xi|^2", worst, 1e-10);
}

inline CheckResult dlog_finite_difference(Rng& rng) {
  double worst = 0.0;
  const double t = 1e-6;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + trial % 5;
    const GroupElement g = random_near_identity(n, 2.0, rng);
    const AlgebraElement xi = random_unit_skew(n, rng);
    const Matrix fd = (group_log(right_exp(g, t * xi)).matrix() - group_log(right_exp(g, -t * xi)).matrix()) / (2 * t);
    const AlgebraElement exact = dlog_apply(g, xi);
    worst = std::max(worst, (fd - exact.matrix()).norm() / exact.norm());
  }
  return make("lie-core", "dlog matches finite differences of log", worst, 1e-4);
}

inline CheckResult dlog_identity_deviation(Rng& rng) {
  double worst = -1.0;
  const double a = std::numbers::pi;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + trial % 6;
    const double radius = a / ad_norm_constant(n);
    const GroupElement g = random_near_identity(n, radius, rng);
    const AlgebraElement xi = random_unit_skew(n, rng);
    const double dev = (dlog_apply(g, xi) - xi).norm();
    worst = std::max(worst, dev - q_bound(a));
  }
  return make("lie-core", "|dlog(g) - Id| <= q(a) on d(g,e) <= a/A", std::max(0.0, worst), 1e-12);
}

// ---- potentials -------------------------------------------------------------

inline CheckResult gradient_fd(Rng& rng) {
  double worst = 0.0;
  const BrockettPotential pot = BrockettPotential::from_spec({6, 100.0}, rng);
  const double t = 1e-5;
  for (int p = 0; p < 20; ++p) {
    const GroupElement x = sample_haar_rotation(6, rng);
    const AlgebraElement grad = pot.trivialized_grad(x);
    for (int d = 0; d < 20; ++d) {
      const AlgebraElement eta = random_unit_skew(6, rng);
      const double fd = (pot.value(right_exp(x, t * eta)) - pot.value(right_exp(x, -t * eta))) / (2 * t);
      worst = std::max(worst, std::abs(fd - inner(grad, eta)) / std::max(grad.norm(), 1e-12));
    }
  }
  return make("potentials", "trivialized gradient vs central differences", worst, 1e-5);
}

inline CheckResult hessian_fd(Rng& rng) {
  double worst = 0.0;
  const int n = 5;
  const BrockettPotential pot = BrockettPotential::from_spec({n, 100.0}, rng);
  const double t = 1e-4;
  for (const auto& perm : {reversal_permutation(n), identity_permutation(n)}) {
    const GroupElement x = pot.stationary_point(perm);
    const std::vector<double> sigma = hessian_spectrum(pot, perm);
    const double u0 = pot.value(x);
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j, ++idx) {
        Matrix e = Matrix::Zero(n, n);
        e(i, j) = std::sqrt(0.5);
        e(j, i) = -std::sqrt(0.5);
        const AlgebraElement eta(e);
        const double fd = (pot.value(right_exp(x, t * eta)) - 2 * u0 + pot.value(right_exp(x, -t * eta))) / (t * t);
        worst = std::max(worst, std::abs(fd - sigma[idx]) / std::max(1.0, std::abs(sigma[idx])));
      }
  }
  return make("potentials", "Hessian spectrum at stationary points vs second differences", worst, 1e-4);
}

inline CheckResult minimizer(Rng& rng) {
  double worst = 0.0;
  for (int n : {3, 5, 10}) {
    const BrockettPotential pot = BrockettPotential::from_spec({n, 2.0 * n * n}, rng);
    const GroupElement& xs = pot.known_minimizer();
    worst = std::max(worst, std::abs(pot.value(xs) - pot.known_min_value()) / pot.known_min_value());
    worst = std::max(worst, pot.trivialized_grad(xs).norm() / pot.smoothness_estimate().L);
    for (int k = 0; k < 20; ++k) {
      // U* is a lower bound everywhere
      worst = std::max(worst, -pot.suboptimality(sample_haar_rotation(n, rng)));
    }
    const auto sigma = hessian_spectrum(pot, reversal_permutation(n));
    const Smoothness sm = pot.smoothness_estimate();
    worst = std::max(worst, std::abs(*std::min_element(sigma.begin(), sigma.end()) - sm.mu) / sm.mu);
    worst = std::max(worst, std::abs(*std::max_element(sigma.begin(), sigma.end()) - sm.L) / sm.L);
  }
  return make("potentials", "known minimizer, U* lower bound, Hessian extremes = (mu, L)", worst, 1e-10);
}

// ---- optimizers ---------------------------------------------------------------

inline CheckResult splitting_equivalence(Rng& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = trial % 2 ? 10 : 3;
    const BrockettPotential pot = BrockettPotential::from_spec({n, 2.0 * n * n}, rng);
    const Smoothness sm = pot.smoothness_estimate();
    SchemeParams sp = select_params(sm.L, sm.mu, Scheme::Splitting);
    const HeavyBallEquivalent eq = heavy_ball_equivalent_of_splitting(sp);
    const GroupElement g0 = sample_haar_rotation(n, rng);
    OptimizerState a = OptimizerState::at_rest(g0), b = OptimizerState::at_rest(g0);
    for (int k = 0; k < 100; ++k) {
      a = step(a, pot, sp);
      b = step(b, pot, eq.params);
      worst = std::max(worst, (a.g.matrix() - b.g.matrix()).norm());
    }
  }
  return make("optimizers", "splitting = Heavy-Ball after change of variables", worst, 1e-12);
}

inline CheckResult stays_on_group(Rng& rng) {
  double worst = 0.0;
  const BrockettPotential pot = BrockettPotential::from_spec({8, 1000.0}, rng);
  const Smoothness sm = pot.smoothness_estimate();
  for (Scheme s : {Scheme::GD, Scheme::HeavyBall, Scheme::NAGSC, Scheme::Splitting}) {
    const SchemeParams p = select_params(sm.L, sm.mu, s);
    OptimizerState st = OptimizerState::at_rest(sample_haar_rotation(8, rng));
    for (int k = 0; k < 2000; ++k) st = step(st, pot, p);
    worst = std::max(worst, st.g.orthogonality_defect());
  }
  return make("optimizers", "iterates stay on SO(n) over 2000 steps", worst, 1e-10);
}

inline CheckResult rejects_bad_friction() {
  int accepted = 0;
  for (double gh : {1.0, 1.5, 10.0}) {
    for (Scheme s : {Scheme::HeavyBall, Scheme::NAGSC}) {
      try {
        SchemeParams{s, gh, 1.0}.validate();
        ++accepted;
      } catch (const ConfigError&) {
      }
    }
  }
  return make("optimizers", "gamma*h >= 1 is rejected", accepted, 0.0);
}

inline CheckResult deterministic_replay(Rng& rng) {
  const BrockettPotential pot = BrockettPotential::from_spec({6, 500.0}, rng);
  const Smoothness sm = pot.smoothness_estimate();
  const GroupElement g0 = sample_haar_rotation(6, rng);
  double worst = 0.0;
  for (Scheme s : {Scheme::HeavyBall, Scheme::NAGSC}) {
    const SchemeParams p = select_params(sm.L, sm.mu, s);
    OptimizerState a = OptimizerState::at_rest(g0), b = OptimizerState::at_rest(g0);
    for (int k = 0; k < 500; ++k) {
      a = step(a, pot, p);
      b = step(b, pot, p);
    }
    worst = std::max(worst, (a.g.matrix() - b.g.matrix()).cwiseAbs().maxCoeff());
  }
  return make("optimizers", "bitwise deterministic replay", worst, 0.0);
}

// ---- diagnostics -------------------------------------------------------------

// Heavy-Ball modified energy from random starts at h = gamma / (gamma^2 + L), checked
// against the decrement -gamma h |xi|^2 / 2 that the decrease argument delivers.
inline CheckResult heavy_ball_energy(Rng& rng, bool flip_friction) {
  long violations = 0, steps = 0;
  for (int trial = 0; trial < 4; ++trial) {
    const BrockettPotential pot = BrockettPotential::from_spec({6, 100.0 * (trial + 1)}, rng);
    const Smoothness sm = pot.smoothness_estimate();
    SchemeParams p{Scheme::HeavyBall, 0.0, 2.0 * std::sqrt(sm.mu)};
    p.h = p.gamma / (p.gamma * p.gamma + sm.L);
    SchemeParams used = p;
    if (flip_friction) used.gamma = -used.gamma;
    EnergyReport rep({0.5}, p.gamma * p.h);
    OptimizerState s = OptimizerState::at_rest(sample_haar_rotation(6, rng));
    for (int k = 0; k < 5000; ++k) {
      const Evaluation ev = evaluate(pot, s.g);
      rep.record(k, energy_hb(ev.value, s.xi, p), s.xi.squared_norm());
      s = advance(s, ev.grad, used);
    }
    violations += rep.violations[0];
    steps += rep.steps;
  }
  return make("diagnostics", "Heavy-Ball modified energy decrease", violations, 0.0,
              std::to_string(steps) + " steps");
}

inline CheckResult nagsc_energy(Rng& rng) {
  long increases = 0, steps = 0;
  for (int trial = 0; trial < 4; ++trial) {
    const BrockettPotential pot = BrockettPotential::from_spec({6, 100.0 * (trial + 1)}, rng);
    const Smoothness sm = pot.smoothness_estimate();
    SchemeParams p{Scheme::NAGSC, 0.0, 2.0 * std::sqrt(sm.mu)};
    p.h = std::min(1.0 / p.gamma, p.gamma / (2.0 * sm.L));
    RunOptions o;
    o.max_iters = 3000;
    o.eps = 1e-300;
    o.monitor_lyapunov = false;
    o.record_every = 1000;
    const RunTrace tr = run_trajectory(pot, p, OptimizerState::at_rest(sample_haar_rotation(6, rng)),
                                       pot.known_minimizer(), o);
    increases += tr.energy.violations[0];
    steps += tr.energy.steps;
  }
  return make("diagnostics", "NAG-SC energy nonincreasing at h = min(1/gamma, gamma/(2L))", increases, 0.0,
              std::to_string(steps) + " steps");
}

inline CheckResult lyapunov_contraction(Rng& rng) {
  long violations = 0, checked = 0;
  SweepConfig cfg;
  cfg.n = 6;
  cfg.max_iters = 200000;
  cfg.monitor_energy = false;
  for (Scheme s : {Scheme::HeavyBall, Scheme::NAGSC}) {
    const std::uint64_t seed = rng();
    const RunTrace tr = run_single(cfg, s, 100.0, seed);
    violations += tr.lyapunov.violations;
    checked += tr.lyapunov.steps_checked;
  }
  return make("diagnostics", "Lyapunov contraction L_{k+1} <= c L_k near g*", violations, 0.0,
              std::to_string(checked) + " steps checked");
}

inline CheckResult ode_energy_balance(Rng& rng) {
  const BrockettPotential pot = BrockettPotential::from_spec({4, 20.0}, rng);
  const double gamma = 2.0 * std::sqrt(pot.smoothness_estimate().mu);
  const OdeTrace tr = integrate_ode(sample_haar_rotation(4, rng), AlgebraElement::zero(4), pot, gamma, 1e-3, 2.0);
  double worst = 0.0;
  const double e0 = tr.rows.front().energy;
  for (std::size_t i = 0; i < tr.rows.size(); ++i) {
    worst = std::max(worst, std::abs(tr.rows[i].energy + tr.dissipated[i] - e0) / std::max(1.0, std::abs(e0)));
    if (i > 0) worst = std::max(worst, (tr.rows[i].energy - tr.rows[i - 1].energy) / std::max(1.0, std::abs(e0)));
  }
  return make("diagnostics", "ODE energy: E(t) + gamma int |xi|^2 = E(0), E nonincreasing", worst, 1e-8);
}

}  // namespace detail

struct Check {
  std::string group;
  std::function<CheckResult(Rng&)> run;
};

inline std::vector<Check> battery(const Options& opt) {
  using namespace detail;
  return {
      {"lie-core", group_axioms},
      {"lie-core", exp_on_group},
      {"lie-core", exp_log_roundtrip},
      {"lie-core", ad_skew_adjoint},
      {"lie-core", dlog_fixes_log},
      {"lie-core", dlog_quadratic_bound},
      {"lie-core", dlog_finite_difference},
      {"lie-core", dlog_identity_deviation},
      {"potentials", gradient_fd},
      {"potentials", hessian_fd},
      {"potentials", minimizer},
      {"optimizers", splitting_equivalence},
      {"optimizers", stays_on_group},
      {"optimizers", [](Rng&) { return rejects_bad_friction(); }},
      {"optimizers", deterministic_replay},
      {"diagnostics", [flip = opt.flip_heavy_ball_friction](Rng& r) { return heavy_ball_energy(r, flip); }},
      {"diagnostics", nagsc_energy},
      {"diagnostics", lyapunov_contraction},
      {"diagnostics", ode_energy_balance},
  };
}

// Each check draws from its own generator so filtering does not change results.
inline std::vector<CheckResult> run(const Options& opt) {
  for (const std::string& g : opt.only) {
    if (std::find(group_names().begin(), group_names().end(), g) == group_names().end())
      throw ConfigError("only", "unknown group '" + g + "'");
  }
  std::vector<CheckResult> out;
  const std::vector<Check> checks = battery(opt);
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const Check& c = checks[i];
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), c.group) == opt.only.end()) continue;
    Rng rng(opt.seed + 7919 * i);
    try {
      out.push_back(c.run(rng));
    } catch (const std::exception& e) {
      out.push_back({c.group, "check #" + std::to_string(i), false, kNaN, 0.0, std::string("threw: ") + e.what()});
    }
  }
  return out;
}

}  // namespace liemom::verify
