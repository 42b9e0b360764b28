//
// Project LieMomentum
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "liemom/diagnostics.hpp"
#include "liemom/optimizers.hpp"
#include "liemom/potentials.hpp"

namespace liemom {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct TraceRow {
  long k = 0;
  double t = 0.0;
  double value = 0.0;        // U(g_k)
  double subopt = 0.0;       // U(g_k) - U*
  double xi_norm = 0.0;
  double energy = kNaN;      // scheme-appropriate modified energy
  double lyapunov = kNaN;
  double ratio = kNaN;       // L_k / L_{k-1}
  double distance = kNaN;    // d(g_k, g*)
};

// Enough of an iterate to recompute every logged functional.
struct StateRecord {
  long k = 0;
  Matrix g;
  Matrix g_prev;
  Matrix xi;
};

struct RunOptions {
  long max_iters = 1'000'000;
  double eps = 1e-12;             // stop once subopt <= eps * subopt_0
  long record_every = 1;          // TraceRow stride; the final iterate is always recorded
  bool monitor_energy = true;
  bool monitor_lyapunov = true;
  double lyapunov_radius = 0.0;   // ball around g* where contraction is checked
  long keep_states_every = 0;     // 0: keep none
};

struct RunTrace {
  SchemeParams params;
  Smoothness smoothness;
  std::optional<double> theoretical_rate;
  double eps = 1e-12;
  std::vector<TraceRow> rows;
  std::vector<double> subopt;     // every iterate
  std::vector<StateRecord> states;
  long iterations = 0;
  bool converged = false;
  long subopt_increases = 0;      // iterations with U(g_{k+1}) > U(g_k)
  double max_orthogonality_defect = 0.0;
  EnergyReport energy;
  LyapunovReport lyapunov;
  GroupElement final_g;
  AlgebraElement final_xi;

  double initial_subopt() const { return subopt.empty() ? kNaN : subopt.front(); }
  double final_subopt() const { return subopt.empty() ? kNaN : subopt.back(); }
};

inline std::vector<double> energy_coefficients(Scheme s) {
  // Heavy-Ball: the stated bound (1), the bound its argument yields (1/2), monotonicity (0).
  if (s == Scheme::HeavyBall) return {1.0, 0.5, 0.0};
  return {0.0};
}

// Iterates a scheme from `start`, logging energies, Lyapunov values and suboptimality.
template <Potential P>
RunTrace run_trajectory(const P& pot, const SchemeParams& params, OptimizerState start, const GroupElement& g_star,
                        const RunOptions& opt, std::optional<Smoothness> smooth = std::nullopt) {
  params.validate();
  RunTrace tr;
  tr.params = params;
  tr.eps = opt.eps;
  if (smooth) {
    tr.smoothness = *smooth;
    // the guaranteed rate only holds at the default step and friction
    const SchemeParams def = select_params(smooth->L, smooth->mu, params.scheme, params.a);
    if (def.h == params.h && def.gamma == params.gamma)
      tr.theoretical_rate = theoretical_rate(params.scheme, smooth->L, smooth->mu, params.a);
  }
  tr.energy = EnergyReport(energy_coefficients(params.scheme), params.gamma * params.h);
  tr.lyapunov.rate = tr.theoretical_rate.value_or(std::numeric_limits<double>::infinity());
  tr.lyapunov.radius = opt.lyapunov_radius;
  const bool lyap = opt.monitor_lyapunov &&
                    (params.scheme == Scheme::HeavyBall || params.scheme == Scheme::NAGSC);

  OptimizerState s = std::move(start);
  Evaluation ev = evaluate(pot, s.g);
  double sub = suboptimality(pot, s.g, g_star);
  // Along a trajectory started at rest, g_{-1} = g_0.
  GroupElement g_prev = s.g;
  double sub_prev = sub;
  AlgebraElement grad_prev = s.prev_grad ? *s.prev_grad : ev.grad;
  const double threshold = opt.eps * sub;

  for (long k = 0;; ++k) {
    tr.subopt.push_back(sub);
    if (k > 0 && sub > sub_prev) ++tr.subopt_increases;
    tr.max_orthogonality_defect = std::max(tr.max_orthogonality_defect, s.g.orthogonality_defect());

    TraceRow row;
    row.k = k;
    row.t = k * params.h;
    row.value = ev.value;
    row.subopt = sub;
    const double xi_sq = s.xi.squared_norm();
    row.xi_norm = std::sqrt(xi_sq);
    if (opt.monitor_energy) {
      switch (params.scheme) {
        case Scheme::HeavyBall: row.energy = energy_hb(ev.value, s.xi, params); break;
        case Scheme::NAGSC: row.energy = energy_nagsc(ev.value, s.xi, grad_prev, params); break;
        case Scheme::Splitting: row.energy = ev.value + 0.5 * xi_sq; break;
        case Scheme::GD: row.energy = ev.value; break;
      }
      tr.energy.record(k, row.energy, xi_sq);
    }
    if (lyap) {
      std::optional<AlgebraElement> lg;
      try {
        lg = group_log(g_star.inverse() * s.g);
      } catch (const AngleAtCut&) {
        // undefined on the cut locus of g*; the next defined value starts a fresh comparison
        tr.lyapunov.last.reset();
        ++tr.lyapunov.undefined;
      }
      if (lg) {
        row.distance = lg->norm();
        row.lyapunov = params.scheme == Scheme::HeavyBall
                           ? lyapunov_hb_terms(sub_prev, *lg, s.xi, params)
                           : lyapunov_nagsc_terms(sub_prev, grad_prev, *lg, s.xi, params);
        if (tr.lyapunov.last && *tr.lyapunov.last != 0.0) row.ratio = row.lyapunov / *tr.lyapunov.last;
        tr.lyapunov.record(k, row.lyapunov, row.distance);
      }
    }

    const bool done = sub <= threshold;
    const bool out_of_budget = k >= opt.max_iters;
    if (opt.keep_states_every > 0 && (k % opt.keep_states_every == 0 || done || out_of_budget)) {
      tr.states.push_back({k, s.g.matrix(), g_prev.matrix(), s.xi.matrix()});
    }
    if (k % std::max(1L, opt.record_every) == 0 || done || out_of_budget) tr.rows.push_back(row);
    if (done || out_of_budget) {
      tr.converged = done;
      tr.iterations = k;
      break;
    }

    OptimizerState next = advance(s, ev.grad, params);
    g_prev = s.g;
    sub_prev = sub;
    grad_prev = ev.grad;
    s = std::move(next);
    ev = evaluate(pot, s.g);
    sub = suboptimality(pot, s.g, g_star);
  }
  tr.final_g = s.g;
  tr.final_xi = s.xi;
  return tr;
}

// ---- continuous-time reference ------------------------------------------

struct OdeOptions {
  long record_every = 1;
  std::optional<GroupElement> g_star;  // enables L_ODE and distance columns
};

struct OdeTrace {
  double gamma = 0.0;
  double dt = 0.0;
  std::vector<TraceRow> rows;   // energy = E_ODE
  std::vector<double> dissipated;  // gamma * int_0^t |xi|^2, aligned with rows
  GroupElement final_g;
  AlgebraElement final_xi;
  double max_orthogonality_defect = 0.0;
};

namespace detail {

// Newton iteration for the orthogonal polar factor; converges quadratically from
// the O(dt^5) drift of one RK4 step.
inline Matrix polar_project(Matrix g) {
  const auto n = g.rows();
  const Matrix eye = Matrix::Identity(n, n);
  for (int it = 0; it < 6; ++it) {
    const Matrix gtg = g.transpose() * g;
    if ((gtg - eye).norm() < 1e-15) break;
    g = g * (0.5 * (3.0 * eye - gtg));
  }
  return g;
}

}  // namespace detail

// Classical RK4 on (g' = g xi, xi' = -gamma xi - grad(g), D' = gamma |xi|^2) with
// polar re-orthogonalization of g after every step.
template <Potential P>
OdeTrace integrate_ode(const GroupElement& g0, const AlgebraElement& xi0, const P& pot, double gamma, double dt,
                       double T, const OdeOptions& opt = {}) {
  if (!(dt > 0.0)) throw ConfigError("dt", "must be positive");
  if (!(T >= 0.0)) throw ConfigError("T", "must be nonnegative");
  if (!(gamma >= 0.0)) throw ConfigError("gamma", "must be nonnegative");
  OdeTrace tr;
  tr.gamma = gamma;
  tr.dt = dt;
  const long steps = static_cast<long>(std::llround(T / dt));

  struct Deriv {
    Matrix dg, dxi;
    double dd;
  };
  auto f = [&](const Matrix& g, const Matrix& xi) {
    const AlgebraElement grad = pot.trivialized_grad(GroupElement::unchecked(g));
    return Deriv{g * xi, -gamma * xi - grad.matrix(), gamma * xi.squaredNorm()};
  };

  Matrix g = g0.matrix();
  Matrix xi = xi0.matrix();
  double dissipated = 0.0;
  auto record = [&](long k) {
    const GroupElement ge = GroupElement::unchecked(g);
    const AlgebraElement xe = AlgebraElement::from_skew(0.5 * (xi - xi.transpose()));
    TraceRow row;
    row.k = k;
    row.t = k * dt;
    row.value = pot.value(ge);
    row.xi_norm = xe.norm();
    row.energy = row.value + 0.5 * xe.squared_norm();
    if (opt.g_star) {
      row.subopt = suboptimality(pot, ge, *opt.g_star);
      try {
        const AlgebraElement lg = group_log(opt.g_star->inverse() * ge);
        row.distance = lg.norm();
        row.lyapunov = row.subopt + 0.25 * xe.squared_norm() + 0.25 * (gamma * lg.matrix() + xe.matrix()).squaredNorm();
      } catch (const AngleAtCut&) {
        // L_ODE is undefined on the cut locus of g*; leave NaN
      }
    }
    tr.rows.push_back(row);
    tr.dissipated.push_back(dissipated);
  };

  record(0);
  for (long k = 1; k <= steps; ++k) {
    const Deriv k1 = f(g, xi);
    const Deriv k2 = f(g + 0.5 * dt * k1.dg, xi + 0.5 * dt * k1.dxi);
    const Deriv k3 = f(g + 0.5 * dt * k2.dg, xi + 0.5 * dt * k2.dxi);
    const Deriv k4 = f(g + dt * k3.dg, xi + dt * k3.dxi);
    g += dt / 6.0 * (k1.dg + 2.0 * k2.dg + 2.0 * k3.dg + k4.dg);
    xi += dt / 6.0 * (k1.dxi + 2.0 * k2.dxi + 2.0 * k3.dxi + k4.dxi);
    xi = 0.5 * (xi - xi.transpose());
    dissipated += dt / 6.0 * (k1.dd + 2.0 * k2.dd + 2.0 * k3.dd + k4.dd);
    g = detail::polar_project(std::move(g));
    tr.max_orthogonality_defect = std::max(tr.max_orthogonality_defect, GroupElement::unchecked(g).orthogonality_defect());
    if (k % std::max(1L, opt.record_every) == 0 || k == steps) record(k);
  }
  tr.final_g = GroupElement::unchecked(g);
  tr.final_xi = AlgebraElement::from_skew(0.5 * (xi - xi.transpose()));
  return tr;
}

struct OdeRateCheck {
  double rate = 0.0;
  double rel_tol = 0.0;
  long checked = 0;
  long violations = 0;
  double max_relative_increase = 0.0;  // of e^{ct} L_ODE(t) between recorded rows
  std::optional<double> first_violation_t;
};

// e^{ct} L_ODE(t) must be nonincreasing within rel_tol between consecutive rows.
inline OdeRateCheck check_ode_rate(const OdeTrace& tr, double c, double rel_tol) {
  OdeRateCheck r;
  r.rate = c;
  r.rel_tol = rel_tol;
  for (std::size_t i = 1; i < tr.rows.size(); ++i) {
    const TraceRow& a = tr.rows[i - 1];
    const TraceRow& b = tr.rows[i];
    if (std::isnan(a.lyapunov) || std::isnan(b.lyapunov)) continue;
    // e^{c t_b} L_b / (e^{c t_a} L_a) - 1
    const double rel = std::exp(c * (b.t - a.t)) * b.lyapunov / a.lyapunov - 1.0;
    ++r.checked;
    r.max_relative_increase = std::max(r.max_relative_increase, rel);
    if (rel > rel_tol) {
      ++r.violations;
      if (!r.first_violation_t) r.first_violation_t = b.t;
    }
  }
  return r;
}

}  // namespace liemom
