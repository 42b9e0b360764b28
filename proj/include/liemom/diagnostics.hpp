//
// Project LieMomentum
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "liemom/optimizers.hpp"
#include "liemom/potentials.hpp"
#include "liemom/so_n.hpp"

namespace liemom {

// ---- energies -------------------------------------------------------------

template <Potential P>
double energy_ode(const GroupElement& g, const AlgebraElement& xi, const P& pot) {
  return pot.value(g) + 0.5 * xi.squared_norm();
}

inline double energy_hb(double value, const AlgebraElement& xi, const SchemeParams& p) {
  const double damp = 1.0 - p.gamma * p.h;
  return value + 0.5 * damp * damp * xi.squared_norm();
}

template <Potential P>
double energy_hb(const GroupElement& g, const AlgebraElement& xi, const P& pot, const SchemeParams& p) {
  return energy_hb(pot.value(g), xi, p);
}

// U(g) + (1-gh)^2 / (2(1 + gh - g^2h^2)) |xi + h grad|^2, with grad taken at the
// previous iterate g exp(-h xi); this is the point at which the decrease argument
// evaluates it and the one a NAG-SC state already carries as prev_grad.
inline double energy_nagsc(double value, const AlgebraElement& xi, const AlgebraElement& prev_grad,
                           const SchemeParams& p) {
  const double gh = p.gamma * p.h;
  const double coef = (1.0 - gh) * (1.0 - gh) / (2.0 * (1.0 + gh - gh * gh));
  return value + coef * (xi.matrix() + p.h * prev_grad.matrix()).squaredNorm();
}

template <Potential P>
double energy_nagsc(const GroupElement& g, const AlgebraElement& xi, const P& pot, const SchemeParams& p) {
  const GroupElement prev = right_exp(g, -p.h * xi);
  return energy_nagsc(pot.value(g), xi, pot.trivialized_grad(prev), p);
}

// ---- Lyapunov functionals -------------------------------------------------

// U(g) - U* + |xi|^2/4 + |gamma log(g*^T g) + xi|^2/4
template <Potential P>
double lyapunov_ode(const GroupElement& g, const AlgebraElement& xi, const P& pot, const GroupElement& g_star,
                    double gamma) {
  const AlgebraElement lg = group_log(g_star.inverse() * g);
  return suboptimality(pot, g, g_star) + 0.25 * xi.squared_norm() +
         0.25 * (gamma * lg.matrix() + xi.matrix()).squaredNorm();
}

// Heavy-Ball functional from the current iterate g, its predecessor g_prev = g exp(-h xi)
// and the velocity xi.
inline double lyapunov_hb_terms(double subopt_prev, const AlgebraElement& log_gstar_g, const AlgebraElement& xi,
                                const SchemeParams& p) {
  const double damp = 1.0 - p.gamma * p.h;
  return subopt_prev / damp + 0.25 * xi.squared_norm() +
         0.25 * ((p.gamma / damp) * log_gstar_g.matrix() + xi.matrix()).squaredNorm();
}

template <Potential P>
double lyapunov_hb(const GroupElement& g, const GroupElement& g_prev, const AlgebraElement& xi, const P& pot,
                   const GroupElement& g_star, const SchemeParams& p) {
  return lyapunov_hb_terms(suboptimality(pot, g_prev, g_star), group_log(g_star.inverse() * g), xi, p);
}

template <Potential P>
double lyapunov_hb(const GroupElement& g, const AlgebraElement& xi, const P& pot, const GroupElement& g_star,
                   const SchemeParams& p) {
  return lyapunov_hb(g, right_exp(g, -p.h * xi), xi, pot, g_star, p);
}

inline double lyapunov_nagsc_terms(double subopt_prev, const AlgebraElement& grad_prev,
                                   const AlgebraElement& log_gstar_g, const AlgebraElement& xi,
                                   const SchemeParams& p) {
  const double gh = p.gamma * p.h;
  const double damp = 1.0 - gh;
  const double cross =
      (xi.matrix() + (p.gamma / damp) * log_gstar_g.matrix() + p.h * grad_prev.matrix()).squaredNorm();
  return subopt_prev / damp + 0.25 * xi.squared_norm() + 0.25 * cross -
         p.h * p.h * (2.0 - gh) / (4.0 * damp) * grad_prev.squared_norm();
}

template <Potential P>
double lyapunov_nagsc(const GroupElement& g, const GroupElement& g_prev, const AlgebraElement& xi, const P& pot,
                      const GroupElement& g_star, const SchemeParams& p) {
  return lyapunov_nagsc_terms(suboptimality(pot, g_prev, g_star), pot.trivialized_grad(g_prev),
                              group_log(g_star.inverse() * g), xi, p);
}

template <Potential P>
double lyapunov_nagsc(const GroupElement& g, const AlgebraElement& xi, const P& pot, const GroupElement& g_star,
                      const SchemeParams& p) {
  return lyapunov_nagsc(g, right_exp(g, -p.h * xi), xi, pot, g_star, p);
}

// ---- monitors --------------------------------------------------------------

struct ViolationEvent {
  long k = 0;         // index of the later iterate
  double value = 0;   // offending quantity (Delta E or ratio)
  double bound = 0;   // what it was compared against
};

inline constexpr std::size_t kMaxStoredEvents = 1000;

// Tracks E_k - E_{k-1} against -c * gamma * h * |xi_k|^2 for a list of coefficients c
// (c = 0 is plain monotonicity). Scaled tolerance 1e-12 * max(1, |E|).
struct EnergyReport {
  std::vector<double> decrement_coefficients;
  std::vector<long> violations;
  std::vector<std::vector<ViolationEvent>> events;
  double gamma_h = 0.0;
  long steps = 0;
  long increases = 0;
  double max_increase = 0.0;
  std::optional<double> last;

  EnergyReport() = default;
  EnergyReport(std::vector<double> coefficients, double gh)
      : decrement_coefficients(std::move(coefficients)),
        violations(decrement_coefficients.size(), 0),
        events(decrement_coefficients.size()),
        gamma_h(gh) {}

  void record(long k, double energy, double xi_sq) {
    if (last) {
      const double delta = energy - *last;
      const double tol = 1e-12 * std::max(1.0, std::abs(energy));
      ++steps;
      if (delta > 0.0) {
        ++increases;
        max_increase = std::max(max_increase, delta);
      }
      for (std::size_t i = 0; i < decrement_coefficients.size(); ++i) {
        const double bound = -decrement_coefficients[i] * gamma_h * xi_sq;
        if (delta > bound + tol) {
          ++violations[i];
          if (events[i].size() < kMaxStoredEvents) events[i].push_back({k, delta, bound});
        }
      }
    }
    last = energy;
  }
};

// Per-step contraction L_{k+1}/L_k. Ratios are checked against c + 1e-9 from the first
// iterate inside the ball d(g, g*) <= radius onwards.
struct LyapunovReport {
  double rate = 1.0;
  double radius = 0.0;
  std::optional<long> first_entry;
  long steps_checked = 0;
  long violations = 0;
  long increases = 0;
  long undefined = 0;  // iterates on the cut locus of g*
  double max_ratio = 0.0;
  double min_value = std::numeric_limits<double>::infinity();  // tracks L >= 0 / lower-bound checks
  std::vector<ViolationEvent> events;
  std::optional<double> last;

  void record(long k, double value, double distance) {
    min_value = std::min(min_value, value);
    if (last) {
      if (value > *last) ++increases;
      if (first_entry) {
        const double ratio = *last > 0.0 ? value / *last : (value > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        ++steps_checked;
        max_ratio = std::max(max_ratio, ratio);
        if (ratio > rate + 1e-9) {
          ++violations;
          if (events.size() < kMaxStoredEvents) events.push_back({k, ratio, rate});
        }
      }
    }
    if (!first_entry && distance <= radius) first_entry = k;
    last = value;
  }
};

// ---- sub-level set trap ----------------------------------------------------

// Membership in a component of a sub-level set is approximated by the distance to a
// representative point (a local minimizer) being below `radius`.
struct Component {
  GroupElement representative;
  double radius = 0.0;
};

struct TrapReport {
  double threshold_u = 0.0;            // u
  double threshold_scaled = 0.0;       // (1 - gamma h)^{-1} u, the alternative reading
  double initial_energy = 0.0;
  std::optional<int> start_component;  // nullopt: first iterate in no listed component
  bool trapped = true;
  std::optional<long> first_escape;
  std::optional<int> final_component;
  double max_distance = 0.0;           // from the starting representative
};

inline std::optional<int> locate_component(const GroupElement& g, const std::vector<Component>& comps) {
  std::optional<int> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < comps.size(); ++i) {
    double d;
    try {
      d = geodesic_distance(comps[i].representative, g);
    } catch (const AngleAtCut&) {
      continue;
    }
    if (d < comps[i].radius && d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

inline TrapReport check_sublevel_trap(const std::vector<GroupElement>& iterates, double initial_energy, double u,
                                      double gamma_h, const std::vector<Component>& comps) {
  TrapReport r;
  r.threshold_u = u;
  r.threshold_scaled = u / (1.0 - gamma_h);
  r.initial_energy = initial_energy;
  if (iterates.empty()) return r;
  r.start_component = locate_component(iterates.front(), comps);
  for (std::size_t k = 0; k < iterates.size(); ++k) {
    const auto c = locate_component(iterates[k], comps);
    if (r.start_component) {
      try {
        r.max_distance = std::max(r.max_distance,
                                  geodesic_distance(comps[*r.start_component].representative, iterates[k]));
      } catch (const AngleAtCut&) {
        r.max_distance = std::numbers::pi;
      }
    }
    if (c != r.start_component && r.trapped) {
      r.trapped = false;
      r.first_escape = static_cast<long>(k);
    }
    if (k + 1 == iterates.size()) r.final_component = c;
  }
  return r;
}

}  // namespace liemom
