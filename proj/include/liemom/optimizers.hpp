//
// Project LieMomentum
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cassert>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "liemom/dlog.hpp"
#include "liemom/potentials.hpp"
#include "liemom/so_n.hpp"

namespace liemom {

enum class Scheme { GD, HeavyBall, NAGSC, Splitting };

inline std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::GD: return "gd";
    case Scheme::HeavyBall: return "heavy-ball";
    case Scheme::NAGSC: return "nag-sc";
    case Scheme::Splitting: return "splitting";
  }
  return "unknown";
}

inline Scheme parse_scheme(std::string_view name) {
  if (name == "gd") return Scheme::GD;
  if (name == "heavy-ball" || name == "hb") return Scheme::HeavyBall;
  if (name == "nag-sc" || name == "nagsc") return Scheme::NAGSC;
  if (name == "splitting") return Scheme::Splitting;
  throw ConfigError("scheme", "unknown scheme '" + std::string(name) + "' (gd, heavy-ball, nag-sc, splitting)");
}

struct SchemeParams {
  Scheme scheme = Scheme::HeavyBall;
  double h = 0.0;
  double gamma = 0.0;  // unused by GD
  double a = std::numbers::pi;

  void validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("h", "step size must be positive and finite");
    if (!(a > 0.0 && a < 2.0 * std::numbers::pi)) throw ConfigError("a", "must lie in (0, 2*pi)");
    if (scheme == Scheme::GD) return;
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma", "friction must be positive and finite");
    if ((scheme == Scheme::HeavyBall || scheme == Scheme::NAGSC) && !(gamma * h < 1.0)) {
      throw ConfigError("gamma*h", "invariant gamma*h < 1 violated (gamma*h = " + std::to_string(gamma * h) +
                                       "); 1 - gamma*h must stay positive");
    }
  }
};

struct OptimizerState {
  GroupElement g;
  AlgebraElement xi;
  std::optional<AlgebraElement> prev_grad;  // NAG-SC: gradient at the previous iterate
  long k = 0;

  static OptimizerState at_rest(GroupElement g0) {
    const int n = g0.dim();
    return {std::move(g0), AlgebraElement::zero(n), std::nullopt, 0};
  }
};

// Default step and friction per scheme. GD uses h = 1/L; the splitting scheme borrows
// the Heavy-Ball choice.
inline SchemeParams select_params(double L, double mu, Scheme scheme, double a = std::numbers::pi) {
  if (!(mu > 0.0)) throw ConfigError("mu", "must be positive");
  if (!(L >= mu)) throw ConfigError("L", "must satisfy L >= mu");
  if (!(a > 0.0 && a < 2.0 * std::numbers::pi)) throw ConfigError("a", "must lie in (0, 2*pi)");
  SchemeParams p;
  p.scheme = scheme;
  p.a = a;
  switch (scheme) {
    case Scheme::GD:
      p.h = 1.0 / L;
      break;
    case Scheme::HeavyBall:
    case Scheme::Splitting:
      p.gamma = 2.0 * std::sqrt(mu);
      p.h = std::sqrt(mu) / (4.0 * L);
      break;
    case Scheme::NAGSC:
      p.gamma = 2.0 * std::sqrt(mu);
      p.h = std::min(1.0 / std::sqrt(2.0 * L), 1.0 / (2.0 * p_series(a)));
      break;
  }
  return p;
}

// Per-step Lyapunov contraction factor guaranteed at the default parameters.
inline std::optional<double> theoretical_rate(Scheme scheme, double L, double mu, double a = std::numbers::pi) {
  switch (scheme) {
    case Scheme::HeavyBall: return 1.0 / (1.0 + mu / (16.0 * L));
    case Scheme::NAGSC: {
      const double h = std::min(1.0 / std::sqrt(2.0 * L), 1.0 / (2.0 * p_series(a)));
      return 1.0 / (1.0 + std::sqrt(mu) * h / 30.0);
    }
    default: return std::nullopt;
  }
}

// Continuous-time rate for e^{ct} L_ODE(t) at gamma = 2 sqrt(mu).
inline double ode_theoretical_rate(double mu) { return 2.0 / 3.0 * std::sqrt(mu); }

namespace detail {

inline void debug_check(const OptimizerState& s) {
#ifndef NDEBUG
  assert(s.g.orthogonality_defect() < 1e-8);
  assert((s.xi.matrix() + s.xi.matrix().transpose()).cwiseAbs().maxCoeff() == 0.0);
#else
  (void)s;
#endif
}

}  // namespace detail

// Single updates given the gradient at the current iterate. Trajectory runners reuse
// the gradient they already evaluated; the public step_* functions evaluate it here.
inline OptimizerState advance_gd(const OptimizerState& s, const AlgebraElement& grad, double h) {
  OptimizerState next{right_exp(s.g, -h * grad), AlgebraElement::zero(s.g.dim()), std::nullopt, s.k + 1};
  detail::debug_check(next);
  return next;
}

inline OptimizerState advance_heavy_ball(const OptimizerState& s, const AlgebraElement& grad, const SchemeParams& p) {
  const double damp = 1.0 - p.gamma * p.h;
  AlgebraElement xi = AlgebraElement::from_skew(damp * s.xi.matrix() - p.h * grad.matrix());
  GroupElement g = right_exp(s.g, p.h * xi);
  OptimizerState next{std::move(g), std::move(xi), std::nullopt, s.k + 1};
  detail::debug_check(next);
  return next;
}

inline OptimizerState advance_nag_sc(const OptimizerState& s, const AlgebraElement& grad, const SchemeParams& p) {
  const double damp = 1.0 - p.gamma * p.h;
  // k = 0: no previous iterate, so the difference term vanishes.
  const AlgebraElement& prev = s.prev_grad ? *s.prev_grad : grad;
  AlgebraElement xi = AlgebraElement::from_skew(damp * s.xi.matrix() - damp * p.h * (grad.matrix() - prev.matrix()) -
                                                p.h * grad.matrix());
  GroupElement g = right_exp(s.g, p.h * xi);
  OptimizerState next{std::move(g), std::move(xi), grad, s.k + 1};
  detail::debug_check(next);
  return next;
}

inline OptimizerState advance_splitting(const OptimizerState& s, const AlgebraElement& grad, const SchemeParams& p) {
  const double decay = std::exp(-p.gamma * p.h);
  const double kick = -std::expm1(-p.gamma * p.h) / p.gamma;
  AlgebraElement xi = AlgebraElement::from_skew(decay * s.xi.matrix() - kick * grad.matrix());
  GroupElement g = right_exp(s.g, p.h * xi);
  OptimizerState next{std::move(g), std::move(xi), std::nullopt, s.k + 1};
  detail::debug_check(next);
  return next;
}

inline OptimizerState advance(const OptimizerState& s, const AlgebraElement& grad, const SchemeParams& p) {
  switch (p.scheme) {
    case Scheme::GD: return advance_gd(s, grad, p.h);
    case Scheme::HeavyBall: return advance_heavy_ball(s, grad, p);
    case Scheme::NAGSC: return advance_nag_sc(s, grad, p);
    case Scheme::Splitting: return advance_splitting(s, grad, p);
  }
  return s;
}

template <Potential P>
OptimizerState step_gd(const OptimizerState& s, const P& pot, double h) {
  return advance_gd(s, pot.trivialized_grad(s.g), h);
}

template <Potential P>
OptimizerState step_heavy_ball(const OptimizerState& s, const P& pot, const SchemeParams& p) {
  return advance_heavy_ball(s, pot.trivialized_grad(s.g), p);
}

template <Potential P>
OptimizerState step_nag_sc(const OptimizerState& s, const P& pot, const SchemeParams& p) {
  return advance_nag_sc(s, pot.trivialized_grad(s.g), p);
}

template <Potential P>
OptimizerState step_splitting(const OptimizerState& s, const P& pot, const SchemeParams& p) {
  return advance_splitting(s, pot.trivialized_grad(s.g), p);
}

template <Potential P>
OptimizerState step(const OptimizerState& s, const P& pot, const SchemeParams& p) {
  return advance(s, pot.trivialized_grad(s.g), p);
}

// Heavy-Ball parameters and velocity scale that reproduce a splitting trajectory:
// h' = h sqrt((1 - e^{-gh})/(gh)), gamma' = sqrt(gamma (1 - e^{-gh})/h), xi' = sqrt(gh/(1 - e^{-gh})) xi.
struct HeavyBallEquivalent {
  SchemeParams params;
  double velocity_scale = 1.0;
};

inline HeavyBallEquivalent heavy_ball_equivalent_of_splitting(const SchemeParams& split) {
  const double gh = split.gamma * split.h;
  const double one_minus = -std::expm1(-gh);
  HeavyBallEquivalent eq;
  eq.params.scheme = Scheme::HeavyBall;
  eq.params.a = split.a;
  eq.params.h = split.h * std::sqrt(one_minus / gh);
  eq.params.gamma = std::sqrt(split.gamma * one_minus / split.h);
  eq.velocity_scale = std::sqrt(gh / one_minus);
  return eq;
}

}  // namespace liemom
