//
// Project LieMomentum
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <algorithm>
#include <concepts>
#include <limits>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "liemom/random.hpp"
#include "liemom/so_n.hpp"

namespace liemom {

// A potential exposes value(g) and the left-trivialized gradient grad with
// d/dt value(g exp(t xi)) |_{t=0} = <grad(g), xi>.
template <class P>
concept Potential = requires(const P& p, const GroupElement& g) {
  { p.dim() } -> std::convertible_to<int>;
  { p.value(g) } -> std::convertible_to<double>;
  { p.trivialized_grad(g) } -> std::same_as<AlgebraElement>;
};

struct Evaluation {
  double value = 0.0;
  AlgebraElement grad;
};

// Potentials may provide a fused evaluate(g); otherwise value and gradient are computed separately.
template <Potential P>
Evaluation evaluate(const P& pot, const GroupElement& g) {
  if constexpr (requires { { pot.evaluate(g) } -> std::same_as<Evaluation>; }) {
    return pot.evaluate(g);
  } else {
    return {pot.value(g), pot.trivialized_grad(g)};
  }
}

// U(g) - U(g*), using a cancellation-free form when the potential offers one.
template <Potential P>
double suboptimality(const P& pot, const GroupElement& g, const GroupElement& g_star) {
  if constexpr (requires { { pot.suboptimality(g) } -> std::convertible_to<double>; }) {
    return pot.suboptimality(g);
  } else {
    return pot.value(g) - pot.value(g_star);
  }
}

struct Smoothness {
  double L = 0.0;
  double mu = 0.0;
  double kappa() const { return L / mu; }
};

// Lambda = diag(0, 1, ..., n-2, kappa/(n-1)).
struct SpectrumSpec {
  int n = 10;
  double kappa = 100.0;

  void validate() const {
    if (n < 2) throw ConfigError("n", "must be at least 2");
    const double floor = static_cast<double>(n - 1) * (n - 2);
    if (!(kappa > floor)) {
      throw ConfigError("kappa", "must exceed (n-1)(n-2) = " + std::to_string(floor) +
                                     "; at equality the top two eigenvalues coincide");
    }
  }

  Vector eigenvalues() const {
    validate();
    Vector lambda(n);
    for (int i = 0; i < n - 1; ++i) lambda(i) = i;
    lambda(n - 1) = kappa / (n - 1);
    return lambda;
  }
};

// L = (n-1)(lambda_n - lambda_1), mu = smallest adjacent gap.
inline Smoothness estimate_L_mu(const Vector& ascending) {
  const auto n = ascending.size();
  if (n < 2) throw DegenerateSpectrum("need at least two eigenvalues");
  double mu = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double gap = ascending(i + 1) - ascending(i);
    if (gap < 0.0) throw DegenerateSpectrum("eigenvalues must be ascending");
    mu = std::min(mu, gap);
  }
  const double spread = ascending(n - 1) - ascending(0);
  if (!(mu > 1e-12 * std::max(1.0, spread))) throw DegenerateSpectrum("repeated eigenvalue: mu = 0");
  return {static_cast<double>(n - 1) * spread, mu};
}

inline Smoothness estimate_L_mu(const SpectrumSpec& spec) { return estimate_L_mu(spec.eigenvalues()); }

// U(X) = tr(X^T B X N), N = diag(1, ..., n), B = R Lambda R^T with Lambda ascending.
//
// The minimum pairs the largest weight with the smallest eigenvalue: X* = R P_rev
// (columns of R in reverse order, one sign flipped if needed for det +1), and
// U* = sum_i i * lambda_{n+1-i}. X = R itself is the global maximum.
class BrockettPotential {
 public:
  // Exact construction from an eigendecomposition; R must lie in SO(n).
  BrockettPotential(Vector ascending, GroupElement r) : lambda_(std::move(ascending)), r_(std::move(r)) {
    require_same_dim(static_cast<int>(lambda_.size()), r_.dim());
    smooth_ = estimate_L_mu(lambda_);
    b_ = r_.matrix() * lambda_.asDiagonal() * r_.matrix().transpose();
    b_ = 0.5 * (b_ + b_.transpose());
    finish();
  }

  explicit BrockettPotential(const Matrix& b) {
    if (b.rows() != b.cols()) throw DimensionMismatch(static_cast<int>(b.rows()), static_cast<int>(b.cols()));
    const double asym = (b - b.transpose()).norm();
    if (asym > 1e-12 * std::max(1.0, b.norm())) throw ConfigError("B", "matrix is not symmetric");
    b_ = 0.5 * (b + b.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(b_);
    lambda_ = eig.eigenvalues();
    Matrix r = eig.eigenvectors();
    if (r.determinant() < 0.0) r.col(0) = -r.col(0);
    r_ = GroupElement(std::move(r));
    smooth_ = estimate_L_mu(lambda_);
    finish();
  }

  static BrockettPotential from_spec(const SpectrumSpec& spec, Rng& rng) {
    const Vector lambda = spec.eigenvalues();
    return BrockettPotential(lambda, sample_haar_rotation(spec.n, rng));
  }

  int dim() const { return static_cast<int>(lambda_.size()); }
  const Matrix& B() const { return b_; }
  const Vector& eigenvalues() const { return lambda_; }
  const GroupElement& eigenvectors() const { return r_; }

  double value(const GroupElement& x) const {
    require_same_dim(dim(), x.dim());
    const Matrix bx = b_ * x.matrix();
    double u = 0.0;
    for (int k = 0; k < dim(); ++k) u += (k + 1) * x.matrix().col(k).dot(bx.col(k));
    return u;
  }

  // [X^T B X, N]: entry (i, j) is M_ij (j - i).
  AlgebraElement trivialized_grad(const GroupElement& x) const { return evaluate(x).grad; }

  Evaluation evaluate(const GroupElement& x) const {
    require_same_dim(dim(), x.dim());
    const int n = dim();
    Matrix m = x.matrix().transpose() * (b_ * x.matrix());
    double u = 0.0;
    for (int k = 0; k < n; ++k) u += (k + 1) * m(k, k);
    Matrix g(n, n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        g(i, j) = 0.5 * (m(i, j) + m(j, i)) * (j - i);
      }
    }
    return {u, AlgebraElement::from_skew(std::move(g))};
  }

  // U(X) - U* as sum_k (k+1) sum_m (lambda_m - lambda_{n-1-k}) Y_mk^2 with Y = R^T X.
  // The dominant diagonal terms vanish exactly, so values far below eps*U* stay accurate.
  double suboptimality(const GroupElement& x) const {
    require_same_dim(dim(), x.dim());
    const int n = dim();
    const Matrix y = r_.matrix().transpose() * x.matrix();
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
      const double target = lambda_(n - 1 - k);
      double col = 0.0;
      for (int m = 0; m < n; ++m) col += (lambda_(m) - target) * y(m, k) * y(m, k);
      s += (k + 1) * col;
    }
    return s;
  }

  const GroupElement& known_minimizer() const { return x_star_; }
  double known_min_value() const { return u_star_; }
  Smoothness smoothness_estimate() const { return smooth_; }

  // Stationary point R P_perm: column i is r_{perm[i]}; column signs are chosen so the
  // result has det +1 (flip the first column if needed).
  GroupElement stationary_point(std::span<const int> perm) const {
    check_permutation(perm, dim());
    const int n = dim();
    Matrix x(n, n);
    for (int i = 0; i < n; ++i) x.col(i) = r_.matrix().col(perm[i]);
    if (x.determinant() < 0.0) x.col(0) = -x.col(0);
    return GroupElement::unchecked(std::move(x));
  }

  static void check_permutation(std::span<const int> perm, int n) {
    if (static_cast<int>(perm.size()) != n) throw std::invalid_argument("permutation has wrong length");
    std::vector<int> sorted(perm.begin(), perm.end());
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < n; ++i)
      if (sorted[i] != i) throw std::invalid_argument("not a permutation of 0..n-1");
  }

 private:
  void finish() {
    const int n = dim();
    std::vector<int> rev(n);
    std::iota(rev.rbegin(), rev.rend(), 0);
    x_star_ = stationary_point(rev);
    u_star_ = 0.0;
    for (int k = 0; k < n; ++k) u_star_ += (k + 1) * lambda_(n - 1 - k);
  }

  Matrix b_;
  Vector lambda_;
  GroupElement r_;
  GroupElement x_star_;
  double u_star_ = 0.0;
  Smoothness smooth_;
};

inline std::vector<int> identity_permutation(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

inline std::vector<int> reversal_permutation(int n) {
  std::vector<int> p(n);
  std::iota(p.rbegin(), p.rend(), 0);
  return p;
}

// Eigenvalues of the Riemannian Hessian at the stationary point R P_perm, one per pair
// of positions i < j: (j - i)(lambda_perm(i) - lambda_perm(j)) along (E_ij - E_ji)/sqrt(2).
// All positive exactly at the reversal permutation.
inline std::vector<double> hessian_spectrum(const Vector& ascending, std::span<const int> perm) {
  const int n = static_cast<int>(ascending.size());
  BrockettPotential::check_permutation(perm, n);
  std::vector<double> sigma;
  sigma.reserve(n * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) sigma.push_back((j - i) * (ascending(perm[i]) - ascending(perm[j])));
  return sigma;
}

inline std::vector<double> hessian_spectrum(const BrockettPotential& pot, std::span<const int> perm) {
  return hessian_spectrum(pot.eigenvalues(), perm);
}

}  // namespace liemom
