//
// Project LieMomentum
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "liemom/config.hpp"
#include "liemom/errors.hpp"

namespace liemom {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Element of so(n). The stored matrix is exactly skew-symmetric.
class AlgebraElement {
 public:
  AlgebraElement() = default;

  explicit AlgebraElement(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    m_ = 0.5 * (m - m.transpose());
  }

  static AlgebraElement zero(int n) { return AlgebraElement(Matrix::Zero(n, n), Trusted{}); }

  // Caller guarantees exact skew-symmetry (entries (i,j) and (j,i) negate each other bitwise).
  static AlgebraElement from_skew(Matrix m) { return AlgebraElement(std::move(m), Trusted{}); }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

  double squared_norm() const { return m_.squaredNorm(); }
  double norm() const { return m_.norm(); }

  AlgebraElement& operator+=(const AlgebraElement& o) {
    check(o);
    m_ += o.m_;
    return *this;
  }
  AlgebraElement& operator-=(const AlgebraElement& o) {
    check(o);
    m_ -= o.m_;
    return *this;
  }
  AlgebraElement& operator*=(double s) {
    m_ *= s;
    return *this;
  }

  friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
  friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
  friend AlgebraElement operator*(double s, AlgebraElement a) { return a *= s; }
  friend AlgebraElement operator*(AlgebraElement a, double s) { return a *= s; }
  friend AlgebraElement operator-(AlgebraElement a) {
    a.m_ = -a.m_;
    return a;
  }

 private:
  struct Trusted {};
  AlgebraElement(Matrix m, Trusted) : m_(std::move(m)) {}

  void check(const AlgebraElement& o) const {
    if (o.dim() != dim()) throw DimensionMismatch(dim(), o.dim());
  }

  Matrix m_;
};

// Element of SO(n).
class GroupElement {
 public:
  GroupElement() = default;

  explicit GroupElement(Matrix m, const Tolerances& tol = kDefaultTolerances) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw DimensionMismatch(static_cast<int>(m_.rows()), static_cast<int>(m_.cols()));
    const double defect = orthogonality_defect();
    if (!(defect <= tol.orth)) throw NotOrthogonal("|g^T g - I|_F = " + std::to_string(defect));
    const double det = m_.determinant();
    if (!(std::abs(det - 1.0) <= tol.orth)) throw NotOrthogonal("det(g) = " + std::to_string(det));
  }

  static GroupElement identity(int n) { return unchecked(Matrix::Identity(n, n)); }

  // For products and exponentials, which stay on the group up to rounding.
  static GroupElement unchecked(Matrix m) {
    GroupElement g;
    g.m_ = std::move(m);
    return g;
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

  GroupElement inverse() const { return unchecked(m_.transpose()); }

  double orthogonality_defect() const {
    return (m_.transpose() * m_ - Matrix::Identity(m_.rows(), m_.cols())).norm();
  }

  friend GroupElement operator*(const GroupElement& a, const GroupElement& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());
    return unchecked(a.m_ * b.m_);
  }

 private:
  Matrix m_;
};

inline void require_same_dim(int a, int b) {
  if (a != b) throw DimensionMismatch(a, b);
}

// <X, Y> = trace(X^T Y)
inline double inner(const AlgebraElement& x, const AlgebraElement& y) {
  require_same_dim(x.dim(), y.dim());
  return x.matrix().cwiseProduct(y.matrix()).sum();
}

inline AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y) {
  require_same_dim(x.dim(), y.dim());
  const Matrix xy = x.matrix() * y.matrix();
  // yx = (xy)^T for skew x, y
  return AlgebraElement::from_skew(xy - xy.transpose());
}

namespace detail {

inline double one_norm(const Matrix& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

// r_m(A) - I for the Pade approximant r_m = (V - U)^{-1}(V + U), i.e. 2 (V - U)^{-1} U.
// Working with exp(A) - I keeps full relative accuracy for small A, so products
// g (I + F) do not accumulate the rounding bias of an explicit identity part.
inline Matrix pade_expm1(const Matrix& a, int m) {
  const auto n = a.rows();
  const Matrix eye = Matrix::Identity(n, n);
  Matrix u, v;
  const Matrix a2 = a * a;
  if (m == 13) {
    static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                   1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                   670442572800.0,      33522128640.0,       1323241920.0,
                                   40840800.0,          960960.0,            16380.0,
                                   182.0,               1.0};
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    Matrix t = b[13] * a6 + b[11] * a4 + b[9] * a2;
    u = a * (a6 * t + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * eye);
    t = b[12] * a6 + b[10] * a4 + b[8] * a2;
    v = a6 * t + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * eye;
  } else {
    static constexpr double b3[] = {120.0, 60.0, 12.0, 1.0};
    static constexpr double b5[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
    static constexpr double b7[] = {17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0};
    static constexpr double b9[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                                    2162160.0,     110880.0,     3960.0,       90.0,        1.0};
    const double* b = m == 3 ? b3 : m == 5 ? b5 : m == 7 ? b7 : b9;
    Matrix odd = b[1] * eye;
    Matrix even = b[0] * eye;
    Matrix power = eye;
    for (int k = 1; 2 * k <= m; ++k) {
      power = (k == 1) ? a2 : Matrix(power * a2);
      even += b[2 * k] * power;
      odd += b[2 * k + 1] * power;
    }
    u = a * odd;
    v = std::move(even);
  }
  return (v - u).partialPivLu().solve(2.0 * u);
}

// exp(A) - I by scaling and squaring (Higham 2005 degree table, up to degree 13);
// squaring acts as F -> 2F + F^2.
inline Matrix expm1(const Matrix& a) {
  static constexpr double theta[] = {1.495585217958292e-2, 2.539398330063230e-1, 9.504178996162932e-1,
                                     2.097847961257068e0, 5.371920351148152e0};
  static constexpr int degree[] = {3, 5, 7, 9};
  const double norm = one_norm(a);
  for (int i = 0; i < 4; ++i) {
    if (norm <= theta[i]) return pade_expm1(a, degree[i]);
  }
  int s = 0;
  if (norm > theta[4]) s = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta[4]))));
  Matrix f = pade_expm1(a * std::ldexp(1.0, -s), 13);
  for (int i = 0; i < s; ++i) f = 2.0 * f + f * f;
  return f;
}

inline Matrix expm(const Matrix& a) {
  Matrix r = expm1(a);
  r.diagonal().array() += 1.0;
  return r;
}

// Coefficients of theta/sin(theta) as a power series in u = 1 - cos(theta):
// a_0 = 1, (2k+1) a_k = k a_{k-1}. Radius of convergence u < 2.
inline double theta_over_sin_coefficient(int k) {
  double a = 1.0;
  for (int j = 1; j <= k; ++j) a *= static_cast<double>(j) / (2.0 * j + 1.0);
  return a;
}

inline double theta_over_sin(double theta) {
  if (theta < 1e-4) {
    const double t2 = theta * theta;
    return 1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0;
  }
  return theta / std::sin(theta);
}

inline AlgebraElement skew_part(const Matrix& m) {
  return AlgebraElement::from_skew(0.5 * (m - m.transpose()));
}

}  // namespace detail

inline GroupElement group_exp(const AlgebraElement& xi) { return GroupElement::unchecked(detail::expm(xi.matrix())); }

// g * exp(xi), formed as g + g (exp(xi) - I).
inline GroupElement right_exp(const GroupElement& g, const AlgebraElement& xi) {
  require_same_dim(g.dim(), xi.dim());
  return GroupElement::unchecked(g.matrix() + g.matrix() * detail::expm1(xi.matrix()));
}

// Principal logarithm on SO(n).
//
// With C = (Q + Q^T)/2 and S = (Q - Q^T)/2 (commuting, both functions of Q), each
// invariant plane carries C = cos(t) I and S = sin(t) J, so log Q = S * f(C) with
// f = t / sin(t). Near the identity f(C) is a short matrix series in I - C; otherwise
// C is diagonalized and the angle of each eigenvector is read off as atan2(|S v|, c),
// which stays accurate near both 0 and pi.
inline AlgebraElement group_log(const GroupElement& g, const Tolerances& tol = kDefaultTolerances) {
  const Matrix& q = g.matrix();
  const auto n = q.rows();
  const Matrix s = 0.5 * (q - q.transpose());
  const Matrix c = 0.5 * (q + q.transpose());
  const Matrix d = Matrix::Identity(n, n) - c;
  const double r = d.norm();
  if (r <= 0.5) {
    // Terms decay at least like (r/2)^k.
    int order = 0;
    double bound = 1.0;
    while (bound > 1e-18 && order < 60) {
      ++order;
      bound *= 0.5 * r;
    }
    Matrix p = detail::theta_over_sin_coefficient(order) * Matrix::Identity(n, n);
    for (int k = order - 1; k >= 0; --k) {
      p = p * d;
      p.diagonal().array() += detail::theta_over_sin_coefficient(k);
    }
    return detail::skew_part(s * p);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(c);
  const Matrix& v = eig.eigenvectors();
  Vector f(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double sk = (s * v.col(k)).norm();
    const double theta = std::atan2(sk, eig.eigenvalues()(k));
    if (std::numbers::pi - theta < tol.cut) throw AngleAtCut(theta);
    f(k) = detail::theta_over_sin(theta);
  }
  return detail::skew_part(s * (v * f.asDiagonal() * v.transpose()));
}

inline double geodesic_distance(const GroupElement& g, const GroupElement& h,
                                const Tolerances& tol = kDefaultTolerances) {
  require_same_dim(g.dim(), h.dim());
  return group_log(GroupElement::unchecked(g.matrix().transpose() * h.matrix()), tol).norm();
}

// Rotation angles of the invariant planes of a skew matrix X, largest first
// (the nonzero eigenvalues of X are +-i*angle). Unpaired dimensions are omitted.
inline Vector plane_angles(const AlgebraElement& x) {
  const auto n = x.dim();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Matrix(x.matrix().transpose() * x.matrix()),
                                            Eigen::EigenvaluesOnly);
  Vector w = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  std::sort(w.data(), w.data() + n, std::greater<>());
  Vector angles(n / 2);
  for (int i = 0; i < n / 2; ++i) angles(i) = w(2 * i);
  return angles;
}

// Exact operator norm of ad_X on so(n): eigenvalues of ad_X are +-i(t_a +- t_b) over
// distinct planes a, b and +-i t_a against unpaired dimensions.
inline double ad_operator_norm(const AlgebraElement& x) {
  const int n = x.dim();
  if (n < 3) return 0.0;
  const Vector t = plane_angles(x);
  if (t.size() >= 2) return t(0) + t(1);
  return t(0);
}

// A = max over unit X of |ad_X|_op under <X,Y> = tr(X^T Y).
inline double ad_norm_constant(int n) {
  if (n < 3) return 0.0;
  if (n == 3) return std::sqrt(0.5);
  return 1.0;
}

}  // namespace liemom
