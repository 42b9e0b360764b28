//
// Project LieMomentum
// SPDX-License-Identifier: Apache-2.0
//
#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <complex>
#include <numbers>

#include "liemom/dlog.hpp"
#include "liemom/random.hpp"
#include "liemom/so_n.hpp"

using namespace liemom;
using std::numbers::pi;

namespace {

// Taylor series in long double after scaling by 2^-s, then squaring.
Matrix taylor_expm(const Matrix& a) {
  using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  const int s = norm > 0.5 ? static_cast<int>(std::ceil(std::log2(norm / 0.5))) : 0;
  const LMatrix x = a.cast<long double>() * std::ldexp(1.0L, -s);
  LMatrix sum = LMatrix::Identity(a.rows(), a.cols());
  LMatrix term = sum;
  for (int k = 1; k < 40; ++k) {
    term = term * x / static_cast<long double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum.cast<double>();
}

Matrix rotation2(double t) {
  Matrix r(2, 2);
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}

// Coordinates of so(n) in the basis (E_ij - E_ji)/sqrt(2), i < j (orthonormal for tr(X^T Y)).
Vector to_coords(const Matrix& x) {
  const int n = static_cast<int>(x.rows());
  Vector v(n * (n - 1) / 2);
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) v(idx++) = std::sqrt(2.0) * x(i, j);
  return v;
}

Matrix from_coords(const Vector& v, int n) {
  Matrix x = Matrix::Zero(n, n);
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      x(i, j) = v(idx) / std::sqrt(2.0);
      x(j, i) = -v(idx) / std::sqrt(2.0);
      ++idx;
    }
  return x;
}

// Matrix of ad_X in orthonormal coordinates.
Matrix ad_matrix(const AlgebraElement& x) {
  const int n = x.dim();
  const int m = n * (n - 1) / 2;
  Matrix ad(m, m);
  for (int c = 0; c < m; ++c) {
    const AlgebraElement e = AlgebraElement::from_skew(from_coords(Vector::Unit(m, c), n));
    ad.col(c) = to_coords(bracket(x, e).matrix());
  }
  return ad;
}

// Block-diagonal skew matrix with the given plane angles, conjugated by q.
AlgebraElement with_angles(const std::vector<double>& angles, int n, const GroupElement& q) {
  Matrix x = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < angles.size(); ++k) {
    x(2 * k, 2 * k + 1) = -angles[k];
    x(2 * k + 1, 2 * k) = angles[k];
  }
  return AlgebraElement(q.matrix() * x * q.matrix().transpose());
}

}  // namespace

TEST(AlgebraElement, ConstructorKeepsOnlySkewPart) {
  Matrix m(2, 2);
  m << 1, 2, 4, 3;
  const AlgebraElement x(m);
  EXPECT_DOUBLE_EQ(x.matrix()(0, 1), -1.0);
  EXPECT_DOUBLE_EQ(x.matrix()(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(x.matrix()(0, 0), 0.0);
  EXPECT_THROW(AlgebraElement(Matrix::Zero(2, 3)), DimensionMismatch);
}

TEST(AlgebraElement, MismatchedDimensionsThrow) {
  EXPECT_THROW(AlgebraElement::zero(3) + AlgebraElement::zero(4), DimensionMismatch);
  EXPECT_THROW(inner(AlgebraElement::zero(3), AlgebraElement::zero(4)), DimensionMismatch);
}

TEST(GroupElement, RejectsNonRotations) {
  Matrix reflect = Matrix::Identity(3, 3);
  reflect(0, 0) = -1.0;
  EXPECT_THROW(GroupElement{reflect}, NotOrthogonal);
  EXPECT_THROW(GroupElement{2.0 * Matrix::Identity(3, 3)}, NotOrthogonal);
  EXPECT_NO_THROW(GroupElement{rotation2(0.3)});
}

TEST(Bracket, JacobiIdentityAndAntisymmetry) {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const AlgebraElement x = random_skew(5, rng), y = random_skew(5, rng), z = random_skew(5, rng);
    const AlgebraElement jac = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y));
    EXPECT_LT(jac.norm(), 1e-12);
    EXPECT_LT((bracket(x, y) + bracket(y, x)).norm(), 1e-14);
    EXPECT_LT((bracket(x, y).matrix() - (x.matrix() * y.matrix() - y.matrix() * x.matrix())).norm(), 1e-13);
  }
}

TEST(Exp, MatchesTaylorOracleOnGeneralMatrices) {
  Rng rng(3);
  for (double scale : {1e-6, 1e-2, 0.3, 1.0, 3.0, 10.0}) {
    for (int n : {2, 4, 7}) {
      const Matrix a = scale * gaussian_matrix(n, n, rng) / std::sqrt(static_cast<double>(n));
      const Matrix ref = taylor_expm(a);
      EXPECT_LT((detail::expm(a) - ref).norm() / ref.norm(), 1e-12) << "scale " << scale << " n " << n;
    }
  }
  // skew inputs stay well conditioned at any norm
  for (double scale : {40.0, 200.0}) {
    const Matrix a = scale * random_unit_skew(5, rng).matrix();
    EXPECT_LT((detail::expm(a) - taylor_expm(a)).norm(), 1e-11 * scale) << "scale " << scale;
  }
}

TEST(Exp, Expm1KeepsRelativeAccuracyNearZero) {
  Rng rng(5);
  const Matrix a = 1e-9 * random_skew(4, rng).matrix();
  // Taylor series without the identity term, in long double
  using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const LMatrix x = a.cast<long double>();
  LMatrix term = x, sum = x;
  for (int k = 2; k < 6; ++k) {
    term = term * x / static_cast<long double>(k);
    sum += term;
  }
  const Matrix ref = sum.cast<double>();
  EXPECT_LT((detail::expm1(a) - ref).norm() / ref.norm(), 1e-14);
}

TEST(Exp, PlanarRotationClosedForm) {
  for (double t : {0.0, 0.1, 1.0, 3.0, -2.5}) {
    Matrix x(2, 2);
    x << 0, -t, t, 0;
    EXPECT_LT((group_exp(AlgebraElement(x)).matrix() - rotation2(t)).norm(), 1e-15);
  }
}

TEST(Exp, RodriguesOracleInThreeDimensions) {
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    const AlgebraElement x = (0.2 + 0.15 * t) * random_unit_skew(3, rng);
    const double theta = x.norm() / std::sqrt(2.0);
    const Matrix k = x.matrix() / theta;
    const Matrix ref = Matrix::Identity(3, 3) + std::sin(theta) * k + (1 - std::cos(theta)) * k * k;
    EXPECT_LT((group_exp(x).matrix() - ref).norm(), 1e-14);
  }
}

TEST(Log, InvertsExpInsidePrincipalDomain) {
  Rng rng(13);
  for (int n : {2, 3, 5, 10}) {
    for (int t = 0; t < 40; ++t) {
      const GroupElement q = sample_haar_rotation(n, rng);
      std::vector<double> angles;
      for (int k = 0; k < n / 2; ++k) angles.push_back(std::uniform_real_distribution<double>(-3.1, 3.1)(rng));
      const AlgebraElement x = with_angles(angles, n, q);
      EXPECT_LT((group_log(group_exp(x)) - x).norm(), 1e-11) << "n " << n;
    }
  }
}

TEST(Log, AccurateForTinyAndNearPiAngles) {
  const GroupElement q = sample_haar_rotation(4, 99);
  for (double a : {1e-12, 1e-7, 0.49, 0.51, pi - 1e-3, pi - 1e-6}) {
    const AlgebraElement x = with_angles({a, 0.5 * a}, 4, q);
    EXPECT_LT((group_log(group_exp(x)) - x).norm() / x.norm(), 1e-9) << "angle " << a;
  }
}

TEST(Log, ThrowsAtTheCutLocus) {
  Matrix m = Matrix::Identity(3, 3);
  m(0, 0) = m(1, 1) = -1.0;
  try {
    group_log(GroupElement(m));
    FAIL() << "expected AngleAtCut";
  } catch (const AngleAtCut& e) {
    EXPECT_NEAR(e.angle(), pi, 1e-12);
  }
}

TEST(Distance, IsLeftInvariantAndSymmetric) {
  Rng rng(17);
  for (int t = 0; t < 20; ++t) {
    const GroupElement g = sample_haar_rotation(5, rng), k = sample_haar_rotation(5, rng);
    const GroupElement h = right_exp(g, 0.7 * random_unit_skew(5, rng));
    const double d = geodesic_distance(g, h);
    EXPECT_NEAR(d, 0.7, 1e-12);
    EXPECT_NEAR(geodesic_distance(h, g), d, 1e-12);
    EXPECT_NEAR(geodesic_distance(k * g, k * h), d, 1e-12);
  }
}

TEST(PlaneAngles, RecoversConstructedAngles) {
  const GroupElement q = sample_haar_rotation(7, 5);
  const Vector t = plane_angles(with_angles({0.4, 2.0, 1.1}, 7, q));
  ASSERT_EQ(t.size(), 3);
  EXPECT_NEAR(t(0), 2.0, 1e-12);
  EXPECT_NEAR(t(1), 1.1, 1e-12);
  EXPECT_NEAR(t(2), 0.4, 1e-12);
}

TEST(AdOperatorNorm, MatchesLargestSingularValueOfAdMatrix) {
  Rng rng(21);
  for (int n : {2, 3, 4, 5, 6}) {
    for (int t = 0; t < 10; ++t) {
      const AlgebraElement x = random_skew(n, rng);
      const double brute = n < 3 ? 0.0 : Eigen::JacobiSVD<Matrix>(ad_matrix(x)).singularValues()(0);
      EXPECT_NEAR(ad_operator_norm(x), brute, 1e-12 * std::max(1.0, brute)) << "n " << n;
    }
  }
}

TEST(AdNormConstant, ExactValuesBoundSampledEstimates) {
  EXPECT_DOUBLE_EQ(ad_norm_constant(2), 0.0);
  EXPECT_DOUBLE_EQ(ad_norm_constant(3), std::sqrt(0.5));
  EXPECT_DOUBLE_EQ(ad_norm_constant(4), 1.0);
  EXPECT_DOUBLE_EQ(ad_norm_constant(10), 1.0);
  // Extremal directions: one plane in SO(3); two equal planes for n >= 4.
  EXPECT_NEAR(ad_operator_norm(with_angles({std::sqrt(0.5)}, 3, GroupElement::identity(3))), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(ad_operator_norm(with_angles({0.5, 0.5}, 6, GroupElement::identity(6))), 1.0, 1e-15);
  for (int n : {3, 4, 6}) {
    const double est = estimate_A(n, 200, 7);
    EXPECT_LE(est, ad_norm_constant(n) + 1e-12);
    EXPECT_GT(est, 0.8 * ad_norm_constant(n));
  }
  // running maximum: more samples never lower the estimate
  EXPECT_LE(estimate_A(5, 10, 3), estimate_A(5, 40, 3));
}

TEST(PSeries, ClosedFormsAndSymmetry) {
  EXPECT_DOUBLE_EQ(p_series(0.0), 1.0);
  for (double x : {-3.0, -1e-5, 1e-5, 0.2, 2.0, 6.0}) {
    EXPECT_NEAR(p_series(x) - p_series(-x), x, 1e-14 * std::max(1.0, std::abs(x)));
  }
  EXPECT_NEAR(p_series(1e-4 - 1e-12), p_series(1e-4 + 1e-12), 1e-12);
}

TEST(QBound, MatchesClosedForm) {
  // p(ix) = (x/2) cot(x/2) + i x/2
  for (double x : {1e-3, 0.5, 1.0, pi, 5.0, 6.2}) {
    const double re = 0.5 * x / std::tan(0.5 * x) - 1.0;
    const double ref = std::hypot(re, 0.5 * x);
    EXPECT_NEAR(q_bound(x), ref, 1e-12 * ref) << x;
  }
  EXPECT_THROW(q_bound(0.0), std::domain_error);
  EXPECT_THROW(q_bound(2 * pi), std::domain_error);
}

TEST(Dlog, MatchesSpectralOracle) {
  Rng rng(31);
  for (int n : {3, 4, 6}) {
    for (int t = 0; t < 10; ++t) {
      const AlgebraElement x = (0.3 + 0.2 * t) * random_unit_skew(n, rng);
      const AlgebraElement xi = random_skew(n, rng);
      // p(ad_X) xi through the eigendecomposition of ad_X (normal, so diagonalizable)
      Eigen::ComplexEigenSolver<Matrix> eig(ad_matrix(x));
      const Eigen::MatrixXcd v = eig.eigenvectors();
      Eigen::VectorXcd pv(eig.eigenvalues().size());
      for (Eigen::Index k = 0; k < pv.size(); ++k) pv(k) = p_series(std::complex<double>(eig.eigenvalues()(k)));
      const Eigen::VectorXcd coords = v * pv.asDiagonal() * v.inverse() * to_coords(xi.matrix()).cast<std::complex<double>>();
      const Matrix ref = from_coords(coords.real(), n);
      const AlgebraElement got = dlog_apply(group_exp(x), xi);
      EXPECT_LT((got.matrix() - ref).norm() / xi.norm(), 1e-10) << "n " << n << " |x| " << x.norm();
    }
  }
}

TEST(Dlog, IdentityAtTheIdentityAndOnCommutingDirections) {
  Rng rng(37);
  const AlgebraElement xi = random_skew(5, rng);
  EXPECT_LT((dlog_apply(GroupElement::identity(5), xi) - xi).norm(), 1e-15);
  const AlgebraElement x = 0.8 * random_unit_skew(5, rng);
  EXPECT_LT((dlog_apply(group_exp(x), x) - x).norm(), 1e-13);
}

TEST(Dlog, RefusesDivergentSeries) {
  const GroupElement g = group_exp(with_angles({pi - 1e-4, pi - 1e-4}, 4, GroupElement::identity(4)));
  Rng rng(1);
  EXPECT_THROW(dlog_apply(g, random_skew(4, rng)), SeriesDivergence);
}

TEST(Haar, TwoDimensionalAngleIsUniform) {
  // Kolmogorov-Smirnov against U(-pi, pi]; the 1% critical value is 1.628 / sqrt(N).
  Rng rng(2024);
  const int N = 4000;
  std::vector<double> angles;
  for (int i = 0; i < N; ++i) {
    const Matrix g = sample_haar_rotation(2, rng).matrix();
    angles.push_back(std::atan2(g(1, 0), g(0, 0)));
  }
  std::sort(angles.begin(), angles.end());
  double d = 0.0;
  for (int i = 0; i < N; ++i) {
    const double cdf = (angles[i] + pi) / (2 * pi);
    d = std::max({d, cdf - static_cast<double>(i) / N, static_cast<double>(i + 1) / N - cdf});
  }
  EXPECT_LT(d, 1.628 / std::sqrt(N));
}

TEST(Haar, MeanVanishesAndSamplesAreRotations) {
  Rng rng(4048);
  const int N = 4000;
  Matrix mean = Matrix::Zero(4, 4);
  for (int i = 0; i < N; ++i) {
    const GroupElement g = sample_haar_rotation(4, rng);
    ASSERT_LT(g.orthogonality_defect(), 1e-13);
    ASSERT_NEAR(g.matrix().determinant(), 1.0, 1e-13);
    mean += g.matrix();
  }
  mean /= N;
  // each entry has variance 1/n
  EXPECT_LT(mean.cwiseAbs().maxCoeff(), 5.0 / std::sqrt(4.0 * N));
}

TEST(Haar, SeededSamplingIsReproducible) {
  EXPECT_EQ(sample_haar_rotation(6, 42).matrix(), sample_haar_rotation(6, 42).matrix());
  EXPECT_NE(sample_haar_rotation(6, 42).matrix(), sample_haar_rotation(6, 43).matrix());
}
