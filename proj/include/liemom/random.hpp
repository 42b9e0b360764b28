//
// Project LieMomentum
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <random>

#include "liemom/so_n.hpp"

namespace liemom {

using Rng = std::mt19937_64;

inline Matrix gaussian_matrix(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  // fill row by row so the draw order does not depend on storage order
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

inline AlgebraElement random_skew(int n, Rng& rng) { return AlgebraElement(gaussian_matrix(n, n, rng)); }

inline AlgebraElement random_unit_skew(int n, Rng& rng) {
  AlgebraElement x = random_skew(n, rng);
  const double norm = x.norm();
  return norm > 0.0 ? x * (1.0 / norm) : x;
}

// Haar-distributed rotation: QR of a Gaussian matrix with the signs of diag(R)
// moved into Q, then one column flipped if det = -1.
inline GroupElement sample_haar_rotation(int n, Rng& rng) {
  const Matrix z = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix& r = qr.matrixQR();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  if (q.determinant() < 0.0) q.col(0) = -q.col(0);
  return GroupElement(std::move(q));
}

inline GroupElement sample_haar_rotation(int n, std::uint64_t seed) {
  Rng rng(seed);
  return sample_haar_rotation(n, rng);
}

}  // namespace liemom
