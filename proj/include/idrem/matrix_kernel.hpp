/******************************************************************************
 * Copyright 2026 The idrem Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

/**
 * @file matrix_kernel.hpp
 * @brief Small dense matrix arithmetic: determinant, adjugate, inverse,
 * left pseudoinverse and column-major vectorization.
 *
 * Matrices in this library are at most a handful of rows wide (n + m for the
 * extended regressor), so the kernel favours exactness near singularity over
 * asymptotic cost: 1x1 to 3x3 use closed cofactor formulas, larger sizes use
 * an LU factorisation and fall back to explicit cofactors when the matrix is
 * badly conditioned.
 */

#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "idrem/errors.hpp"

namespace idrem {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

namespace detail {

inline void require_square(const Mat& q, const char* op) {
  if (q.rows() != q.cols() || q.rows() == 0) {
    throw DimensionError(std::string(op) + ": expected a non-empty square matrix, got " +
                         std::to_string(q.rows()) + "x" + std::to_string(q.cols()));
  }
}

// Reciprocal condition below which the LU route is abandoned for cofactors.
inline constexpr double kCofactorRcond = 1e-6;

inline Mat minor_of(const Mat& q, Eigen::Index row, Eigen::Index col) {
  const Eigen::Index k = q.rows();
  Mat out(k - 1, k - 1);
  for (Eigen::Index i = 0, oi = 0; i < k; ++i) {
    if (i == row) continue;
    for (Eigen::Index j = 0, oj = 0; j < k; ++j) {
      if (j == col) continue;
      out(oi, oj++) = q(i, j);
    }
    ++oi;
  }
  return out;
}

}  // namespace detail

/// True when every entry is a finite real.
inline bool all_finite(const Mat& m) { return m.allFinite(); }

/// Frobenius norm.
inline double frobenius(const Mat& m) { return m.norm(); }

/// Determinant of a square matrix. Throws DimensionError otherwise.
inline double det(const Mat& q) {
  detail::require_square(q, "det");
  switch (q.rows()) {
    case 1:
      return q(0, 0);
    case 2:
      return q(0, 0) * q(1, 1) - q(0, 1) * q(1, 0);
    case 3:
      return q(0, 0) * (q(1, 1) * q(2, 2) - q(1, 2) * q(2, 1)) -
             q(0, 1) * (q(1, 0) * q(2, 2) - q(1, 2) * q(2, 0)) +
             q(0, 2) * (q(1, 0) * q(2, 1) - q(1, 1) * q(2, 0));
    default:
      return q.partialPivLu().determinant();
  }
}

/// Transpose of the cofactor matrix, so that adjugate(Q) * Q == det(Q) * I.
inline Mat adjugate(const Mat& q) {
  detail::require_square(q, "adjugate");
  const Eigen::Index k = q.rows();
  Mat adj(k, k);
  switch (k) {
    case 1:
      adj(0, 0) = 1.0;
      return adj;
    case 2:
      adj << q(1, 1), -q(0, 1), -q(1, 0), q(0, 0);
      return adj;
    case 3:
      adj(0, 0) = q(1, 1) * q(2, 2) - q(1, 2) * q(2, 1);
      adj(0, 1) = q(0, 2) * q(2, 1) - q(0, 1) * q(2, 2);
      adj(0, 2) = q(0, 1) * q(1, 2) - q(0, 2) * q(1, 1);
      adj(1, 0) = q(1, 2) * q(2, 0) - q(1, 0) * q(2, 2);
      adj(1, 1) = q(0, 0) * q(2, 2) - q(0, 2) * q(2, 0);
      adj(1, 2) = q(0, 2) * q(1, 0) - q(0, 0) * q(1, 2);
      adj(2, 0) = q(1, 0) * q(2, 1) - q(1, 1) * q(2, 0);
      adj(2, 1) = q(0, 1) * q(2, 0) - q(0, 0) * q(2, 1);
      adj(2, 2) = q(0, 0) * q(1, 1) - q(0, 1) * q(1, 0);
      return adj;
    default:
      break;
  }

  Eigen::PartialPivLU<Mat> lu(q);
  if (lu.rcond() >= detail::kCofactorRcond) {
    Mat fast = lu.determinant() * lu.inverse();
    if (fast.allFinite()) return fast;
  }
  // Near-singular: det * inverse loses everything, minors do not.
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      adj(j, i) = sign * det(detail::minor_of(q, i, j));
    }
  }
  return adj;
}

/// Exact inverse of a square matrix; throws SingularMatrixError when det is
/// zero or the result is not finite.
inline Mat inverse(const Mat& q) {
  detail::require_square(q, "inverse");
  const double d = det(q);
  if (d == 0.0 || !std::isfinite(d)) {
    throw SingularMatrixError("inverse: matrix is singular (det = " + std::to_string(d) + ")");
  }
  Mat inv = q.rows() <= 3 ? Mat(adjugate(q) / d) : Mat(q.partialPivLu().inverse());
  if (!inv.allFinite()) {
    throw SingularMatrixError("inverse: non-finite result");
  }
  return inv;
}

/// (B^T B)^-1 B^T for a full-column-rank B. Rank is declared when
/// det(B^T B) > 1e-12 * ||B||_F^(2m); the product itself comes from a
/// column-pivoted QR least-squares solve rather than the Gram inverse.
inline Mat left_pseudoinverse(const Mat& b) {
  if (b.rows() == 0 || b.cols() == 0 || b.cols() > b.rows()) {
    throw RankError("left_pseudoinverse: " + std::to_string(b.rows()) + "x" +
                    std::to_string(b.cols()) + " cannot have full column rank");
  }
  const Mat gram = b.transpose() * b;
  const double d = det(gram);
  const double scale = std::pow(b.norm(), 2.0 * static_cast<double>(b.cols()));
  if (!(d > 1e-12 * scale)) {
    throw RankError("left_pseudoinverse: matrix is column-rank deficient");
  }
  return b.colPivHouseholderQr().solve(Mat::Identity(b.rows(), b.rows()));
}

/// Column-major stacking of all entries into a single column.
inline Vec vectorize(const Mat& m) {
  return Eigen::Map<const Vec>(m.data(), m.size());
}

/// Inverse of vectorize for a rows x cols target.
inline Mat reshape(const Vec& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) {
    throw DimensionError("reshape: " + std::to_string(v.size()) + " entries do not fill " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

}  // namespace idrem
