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

// Reference implementations used only by tests. None of these call into the
// library, so they can check it.

#pragma once

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Laplace expansion along the first row.
inline double laplace_det(const Mat& q) {
  const Eigen::Index n = q.rows();
  if (n == 1) return q(0, 0);
  double s = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Mat minor(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r) {
      for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
        if (c != j) minor(r - 1, cc++) = q(r, c);
      }
    }
    s += ((j % 2) ? -1.0 : 1.0) * q(0, j) * laplace_det(minor);
  }
  return s;
}

inline Mat cofactor_adjugate(const Mat& q) {
  const Eigen::Index n = q.rows();
  if (n == 1) return Mat::Ones(1, 1);
  Mat adj(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Mat minor(n - 1, n - 1);
      for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
        if (r == i) continue;
        for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
          if (c != j) minor(rr, cc++) = q(r, c);
        }
        ++rr;
      }
      adj(j, i) = (((i + j) % 2) ? -1.0 : 1.0) * laplace_det(minor);
    }
  }
  return adj;
}

/// Ideal matching gains by direct least squares on B k_r = B_ref and
/// B k_r k_x = A_ref - A.
struct Gains {
  Mat k_x, k_r;
};

inline Gains solve_matching(const Mat& A, const Mat& B, const Mat& A_ref, const Mat& B_ref) {
  const auto qr = B.colPivHouseholderQr();
  Gains g;
  g.k_r = qr.solve(B_ref);
  g.k_x = g.k_r.fullPivLu().solve(qr.solve(A_ref - A));
  return g;
}

/// Classical RK4 on a generic vector field.
inline Vec rk4(const std::function<Vec(double, const Vec&)>& f, Vec x, double t0, double dt,
               long steps) {
  double t = t0;
  for (long k = 0; k < steps; ++k) {
    const Vec k1 = f(t, x);
    const Vec k2 = f(t + dt / 2, x + dt / 2 * k1);
    const Vec k3 = f(t + dt / 2, x + dt / 2 * k2);
    const Vec k4 = f(t + dt, x + dt * k3);
    x += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += dt;
  }
  return x;
}

class Rng {
 public:
  explicit Rng(unsigned seed) : gen_(seed) {}
  double uniform(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  Mat matrix(Eigen::Index r, Eigen::Index c, double scale = 1.0) {
    Mat m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = scale * uniform();
    return m;
  }
  /// Random n x m matrix with singular values in [1, cond].
  Mat conditioned(Eigen::Index n, Eigen::Index m, double cond) {
    const Mat U = matrix(n, n).householderQr().householderQ();
    const Mat V = matrix(m, m).householderQr().householderQ();
    Mat S = Mat::Zero(n, m);
    for (Eigen::Index i = 0; i < m; ++i) S(i, i) = std::pow(cond, uniform(0.0, 1.0));
    S(0, 0) = 1.0;
    if (m > 1) S(m - 1, m - 1) = cond;
    return U * S * V.transpose();
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace oracle
