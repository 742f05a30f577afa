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
 * @file signal_filters.hpp
 * @brief Aperiodic filtration of the tracking-error equation and extraction
 * of the linear regression y = theta^T phi_f.
 *
 * Every signal of the error equation passes through 1/(p + l) with zero
 * initial state. The filtered derivative of the tracking error is never
 * integrated; it is recovered algebraically from e_ref(t), e_ref(0) and
 * e_f(t) by integration by parts (mu_f_algebraic).
 */

#pragma once

#include <cmath>

#include "idrem/errors.hpp"
#include "idrem/matrix_kernel.hpp"
#include "idrem/closed_loop.hpp"

namespace idrem {

/// States of the aperiodic filters plus the t = 0 quantities needed to
/// recover mu_f.
struct FilterState {
  Vec e_f;      // n
  Vec u_cf;     // m
  Vec phi_f;    // n + m
  double l = 100.0;
  Vec e_ref_0;  // tracking error at t = 0
  Vec e_f_0;    // zero
  Vec mu_f_0;   // zero

  static FilterState zero(Eigen::Index n, Eigen::Index m, double l, const Vec& e_ref_0) {
    if (!(l > 0.0)) throw ConfigError("filter constant l must be positive");
    FilterState s;
    s.e_f = Vec::Zero(n);
    s.u_cf = Vec::Zero(m);
    s.phi_f = Vec::Zero(n + m);
    s.l = l;
    s.e_ref_0 = e_ref_0;
    s.e_f_0 = Vec::Zero(n);
    s.mu_f_0 = Vec::Zero(n);
    return s;
  }
};

struct FilterRates {
  Vec e_f;
  Vec u_cf;
  Vec phi_f;
};

/// theta_hat = [k_x^T; k_r_inv^T], (n+m) x m.
inline Mat stack_theta(const Mat& k_x, const Mat& k_r_inv) {
  if (k_x.rows() != k_r_inv.rows() || k_r_inv.rows() != k_r_inv.cols()) {
    throw DimensionError("stack_theta: inconsistent blocks");
  }
  Mat t(k_x.cols() + k_r_inv.cols(), k_x.rows());
  t << k_x.transpose(), k_r_inv.transpose();
  return t;
}

/// u_c = theta_hat^T phi. Equals -r whenever k_r_inv inverts the k_r in phi.
inline Vec compensatory_control(const Mat& theta_hat, const Vec& phi) {
  if (theta_hat.rows() != phi.size()) {
    throw DimensionError("compensatory_control: theta_hat rows must match regressor length");
  }
  return theta_hat.transpose() * phi;
}

inline FilterRates filter_derivatives(const FilterState& s, const Vec& e_ref, const Vec& u_c,
                                      const Vec& phi) {
  if (e_ref.size() != s.e_f.size() || u_c.size() != s.u_cf.size() ||
      phi.size() != s.phi_f.size()) {
    throw DimensionError("filter_derivatives: inconsistent dimensions");
  }
  return {-s.l * s.e_f + e_ref, -s.l * s.u_cf + u_c, -s.l * s.phi_f + phi};
}

/// Filtered tracking-error derivative from measurable signals only:
/// mu_f = e^{-lt} mu_f(0) + e_ref(t) - e^{-lt} e_ref(0) - l e_f(t) + l e^{-lt} e_f(0).
inline Vec mu_f_algebraic(const FilterState& s, const Vec& e_ref_t, double t) {
  if (t < 0.0) throw DomainError("mu_f_algebraic: t must be nonnegative");
  if (e_ref_t.size() != s.e_f.size()) throw DimensionError("mu_f_algebraic: dimension mismatch");
  const double decay = std::exp(-s.l * t);
  return decay * s.mu_f_0 + e_ref_t - decay * s.e_ref_0 - s.l * s.e_f + s.l * decay * s.e_f_0;
}

/// mu_fd = A_ref e_f + B_ref u_cf
inline Vec required_behavior(const ReferenceSpec& ref, const Vec& e_f, const Vec& u_cf) {
  if (e_f.size() != ref.n() || u_cf.size() != ref.m()) {
    throw DimensionError("required_behavior: inconsistent dimensions");
  }
  return ref.A() * e_f + ref.B() * u_cf;
}

/// y = B_ref^+ (mu_fd - mu_f), which equals theta^T phi_f.
inline Vec lre_output(const ReferenceSpec& ref, const Vec& mu_fd, const Vec& mu_f) {
  if (mu_fd.size() != ref.n() || mu_f.size() != ref.n()) {
    throw DimensionError("lre_output: inconsistent dimensions");
  }
  return ref.B_pinv() * (mu_fd - mu_f);
}

}  // namespace idrem
