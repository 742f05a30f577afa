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
 * @file adaptation.hpp
 * @brief Integral memory filter, regression targets and the least-squares
 * adaptation law with forgetting for k_x, N_a = adj(k_r^-1), N_d = det(k_r^-1).
 *
 * Memory filter (from the first excitation instant t0):
 *
 *     Omega' = exp(-sigma (t - t0)) omega^2
 *     Ups'   = exp(-sigma (t - t0)) omega Y
 *
 * so that Ups = Omega theta. Each estimate q_hat in {k_x, N_a, N_d} has a
 * target T with T = Omega^m q at the true value and obeys
 *
 *     q_hat' = gamma Omega^m (T - Omega^m q_hat)
 *     gamma' = lambda gamma - Omega^2m gamma^2
 *
 * The same flow is available in information coordinates p = 1/gamma,
 * z = p q_hat, where it becomes linear:
 *
 *     p' = -lambda p + Omega^2m
 *     z' = -lambda z + Omega^m T
 *
 * The simulator integrates the information form. The gain form stiffens
 * without bound whenever Omega jumps faster than gamma can follow.
 */

#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "idrem/errors.hpp"
#include "idrem/matrix_kernel.hpp"

namespace idrem {

// ---------------------------------------------------------------------------
// Memory filter

struct MemoryRates {
  double Omega;
  Mat Upsilon;
};

/// Zero before t0 (or while t0 is unset).
inline MemoryRates memory_derivatives(double sigma, std::optional<double> t0, double omega,
                                      const Mat& Y, double t) {
  if (!t0 || t < *t0) return {0.0, Mat::Zero(Y.rows(), Y.cols())};
  const double kernel = std::exp(-sigma * (t - *t0));
  return {kernel * omega * omega, kernel * omega * Y};
}

struct SplitMemory {
  Mat Ups_kx;     // m x n
  Mat Ups_kr_inv; // m x m
};

/// Upsilon = [Ups_kx^T; Ups_kr_inv^T] with Ups_kx taking the first n rows.
inline SplitMemory split(const Mat& Upsilon, Eigen::Index n) {
  if (n <= 0 || Upsilon.rows() <= n || Upsilon.rows() - n != Upsilon.cols()) {
    throw DimensionError("split: Upsilon must be (n+m) x m");
  }
  const Eigen::Index m = Upsilon.cols();
  return {Upsilon.topRows(n).transpose(), Upsilon.bottomRows(m).transpose()};
}

struct AdjDetTargets {
  Mat M_a;     // adj(Ups_kr_inv) = Omega^(m-1) N_a
  double M_d;  // det(Ups_kr_inv) = Omega^m N_d
};

inline AdjDetTargets adjdet_targets(const Mat& Ups_kr_inv) {
  return {adjugate(Ups_kr_inv), det(Ups_kr_inv)};
}

// ---------------------------------------------------------------------------
// Adaptation law

struct AdaptationParams {
  double lambda = 1000.0;   // forgetting factor, 1/s
  double nd_lower = 0.025;  // dead-zone radius for N_d
  double gamma_max = 1e150; // overflow guard on gamma
};

struct AdaptationState {
  Mat k_x;      // m x n
  Mat N_a;      // m x m
  double N_d = 1.0;
  double gamma = 0.1;
  int switch_count = 0;
};

/// Regression targets: each equals Omega^m times the true parameter when
/// Ups = Omega theta holds exactly.
struct Targets {
  Mat k_x;
  Mat N_a;
  double N_d;
};

inline Targets regression_targets(double Omega, const Mat& Ups_kx, const AdjDetTargets& adjdet) {
  const auto m = static_cast<double>(Ups_kx.rows());
  // k_x target uses Omega^(m-1); the adjugate target is already Omega^(m-1)
  // homogeneous, so it only needs one more factor of Omega.
  return {std::pow(Omega, m - 1.0) * Ups_kx, Omega * adjdet.M_a, adjdet.M_d};
}

struct AdaptationRates {
  Mat k_x;
  Mat N_a;
  double N_d;
  double gamma;
};

/// Gain-form derivatives. `active` is false before t0, which freezes
/// everything (gamma would otherwise grow as exp(lambda t)).
inline AdaptationRates adaptation_derivatives(const AdaptationState& s, const AdaptationParams& p,
                                              double Omega, const Mat& Ups_kx,
                                              const AdjDetTargets& adjdet, bool active = true) {
  if (!(s.gamma > 0.0) || !std::isfinite(s.gamma)) {
    throw StateCorruption("adaptation: gamma must be positive, got " + std::to_string(s.gamma));
  }
  if (Omega < 0.0) throw DomainError("adaptation: Omega must be nonnegative");
  if (!active) {
    return {Mat::Zero(s.k_x.rows(), s.k_x.cols()), Mat::Zero(s.N_a.rows(), s.N_a.cols()), 0.0, 0.0};
  }
  const auto m = static_cast<double>(s.N_a.rows());
  const double om_m = std::pow(Omega, m);
  const double om_2m = om_m * om_m;
  const Targets tgt = regression_targets(Omega, Ups_kx, adjdet);
  const double g = s.gamma * om_m;

  AdaptationRates r;
  r.k_x = g * (tgt.k_x - om_m * s.k_x);
  r.N_a = g * (tgt.N_a - om_m * s.N_a);
  r.N_d = g * (tgt.N_d - om_m * s.N_d);
  r.gamma = p.lambda * s.gamma - om_2m * s.gamma * s.gamma;
  if (s.gamma >= p.gamma_max && r.gamma > 0.0) r.gamma = 0.0;
  return r;
}

/// Information coordinates: p = 1/gamma, z_* = p * estimate.
struct InformationState {
  Mat z_kx;
  Mat z_Na;
  double z_Nd;
  double p;

  static InformationState from(const AdaptationState& s) {
    if (!(s.gamma > 0.0)) throw StateCorruption("adaptation: gamma must be positive");
    const double p = 1.0 / s.gamma;
    return {p * s.k_x, p * s.N_a, p * s.N_d, p};
  }

  /// Writes k_x, N_a, N_d, gamma into `s` (switch bookkeeping untouched).
  /// Only p != 0 is required: intermediate integrator stages may undershoot
  /// below zero, and z and p undershoot together so z / p stays meaningful.
  void to(AdaptationState& s) const {
    if (p == 0.0 || !std::isfinite(p)) {
      throw StateCorruption("adaptation: information weight must be nonzero and finite, got " +
                            std::to_string(p));
    }
    s.k_x = z_kx / p;
    s.N_a = z_Na / p;
    s.N_d = z_Nd / p;
    s.gamma = 1.0 / p;
  }

  /// Accepted states must carry a positive weight.
  void require_positive() const {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw StateCorruption("adaptation: information weight must be positive, got " + std::to_string(p));
    }
  }
};

/// Derivatives of the information-form state. Along any trajectory they
/// reproduce adaptation_derivatives exactly (chain rule), but the flow is
/// linear in (z, p) with the fixed rate lambda. The gamma_max guard becomes
/// a floor 1/gamma_max on p.
inline InformationState information_derivatives(const InformationState& s,
                                                const AdaptationParams& p, double Omega,
                                                const Mat& Ups_kx, const AdjDetTargets& adjdet,
                                                bool active = true) {
  if (!std::isfinite(s.p)) {
    throw StateCorruption("adaptation: information weight must be finite");
  }
  if (Omega < 0.0) throw DomainError("adaptation: Omega must be nonnegative");
  if (!active) {
    return {Mat::Zero(s.z_kx.rows(), s.z_kx.cols()), Mat::Zero(s.z_Na.rows(), s.z_Na.cols()), 0.0,
            0.0};
  }
  const auto m = static_cast<double>(s.z_Na.rows());
  const double om_m = std::pow(Omega, m);
  const double om_2m = om_m * om_m;
  const Targets tgt = regression_targets(Omega, Ups_kx, adjdet);

  const double p_floor = 1.0 / p.gamma_max;
  double p_dot = -p.lambda * s.p + om_2m;
  InformationState d;
  if (s.p > 0.0 && s.p <= p_floor && p_dot < 0.0) {
    // gamma pinned at gamma_max: z' = p q_hat' with q_hat' in gain form.
    p_dot = 0.0;
    d.z_kx = om_m * tgt.k_x - om_2m * s.z_kx / s.p;
    d.z_Na = om_m * tgt.N_a - om_2m * s.z_Na / s.p;
    d.z_Nd = om_m * tgt.N_d - om_2m * s.z_Nd / s.p;
  } else {
    d.z_kx = -p.lambda * s.z_kx + om_m * tgt.k_x;
    d.z_Na = -p.lambda * s.z_Na + om_m * tgt.N_a;
    d.z_Nd = -p.lambda * s.z_Nd + om_m * tgt.N_d;
  }
  d.p = p_dot;
  return d;
}

// ---------------------------------------------------------------------------
// Gain recovery

/// +1 or -1; zero resolves to `prev_sign`.
inline double resolved_sign(double v, double prev_sign) {
  if (v > 0.0) return 1.0;
  if (v < 0.0) return -1.0;
  return prev_sign >= 0.0 ? 1.0 : -1.0;
}

/// Saturated inverse of N_d: 1/N_d outside [-nd_lower, nd_lower], and
/// -sign(N_d)/nd_lower inside it.
inline double deadzone_inverse(double N_d, double nd_lower, double prev_sign) {
  if (!(nd_lower > 0.0)) throw DomainError("deadzone_inverse: nd_lower must be positive");
  if (std::abs(N_d) > nd_lower) return 1.0 / N_d;
  return -resolved_sign(N_d, prev_sign) / nd_lower;
}

struct RecoveredGain {
  Mat k_r;
  Mat k_r_inv;
  double sign;    // resolved sign of N_d
  bool switched;  // sign differs from prev_sign
};

/// k_r = deadzone_inverse(N_d) * N_a and its exact inverse.
inline RecoveredGain recover_kr(const Mat& N_a, double N_d, double nd_lower, double prev_sign) {
  if (!N_a.allFinite() || !std::isfinite(N_d)) {
    throw StateCorruption("recover_kr: non-finite adjugate or determinant estimate");
  }
  RecoveredGain g;
  g.sign = resolved_sign(N_d, prev_sign);
  g.switched = g.sign != (prev_sign >= 0.0 ? 1.0 : -1.0);
  g.k_r = deadzone_inverse(N_d, nd_lower, prev_sign) * N_a;
  try {
    g.k_r_inv = inverse(g.k_r);
  } catch (const SingularMatrixError&) {
    throw SingularAdjugateError("recover_kr: adjugate estimate N_a is singular");
  }
  return g;
}

// ---------------------------------------------------------------------------
// Diagnostics

/// [vec(k_x); vec(N_a); N_d]
inline Vec theta_vec(const Mat& k_x, const Mat& N_a, double N_d) {
  Vec v(k_x.size() + N_a.size() + 1);
  v << vectorize(k_x), vectorize(N_a), N_d;
  return v;
}

/// V = theta_err^T Gamma^-1 theta_err with Gamma = gamma I.
inline double lyapunov_value(const Vec& theta_err, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("lyapunov_value: gamma must be positive");
  return theta_err.squaredNorm() / gamma;
}

/// kappa = gamma_T Omega_T^(2m) + lambda, the decay rate of V from checkpoint T.
inline double rate_bound(double Omega_T, double gamma_T, double lambda, int m) {
  if (!(gamma_T > 0.0) || Omega_T < 0.0) {
    throw DomainError("rate_bound: need gamma_T > 0 and Omega_T >= 0");
  }
  return gamma_T * std::pow(Omega_T, 2.0 * m) + lambda;
}

}  // namespace idrem
