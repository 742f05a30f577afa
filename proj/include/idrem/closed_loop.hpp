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
 * @file closed_loop.hpp
 * @brief Plant and reference model, the adaptive control law, the regressor
 * and the ideal-gain oracle.
 *
 * The plant is x' = A x + B u, the reference model x_ref' = A_ref x_ref +
 * B_ref r, and the control law u = k_r (k_x x + r). The oracle solves the
 * matching conditions A + B k_r k_x = A_ref, B k_r = B_ref; the controller
 * never reads it.
 */

#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Eigenvalues>

#include "idrem/errors.hpp"
#include "idrem/matrix_kernel.hpp"

namespace idrem {

namespace detail {

inline void require_finite(const Mat& m, const std::string& what) {
  if (!m.allFinite()) throw ConfigError(what + " contains non-finite entries");
}

inline void require_rows(const Mat& m, Eigen::Index rows, const char* what) {
  if (m.rows() != rows) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(rows) +
                         " rows, got " + std::to_string(m.rows()));
  }
}

}  // namespace detail

/// Unknown LTI plant x' = A x + B u.
class PlantSpec {
 public:
  PlantSpec(Mat a, Mat b) : a_(std::move(a)), b_(std::move(b)) {
    detail::require_finite(a_, "plant.A");
    detail::require_finite(b_, "plant.B");
    if (a_.rows() != a_.cols() || a_.rows() == 0) throw DimensionError("plant.A must be square");
    if (b_.rows() != a_.rows()) throw DimensionError("plant.B must have as many rows as plant.A");
    left_pseudoinverse(b_);  // full column rank, m <= n
  }

  const Mat& A() const { return a_; }
  const Mat& B() const { return b_; }
  Eigen::Index n() const { return a_.rows(); }
  Eigen::Index m() const { return b_.cols(); }

 private:
  Mat a_;
  Mat b_;
};

/// Reference model x_ref' = A_ref x_ref + B_ref r with Hurwitz A_ref.
class ReferenceSpec {
 public:
  /// Eigenvalue real parts must lie below -hurwitz_margin.
  static constexpr double kHurwitzMargin = 1e-9;

  ReferenceSpec(Mat a_ref, Mat b_ref) : a_(std::move(a_ref)), b_(std::move(b_ref)) {
    detail::require_finite(a_, "reference.A");
    detail::require_finite(b_, "reference.B");
    if (a_.rows() != a_.cols() || a_.rows() == 0) {
      throw DimensionError("reference.A must be square");
    }
    if (b_.rows() != a_.rows()) {
      throw DimensionError("reference.B must have as many rows as reference.A");
    }
    if (!is_hurwitz(a_)) throw ConfigError("reference.A is not Hurwitz");
    b_pinv_ = left_pseudoinverse(b_);
  }

  static bool is_hurwitz(const Mat& a) {
    Eigen::EigenSolver<Mat> solver(a, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) return false;
    return (solver.eigenvalues().real().array() < -kHurwitzMargin).all();
  }

  const Mat& A() const { return a_; }
  const Mat& B() const { return b_; }
  /// Left pseudoinverse of B_ref, computed once.
  const Mat& B_pinv() const { return b_pinv_; }
  Eigen::Index n() const { return a_.rows(); }
  Eigen::Index m() const { return b_.cols(); }

 private:
  Mat a_;
  Mat b_;
  Mat b_pinv_;
};

/// Solution of the matching conditions.
struct IdealGains {
  Mat k_x;      // m x n
  Mat k_r;      // m x m
  Mat k_r_inv;  // m x m
  Mat N_a;      // adj(k_r_inv)
  double N_d;   // det(k_r_inv)

  /// theta = [k_x^T; k_r_inv^T], (n+m) x m.
  Mat theta() const {
    Mat t(k_x.cols() + k_r_inv.cols(), k_x.rows());
    t << k_x.transpose(), k_r_inv.transpose();
    return t;
  }
};

// ---------------------------------------------------------------------------
// Setpoints

struct ConstantSetpoint {
  double value;
};
/// value * exp(-rate * t)
struct ExponentialSetpoint {
  double value;
  double rate;
};
/// amplitude * sin(2 pi frequency t + phase), frequency in Hz
struct SineSetpoint {
  double amplitude;
  double frequency;
  double phase;
};
/// 0 before `time`, `level` from `time` on
struct StepSetpoint {
  double level;
  double time;
};

using SetpointChannel =
    std::variant<ConstantSetpoint, ExponentialSetpoint, SineSetpoint, StepSetpoint>;

inline double evaluate(const SetpointChannel& ch, double t) {
  struct Visitor {
    double t;
    double operator()(const ConstantSetpoint& c) const { return c.value; }
    double operator()(const ExponentialSetpoint& e) const { return e.value * std::exp(-e.rate * t); }
    double operator()(const SineSetpoint& s) const {
      return s.amplitude * std::sin(2.0 * M_PI * s.frequency * t + s.phase);
    }
    double operator()(const StepSetpoint& s) const { return t >= s.time ? s.level : 0.0; }
  };
  return std::visit(Visitor{t}, ch);
}

/// Per-channel setpoint r(t).
class SetpointSignal {
 public:
  SetpointSignal() = default;
  explicit SetpointSignal(std::vector<SetpointChannel> channels) : channels_(std::move(channels)) {}

  Vec operator()(double t) const {
    Vec r(static_cast<Eigen::Index>(channels_.size()));
    for (std::size_t i = 0; i < channels_.size(); ++i) {
      r(static_cast<Eigen::Index>(i)) = evaluate(channels_[i], t);
    }
    return r;
  }

  std::size_t size() const { return channels_.size(); }
  const std::vector<SetpointChannel>& channels() const { return channels_; }

 private:
  std::vector<SetpointChannel> channels_;
};

// ---------------------------------------------------------------------------
// Operations

/// u = k_r (k_x x + r)
inline Vec control_input(const Mat& k_x, const Mat& k_r, const Vec& x, const Vec& r) {
  if (k_x.cols() != x.size() || k_x.rows() != r.size() || k_r.rows() != k_r.cols() ||
      k_r.cols() != r.size()) {
    throw DimensionError("control_input: inconsistent dimensions");
  }
  return k_r * (k_x * x + r);
}

inline Vec plant_derivative(const PlantSpec& plant, const Vec& x, const Vec& u) {
  if (x.size() != plant.n() || u.size() != plant.m()) {
    throw DimensionError("plant_derivative: inconsistent dimensions");
  }
  return plant.A() * x + plant.B() * u;
}

inline Vec reference_derivative(const ReferenceSpec& ref, const Vec& x_ref, const Vec& r) {
  if (x_ref.size() != ref.n() || r.size() != ref.m()) {
    throw DimensionError("reference_derivative: inconsistent dimensions");
  }
  return ref.A() * x_ref + ref.B() * r;
}

/// phi = [x; -k_r (k_x x + r)]. With theta_err = theta_hat - theta this makes
/// theta_err^T phi equal to the bracket of the tracking-error equation.
inline Vec build_regressor(const Mat& k_x, const Mat& k_r, const Vec& x, const Vec& r) {
  const Vec u = control_input(k_x, k_r, x, r);
  Vec phi(x.size() + u.size());
  phi << x, -u;
  return phi;
}

/// Solves the matching conditions by least squares and rejects residuals
/// above 1e-9 (relative to the matrices involved).
inline IdealGains ideal_gains(const PlantSpec& plant, const ReferenceSpec& ref) {
  if (plant.n() != ref.n() || plant.m() != ref.m()) {
    throw DimensionError("ideal_gains: plant and reference dimensions differ");
  }
  constexpr double kTol = 1e-9;
  const Mat b_pinv = left_pseudoinverse(plant.B());

  IdealGains g;
  g.k_r = b_pinv * ref.B();
  const double input_residual = (plant.B() * g.k_r - ref.B()).norm();
  if (input_residual > kTol * (1.0 + ref.B().norm())) {
    throw AssumptionViolation("Assumption 1 violated: B k_r = B_ref has no solution (residual " +
                              std::to_string(input_residual) + ")");
  }
  try {
    g.k_r_inv = inverse(g.k_r);
  } catch (const SingularMatrixError&) {
    throw AssumptionViolation("Assumption 1 violated: matching k_r is singular");
  }
  g.k_x = g.k_r_inv * b_pinv * (ref.A() - plant.A());
  const double state_residual = (plant.A() + plant.B() * g.k_r * g.k_x - ref.A()).norm();
  if (state_residual > kTol * (1.0 + ref.A().norm() + plant.A().norm())) {
    throw AssumptionViolation("Assumption 1 violated: A + B k_r k_x = A_ref has no solution "
                              "(residual " + std::to_string(state_residual) + ")");
  }
  g.N_a = adjugate(g.k_r_inv);
  g.N_d = det(g.k_r_inv);
  return g;
}

}  // namespace idrem
