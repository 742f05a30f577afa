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
 * @file drem.hpp
 * @brief Dynamic regressor extension and mixing.
 *
 * The regression y = theta^T phi_f is passed through n+m-1 first-order
 * filters alpha_i / (p + beta_i). Stacking the copies gives a square system
 * Y_f = Phi_f theta; pre-multiplying by adj(Phi_f) decouples it into
 * Y = omega theta with the scalar regressor omega = det(Phi_f).
 */

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "idrem/errors.hpp"
#include "idrem/matrix_kernel.hpp"

namespace idrem {

/// Gains and poles of the extension filters.
class DremBank {
 public:
  DremBank(Vec alpha, Vec beta) : alpha_(std::move(alpha)), beta_(std::move(beta)) {
    if (alpha_.size() != beta_.size() || alpha_.size() == 0) {
      throw ConfigError("drem: alpha and beta must be non-empty and of equal length");
    }
    if (!(alpha_.array() > 0.0).all() || !(beta_.array() > 0.0).all() || !alpha_.allFinite() ||
        !beta_.allFinite()) {
      throw ConfigError("drem: all alpha_i and beta_i must be positive and finite");
    }
    for (Eigen::Index i = 0; i < beta_.size(); ++i) {
      for (Eigen::Index j = i + 1; j < beta_.size(); ++j) {
        if (beta_(i) == beta_(j)) throw ConfigError("drem: beta_i must be pairwise distinct");
      }
    }
  }

  /// alpha_i = 1, beta_i = i for `channels` channels.
  static DremBank unit(Eigen::Index channels) {
    return DremBank(Vec::Ones(channels), Vec::LinSpaced(channels, 1.0, static_cast<double>(channels)));
  }

  Eigen::Index channels() const { return alpha_.size(); }
  const Vec& alpha() const { return alpha_; }
  const Vec& beta() const { return beta_; }

 private:
  Vec alpha_;
  Vec beta_;
};

/// Per-channel filter states; rows of the extended regression below the first.
struct DremBankState {
  std::vector<Vec> y_f;    // each m
  std::vector<Vec> phi_f;  // each n + m

  static DremBankState zero(Eigen::Index channels, Eigen::Index n, Eigen::Index m) {
    DremBankState s;
    s.y_f.assign(static_cast<std::size_t>(channels), Vec::Zero(m));
    s.phi_f.assign(static_cast<std::size_t>(channels), Vec::Zero(n + m));
    return s;
  }
};

inline DremBankState bank_derivatives(const DremBank& bank, const DremBankState& s, const Vec& y,
                                      const Vec& phi_f) {
  const auto k = static_cast<std::size_t>(bank.channels());
  if (s.y_f.size() != k || s.phi_f.size() != k) {
    throw DimensionError("bank_derivatives: state has wrong channel count");
  }
  DremBankState d;
  d.y_f.resize(k);
  d.phi_f.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double a = bank.alpha()(static_cast<Eigen::Index>(i));
    const double b = bank.beta()(static_cast<Eigen::Index>(i));
    if (s.y_f[i].size() != y.size() || s.phi_f[i].size() != phi_f.size()) {
      throw DimensionError("bank_derivatives: channel " + std::to_string(i) + " dimension mismatch");
    }
    d.y_f[i] = -b * s.y_f[i] + a * y;
    d.phi_f[i] = -b * s.phi_f[i] + a * phi_f;
  }
  return d;
}

struct ExtendedRegression {
  Mat Y_f;    // (n+m) x m
  Mat Phi_f;  // (n+m) x (n+m)
};

/// Row 0 holds (y, phi_f); row i + 1 holds channel i.
inline ExtendedRegression extend(const Vec& y, const Vec& phi_f, const DremBankState& s) {
  const auto rows = phi_f.size();
  if (static_cast<Eigen::Index>(s.phi_f.size()) + 1 != rows || s.y_f.size() != s.phi_f.size()) {
    throw DimensionError("extend: need n+m-1 channels for an (n+m)-dimensional regressor");
  }
  ExtendedRegression e{Mat(rows, y.size()), Mat(rows, rows)};
  e.Y_f.row(0) = y.transpose();
  e.Phi_f.row(0) = phi_f.transpose();
  for (std::size_t i = 0; i < s.phi_f.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i) + 1;
    e.Y_f.row(r) = s.y_f[i].transpose();
    e.Phi_f.row(r) = s.phi_f[i].transpose();
  }
  return e;
}

struct MixedRegression {
  double omega;  // det(Phi_f)
  Mat Y;         // adj(Phi_f) Y_f, (n+m) x m
};

inline MixedRegression mix(const Mat& Y_f, const Mat& Phi_f) {
  if (Phi_f.rows() != Phi_f.cols() || Y_f.rows() != Phi_f.rows()) {
    throw DimensionError("mix: inconsistent shapes");
  }
  return {det(Phi_f), adjugate(Phi_f) * Y_f};
}

/// Tracks initial excitation of omega: the first time |omega| exceeds a
/// threshold (t0) and the trapezoidal integral of omega^2 over [t0, t0 + T0].
class ExcitationMonitor {
 public:
  struct Report {
    bool excited;
    std::optional<double> t0;
    double accumulated;
  };

  explicit ExcitationMonitor(double threshold = 1e-10, double alpha = 1e-8,
                             double window = std::numeric_limits<double>::infinity())
      : threshold_(threshold), alpha_(alpha), window_(window) {
    if (!(threshold_ >= 0.0) || !(alpha_ > 0.0) || !(window_ > 0.0)) {
      throw ConfigError("excitation monitor: threshold >= 0, alpha > 0, window > 0 required");
    }
  }

  /// Feeds the sample omega(t); dt is the spacing to the previous sample.
  Report step(double omega, double t, double dt) {
    if (!(dt > 0.0)) throw DomainError("monitor_step: dt must be positive");
    if (!t0_) {
      if (std::abs(omega) > threshold_) t0_ = t;
    } else if (t <= *t0_ + window_ * (1.0 + 1e-12)) {
      integral_ += 0.5 * (prev_omega_ * prev_omega_ + omega * omega) * dt;
    }
    prev_omega_ = omega;
    if (t0_ && integral_ >= alpha_) excited_ = true;
    return report();
  }

  Report report() const { return {excited_, t0_, integral_}; }
  std::optional<double> t0() const { return t0_; }
  double threshold() const { return threshold_; }

 private:
  double threshold_;
  double alpha_;
  double window_;
  std::optional<double> t0_;
  double integral_ = 0.0;
  double prev_omega_ = 0.0;
  bool excited_ = false;
};

}  // namespace idrem
