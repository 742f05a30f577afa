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
 * @file trace.hpp
 * @brief Recorded simulation trace and the metrics derived from it.
 *
 * Values are stored with 12 significant digits, the precision of the CSV
 * output, so metrics recomputed from an emitted CSV match the in-memory ones
 * bit for bit.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "idrem/errors.hpp"

namespace idrem {

/// Rounds to the 12-significant-digit decimal printed in the CSV.
inline double quantize(double v) {
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

class SimTrace {
 public:
  SimTrace() = default;
  explicit SimTrace(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return columns_.empty() ? 0 : data_.size() / columns_.size(); }
  bool empty() const { return data_.empty(); }

  void append(const std::vector<double>& row) {
    if (row.size() != columns_.size()) {
      throw DimensionError("trace: row has " + std::to_string(row.size()) + " values, schema has " +
                           std::to_string(columns_.size()));
    }
    for (double v : row) data_.push_back(quantize(v));
  }

  double at(std::size_t row, std::size_t col) const { return data_[row * columns_.size() + col]; }

  std::optional<std::size_t> find(const std::string& name) const {
    auto it = std::find(columns_.begin(), columns_.end(), name);
    if (it == columns_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - columns_.begin());
  }

  std::size_t index(const std::string& name) const {
    auto i = find(name);
    if (!i) throw DimensionError("trace: no column '" + name + "'");
    return *i;
  }

  std::vector<double> column(const std::string& name) const {
    const std::size_t c = index(name);
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < out.size(); ++r) out[r] = at(r, c);
    return out;
  }

 private:
  std::vector<std::string> columns_;
  std::vector<double> data_;
};

struct MetricsOptions {
  int m = 1;
  double lambda = 1000.0;
  double sigma = 0.125;
  double convergence_threshold = 0.02;
  /// Envelope checkpoint: T = t0 + envelope_offset.
  double envelope_offset = 1.0;
};

struct ScenarioMetrics {
  std::size_t records = 0;
  double final_t = 0.0;
  std::optional<double> t0;
  bool excited = false;
  int switch_count = 0;
  double final_e_ref_norm = 0.0;
  long omega_decreases = 0;
  long omega_bound_violations = 0;

  // Oracle-dependent.
  bool oracle = false;
  double final_kx_err = 0.0;
  double final_Na_err = 0.0;
  double final_Nd_err = 0.0;
  std::optional<double> convergence_time;
  long monotonicity_violations = 0;
  long lyapunov_violations = 0;
  long lyapunov_violations_raw = 0;
  double max_lyapunov_ascent = 0.0;
  long envelope_violations = 0;
  double max_regression_residual = 0.0;
  double max_mixing_residual = 0.0;
  double max_memory_residual = 0.0;

  bool operator==(const ScenarioMetrics&) const = default;
};

/// Tolerances used by the post-run invariant checks.
struct InvariantTolerances {
  static constexpr double kMonotonicity = 1e-6;  // times (1 + |theta_err_i(t0)|)
  static constexpr double kLyapunovRel = 1e-8;
  static constexpr double kOmegaRel = 1e-12;
};

/// Derives every metric from the trace alone.
inline ScenarioMetrics compute_metrics(const SimTrace& tr, const MetricsOptions& opt) {
  ScenarioMetrics mt;
  mt.records = tr.rows();
  if (tr.empty()) return mt;
  const std::size_t last = tr.rows() - 1;
  const std::size_t c_t = tr.index("t");
  const std::size_t c_t0 = tr.index("t0");
  const std::size_t c_omega = tr.index("omega");
  const std::size_t c_Omega = tr.index("Omega");

  mt.final_t = tr.at(last, c_t);
  mt.excited = tr.at(last, tr.index("excited")) != 0.0;
  mt.switch_count = static_cast<int>(tr.at(last, tr.index("switch_count")));
  mt.final_e_ref_norm = tr.at(last, tr.index("e_ref_norm"));
  if (std::isfinite(tr.at(last, c_t0))) mt.t0 = tr.at(last, c_t0);

  double sup_omega2 = 0.0;
  for (std::size_t r = 0; r < tr.rows(); ++r) {
    sup_omega2 = std::max(sup_omega2, tr.at(r, c_omega) * tr.at(r, c_omega));
  }
  const double Omega_cap = sup_omega2 / opt.sigma * (1.0 + 1e-9);
  for (std::size_t r = 0; r < tr.rows(); ++r) {
    const double Om = tr.at(r, c_Omega);
    if (Om > Omega_cap) ++mt.omega_bound_violations;
    if (r > 0) {
      const double prev = tr.at(r - 1, c_Omega);
      if (Om < prev - InvariantTolerances::kOmegaRel * std::abs(prev)) ++mt.omega_decreases;
    }
  }

  const auto c_kx = tr.find("kx_err_norm");
  if (!c_kx) return mt;
  mt.oracle = true;
  const std::size_t c_Na = tr.index("Na_err_norm");
  const std::size_t c_Nd = tr.index("Nd_err");
  const std::size_t c_rel = tr.index("theta_err_rel");
  const std::size_t c_V = tr.index("lyapunov");
  const std::size_t c_gamma = tr.index("gamma");
  std::vector<std::size_t> c_err;
  for (int i = 1;; ++i) {
    auto c = tr.find("theta_err" + std::to_string(i));
    if (!c) break;
    c_err.push_back(*c);
  }

  mt.final_kx_err = tr.at(last, *c_kx);
  mt.final_Na_err = tr.at(last, c_Na);
  mt.final_Nd_err = std::abs(tr.at(last, c_Nd));

  // Convergence: first record after which the relative error stays below threshold.
  std::optional<std::size_t> last_above;
  for (std::size_t r = 0; r < tr.rows(); ++r) {
    if (!(tr.at(r, c_rel) < opt.convergence_threshold)) last_above = r;
  }
  if (!last_above) {
    mt.convergence_time = tr.at(0, c_t);
  } else if (*last_above < last) {
    mt.convergence_time = tr.at(*last_above + 1, c_t);
  }

  for (const char* name : {"regression_residual", "mixing_residual", "memory_residual"}) {
    const std::size_t c = tr.index(name);
    double mx = 0.0;
    for (std::size_t r = 0; r < tr.rows(); ++r) mx = std::max(mx, tr.at(r, c));
    if (std::string(name) == "regression_residual") mt.max_regression_residual = mx;
    if (std::string(name) == "mixing_residual") mt.max_mixing_residual = mx;
    if (std::string(name) == "memory_residual") mt.max_memory_residual = mx;
  }

  if (!mt.t0) return mt;
  std::size_t first = 0;
  while (first < tr.rows() && tr.at(first, c_t) < *mt.t0) ++first;
  if (first >= tr.rows()) return mt;

  auto err_norm = [&](std::size_t r) {
    double s = 0.0;
    for (std::size_t c : c_err) s += tr.at(r, c) * tr.at(r, c);
    return std::sqrt(s);
  };

  // Per-component monotone decrease of |theta_err_i| from t0 on.
  std::vector<double> running_min(c_err.size());
  std::vector<double> tol(c_err.size());
  for (std::size_t i = 0; i < c_err.size(); ++i) {
    running_min[i] = std::abs(tr.at(first, c_err[i]));
    tol[i] = InvariantTolerances::kMonotonicity * (1.0 + running_min[i]);
  }
  // V ascents smaller than the resolution floor (the monotonicity tolerance
  // applied to the whole error vector, weighted by 1/gamma) are not counted.
  const double resolution = InvariantTolerances::kMonotonicity * (1.0 + err_norm(first));
  for (std::size_t r = first + 1; r < tr.rows(); ++r) {
    for (std::size_t i = 0; i < c_err.size(); ++i) {
      const double a = std::abs(tr.at(r, c_err[i]));
      if (a > running_min[i] + tol[i]) ++mt.monotonicity_violations;
      running_min[i] = std::min(running_min[i], a);
    }
    const double v_prev = tr.at(r - 1, c_V);
    const double v = tr.at(r, c_V);
    const double rel_cap = v_prev * (1.0 + InvariantTolerances::kLyapunovRel);
    if (v > rel_cap) ++mt.lyapunov_violations_raw;
    if (v > rel_cap + resolution * resolution / tr.at(r, c_gamma)) ++mt.lyapunov_violations;
    if (v_prev > 0.0) mt.max_lyapunov_ascent = std::max(mt.max_lyapunov_ascent, (v - v_prev) / v_prev);
  }

  // Exponential envelope from checkpoint T = t0 + offset.
  const double T = *mt.t0 + opt.envelope_offset;
  std::size_t cp = first;
  while (cp < tr.rows() && tr.at(cp, c_t) < T) ++cp;
  if (cp < tr.rows()) {
    const double Om_T = tr.at(cp, c_Omega);
    const double g_T = tr.at(cp, c_gamma);
    const double V_T = tr.at(cp, c_V);
    const double kappa = g_T * std::pow(Om_T, 2.0 * opt.m) + opt.lambda;
    for (std::size_t r = cp; r < tr.rows(); ++r) {
      const double bound = std::sqrt(g_T * std::exp(-kappa * (tr.at(r, c_t) - tr.at(cp, c_t))) * V_T);
      if (err_norm(r) > bound + resolution) ++mt.envelope_violations;
    }
  }
  return mt;
}

}  // namespace idrem
