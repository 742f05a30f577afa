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
 * @file simulation.hpp
 * @brief Closed-loop I-DREM MRAC scenario: configuration, monolithic state
 * layout, derivative evaluation and the fixed-step run loop.
 */

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "idrem/adaptation.hpp"
#include "idrem/closed_loop.hpp"
#include "idrem/drem.hpp"
#include "idrem/errors.hpp"
#include "idrem/integrator.hpp"
#include "idrem/matrix_kernel.hpp"
#include "idrem/signal_filters.hpp"
#include "idrem/trace.hpp"

namespace idrem {

/// Raw scenario description. Empty optional-like members (zero-size
/// matrices) take defaults derived from the plant dimensions.
struct SimConfig {
  Mat A, B;          // plant
  Mat A_ref, B_ref;  // reference model
  std::vector<SetpointChannel> setpoint;

  double l = 100.0;
  Vec drem_alpha;  // default: ones(n+m-1)
  Vec drem_beta;   // default: 1, 2, ..., n+m-1
  double sigma = 0.125;

  double gamma0 = 0.1;
  double lambda = 1000.0;
  double nd_lower = 0.025;
  double gamma_max = 1e150;
  double omega_threshold = 1e-10;
  double excitation_alpha = 1e-8;
  double excitation_window = std::numeric_limits<double>::infinity();

  Vec x0;      // default zeros(n)
  Vec x_ref0;  // default zeros(n)
  Mat k_x0;    // default zeros(m, n)
  Mat N_a0;    // default identity(m)
  double N_d0 = 1.0;

  double dt = 1e-4;
  double t_end = 50.0;
  int decimate = 10;

  double convergence_threshold = 0.02;
};

/// Benchmark: unstable second-order plant, B = I, determinant estimate
/// initialised with the wrong sign.
inline SimConfig benchmark_scenario() {
  SimConfig c;
  c.A = (Mat(2, 2) << 1, 1, 4, 2).finished();
  c.B = Mat::Identity(2, 2);
  c.A_ref = (Mat(2, 2) << 0, 1, -8, -4).finished();
  c.B_ref = (Mat(2, 2) << 4, 2, 0, 2).finished();
  c.setpoint = {ConstantSetpoint{1.0}, ExponentialSetpoint{1.0, 0.01}};
  c.drem_alpha = Vec::Ones(3);
  c.drem_beta = (Vec(3) << 1, 2, 3).finished();
  c.k_x0 = Mat::Zero(2, 2);
  c.N_a0 = Mat::Identity(2, 2);
  c.N_d0 = -0.125;
  return c;
}

/// Offsets of the flat integrator state:
/// [x | x_ref | e_f | u_cf | phi_f | {y_fi, phi_fi} x (n+m-1) | Omega | vec(Ups) |
///  vec(z_kx) | vec(z_Na) | z_Nd | p]
/// The last four blocks hold the estimates in information coordinates
/// (p = 1/gamma, z = p * estimate); unpack() converts back.
class StateLayout {
 public:
  StateLayout(Eigen::Index n, Eigen::Index m) : n_(n), m_(m) {
    if (n <= 0 || m <= 0 || m > n) throw DimensionError("state layout: need 0 < m <= n");
    Eigen::Index o = 0;
    x_ = o;        o += n;
    x_ref_ = o;    o += n;
    e_f_ = o;      o += n;
    u_cf_ = o;     o += m;
    phi_f_ = o;    o += n + m;
    bank_ = o;     o += channels() * (m + n + m);
    Omega_ = o;    o += 1;
    Ups_ = o;      o += (n + m) * m;
    z_kx_ = o;     o += m * n;
    z_Na_ = o;     o += m * m;
    z_Nd_ = o;     o += 1;
    p_ = o;        o += 1;
    size_ = o;
  }

  Eigen::Index n() const { return n_; }
  Eigen::Index m() const { return m_; }
  Eigen::Index channels() const { return n_ + m_ - 1; }
  Eigen::Index size() const { return size_; }

  struct Parts {
    Vec x, x_ref, e_f, u_cf, phi_f;
    DremBankState bank;
    double Omega = 0.0;
    Mat Upsilon;
    InformationState info;
  };

  Vec pack(const Parts& s) const {
    Vec v(size_);
    v.segment(x_, n_) = s.x;
    v.segment(x_ref_, n_) = s.x_ref;
    v.segment(e_f_, n_) = s.e_f;
    v.segment(u_cf_, m_) = s.u_cf;
    v.segment(phi_f_, n_ + m_) = s.phi_f;
    if (static_cast<Eigen::Index>(s.bank.y_f.size()) != channels() ||
        static_cast<Eigen::Index>(s.bank.phi_f.size()) != channels()) {
      throw DimensionError("state layout: wrong DREM channel count");
    }
    for (Eigen::Index i = 0; i < channels(); ++i) {
      const Eigen::Index base = bank_ + i * (n_ + 2 * m_);
      v.segment(base, m_) = s.bank.y_f[static_cast<std::size_t>(i)];
      v.segment(base + m_, n_ + m_) = s.bank.phi_f[static_cast<std::size_t>(i)];
    }
    v(Omega_) = s.Omega;
    v.segment(Ups_, (n_ + m_) * m_) = vectorize(s.Upsilon);
    v.segment(z_kx_, m_ * n_) = vectorize(s.info.z_kx);
    v.segment(z_Na_, m_ * m_) = vectorize(s.info.z_Na);
    v(z_Nd_) = s.info.z_Nd;
    v(p_) = s.info.p;
    return v;
  }

  Parts unpack(const Vec& v) const {
    if (v.size() != size_) {
      throw DimensionError("state layout: expected " + std::to_string(size_) + " entries, got " +
                           std::to_string(v.size()));
    }
    Parts s;
    s.x = v.segment(x_, n_);
    s.x_ref = v.segment(x_ref_, n_);
    s.e_f = v.segment(e_f_, n_);
    s.u_cf = v.segment(u_cf_, m_);
    s.phi_f = v.segment(phi_f_, n_ + m_);
    s.bank.y_f.resize(static_cast<std::size_t>(channels()));
    s.bank.phi_f.resize(static_cast<std::size_t>(channels()));
    for (Eigen::Index i = 0; i < channels(); ++i) {
      const Eigen::Index base = bank_ + i * (n_ + 2 * m_);
      s.bank.y_f[static_cast<std::size_t>(i)] = v.segment(base, m_);
      s.bank.phi_f[static_cast<std::size_t>(i)] = v.segment(base + m_, n_ + m_);
    }
    s.Omega = v(Omega_);
    s.Upsilon = reshape(v.segment(Ups_, (n_ + m_) * m_), n_ + m_, m_);
    s.info.z_kx = reshape(v.segment(z_kx_, m_ * n_), m_, n_);
    s.info.z_Na = reshape(v.segment(z_Na_, m_ * m_), m_, m_);
    s.info.z_Nd = v(z_Nd_);
    s.info.p = v(p_);
    return s;
  }

 private:
  Eigen::Index n_, m_;
  Eigen::Index x_, x_ref_, e_f_, u_cf_, phi_f_, bank_, Omega_, Ups_, z_kx_, z_Na_, z_Nd_, p_;
  Eigen::Index size_;
};

/// Validated scenario: every load-time invariant of the configuration holds.
class Scenario {
 public:
  explicit Scenario(SimConfig cfg)
      : cfg_(std::move(cfg)),
        plant_(cfg_.A, cfg_.B),
        ref_(cfg_.A_ref, cfg_.B_ref),
        layout_(plant_.n(), plant_.m()),
        bank_(make_bank()) {
    const Eigen::Index n = plant_.n();
    const Eigen::Index m = plant_.m();
    if (ref_.n() != n || ref_.m() != m) {
      throw ConfigError("reference model dimensions differ from the plant (" +
                        std::to_string(ref_.n()) + "x" + std::to_string(ref_.m()) + " vs " +
                        std::to_string(n) + "x" + std::to_string(m) + ")");
    }
    if (static_cast<Eigen::Index>(cfg_.setpoint.size()) != m) {
      throw ConfigError("setpoint needs " + std::to_string(m) + " channels, got " +
                        std::to_string(cfg_.setpoint.size()));
    }
    setpoint_ = SetpointSignal(cfg_.setpoint);

    auto positive = [](double v, const char* what) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError(std::string(what) + " must be positive and finite");
      }
    };
    positive(cfg_.l, "filter.l");
    positive(cfg_.sigma, "memory.sigma");
    positive(cfg_.gamma0, "adaptation.gamma0");
    positive(cfg_.lambda, "adaptation.lambda");
    positive(cfg_.nd_lower, "adaptation.nd_lower");
    positive(cfg_.gamma_max, "adaptation.gamma_max");
    positive(cfg_.dt, "integration.dt");
    positive(cfg_.t_end, "integration.t_end");
    positive(cfg_.convergence_threshold, "metrics.convergence_threshold");
    if (cfg_.gamma0 > cfg_.gamma_max) throw ConfigError("adaptation.gamma0 exceeds gamma_max");
    if (!(cfg_.t_end > cfg_.dt)) throw ConfigError("integration.t_end must exceed integration.dt");
    if (cfg_.decimate < 1) throw ConfigError("output.decimate must be at least 1");
    if (!std::isfinite(cfg_.N_d0)) throw ConfigError("initial.Nd must be finite");
    monitor_template_ = ExcitationMonitor(cfg_.omega_threshold, cfg_.excitation_alpha,
                                          cfg_.excitation_window);

    if (cfg_.x0.size() == 0) cfg_.x0 = Vec::Zero(n);
    if (cfg_.x_ref0.size() == 0) cfg_.x_ref0 = Vec::Zero(n);
    if (cfg_.k_x0.size() == 0) cfg_.k_x0 = Mat::Zero(m, n);
    if (cfg_.N_a0.size() == 0) cfg_.N_a0 = Mat::Identity(m, m);
    if (cfg_.x0.size() != n || cfg_.x_ref0.size() != n) {
      throw ConfigError("initial.x and initial.x_ref need " + std::to_string(n) + " entries");
    }
    if (cfg_.k_x0.rows() != m || cfg_.k_x0.cols() != n) {
      throw ConfigError("initial.kx must be " + std::to_string(m) + "x" + std::to_string(n));
    }
    if (cfg_.N_a0.rows() != m || cfg_.N_a0.cols() != m) {
      throw ConfigError("initial.Na must be " + std::to_string(m) + "x" + std::to_string(m));
    }
    if (!cfg_.x0.allFinite() || !cfg_.x_ref0.allFinite() || !cfg_.k_x0.allFinite() ||
        !cfg_.N_a0.allFinite()) {
      throw ConfigError("initial conditions must be finite");
    }
    // The initial adjugate estimate must be invertible for k_r to exist.
    recover_kr(cfg_.N_a0, cfg_.N_d0, cfg_.nd_lower, initial_sign());

    try {
      oracle_ = ideal_gains(plant_, ref_);
    } catch (const AssumptionViolation& e) {
      oracle_error_ = e.what();
    }
  }

  const SimConfig& config() const { return cfg_; }
  const PlantSpec& plant() const { return plant_; }
  const ReferenceSpec& reference() const { return ref_; }
  const DremBank& bank() const { return bank_; }
  const SetpointSignal& setpoint() const { return setpoint_; }
  const StateLayout& layout() const { return layout_; }
  const std::optional<IdealGains>& oracle() const { return oracle_; }
  const std::string& oracle_error() const { return oracle_error_; }
  AdaptationParams adaptation_params() const { return {cfg_.lambda, cfg_.nd_lower, cfg_.gamma_max}; }
  ExcitationMonitor make_monitor() const { return monitor_template_; }
  double initial_sign() const { return resolved_sign(cfg_.N_d0, 1.0); }
  Eigen::Index n() const { return plant_.n(); }
  Eigen::Index m() const { return plant_.m(); }

  /// Integrator state at t = 0.
  Vec initial_state() const {
    const Eigen::Index n = this->n();
    const Eigen::Index m = this->m();
    StateLayout::Parts s;
    s.x = cfg_.x0;
    s.x_ref = cfg_.x_ref0;
    s.e_f = Vec::Zero(n);
    s.u_cf = Vec::Zero(m);
    s.phi_f = Vec::Zero(n + m);
    s.bank = DremBankState::zero(layout_.channels(), n, m);
    s.Omega = 0.0;
    s.Upsilon = Mat::Zero(n + m, m);
    AdaptationState a;
    a.k_x = cfg_.k_x0;
    a.N_a = cfg_.N_a0;
    a.N_d = cfg_.N_d0;
    a.gamma = cfg_.gamma0;
    s.info = InformationState::from(a);
    return layout_.pack(s);
  }

 private:
  DremBank make_bank() const {
    const Eigen::Index k = cfg_.A.rows() + cfg_.B.cols() - 1;
    if (cfg_.drem_alpha.size() == 0 && cfg_.drem_beta.size() == 0) return DremBank::unit(k);
    if (cfg_.drem_alpha.size() != k || cfg_.drem_beta.size() != k) {
      throw ConfigError("drem.alpha and drem.beta need n+m-1 = " + std::to_string(k) + " entries");
    }
    return DremBank(cfg_.drem_alpha, cfg_.drem_beta);
  }

  SimConfig cfg_;
  PlantSpec plant_;
  ReferenceSpec ref_;
  StateLayout layout_;
  DremBank bank_;
  SetpointSignal setpoint_;
  ExcitationMonitor monitor_template_;
  std::optional<IdealGains> oracle_;
  std::string oracle_error_;
};

/// Quantities that are fixed during one integration step.
struct StepContext {
  std::optional<double> t0;  // first excitation instant
  double prev_sign = 1.0;    // resolved sign of N_d at the start of the step
};

/// Every intermediate signal of one derivative evaluation.
struct Signals {
  Vec r, u, e_ref, phi, u_c, mu_f, mu_fd, y;
  AdaptationState estimates;
  RecoveredGain gain;
  ExtendedRegression extended;
  MixedRegression mixed;
  double Omega = 0.0;
  Mat Upsilon;
};

struct Evaluation {
  Vec derivative;
  Signals signals;
};

/// Full closed-loop right-hand side.
inline Evaluation evaluate(const Scenario& sc, const Vec& state, double t, const StepContext& ctx) {
  const StateLayout& layout = sc.layout();
  const StateLayout::Parts s = layout.unpack(state);
  const SimConfig& cfg = sc.config();
  const Eigen::Index n = sc.n();

  Evaluation ev;
  Signals& sig = ev.signals;
  sig.estimates.switch_count = 0;
  s.info.to(sig.estimates);
  sig.Omega = s.Omega;
  sig.Upsilon = s.Upsilon;

  sig.r = sc.setpoint()(t);
  sig.gain = recover_kr(sig.estimates.N_a, sig.estimates.N_d, cfg.nd_lower, ctx.prev_sign);
  sig.u = control_input(sig.estimates.k_x, sig.gain.k_r, s.x, sig.r);

  const Vec x_dot = plant_derivative(sc.plant(), s.x, sig.u);
  const Vec x_ref_dot = reference_derivative(sc.reference(), s.x_ref, sig.r);
  sig.e_ref = s.x - s.x_ref;

  sig.phi = build_regressor(sig.estimates.k_x, sig.gain.k_r, s.x, sig.r);
  sig.u_c = compensatory_control(stack_theta(sig.estimates.k_x, sig.gain.k_r_inv), sig.phi);

  FilterState fs;
  fs.e_f = s.e_f;
  fs.u_cf = s.u_cf;
  fs.phi_f = s.phi_f;
  fs.l = cfg.l;
  fs.e_ref_0 = cfg.x0 - cfg.x_ref0;
  fs.e_f_0 = Vec::Zero(n);
  fs.mu_f_0 = Vec::Zero(n);
  const FilterRates fr = filter_derivatives(fs, sig.e_ref, sig.u_c, sig.phi);

  sig.mu_f = mu_f_algebraic(fs, sig.e_ref, t);
  sig.mu_fd = required_behavior(sc.reference(), s.e_f, s.u_cf);
  sig.y = lre_output(sc.reference(), sig.mu_fd, sig.mu_f);

  const DremBankState bank_rates = bank_derivatives(sc.bank(), s.bank, sig.y, s.phi_f);
  sig.extended = extend(sig.y, s.phi_f, s.bank);
  sig.mixed = mix(sig.extended.Y_f, sig.extended.Phi_f);

  const bool active = ctx.t0.has_value() && t >= *ctx.t0;
  const MemoryRates mem = memory_derivatives(cfg.sigma, ctx.t0, sig.mixed.omega, sig.mixed.Y, t);

  const SplitMemory parts = split(s.Upsilon, n);
  const AdjDetTargets adjdet = adjdet_targets(parts.Ups_kr_inv);
  const InformationState info_rates = information_derivatives(
      s.info, sc.adaptation_params(), s.Omega, parts.Ups_kx, adjdet, active);

  StateLayout::Parts d;
  d.x = x_dot;
  d.x_ref = x_ref_dot;
  d.e_f = fr.e_f;
  d.u_cf = fr.u_cf;
  d.phi_f = fr.phi_f;
  d.bank = bank_rates;
  d.Omega = mem.Omega;
  d.Upsilon = mem.Upsilon;
  d.info = info_rates;
  ev.derivative = layout.pack(d);
  return ev;
}

/// Derivative only; errors are annotated with the simulation time.
inline Vec closed_loop_derivative(const Scenario& sc, const Vec& state, double t,
                                  const StepContext& ctx) {
  try {
    return evaluate(sc, state, t, ctx).derivative;
  } catch (const IntegrationFault&) {
    throw;
  } catch (const Error& e) {
    throw IntegrationFault(std::string(e.what()) + " (t = " + std::to_string(t) + ")", t, -1);
  }
}

struct FaultReport {
  std::string message;
  double time;
  long component;
};

struct RunResult {
  SimTrace trace;
  ScenarioMetrics metrics;
  std::optional<FaultReport> fault;
  Vec final_state;
};

/// Column order of the trace for a scenario.
inline std::vector<std::string> trace_columns(const Scenario& sc) {
  const Eigen::Index n = sc.n();
  const Eigen::Index m = sc.m();
  std::vector<std::string> c{"t"};
  for (Eigen::Index i = 1; i <= n; ++i) c.push_back("x" + std::to_string(i));
  for (Eigen::Index i = 1; i <= n; ++i) c.push_back("x_ref" + std::to_string(i));
  for (Eigen::Index i = 1; i <= m; ++i) c.push_back("u" + std::to_string(i));
  for (const char* name : {"e_ref_norm", "omega", "Omega", "gamma", "Nd_hat", "switch_count",
                           "excited", "t0"}) {
    c.emplace_back(name);
  }
  if (sc.oracle()) {
    for (const char* name : {"kx_err_norm", "Na_err_norm", "Nd_err", "theta_err_rel", "lyapunov",
                             "regression_residual", "mixing_residual", "memory_residual"}) {
      c.emplace_back(name);
    }
    const Eigen::Index k = m * n + m * m + 1;
    for (Eigen::Index i = 1; i <= k; ++i) c.push_back("theta_err" + std::to_string(i));
  }
  return c;
}

inline MetricsOptions metrics_options(const Scenario& sc) {
  MetricsOptions o;
  o.m = static_cast<int>(sc.m());
  o.lambda = sc.config().lambda;
  o.sigma = sc.config().sigma;
  o.convergence_threshold = sc.config().convergence_threshold;
  return o;
}

/// Integrates the scenario from 0 to t_end with fixed step dt.
inline RunResult run_scenario(const Scenario& sc) {
  const SimConfig& cfg = sc.config();
  const Eigen::Index n = sc.n();
  const Eigen::Index m = sc.m();
  const auto steps = static_cast<long>(std::llround(cfg.t_end / cfg.dt));
  const auto& oracle = sc.oracle();
  Vec theta_true_vec;
  Mat theta_true;
  if (oracle) {
    theta_true_vec = theta_vec(oracle->k_x, oracle->N_a, oracle->N_d);
    theta_true = oracle->theta();
  }

  RunResult result{SimTrace(trace_columns(sc)), {}, std::nullopt, {}};
  ExcitationMonitor monitor = sc.make_monitor();
  StepContext ctx{std::nullopt, sc.initial_sign()};
  int switch_count = 0;
  Vec state = sc.initial_state();
  const StateLayout& layout = sc.layout();

  auto record = [&](double t, const Vec& st, const Signals& sig,
                    const ExcitationMonitor::Report& rep) {
    const StateLayout::Parts p = layout.unpack(st);
    std::vector<double> row;
    row.reserve(result.trace.columns().size());
    row.push_back(t);
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(p.x(i));
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(p.x_ref(i));
    for (Eigen::Index i = 0; i < m; ++i) row.push_back(sig.u(i));
    row.push_back(sig.e_ref.norm());
    row.push_back(sig.mixed.omega);
    row.push_back(p.Omega);
    row.push_back(sig.estimates.gamma);
    row.push_back(sig.estimates.N_d);
    row.push_back(switch_count);
    row.push_back(rep.excited ? 1.0 : 0.0);
    row.push_back(rep.t0 ? *rep.t0 : std::numeric_limits<double>::quiet_NaN());
    if (oracle) {
      const Vec est = theta_vec(sig.estimates.k_x, sig.estimates.N_a, sig.estimates.N_d);
      const Vec err = est - theta_true_vec;
      row.push_back((sig.estimates.k_x - oracle->k_x).norm());
      row.push_back((sig.estimates.N_a - oracle->N_a).norm());
      row.push_back(sig.estimates.N_d - oracle->N_d);
      row.push_back(err.norm() / theta_true_vec.norm());
      row.push_back(lyapunov_value(err, sig.estimates.gamma));
      const double th = theta_true.norm();
      const Vec reg = sig.y - theta_true.transpose() * p.phi_f;
      row.push_back(reg.norm() / (1.0 + th * p.phi_f.norm()));
      const Mat mixres = sig.mixed.Y - sig.mixed.omega * theta_true;
      const double mix_scale =
          adjugate(sig.extended.Phi_f).norm() * sig.extended.Y_f.norm() + std::abs(sig.mixed.omega) * th;
      row.push_back(mixres.norm() / (1.0 + mix_scale));
      const Mat memres = p.Upsilon - p.Omega * theta_true;
      row.push_back(memres.norm() / (1.0 + p.Upsilon.norm() + p.Omega * th));
      for (Eigen::Index i = 0; i < err.size(); ++i) row.push_back(err(i));
    }
    result.trace.append(row);
  };

  double t = 0.0;
  Evaluation ev;
  try {
    ev = evaluate(sc, state, t, ctx);
  } catch (const Error& e) {
    result.fault = FaultReport{e.what(), 0.0, -1};
    result.final_state = state;
    result.metrics = compute_metrics(result.trace, metrics_options(sc));
    return result;
  }
  ExcitationMonitor::Report rep = monitor.step(ev.signals.mixed.omega, t, cfg.dt);
  ctx.t0 = rep.t0;
  record(t, state, ev.signals, rep);

  for (long k = 1; k <= steps; ++k) {
    try {
      state = rk4_step(
          state, [&](double tt, const Vec& s) { return closed_loop_derivative(sc, s, tt, ctx); }, t,
          cfg.dt);
      t = static_cast<double>(k) * cfg.dt;
      sc.layout().unpack(state).info.require_positive();
      ev = evaluate(sc, state, t, ctx);
    } catch (const IntegrationFault& f) {
      result.fault = FaultReport{f.what(), f.time(), f.component()};
      break;
    } catch (const Error& e) {
      result.fault = FaultReport{e.what(), t, -1};
      break;
    }
    if (ev.signals.gain.switched) ++switch_count;
    ctx.prev_sign = ev.signals.gain.sign;
    rep = monitor.step(ev.signals.mixed.omega, t, cfg.dt);
    ctx.t0 = rep.t0;
    if (k % cfg.decimate == 0 || k == steps) record(t, state, ev.signals, rep);
  }
  result.final_state = state;
  result.metrics = compute_metrics(result.trace, metrics_options(sc));
  return result;
}

}  // namespace idrem
