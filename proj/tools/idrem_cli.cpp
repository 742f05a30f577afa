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

// idrem_cli: run, inspect and validate adaptive-control scenarios.
//
//   idrem_cli run --config configs/benchmark.cfg --out out --emit-plots
//   idrem_cli gains --config configs/benchmark.cfg
//   idrem_cli validate --config configs/benchmark.cfg
//   idrem_cli defaults

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "idrem/config_io.hpp"
#include "idrem/simulation.hpp"
#include "idrem/trace_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitFault = 3;
constexpr int kExitAssumption = 4;

using nlohmann::json;

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json metrics_json(const idrem::ScenarioMetrics& m) {
  json j;
  j["records"] = m.records;
  j["final_t"] = m.final_t;
  j["t0"] = opt_json(m.t0);
  j["excited"] = m.excited;
  j["switch_count"] = m.switch_count;
  j["final_e_ref_norm"] = m.final_e_ref_norm;
  j["omega_decreases"] = m.omega_decreases;
  j["omega_bound_violations"] = m.omega_bound_violations;
  j["oracle"] = m.oracle;
  if (m.oracle) {
    j["final_kx_err"] = m.final_kx_err;
    j["final_Na_err"] = m.final_Na_err;
    j["final_Nd_err"] = m.final_Nd_err;
    j["convergence_time"] = opt_json(m.convergence_time);
    j["monotonicity_violations"] = m.monotonicity_violations;
    j["lyapunov_violations"] = m.lyapunov_violations;
    j["lyapunov_violations_raw"] = m.lyapunov_violations_raw;
    j["max_lyapunov_ascent"] = m.max_lyapunov_ascent;
    j["envelope_violations"] = m.envelope_violations;
    j["max_regression_residual"] = m.max_regression_residual;
    j["max_mixing_residual"] = m.max_mixing_residual;
    j["max_memory_residual"] = m.max_memory_residual;
  }
  return j;
}

void print_matrix(const char* name, const idrem::Mat& M) {
  std::cout << name << " =\n";
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    std::cout << "  [";
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      std::cout << (j ? ", " : "") << std::setprecision(12) << M(i, j) + 0.0;
    }
    std::cout << "]\n";
  }
}

// Maps library errors onto exit codes; anything else propagates.
template <typename F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const idrem::AssumptionViolation& e) {
    std::cerr << "assumption violated: " << e.what() << "\n";
    return kExitAssumption;
  } catch (const idrem::IntegrationFault& e) {
    std::cerr << "integration fault: " << e.what() << "\n";
    return kExitFault;
  } catch (const idrem::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 1;
  } catch (const idrem::Error& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kExitConfig;
  }
}

int cmd_run(const std::string& config, const std::string& out, std::optional<double> dt,
            std::optional<double> t_end, std::optional<int> decimate, bool plots) {
  idrem::SimConfig cfg = idrem::load_config(config);
  if (dt) cfg.dt = *dt;
  if (t_end) cfg.t_end = *t_end;
  if (decimate) cfg.decimate = *decimate;
  const idrem::Scenario sc(cfg);
  if (!sc.oracle()) {
    std::cerr << "note: " << sc.oracle_error() << "; error columns omitted\n";
  }

  const idrem::RunResult res = idrem::run_scenario(sc);
  const std::filesystem::path dir(out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw idrem::IoError("cannot create '" + dir.string() + "': " + ec.message());
  idrem::emit_csv(res.trace, dir / "trace.csv");
  if (plots) idrem::emit_plot_script(res.trace, dir / "plot_trace.py");

  json j = metrics_json(res.metrics);
  if (res.fault) {
    j["fault"] = {{"message", res.fault->message},
                  {"time", res.fault->time},
                  {"component", res.fault->component}};
  }
  std::ofstream mf(dir / "metrics.json");
  if (!mf) throw idrem::IoError("cannot write '" + (dir / "metrics.json").string() + "'");
  mf << j.dump(2) << "\n";
  std::cout << j.dump(2) << "\n";

  if (res.fault) {
    std::cerr << "integration fault at t = " << res.fault->time << ": " << res.fault->message << "\n";
    return kExitFault;
  }
  return kExitOk;
}

int cmd_gains(const std::string& config) {
  const idrem::SimConfig cfg = idrem::load_config(config);
  const idrem::PlantSpec plant(cfg.A, cfg.B);
  const idrem::ReferenceSpec ref(cfg.A_ref, cfg.B_ref);
  const idrem::IdealGains g = idrem::ideal_gains(plant, ref);
  print_matrix("k_x", g.k_x);
  print_matrix("k_r", g.k_r);
  print_matrix("k_r_inv", g.k_r_inv);
  print_matrix("N_a", g.N_a);
  std::cout << "N_d = " << std::setprecision(12) << g.N_d << "\n";
  return kExitOk;
}

int cmd_validate(const std::string& config) {
  const idrem::Scenario sc(idrem::load_config(config));
  if (!sc.oracle()) {
    std::cerr << "assumption violated: " << sc.oracle_error() << "\n";
    return kExitAssumption;
  }
  std::cout << "ok: n = " << sc.n() << ", m = " << sc.m() << ", state size " << sc.layout().size()
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"I-DREM model reference adaptive control simulator"};
  app.require_subcommand(1);

  std::string config;
  std::string out = "out";
  std::optional<double> dt, t_end;
  std::optional<int> decimate;
  bool plots = false;

  auto* run = app.add_subcommand("run", "Simulate a scenario and write trace.csv and metrics.json");
  run->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output directory")->capture_default_str();
  run->add_option("--dt", dt, "Override integration.dt (s)");
  run->add_option("--t-end", t_end, "Override integration.t_end (s)");
  run->add_option("--decimate", decimate, "Record every k-th step (1 = every step)");
  run->add_flag("--emit-plots", plots, "Also write plot_trace.py");

  auto* gains = app.add_subcommand("gains", "Print the ideal controller gains");
  gains->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);

  auto* validate = app.add_subcommand("validate", "Check every load-time invariant");
  validate->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);

  auto* defaults = app.add_subcommand("defaults", "Print the documented config reference");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*run) return guarded([&] { return cmd_run(config, out, dt, t_end, decimate, plots); });
  if (*gains) return guarded([&] { return cmd_gains(config); });
  if (*validate) return guarded([&] { return cmd_validate(config); });
  if (*defaults) {
    std::cout << idrem::config_reference();
    return kExitOk;
  }
  return kExitOk;
}
