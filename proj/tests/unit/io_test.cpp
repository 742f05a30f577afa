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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "idrem/config_io.hpp"
#include "idrem/trace.hpp"
#include "idrem/trace_io.hpp"

namespace idrem {
namespace {

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

TEST(Trace, QuantizesToTwelveDigits) {
  SimTrace tr({"a"});
  tr.append({1.0 / 3.0});
  EXPECT_EQ(tr.at(0, 0), 0.333333333333);
  EXPECT_TRUE(std::isnan(quantize(NAN)));
  EXPECT_THROW(tr.append({1.0, 2.0}), DimensionError);
}

TEST(Csv, EmptyTraceIsHeaderOnly) {
  std::ostringstream os;
  write_csv(SimTrace({"t", "x1"}), os);
  EXPECT_EQ(os.str(), "t,x1\n");
}

TEST(Csv, ThreeRecords) {
  SimTrace tr({"t", "v"});
  tr.append({0.0, 1.5});
  tr.append({0.1, -2e-20});
  tr.append({0.2, NAN});
  std::ostringstream os;
  write_csv(tr, os);
  EXPECT_EQ(count_lines(os.str()), 4u);
  EXPECT_EQ(os.str(), "t,v\n0,1.5\n0.1,-2e-20\n0.2,nan\n");
}

TEST(Csv, RoundTripExact) {
  SimTrace tr({"t", "v"});
  for (int k = 0; k < 100; ++k) tr.append({k * 1e-4, std::exp(k * 0.37) * std::sin(k)});
  std::stringstream ss;
  write_csv(tr, ss);
  const SimTrace back = parse_csv(ss);
  ASSERT_EQ(back.rows(), tr.rows());
  for (std::size_t r = 0; r < tr.rows(); ++r) {
    EXPECT_EQ(back.at(r, 0), tr.at(r, 0));
    EXPECT_EQ(back.at(r, 1), tr.at(r, 1));
  }
}

TEST(Csv, MalformedRejected) {
  std::istringstream a("t,v\n1,2,3\n");
  EXPECT_THROW(parse_csv(a), IoError);
  std::istringstream b("t,v\n1,abc\n");
  EXPECT_THROW(parse_csv(b), IoError);
}

TEST(Csv, UnwritablePathNamesPath) {
  try {
    emit_csv(SimTrace({"t"}), "/nonexistent-dir/trace.csv");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/trace.csv"), std::string::npos);
  }
}

TEST(PlotScript, ReferencesCsvAndColumns) {
  const SimConfig c = benchmark_scenario();
  const Scenario sc(c);
  const SimTrace tr(trace_columns(sc));
  const std::string py = plot_script(tr);
  EXPECT_NE(py.find("'trace.csv'"), std::string::npos);
  EXPECT_NE(py.find("kx_err_norm"), std::string::npos);
  EXPECT_NE(py.find("Nd_hat"), std::string::npos);
  EXPECT_NE(py.find("['x1', 'x2']"), std::string::npos);
  EXPECT_NE(py.find("['x_ref1', 'x_ref2']"), std::string::npos);
  EXPECT_EQ(std::count(py.begin(), py.end(), '\n') > 10, true);
  for (const char* fig : {"fig1_errors.png", "fig2_determinant.png", "fig3_tracking.png"}) {
    EXPECT_NE(py.find(fig), std::string::npos);
  }
  // every column the script reads exists in the trace
  for (const char* col : {"t", "kx_err_norm", "Na_err_norm", "Nd_err", "Nd_hat"}) {
    EXPECT_TRUE(tr.find(col).has_value()) << col;
  }
}

const char* kBenchmark = R"(
# comment
plant.A = [1, 1, 4, 2]
plant.B = [1, 0, 0, 1]
reference.A = [0, 1, -8, -4]
reference.B = [4, 2, 0, 2]
setpoint.r1 = constant 1
setpoint.r2 = exponential 1 0.01
drem.alpha = [1, 1, 1]
drem.beta = [1, 2, 3]
initial.Nd = -0.125
)";

TEST(Config, ParsesBenchmark) {
  const SimConfig c = parse_config(kBenchmark);
  const SimConfig want = benchmark_scenario();
  EXPECT_EQ(c.A, want.A);
  EXPECT_EQ(c.B, want.B);
  EXPECT_EQ(c.A_ref, want.A_ref);
  EXPECT_EQ(c.B_ref, want.B_ref);
  EXPECT_EQ(c.drem_beta, want.drem_beta);
  EXPECT_EQ(c.N_d0, -0.125);
  ASSERT_EQ(c.setpoint.size(), 2u);
  EXPECT_DOUBLE_EQ(evaluate(c.setpoint[1], 100.0), std::exp(-1.0));
  EXPECT_NO_THROW(Scenario{c});
}

TEST(Config, RowMajorMatrices) {
  const SimConfig c = parse_config(std::string(kBenchmark) + "initial.kx = [1, 2, 3, 4]\n");
  EXPECT_EQ(c.k_x0(0, 1), 2.0);
  EXPECT_EQ(c.k_x0(1, 0), 3.0);
}

TEST(Config, UnknownKeyRejected) {
  EXPECT_THROW(parse_config(std::string(kBenchmark) + "adaptation.lamda = 5\n"), ConfigError);
  EXPECT_THROW(parse_config(std::string(kBenchmark) + "setpoint.x1 = constant 1\n"), ConfigError);
}

TEST(Config, DuplicateKeyRejected) {
  EXPECT_THROW(parse_config(std::string(kBenchmark) + "filter.l = 5\nfilter.l = 6\n"), ConfigError);
}

TEST(Config, SyntaxErrors) {
  EXPECT_THROW(parse_config("plant.A [1]\n"), ConfigError);
  EXPECT_THROW(parse_config(std::string(kBenchmark) + "filter.l = fast\n"), ConfigError);
  EXPECT_THROW(parse_config(std::string(kBenchmark) + "drem.beta = 1, 2, 3\n"), Error);
  EXPECT_THROW(parse_config(std::string(kBenchmark) + "setpoint.r3 = ramp 1\n"), ConfigError);
  EXPECT_THROW(parse_config(std::string(kBenchmark) + "output.decimate = 2.5\n"), ConfigError);
  EXPECT_THROW(parse_config("plant.A = [1, 2, 3]\nplant.B = [1]\nreference.A = [1]\nreference.B = [1]\n"),
               ConfigError);
  EXPECT_THROW(parse_config("plant.A = [1]\n"), ConfigError);
}

TEST(Config, SetpointGapRejected) {
  std::string s = kBenchmark;
  s.replace(s.find("setpoint.r2"), 11, "setpoint.r3");
  EXPECT_THROW(parse_config(s), ConfigError);
}

TEST(Config, ReferenceParsesToDefaults) {
  const SimConfig c = parse_config(config_reference());
  const SimConfig d;
  EXPECT_EQ(c.l, d.l);
  EXPECT_EQ(c.sigma, d.sigma);
  EXPECT_EQ(c.lambda, d.lambda);
  EXPECT_EQ(c.gamma0, d.gamma0);
  EXPECT_EQ(c.gamma_max, d.gamma_max);
  EXPECT_EQ(c.nd_lower, d.nd_lower);
  EXPECT_EQ(c.omega_threshold, d.omega_threshold);
  EXPECT_EQ(c.dt, d.dt);
  EXPECT_EQ(c.t_end, d.t_end);
  EXPECT_EQ(c.decimate, d.decimate);
  EXPECT_NO_THROW(Scenario{c});
}

TEST(Config, ShippedFilesLoad) {
  const std::filesystem::path dir = IDREM_CONFIG_DIR;
  for (const char* name : {"benchmark.cfg", "benchmark_matched_sign.cfg", "zero_setpoint.cfg"}) {
    EXPECT_NO_THROW(Scenario{load_config(dir / name)}) << name;
  }
  EXPECT_EQ(load_config(dir / "benchmark_matched_sign.cfg").N_d0, 0.125);
  EXPECT_THROW(load_config(dir / "missing.cfg"), ConfigError);
}

}  // namespace
}  // namespace idrem
