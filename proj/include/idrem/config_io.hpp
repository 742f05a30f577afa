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
 * @file config_io.hpp
 * @brief Scenario files: flat `section.key = value` text.
 *
 * Lines starting with `#` are comments. Matrices are row-major lists
 * `[a, b, c, d]`; the plant order n is inferred from plant.A. Setpoint
 * channels are `setpoint.r<k> = <kind> <args...>` with kinds
 * `constant c`, `exponential c rate`, `sine amplitude hz phase`,
 * `step level time`. Unknown and repeated keys are errors.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "idrem/errors.hpp"
#include "idrem/simulation.hpp"

namespace idrem {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& text, const std::string& key) {
  const std::string s = trim(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw ConfigError(key + ": expected a number, got '" + s + "'");
  return v;
}

inline std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::string s = trim(text);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
    throw ConfigError(key + ": expected a list [a, b, ...]");
  }
  s = trim(s.substr(1, s.size() - 2));
  std::vector<double> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, key));
  return out;
}

inline Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Row-major list into a rows x (size/rows) matrix.
inline Mat to_mat(const std::vector<double>& v, Eigen::Index rows, const std::string& key) {
  if (rows <= 0 || v.empty() || v.size() % static_cast<std::size_t>(rows) != 0) {
    throw ConfigError(key + ": " + std::to_string(v.size()) + " entries do not form a matrix with " +
                      std::to_string(rows) + " rows");
  }
  const auto cols = static_cast<Eigen::Index>(v.size()) / rows;
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = v[static_cast<std::size_t>(i * cols + j)];
  }
  return m;
}

inline SetpointChannel parse_setpoint(const std::string& text, const std::string& key) {
  std::stringstream ss(trim(text));
  std::string kind;
  ss >> kind;
  std::vector<double> args;
  std::string tok;
  while (ss >> tok) args.push_back(parse_number(tok, key));
  auto need = [&](std::size_t k) {
    if (args.size() != k) {
      throw ConfigError(key + ": '" + kind + "' takes " + std::to_string(k) + " argument(s)");
    }
  };
  if (kind == "constant") {
    need(1);
    return ConstantSetpoint{args[0]};
  }
  if (kind == "exponential") {
    need(2);
    return ExponentialSetpoint{args[0], args[1]};
  }
  if (kind == "sine") {
    need(3);
    return SineSetpoint{args[0], args[1], args[2]};
  }
  if (kind == "step") {
    need(2);
    return StepSetpoint{args[0], args[1]};
  }
  throw ConfigError(key + ": unknown setpoint kind '" + kind + "'");
}

inline const std::vector<std::string>& scalar_keys() {
  static const std::vector<std::string> keys{
      "filter.l",         "memory.sigma",        "adaptation.gamma0",   "adaptation.lambda",
      "adaptation.nd_lower", "adaptation.gamma_max", "excitation.threshold", "excitation.alpha",
      "excitation.window", "initial.Nd",          "integration.dt",      "integration.t_end",
      "output.decimate",  "metrics.convergence_threshold"};
  return keys;
}

inline const std::vector<std::string>& list_keys() {
  static const std::vector<std::string> keys{
      "plant.A",    "plant.B",    "reference.A", "reference.B", "drem.alpha",
      "drem.beta",  "initial.x",  "initial.x_ref", "initial.kx",  "initial.Na"};
  return keys;
}

}  // namespace detail

/// Parses scenario text. Shape and value checks beyond syntax happen when a
/// Scenario is built from the result.
inline SimConfig parse_config(std::istream& is, const std::string& origin = "<config>") {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string s = detail::trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string value = detail::trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }

  SimConfig c;
  std::map<std::string, std::vector<double>> lists;
  std::map<int, SetpointChannel> setpoints;
  auto contains = [](const std::vector<std::string>& v, const std::string& k) {
    return std::find(v.begin(), v.end(), k) != v.end();
  };
  for (const auto& [key, value] : kv) {
    if (contains(detail::list_keys(), key)) {
      lists[key] = detail::parse_list(value, key);
    } else if (contains(detail::scalar_keys(), key)) {
      const double v = detail::parse_number(value, key);
      if (key == "filter.l") c.l = v;
      else if (key == "memory.sigma") c.sigma = v;
      else if (key == "adaptation.gamma0") c.gamma0 = v;
      else if (key == "adaptation.lambda") c.lambda = v;
      else if (key == "adaptation.nd_lower") c.nd_lower = v;
      else if (key == "adaptation.gamma_max") c.gamma_max = v;
      else if (key == "excitation.threshold") c.omega_threshold = v;
      else if (key == "excitation.alpha") c.excitation_alpha = v;
      else if (key == "excitation.window") c.excitation_window = v;
      else if (key == "initial.Nd") c.N_d0 = v;
      else if (key == "integration.dt") c.dt = v;
      else if (key == "integration.t_end") c.t_end = v;
      else if (key == "metrics.convergence_threshold") c.convergence_threshold = v;
      else if (key == "output.decimate") {
        if (v != std::floor(v) || v < 1 || v > 1e9) {
          throw ConfigError("output.decimate: expected a positive integer");
        }
        c.decimate = static_cast<int>(v);
      }
    } else if (key.rfind("setpoint.r", 0) == 0) {
      const std::string idx = key.substr(10);
      char* end = nullptr;
      const long k = std::strtol(idx.c_str(), &end, 10);
      if (idx.empty() || *end != '\0' || k < 1 || k > 64) {
        throw ConfigError("unknown key '" + key + "'");
      }
      setpoints[static_cast<int>(k)] = detail::parse_setpoint(value, key);
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }

  for (const char* req : {"plant.A", "plant.B", "reference.A", "reference.B"}) {
    if (!lists.count(req)) throw ConfigError(std::string("missing required key '") + req + "'");
  }
  const auto nA = lists["plant.A"].size();
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(nA))));
  if (n <= 0 || static_cast<std::size_t>(n * n) != nA) {
    throw ConfigError("plant.A: " + std::to_string(nA) + " entries is not a square matrix");
  }
  c.A = detail::to_mat(lists["plant.A"], n, "plant.A");
  c.B = detail::to_mat(lists["plant.B"], n, "plant.B");
  c.A_ref = detail::to_mat(lists["reference.A"], n, "reference.A");
  c.B_ref = detail::to_mat(lists["reference.B"], n, "reference.B");
  const Eigen::Index m = c.B.cols();
  if (lists.count("drem.alpha")) c.drem_alpha = detail::to_vec(lists["drem.alpha"]);
  if (lists.count("drem.beta")) c.drem_beta = detail::to_vec(lists["drem.beta"]);
  if (lists.count("initial.x")) c.x0 = detail::to_vec(lists["initial.x"]);
  if (lists.count("initial.x_ref")) c.x_ref0 = detail::to_vec(lists["initial.x_ref"]);
  if (lists.count("initial.kx")) c.k_x0 = detail::to_mat(lists["initial.kx"], m, "initial.kx");
  if (lists.count("initial.Na")) c.N_a0 = detail::to_mat(lists["initial.Na"], m, "initial.Na");

  int expected = 1;
  for (const auto& [k, ch] : setpoints) {
    if (k != expected++) throw ConfigError("setpoint channels must be numbered r1, r2, ... without gaps");
    c.setpoint.push_back(ch);
  }
  if (c.setpoint.empty()) {
    c.setpoint.assign(static_cast<std::size_t>(m), ConstantSetpoint{0.0});
  }
  return c;
}

inline SimConfig parse_config(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

inline SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config '" + path.string() + "'");
  return parse_config(is, path.string());
}

/// Every recognised key with its default, as a commented config file.
inline std::string config_reference() {
  const SimConfig d;
  std::ostringstream os;
  os.precision(12);
  os << "# idrem scenario reference. Required: plant.A, plant.B, reference.A, reference.B.\n"
        "# Matrices are row-major lists; n is taken from plant.A, m from plant.B.\n"
        "\n"
        "plant.A = [1, 1, 4, 2]\n"
        "plant.B = [1, 0, 0, 1]\n"
        "reference.A = [0, 1, -8, -4]\n"
        "reference.B = [4, 2, 0, 2]\n"
        "\n"
        "# One line per input channel; all zero when omitted.\n"
        "#   constant c | exponential c rate | sine amplitude hz phase | step level time\n"
        "# exponential is c * exp(-rate * t).\n"
        "setpoint.r1 = constant 1\n"
        "setpoint.r2 = exponential 1 0.01\n"
        "\n"
        "filter.l = " << d.l << "\n"
        "# default: n+m-1 channels, alpha_i = 1, beta_i = i\n"
        "# drem.alpha = [1, 1, 1]\n"
        "# drem.beta = [1, 2, 3]\n"
        "memory.sigma = " << d.sigma << "\n"
        "\n"
        "adaptation.gamma0 = " << d.gamma0 << "\n"
        "adaptation.lambda = " << d.lambda << "\n"
        "adaptation.nd_lower = " << d.nd_lower << "\n"
        "adaptation.gamma_max = " << d.gamma_max << "\n"
        "\n"
        "excitation.threshold = " << d.omega_threshold << "\n"
        "excitation.alpha = " << d.excitation_alpha << "\n"
        "# excitation.window = <seconds>   (default: whole run)\n"
        "\n"
        "# defaults: x = x_ref = 0, kx = 0, Na = I\n"
        "# initial.x = [0, 0]\n"
        "# initial.x_ref = [0, 0]\n"
        "# initial.kx = [0, 0, 0, 0]\n"
        "# initial.Na = [1, 0, 0, 1]\n"
        "initial.Nd = " << d.N_d0 << "\n"
        "\n"
        "integration.dt = " << d.dt << "\n"
        "integration.t_end = " << d.t_end << "\n"
        "output.decimate = " << d.decimate << "\n"
        "metrics.convergence_threshold = " << d.convergence_threshold << "\n";
  return os.str();
}

}  // namespace idrem
