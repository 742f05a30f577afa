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

#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "idrem/errors.hpp"
#include "idrem/trace.hpp"

namespace idrem {

class IoError : public Error {
 public:
  using Error::Error;
};

inline void write_csv(const SimTrace& tr, std::ostream& os) {
  const auto& cols = tr.columns();
  for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
  os << '\n';
  char buf[32];
  for (std::size_t r = 0; r < tr.rows(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.12g", tr.at(r, c));
      if (c) os << ',';
      os << buf;
    }
    os << '\n';
  }
}

inline void emit_csv(const SimTrace& tr, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  write_csv(tr, os);
  if (!os.flush()) throw IoError("write failed for '" + path.string() + "'");
}

inline SimTrace parse_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("csv: missing header");
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
  }
  SimTrace tr(cols);
  std::vector<double> row;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    row.clear();
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        throw IoError("csv: bad value '" + cell + "' on line " + std::to_string(lineno));
      }
      row.push_back(v);
    }
    if (row.size() != cols.size()) {
      throw IoError("csv: line " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                    " fields, expected " + std::to_string(cols.size()));
    }
    tr.append(row);
  }
  return tr;
}

inline SimTrace read_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  return parse_csv(is);
}

/// Matplotlib script that reads `csv_name` next to itself and writes three
/// figures: estimation errors, the determinant estimate, state tracking.
inline std::string plot_script(const SimTrace& tr, const std::string& csv_name = "trace.csv") {
  std::vector<std::string> xs, xrefs;
  for (int i = 1; tr.find("x" + std::to_string(i)); ++i) {
    xs.push_back("x" + std::to_string(i));
    xrefs.push_back("x_ref" + std::to_string(i));
  }
  auto list = [](const std::vector<std::string>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", '" : "'") + v[i] + "'";
    return s + "]";
  };
  const bool oracle = tr.find("kx_err_norm").has_value();

  std::ostringstream py;
  py << "#!/usr/bin/env python3\n"
        "# Generated by idrem. Renders figures from the trace CSV next to this file.\n"
        "import csv\n"
        "import os\n"
        "\n"
        "import matplotlib\n"
        "matplotlib.use('Agg')\n"
        "import matplotlib.pyplot as plt\n"
        "\n"
        "HERE = os.path.dirname(os.path.abspath(__file__))\n"
        "\n"
        "with open(os.path.join(HERE, '"
     << csv_name
     << "'), newline='') as f:\n"
        "    rows = list(csv.DictReader(f))\n"
        "col = {k: [float(r[k]) for r in rows] for k in (rows[0].keys() if rows else [])}\n"
        "t = col.get('t', [])\n"
        "\n"
        "X = "
     << list(xs) << "\nXREF = " << list(xrefs) << "\nORACLE = " << (oracle ? "True" : "False")
     << "\n"
        "\n"
        "fig, ax = plt.subplots()\n"
        "if ORACLE:\n"
        "    ax.plot(t, col['kx_err_norm'], label='|k_x error|')\n"
        "    ax.plot(t, col['Na_err_norm'], label='|N_a error|')\n"
        "    ax.plot(t, [abs(v) for v in col['Nd_err']], label='|N_d error|')\n"
        "ax.set_xlabel('t, s')\n"
        "ax.set_ylabel('estimation error')\n"
        "ax.legend()\n"
        "fig.savefig(os.path.join(HERE, 'fig1_errors.png'), dpi=150)\n"
        "\n"
        "fig, ax = plt.subplots()\n"
        "ax.plot(t, col['Nd_hat'], label='N_d estimate')\n"
        "if ORACLE:\n"
        "    ax.plot(t, [a - b for a, b in zip(col['Nd_hat'], col['Nd_err'])], '--', label='N_d')\n"
        "ax.set_xlabel('t, s')\n"
        "ax.legend()\n"
        "fig.savefig(os.path.join(HERE, 'fig2_determinant.png'), dpi=150)\n"
        "\n"
        "fig, axes = plt.subplots(len(X), 1, sharex=True, squeeze=False)\n"
        "for a, xi, ri in zip(axes[:, 0], X, XREF):\n"
        "    a.plot(t, col[xi], label=xi)\n"
        "    a.plot(t, col[ri], '--', label=ri)\n"
        "    a.legend()\n"
        "axes[-1, 0].set_xlabel('t, s')\n"
        "fig.savefig(os.path.join(HERE, 'fig3_tracking.png'), dpi=150)\n";
  return py.str();
}

inline void emit_plot_script(const SimTrace& tr, const std::filesystem::path& path,
                             const std::string& csv_name = "trace.csv") {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os << plot_script(tr, csv_name);
  if (!os.flush()) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace idrem
