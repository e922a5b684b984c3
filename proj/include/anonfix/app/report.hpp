// Copyright 2026 The anonfix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Tabular views of one or more report files: one row per run, one column
// per metric.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "anonfix/app/evaluate.hpp"
#include "anonfix/errors.hpp"
#include "anonfix/text.hpp"

namespace anonfix::app {

enum class ReportFormat { kCsv, kJson, kMarkdown };

inline ReportFormat parse_report_format(const std::string& s) {
  if (s == "csv") return ReportFormat::kCsv;
  if (s == "json") return ReportFormat::kJson;
  if (s == "md" || s == "markdown") return ReportFormat::kMarkdown;
  throw InputError("unknown report format '" + s + "' (csv, json, md)");
}

inline nlohmann::json load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open report '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": malformed report: " + e.what());
  }
  if (!j.is_object() || !j.contains("aggregates") ||
      !j["aggregates"].is_object() || !j.contains("run_name")) {
    throw InputError(path.string() + ": not an anonfix report");
  }
  return j;
}

struct ReportColumns {
  std::vector<std::string> aggregated;  // mean +- std over pairs
  std::vector<std::string> dataset;     // single dataset-level value
};

inline ReportColumns report_columns(const std::vector<nlohmann::json>& runs) {
  ReportColumns cols;
  for (const auto& name : pair_metric_names()) {
    for (const auto& r : runs) {
      if (r["aggregates"].contains(name)) {
        cols.aggregated.push_back(name);
        break;
      }
    }
  }
  for (const auto& name : dataset_metric_names()) {
    for (const auto& r : runs) {
      if (r.contains("dataset") && r["dataset"].contains(name)) {
        cols.dataset.push_back(name);
        break;
      }
    }
  }
  return cols;
}

namespace detail {

inline std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline std::string render_report(const std::vector<nlohmann::json>& runs,
                                 ReportFormat format) {
  const ReportColumns cols = report_columns(runs);
  std::ostringstream out;

  switch (format) {
    case ReportFormat::kCsv: {
      out << "run";
      for (const auto& m : cols.aggregated) {
        out << ',' << m << "_mean," << m << "_std," << m << "_count";
      }
      for (const auto& m : cols.dataset) out << ',' << m;
      out << '\n';
      for (const auto& r : runs) {
        out << detail::csv_escape(r["run_name"].get<std::string>());
        for (const auto& m : cols.aggregated) {
          if (r["aggregates"].contains(m)) {
            const auto& a = r["aggregates"][m];
            out << ',' << format_double(a["mean"].get<double>()) << ','
                << format_double(a["std"].get<double>()) << ','
                << a["count"].get<std::size_t>();
          } else {
            out << ",,,";
          }
        }
        for (const auto& m : cols.dataset) {
          out << ',';
          if (r["dataset"].contains(m)) {
            out << format_double(r["dataset"][m].get<double>());
          }
        }
        out << '\n';
      }
      break;
    }
    case ReportFormat::kMarkdown: {
      out << "| run |";
      for (const auto& m : cols.aggregated) out << ' ' << m << " |";
      for (const auto& m : cols.dataset) out << ' ' << m << " |";
      out << "\n|---|";
      for (std::size_t i = 0; i < cols.aggregated.size() + cols.dataset.size();
           ++i) {
        out << "---|";
      }
      out << '\n';
      for (const auto& r : runs) {
        out << "| " << r["run_name"].get<std::string>() << " |";
        for (const auto& m : cols.aggregated) {
          if (r["aggregates"].contains(m)) {
            const auto& a = r["aggregates"][m];
            out << ' ' << detail::short_number(a["mean"].get<double>())
                << " ± " << detail::short_number(a["std"].get<double>())
                << " |";
          } else {
            out << " - |";
          }
        }
        for (const auto& m : cols.dataset) {
          if (r["dataset"].contains(m)) {
            out << ' ' << detail::short_number(r["dataset"][m].get<double>())
                << " |";
          } else {
            out << " - |";
          }
        }
        out << '\n';
      }
      break;
    }
    case ReportFormat::kJson: {
      nlohmann::json table;
      nlohmann::json columns = nlohmann::json::array();
      for (const auto& m : cols.aggregated) columns.push_back(m);
      for (const auto& m : cols.dataset) columns.push_back(m);
      table["columns"] = std::move(columns);
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& r : runs) {
        nlohmann::json row;
        row["run"] = r["run_name"];
        for (const auto& m : cols.aggregated) {
          if (r["aggregates"].contains(m)) row[m] = r["aggregates"][m];
        }
        for (const auto& m : cols.dataset) {
          if (r["dataset"].contains(m)) row[m] = r["dataset"][m];
        }
        rows.push_back(std::move(row));
      }
      table["rows"] = std::move(rows);
      out << table.dump(2) << '\n';
      break;
    }
  }
  return out.str();
}

}  // namespace anonfix::app
