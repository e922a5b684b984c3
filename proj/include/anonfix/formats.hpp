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

// Readers and writers for the externally produced metric inputs:
// identity embeddings, deep-feature matrices, detection records and
// emotion labels.

#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "anonfix/errors.hpp"
#include "anonfix/metrics.hpp"
#include "anonfix/text.hpp"

namespace anonfix {

/// Whitespace-separated reals, one vector per file.
inline EmbeddingVector parse_embedding(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open embedding '" + path.string() + "'");
  EmbeddingVector e;
  std::string token;
  while (in >> token) {
    const auto v = parse_double(token);
    if (!v || !std::isfinite(*v)) {
      throw InputError(path.string() + ": non-numeric embedding value '" +
                       token + "'");
    }
    e.values.push_back(*v);
  }
  if (e.values.empty()) throw InputError(path.string() + ": empty embedding");
  return e;
}

inline void write_embedding(const std::filesystem::path& path,
                            const EmbeddingVector& e) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  for (std::size_t i = 0; i < e.values.size(); ++i) {
    out << (i ? " " : "") << format_double(e.values[i]);
  }
  out << '\n';
}

/// Headerless CSV, one sample per row.
inline FeatureMatrix parse_feature_matrix(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path, /*has_header=*/false);
  if (t.rows.empty()) throw InputError(path.string() + ": no feature rows");
  const std::size_t d = t.rows.front().size();
  FeatureMatrix m(static_cast<Eigen::Index>(t.rows.size()),
                  static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.rows[i].size() != d) {
      throw InputError(path.string() + ":" +
                       std::to_string(t.line_numbers[i]) +
                       ": ragged feature row");
    }
    for (std::size_t j = 0; j < d; ++j) {
      const auto v = parse_double(t.rows[i][j]);
      if (!v || !std::isfinite(*v)) {
        throw InputError(path.string() + ":" +
                         std::to_string(t.line_numbers[i]) +
                         ": non-numeric feature");
      }
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *v;
    }
  }
  return m;
}

inline void write_feature_matrix(const std::filesystem::path& path,
                                 const FeatureMatrix& m) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << (j ? "," : "") << format_double(m(i, j));
    }
    out << '\n';
  }
}

/// `image_id,detected` with detected in {0,1}.
inline std::vector<DetectionRecord> parse_detections(
    const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const int id_col = t.column("image_id");
  const int det_col = t.column("detected");
  if (id_col < 0 || det_col < 0) {
    throw InputError(path.string() + ": expected header 'image_id,detected'");
  }
  std::vector<DetectionRecord> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const auto flag = row.size() == t.header.size()
                          ? parse_int(row[det_col])
                          : std::nullopt;
    if (!flag || (*flag != 0 && *flag != 1)) {
      throw InputError(path.string() + ":" +
                       std::to_string(t.line_numbers[i]) +
                       ": detected must be 0 or 1");
    }
    out.push_back({row[id_col], *flag == 1});
  }
  return out;
}

/// `image_id,label`; labels are opaque strings.
inline std::map<std::string, std::string> parse_labels(
    const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const int id_col = t.column("image_id");
  const int label_col = t.column("label");
  if (id_col < 0 || label_col < 0) {
    throw InputError(path.string() + ": expected header 'image_id,label'");
  }
  std::map<std::string, std::string> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    if (row.size() != t.header.size()) {
      throw InputError(path.string() + ":" +
                       std::to_string(t.line_numbers[i]) +
                       ": wrong field count");
    }
    if (!out.emplace(row[id_col], row[label_col]).second) {
      throw InputError(path.string() + ": duplicate image_id '" +
                       row[id_col] + "'");
    }
  }
  return out;
}

}  // namespace anonfix
