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

#pragma once

#include <algorithm>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "anonfix/errors.hpp"
#include "anonfix/text.hpp"

namespace anonfix::app {

/// One manifest row. Relative paths are resolved against the manifest's
/// directory; optional columns may be missing or empty.
struct PairEntry {
  std::string pair_id;
  std::filesystem::path original;
  std::filesystem::path anonymized;
  std::optional<std::filesystem::path> mask;
  std::optional<std::filesystem::path> landmarks_o;
  std::optional<std::filesystem::path> landmarks_a;
  std::optional<std::filesystem::path> emb_o;
  std::optional<std::filesystem::path> emb_a;
  std::optional<std::filesystem::path> shading_o;
  std::optional<std::filesystem::path> shading_a;
  std::optional<std::string> label_o;
  std::optional<std::string> label_a;
};

inline const std::vector<std::string>& manifest_columns() {
  static const std::vector<std::string> cols = {
      "pair_id",   "original",    "anonymized",  "mask",
      "landmarks_o", "landmarks_a", "emb_o",     "emb_a",
      "shading_o", "shading_a",   "label_o",     "label_a"};
  return cols;
}

/// Header: pair_id,original,anonymized[,mask,landmarks_o,landmarks_a,
/// emb_o,emb_a,shading_o,shading_a,label_o,label_a].
inline std::vector<PairEntry> read_manifest(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  for (const char* required : {"pair_id", "original", "anonymized"}) {
    if (t.column(required) < 0) {
      throw InputError(path.string() + ": manifest lacks column '" +
                       required + "'");
    }
  }
  const auto& known = manifest_columns();
  for (const auto& h : t.header) {
    if (std::find(known.begin(), known.end(), h) == known.end()) {
      throw InputError(path.string() + ": unknown manifest column '" + h +
                       "'");
    }
  }

  const std::filesystem::path base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };

  std::vector<PairEntry> out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string where =
        path.string() + ":" + std::to_string(t.line_numbers[i]);
    if (row.size() != t.header.size()) {
      throw InputError(where + ": expected " +
                       std::to_string(t.header.size()) + " fields, got " +
                       std::to_string(row.size()));
    }
    auto field = [&](const char* name) -> std::optional<std::string> {
      const int c = t.column(name);
      if (c < 0 || row[c].empty()) return std::nullopt;
      return row[c];
    };
    auto path_field = [&](const char* name)
        -> std::optional<std::filesystem::path> {
      auto f = field(name);
      if (!f) return std::nullopt;
      return resolve(*f);
    };

    PairEntry e;
    const auto id = field("pair_id");
    const auto orig = field("original");
    const auto anon = field("anonymized");
    if (!id || !orig || !anon) {
      throw InputError(where + ": pair_id, original and anonymized are required");
    }
    if (!ids.insert(*id).second) {
      throw InputError(where + ": duplicate pair_id '" + *id + "'");
    }
    e.pair_id = *id;
    e.original = resolve(*orig);
    e.anonymized = resolve(*anon);
    e.mask = path_field("mask");
    e.landmarks_o = path_field("landmarks_o");
    e.landmarks_a = path_field("landmarks_a");
    e.emb_o = path_field("emb_o");
    e.emb_a = path_field("emb_a");
    e.shading_o = path_field("shading_o");
    e.shading_a = path_field("shading_a");
    e.label_o = field("label_o");
    e.label_a = field("label_a");
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace anonfix::app
