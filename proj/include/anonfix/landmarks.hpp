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

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "anonfix/errors.hpp"
#include "anonfix/text.hpp"

namespace anonfix {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

inline constexpr int kLandmarkCount = 68;
inline constexpr int kFirstExpressionLandmark = 17;  // jaw contour is 0..16
inline constexpr int kExpressionLandmarkCount =
    kLandmarkCount - kFirstExpressionLandmark;

/// iBUG-68 points: 0-16 jaw, 17-26 brows, 27-35 nose, 36-47 eyes,
/// 48-67 mouth.
struct LandmarkSet {
  std::array<Point2, kLandmarkCount> points{};
  bool operator==(const LandmarkSet&) const = default;
};

/// iBUG points 17..67 in index order.
struct ExpressionSubset {
  std::array<Point2, kExpressionLandmarkCount> points{};
  bool operator==(const ExpressionSubset&) const = default;
};

namespace detail {

inline Point2 centroid(const LandmarkSet& lms, int first, int last) {
  Point2 c;
  for (int i = first; i <= last; ++i) {
    c.x += lms.points[i].x;
    c.y += lms.points[i].y;
  }
  const double n = last - first + 1;
  return {c.x / n, c.y / n};
}

}  // namespace detail

/// Distance between the centroids of the two eye contours (36-41, 42-47).
inline double interocular_distance(const LandmarkSet& lms) {
  const Point2 right = detail::centroid(lms, 36, 41);
  const Point2 left = detail::centroid(lms, 42, 47);
  const double d = std::hypot(left.x - right.x, left.y - right.y);
  if (!(d >= 1e-9)) {
    throw InputError("degenerate landmarks: coincident eye centroids");
  }
  return d;
}

inline ExpressionSubset expression_subset(const LandmarkSet& lms) {
  ExpressionSubset out;
  for (int i = 0; i < kExpressionLandmarkCount; ++i) {
    out.points[i] = lms.points[kFirstExpressionLandmark + i];
  }
  return out;
}

/**
 * @brief Parses the `idx,x,y` landmark CSV: a header line followed by one
 * row per landmark, each index 0..67 exactly once, in any order.
 */
inline LandmarkSet parse_landmarks(std::istream& in,
                                   const std::string& source = "<stream>") {
  auto fail = [&](const std::string& msg) {
    throw InputError(source + ": " + msg);
  };
  std::string line;
  if (!std::getline(in, line)) fail("empty landmark file");
  const auto header = split_csv_line(line);
  if (header.size() != 3 || header[0] != "idx" || header[1] != "x" ||
      header[2] != "y") {
    fail("expected header 'idx,x,y'");
  }

  LandmarkSet lms;
  std::array<bool, kLandmarkCount> seen{};
  int rows = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      fail("line " + std::to_string(line_no) + ": expected 3 fields");
    }
    const auto idx = parse_int(fields[0]);
    const auto x = parse_double(fields[1]);
    const auto y = parse_double(fields[2]);
    if (!idx) fail("line " + std::to_string(line_no) + ": bad index");
    if (!x || !y || !std::isfinite(*x) || !std::isfinite(*y)) {
      fail("line " + std::to_string(line_no) + ": non-numeric coordinate");
    }
    if (*idx < 0 || *idx >= kLandmarkCount) {
      fail("line " + std::to_string(line_no) + ": index out of range");
    }
    if (seen[*idx]) fail("duplicate landmark index " + std::to_string(*idx));
    seen[*idx] = true;
    lms.points[*idx] = {*x, *y};
    ++rows;
  }
  if (rows != kLandmarkCount) {
    fail("expected 68 landmarks, found " + std::to_string(rows));
  }
  return lms;
}

inline LandmarkSet parse_landmarks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open landmark file '" + path.string() + "'");
  return parse_landmarks(in, path.string());
}

inline void write_landmarks(std::ostream& out, const LandmarkSet& lms) {
  out << "idx,x,y\n";
  for (int i = 0; i < kLandmarkCount; ++i) {
    out << i << ',' << format_double(lms.points[i].x) << ','
        << format_double(lms.points[i].y) << '\n';
  }
}

inline void write_landmarks(const std::filesystem::path& path,
                            const LandmarkSet& lms) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  write_landmarks(out, lms);
}

/// Sidecar convention: `<dir>/<stem>.landmarks.csv` next to the image.
inline std::filesystem::path landmark_sidecar(
    const std::filesystem::path& image) {
  return image.parent_path() / (image.stem().string() + ".landmarks.csv");
}

}  // namespace anonfix
