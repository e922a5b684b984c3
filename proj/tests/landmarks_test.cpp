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


#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "anonfix/errors.hpp"
#include "anonfix/landmarks.hpp"
#include "test_support.hpp"

namespace anonfix {
namespace {

LandmarkSet random_landmarks(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 200.0);
  LandmarkSet l;
  for (auto& p : l.points) p = {u(rng), u(rng)};
  for (int i = 36; i <= 41; ++i) l.points[i].x = 40 + i;   // right eye
  for (int i = 42; i <= 47; ++i) l.points[i].x = 120 + i;  // left eye
  return l;
}

std::string to_csv(const LandmarkSet& l, std::vector<int> order = {}) {
  if (order.empty()) {
    for (int i = 0; i < kLandmarkCount; ++i) order.push_back(i);
  }
  std::ostringstream out;
  out << "idx,x,y\n";
  for (int i : order) {
    out << i << ',' << format_double(l.points[i].x) << ','
        << format_double(l.points[i].y) << '\n';
  }
  return out.str();
}

LandmarkSet parse(const std::string& text) {
  std::istringstream in(text);
  return parse_landmarks(in, "test");
}

std::string parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

TEST(ParseLandmarks, WellFormed) {
  std::mt19937_64 rng(40);
  const LandmarkSet l = random_landmarks(rng);
  EXPECT_EQ(parse(to_csv(l)), l);
}

TEST(ParseLandmarks, ShuffledRowsGiveSameResult) {
  std::mt19937_64 rng(41);
  const LandmarkSet l = random_landmarks(rng);
  std::vector<int> order(kLandmarkCount);
  for (int i = 0; i < kLandmarkCount; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  EXPECT_EQ(parse(to_csv(l, order)), parse(to_csv(l)));
}

TEST(ParseLandmarks, TooFewRows) {
  std::vector<int> order;
  for (int i = 0; i < 67; ++i) order.push_back(i);
  const std::string msg = parse_error(to_csv(LandmarkSet{}, order));
  EXPECT_NE(msg.find("expected 68 landmarks"), std::string::npos) << msg;
  EXPECT_NE(msg.find("found 67"), std::string::npos) << msg;
}

TEST(ParseLandmarks, RejectsMalformedInput) {
  std::mt19937_64 rng(42);
  const std::string good = to_csv(random_landmarks(rng));
  EXPECT_NE(parse_error(good + "3,1,1\n").find("duplicate"), std::string::npos);
  EXPECT_NE(parse_error(good + "68,1,1\n").find("out of range"),
            std::string::npos);
  EXPECT_NE(parse_error("i,x,y\n").find("header"), std::string::npos);
  EXPECT_FALSE(parse_error("").empty());
  std::string bad = good;
  bad.replace(bad.find("\n0,") + 3, 1, "abc");
  EXPECT_NE(parse_error(bad).find("non-numeric"), std::string::npos);
  EXPECT_FALSE(parse_error("idx,x,y\n0,1\n").empty());
  EXPECT_FALSE(parse_error("idx,x,y\n0,nan,1\n").empty());
}

TEST(ParseLandmarks, BlankLinesAndRoundTripThroughFile) {
  std::mt19937_64 rng(43);
  const LandmarkSet l = random_landmarks(rng);
  EXPECT_EQ(parse(to_csv(l) + "\n\n"), l);
  testing::TempDir dir;
  write_landmarks(dir / "a.csv", l);
  EXPECT_EQ(parse_landmarks(dir / "a.csv"), l);
  EXPECT_THROW(parse_landmarks(dir / "missing.csv"), InputError);
}

TEST(LandmarkSidecar, NamingConvention) {
  EXPECT_EQ(landmark_sidecar("/data/p01_orig.png"),
            std::filesystem::path("/data/p01_orig.landmarks.csv"));
  EXPECT_EQ(landmark_sidecar("face.png"),
            std::filesystem::path("face.landmarks.csv"));
}

TEST(InterocularDistance, EyeCentroids) {
  LandmarkSet l;
  for (int i = 36; i <= 41; ++i) l.points[i] = {100.0 + (i % 2 ? 5 : -5), 100};
  for (int i = 42; i <= 47; ++i) l.points[i] = {160, 100.0 + (i % 2 ? 3 : -3)};
  EXPECT_DOUBLE_EQ(interocular_distance(l), 60.0);
  LandmarkSet doubled = l;
  for (auto& p : doubled.points) p = {2 * p.x, 2 * p.y};
  EXPECT_DOUBLE_EQ(interocular_distance(doubled), 120.0);
}

TEST(InterocularDistance, DegenerateThrows) {
  LandmarkSet l;
  for (auto& p : l.points) p = {5, 5};
  EXPECT_THROW(interocular_distance(l), InputError);
}

TEST(ExpressionSubset, DropsJawKeepsOrder) {
  std::mt19937_64 rng(44);
  const LandmarkSet l = random_landmarks(rng);
  const ExpressionSubset s = expression_subset(l);
  ASSERT_EQ(s.points.size(), 51u);
  EXPECT_EQ(s.points.front(), l.points[17]);
  EXPECT_EQ(s.points.back(), l.points[67]);
  for (int i = 0; i < 51; ++i) EXPECT_EQ(s.points[i], l.points[17 + i]);
  for (int j = 0; j <= 16; ++j) {
    EXPECT_EQ(std::count(s.points.begin(), s.points.end(), l.points[j]), 0)
        << "jaw point " << j;
  }
}

}  // namespace
}  // namespace anonfix
