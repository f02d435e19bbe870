// Copyright 2026 The oodkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oodkit/calibration.hpp"

namespace oodkit {
namespace {

std::vector<double> distinct_scores(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> z(0, 3);
  std::set<double> seen;
  while (seen.size() < n) seen.insert(z(rng));
  std::vector<double> out(seen.begin(), seen.end());
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

double fraction_at_most(const std::vector<double>& s, double t) {
  return static_cast<double>(std::count_if(s.begin(), s.end(), [&](double v) { return v <= t; })) /
         static_cast<double>(s.size());
}

TEST(CalibrationProperty, KeepRateMetAndMinimal) {
  std::mt19937_64 rng(501);
  for (int rep = 0; rep < 200; ++rep) {
    const auto s = distinct_scores(rng, 1 + rep % 150);
    auto sorted = s;
    std::sort(sorted.begin(), sorted.end());
    for (double k : {0.8, 0.99}) {
      const auto t = calibrate(s, k);
      EXPECT_GE(fraction_at_most(s, t.gamma), k);
      EXPECT_EQ(fraction_at_most(s, t.gamma), t.achieved_keep_rate);
      EXPECT_TRUE(std::binary_search(sorted.begin(), sorted.end(), t.gamma));
      const auto it = std::lower_bound(sorted.begin(), sorted.end(), t.gamma);
      if (it != sorted.begin()) EXPECT_LT(fraction_at_most(s, *(it - 1)), k);
    }
  }
}

TEST(CalibrationProperty, MonotoneInKeepRate) {
  std::mt19937_64 rng(502);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  std::uniform_int_distribution<int> coarse(0, 9);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> s(1 + rep % 80);
    for (double& v : s) v = coarse(rng);
    double k1 = u(rng), k2 = u(rng);
    if (k1 > k2) std::swap(k1, k2);
    EXPECT_LE(calibrate(s, k1).gamma, calibrate(s, k2).gamma);
  }
}

TEST(CalibrationProperty, DecisionMatchesKeepSet) {
  std::mt19937_64 rng(503);
  for (int rep = 0; rep < 50; ++rep) {
    const auto s = distinct_scores(rng, 50);
    const auto t = calibrate(s, 0.8);
    std::size_t kept = 0;
    for (double v : s) kept += decide(v, t.gamma) == Label::kIn;
    EXPECT_EQ(static_cast<double>(kept) / s.size(), t.achieved_keep_rate);
  }
}

}  // namespace
}  // namespace oodkit
