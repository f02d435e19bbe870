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

#include "oodkit/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "oodkit/error.hpp"

namespace oodkit {

Threshold calibrate(std::span<const double> in_scores, double keep_rate) {
  if (!(keep_rate > 0.0 && keep_rate < 1.0)) {
    raise(ErrorKind::kParameter, "keep_rate must lie in (0, 1)");
  }
  std::vector<double> sorted;
  sorted.reserve(in_scores.size());
  std::size_t dropped = 0;
  for (double s : in_scores) {
    if (std::isnan(s)) raise(ErrorKind::kInput, "NaN calibration score");
    if (s == std::numeric_limits<double>::infinity()) {
      ++dropped;
      continue;
    }
    sorted.push_back(s);
  }
  if (sorted.empty()) {
    raise(ErrorKind::kInput, "no finite calibration scores");
  }
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());

  // Walk the distinct values upward; count is the number of scores <= value.
  std::size_t i = 0;
  while (true) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double fraction = static_cast<double>(j + 1) / n;
    if (fraction >= keep_rate || j + 1 == sorted.size()) {
      Threshold t;
      t.gamma = sorted[i];
      t.keep_rate_target = keep_rate;
      t.achieved_keep_rate = fraction;
      t.n_calibration = sorted.size();
      t.n_dropped = dropped;
      return t;
    }
    i = j + 1;
  }
}

Label decide(double score, double gamma) {
  return score > gamma ? Label::kOod : Label::kIn;
}

}  // namespace oodkit
