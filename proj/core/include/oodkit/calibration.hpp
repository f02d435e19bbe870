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

#ifndef OODKIT_CALIBRATION_HPP_
#define OODKIT_CALIBRATION_HPP_

#include <cstddef>
#include <span>

#include "oodkit/distrib.hpp"

namespace oodkit {

inline constexpr double kDefaultKeepRate = 0.80;

struct Threshold {
  double gamma = 0.0;
  double keep_rate_target = kDefaultKeepRate;
  // Fraction of the finite calibration scores that satisfy score <= gamma.
  double achieved_keep_rate = 0.0;
  std::size_t n_calibration = 0;  // finite scores used
  std::size_t n_dropped = 0;      // +inf scores removed before calibration
};

// gamma is the smallest observed score s with fraction{a <= s} >= keep_rate.
// +inf scores are dropped first; NaN is rejected.
Threshold calibrate(std::span<const double> in_scores,
                    double keep_rate = kDefaultKeepRate);

// OOD iff score > gamma.
Label decide(double score, double gamma);

}  // namespace oodkit

#endif  // OODKIT_CALIBRATION_HPP_
