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

// Information measures between discrete distributions over the same
// vocabulary. Natural logarithms throughout. Divergences return +inf when
// the second argument has a zero where the first does not (and alpha > 1 for
// Renyi); that value is meaningful and is never smoothed away.
//
// When both inputs are sparse the unlisted tokens are handled in closed form
// (count x per-token term), which equals the densified computation.

#ifndef OODKIT_MEASURES_HPP_
#define OODKIT_MEASURES_HPP_

#include <string>

#include "oodkit/distrib.hpp"

namespace oodkit {

enum class MeasureKind { kRenyi, kKl, kFisherRao };

struct MeasureSpec {
  MeasureKind kind = MeasureKind::kKl;
  double alpha = 0.5;  // used only for kRenyi

  static MeasureSpec renyi(double alpha);
  static MeasureSpec kl() { return {MeasureKind::kKl, 0.5}; }
  static MeasureSpec fisher_rao() { return {MeasureKind::kFisherRao, 0.5}; }

  // Throws a parameter error for alpha <= 0, alpha == 1 or non-finite alpha.
  void check() const;

  friend bool operator==(const MeasureSpec&, const MeasureSpec&) = default;
};

// "renyi(0.5)", "kl", "fisher_rao".
std::string to_string(const MeasureSpec& spec);

// D_alpha(p || q) = 1/(alpha-1) * log sum_i p_i^alpha q_i^(1-alpha).
double renyi_divergence(const TokenDistribution& p, const TokenDistribution& q,
                        double alpha);

double kl_divergence(const TokenDistribution& p, const TokenDistribution& q);

// (2/pi) * arccos(sum_i sqrt(p_i q_i)), in [0, 1].
double fisher_rao(const TokenDistribution& p, const TokenDistribution& q);

double measure(const TokenDistribution& p, const TokenDistribution& q,
               const MeasureSpec& spec);

// measure(p || uniform).
double negentropy(const TokenDistribution& p, const MeasureSpec& spec);

}  // namespace oodkit

#endif  // OODKIT_MEASURES_HPP_
