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

#include "oodkit/detectors.hpp"
#include "oodkit/eval.hpp"
#include "oodkit/io.hpp"
#include "oodkit/synth.hpp"

namespace oodkit {
namespace {

double negentropy_auroc(const SynthConfig& c) {
  const auto samples = generate(c);
  DetectorConfig d;
  d.kind = DetectorKind::kNegentropy;
  d.measure = MeasureSpec::kl();
  const auto scores = score_batch(samples, d);
  std::vector<LabeledScore> v;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    v.push_back({scores[i].id, scores[i].anomaly_score, samples[i].label, {}});
  }
  return auroc(v);
}

TEST(SynthProperty, GeneratedRecordsPassValidation) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SynthConfig c;
    c.seed = seed;
    c.n_in = 10;
    c.n_out = 10;
    c.steps_min = 1;
    c.steps_max = 12;
    for (const auto& s : generate(c)) {
      EXPECT_NO_THROW(validate_sample(s));
      EXPECT_EQ(parse_sample(format_sample(s)), s);
    }
  }
}

TEST(SynthProperty, SwappingScalesMirrorsSeparation) {
  for (double weak : {0.8, 1.0}) {
    SynthConfig c;
    c.n_in = 500;
    c.n_out = 500;
    c.in_logit_scale = 1.2;
    c.out_logit_scale = weak;
    auto swapped = c;
    std::swap(swapped.in_logit_scale, swapped.out_logit_scale);
    EXPECT_NEAR(negentropy_auroc(c) + negentropy_auroc(swapped), 1.0, 0.02) << weak;
  }
}

}  // namespace
}  // namespace oodkit
