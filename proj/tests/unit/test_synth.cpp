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

#include <cmath>

#include "oodkit/detectors.hpp"
#include "oodkit/error.hpp"
#include "oodkit/eval.hpp"
#include "oodkit/io.hpp"
#include "oodkit/synth.hpp"

namespace oodkit {
namespace {

SynthConfig small() {
  SynthConfig c;
  c.n_in = 20;
  c.n_out = 20;
  c.vocab_size = 30;
  return c;
}

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

TEST(Synth, SameSeedSameCorpus) {
  const auto a = generate(small());
  const auto b = generate(small());
  EXPECT_EQ(a, b);
  std::string ta, tb;
  for (const auto& s : a) ta += format_sample(s);
  for (const auto& s : b) tb += format_sample(s);
  EXPECT_EQ(ta, tb);
  auto other = small();
  other.seed = 43;
  EXPECT_NE(generate(other), a);
}

TEST(Synth, IdsLabelsAndShapes) {
  auto c = small();
  c.steps_min = 2;
  c.steps_max = 6;
  const auto v = generate(c);
  ASSERT_EQ(v.size(), 40u);
  EXPECT_EQ(v[0].id, "in-000000");
  EXPECT_EQ(v[20].id, "ood-000000");
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_EQ(v[i].label, i < 20 ? Label::kIn : Label::kOod);
    EXPECT_GE(v[i].steps.size(), 2u);
    EXPECT_LE(v[i].steps.size(), 6u);
    EXPECT_EQ(v[i].embedding->size(), c.embedding_dim);
    EXPECT_TRUE(v[i].quality.contains("quality"));
    EXPECT_NO_THROW(validate_sample(v[i]));
  }
}

TEST(Synth, ChosenLogprobMatchesDistribution) {
  for (const auto& s : generate(small())) {
    for (const auto& step : s.steps) {
      const auto p = step.distribution->probs();
      bool found = false;
      for (double v : p) found = found || std::log(v) == *step.chosen_logprob;
      EXPECT_TRUE(found);
    }
  }
}

TEST(Synth, PinnedGenerator) {
  // The stream is fully determined by the standard engine and seed_seq.
  std::seed_seq seq{42u, 0u, 0u, 7u, 0u};
  std::mt19937_64 engine(seq);
  SynthRng rng(42, 0, 7);
  const auto first = engine();
  EXPECT_EQ(rng.uniform(), static_cast<double>(first >> 11) * 0x1.0p-53);
}

TEST(Synth, NormalMoments) {
  SynthRng rng(1, 0, 0);
  double sum = 0, sq = 0;
  constexpr int kN = 200000;
  for (int i = 0; i < kN; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / kN, 0.0, 0.01);
  EXPECT_NEAR(sq / kN, 1.0, 0.01);
}

TEST(Synth, ConfigParsing) {
  const auto c = parse_synth_config(
      R"({"seed":7,"vocab_size":50,"n_in":3,"n_out":4,"steps_per_sample":[2,5],)"
      R"("embedding_shift":[1,2],"embedding_dim":2,"quality_model":{"in_mean":1,"out_mean":0,"noise_sd":0.5}})");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.steps_min, 2u);
  EXPECT_EQ(c.steps_max, 5u);
  EXPECT_EQ(c.quality.noise_sd, 0.5);
  EXPECT_EQ(parse_synth_config(synth_config_to_json(c)).embedding_shift, c.embedding_shift);
  EXPECT_THROW(parse_synth_config(R"({"n_in":0})"), Error);
  EXPECT_THROW(parse_synth_config(R"({"in_logit_scale":-1})"), Error);
  EXPECT_THROW(parse_synth_config("{"), Error);
}

TEST(Synth, NullConfigIsIndistinguishable) {
  SynthConfig c;
  c.n_in = 500;
  c.n_out = 500;
  c.out_logit_scale = c.in_logit_scale;
  c.embedding_shift = {0.0};
  EXPECT_NEAR(negentropy_auroc(c), 0.5, 0.05);
}

TEST(Synth, PeakedVersusFlatSeparates) {
  // Peaked IN has larger negentropy; with the default orientation OOD
  // therefore ranks lower and the AUROC sits near 0, not 1.
  const double a = negentropy_auroc(SynthConfig{});
  EXPECT_LE(std::min(a, 1.0 - a), 0.01);
}

}  // namespace
}  // namespace oodkit
