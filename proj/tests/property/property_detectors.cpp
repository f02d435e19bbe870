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

#include <bit>
#include <cmath>
#include <map>
#include <random>

#include "oodkit/detectors.hpp"
#include "oodkit/synth.hpp"
#include "support/oracles.hpp"

namespace oodkit {
namespace {

// Random sample with probs, logits and chosen log-probs on every step.
SampleRecord random_sample(std::mt19937_64& rng, std::size_t vocab, std::size_t steps,
                           std::string id) {
  std::normal_distribution<double> z(0.0, 2.0);
  std::uniform_int_distribution<std::size_t> pick(0, vocab - 1);
  SampleRecord s;
  s.id = std::move(id);
  for (std::size_t t = 0; t < steps; ++t) {
    std::vector<double> f(vocab);
    for (double& v : f) v = z(rng);
    StepRecord step;
    step.logits = LogitVector(f);
    step.distribution = softmax_with_temperature(*step.logits, 1.0);
    step.chosen_logprob = std::log(step.distribution->probs()[pick(rng)]);
    s.steps.push_back(std::move(step));
  }
  s.quality["q"] = z(rng);
  return s;
}

std::vector<DetectorConfig> all_sequence_detectors() {
  std::vector<DetectorConfig> out;
  for (auto spec : {MeasureSpec::kl(), MeasureSpec::renyi(0.5), MeasureSpec::fisher_rao()}) {
    DetectorConfig c;
    c.kind = DetectorKind::kNegentropy;
    c.measure = spec;
    out.push_back(c);
  }
  for (auto kind : {DetectorKind::kLikelihood, DetectorKind::kMsp, DetectorKind::kEnergy}) {
    DetectorConfig c;
    c.kind = kind;
    out.push_back(c);
  }
  DetectorConfig hot;
  hot.kind = DetectorKind::kNegentropy;
  hot.temperature = 2.0;
  out.push_back(hot);
  return out;
}

TEST(DetectorProperty, DuplicatingStepsLeavesScoresUnchanged) {
  std::mt19937_64 rng(301);
  for (int rep = 0; rep < 50; ++rep) {
    const auto s = random_sample(rng, 2 + rep % 20, 1 + rep % 7, "x");
    auto twice = s;
    twice.steps.clear();
    for (const auto& step : s.steps) {
      twice.steps.push_back(step);
      twice.steps.push_back(step);
    }
    for (const auto& c : all_sequence_detectors()) {
      const double a = score_sample(s, c).anomaly_score;
      EXPECT_NEAR(score_sample(twice, c).anomaly_score, a, 1e-12 * (1 + std::abs(a)))
          << detector_name(c);
    }
  }
}

TEST(DetectorProperty, OneHotStepsMinimizeMspAnomaly) {
  std::mt19937_64 rng(302);
  DetectorConfig c;
  c.kind = DetectorKind::kMsp;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rep % 10;
    const std::size_t steps = 1 + rep % 5;
    const auto s = random_sample(rng, n, steps, "x");
    auto hot = s;
    for (auto& step : hot.steps) {
      std::vector<double> p(n, 0.0);
      p[rep % n] = 1.0;
      step.distribution = TokenDistribution::dense(p);
      step.logits.reset();
    }
    EXPECT_EQ(score_sample(hot, c).anomaly_score, -1.0);
    EXPECT_GE(score_sample(s, c).anomaly_score, -1.0);
  }
}

TEST(DetectorProperty, NegentropyBounds) {
  std::mt19937_64 rng(303);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + rep % 40;
    const auto s = random_sample(rng, n, 1 + rep % 6, "x");
    const double kl = score_negentropy(s, MeasureSpec::kl(), 1.0).raw_score;
    EXPECT_GE(kl, 0.0);
    EXPECT_LE(kl, std::log(static_cast<double>(n)) + 1e-12);
    const double fr = score_negentropy(s, MeasureSpec::fisher_rao(), 1.0).raw_score;
    EXPECT_GE(fr, 0.0);
    EXPECT_LE(fr, 1.0);
  }
}

TEST(DetectorProperty, BitIdenticalRescoring) {
  std::mt19937_64 rng(304);
  for (int rep = 0; rep < 30; ++rep) {
    const auto s = random_sample(rng, 30, 5, "x");
    for (const auto& c : all_sequence_detectors()) {
      EXPECT_EQ(std::bit_cast<std::uint64_t>(score_sample(s, c).raw_score),
                std::bit_cast<std::uint64_t>(score_sample(s, c).raw_score));
    }
  }
}

TEST(DetectorProperty, EnergyShiftCovariance) {
  std::mt19937_64 rng(305);
  std::uniform_real_distribution<double> shift(-20, 20);
  for (int rep = 0; rep < 200; ++rep) {
    const auto s = random_sample(rng, 2 + rep % 30, 1 + rep % 5, "x");
    const double c = shift(rng);
    auto moved = s;
    for (auto& step : moved.steps) {
      auto f = std::vector<double>(step.logits->values().begin(), step.logits->values().end());
      for (double& v : f) v += c;
      step.logits = LogitVector(f);
    }
    for (double t : {1.0, 0.5, 3.0}) {
      EXPECT_NEAR(score_energy(moved, t).raw_score, score_energy(s, t).raw_score - c, 1e-9);
    }
  }
}

TEST(DetectorProperty, BatchMatchesSingleAndPermutes) {
  std::mt19937_64 rng(306);
  std::vector<SampleRecord> v;
  for (int i = 0; i < 60; ++i) v.push_back(random_sample(rng, 25, 4, "s" + std::to_string(i)));
  for (const auto& c : all_sequence_detectors()) {
    const auto serial = score_batch(v, c, nullptr, 1);
    const auto parallel = score_batch(v, c, nullptr, 4);
    ASSERT_EQ(serial.size(), v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      EXPECT_EQ(serial[i].id, v[i].id);
      EXPECT_EQ(serial[i].raw_score, score_sample(v[i], c).raw_score);
      EXPECT_EQ(parallel[i].raw_score, serial[i].raw_score);
    }
    auto permuted = v;
    std::shuffle(permuted.begin(), permuted.end(), rng);
    const auto shuffled = score_batch(permuted, c, nullptr, 3);
    std::map<std::string, double> by_id;
    for (const auto& s : serial) by_id[s.id] = s.raw_score;
    for (std::size_t i = 0; i < permuted.size(); ++i) {
      EXPECT_EQ(shuffled[i].id, permuted[i].id);
      EXPECT_EQ(shuffled[i].raw_score, by_id.at(permuted[i].id));
    }
  }
}

TEST(DetectorProperty, OrientationContract) {
  std::mt19937_64 rng(307);
  const auto s = random_sample(rng, 10, 3, "x");
  for (auto c : all_sequence_detectors()) {
    for (std::optional<bool> neg : {std::optional<bool>{}, std::optional<bool>{true},
                                    std::optional<bool>{false}}) {
      c.negate_override = neg;
      const auto r = score_sample(s, c);
      EXPECT_EQ(r.anomaly_score, c.negate_raw() ? -r.raw_score : r.raw_score);
    }
  }
}

}  // namespace
}  // namespace oodkit
