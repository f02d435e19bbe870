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

#include <random>

#include "oodkit/io.hpp"
#include "oodkit/synth.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

namespace oodkit {
namespace {

// Random records mixing dense, sparse, logits, embeddings and tricky reals.
std::vector<SampleRecord> random_records(std::mt19937_64& rng, std::size_t count) {
  const std::size_t vocab = 9;
  std::normal_distribution<double> z(0, 5);
  std::vector<SampleRecord> out;
  for (std::size_t i = 0; i < count; ++i) {
    SampleRecord s;
    s.id = "rec-" + std::to_string(i) + (i % 3 ? "" : "\"quoted\"");
    s.label = static_cast<Label>(i % 3);
    for (std::size_t t = 0; t <= i % 4; ++t) {
      StepRecord step;
      switch ((i + t) % 3) {
        case 0: {
          step.logits = LogitVector({z(rng), z(rng), z(rng), z(rng), z(rng), z(rng), z(rng),
                                     z(rng), z(rng)});
          step.distribution = softmax_with_temperature(*step.logits, 1.0);
          break;
        }
        case 1:
          step.distribution = TokenDistribution::dense(oracle::random_simplex(vocab, rng));
          break;
        default:
          step.distribution = sparsify_topk(
              TokenDistribution::dense(oracle::random_simplex(vocab, rng)), 1 + t);
      }
      if (t % 2 == 0) step.chosen_logprob = -std::abs(z(rng)) * 1e-3;
      s.steps.push_back(std::move(step));
    }
    s.embedding = std::vector<double>{z(rng), 1e-300, -0.0 + z(rng)};
    if (i % 2) s.quality = {{"bleu", z(rng)}, {"comet", 1.0 / 3.0}};
    out.push_back(std::move(s));
  }
  return out;
}

TEST(IoProperty, SampleRoundTripIsIdentity) {
  std::mt19937_64 rng(701);
  testing::TempDir dir;
  for (int rep = 0; rep < 10; ++rep) {
    const auto v = random_records(rng, 30);
    save_samples(v, dir.file("s.jsonl"));
    EXPECT_EQ(load_samples(dir.file("s.jsonl")), v);
  }
}

TEST(IoProperty, StreamingVisitsEachLineOnce) {
  std::mt19937_64 rng(702);
  testing::TempDir dir;
  const auto v = random_records(rng, 25);
  save_samples(v, dir.file("s.jsonl"));
  SampleReader reader(dir.file("s.jsonl"));
  std::size_t n = 0;
  while (auto s = reader.next()) {
    ++n;
    EXPECT_EQ(reader.line_number(), n);
    EXPECT_EQ(*s, v[n - 1]);
  }
  EXPECT_EQ(n, v.size());
  EXPECT_FALSE(reader.next());
}

TEST(IoProperty, ReferenceRoundTripWithinTolerance) {
  SynthConfig c;
  c.n_in = 30;
  c.n_out = 5;
  c.vocab_size = 40;
  const auto samples = generate(c);
  const std::vector<SampleRecord> in(samples.begin(), samples.begin() + 30);
  const auto ref = build_reference(in, {true, 0.01, 1.0});
  const auto back = parse_reference(format_reference(ref));
  ASSERT_EQ(back.size(), ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_EQ(back.bags()[i], ref.bags()[i]);
  const auto& a = ref.maha()->inverse_covariance;
  const auto& b = back.maha()->inverse_covariance;
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
  for (const auto& s : samples) {
    EXPECT_EQ(project(s, back, MeasureSpec::renyi(0.1)).score,
              project(s, ref, MeasureSpec::renyi(0.1)).score);
  }
}

TEST(IoProperty, RenderingIsDeterministic) {
  std::mt19937_64 rng(703);
  const auto v = random_records(rng, 15);
  std::string a, b;
  for (const auto& s : v) a += format_sample(s);
  for (const auto& s : v) b += format_sample(s);
  EXPECT_EQ(a, b);
}

}  // namespace
}  // namespace oodkit
