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
#include <limits>
#include <random>

#include "oodkit/reference.hpp"
#include "support/oracles.hpp"
#include "support/samples.hpp"

namespace oodkit {
namespace {

std::vector<SampleRecord> random_samples(std::mt19937_64& rng, std::size_t count,
                                         std::size_t vocab, bool coarse) {
  std::vector<SampleRecord> out;
  std::uniform_int_distribution<int> steps(1, 4);
  std::uniform_int_distribution<int> cell(0, 2);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<std::vector<double>> probs;
    for (int t = steps(rng); t > 0; --t) {
      if (coarse) {
        // Few distinct bags so that ties in the argmin occur.
        std::vector<double> p(vocab, 0.0);
        p[cell(rng)] = 0.5;
        p[vocab - 1] += 0.5;
        probs.push_back(p);
      } else {
        probs.push_back(oracle::random_simplex(vocab, rng, 0.001));
      }
    }
    out.push_back(testing::from_probs(probs, "r" + std::to_string(i)));
  }
  return out;
}

std::vector<MeasureSpec> specs() {
  return {MeasureSpec::kl(), MeasureSpec::renyi(0.1), MeasureSpec::renyi(2.0),
          MeasureSpec::fisher_rao()};
}

TEST(ReferenceProperty, ProjectionEqualsBruteForce) {
  std::mt19937_64 rng(401);
  for (int rep = 0; rep < 40; ++rep) {
    const bool coarse = rep % 2 == 0;
    const auto refs = random_samples(rng, 1 + rep * 2 % 100, 6, coarse);
    const auto ref = build_reference(refs);
    const auto query = random_samples(rng, 1, 6, coarse).front();
    const auto qbag = bag_of_distributions(step_distributions(query, 1.0));
    for (const auto& spec : specs()) {
      const auto got = project(query, ref, spec);
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t r = 0; r < ref.size(); ++r) {
        const double v = measure(ref.bags()[r].bag, qbag, spec);
        EXPECT_LE(got.score, v);
        if (r == 0 || v < best) {
          best = v;
          arg = r;
        }
      }
      EXPECT_EQ(got.score, best);
      EXPECT_EQ(got.nearest_index, arg);
      EXPECT_EQ(got.nearest_id, ref.bags()[arg].source_id);
    }
  }
}

TEST(ReferenceProperty, AddingBagNeverIncreasesScore) {
  std::mt19937_64 rng(402);
  for (int rep = 0; rep < 30; ++rep) {
    auto refs = random_samples(rng, 5, 8, false);
    const auto query = random_samples(rng, 1, 8, false).front();
    for (const auto& spec : specs()) {
      double prev = project(query, build_reference(refs), spec).score;
      auto grown = refs;
      for (int k = 0; k < 5; ++k) {
        grown.push_back(random_samples(rng, 1, 8, false).front());
        const double now = project(query, build_reference(grown), spec).score;
        EXPECT_LE(now, prev);
        prev = now;
      }
    }
  }
}

TEST(ReferenceProperty, PermutationInvariantScores) {
  std::mt19937_64 rng(403);
  for (int rep = 0; rep < 30; ++rep) {
    auto refs = random_samples(rng, 20, 5, rep % 2 == 0);
    const auto query = random_samples(rng, 1, 5, false).front();
    const auto a = build_reference(refs);
    std::shuffle(refs.begin(), refs.end(), rng);
    const auto b = build_reference(refs);
    for (const auto& spec : specs()) {
      EXPECT_EQ(project(query, a, spec).score, project(query, b, spec).score);
    }
  }
}

TEST(ReferenceProperty, MahalanobisRange) {
  std::mt19937_64 rng(404);
  std::normal_distribution<double> z(0, 1);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t dim = 1 + rep % 6;
    std::vector<SampleRecord> v;
    for (int i = 0; i < 20; ++i) {
      auto s = testing::from_probs({{0.5, 0.5}}, "e" + std::to_string(i));
      std::vector<double> e(dim);
      for (double& x : e) x = z(rng);
      s.embedding = e;
      v.push_back(s);
    }
    const auto ref = build_reference(v, {true, 0.01, 1.0});
    auto probe = v[0];
    probe.embedding = ref.maha()->mean;
    EXPECT_EQ(score_mahalanobis(probe, ref).raw_score, 1.0);
    for (int k = 0; k < 20; ++k) {
      auto e = ref.maha()->mean;
      for (double& x : e) x += z(rng);
      probe.embedding = e;
      const double raw = score_mahalanobis(probe, ref).raw_score;
      EXPECT_GT(raw, 0.0);
      EXPECT_LT(raw, 1.0);
    }
    // Symmetric inverse, as promised by the reference set invariant.
    const auto& m = ref.maha()->inverse_covariance;
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) EXPECT_EQ(m[i * dim + j], m[j * dim + i]);
    }
  }
}

}  // namespace
}  // namespace oodkit
