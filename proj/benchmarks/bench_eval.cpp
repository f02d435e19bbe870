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


#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "oodkit/eval.hpp"

namespace {

void BM_Auroc(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> in(0.0, 1.0);
  std::normal_distribution<double> out(1.0, 1.0);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<oodkit::LabeledScore> scores;
  scores.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    scores.push_back({"", in(rng), oodkit::Label::kIn, {}});
    scores.push_back({"", out(rng), oodkit::Label::kOod, {}});
  }
  for (auto _ : state) benchmark::DoNotOptimize(oodkit::auroc(scores));
  state.SetItemsProcessed(state.iterations() * 2 * state.range(0));
}
BENCHMARK(BM_Auroc)->Arg(1000)->Arg(100000);

}  // namespace
