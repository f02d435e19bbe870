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

#include "oodkit/measures.hpp"

namespace {

using oodkit::MeasureSpec;
using oodkit::TokenDistribution;

std::vector<double> random_simplex(std::size_t n, std::mt19937_64& rng) {
  std::exponential_distribution<double> draw(1.0);
  std::vector<double> p(n);
  double total = 0.0;
  for (double& v : p) total += (v = draw(rng));
  for (double& v : p) v /= total;
  return p;
}

void BM_RenyiDense(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = TokenDistribution::dense(random_simplex(n, rng));
  const auto q = TokenDistribution::dense(random_simplex(n, rng));
  const auto spec = MeasureSpec::renyi(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(oodkit::measure(p, q, spec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RenyiDense)->Arg(1000)->Arg(32000);

void BM_RenyiSparseTopK(benchmark::State& state) {
  std::mt19937_64 rng(2);
  constexpr std::size_t kVocab = 32000;
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto p = oodkit::sparsify_topk(TokenDistribution::dense(random_simplex(kVocab, rng)), k);
  const auto q = oodkit::sparsify_topk(TokenDistribution::dense(random_simplex(kVocab, rng)), k);
  const auto spec = MeasureSpec::renyi(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(oodkit::measure(p, q, spec));
}
BENCHMARK(BM_RenyiSparseTopK)->Arg(50)->Arg(500);

void BM_FisherRaoDense(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = TokenDistribution::dense(random_simplex(n, rng));
  const auto q = TokenDistribution::dense(random_simplex(n, rng));
  for (auto _ : state) {
    benchmark::DoNotOptimize(oodkit::measure(p, q, MeasureSpec::fisher_rao()));
  }
}
BENCHMARK(BM_FisherRaoDense)->Arg(1000)->Arg(32000);

}  // namespace
