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

#include <vector>

#include "oodkit/reference.hpp"
#include "oodkit/synth.hpp"

namespace {

// Reference size close to the paper-scale pools (~1.2k bags).
void BM_ProjectionScan(benchmark::State& state) {
  oodkit::SynthConfig config;
  config.vocab_size = static_cast<std::size_t>(state.range(0));
  config.n_in = 1200;
  config.n_out = 1;
  config.embedding_dim = 0;
  config.emit_logits = false;
  const auto samples = oodkit::generate(config);
  const std::vector<oodkit::SampleRecord> in(samples.begin(), samples.begin() + 1200);
  const auto ref = oodkit::build_reference(in, {});
  const auto& query = samples.back();
  const auto spec = oodkit::MeasureSpec::renyi(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(oodkit::project(query, ref, spec));
  state.SetItemsProcessed(state.iterations() * 1200);
}
BENCHMARK(BM_ProjectionScan)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
