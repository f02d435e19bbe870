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

// Deterministic synthetic IN/OOD corpora.
//
// Each sample owns an independent std::mt19937_64 stream seeded through
// std::seed_seq{seed_lo32, seed_hi32, class_tag, index_lo32, index_hi32}
// (class_tag 0 = IN, 1 = OOD). Both are fully specified by the C++ standard.
// Uniform doubles are (engine() >> 11) * 2^-53; normals use the Box-Muller
// transform on two such uniforms (u1 shifted into (0, 1]), consuming the
// cosine branch first and the sine branch on the next call.
//
// Per sample, in order: one uniform for the step count (only when
// steps_min < steps_max); for each step, vocab_size logits ~ N(0, scale^2)
// followed by one uniform that picks the chosen token by inverse CDF; then
// embedding_dim normals (mean = class shift); then one quality normal.

#ifndef OODKIT_SYNTH_HPP_
#define OODKIT_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "oodkit/distrib.hpp"

namespace oodkit {

struct QualityModel {
  double in_mean = 50.0;
  double out_mean = 25.0;
  double noise_sd = 5.0;
};

struct SynthConfig {
  std::uint64_t seed = 42;
  std::size_t vocab_size = 100;
  std::size_t n_in = 200;
  std::size_t n_out = 200;
  std::size_t steps_min = 10;  // steps per sample drawn uniformly in
  std::size_t steps_max = 10;  // [steps_min, steps_max]
  double in_logit_scale = 3.0;
  double out_logit_scale = 0.5;
  std::size_t embedding_dim = 8;  // 0 disables embeddings
  // One value broadcast to every dimension, or embedding_dim values.
  std::vector<double> embedding_shift = {1.0};
  QualityModel quality;
  std::string quality_key = "quality";
  bool emit_probs = true;
  bool emit_logits = true;

  // Throws a parameter error when a count or scale is out of range.
  void check() const;
};

SynthConfig parse_synth_config(std::string_view json_text);
std::string synth_config_to_json(const SynthConfig& config);

// The pinned generator described above.
class SynthRng {
 public:
  SynthRng(std::uint64_t seed, std::uint32_t class_tag, std::uint64_t index);

  double uniform();  // [0, 1)
  double normal();   // N(0, 1)

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// n_in IN samples ("in-000000", ...) followed by n_out OOD samples
// ("ood-000000", ...).
std::vector<SampleRecord> generate(const SynthConfig& config);

}  // namespace oodkit

#endif  // OODKIT_SYNTH_HPP_
