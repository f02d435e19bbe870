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

#include "oodkit/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "json.hpp"
#include "oodkit/error.hpp"

namespace oodkit {

void SynthConfig::check() const {
  if (vocab_size == 0) raise(ErrorKind::kParameter, "vocab_size must be >= 1");
  if (n_in == 0 || n_out == 0) {
    raise(ErrorKind::kParameter, "n_in and n_out must be >= 1");
  }
  if (steps_min == 0 || steps_max < steps_min) {
    raise(ErrorKind::kParameter, "need 1 <= steps_min <= steps_max");
  }
  if (!(in_logit_scale > 0.0) || !(out_logit_scale > 0.0) ||
      !std::isfinite(in_logit_scale) || !std::isfinite(out_logit_scale)) {
    raise(ErrorKind::kParameter, "logit scales must be positive");
  }
  if (embedding_dim > 0 && embedding_shift.size() != 1 &&
      embedding_shift.size() != embedding_dim) {
    raise(ErrorKind::kParameter,
          "embedding_shift must have 1 or embedding_dim entries");
  }
  if (!(quality.noise_sd >= 0.0)) {
    raise(ErrorKind::kParameter, "quality noise_sd must be >= 0");
  }
  if (!emit_probs && !emit_logits) {
    raise(ErrorKind::kParameter, "at least one of probs/logits must be emitted");
  }
}

SynthConfig parse_synth_config(std::string_view json_text) {
  using nlohmann::json;
  SynthConfig c;
  try {
    const json j = json::parse(json_text);
    c.seed = j.value("seed", c.seed);
    c.vocab_size = j.value("vocab_size", c.vocab_size);
    c.n_in = j.value("n_in", c.n_in);
    c.n_out = j.value("n_out", c.n_out);
    if (j.contains("steps_per_sample")) {
      const auto& s = j.at("steps_per_sample");
      if (s.is_array()) {
        c.steps_min = s.at(0).get<std::size_t>();
        c.steps_max = s.at(1).get<std::size_t>();
      } else {
        c.steps_min = c.steps_max = s.get<std::size_t>();
      }
    }
    c.in_logit_scale = j.value("in_logit_scale", c.in_logit_scale);
    c.out_logit_scale = j.value("out_logit_scale", c.out_logit_scale);
    c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
    if (j.contains("embedding_shift")) {
      const auto& s = j.at("embedding_shift");
      c.embedding_shift = s.is_array() ? s.get<std::vector<double>>()
                                       : std::vector<double>{s.get<double>()};
    }
    if (j.contains("quality_model")) {
      const auto& q = j.at("quality_model");
      c.quality.in_mean = q.value("in_mean", c.quality.in_mean);
      c.quality.out_mean = q.value("out_mean", c.quality.out_mean);
      c.quality.noise_sd = q.value("noise_sd", c.quality.noise_sd);
    }
    c.quality_key = j.value("quality_key", c.quality_key);
    c.emit_probs = j.value("emit_probs", c.emit_probs);
    c.emit_logits = j.value("emit_logits", c.emit_logits);
  } catch (const json::exception& e) {
    raise(ErrorKind::kParameter, std::string("synth config: ") + e.what());
  }
  c.check();
  return c;
}

std::string synth_config_to_json(const SynthConfig& c) {
  nlohmann::ordered_json j;
  j["seed"] = c.seed;
  j["vocab_size"] = c.vocab_size;
  j["n_in"] = c.n_in;
  j["n_out"] = c.n_out;
  j["steps_per_sample"] = {c.steps_min, c.steps_max};
  j["in_logit_scale"] = c.in_logit_scale;
  j["out_logit_scale"] = c.out_logit_scale;
  j["embedding_dim"] = c.embedding_dim;
  j["embedding_shift"] = c.embedding_shift;
  j["quality_model"] = {{"in_mean", c.quality.in_mean},
                        {"out_mean", c.quality.out_mean},
                        {"noise_sd", c.quality.noise_sd}};
  j["quality_key"] = c.quality_key;
  j["emit_probs"] = c.emit_probs;
  j["emit_logits"] = c.emit_logits;
  return j.dump(1);
}

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint32_t class_tag,
                              std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32), class_tag,
                    static_cast<std::uint32_t>(index & 0xffffffffu),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

SampleRecord generate_one(const SynthConfig& c, bool ood, std::size_t index) {
  SynthRng rng(c.seed, ood ? 1u : 0u, index);
  const double scale = ood ? c.out_logit_scale : c.in_logit_scale;

  SampleRecord s;
  char id[32];
  std::snprintf(id, sizeof(id), "%s-%06zu", ood ? "ood" : "in", index);
  s.id = id;
  s.label = ood ? Label::kOod : Label::kIn;

  std::size_t steps = c.steps_min;
  if (c.steps_max > c.steps_min) {
    const auto span = static_cast<double>(c.steps_max - c.steps_min + 1);
    steps += std::min(static_cast<std::size_t>(rng.uniform() * span),
                      c.steps_max - c.steps_min);
  }
  s.steps.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    std::vector<double> logits(c.vocab_size);
    for (double& v : logits) v = scale * rng.normal();
    LogitVector lv(std::move(logits));
    TokenDistribution probs = softmax_with_temperature(lv, 1.0);

    const double u = rng.uniform();
    const auto p = probs.probs();
    std::size_t chosen = p.size() - 1;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      cumulative += p[i];
      if (u < cumulative) {
        chosen = i;
        break;
      }
    }
    // Guard against a zero-probability pick from rounding at the far end.
    while (p[chosen] == 0.0 && chosen > 0) --chosen;

    StepRecord step;
    step.chosen_logprob = std::log(p[chosen]);
    if (c.emit_probs) step.distribution = std::move(probs);
    if (c.emit_logits) step.logits = std::move(lv);
    s.steps.push_back(std::move(step));
  }

  if (c.embedding_dim > 0) {
    std::vector<double> e(c.embedding_dim);
    for (std::size_t d = 0; d < e.size(); ++d) {
      const double shift =
          c.embedding_shift.size() == 1 ? c.embedding_shift[0] : c.embedding_shift[d];
      e[d] = rng.normal() + (ood ? shift : 0.0);
    }
    s.embedding = std::move(e);
  }
  const double mean = ood ? c.quality.out_mean : c.quality.in_mean;
  s.quality[c.quality_key] = mean + c.quality.noise_sd * rng.normal();
  return s;
}

}  // namespace

SynthRng::SynthRng(std::uint64_t seed, std::uint32_t class_tag,
                   std::uint64_t index)
    : engine_(seeded_engine(seed, class_tag, index)) {}

double SynthRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SynthRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::vector<SampleRecord> generate(const SynthConfig& config) {
  config.check();
  std::vector<SampleRecord> out;
  out.reserve(config.n_in + config.n_out);
  for (std::size_t i = 0; i < config.n_in; ++i) {
    out.push_back(generate_one(config, false, i));
  }
  for (std::size_t i = 0; i < config.n_out; ++i) {
    out.push_back(generate_one(config, true, i));
  }
  return out;
}

}  // namespace oodkit
