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

#include "oodkit/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "oodkit/error.hpp"
#include "oodkit/reference.hpp"

namespace oodkit {

namespace {

void check_temperature(double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    raise(ErrorKind::kParameter, "temperature must be positive and finite");
  }
}

void require_steps(const SampleRecord& sample) {
  if (sample.steps.empty()) {
    raise(ErrorKind::kInput, "sample '" + sample.id + "' has no steps");
  }
}

DetectorConfig negentropy_config(const MeasureSpec& spec, double temperature) {
  DetectorConfig config;
  config.kind = DetectorKind::kNegentropy;
  config.measure = spec;
  config.temperature = temperature;
  return config;
}

}  // namespace

bool default_negate_raw(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::kMsp:
    case DetectorKind::kExternal:
    case DetectorKind::kMahalanobis:
      return true;
    default:
      return false;
  }
}

bool DetectorConfig::negate_raw() const {
  return negate_override.value_or(default_negate_raw(kind));
}

void DetectorConfig::check() const {
  check_temperature(temperature);
  if (kind == DetectorKind::kNegentropy || kind == DetectorKind::kProjection) {
    measure.check();
  }
  if (kind == DetectorKind::kExternal && external_key.empty()) {
    raise(ErrorKind::kParameter, "external detector requires an external key");
  }
}

std::string detector_name(const DetectorConfig& config) {
  switch (config.kind) {
    case DetectorKind::kNegentropy:
      switch (config.measure.kind) {
        case MeasureKind::kRenyi:
          return "negentropy-renyi";
        case MeasureKind::kKl:
          return "negentropy-kl";
        case MeasureKind::kFisherRao:
          return "negentropy-fr";
      }
      break;
    case DetectorKind::kLikelihood:
      return "likelihood";
    case DetectorKind::kMsp:
      return "msp";
    case DetectorKind::kEnergy:
      return "energy";
    case DetectorKind::kExternal:
      return "external";
    case DetectorKind::kProjection:
      return "projection";
    case DetectorKind::kMahalanobis:
      return "mahalanobis";
  }
  return "unknown";
}

ScoredSample make_scored(std::string id, double raw,
                         const DetectorConfig& config) {
  ScoredSample s;
  s.id = std::move(id);
  s.raw_score = raw;
  s.anomaly_score = config.negate_raw() ? -raw : raw;
  s.detector = config;
  return s;
}

ScoredSample score_negentropy(const SampleRecord& sample,
                              const MeasureSpec& spec, double temperature) {
  spec.check();
  check_temperature(temperature);
  require_steps(sample);
  double sum = 0.0;
  for (const auto& step : sample.steps) {
    sum += negentropy(step_distribution(step, temperature), spec);
  }
  const double score = sum / static_cast<double>(sample.steps.size());
  return make_scored(sample.id, score, negentropy_config(spec, temperature));
}

ScoredSample score_likelihood(const SampleRecord& sample) {
  require_steps(sample);
  double sum = 0.0;
  for (std::size_t t = 0; t < sample.steps.size(); ++t) {
    const auto& lp = sample.steps[t].chosen_logprob;
    if (!lp) {
      raise(ErrorKind::kInput, "sample '" + sample.id +
                                   "' lacks chosen_logprob at step " +
                                   std::to_string(t));
    }
    sum += *lp;
  }
  DetectorConfig config;
  config.kind = DetectorKind::kLikelihood;
  return make_scored(sample.id, -sum / static_cast<double>(sample.steps.size()),
                     config);
}

ScoredSample score_msp(const SampleRecord& sample, double temperature) {
  check_temperature(temperature);
  require_steps(sample);
  double sum = 0.0;
  for (const auto& step : sample.steps) {
    sum += max_probability(step_distribution(step, temperature));
  }
  DetectorConfig config;
  config.kind = DetectorKind::kMsp;
  config.temperature = temperature;
  return make_scored(sample.id, sum / static_cast<double>(sample.steps.size()),
                     config);
}

ScoredSample score_energy(const SampleRecord& sample, double temperature) {
  check_temperature(temperature);
  require_steps(sample);
  double sum = 0.0;
  for (const auto& step : sample.steps) {
    if (!step.logits) {
      raise(ErrorKind::kConfiguration,
            "energy detector: logits required (sample '" + sample.id + "')");
    }
    const auto values = step.logits->values();
    const double shift = *std::max_element(values.begin(), values.end());
    double acc = 0.0;
    for (double v : values) acc += std::exp((v - shift) / temperature);
    // T * logsumexp(f / T)
    sum += shift + temperature * std::log(acc);
  }
  DetectorConfig config;
  config.kind = DetectorKind::kEnergy;
  config.temperature = temperature;
  return make_scored(sample.id, -sum / static_cast<double>(sample.steps.size()),
                     config);
}

ScoredSample score_external(const SampleRecord& sample,
                            const std::string& external_key, bool negate) {
  if (external_key.empty()) {
    raise(ErrorKind::kParameter, "external detector requires an external key");
  }
  const auto it = sample.quality.find(external_key);
  if (it == sample.quality.end()) {
    raise(ErrorKind::kInput, "sample '" + sample.id + "' has no quality key '" +
                                 external_key + "'");
  }
  DetectorConfig config;
  config.kind = DetectorKind::kExternal;
  config.external_key = external_key;
  config.negate_override = negate;
  return make_scored(sample.id, it->second, config);
}

ScoredSample score_sample(const SampleRecord& sample,
                          const DetectorConfig& config,
                          const ReferenceSet* reference) {
  config.check();
  double raw = 0.0;
  switch (config.kind) {
    case DetectorKind::kNegentropy:
      raw = score_negentropy(sample, config.measure, config.temperature)
                .raw_score;
      break;
    case DetectorKind::kLikelihood:
      raw = score_likelihood(sample).raw_score;
      break;
    case DetectorKind::kMsp:
      raw = score_msp(sample, config.temperature).raw_score;
      break;
    case DetectorKind::kEnergy:
      raw = score_energy(sample, config.temperature).raw_score;
      break;
    case DetectorKind::kExternal:
      raw = score_external(sample, config.external_key).raw_score;
      break;
    case DetectorKind::kProjection:
      if (reference == nullptr) {
        raise(ErrorKind::kConfiguration,
              "projection detector requires a reference set");
      }
      raw = project(sample, *reference, config.measure,
                    {config.temperature, config.reverse_projection})
                .score;
      break;
    case DetectorKind::kMahalanobis:
      if (reference == nullptr) {
        raise(ErrorKind::kConfiguration,
              "mahalanobis detector requires a reference set");
      }
      raw = score_mahalanobis(sample, *reference).raw_score;
      break;
  }
  return make_scored(sample.id, raw, config);
}

std::vector<ScoredSample> score_batch(std::span<const SampleRecord> samples,
                                      const DetectorConfig& config,
                                      const ReferenceSet* reference,
                                      unsigned threads) {
  config.check();
  std::vector<ScoredSample> out(samples.size());
  std::vector<std::exception_ptr> errors(samples.size());

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        out[i] = score_sample(samples[i], config, reference);
      } catch (...) {
        errors[i] = std::current_exception();
        return;
      }
    }
  };

  const std::size_t n = samples.size();
  const std::size_t workers =
      std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    work(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t begin = 0; begin < n; begin += chunk) {
      pool.emplace_back(work, begin, std::min(n, begin + chunk));
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      throw Error(e.kind(), "sample '" + samples[i].id + "' (index " +
                                std::to_string(i) + "): " + e.detail());
    }
  }
  return out;
}

}  // namespace oodkit
