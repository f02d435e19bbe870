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

// Sequence-level anomaly scores. Every detector produces a raw score in its
// native orientation and an anomaly score that is higher for more anomalous
// samples: anomaly = negate_raw ? -raw : raw. +inf is a legal anomaly score.

#ifndef OODKIT_DETECTORS_HPP_
#define OODKIT_DETECTORS_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oodkit/distrib.hpp"
#include "oodkit/measures.hpp"

namespace oodkit {

class ReferenceSet;

enum class DetectorKind {
  kNegentropy,   // mean over steps of measure(p || uniform)
  kLikelihood,   // negative mean chosen-token log-probability
  kMsp,          // mean maximum softmax probability
  kEnergy,       // negative temperature-scaled mean log-partition
  kExternal,     // a precomputed per-sample quality value
  kProjection,   // min over reference bags of measure(bag_r || bag(x))
  kMahalanobis,  // (1 + squared Mahalanobis distance)^-1 on embeddings
};

struct DetectorConfig {
  DetectorKind kind = DetectorKind::kNegentropy;
  // Measure for kNegentropy and kProjection.
  MeasureSpec measure = MeasureSpec::renyi(0.5);
  double temperature = 1.0;
  // Quality field consumed by kExternal.
  std::string external_key;
  // Overrides the per-kind orientation default when set.
  std::optional<bool> negate_override;
  // kProjection only: evaluate measure(bag(x) || bag_r) instead.
  bool reverse_projection = false;

  bool negate_raw() const;

  // Throws a parameter error on invalid alpha/temperature or an empty
  // external key.
  void check() const;

  friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

// Orientation default: true for kMsp, kExternal and kMahalanobis, whose raw
// scores are higher for in-distribution samples.
bool default_negate_raw(DetectorKind kind);

// Command-line names: "negentropy-renyi", "negentropy-kl", "negentropy-fr",
// "likelihood", "msp", "energy", "external", "projection", "mahalanobis".
std::string detector_name(const DetectorConfig& config);

struct ScoredSample {
  std::string id;
  double raw_score = 0.0;
  double anomaly_score = 0.0;
  DetectorConfig detector;
};

ScoredSample make_scored(std::string id, double raw, const DetectorConfig& config);

ScoredSample score_negentropy(const SampleRecord& sample,
                              const MeasureSpec& spec, double temperature);
ScoredSample score_likelihood(const SampleRecord& sample);
ScoredSample score_msp(const SampleRecord& sample, double temperature);
ScoredSample score_energy(const SampleRecord& sample, double temperature);
ScoredSample score_external(const SampleRecord& sample,
                            const std::string& external_key, bool negate = true);

// Dispatches on config.kind. `reference` is required for kProjection and
// kMahalanobis.
ScoredSample score_sample(const SampleRecord& sample,
                          const DetectorConfig& config,
                          const ReferenceSet* reference = nullptr);

// Order-preserving batch scoring. With threads > 1 samples are scored
// concurrently; the output is identical to the sequential result. A failure
// aborts the batch and reports the first failing sample in input order.
std::vector<ScoredSample> score_batch(std::span<const SampleRecord> samples,
                                      const DetectorConfig& config,
                                      const ReferenceSet* reference = nullptr,
                                      unsigned threads = 1);

}  // namespace oodkit

#endif  // OODKIT_DETECTORS_HPP_
