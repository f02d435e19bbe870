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

// Reference-based scoring. A ReferenceSet holds one bag of distributions per
// in-distribution sample and, optionally, embedding statistics for the
// Mahalanobis baseline. Projection is an exact linear scan.

#ifndef OODKIT_REFERENCE_HPP_
#define OODKIT_REFERENCE_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oodkit/detectors.hpp"
#include "oodkit/distrib.hpp"
#include "oodkit/measures.hpp"

namespace oodkit {

inline constexpr double kDefaultShrinkage = 1e-2;
inline constexpr double kSymmetryTolerance = 1e-8;

struct ReferenceBag {
  std::string source_id;
  TokenDistribution bag;

  friend bool operator==(const ReferenceBag&, const ReferenceBag&) = default;
};

struct MahalanobisStats {
  std::vector<double> mean;
  // Row-major dim x dim inverse of the regularized covariance.
  std::vector<double> inverse_covariance;
  double shrinkage = kDefaultShrinkage;

  std::size_t dim() const noexcept { return mean.size(); }

  // Squared Mahalanobis distance of `embedding` from the mean.
  double squared_distance(std::span<const double> embedding) const;

  friend bool operator==(const MahalanobisStats&,
                         const MahalanobisStats&) = default;
};

class ReferenceSet {
 public:
  // Checks the invariants: non-empty bags sharing a vocab size, valid bag
  // distributions, and a square symmetric inverse covariance.
  ReferenceSet(std::vector<ReferenceBag> bags,
               std::optional<MahalanobisStats> maha = std::nullopt);

  std::span<const ReferenceBag> bags() const noexcept { return bags_; }
  const std::optional<MahalanobisStats>& maha() const noexcept { return maha_; }
  std::size_t size() const noexcept { return bags_.size(); }
  std::size_t vocab_size() const noexcept {
    return bags_.front().bag.vocab_size();
  }

  // The first `n` bags (n clamped to size()), embedding statistics kept.
  ReferenceSet prefix(std::size_t n) const;

  friend bool operator==(const ReferenceSet&, const ReferenceSet&) = default;

 private:
  std::vector<ReferenceBag> bags_;
  std::optional<MahalanobisStats> maha_;
};

struct BuildOptions {
  bool with_mahalanobis = false;
  double shrinkage = kDefaultShrinkage;
  double temperature = 1.0;
};

ReferenceSet build_reference(std::span<const SampleRecord> samples,
                             const BuildOptions& options = {});

// Mean mu and inverse of (Sigma + shrinkage * trace(Sigma)/d * I), where
// Sigma is the maximum-likelihood covariance of `embeddings`.
MahalanobisStats fit_mahalanobis(std::span<const std::vector<double>> embeddings,
                                 double shrinkage);

struct ProjectionResult {
  double score = 0.0;
  std::string nearest_id;
  std::size_t nearest_index = 0;
};

struct ProjectionOptions {
  double temperature = 1.0;
  bool reverse = false;
};

// min_r measure(bag_r || bag(sample)); ties go to the lowest index.
ProjectionResult project(const SampleRecord& sample, const ReferenceSet& ref,
                         const MeasureSpec& spec,
                         const ProjectionOptions& options = {});

ProjectionResult project_bag(const TokenDistribution& query,
                             const ReferenceSet& ref, const MeasureSpec& spec,
                             bool reverse = false);

struct Neighbor {
  std::size_t index = 0;
  std::string source_id;
  double score = 0.0;
};

// The `top` closest reference bags in ascending measure order (stable by
// index on ties).
std::vector<Neighbor> nearest_references(const SampleRecord& sample,
                                         const ReferenceSet& ref,
                                         const MeasureSpec& spec,
                                         std::size_t top,
                                         const ProjectionOptions& options = {});

// raw = (1 + d^2)^-1, anomaly = -raw.
ScoredSample score_mahalanobis(const SampleRecord& sample,
                               const ReferenceSet& ref);

}  // namespace oodkit

#endif  // OODKIT_REFERENCE_HPP_
