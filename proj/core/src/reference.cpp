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

#include "oodkit/reference.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "oodkit/error.hpp"

namespace oodkit {

double MahalanobisStats::squared_distance(
    std::span<const double> embedding) const {
  const std::size_t d = dim();
  if (embedding.size() != d) {
    raise(ErrorKind::kConfiguration,
          "embedding dimension " + std::to_string(embedding.size()) +
              " does not match reference dimension " + std::to_string(d));
  }
  std::vector<double> diff(d);
  for (std::size_t i = 0; i < d; ++i) diff[i] = embedding[i] - mean[i];
  double total = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      row += inverse_covariance[i * d + j] * diff[j];
    }
    total += diff[i] * row;
  }
  return std::max(total, 0.0);
}

ReferenceSet::ReferenceSet(std::vector<ReferenceBag> bags,
                           std::optional<MahalanobisStats> maha)
    : bags_(std::move(bags)), maha_(std::move(maha)) {
  if (bags_.empty()) {
    raise(ErrorKind::kInput, "reference set must contain at least one bag");
  }
  const std::size_t vocab = bags_.front().bag.vocab_size();
  for (auto& b : bags_) {
    if (b.bag.vocab_size() != vocab) {
      raise(ErrorKind::kInput,
            "reference bag '" + b.source_id + "' has a different vocab size");
    }
    b.bag = validate(b.bag);
  }
  if (maha_) {
    const std::size_t d = maha_->dim();
    if (d == 0 || maha_->inverse_covariance.size() != d * d) {
      raise(ErrorKind::kInput, "inverse covariance must be a dim x dim matrix");
    }
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i + 1; j < d; ++j) {
        const double a = maha_->inverse_covariance[i * d + j];
        const double b = maha_->inverse_covariance[j * d + i];
        if (std::abs(a - b) > kSymmetryTolerance) {
          raise(ErrorKind::kInput, "inverse covariance is not symmetric");
        }
      }
    }
  }
}

ReferenceSet ReferenceSet::prefix(std::size_t n) const {
  n = std::clamp<std::size_t>(n, 1, bags_.size());
  return ReferenceSet(
      std::vector<ReferenceBag>(bags_.begin(),
                                bags_.begin() + static_cast<long>(n)),
      maha_);
}

MahalanobisStats fit_mahalanobis(
    std::span<const std::vector<double>> embeddings, double shrinkage) {
  if (embeddings.empty()) {
    raise(ErrorKind::kInput, "no embeddings to fit");
  }
  if (!(shrinkage >= 0.0 && shrinkage <= 1.0)) {
    raise(ErrorKind::kParameter, "shrinkage must lie in [0, 1]");
  }
  const std::size_t d = embeddings.front().size();
  if (d == 0) raise(ErrorKind::kInput, "embeddings must be non-empty");
  const auto n = static_cast<Eigen::Index>(embeddings.size());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(d));
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& e = embeddings[static_cast<std::size_t>(r)];
    if (e.size() != d) {
      raise(ErrorKind::kInput, "embedding dimensions differ");
    }
    for (std::size_t c = 0; c < d; ++c) {
      x(r, static_cast<Eigen::Index>(c)) = e[c];
    }
  }
  const Eigen::VectorXd mu = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - mu.transpose();
  Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(n);
  const double ridge = shrinkage * cov.trace() / static_cast<double>(d);
  cov.diagonal().array() += ridge;

  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success || !(cov.diagonal().minCoeff() > 0.0)) {
    raise(ErrorKind::kInput,
          "covariance is singular; use a positive shrinkage");
  }
  const Eigen::MatrixXd identity =
      Eigen::MatrixXd::Identity(cov.rows(), cov.cols());
  Eigen::MatrixXd inv = llt.solve(identity);
  // eval() avoids Eigen's transpose aliasing on in-place assignment.
  inv = (0.5 * (inv + inv.transpose())).eval();
  if (!inv.allFinite()) {
    raise(ErrorKind::kInput, "covariance inverse is not finite");
  }

  MahalanobisStats stats;
  stats.shrinkage = shrinkage;
  stats.mean.assign(mu.data(), mu.data() + mu.size());
  stats.inverse_covariance.resize(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      stats.inverse_covariance[i * d + j] =
          inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return stats;
}

ReferenceSet build_reference(std::span<const SampleRecord> samples,
                             const BuildOptions& options) {
  if (samples.empty()) {
    raise(ErrorKind::kInput, "reference needs at least one IN sample");
  }
  std::vector<ReferenceBag> bags;
  bags.reserve(samples.size());
  for (const auto& s : samples) {
    const auto steps = step_distributions(s, options.temperature);
    bags.push_back({s.id, bag_of_distributions(steps)});
  }
  std::optional<MahalanobisStats> maha;
  if (options.with_mahalanobis) {
    std::vector<std::vector<double>> embeddings;
    embeddings.reserve(samples.size());
    for (const auto& s : samples) {
      if (!s.embedding) {
        raise(ErrorKind::kInput, "sample '" + s.id + "' has no embedding");
      }
      embeddings.push_back(*s.embedding);
    }
    maha = fit_mahalanobis(embeddings, options.shrinkage);
  }
  return ReferenceSet(std::move(bags), std::move(maha));
}

ProjectionResult project_bag(const TokenDistribution& query,
                             const ReferenceSet& ref, const MeasureSpec& spec,
                             bool reverse) {
  spec.check();
  if (query.vocab_size() != ref.vocab_size()) {
    raise(ErrorKind::kInput, "sample vocab size does not match reference");
  }
  ProjectionResult best;
  bool first = true;
  const auto bags = ref.bags();
  for (std::size_t i = 0; i < bags.size(); ++i) {
    const double value = reverse ? measure(query, bags[i].bag, spec)
                                 : measure(bags[i].bag, query, spec);
    if (first || value < best.score) {
      best.score = value;
      best.nearest_index = i;
      first = false;
    }
  }
  best.nearest_id = bags[best.nearest_index].source_id;
  return best;
}

ProjectionResult project(const SampleRecord& sample, const ReferenceSet& ref,
                         const MeasureSpec& spec,
                         const ProjectionOptions& options) {
  const auto steps = step_distributions(sample, options.temperature);
  return project_bag(bag_of_distributions(steps), ref, spec, options.reverse);
}

std::vector<Neighbor> nearest_references(const SampleRecord& sample,
                                         const ReferenceSet& ref,
                                         const MeasureSpec& spec,
                                         std::size_t top,
                                         const ProjectionOptions& options) {
  spec.check();
  const TokenDistribution query =
      bag_of_distributions(step_distributions(sample, options.temperature));
  if (query.vocab_size() != ref.vocab_size()) {
    raise(ErrorKind::kInput, "sample vocab size does not match reference");
  }
  const auto bags = ref.bags();
  std::vector<Neighbor> all(bags.size());
  for (std::size_t i = 0; i < bags.size(); ++i) {
    all[i].index = i;
    all[i].source_id = bags[i].source_id;
    all[i].score = options.reverse ? measure(query, bags[i].bag, spec)
                                   : measure(bags[i].bag, query, spec);
  }
  top = std::min(top, all.size());
  std::stable_sort(all.begin(), all.end(),
                   [](const Neighbor& a, const Neighbor& b) {
                     return a.score < b.score;
                   });
  all.resize(top);
  return all;
}

ScoredSample score_mahalanobis(const SampleRecord& sample,
                               const ReferenceSet& ref) {
  if (!ref.maha()) {
    raise(ErrorKind::kConfiguration,
          "reference set carries no Mahalanobis statistics");
  }
  if (!sample.embedding) {
    raise(ErrorKind::kConfiguration,
          "mahalanobis detector: sample '" + sample.id + "' has no embedding");
  }
  const double d2 = ref.maha()->squared_distance(*sample.embedding);
  DetectorConfig config;
  config.kind = DetectorKind::kMahalanobis;
  return make_scored(sample.id, 1.0 / (1.0 + d2), config);
}

}  // namespace oodkit
