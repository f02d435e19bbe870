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

// Detector evaluation. OOD is the positive class throughout. Thresholds are
// always observed score values, so every metric can be reproduced exactly by
// sweeping the observed scores.

#ifndef OODKIT_EVAL_HPP_
#define OODKIT_EVAL_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oodkit/distrib.hpp"

namespace oodkit {

inline constexpr double kDefaultTprTarget = 0.95;

struct LabeledScore {
  std::string id;
  double anomaly_score = 0.0;
  Label label = Label::kIn;
  std::map<std::string, double> quality;
};

// Rates at the largest observed threshold t whose rule "flag if score >= t"
// reaches TPR >= r.
struct RateAtTpr {
  double threshold = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
};

// Confusion-derived metrics under the decision rule "OOD iff score > gamma".
struct ThresholdMetrics {
  double gamma = 0.0;
  double precision = 0.0;  // 0 when nothing is flagged
  double recall = 0.0;
  double f1 = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct EvalReport {
  double auroc = 0.0;
  double fpr_at_tpr = 0.0;
  double tpr_target = kDefaultTprTarget;
  double threshold_at_tpr = 0.0;
  double tpr_achieved = 0.0;
  double aupr_in = 0.0;
  double aupr_out = 0.0;
  double detection_error = 0.0;
  std::optional<ThresholdMetrics> threshold_metrics;
  std::size_t n_in = 0;
  std::size_t n_out = 0;
};

// P(OOD score > IN score) + 0.5 P(tie), via average ranks.
double auroc(std::span<const LabeledScore> scores);

RateAtTpr rate_at_tpr(std::span<const LabeledScore> scores, double r);
double fpr_at_tpr(std::span<const LabeledScore> scores, double r);

// Step-wise average precision. positive = kOod ranks by descending anomaly
// score; positive = kIn ranks IN samples by ascending anomaly score.
double aupr(std::span<const LabeledScore> scores, Label positive);

// 0.5 * (1 - TPR) + 0.5 * FPR at the threshold chosen by rate_at_tpr.
double detection_error(std::span<const LabeledScore> scores, double r);

ThresholdMetrics threshold_metrics(std::span<const LabeledScore> scores,
                                   double gamma);

EvalReport evaluate(std::span<const LabeledScore> scores,
                    double tpr_target = kDefaultTprTarget,
                    std::optional<double> gamma = std::nullopt);

enum class Subset { kIn, kOod, kAll };

std::string_view to_string(Subset subset);

struct Correlation {
  Subset subset = Subset::kAll;
  std::string quality_key;
  std::size_t n = 0;
  // Absent when a score is infinite.
  std::optional<double> pearson;
  double spearman = 0.0;
};

Correlation correlate(std::span<const LabeledScore> scores,
                      const std::string& quality_key, Subset subset);

struct SubsetFilter {
  std::size_t n = 0;
  std::size_t kept = 0;
  double unfiltered_quality = 0.0;
  // Absent when nothing is kept.
  std::optional<double> absolute_quality;
  std::optional<double> gain;
  double removed_share = 0.0;
};

struct FilterReport {
  double gamma = 0.0;
  std::string quality_key;
  SubsetFilter in;
  SubsetFilter ood;
  SubsetFilter all;
};

// Keeps samples with score <= gamma and reports mean quality of what remains.
FilterReport filter_report(std::span<const LabeledScore> scores, double gamma,
                           const std::string& quality_key);

// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

}  // namespace oodkit

#endif  // OODKIT_EVAL_HPP_
