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

#include "oodkit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oodkit/error.hpp"

namespace oodkit {

namespace {

struct ClassCounts {
  std::size_t n_in = 0;
  std::size_t n_out = 0;
};

ClassCounts count_classes(std::span<const LabeledScore> scores) {
  ClassCounts c;
  for (const auto& s : scores) {
    if (std::isnan(s.anomaly_score)) {
      raise(ErrorKind::kInput, "NaN anomaly score for '" + s.id + "'");
    }
    switch (s.label) {
      case Label::kIn:
        ++c.n_in;
        break;
      case Label::kOod:
        ++c.n_out;
        break;
      case Label::kUnknown:
        raise(ErrorKind::kInput, "sample '" + s.id + "' has no IN/OOD label");
    }
  }
  if (c.n_in == 0 || c.n_out == 0) {
    raise(ErrorKind::kInput,
          "evaluation needs at least one IN and one OOD sample");
  }
  return c;
}

// Indices sorted by descending anomaly score.
std::vector<std::size_t> descending_order(std::span<const LabeledScore> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a].anomaly_score > scores[b].anomaly_score;
  });
  return order;
}

double pearson_of(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    raise(ErrorKind::kInput, "correlation undefined for a constant vector");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

bool in_subset(Label label, Subset subset) {
  switch (subset) {
    case Subset::kIn:
      return label == Label::kIn;
    case Subset::kOod:
      return label == Label::kOod;
    case Subset::kAll:
      return label == Label::kIn || label == Label::kOod;
  }
  return false;
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share rank mean((i+1)..(j+1)).
    const double rank = 0.5 * static_cast<double>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double auroc(std::span<const LabeledScore> scores) {
  const ClassCounts c = count_classes(scores);
  std::vector<double> values(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    values[i] = scores[i].anomaly_score;
  }
  const auto ranks = average_ranks(values);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i].label == Label::kOod) rank_sum += ranks[i];
  }
  const double n_out = static_cast<double>(c.n_out);
  const double u = rank_sum - n_out * (n_out + 1.0) / 2.0;
  return u / (static_cast<double>(c.n_in) * n_out);
}

RateAtTpr rate_at_tpr(std::span<const LabeledScore> scores, double r) {
  if (!(r > 0.0 && r <= 1.0)) {
    raise(ErrorKind::kParameter, "TPR target must lie in (0, 1]");
  }
  const ClassCounts c = count_classes(scores);
  const auto order = descending_order(scores);
  const double n_in = static_cast<double>(c.n_in);
  const double n_out = static_cast<double>(c.n_out);
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double value = scores[order[i]].anomaly_score;
    while (i < order.size() && scores[order[i]].anomaly_score == value) {
      if (scores[order[i]].label == Label::kOod) {
        ++tp;
      } else {
        ++fp;
      }
      ++i;
    }
    const double tpr = static_cast<double>(tp) / n_out;
    if (tpr >= r) return {value, tpr, static_cast<double>(fp) / n_in};
  }
  // Unreachable: the lowest threshold flags everything (TPR = 1).
  return {scores[order.back()].anomaly_score, 1.0, 1.0};
}

double fpr_at_tpr(std::span<const LabeledScore> scores, double r) {
  return rate_at_tpr(scores, r).fpr;
}

double aupr(std::span<const LabeledScore> scores, Label positive) {
  const ClassCounts c = count_classes(scores);
  if (positive == Label::kUnknown) {
    raise(ErrorKind::kParameter, "AUPR positive class must be IN or OOD");
  }
  // Rank key: higher = more likely positive.
  std::vector<double> key(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    key[i] = positive == Label::kOod ? scores[i].anomaly_score
                                     : -scores[i].anomaly_score;
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
  const double n_pos =
      static_cast<double>(positive == Label::kOod ? c.n_out : c.n_in);

  double area = 0.0;
  std::size_t tp = 0, fp = 0, tp_prev = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double value = key[order[i]];
    while (i < order.size() && key[order[i]] == value) {
      if (scores[order[i]].label == positive) {
        ++tp;
      } else {
        ++fp;
      }
      ++i;
    }
    const double precision =
        static_cast<double>(tp) / static_cast<double>(tp + fp);
    area += static_cast<double>(tp - tp_prev) / n_pos * precision;
    tp_prev = tp;
  }
  return area;
}

double detection_error(std::span<const LabeledScore> scores, double r) {
  const RateAtTpr rate = rate_at_tpr(scores, r);
  return 0.5 * (1.0 - rate.tpr) + 0.5 * rate.fpr;
}

ThresholdMetrics threshold_metrics(std::span<const LabeledScore> scores,
                                   double gamma) {
  const ClassCounts c = count_classes(scores);
  std::size_t tp = 0, fp = 0;
  for (const auto& s : scores) {
    if (s.anomaly_score > gamma) {
      if (s.label == Label::kOod) {
        ++tp;
      } else {
        ++fp;
      }
    }
  }
  ThresholdMetrics m;
  m.gamma = gamma;
  m.tpr = static_cast<double>(tp) / static_cast<double>(c.n_out);
  m.recall = m.tpr;
  m.fpr = static_cast<double>(fp) / static_cast<double>(c.n_in);
  m.precision =
      tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  m.f1 = m.precision + m.recall == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

EvalReport evaluate(std::span<const LabeledScore> scores, double tpr_target,
                    std::optional<double> gamma) {
  const ClassCounts c = count_classes(scores);
  EvalReport report;
  report.n_in = c.n_in;
  report.n_out = c.n_out;
  report.auroc = auroc(scores);
  const RateAtTpr rate = rate_at_tpr(scores, tpr_target);
  report.tpr_target = tpr_target;
  report.threshold_at_tpr = rate.threshold;
  report.tpr_achieved = rate.tpr;
  report.fpr_at_tpr = rate.fpr;
  report.detection_error = 0.5 * (1.0 - rate.tpr) + 0.5 * rate.fpr;
  report.aupr_in = aupr(scores, Label::kIn);
  report.aupr_out = aupr(scores, Label::kOod);
  if (gamma) report.threshold_metrics = threshold_metrics(scores, *gamma);
  return report;
}

std::string_view to_string(Subset subset) {
  switch (subset) {
    case Subset::kIn:
      return "IN";
    case Subset::kOod:
      return "OOD";
    case Subset::kAll:
      return "ALL";
  }
  return "ALL";
}

Correlation correlate(std::span<const LabeledScore> scores,
                      const std::string& quality_key, Subset subset) {
  std::vector<double> x, y;
  bool finite = true;
  for (const auto& s : scores) {
    if (!in_subset(s.label, subset)) continue;
    const auto it = s.quality.find(quality_key);
    if (it == s.quality.end()) {
      raise(ErrorKind::kInput,
            "sample '" + s.id + "' has no quality key '" + quality_key + "'");
    }
    if (std::isnan(s.anomaly_score)) {
      raise(ErrorKind::kInput, "NaN anomaly score for '" + s.id + "'");
    }
    finite = finite && std::isfinite(s.anomaly_score);
    x.push_back(s.anomaly_score);
    y.push_back(it->second);
  }
  if (x.size() < 3) {
    raise(ErrorKind::kInput, "correlation needs at least 3 samples in subset " +
                                 std::string(to_string(subset)));
  }
  Correlation out;
  out.subset = subset;
  out.quality_key = quality_key;
  out.n = x.size();
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  out.spearman = pearson_of(rx, ry);
  if (finite) out.pearson = pearson_of(x, y);
  return out;
}

FilterReport filter_report(std::span<const LabeledScore> scores, double gamma,
                           const std::string& quality_key) {
  std::vector<std::string> missing;
  for (const auto& s : scores) {
    if (s.label == Label::kUnknown) {
      raise(ErrorKind::kInput, "sample '" + s.id + "' has no IN/OOD label");
    }
    if (!s.quality.contains(quality_key)) missing.push_back(s.id);
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) {
      if (i > 0) list += ", ";
      list += missing[i];
    }
    if (missing.size() > 10) list += ", ...";
    raise(ErrorKind::kInput, std::to_string(missing.size()) +
                                 " samples lack quality key '" + quality_key +
                                 "': " + list);
  }

  auto summarize = [&](Subset subset) {
    SubsetFilter f;
    double total = 0.0, kept_total = 0.0;
    for (const auto& s : scores) {
      if (!in_subset(s.label, subset)) continue;
      const double q = s.quality.at(quality_key);
      ++f.n;
      total += q;
      if (s.anomaly_score <= gamma) {
        ++f.kept;
        kept_total += q;
      }
    }
    if (f.n == 0) return f;
    f.unfiltered_quality = total / static_cast<double>(f.n);
    f.removed_share =
        1.0 - static_cast<double>(f.kept) / static_cast<double>(f.n);
    if (f.kept > 0) {
      f.absolute_quality = kept_total / static_cast<double>(f.kept);
      f.gain = *f.absolute_quality - f.unfiltered_quality;
    }
    return f;
  };

  FilterReport report;
  report.gamma = gamma;
  report.quality_key = quality_key;
  report.in = summarize(Subset::kIn);
  report.ood = summarize(Subset::kOod);
  report.all = summarize(Subset::kAll);
  return report;
}

}  // namespace oodkit
