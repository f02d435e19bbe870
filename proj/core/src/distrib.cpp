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

#include "oodkit/distrib.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "oodkit/error.hpp"

namespace oodkit {

TokenDistribution TokenDistribution::dense(std::vector<double> probs) {
  if (probs.empty()) {
    raise(ErrorKind::kValidation, "vocab_size must be positive");
  }
  TokenDistribution d;
  d.vocab_size_ = probs.size();
  d.dense_ = true;
  d.probs_ = std::move(probs);
  return d;
}

TokenDistribution TokenDistribution::sparse(std::size_t vocab_size,
                                            std::vector<SparseEntry> entries,
                                            double tail_mass) {
  if (vocab_size == 0) {
    raise(ErrorKind::kValidation, "vocab_size must be positive");
  }
  if (entries.size() > vocab_size) {
    raise(ErrorKind::kValidation, "top-k list longer than vocab_size (k=" +
                                      std::to_string(entries.size()) + ")");
  }
  std::sort(entries.begin(), entries.end(),
            [](const SparseEntry& a, const SparseEntry& b) {
              return a.token < b.token;
            });
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].token >= vocab_size) {
      raise(ErrorKind::kValidation,
            "token id " + std::to_string(entries[i].token) +
                " out of range for vocab_size " + std::to_string(vocab_size));
    }
    if (i > 0 && entries[i].token == entries[i - 1].token) {
      raise(ErrorKind::kValidation,
            "duplicate token id " + std::to_string(entries[i].token));
    }
  }
  TokenDistribution d;
  d.vocab_size_ = vocab_size;
  d.dense_ = false;
  d.entries_ = std::move(entries);
  d.tail_mass_ = tail_mass;
  return d;
}

double TokenDistribution::tail_per_token() const noexcept {
  if (dense_ || entries_.size() >= vocab_size_) return 0.0;
  return tail_mass_ / static_cast<double>(vocab_size_ - entries_.size());
}

double TokenDistribution::total_mass() const noexcept {
  if (dense_) return std::accumulate(probs_.begin(), probs_.end(), 0.0);
  double sum = tail_mass_;
  for (const auto& e : entries_) sum += e.prob;
  return sum;
}

LogitVector::LogitVector(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty()) {
    raise(ErrorKind::kInput, "logit vector must be non-empty");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      raise(ErrorKind::kInput,
            "non-finite logit at index " + std::to_string(i));
    }
  }
}

std::size_t StepRecord::vocab_size() const {
  if (distribution) return distribution->vocab_size();
  if (logits) return logits->vocab_size();
  return 0;
}

std::string_view to_string(Label label) {
  switch (label) {
    case Label::kIn:
      return "IN";
    case Label::kOod:
      return "OOD";
    case Label::kUnknown:
      return "UNKNOWN";
  }
  return "UNKNOWN";
}

Label parse_label(std::string_view text) {
  if (text == "IN") return Label::kIn;
  if (text == "OOD") return Label::kOod;
  if (text == "UNKNOWN") return Label::kUnknown;
  raise(ErrorKind::kInput, "unknown label '" + std::string(text) + "'");
}

std::size_t SampleRecord::vocab_size() const {
  return steps.empty() ? 0 : steps.front().vocab_size();
}

TokenDistribution softmax_with_temperature(const LogitVector& logits,
                                           double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    raise(ErrorKind::kParameter, "temperature must be positive and finite");
  }
  const auto values = logits.values();
  const double shift = *std::max_element(values.begin(), values.end());
  std::vector<double> probs(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    probs[i] = std::exp((values[i] - shift) / temperature);
    sum += probs[i];
  }
  for (double& p : probs) p /= sum;
  return TokenDistribution::dense(std::move(probs));
}

namespace {

void check_entry(double p, const std::string& where) {
  if (!std::isfinite(p)) {
    raise(ErrorKind::kValidation, "non-finite probability at " + where);
  }
  if (p < 0.0) {
    raise(ErrorKind::kValidation, "negative mass at " + where);
  }
  if (p > 1.0 + kMassTolerance) {
    raise(ErrorKind::kValidation, "probability above 1 at " + where);
  }
}

}  // namespace

TokenDistribution validate(const TokenDistribution& d) {
  if (d.is_dense()) {
    const auto probs = d.probs();
    for (std::size_t i = 0; i < probs.size(); ++i) {
      check_entry(probs[i], "index " + std::to_string(i));
    }
  } else {
    for (const auto& e : d.entries()) {
      check_entry(e.prob, "token " + std::to_string(e.token));
    }
    check_entry(d.tail_mass(), "tail_mass");
    if (d.listed_count() == d.vocab_size() && d.tail_mass() > 0.0) {
      raise(ErrorKind::kValidation,
            "tail_mass must be 0 when all tokens are listed");
    }
  }

  const double total = d.total_mass();
  const double deviation = std::abs(total - 1.0);
  if (deviation <= kExactMassTolerance) return d;
  if (deviation > kMassTolerance) {
    raise(ErrorKind::kValidation,
          "mass sums to " + std::to_string(total) + ", not 1 within 1e-6");
  }
  if (d.is_dense()) {
    std::vector<double> probs(d.probs().begin(), d.probs().end());
    for (double& p : probs) p /= total;
    return TokenDistribution::dense(std::move(probs));
  }
  std::vector<SparseEntry> entries(d.entries().begin(), d.entries().end());
  for (auto& e : entries) e.prob /= total;
  return TokenDistribution::sparse(d.vocab_size(), std::move(entries),
                                   d.tail_mass() / total);
}

TokenDistribution densify(const TokenDistribution& d) {
  if (d.is_dense()) return d;
  if (d.listed_count() == d.vocab_size() && d.tail_mass() > 0.0) {
    raise(ErrorKind::kValidation,
          "tail_mass must be 0 when all tokens are listed");
  }
  std::vector<double> probs(d.vocab_size(), d.tail_per_token());
  for (const auto& e : d.entries()) probs[e.token] = e.prob;
  return TokenDistribution::dense(std::move(probs));
}

TokenDistribution sparsify_topk(const TokenDistribution& d, std::size_t k) {
  if (k > d.vocab_size()) {
    raise(ErrorKind::kParameter, "k exceeds vocab_size");
  }
  const TokenDistribution full = densify(d);
  const auto probs = full.probs();
  std::vector<TokenId> order(probs.size());
  std::iota(order.begin(), order.end(), TokenId{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<long>(k),
                    order.end(), [&](TokenId a, TokenId b) {
                      if (probs[a] != probs[b]) return probs[a] > probs[b];
                      return a < b;
                    });
  std::vector<SparseEntry> entries;
  entries.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    entries.push_back({order[i], probs[order[i]]});
  }
  double tail = 0.0;
  std::sort(order.begin() + static_cast<long>(k), order.end());
  for (std::size_t i = k; i < order.size(); ++i) tail += probs[order[i]];
  return TokenDistribution::sparse(d.vocab_size(), std::move(entries), tail);
}

TokenDistribution uniform_distribution(std::size_t vocab_size) {
  return TokenDistribution::sparse(vocab_size, {}, 1.0);
}

namespace {

TokenDistribution sparse_bag(std::span<const TokenDistribution> steps) {
  const std::size_t vocab = steps.front().vocab_size();
  const double n = static_cast<double>(steps.size());

  std::vector<TokenId> ids;
  for (const auto& s : steps) {
    for (const auto& e : s.entries()) ids.push_back(e.token);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  std::vector<double> sums(ids.size(), 0.0);
  double tail_sum = 0.0;
  for (const auto& s : steps) {
    const double tail = s.tail_per_token();
    tail_sum += tail;
    auto it = s.entries().begin();
    const auto end = s.entries().end();
    for (std::size_t j = 0; j < ids.size(); ++j) {
      if (it != end && it->token == ids[j]) {
        sums[j] += it->prob;
        ++it;
      } else {
        sums[j] += tail;
      }
    }
  }

  std::vector<SparseEntry> entries(ids.size());
  for (std::size_t j = 0; j < ids.size(); ++j) {
    entries[j] = {ids[j], sums[j] / n};
  }
  const std::size_t unlisted = vocab - ids.size();
  const double tail_mass =
      unlisted == 0 ? 0.0 : (tail_sum / n) * static_cast<double>(unlisted);
  return TokenDistribution::sparse(vocab, std::move(entries), tail_mass);
}

}  // namespace

TokenDistribution bag_of_distributions(
    std::span<const TokenDistribution> steps) {
  if (steps.empty()) {
    raise(ErrorKind::kInput, "bag of distributions needs at least one step");
  }
  const std::size_t vocab = steps.front().vocab_size();
  bool all_sparse = true;
  for (const auto& s : steps) {
    if (s.vocab_size() != vocab) {
      raise(ErrorKind::kInput, "mismatched vocab sizes in bag (" +
                                   std::to_string(vocab) + " vs " +
                                   std::to_string(s.vocab_size()) + ")");
    }
    all_sparse = all_sparse && !s.is_dense();
  }
  if (steps.size() == 1) return steps.front();
  if (all_sparse) return sparse_bag(steps);

  std::vector<double> sums(vocab, 0.0);
  for (const auto& s : steps) {
    if (s.is_dense()) {
      const auto probs = s.probs();
      for (std::size_t i = 0; i < vocab; ++i) sums[i] += probs[i];
    } else {
      const TokenDistribution full = densify(s);
      const auto probs = full.probs();
      for (std::size_t i = 0; i < vocab; ++i) sums[i] += probs[i];
    }
  }
  const double n = static_cast<double>(steps.size());
  for (double& v : sums) v /= n;
  return TokenDistribution::dense(std::move(sums));
}

double max_probability(const TokenDistribution& d) {
  if (d.is_dense()) {
    return *std::max_element(d.probs().begin(), d.probs().end());
  }
  double best = d.tail_per_token();
  for (const auto& e : d.entries()) best = std::max(best, e.prob);
  return best;
}

void validate_step(const StepRecord& step) {
  if (!step.distribution && !step.logits) {
    raise(ErrorKind::kInput, "step has neither probs nor logits");
  }
  if (step.distribution && step.logits) {
    if (step.distribution->vocab_size() != step.logits->vocab_size()) {
      raise(ErrorKind::kInput, "probs and logits disagree on vocab_size");
    }
    if (step.distribution->is_dense()) {
      const TokenDistribution expected =
          softmax_with_temperature(*step.logits, 1.0);
      const auto a = step.distribution->probs();
      const auto b = expected.probs();
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - b[i]) > kLogitConsistencyTolerance) {
          raise(ErrorKind::kInput,
                "probs inconsistent with softmax(logits) at index " +
                    std::to_string(i));
        }
      }
    }
  }
  if (step.chosen_logprob) {
    const double lp = *step.chosen_logprob;
    if (std::isnan(lp) || lp > 0.0) {
      raise(ErrorKind::kInput, "chosen_logprob must be <= 0");
    }
  }
}

void validate_sample(const SampleRecord& sample) {
  if (sample.steps.empty()) {
    raise(ErrorKind::kInput, "sample '" + sample.id + "' has no steps");
  }
  const std::size_t vocab = sample.steps.front().vocab_size();
  for (const auto& step : sample.steps) {
    validate_step(step);
    if (step.vocab_size() != vocab) {
      raise(ErrorKind::kInput,
            "sample '" + sample.id + "' mixes vocab sizes");
    }
  }
}

TokenDistribution step_distribution(const StepRecord& step,
                                    double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    raise(ErrorKind::kParameter, "temperature must be positive and finite");
  }
  if (temperature == 1.0 && step.distribution) return *step.distribution;
  if (step.logits) return softmax_with_temperature(*step.logits, temperature);
  if (step.distribution) {
    raise(ErrorKind::kConfiguration,
          "logits required when temperature != 1");
  }
  raise(ErrorKind::kInput, "step has neither probs nor logits");
}

std::vector<TokenDistribution> step_distributions(const SampleRecord& sample,
                                                  double temperature) {
  if (sample.steps.empty()) {
    raise(ErrorKind::kInput, "sample '" + sample.id + "' has no steps");
  }
  std::vector<TokenDistribution> out;
  out.reserve(sample.steps.size());
  for (const auto& step : sample.steps) {
    out.push_back(step_distribution(step, temperature));
  }
  return out;
}

}  // namespace oodkit
