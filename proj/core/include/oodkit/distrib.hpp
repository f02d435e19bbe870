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

// Token-level probability distributions and the records that carry them.
//
// A TokenDistribution is either dense (one probability per vocabulary entry)
// or sparse: the top-k entries plus a single tail mass that is spread
// uniformly over the vocab_size - k unlisted tokens. The sparse form keeps
// the vocabulary dimension, so every measure stays well defined on it.

#ifndef OODKIT_DISTRIB_HPP_
#define OODKIT_DISTRIB_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oodkit {

using TokenId = std::uint32_t;

// Absolute tolerance on total mass. Within it a distribution is renormalized,
// beyond it rejected.
inline constexpr double kMassTolerance = 1e-6;

// Deviation below which a distribution is considered already normalized and
// left bit-for-bit unchanged by validate().
inline constexpr double kExactMassTolerance = 1e-9;

// Per-entry tolerance between exported probabilities and softmax(logits).
inline constexpr double kLogitConsistencyTolerance = 1e-4;

struct SparseEntry {
  TokenId token = 0;
  double prob = 0.0;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

class TokenDistribution {
 public:
  // Structural invariants (non-empty vocabulary, ids in range, unique ids,
  // k <= vocab_size) are checked here; mass invariants are checked by
  // validate().
  static TokenDistribution dense(std::vector<double> probs);
  static TokenDistribution sparse(std::size_t vocab_size,
                                  std::vector<SparseEntry> entries,
                                  double tail_mass);

  std::size_t vocab_size() const noexcept { return vocab_size_; }
  bool is_dense() const noexcept { return dense_; }

  // Dense storage; empty for sparse distributions.
  std::span<const double> probs() const noexcept { return probs_; }

  // Sparse storage, sorted by token id; empty for dense distributions.
  std::span<const SparseEntry> entries() const noexcept { return entries_; }
  double tail_mass() const noexcept { return tail_mass_; }

  // Number of explicitly stored tokens (vocab_size for dense).
  std::size_t listed_count() const noexcept {
    return dense_ ? vocab_size_ : entries_.size();
  }

  // Probability of each unlisted token; 0 for dense or fully listed sparse.
  double tail_per_token() const noexcept;

  double total_mass() const noexcept;

  friend bool operator==(const TokenDistribution&,
                         const TokenDistribution&) = default;

 private:
  TokenDistribution() = default;

  std::size_t vocab_size_ = 0;
  bool dense_ = true;
  std::vector<double> probs_;
  std::vector<SparseEntry> entries_;
  double tail_mass_ = 0.0;
};

class LogitVector {
 public:
  // Rejects empty vectors and non-finite values with an input error.
  explicit LogitVector(std::vector<double> values);

  std::size_t vocab_size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const LogitVector&, const LogitVector&) = default;

 private:
  std::vector<double> values_;
};

struct StepRecord {
  std::optional<TokenDistribution> distribution;
  std::optional<LogitVector> logits;
  // log p(chosen token | prefix), natural log, <= 0.
  std::optional<double> chosen_logprob;

  std::size_t vocab_size() const;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

enum class Label { kIn, kOod, kUnknown };

std::string_view to_string(Label label);
// Accepts "IN", "OOD" and "UNKNOWN".
Label parse_label(std::string_view text);

struct SampleRecord {
  std::string id;
  std::vector<StepRecord> steps;
  std::optional<std::vector<double>> embedding;
  std::map<std::string, double> quality;
  Label label = Label::kUnknown;

  std::size_t vocab_size() const;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

// Numerically stable softmax of logits / temperature.
TokenDistribution softmax_with_temperature(const LogitVector& logits,
                                           double temperature);

// Returns `d` unchanged when its mass is within kExactMassTolerance of 1,
// a renormalized copy when within kMassTolerance, and throws otherwise.
TokenDistribution validate(const TokenDistribution& d);

TokenDistribution densify(const TokenDistribution& d);

// Keeps the k most probable tokens (ties by lower id); the rest becomes the
// tail mass.
TokenDistribution sparsify_topk(const TokenDistribution& d, std::size_t k);

// Uniform distribution over `vocab_size` tokens, stored as an empty sparse
// list with tail mass 1.
TokenDistribution uniform_distribution(std::size_t vocab_size);

// Arithmetic mean of the step distributions. The result is sparse when every
// input is sparse, dense otherwise.
TokenDistribution bag_of_distributions(std::span<const TokenDistribution> steps);

double max_probability(const TokenDistribution& d);

// Checks the StepRecord invariants: a distribution or logits present, equal
// vocabulary sizes, and dense probabilities consistent with softmax(logits).
void validate_step(const StepRecord& step);

// Checks non-empty steps, a shared vocabulary size, and every step.
void validate_sample(const SampleRecord& sample);

// The distribution a detector sees for one step at `temperature`: the stored
// distribution when temperature is 1, otherwise softmax(logits / T). Throws a
// configuration error when temperature != 1 and no logits are present.
TokenDistribution step_distribution(const StepRecord& step, double temperature);

std::vector<TokenDistribution> step_distributions(const SampleRecord& sample,
                                                  double temperature);

}  // namespace oodkit

#endif  // OODKIT_DISTRIB_HPP_
