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

#include "oodkit/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "oodkit/error.hpp"

namespace oodkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_compatible(const TokenDistribution& p, const TokenDistribution& q) {
  if (p.vocab_size() != q.vocab_size()) {
    raise(ErrorKind::kInput, "vocab size mismatch (" +
                                 std::to_string(p.vocab_size()) + " vs " +
                                 std::to_string(q.vocab_size()) + ")");
  }
}

// Sum over the vocabulary of term(p_i, q_i).
template <typename Term>
double sum_terms(const TokenDistribution& p, const TokenDistribution& q,
                 Term term) {
  check_compatible(p, q);
  if (!p.is_dense() && !q.is_dense()) {
    const double tp = p.tail_per_token();
    const double tq = q.tail_per_token();
    auto ip = p.entries().begin();
    auto iq = q.entries().begin();
    const auto ep = p.entries().end();
    const auto eq = q.entries().end();
    double sum = 0.0;
    std::size_t listed = 0;
    while (ip != ep || iq != eq) {
      if (iq == eq || (ip != ep && ip->token < iq->token)) {
        sum += term(ip->prob, tq);
        ++ip;
      } else if (ip == ep || iq->token < ip->token) {
        sum += term(tp, iq->prob);
        ++iq;
      } else {
        sum += term(ip->prob, iq->prob);
        ++ip;
        ++iq;
      }
      ++listed;
    }
    const std::size_t unlisted = p.vocab_size() - listed;
    if (unlisted > 0) {
      const double t = term(tp, tq);
      if (t != 0.0) sum += static_cast<double>(unlisted) * t;
    }
    return sum;
  }
  const TokenDistribution dp = p.is_dense() ? p : densify(p);
  const TokenDistribution dq = q.is_dense() ? q : densify(q);
  const auto a = dp.probs();
  const auto b = dq.probs();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += term(a[i], b[i]);
  return sum;
}

}  // namespace

MeasureSpec MeasureSpec::renyi(double alpha) {
  MeasureSpec spec{MeasureKind::kRenyi, alpha};
  spec.check();
  return spec;
}

void MeasureSpec::check() const {
  if (kind != MeasureKind::kRenyi) return;
  if (!std::isfinite(alpha) || alpha <= 0.0) {
    raise(ErrorKind::kParameter, "renyi alpha must be positive and finite");
  }
  if (alpha == 1.0) {
    raise(ErrorKind::kParameter,
          "renyi alpha must differ from 1 (use the KL measure)");
  }
}

std::string to_string(const MeasureSpec& spec) {
  switch (spec.kind) {
    case MeasureKind::kRenyi: {
      std::ostringstream os;
      os << "renyi(" << spec.alpha << ")";
      return os.str();
    }
    case MeasureKind::kKl:
      return "kl";
    case MeasureKind::kFisherRao:
      return "fisher_rao";
  }
  return "unknown";
}

double renyi_divergence(const TokenDistribution& p, const TokenDistribution& q,
                        double alpha) {
  MeasureSpec{MeasureKind::kRenyi, alpha}.check();
  const double sum = sum_terms(p, q, [alpha](double pi, double qi) {
    if (pi == 0.0) return 0.0;
    if (qi == 0.0) return alpha > 1.0 ? kInf : 0.0;
    return std::pow(pi, alpha) * std::pow(qi, 1.0 - alpha);
  });
  if (sum == kInf) return kInf;
  // For alpha < 1 a zero sum (disjoint supports) gives log(0) / negative = +inf.
  const double d = std::log(sum) / (alpha - 1.0);
  return std::max(d, 0.0);
}

double kl_divergence(const TokenDistribution& p, const TokenDistribution& q) {
  const double sum = sum_terms(p, q, [](double pi, double qi) {
    if (pi == 0.0) return 0.0;
    if (qi == 0.0) return kInf;
    return pi * std::log(pi / qi);
  });
  return std::max(sum, 0.0);
}

// arccos(BC) loses about half the digits when BC is near 1, so the angle is
// taken from the squared Hellinger distance instead:
//   1 - BC = h / 2 with h = sum (sqrt p - sqrt q)^2, and
//   arccos(BC) = 2 asin(sqrt(h) / 2).
// The argument is clamped to [0, 1], which plays the role of clamping BC.
double fisher_rao(const TokenDistribution& p, const TokenDistribution& q) {
  const double h = sum_terms(p, q, [](double pi, double qi) {
    const double d = std::sqrt(pi) - std::sqrt(qi);
    return d * d;
  });
  const double half_chord = std::clamp(std::sqrt(h) / 2.0, 0.0, 1.0);
  return (4.0 / std::numbers::pi) * std::asin(half_chord);
}

double measure(const TokenDistribution& p, const TokenDistribution& q,
               const MeasureSpec& spec) {
  switch (spec.kind) {
    case MeasureKind::kRenyi:
      return renyi_divergence(p, q, spec.alpha);
    case MeasureKind::kKl:
      return kl_divergence(p, q);
    case MeasureKind::kFisherRao:
      return fisher_rao(p, q);
  }
  raise(ErrorKind::kParameter, "unknown measure kind");
}

double negentropy(const TokenDistribution& p, const MeasureSpec& spec) {
  const TokenDistribution u = p.is_dense()
                                  ? densify(uniform_distribution(p.vocab_size()))
                                  : uniform_distribution(p.vocab_size());
  return measure(p, u, spec);
}

}  // namespace oodkit
