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

// File formats.
//
// Sample files are line-delimited JSON, one SampleRecord per line:
//
//   {"id": "s1", "vocab_size": 4,
//    "steps": [{"probs": [0.7, 0.1, 0.1, 0.1], "logits": [...],
//               "chosen_logprob": -0.35},
//              {"probs": {"topk": [[0, 0.6], [3, 0.2]], "tail_mass": 0.2}}],
//    "embedding": [0.1, -0.3], "quality": {"bleu": 31.5}, "label": "IN"}
//
// Reference files are line-delimited JSON as well:
//
//   {"format": "oodkit-reference", "version": 1, "vocab_size": V,
//    "count": N, "measure_agnostic": true}
//   {"source_id": "s1", "bag": [...]}                  (N lines)
//   {"maha": {"dim": d, "mean": [...], "inverse_covariance": [...],
//             "shrinkage": 0.01}}                      (optional)
//
// Non-finite reals are written as the strings "inf" / "-inf". Structured
// output keeps full round-trip precision; tables use 6 significant digits.

#ifndef OODKIT_IO_HPP_
#define OODKIT_IO_HPP_

#include <cstddef>
#include <fstream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oodkit/calibration.hpp"
#include "oodkit/detectors.hpp"
#include "oodkit/distrib.hpp"
#include "oodkit/eval.hpp"
#include "oodkit/reference.hpp"

namespace oodkit {

// Streams SampleRecords from a line-delimited file. Blank lines are skipped.
// Errors carry the 1-based line number.
class SampleReader {
 public:
  explicit SampleReader(const std::string& path);

  std::optional<SampleRecord> next();

  std::size_t line_number() const noexcept { return line_; }

 private:
  std::ifstream in_;
  std::string path_;
  std::size_t line_ = 0;
  std::size_t vocab_size_ = 0;
  std::optional<std::size_t> embedding_dim_;
};

// Parses and validates one sample line. `line` is used in error messages.
SampleRecord parse_sample(std::string_view text, std::size_t line = 1);
std::string format_sample(const SampleRecord& sample);

std::vector<SampleRecord> load_samples(const std::string& path);
void save_samples(std::span<const SampleRecord> samples,
                  const std::string& path);

std::string format_reference(const ReferenceSet& ref);
ReferenceSet parse_reference(std::string_view text);
void save_reference(const ReferenceSet& ref, const std::string& path);
ReferenceSet load_reference(const std::string& path);

enum class ReportFormat { kStructured, kTable };

// kTable for .csv and .tsv paths, kStructured otherwise.
ReportFormat format_for_path(const std::string& path);

struct ReportContext {
  std::optional<std::string> detector_json;
  std::optional<Threshold> threshold;
  std::string manifest;  // file name of the run manifest, if any
};

std::string detector_to_json(const DetectorConfig& config);

std::string render_scores(std::span<const ScoredSample> scores,
                          ReportFormat format, const ReportContext& context = {});

struct Evaluation {
  EvalReport report;
  std::optional<FilterReport> filter;
  std::vector<Correlation> correlations;
};

std::string render_evaluation(const Evaluation& evaluation, ReportFormat format,
                              const ReportContext& context = {});
std::string render_filter(const FilterReport& report, ReportFormat format,
                          const ReportContext& context = {});
std::string render_threshold(const Threshold& threshold,
                             const ReportContext& context = {});

// Renders a delimited table; every cell is already formatted.
std::string render_table(std::span<const std::string> header,
                         std::span<const std::vector<std::string>> rows,
                         char delimiter = ',');

// %.6g, with "inf" / "-inf" / "nan" for non-finite values.
std::string format_table_real(double value);

struct ScoreRow {
  std::string id;
  double raw_score = 0.0;
  double anomaly_score = 0.0;
};

struct ScoreFile {
  std::vector<ScoreRow> rows;
  std::optional<std::string> detector_json;
};

// Reads scores written by render_scores in either format.
ScoreFile load_scores(const std::string& path);

Threshold load_threshold(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace oodkit

#endif  // OODKIT_IO_HPP_
