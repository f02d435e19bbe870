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

#include "oodkit/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "oodkit/error.hpp"

namespace oodkit {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail_at(std::size_t line, ErrorKind kind,
                          const std::string& message) {
  raise(kind, "line " + std::to_string(line) + ": " + message);
}

double read_real(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf" || s == "+inf" || s == "Infinity") return kInf;
    if (s == "-inf" || s == "-Infinity") return -kInf;
  }
  raise(ErrorKind::kInput, what + " must be a number");
}

ordered_json real_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::vector<double> read_real_array(const json& j, const std::string& what) {
  if (!j.is_array()) raise(ErrorKind::kInput, what + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(read_real(v, what));
  return out;
}

TokenDistribution read_distribution(const json& j, std::size_t vocab_size,
                                    const std::string& what) {
  if (j.is_array()) {
    auto probs = read_real_array(j, what);
    if (probs.size() != vocab_size) {
      raise(ErrorKind::kInput, what + " has " + std::to_string(probs.size()) +
                                   " entries, vocab_size is " +
                                   std::to_string(vocab_size));
    }
    return validate(TokenDistribution::dense(std::move(probs)));
  }
  if (j.is_object() && j.contains("topk")) {
    const auto& topk = j.at("topk");
    if (!topk.is_array()) raise(ErrorKind::kInput, what + ".topk must be an array");
    std::vector<SparseEntry> entries;
    entries.reserve(topk.size());
    for (const auto& pair : topk) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer()) {
        raise(ErrorKind::kInput, what + ".topk entries must be [token_id, prob]");
      }
      const auto token = pair[0].get<long long>();
      if (token < 0) raise(ErrorKind::kValidation, "negative token id");
      entries.push_back({static_cast<TokenId>(token), read_real(pair[1], what)});
    }
    const double tail =
        j.contains("tail_mass") ? read_real(j.at("tail_mass"), "tail_mass") : 0.0;
    return validate(
        TokenDistribution::sparse(vocab_size, std::move(entries), tail));
  }
  raise(ErrorKind::kInput, what + " must be an array or a {topk, tail_mass} object");
}

ordered_json distribution_json(const TokenDistribution& d) {
  if (d.is_dense()) {
    ordered_json arr = ordered_json::array();
    for (double p : d.probs()) arr.push_back(p);
    return arr;
  }
  ordered_json topk = ordered_json::array();
  for (const auto& e : d.entries()) {
    topk.push_back(ordered_json::array({e.token, e.prob}));
  }
  ordered_json obj;
  obj["topk"] = std::move(topk);
  obj["tail_mass"] = d.tail_mass();
  return obj;
}

SampleRecord sample_from_json(const json& j) {
  if (!j.is_object()) raise(ErrorKind::kInput, "record must be an object");
  SampleRecord s;
  if (!j.contains("id") || !j.at("id").is_string()) {
    raise(ErrorKind::kInput, "missing string field 'id'");
  }
  s.id = j.at("id").get<std::string>();
  if (!j.contains("vocab_size") || !j.at("vocab_size").is_number_integer() ||
      j.at("vocab_size").get<long long>() <= 0) {
    raise(ErrorKind::kInput, "'vocab_size' must be a positive integer");
  }
  const auto vocab = static_cast<std::size_t>(j.at("vocab_size").get<long long>());
  if (!j.contains("steps") || !j.at("steps").is_array() || j.at("steps").empty()) {
    raise(ErrorKind::kInput, "'steps' must be a non-empty array");
  }
  const auto& steps = j.at("steps");
  s.steps.reserve(steps.size());
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const auto& js = steps[t];
    const std::string where = "steps[" + std::to_string(t) + "]";
    if (!js.is_object()) raise(ErrorKind::kInput, where + " must be an object");
    StepRecord step;
    if (js.contains("probs")) {
      step.distribution = read_distribution(js.at("probs"), vocab, where + ".probs");
    }
    if (js.contains("logits")) {
      auto logits = read_real_array(js.at("logits"), where + ".logits");
      if (logits.size() != vocab) {
        raise(ErrorKind::kInput, where + ".logits length differs from vocab_size");
      }
      step.logits = LogitVector(std::move(logits));
    }
    if (js.contains("chosen_logprob")) {
      step.chosen_logprob = read_real(js.at("chosen_logprob"), "chosen_logprob");
    }
    s.steps.push_back(std::move(step));
  }
  if (j.contains("embedding")) {
    s.embedding = read_real_array(j.at("embedding"), "embedding");
  }
  if (j.contains("quality")) {
    const auto& q = j.at("quality");
    if (!q.is_object()) raise(ErrorKind::kInput, "'quality' must be an object");
    for (const auto& [key, value] : q.items()) {
      s.quality[key] = read_real(value, "quality." + key);
    }
  }
  if (j.contains("label")) {
    if (!j.at("label").is_string()) raise(ErrorKind::kInput, "'label' must be a string");
    s.label = parse_label(j.at("label").get<std::string>());
  }
  validate_sample(s);
  return s;
}

std::string dump(const ordered_json& j) { return j.dump(); }

}  // namespace

SampleRecord parse_sample(std::string_view text, std::size_t line) {
  try {
    return sample_from_json(json::parse(text));
  } catch (const json::exception& e) {
    fail_at(line, ErrorKind::kInput, e.what());
  } catch (const Error& e) {
    fail_at(line, e.kind(), e.detail());
  }
}

std::string format_sample(const SampleRecord& sample) {
  ordered_json j;
  j["id"] = sample.id;
  j["vocab_size"] = sample.vocab_size();
  ordered_json steps = ordered_json::array();
  for (const auto& step : sample.steps) {
    ordered_json js = ordered_json::object();
    if (step.distribution) js["probs"] = distribution_json(*step.distribution);
    if (step.logits) {
      ordered_json arr = ordered_json::array();
      for (double v : step.logits->values()) arr.push_back(v);
      js["logits"] = std::move(arr);
    }
    if (step.chosen_logprob) js["chosen_logprob"] = real_json(*step.chosen_logprob);
    steps.push_back(std::move(js));
  }
  j["steps"] = std::move(steps);
  if (sample.embedding) {
    ordered_json arr = ordered_json::array();
    for (double v : *sample.embedding) arr.push_back(real_json(v));
    j["embedding"] = std::move(arr);
  }
  if (!sample.quality.empty()) {
    ordered_json q = ordered_json::object();
    for (const auto& [key, value] : sample.quality) q[key] = real_json(value);
    j["quality"] = std::move(q);
  }
  if (sample.label != Label::kUnknown) j["label"] = std::string(to_string(sample.label));
  return dump(j);
}

SampleReader::SampleReader(const std::string& path) : in_(path), path_(path) {
  if (!in_) raise(ErrorKind::kIo, "cannot open '" + path + "'");
}

std::optional<SampleRecord> SampleReader::next() {
  std::string text;
  while (std::getline(in_, text)) {
    ++line_;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    SampleRecord s = parse_sample(text, line_);
    if (vocab_size_ == 0) {
      vocab_size_ = s.vocab_size();
    } else if (s.vocab_size() != vocab_size_) {
      fail_at(line_, ErrorKind::kInput,
              "vocab_size " + std::to_string(s.vocab_size()) +
                  " differs from earlier records (" + std::to_string(vocab_size_) +
                  ")");
    }
    if (s.embedding) {
      if (!embedding_dim_) {
        embedding_dim_ = s.embedding->size();
      } else if (*embedding_dim_ != s.embedding->size()) {
        fail_at(line_, ErrorKind::kInput, "embedding dimension differs from earlier records");
      }
    }
    return s;
  }
  if (in_.bad()) raise(ErrorKind::kIo, "read failure on '" + path_ + "'");
  return std::nullopt;
}

std::vector<SampleRecord> load_samples(const std::string& path) {
  SampleReader reader(path);
  std::vector<SampleRecord> out;
  while (auto s = reader.next()) out.push_back(std::move(*s));
  return out;
}

void save_samples(std::span<const SampleRecord> samples, const std::string& path) {
  std::string content;
  for (const auto& s : samples) {
    content += format_sample(s);
    content += '\n';
  }
  write_text_file(path, content);
}

std::string format_reference(const ReferenceSet& ref) {
  std::string out;
  ordered_json header;
  header["format"] = "oodkit-reference";
  header["version"] = 1;
  header["vocab_size"] = ref.vocab_size();
  header["count"] = ref.size();
  header["measure_agnostic"] = true;
  out += dump(header) + "\n";
  for (const auto& bag : ref.bags()) {
    ordered_json line;
    line["source_id"] = bag.source_id;
    line["bag"] = distribution_json(bag.bag);
    out += dump(line) + "\n";
  }
  if (ref.maha()) {
    const auto& m = *ref.maha();
    ordered_json maha;
    maha["dim"] = m.dim();
    maha["mean"] = m.mean;
    maha["inverse_covariance"] = m.inverse_covariance;
    maha["shrinkage"] = m.shrinkage;
    ordered_json line;
    line["maha"] = std::move(maha);
    out += dump(line) + "\n";
  }
  return out;
}

ReferenceSet parse_reference(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line_text;
  std::size_t line = 0;
  std::optional<std::size_t> count;
  std::size_t vocab = 0;
  std::vector<ReferenceBag> bags;
  std::optional<MahalanobisStats> maha;
  try {
    while (std::getline(in, line_text)) {
      ++line;
      if (line_text.find_first_not_of(" \t\r") == std::string::npos) continue;
      const json j = json::parse(line_text);
      if (!count) {
        if (!j.is_object() || j.value("format", "") != "oodkit-reference") {
          fail_at(line, ErrorKind::kInput, "missing oodkit-reference header");
        }
        count = j.at("count").get<std::size_t>();
        vocab = j.at("vocab_size").get<std::size_t>();
        if (vocab == 0) fail_at(line, ErrorKind::kInput, "vocab_size must be positive");
        continue;
      }
      if (j.contains("maha")) {
        if (maha) fail_at(line, ErrorKind::kInput, "duplicate maha block");
        const auto& m = j.at("maha");
        MahalanobisStats stats;
        stats.mean = read_real_array(m.at("mean"), "maha.mean");
        stats.inverse_covariance =
            read_real_array(m.at("inverse_covariance"), "maha.inverse_covariance");
        stats.shrinkage = read_real(m.at("shrinkage"), "maha.shrinkage");
        if (m.contains("dim") && m.at("dim").get<std::size_t>() != stats.dim()) {
          fail_at(line, ErrorKind::kInput, "maha.dim does not match mean length");
        }
        maha = std::move(stats);
        continue;
      }
      if (maha) fail_at(line, ErrorKind::kInput, "bag line after the maha block");
      if (bags.size() == *count) {
        fail_at(line, ErrorKind::kInput,
                "more bag lines than the header count " + std::to_string(*count));
      }
      ReferenceBag bag{j.at("source_id").get<std::string>(),
                       read_distribution(j.at("bag"), vocab, "bag")};
      bags.push_back(std::move(bag));
    }
  } catch (const json::exception& e) {
    fail_at(line, ErrorKind::kInput, e.what());
  } catch (const Error& e) {
    if (e.detail().starts_with("line ")) throw;
    fail_at(line, e.kind(), e.detail());
  }
  if (!count) raise(ErrorKind::kInput, "reference file is empty");
  if (bags.size() != *count) {
    raise(ErrorKind::kInput, "count mismatch: header says " + std::to_string(*count) +
                                 " bags, file has " + std::to_string(bags.size()));
  }
  return ReferenceSet(std::move(bags), std::move(maha));
}

void save_reference(const ReferenceSet& ref, const std::string& path) {
  write_text_file(path, format_reference(ref));
}

ReferenceSet load_reference(const std::string& path) {
  return parse_reference(read_text_file(path));
}

ReportFormat format_for_path(const std::string& path) {
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() &&
           path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  return ends_with(".csv") || ends_with(".tsv") ? ReportFormat::kTable
                                                : ReportFormat::kStructured;
}

std::string format_table_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

std::string render_table(std::span<const std::string> header,
                         std::span<const std::vector<std::string>> rows,
                         char delimiter) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) out += delimiter;
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += delimiter;
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

std::string detector_to_json(const DetectorConfig& config) {
  ordered_json j;
  j["name"] = detector_name(config);
  if (config.kind == DetectorKind::kNegentropy ||
      config.kind == DetectorKind::kProjection) {
    j["measure"] = to_string(config.measure);
    if (config.measure.kind == MeasureKind::kRenyi) j["alpha"] = config.measure.alpha;
  }
  j["temperature"] = config.temperature;
  if (config.kind == DetectorKind::kExternal) j["external_key"] = config.external_key;
  if (config.kind == DetectorKind::kProjection) {
    j["reverse_projection"] = config.reverse_projection;
  }
  j["negate_raw"] = config.negate_raw();
  return dump(j);
}

namespace {

void add_context(ordered_json& j, const ReportContext& context) {
  if (context.detector_json) j["detector"] = ordered_json::parse(*context.detector_json);
  if (context.threshold) {
    const auto& t = *context.threshold;
    ordered_json th;
    th["gamma"] = real_json(t.gamma);
    th["keep_rate_target"] = t.keep_rate_target;
    th["achieved_keep_rate"] = t.achieved_keep_rate;
    th["n_calibration"] = t.n_calibration;
    th["n_dropped"] = t.n_dropped;
    j["threshold"] = std::move(th);
  }
  if (!context.manifest.empty()) j["manifest"] = context.manifest;
}

ordered_json opt_real(const std::optional<double>& v) {
  return v ? real_json(*v) : ordered_json(nullptr);
}

ordered_json subset_json(const SubsetFilter& f) {
  ordered_json j;
  j["n"] = f.n;
  j["kept"] = f.kept;
  j["unfiltered_quality"] = real_json(f.unfiltered_quality);
  j["absolute_quality"] = opt_real(f.absolute_quality);
  j["gain"] = opt_real(f.gain);
  j["removed_share"] = f.removed_share;
  return j;
}

ordered_json filter_json(const FilterReport& r) {
  ordered_json j;
  j["gamma"] = real_json(r.gamma);
  j["quality_key"] = r.quality_key;
  j["IN"] = subset_json(r.in);
  j["OOD"] = subset_json(r.ood);
  j["ALL"] = subset_json(r.all);
  return j;
}

std::string opt_cell(const std::optional<double>& v) {
  return v ? format_table_real(*v) : std::string();
}

std::vector<std::vector<std::string>> filter_rows(const FilterReport& r) {
  std::vector<std::vector<std::string>> rows;
  const std::pair<const char*, const SubsetFilter*> subsets[] = {
      {"IN", &r.in}, {"OOD", &r.ood}, {"ALL", &r.all}};
  for (const auto& [name, f] : subsets) {
    rows.push_back({name, std::to_string(f->n), std::to_string(f->kept),
                    format_table_real(f->unfiltered_quality),
                    opt_cell(f->absolute_quality), opt_cell(f->gain),
                    format_table_real(f->removed_share)});
  }
  return rows;
}

const std::vector<std::string> kFilterHeader = {
    "subset", "n", "kept", "unfiltered_quality", "absolute_quality", "gain",
    "removed_share"};

}  // namespace

std::string render_scores(std::span<const ScoredSample> scores,
                          ReportFormat format, const ReportContext& context) {
  if (format == ReportFormat::kTable) {
    const std::vector<std::string> header = {"id", "raw_score", "anomaly_score"};
    std::vector<std::vector<std::string>> rows;
    rows.reserve(scores.size());
    for (const auto& s : scores) {
      rows.push_back({s.id, format_table_real(s.raw_score),
                      format_table_real(s.anomaly_score)});
    }
    return render_table(header, rows);
  }
  ordered_json j;
  j["format"] = "oodkit-scores";
  j["version"] = 1;
  ReportContext ctx = context;
  if (!ctx.detector_json && !scores.empty()) {
    ctx.detector_json = detector_to_json(scores.front().detector);
  }
  add_context(j, ctx);
  ordered_json rows = ordered_json::array();
  for (const auto& s : scores) {
    ordered_json row;
    row["id"] = s.id;
    row["raw_score"] = real_json(s.raw_score);
    row["anomaly_score"] = real_json(s.anomaly_score);
    rows.push_back(std::move(row));
  }
  j["scores"] = std::move(rows);
  return j.dump(1) + "\n";
}

std::string render_evaluation(const Evaluation& evaluation, ReportFormat format,
                              const ReportContext& context) {
  const EvalReport& r = evaluation.report;
  if (format == ReportFormat::kTable) {
    std::vector<std::string> header = {
        "auroc", "fpr_at_tpr", "tpr_target", "tpr_achieved", "threshold_at_tpr",
        "aupr_in", "aupr_out", "detection_error", "n_in", "n_out"};
    std::vector<std::string> row = {
        format_table_real(r.auroc),           format_table_real(r.fpr_at_tpr),
        format_table_real(r.tpr_target),      format_table_real(r.tpr_achieved),
        format_table_real(r.threshold_at_tpr), format_table_real(r.aupr_in),
        format_table_real(r.aupr_out),        format_table_real(r.detection_error),
        std::to_string(r.n_in),               std::to_string(r.n_out)};
    if (r.threshold_metrics) {
      const auto& m = *r.threshold_metrics;
      for (const char* name : {"gamma", "precision", "recall", "f1", "fpr", "tpr"}) {
        header.emplace_back(name);
      }
      for (double v : {m.gamma, m.precision, m.recall, m.f1, m.fpr, m.tpr}) {
        row.push_back(format_table_real(v));
      }
    }
    std::vector<std::vector<std::string>> rows = {row};
    std::string out = render_table(header, rows);
    if (evaluation.filter) {
      out += "\n" + render_table(kFilterHeader, filter_rows(*evaluation.filter));
    }
    if (!evaluation.correlations.empty()) {
      std::vector<std::vector<std::string>> crow;
      for (const auto& c : evaluation.correlations) {
        crow.push_back({std::string(to_string(c.subset)), c.quality_key,
                        std::to_string(c.n), opt_cell(c.pearson),
                        format_table_real(c.spearman)});
      }
      const std::vector<std::string> ch = {"subset", "quality_key", "n", "pearson",
                                           "spearman"};
      out += "\n" + render_table(ch, crow);
    }
    return out;
  }

  ordered_json j;
  j["format"] = "oodkit-eval";
  j["version"] = 1;
  add_context(j, context);
  ordered_json m;
  m["auroc"] = r.auroc;
  m["fpr_at_tpr"] = r.fpr_at_tpr;
  m["tpr_target"] = r.tpr_target;
  m["tpr_achieved"] = r.tpr_achieved;
  m["threshold_at_tpr"] = real_json(r.threshold_at_tpr);
  m["aupr_in"] = r.aupr_in;
  m["aupr_out"] = r.aupr_out;
  m["detection_error"] = r.detection_error;
  m["detection_error_definition"] =
      "0.5*(1-TPR)+0.5*FPR at the largest observed threshold with TPR>=tpr_target";
  m["n_in"] = r.n_in;
  m["n_out"] = r.n_out;
  if (r.threshold_metrics) {
    const auto& t = *r.threshold_metrics;
    ordered_json tm;
    tm["gamma"] = real_json(t.gamma);
    tm["precision"] = t.precision;
    tm["recall"] = t.recall;
    tm["f1"] = t.f1;
    tm["fpr"] = t.fpr;
    tm["tpr"] = t.tpr;
    m["threshold_metrics"] = std::move(tm);
  }
  j["metrics"] = std::move(m);
  if (evaluation.filter) j["filter"] = filter_json(*evaluation.filter);
  if (!evaluation.correlations.empty()) {
    ordered_json arr = ordered_json::array();
    for (const auto& c : evaluation.correlations) {
      ordered_json cj;
      cj["subset"] = std::string(to_string(c.subset));
      cj["quality_key"] = c.quality_key;
      cj["n"] = c.n;
      cj["pearson"] = opt_real(c.pearson);
      cj["spearman"] = c.spearman;
      arr.push_back(std::move(cj));
    }
    j["correlations"] = std::move(arr);
  }
  return j.dump(1) + "\n";
}

std::string render_filter(const FilterReport& report, ReportFormat format,
                          const ReportContext& context) {
  if (format == ReportFormat::kTable) {
    return render_table(kFilterHeader, filter_rows(report));
  }
  ordered_json j;
  j["format"] = "oodkit-filter";
  j["version"] = 1;
  add_context(j, context);
  j["filter"] = filter_json(report);
  return j.dump(1) + "\n";
}

std::string render_threshold(const Threshold& threshold,
                             const ReportContext& context) {
  ordered_json j;
  j["format"] = "oodkit-threshold";
  j["version"] = 1;
  ReportContext ctx = context;
  ctx.threshold = threshold;
  add_context(j, ctx);
  return j.dump(1) + "\n";
}

ScoreFile load_scores(const std::string& path) {
  const std::string text = read_text_file(path);
  ScoreFile out;
  if (format_for_path(path) == ReportFormat::kStructured) {
    try {
      const json j = json::parse(text);
      if (j.value("format", "") != "oodkit-scores") {
        raise(ErrorKind::kInput, "'" + path + "' is not an oodkit-scores file");
      }
      if (j.contains("detector")) out.detector_json = j.at("detector").dump();
      for (const auto& row : j.at("scores")) {
        out.rows.push_back({row.at("id").get<std::string>(),
                            read_real(row.at("raw_score"), "raw_score"),
                            read_real(row.at("anomaly_score"), "anomaly_score")});
      }
    } catch (const json::exception& e) {
      raise(ErrorKind::kInput, "'" + path + "': " + e.what());
    }
    return out;
  }

  const char delimiter = path.ends_with(".tsv") ? '\t' : ',';
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  int id_col = -1, raw_col = -1, anomaly_col = -1;
  auto split = [&](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(s);
    while (std::getline(ls, cell, delimiter)) {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      cells.push_back(cell);
    }
    return cells;
  };
  auto parse_cell = [&](const std::string& cell) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size()) {
      fail_at(line_no, ErrorKind::kInput, "not a number: '" + cell + "'");
    }
    return v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (id_col < 0) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] == "id") id_col = static_cast<int>(i);
        if (cells[i] == "raw_score") raw_col = static_cast<int>(i);
        if (cells[i] == "anomaly_score") anomaly_col = static_cast<int>(i);
      }
      if (id_col < 0 || anomaly_col < 0) {
        fail_at(line_no, ErrorKind::kInput, "header must contain id and anomaly_score");
      }
      continue;
    }
    const auto needed = static_cast<std::size_t>(std::max({id_col, raw_col, anomaly_col}));
    if (cells.size() <= needed) fail_at(line_no, ErrorKind::kInput, "short row");
    ScoreRow row;
    row.id = cells[static_cast<std::size_t>(id_col)];
    row.anomaly_score = parse_cell(cells[static_cast<std::size_t>(anomaly_col)]);
    row.raw_score = raw_col >= 0 ? parse_cell(cells[static_cast<std::size_t>(raw_col)])
                                 : row.anomaly_score;
    out.rows.push_back(std::move(row));
  }
  if (id_col < 0) raise(ErrorKind::kInput, "'" + path + "' has no header");
  return out;
}

Threshold load_threshold(const std::string& path) {
  try {
    const json j = json::parse(read_text_file(path));
    const auto& t = j.at("threshold");
    Threshold out;
    out.gamma = read_real(t.at("gamma"), "gamma");
    out.keep_rate_target = t.at("keep_rate_target").get<double>();
    out.achieved_keep_rate = t.at("achieved_keep_rate").get<double>();
    out.n_calibration = t.value("n_calibration", std::size_t{0});
    out.n_dropped = t.value("n_dropped", std::size_t{0});
    return out;
  } catch (const json::exception& e) {
    raise(ErrorKind::kInput, "'" + path + "': " + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) raise(ErrorKind::kIo, "read failure on '" + path + "'");
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorKind::kIo, "cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) raise(ErrorKind::kIo, "write failure on '" + path + "'");
}

}  // namespace oodkit
