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

#include "cli.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "oodkit/calibration.hpp"
#include "oodkit/detectors.hpp"
#include "oodkit/error.hpp"
#include "oodkit/eval.hpp"
#include "oodkit/io.hpp"
#include "oodkit/reference.hpp"
#include "oodkit/synth.hpp"
#include "oodkit/version.hpp"

namespace oodkit::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Shared option plumbing

struct DetectorOptions {
  std::string detector = "negentropy-renyi";
  std::optional<double> alpha;
  std::optional<double> temperature;
  std::optional<std::string> measure;
  std::string external_key;
  bool negate = false;
  bool no_negate = false;
  bool reverse_projection = false;
};

void add_detector_options(CLI::App* cmd, DetectorOptions& o) {
  cmd->add_option("--detector", o.detector,
                  "negentropy-renyi | negentropy-kl | negentropy-fr | likelihood "
                  "| msp | energy | external | projection | mahalanobis")
      ->capture_default_str();
  cmd->add_option("--alpha", o.alpha,
                  "Renyi order (default 0.5 for negentropy-renyi, 0.1 for projection)");
  cmd->add_option("--temperature", o.temperature,
                  "softmax temperature (default 2 for negentropy-renyi, else 1)");
  cmd->add_option("--measure", o.measure, "projection measure: renyi | kl | fr");
  cmd->add_option("--external-key", o.external_key,
                  "quality field used by the external detector");
  auto* neg = cmd->add_flag("--negate", o.negate, "force anomaly = -raw");
  cmd->add_flag("--no-negate", o.no_negate, "force anomaly = raw")->excludes(neg);
  cmd->add_flag("--reverse-projection", o.reverse_projection,
                "projection evaluates measure(bag(x) || bag_r)");
}

MeasureSpec parse_measure(const std::string& name, double alpha) {
  if (name == "renyi") {
    if (alpha == 1.0) return MeasureSpec::kl();
    return MeasureSpec::renyi(alpha);
  }
  if (name == "kl") return MeasureSpec::kl();
  if (name == "fr" || name == "fisher-rao" || name == "fisher_rao") {
    return MeasureSpec::fisher_rao();
  }
  raise(ErrorKind::kParameter, "unknown measure '" + name + "'");
}

DetectorConfig make_detector(const DetectorOptions& o) {
  DetectorConfig c;
  const std::string& name = o.detector;
  if (name == "negentropy-renyi") {
    c.kind = DetectorKind::kNegentropy;
    const double alpha = o.alpha.value_or(0.5);
    c.measure = alpha == 1.0 ? MeasureSpec::kl() : MeasureSpec{MeasureKind::kRenyi, alpha};
    c.temperature = o.temperature.value_or(2.0);
  } else if (name == "negentropy-kl") {
    c.kind = DetectorKind::kNegentropy;
    c.measure = MeasureSpec::kl();
  } else if (name == "negentropy-fr") {
    c.kind = DetectorKind::kNegentropy;
    c.measure = MeasureSpec::fisher_rao();
  } else if (name == "likelihood") {
    c.kind = DetectorKind::kLikelihood;
  } else if (name == "msp") {
    c.kind = DetectorKind::kMsp;
  } else if (name == "energy") {
    c.kind = DetectorKind::kEnergy;
  } else if (name == "external") {
    c.kind = DetectorKind::kExternal;
    c.external_key = o.external_key;
  } else if (name == "projection") {
    c.kind = DetectorKind::kProjection;
    c.measure = parse_measure(o.measure.value_or("renyi"), o.alpha.value_or(0.1));
    c.reverse_projection = o.reverse_projection;
  } else if (name == "mahalanobis") {
    c.kind = DetectorKind::kMahalanobis;
  } else {
    raise(ErrorKind::kParameter, "unknown detector '" + name + "'");
  }
  if (name != "negentropy-renyi") c.temperature = o.temperature.value_or(1.0);
  if (o.negate) c.negate_override = true;
  if (o.no_negate) c.negate_override = false;
  if (c.kind == DetectorKind::kMsp || c.kind == DetectorKind::kLikelihood ||
      c.kind == DetectorKind::kEnergy || c.kind == DetectorKind::kExternal ||
      c.kind == DetectorKind::kMahalanobis) {
    if (o.measure) {
      raise(ErrorKind::kParameter, "--measure applies to projection only");
    }
  }
  c.check();
  return c;
}

bool needs_reference(const DetectorConfig& c) {
  return c.kind == DetectorKind::kProjection || c.kind == DetectorKind::kMahalanobis;
}

unsigned default_threads() {
  if (const char* env = std::getenv(kThreadsEnv)) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

double parse_real(const std::string& text, const std::string& what) {
  if (text == "inf" || text == "+inf") return kInf;
  if (text == "-inf") return -kInf;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || std::isnan(v)) {
    raise(ErrorKind::kParameter, what + ": not a number '" + text + "'");
  }
  return v;
}

std::vector<double> parse_grid(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = cell.find_last_not_of(" \t");
    out.push_back(parse_real(cell.substr(b, e - b + 1), what));
  }
  if (out.empty()) raise(ErrorKind::kParameter, what + " is empty");
  return out;
}

// ---------------------------------------------------------------------------
// Run manifest

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string manifest_path_for(const std::string& output) {
  return output + ".manifest.json";
}

std::string manifest_name_for(const std::string& output) {
  return std::filesystem::path(manifest_path_for(output)).filename().string();
}

struct RunManifest {
  std::string command;
  std::vector<std::string> args;
  std::string config;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string started = utc_now();
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void write() const {
    if (outputs.empty()) return;
    ordered_json j;
    j["format"] = "oodkit-manifest";
    j["toolkit_version"] = std::string(kVersion);
    j["command"] = command;
    j["args"] = args;
    j["config"] = config;
    ordered_json in = ordered_json::array();
    for (const auto& path : inputs) {
      in.push_back({{"path", path}, {"sha256", file_sha256(path)}});
    }
    j["inputs"] = std::move(in);
    j["outputs"] = outputs;
    const double elapsed = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    j["wall_clock"] = {{"started_utc", started}, {"elapsed_seconds", elapsed}};
    write_text_file(manifest_path_for(outputs.front()), j.dump(1) + "\n");
  }
};

// ---------------------------------------------------------------------------
// Commands

struct Session {
  std::ostream& out;
  std::ostream& err;
  bool manifest = true;
  std::vector<std::string> args;
  CLI::App* app = nullptr;
};

ReportContext context_for(const Session& s, const std::string& output) {
  ReportContext ctx;
  if (s.manifest) ctx.manifest = manifest_name_for(output);
  return ctx;
}

RunManifest manifest_for(const Session& s, const std::string& command) {
  RunManifest m;
  m.command = command;
  m.args = s.args;
  m.config = s.app->get_subcommand(command)->config_to_str(true, false);
  return m;
}

void finish(const Session& s, RunManifest& m) {
  if (s.manifest) m.write();
}

struct ScoreOptions {
  std::string input;
  std::string ref;
  std::string output;
  unsigned threads = default_threads();
  DetectorOptions detector;
};

int cmd_score(Session& s, const ScoreOptions& o) {
  const DetectorConfig config = make_detector(o.detector);
  std::optional<ReferenceSet> ref;
  if (needs_reference(config)) {
    if (o.ref.empty()) {
      raise(ErrorKind::kConfiguration, detector_name(config) + " requires --ref");
    }
    ref = load_reference(o.ref);
  }
  const auto samples = load_samples(o.input);
  const auto scores =
      score_batch(samples, config, ref ? &*ref : nullptr, std::max(1u, o.threads));

  RunManifest m = manifest_for(s, "score");
  m.inputs.push_back(o.input);
  if (!o.ref.empty()) m.inputs.push_back(o.ref);
  ReportContext ctx = context_for(s, o.output);
  ctx.detector_json = detector_to_json(config);
  const std::string text = render_scores(scores, format_for_path(o.output), ctx);
  write_text_file(o.output, text);
  m.outputs.push_back(o.output);
  finish(s, m);
  s.out << "scored " << scores.size() << " samples with " << detector_name(config)
        << " -> " << o.output << "\n";
  return kExitOk;
}

struct BuildRefOptions {
  std::string input;
  std::string output;
  bool with_mahalanobis = false;
  double shrinkage = kDefaultShrinkage;
  double temperature = 1.0;
  bool in_only = false;
};

std::vector<SampleRecord> load_reference_samples(const std::string& path,
                                                 bool in_only) {
  SampleReader reader(path);
  std::vector<SampleRecord> out;
  while (auto sample = reader.next()) {
    if (in_only && sample->label != Label::kIn) continue;
    out.push_back(std::move(*sample));
  }
  return out;
}

int cmd_build_ref(Session& s, const BuildRefOptions& o) {
  if (!(o.shrinkage >= 0.0 && o.shrinkage <= 1.0)) {
    raise(ErrorKind::kParameter, "--shrinkage must lie in [0, 1]");
  }
  const auto samples = load_reference_samples(o.input, o.in_only);
  BuildOptions options;
  options.with_mahalanobis = o.with_mahalanobis;
  options.shrinkage = o.shrinkage;
  options.temperature = o.temperature;
  const ReferenceSet ref = build_reference(samples, options);

  RunManifest m = manifest_for(s, "build-ref");
  m.inputs.push_back(o.input);
  save_reference(ref, o.output);
  m.outputs.push_back(o.output);
  finish(s, m);
  s.out << "reference with " << ref.size() << " bags"
        << (ref.maha() ? " and Mahalanobis statistics" : "") << " -> " << o.output
        << "\n";
  return kExitOk;
}

struct LabelInfo {
  Label label = Label::kUnknown;
  std::map<std::string, double> quality;
};

std::map<std::string, LabelInfo> load_labels(const std::string& path) {
  SampleReader reader(path);
  std::map<std::string, LabelInfo> out;
  while (auto sample = reader.next()) {
    if (out.contains(sample->id)) {
      raise(ErrorKind::kInput, "duplicate sample id '" + sample->id + "' in " + path);
    }
    out[sample->id] = {sample->label, std::move(sample->quality)};
  }
  return out;
}

std::vector<LabeledScore> join_labels(const ScoreFile& scores,
                                      const std::map<std::string, LabelInfo>& labels) {
  std::vector<LabeledScore> out;
  out.reserve(scores.rows.size());
  for (const auto& row : scores.rows) {
    const auto it = labels.find(row.id);
    if (it == labels.end()) {
      raise(ErrorKind::kInput, "score id '" + row.id + "' not found in label source");
    }
    out.push_back({row.id, row.anomaly_score, it->second.label, it->second.quality});
  }
  return out;
}

struct CalibrateOptions {
  std::string scores;
  std::string labels;
  std::string output;
  double keep_rate = kDefaultKeepRate;
};

int cmd_calibrate(Session& s, const CalibrateOptions& o) {
  const ScoreFile file = load_scores(o.scores);
  std::vector<double> values;
  if (!o.labels.empty()) {
    const auto labels = load_labels(o.labels);
    for (const auto& ls : join_labels(file, labels)) {
      if (ls.label == Label::kIn) values.push_back(ls.anomaly_score);
    }
  } else {
    for (const auto& row : file.rows) values.push_back(row.anomaly_score);
  }
  const Threshold t = calibrate(values, o.keep_rate);

  RunManifest m = manifest_for(s, "calibrate");
  m.inputs.push_back(o.scores);
  if (!o.labels.empty()) m.inputs.push_back(o.labels);
  ReportContext ctx = context_for(s, o.output);
  ctx.detector_json = file.detector_json;
  write_text_file(o.output, render_threshold(t, ctx));
  m.outputs.push_back(o.output);
  finish(s, m);
  s.out << "gamma=" << format_table_real(t.gamma)
        << " achieved_keep_rate=" << format_table_real(t.achieved_keep_rate) << "\n";
  return kExitOk;
}

struct EvaluateOptions {
  std::string scores;
  std::string labels;
  std::string output;
  double tpr = kDefaultTprTarget;
  std::string quality_key;
  std::string gamma;
  std::string threshold;
};

int cmd_evaluate(Session& s, const EvaluateOptions& o) {
  if (!o.gamma.empty() && !o.threshold.empty()) {
    raise(ErrorKind::kParameter, "use either --gamma or --threshold");
  }
  const ScoreFile file = load_scores(o.scores);
  const auto labels = load_labels(o.labels);
  const auto scored = join_labels(file, labels);

  ReportContext ctx = context_for(s, o.output);
  ctx.detector_json = file.detector_json;
  std::optional<double> gamma;
  if (!o.gamma.empty()) gamma = parse_real(o.gamma, "--gamma");
  if (!o.threshold.empty()) {
    ctx.threshold = load_threshold(o.threshold);
    gamma = ctx.threshold->gamma;
  }

  Evaluation ev;
  ev.report = evaluate(scored, o.tpr, gamma);
  if (!o.quality_key.empty()) {
    for (Subset subset : {Subset::kIn, Subset::kOod, Subset::kAll}) {
      try {
        ev.correlations.push_back(correlate(scored, o.quality_key, subset));
      } catch (const Error& e) {
        s.err << "warning: no correlation for " << to_string(subset) << ": "
              << e.detail() << "\n";
      }
    }
    if (gamma) ev.filter = filter_report(scored, *gamma, o.quality_key);
  }

  RunManifest m = manifest_for(s, "evaluate");
  m.inputs.push_back(o.scores);
  m.inputs.push_back(o.labels);
  if (!o.threshold.empty()) m.inputs.push_back(o.threshold);
  write_text_file(o.output, render_evaluation(ev, format_for_path(o.output), ctx));
  m.outputs.push_back(o.output);
  finish(s, m);
  s.out << "AUROC=" << format_table_real(ev.report.auroc)
        << " FPR@" << format_table_real(o.tpr) << "="
        << format_table_real(ev.report.fpr_at_tpr) << "\n";
  return kExitOk;
}

struct SweepOptions {
  std::string input;
  std::string ref_input;
  std::string ref;
  std::string output;
  std::optional<std::string> alpha_grid;
  std::optional<std::string> temperature_grid;
  std::optional<std::string> ref_size_grid;
  double tpr = kDefaultTprTarget;
  std::uint64_t seed = 0;
  bool shrinkage_set = false;
  double shrinkage = kDefaultShrinkage;
  DetectorOptions detector;
};

// Deterministic Fisher-Yates permutation driven by the pinned generator.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  SynthRng rng(seed, 2u, 0u);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = std::min(static_cast<std::size_t>(rng.uniform() * static_cast<double>(i)), i - 1);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

bool uses_alpha(const DetectorConfig& c) {
  return (c.kind == DetectorKind::kNegentropy || c.kind == DetectorKind::kProjection) &&
         (c.measure.kind == MeasureKind::kRenyi || c.measure.kind == MeasureKind::kKl);
}

int cmd_sweep(Session& s, const SweepOptions& o) {
  const DetectorConfig base = make_detector(o.detector);
  const bool alpha_detector =
      uses_alpha(base) &&
      (o.detector.detector == "negentropy-renyi" ||
       (base.kind == DetectorKind::kProjection && o.detector.measure.value_or("renyi") == "renyi"));

  std::vector<double> alphas = {alpha_detector ? base.measure.alpha : 0.0};
  if (o.alpha_grid) {
    alphas = parse_grid(*o.alpha_grid, "--alpha-grid");
    if (!alpha_detector) {
      raise(ErrorKind::kParameter,
            "--alpha-grid requires negentropy-renyi or a renyi projection");
    }
  }
  std::vector<double> temperatures = {base.temperature};
  if (o.temperature_grid) temperatures = parse_grid(*o.temperature_grid, "--temperature-grid");

  const bool ref_detector = needs_reference(base);
  std::vector<std::size_t> ref_sizes = {0};
  if (o.ref_size_grid) {
    if (!ref_detector) {
      raise(ErrorKind::kParameter, "--ref-size-grid requires projection or mahalanobis");
    }
    ref_sizes.clear();
    for (double v : parse_grid(*o.ref_size_grid, "--ref-size-grid")) {
      if (!(v >= 1.0) || v != std::floor(v)) {
        raise(ErrorKind::kParameter, "--ref-size-grid entries must be positive integers");
      }
      ref_sizes.push_back(static_cast<std::size_t>(v));
    }
  }

  const auto samples = load_samples(o.input);
  std::vector<SampleRecord> ref_samples;
  std::optional<ReferenceSet> prebuilt;
  std::vector<std::size_t> order;
  if (ref_detector) {
    if (!o.ref_input.empty()) {
      ref_samples = load_reference_samples(o.ref_input, true);
      if (ref_samples.empty()) {
        raise(ErrorKind::kInput, "--ref-input holds no IN samples");
      }
      order = seeded_permutation(ref_samples.size(), o.seed);
    } else if (!o.ref.empty()) {
      prebuilt = load_reference(o.ref);
      if (base.kind == DetectorKind::kMahalanobis && o.ref_size_grid) {
        raise(ErrorKind::kConfiguration,
              "mahalanobis ref-size sweeps need --ref-input to refit statistics");
      }
      if (o.temperature_grid) {
        raise(ErrorKind::kConfiguration,
              "temperature sweeps with a reference need --ref-input to rebuild bags");
      }
    } else {
      raise(ErrorKind::kConfiguration, detector_name(base) + " sweep requires --ref-input or --ref");
    }
  }

  const std::vector<std::string> header = {
      "detector", "measure", "alpha", "temperature", "ref_size", "auroc",
      "fpr_at_tpr", "aupr_in", "aupr_out", "detection_error", "n_in", "n_out"};
  std::vector<std::vector<std::string>> rows;
  ordered_json json_rows = ordered_json::array();

  for (double alpha : alphas) {
    for (double temperature : temperatures) {
      DetectorConfig config = base;
      config.temperature = temperature;
      if (alpha_detector) {
        config.measure = alpha == 1.0 ? MeasureSpec::kl() : MeasureSpec::renyi(alpha);
      }
      config.check();
      for (std::size_t ref_size : ref_sizes) {
        std::optional<ReferenceSet> ref;
        std::size_t used_ref = 0;
        if (ref_detector) {
          if (prebuilt) {
            ref = ref_size ? prebuilt->prefix(ref_size) : *prebuilt;
          } else {
            const std::size_t m = ref_size ? std::min(ref_size, ref_samples.size())
                                           : ref_samples.size();
            std::vector<SampleRecord> subset;
            subset.reserve(m);
            for (std::size_t i = 0; i < m; ++i) subset.push_back(ref_samples[order[i]]);
            BuildOptions options;
            options.with_mahalanobis = base.kind == DetectorKind::kMahalanobis;
            options.shrinkage = o.shrinkage;
            options.temperature = temperature;
            ref = build_reference(subset, options);
          }
          used_ref = ref->size();
        }
        const auto scores = score_batch(samples, config, ref ? &*ref : nullptr);
        std::vector<LabeledScore> labeled;
        labeled.reserve(scores.size());
        for (std::size_t i = 0; i < scores.size(); ++i) {
          labeled.push_back({scores[i].id, scores[i].anomaly_score, samples[i].label, {}});
        }
        const EvalReport r = evaluate(labeled, o.tpr);
        const std::string measure_name =
            (config.kind == DetectorKind::kNegentropy || config.kind == DetectorKind::kProjection)
                ? to_string(config.measure)
                : "";
        rows.push_back({detector_name(config), measure_name,
                        alpha_detector ? format_table_real(alpha) : "",
                        format_table_real(temperature),
                        ref_detector ? std::to_string(used_ref) : "",
                        format_table_real(r.auroc), format_table_real(r.fpr_at_tpr),
                        format_table_real(r.aupr_in), format_table_real(r.aupr_out),
                        format_table_real(r.detection_error), std::to_string(r.n_in),
                        std::to_string(r.n_out)});
        ordered_json row;
        row["detector"] = nlohmann::ordered_json::parse(detector_to_json(config));
        if (alpha_detector) row["alpha"] = alpha;
        row["temperature"] = temperature;
        if (ref_detector) row["ref_size"] = used_ref;
        row["auroc"] = r.auroc;
        row["fpr_at_tpr"] = r.fpr_at_tpr;
        row["tpr_target"] = r.tpr_target;
        row["aupr_in"] = r.aupr_in;
        row["aupr_out"] = r.aupr_out;
        row["detection_error"] = r.detection_error;
        row["n_in"] = r.n_in;
        row["n_out"] = r.n_out;
        json_rows.push_back(std::move(row));
      }
    }
  }

  RunManifest m = manifest_for(s, "sweep");
  m.inputs.push_back(o.input);
  if (!o.ref_input.empty()) m.inputs.push_back(o.ref_input);
  if (!o.ref.empty()) m.inputs.push_back(o.ref);
  std::string text;
  if (format_for_path(o.output) == ReportFormat::kTable) {
    text = render_table(header, rows);
  } else {
    ordered_json j;
    j["format"] = "oodkit-sweep";
    j["version"] = 1;
    if (s.manifest) j["manifest"] = manifest_name_for(o.output);
    j["seed"] = o.seed;
    j["rows"] = std::move(json_rows);
    text = j.dump(1) + "\n";
  }
  write_text_file(o.output, text);
  m.outputs.push_back(o.output);
  finish(s, m);
  s.out << "sweep: " << rows.size() << " grid points -> " << o.output << "\n";
  return kExitOk;
}

struct GenSynthOptions {
  std::string config;
  std::string output;
  std::optional<std::uint64_t> seed;
};

int cmd_gen_synth(Session& s, const GenSynthOptions& o) {
  SynthConfig config;
  if (!o.config.empty()) config = parse_synth_config(read_text_file(o.config));
  if (o.seed) config.seed = *o.seed;
  config.check();
  const auto samples = generate(config);

  RunManifest m = manifest_for(s, "gen-synth");
  if (!o.config.empty()) m.inputs.push_back(o.config);
  m.config += "\n# synth config\n" + synth_config_to_json(config);
  save_samples(samples, o.output);
  m.outputs.push_back(o.output);
  finish(s, m);
  s.out << "generated " << config.n_in << " IN + " << config.n_out
        << " OOD samples -> " << o.output << "\n";
  return kExitOk;
}

struct NearestOptions {
  std::string input;
  std::string ref;
  std::string output;
  std::string measure = "kl";
  double alpha = 0.1;
  double temperature = 1.0;
  std::size_t top = 1;
  bool reverse_projection = false;
};

int cmd_nearest(Session& s, const NearestOptions& o) {
  if (o.top == 0) raise(ErrorKind::kParameter, "--top must be >= 1");
  const MeasureSpec spec = parse_measure(o.measure, o.alpha);
  const ReferenceSet ref = load_reference(o.ref);
  SampleReader reader(o.input);

  std::vector<std::vector<std::string>> rows;
  ordered_json json_rows = ordered_json::array();
  while (auto sample = reader.next()) {
    const auto neighbors = nearest_references(*sample, ref, spec, o.top,
                                              {o.temperature, o.reverse_projection});
    ordered_json nj = ordered_json::array();
    for (std::size_t r = 0; r < neighbors.size(); ++r) {
      const auto& n = neighbors[r];
      rows.push_back({sample->id, std::to_string(r + 1), n.source_id,
                      std::to_string(n.index), format_table_real(n.score)});
      ordered_json e;
      e["rank"] = r + 1;
      e["source_id"] = n.source_id;
      e["index"] = n.index;
      e["score"] = std::isfinite(n.score) ? ordered_json(n.score) : ordered_json("inf");
      nj.push_back(std::move(e));
    }
    ordered_json row;
    row["id"] = sample->id;
    row["projection_score"] = nj.empty() ? ordered_json(nullptr) : nj.front()["score"];
    row["neighbors"] = std::move(nj);
    json_rows.push_back(std::move(row));
  }

  RunManifest m = manifest_for(s, "nearest");
  m.inputs.push_back(o.input);
  m.inputs.push_back(o.ref);
  const std::size_t n_rows = json_rows.size();
  std::string text;
  if (format_for_path(o.output) == ReportFormat::kTable) {
    const std::vector<std::string> header = {"id", "rank", "source_id", "ref_index", "score"};
    text = render_table(header, rows);
  } else {
    ordered_json j;
    j["format"] = "oodkit-nearest";
    j["version"] = 1;
    if (s.manifest) j["manifest"] = manifest_name_for(o.output);
    j["measure"] = to_string(spec);
    j["rows"] = std::move(json_rows);
    text = j.dump(1) + "\n";
  }
  write_text_file(o.output, text);
  m.outputs.push_back(o.output);
  finish(s, m);
  s.out << "nearest: " << n_rows << " samples -> " << o.output << "\n";
  return kExitOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParameter:
    case ErrorKind::kConfiguration:
      return kExitConfig;
    default:
      return kExitData;
  }
}

}  // namespace

std::string file_sha256(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::kIo, "cannot open '" + path + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"oodkit: out-of-distribution scoring for text generators"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--flagfile", "", "TOML file mirroring the command-line flags");
  app.require_subcommand(1);

  Session session{out, err, true, args, &app};
  bool no_manifest = false;
  app.add_flag("--no-manifest", no_manifest, "do not write <output>.manifest.json");

  ScoreOptions score;
  auto* score_cmd = app.add_subcommand("score", "compute anomaly scores for a sample file");
  score_cmd->add_option("--input", score.input, "sample file (JSONL)")->required();
  score_cmd->add_option("--ref", score.ref, "reference file for projection/mahalanobis");
  score_cmd->add_option("--output", score.output, "scores (.csv table or .json)")->required();
  score_cmd->add_option("--threads", score.threads, "worker threads (env OODKIT_THREADS)")
      ->capture_default_str();
  add_detector_options(score_cmd, score.detector);

  BuildRefOptions build;
  auto* build_cmd = app.add_subcommand("build-ref", "build a reference set from IN samples");
  build_cmd->add_option("--input", build.input, "IN sample file (JSONL)")->required();
  build_cmd->add_option("--output", build.output, "reference file")->required();
  build_cmd->add_flag("--with-mahalanobis", build.with_mahalanobis,
                      "also fit embedding mean and inverse covariance");
  build_cmd->add_option("--shrinkage", build.shrinkage, "trace-scaled ridge in [0, 1]")
      ->capture_default_str();
  build_cmd->add_option("--temperature", build.temperature, "softmax temperature for bags")
      ->capture_default_str();
  build_cmd->add_flag("--in-only", build.in_only, "skip samples not labeled IN");

  CalibrateOptions cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "pick gamma from IN scores");
  cal_cmd->add_option("--scores", cal.scores, "scores file")->required();
  cal_cmd->add_option("--keep-rate", cal.keep_rate, "fraction of IN data to keep")
      ->capture_default_str();
  cal_cmd->add_option("--labels-from-input", cal.labels,
                      "sample file; restricts calibration to IN-labeled ids");
  cal_cmd->add_option("--output", cal.output, "threshold file (JSON)")->required();

  EvaluateOptions ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "OOD metrics and filtering report");
  ev_cmd->add_option("--scores", ev.scores, "scores file")->required();
  ev_cmd->add_option("--labels-from-input", ev.labels, "sample file providing labels")
      ->required();
  ev_cmd->add_option("--tpr", ev.tpr, "TPR target for FPR@TPR")->capture_default_str();
  ev_cmd->add_option("--quality-key", ev.quality_key, "quality metric for correlations");
  ev_cmd->add_option("--gamma", ev.gamma, "decision threshold (number or inf)");
  ev_cmd->add_option("--threshold", ev.threshold, "threshold file from calibrate");
  ev_cmd->add_option("--output", ev.output, "report (.json or .csv)")->required();

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate a detector over parameter grids");
  sweep_cmd->add_option("--input", sweep.input, "labeled sample file")->required();
  sweep_cmd->add_option("--ref-input", sweep.ref_input, "IN samples for reference builds");
  sweep_cmd->add_option("--ref", sweep.ref, "prebuilt reference file");
  sweep_cmd->add_option("--alpha-grid", sweep.alpha_grid, "comma-separated; 1 means KL");
  sweep_cmd->add_option("--temperature-grid", sweep.temperature_grid, "comma-separated");
  sweep_cmd->add_option("--ref-size-grid", sweep.ref_size_grid, "comma-separated sizes");
  sweep_cmd->add_option("--tpr", sweep.tpr, "TPR target")->capture_default_str();
  sweep_cmd->add_option("--seed", sweep.seed, "reference subsampling seed")
      ->capture_default_str();
  sweep_cmd->add_option("--shrinkage", sweep.shrinkage, "Mahalanobis shrinkage")
      ->capture_default_str();
  sweep_cmd->add_option("--output", sweep.output, "table (.csv) or JSON")->required();
  add_detector_options(sweep_cmd, sweep.detector);

  GenSynthOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-synth", "write a synthetic IN/OOD corpus");
  gen_cmd->add_option("--config", gen.config, "synthetic corpus config (JSON)");
  gen_cmd->add_option("--seed", gen.seed, "override the config seed");
  gen_cmd->add_option("--output", gen.output, "sample file (JSONL)")->required();

  NearestOptions near;
  auto* near_cmd = app.add_subcommand("nearest", "closest reference samples per input");
  near_cmd->add_option("--input", near.input, "sample file")->required();
  near_cmd->add_option("--ref", near.ref, "reference file")->required();
  near_cmd->add_option("--measure", near.measure, "renyi | kl | fr")->capture_default_str();
  near_cmd->add_option("--alpha", near.alpha, "Renyi order")->capture_default_str();
  near_cmd->add_option("--temperature", near.temperature, "softmax temperature")
      ->capture_default_str();
  near_cmd->add_option("--top", near.top, "neighbors per sample")->capture_default_str();
  near_cmd->add_flag("--reverse-projection", near.reverse_projection,
                     "evaluate measure(bag(x) || bag_r)");
  near_cmd->add_option("--output", near.output, "table (.csv) or JSON")->required();

  std::vector<const char*> argv;
  argv.push_back("oodkit");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  session.manifest = !no_manifest;

  try {
    if (*score_cmd) return cmd_score(session, score);
    if (*build_cmd) return cmd_build_ref(session, build);
    if (*cal_cmd) return cmd_calibrate(session, cal);
    if (*ev_cmd) return cmd_evaluate(session, ev);
    if (*sweep_cmd) return cmd_sweep(session, sweep);
    if (*gen_cmd) return cmd_gen_synth(session, gen);
    if (*near_cmd) return cmd_nearest(session, near);
  } catch (const Error& e) {
    err << "oodkit: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "oodkit: " << e.what() << "\n";
    return kExitData;
  }
  return kExitConfig;
}

}  // namespace oodkit::cli
