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


#include <gtest/gtest.h>

#include <limits>

#include "oodkit/error.hpp"
#include "oodkit/io.hpp"
#include "oodkit/synth.hpp"
#include "json.hpp"
#include "support/samples.hpp"
#include "support/temp_dir.hpp"

namespace oodkit {
namespace {

using testing::TempDir;

std::string error_text(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

TEST(SampleFormat, ParsesAllFields) {
  const auto s = parse_sample(
      R"({"id":"s1","vocab_size":4,"steps":[{"probs":[0.7,0.1,0.1,0.1],"chosen_logprob":-0.35},)"
      R"({"probs":{"topk":[[0,0.6],[3,0.2]],"tail_mass":0.2}}],)"
      R"("embedding":[0.1,-0.3],"quality":{"bleu":31.5},"label":"IN"})");
  EXPECT_EQ(s.id, "s1");
  ASSERT_EQ(s.steps.size(), 2u);
  EXPECT_TRUE(s.steps[0].distribution->is_dense());
  EXPECT_FALSE(s.steps[1].distribution->is_dense());
  EXPECT_EQ(*s.steps[0].chosen_logprob, -0.35);
  EXPECT_EQ(s.steps[1].distribution->tail_mass(), 0.2);
  EXPECT_EQ(*s.embedding, (std::vector<double>{0.1, -0.3}));
  EXPECT_EQ(s.quality.at("bleu"), 31.5);
  EXPECT_EQ(s.label, Label::kIn);
}

TEST(SampleFormat, LabelDefaultsToUnknown) {
  const auto s = parse_sample(R"({"id":"a","vocab_size":2,"steps":[{"probs":[0.5,0.5]}]})");
  EXPECT_EQ(s.label, Label::kUnknown);
}

TEST(SampleFormat, RejectsInvalid) {
  EXPECT_NE(error_text([] { parse_sample("{not json", 7); }).find("line 7"), std::string::npos);
  EXPECT_NE(error_text([] {
              parse_sample(R"({"id":"a","vocab_size":2,"steps":[{"probs":[0.7,0.5]}]})", 1);
            }).find("line 1"),
            std::string::npos);
  EXPECT_NE(error_text([] { parse_sample(R"({"id":"a","vocab_size":2,"steps":[]})", 3); }),
            "");
  EXPECT_NE(error_text([] {
              parse_sample(R"({"id":"a","vocab_size":3,"steps":[{"probs":[0.5,0.5]}]})", 2);
            }),
            "");
  // Probabilities inconsistent with logits.
  EXPECT_NE(error_text([] {
              parse_sample(
                  R"({"id":"a","vocab_size":2,"steps":[{"probs":[0.5,0.5],"logits":[1,0]}]})", 4);
            }).find("line 4"),
            std::string::npos);
}

TEST(SampleFile, EmptyAndSingle) {
  TempDir dir;
  write_text_file(dir.file("empty.jsonl"), "");
  EXPECT_TRUE(load_samples(dir.file("empty.jsonl")).empty());
  write_text_file(dir.file("one.jsonl"),
                  "{\"id\":\"a\",\"vocab_size\":2,\"steps\":[{\"probs\":[0.5,0.5]}]}\n\n");
  EXPECT_EQ(load_samples(dir.file("one.jsonl")).size(), 1u);
}

TEST(SampleFile, ErrorsCarryLineNumbers) {
  TempDir dir;
  write_text_file(dir.file("bad.jsonl"),
                  "{\"id\":\"a\",\"vocab_size\":2,\"steps\":[{\"probs\":[0.7,0.5]}]}\n");
  const auto msg = error_text([&] { load_samples(dir.file("bad.jsonl")); });
  EXPECT_NE(msg.find("line 1"), std::string::npos) << msg;
  write_text_file(dir.file("mixed.jsonl"),
                  "{\"id\":\"a\",\"vocab_size\":2,\"steps\":[{\"probs\":[0.5,0.5]}]}\n"
                  "{\"id\":\"b\",\"vocab_size\":3,\"steps\":[{\"probs\":[0.2,0.3,0.5]}]}\n");
  EXPECT_NE(error_text([&] { load_samples(dir.file("mixed.jsonl")); }).find("line 2"),
            std::string::npos);
  try {
    load_samples(dir.file("absent.jsonl"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(SampleFile, RoundTripIsIdentity) {
  SynthConfig c;
  c.n_in = 3;
  c.n_out = 3;
  c.vocab_size = 12;
  c.steps_min = 1;
  c.steps_max = 4;
  auto samples = generate(c);
  samples.push_back(testing::from_probs({{0.5, 0.5}}, "short"));
  samples.back().steps[0].distribution =
      TokenDistribution::sparse(12, {{0, 0.6}, {3, 0.2}}, 0.2);
  samples.back().embedding = std::vector<double>(8, 0.25);
  samples.back().label = Label::kOod;
  TempDir dir;
  save_samples(samples, dir.file("s.jsonl"));
  const auto back = load_samples(dir.file("s.jsonl"));
  ASSERT_EQ(back.size(), samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) EXPECT_EQ(back[i], samples[i]) << i;
}

ReferenceSet two_bag_reference(bool maha) {
  std::vector<SampleRecord> v = {testing::from_probs({{0.9, 0.1}}, "a"),
                                 testing::from_probs({{1.0 / 3, 2.0 / 3}}, "b")};
  v[0].embedding = std::vector<double>{0.1, 1.0 / 7};
  v[1].embedding = std::vector<double>{-0.3, 2.0 / 3};
  return build_reference(v, {maha, 0.01, 1.0});
}

TEST(ReferenceFile, RoundTrip) {
  TempDir dir;
  for (bool maha : {false, true}) {
    const auto ref = two_bag_reference(maha);
    save_reference(ref, dir.file("r.jsonl"));
    const auto back = load_reference(dir.file("r.jsonl"));
    EXPECT_EQ(back, ref);
    EXPECT_EQ(back.maha().has_value(), maha);
    const auto q = testing::from_probs({{0.6, 0.4}});
    EXPECT_EQ(project(q, back, MeasureSpec::kl()).score,
              project(q, ref, MeasureSpec::kl()).score);
  }
}

TEST(ReferenceFile, CountMismatch) {
  const std::string text = format_reference(two_bag_reference(false));
  const auto cut = text.substr(0, text.rfind('\n', text.size() - 2) + 1);
  EXPECT_NE(error_text([&] { parse_reference(cut); }).find("count"), std::string::npos);
}

TEST(ReferenceFile, RejectsAsymmetricMatrix) {
  auto text = format_reference(two_bag_reference(true));
  nlohmann::json last;
  std::string head = text.substr(0, text.rfind('\n', text.size() - 2) + 1);
  last = nlohmann::json::parse(text.substr(head.size()));
  last["maha"]["inverse_covariance"][1] = 5.0;
  EXPECT_NE(error_text([&] { parse_reference(head + last.dump() + "\n"); }), "");
}

TEST(Reports, ScoreTableHeaderAndDeterminism) {
  DetectorConfig c;
  c.kind = DetectorKind::kMsp;
  std::vector<ScoredSample> scores = {make_scored("a", 0.123456789, c),
                                      make_scored("b", std::numeric_limits<double>::infinity(), c)};
  const auto table = render_scores(scores, ReportFormat::kTable);
  EXPECT_EQ(table.substr(0, table.find('\n')), "id,raw_score,anomaly_score");
  EXPECT_NE(table.find("a,0.123457,-0.123457"), std::string::npos);
  EXPECT_NE(table.find("b,inf,-inf"), std::string::npos);
  EXPECT_EQ(render_scores(scores, ReportFormat::kStructured),
            render_scores(scores, ReportFormat::kStructured));
}

TEST(Reports, ScoresRoundTripFullPrecision) {
  DetectorConfig c;
  c.kind = DetectorKind::kEnergy;
  std::vector<ScoredSample> scores = {make_scored("a", 0.1 + 0.2, c),
                                      make_scored("b", -1.0 / 3.0, c)};
  TempDir dir;
  write_text_file(dir.file("s.json"), render_scores(scores, ReportFormat::kStructured));
  const auto back = load_scores(dir.file("s.json"));
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_EQ(back.rows[0].raw_score, 0.1 + 0.2);
  EXPECT_EQ(back.rows[1].anomaly_score, -1.0 / 3.0);
  EXPECT_TRUE(back.detector_json);
  write_text_file(dir.file("s.csv"), render_scores(scores, ReportFormat::kTable));
  EXPECT_NEAR(load_scores(dir.file("s.csv")).rows[1].raw_score, -1.0 / 3.0, 1e-6);
}

TEST(Reports, EvaluationHasAllMetrics) {
  std::vector<LabeledScore> v = {{"a", 0, Label::kIn, {}}, {"b", 1, Label::kOod, {}}};
  Evaluation ev;
  ev.report = evaluate(v, 0.95, 0.5);
  const auto j = nlohmann::json::parse(render_evaluation(ev, ReportFormat::kStructured));
  for (const char* key : {"auroc", "fpr_at_tpr", "tpr_target", "aupr_in", "aupr_out",
                          "detection_error", "threshold_metrics", "n_in", "n_out"}) {
    EXPECT_TRUE(j["metrics"].contains(key)) << key;
  }
  for (const char* key : {"precision", "recall", "f1", "fpr", "tpr", "gamma"}) {
    EXPECT_TRUE(j["metrics"]["threshold_metrics"].contains(key)) << key;
  }
}

TEST(Reports, ThresholdRoundTrip) {
  Threshold t;
  t.gamma = 0.1 + 0.2;
  t.achieved_keep_rate = 0.8;
  t.n_calibration = 5;
  TempDir dir;
  write_text_file(dir.file("t.json"), render_threshold(t));
  const auto back = load_threshold(dir.file("t.json"));
  EXPECT_EQ(back.gamma, t.gamma);
  EXPECT_EQ(back.n_calibration, 5u);
}

TEST(Reports, TableFormatting) {
  EXPECT_EQ(format_table_real(1.0 / 3.0), "0.333333");
  EXPECT_EQ(format_table_real(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_table_real(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_for_path("x.csv"), ReportFormat::kTable);
  EXPECT_EQ(format_for_path("x.json"), ReportFormat::kStructured);
}

}  // namespace
}  // namespace oodkit
