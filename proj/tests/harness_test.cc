// Copyright 2026 The rgnn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rgnn/harness.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "rgnn/errors.h"

namespace rgnn {
namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.experiment_id = "unit";
  cfg.schedule = {250, 500};
  cfg.trials = 3;
  cfg.seed = 11;
  return cfg;
}

TEST(ConfigTest, JsonRoundTrip) {
  ExperimentConfig cfg = small_config();
  cfg.shift = ShiftKind::kLaplacian;
  cfg.q = 3;
  cfg.train.optimizer = "adam";
  const ExperimentConfig back = ExperimentConfig::FromJson(cfg.ToJson());
  EXPECT_EQ(back.ToJson(), cfg.ToJson());
}

TEST(ConfigTest, RejectsUnknownKeysAndBadValues) {
  nlohmann::json j = small_config().ToJson();
  j["colour"] = "blue";
  EXPECT_THROW(ExperimentConfig::FromJson(j), ConfigError);
  ExperimentConfig cfg = small_config();
  cfg.trials = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.schedule = {};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.alpha = 2.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(ConfigTest, LogRuleSparsity) {
  nlohmann::json j = small_config().ToJson();
  j.erase("alpha");
  j["alpha_rule"] = "log";
  const ExperimentConfig cfg = ExperimentConfig::FromJson(j);
  EXPECT_NEAR(cfg.alpha_for(1000), 4.0 * std::log(1000.0) / 1000.0, 1e-15);
}

TEST(ReportTest, EmptyReportWritesHeaderOnly) {
  const std::string path = temp_path("rgnn_empty.csv");
  emit_report(ConvergenceReport{}, path);
  EXPECT_EQ(slurp(path), "experiment_id,n,trial,metric,value,flag\n");
  std::remove(path.c_str());
  std::remove(metadata_path(path).c_str());
}

TEST(ReportTest, MetadataPath) {
  EXPECT_EQ(metadata_path("out/run.csv"), "out/run.meta.json");
  EXPECT_EQ(metadata_path("a.b/run"), "a.b/run.meta.json");
}

TEST(ReportTest, MedianAndFlags) {
  ConvergenceReport r;
  r.add("x", 10, 0, "m", 3.0);
  r.add("x", 10, 1, "m", 1.0);
  r.add("x", 10, 2, "m", 100.0, "tie");
  r.add("x", 10, 3, "m", 2.0);
  EXPECT_DOUBLE_EQ(r.median("m", 10), 2.0);
  EXPECT_DOUBLE_EQ(r.flag_rate(), 0.25);
  EXPECT_TRUE(std::isnan(r.median("m", 20)));
  EXPECT_DOUBLE_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
}

TEST(ReportTest, DecayCheck) {
  ConvergenceReport r;
  const std::vector<double> meds{1.0, 0.7, 0.72, 0.5};
  const std::vector<int> ns{100, 200, 400, 800};
  for (int i = 0; i < 4; ++i) r.add("x", ns[i], 0, "m", meds[i]);
  const DecayCheck d = check_decay(r, "m");
  EXPECT_DOUBLE_EQ(d.ratio, 0.5);
  EXPECT_EQ(d.nonincreasing_pairs, 2);
  EXPECT_EQ(d.required_pairs, 3);
  EXPECT_FALSE(d.decreasing);
  ConvergenceReport two;
  two.add("x", 100, 0, "m", 1.0);
  two.add("x", 200, 0, "m", 0.9);
  EXPECT_TRUE(check_decay(two, "m").decreasing);
}

TEST(AssumptionSweepTest, RowCountAndByteStableOutput) {
  const ExperimentConfig cfg = small_config();
  const ConvergenceReport a = run_assumption_sweep(cfg);
  // 2 sizes x 3 trials x 2 metrics.
  EXPECT_EQ(a.rows.size(), 12u);
  const std::string p1 = temp_path("rgnn_a1.csv"), p2 = temp_path("rgnn_a2.csv");
  emit_report(a, p1);
  emit_report(run_assumption_sweep(cfg), p2);
  EXPECT_EQ(slurp(p1), slurp(p2));
  ExperimentConfig serial = cfg;
  serial.threads = 1;
  emit_report(run_assumption_sweep(serial), p2);
  EXPECT_EQ(slurp(p1), slurp(p2));
  for (const auto& p : {p1, p2}) {
    std::remove(p.c_str());
    std::remove(metadata_path(p).c_str());
  }
}

TEST(AssumptionSweepTest, ZeroProbeGivesZero) {
  ExperimentConfig cfg = small_config();
  cfg.probe = "zero";
  for (double v : run_assumption_sweep(cfg).values("assumption_mse", 250)) EXPECT_EQ(v, 0.0);
}

TEST(AssumptionSweepTest, ConstantKernelMatchesBinomialOracle) {
  // w = 1, f = 1: (S1)_i = deg_i / (n alpha) with deg_i ~ Binomial(n - 1, alpha)
  // and limit 1, so E (S1 - 1)_i^2 = (n-1) alpha (1-alpha) / (n alpha)^2 + 1/n^2.
  ExperimentConfig cfg = small_config();
  cfg.model = {{"kind", "sbm"}, {"C", {{1.0}}}, {"P", {1.0}}};
  cfg.probe = "ones";
  cfg.alpha = 0.5;
  cfg.trials = 9;
  const ConvergenceReport r = run_assumption_sweep(cfg);
  for (int n : cfg.schedule) {
    const double a = cfg.alpha;
    const double expected =
        std::sqrt((n - 1) * a * (1 - a) / (n * a * n * a) + 1.0 / (double(n) * n));
    EXPECT_NEAR(r.median("assumption_mse", n), expected, 0.05 * expected) << n;
  }
}

TEST(AssumptionSweepTest, ErrorDecreasesWithN) {
  ExperimentConfig cfg = small_config();
  cfg.schedule = {100, 400, 1600};
  cfg.trials = 5;
  EXPECT_TRUE(check_decay(run_assumption_sweep(cfg), "assumption_mse").decreasing);
}

TEST(SignNetSweepTest, TiedSpectrumThrows) {
  // Two disconnected equal communities: both limit eigenvalues are 1/4.
  ExperimentConfig cfg = small_config();
  cfg.model = {{"kind", "sbm"}, {"C", {{0.5, 0.0}, {0.0, 0.5}}}, {"P", {0.5, 0.5}}};
  cfg.schedule = {60};
  cfg.trials = 2;
  EXPECT_THROW(run_signnet_sweep(cfg), DegenerateExperimentError);
}

TEST(SignNetSweepTest, FixtureRowsAreUnflagged) {
  ExperimentConfig cfg = small_config();
  const ConvergenceReport r = run_signnet_sweep(cfg);
  EXPECT_EQ(r.flag_rate(), 0.0);
  EXPECT_EQ(r.values("alignment_u1", 500).size(), 3u);
}

TEST(FilterSweepTest, TargetEqualToShiftFitsExactly) {
  ExperimentConfig cfg = small_config();
  cfg.w_equals_s = true;
  cfg.schedule = {200};
  const ConvergenceReport r = run_filter_sweep(cfg);
  for (double v : r.values("fitted_frobenius", 200)) EXPECT_LE(v, 1e-8);
  for (double v : r.values("raw_frobenius", 200)) EXPECT_EQ(v, 0.0);
}

TEST(Fig1Test, ZeroTargetIsLearned) {
  ExperimentConfig cfg;
  cfg.model = KernelModel::Gaussian().to_json();
  cfg.train.target = "zero";
  cfg.train.n_train = 40;
  cfg.train.n_test = 60;
  cfg.train.steps = 1000;
  cfg.train.optimizer = "adam";
  cfg.train.seeds = 1;
  const Fig1Result r = run_fig1_experiment(cfg);
  EXPECT_LT(r.report.median("train_error_normalized", 40), 1e-3);
  EXPECT_EQ(r.models.size(), 2u);
}

TEST(FixtureSuiteTest, KnownChecks) {
  for (const FixtureCheck& c : run_fixture_checks()) {
    SCOPED_TRACE(c.name);
    if (c.name == "u2_ratio") {
      // The second eigenvector of the fixture has block ratio -2.
      EXPECT_NEAR(c.value, -2.0, 1e-9);
    } else if (c.name == "shifted_distance_pe_separation") {
      EXPECT_NEAR(c.value, 0.0, 1e-12);
    } else {
      EXPECT_TRUE(c.passed) << c.detail;
    }
  }
}

TEST(ParallelForTest, RethrowsAfterAllWorkersFinish) {
  std::vector<int> seen(50, 0);
  EXPECT_THROW(parallel_for(50,
                            [&](int i) {
                              seen[i] = 1;
                              if (i == 7) throw std::runtime_error("boom");
                            },
                            4),
               std::runtime_error);
  int done = 0;
  for (int s : seen) done += s;
  EXPECT_GE(done, 1);
}

}  // namespace
}  // namespace rgnn
