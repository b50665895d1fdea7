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

// rgnn: command line front end for the convergence sweeps, the SignNet
// regression experiment and the fixture suite.

#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rgnn/errors.h"
#include "rgnn/harness.h"

namespace {

struct Options {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  int trials = 0;
  std::vector<int> schedule;
};

rgnn::ExperimentConfig resolve(const Options& o, const std::string& default_id) {
  rgnn::ExperimentConfig cfg =
      o.config.empty() ? rgnn::ExperimentConfig{} : rgnn::load_config(o.config);
  if (o.config.empty()) cfg.experiment_id = default_id;
  if (o.seed_set) cfg.seed = o.seed;
  if (o.trials > 0) cfg.trials = o.trials;
  if (!o.schedule.empty()) cfg.schedule = o.schedule;
  if (!o.out.empty()) cfg.output = o.out;
  cfg.validate();
  return cfg;
}

void write(const rgnn::ConvergenceReport& report, const rgnn::ExperimentConfig& cfg) {
  const std::string path = cfg.output.empty() ? cfg.experiment_id + ".csv" : cfg.output;
  rgnn::emit_report(report, path);
  std::fprintf(stderr, "wrote %s (%zu rows)\n", path.c_str(), report.rows.size());
}

bool require_decay(const rgnn::ConvergenceReport& report, const std::string& metric) {
  const rgnn::DecayCheck d = rgnn::check_decay(report, metric);
  if (d.required_pairs == 0) {
    std::fprintf(stderr, "%-22s single size, nothing to check\n", metric.c_str());
    return true;
  }
  std::fprintf(stderr, "%-22s median %.4g -> %.4g (ratio %.4f, %d/%d pairs) %s\n",
               metric.c_str(), d.first_median, d.last_median, d.ratio,
               d.nonincreasing_pairs, d.required_pairs, d.decreasing ? "ok" : "FAIL");
  return d.decreasing;
}

using Sweep = std::function<rgnn::ConvergenceReport(const rgnn::ExperimentConfig&)>;

int run_sweep(const Options& o, const std::string& id, const Sweep& sweep,
              const std::function<bool(const rgnn::ConvergenceReport&,
                                       const rgnn::ExperimentConfig&)>& assertions) {
  const rgnn::ExperimentConfig cfg = resolve(o, id);
  try {
    const rgnn::ConvergenceReport report = sweep(cfg);
    write(report, cfg);
    return assertions(report, cfg) ? 0 : 1;
  } catch (const rgnn::DegenerateExperimentError& e) {
    write(e.report(), cfg);
    std::fprintf(stderr, "degenerate experiment: %s\n", e.what());
    return 1;
  }
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "Experiment config (JSON)");
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&o](std::uint64_t s) { o.seed = s; o.seed_set = true; }, "Master seed");
  cmd->add_option("--out", o.out, "Output CSV path");
  cmd->add_option("--trials", o.trials, "Trials per graph size")->check(CLI::PositiveNumber);
  cmd->add_option("--schedule", o.schedule, "Graph sizes, comma separated")->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convergence experiments for GNNs on random graphs"};
  app.set_version_flag("--version", std::string(rgnn::kVersion));
  app.require_subcommand(1);
  Options o;

  int sample_n = 1000;
  std::string latents_out;
  auto* sample = app.add_subcommand("sample", "Sample one graph and write its edge list");
  add_common(sample, o);
  sample->add_option("-n", sample_n, "Number of nodes")->check(CLI::PositiveNumber);
  sample->add_option("--latents", latents_out, "Latent positions output path");

  struct Suite {
    const char* name;
    const char* help;
    Sweep sweep;
    std::function<bool(const rgnn::ConvergenceReport&, const rgnn::ExperimentConfig&)> check;
  };
  const std::vector<Suite> suites = {
      {"assumption", "Shift consistency sweep", rgnn::run_assumption_sweep,
       [](const auto& r, const auto&) { return require_decay(r, "assumption_mse"); }},
      {"signnet", "Eigenvector alignment sweep", rgnn::run_signnet_sweep,
       [](const auto& r, const auto& cfg) {
         bool ok = true;
         for (int i = 1; i <= cfg.q; ++i) ok &= require_decay(r, "alignment_u" + std::to_string(i));
         return ok;
       }},
      {"distpe", "Distance encoding sweep", rgnn::run_distance_sweep,
       [](const auto& r, const auto&) { return require_decay(r, "distance_pe_mse"); }},
      {"filter", "Spectral filter fitting sweep", rgnn::run_filter_sweep,
       [](const auto& r, const auto&) {
         bool ok = true;
         for (int n : r.sizes()) {
           const double fit = r.median("fitted_frobenius", n);
           const double raw = r.median("raw_frobenius", n);
           if (std::isnan(fit)) continue;
           std::fprintf(stderr, "n=%-6d fitted %.4g raw %.4g\n", n, fit, raw);
           ok &= fit <= raw + 1e-12;
         }
         return ok;
       }},
      {"noise", "Noisy feature smoothing sweep", rgnn::run_noise_sweep,
       [](const auto& r, const auto&) { return require_decay(r, "smoothing_mse"); }},
      {"cgnn", "Discrete to continuous GNN sweep", rgnn::run_cgnn_sweep,
       [](const auto& r, const auto&) {
         bool ok = true;
         for (const auto& m : r.metrics()) ok &= require_decay(r, m);
         return ok;
       }},
  };
  std::vector<CLI::App*> suite_cmds;
  for (const auto& s : suites) {
    auto* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd, o);
    suite_cmds.push_back(cmd);
  }

  auto* fig1 = app.add_subcommand("fig1", "SignNet regression with and without renormalization");
  add_common(fig1, o);
  auto* fixtures = app.add_subcommand("fixtures", "Exact checks on the fixture models");
  add_common(fixtures, o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sample) {
      const rgnn::ExperimentConfig cfg = resolve(o, "sample");
      const rgnn::KernelModel model = cfg.build_model();
      const rgnn::Graph g = rgnn::sample_graph(model, sample_n, cfg.alpha_for(sample_n),
                                               rgnn::stream_seed(cfg.seed, sample_n, 0));
      const std::string edges = cfg.output.empty() ? "graph.edges" : cfg.output;
      rgnn::write_graph(g, edges, latents_out.empty() ? edges + ".latents" : latents_out);
      std::fprintf(stderr, "n=%d edges=%.0f isolated=%d\n", g.size(),
                   g.adjacency.sum() / 2.0, rgnn::count_isolated(g));
      return 0;
    }
    for (std::size_t i = 0; i < suites.size(); ++i) {
      if (*suite_cmds[i]) return run_sweep(o, suites[i].name, suites[i].sweep, suites[i].check);
    }
    if (*fig1) {
      rgnn::ExperimentConfig cfg = resolve(o, "fig1");
      if (o.config.empty()) cfg.model = rgnn::KernelModel::Gaussian().to_json();
      const rgnn::Fig1Result r = rgnn::run_fig1_experiment(cfg);
      write(r.report, cfg);
      const double norm = r.report.median("test_error_normalized", cfg.train.n_test);
      const double raw = r.report.median("test_error_unnormalized", cfg.train.n_test);
      std::fprintf(stderr, "median test RMSE: normalized %.4g, unnormalized %.4g\n", norm, raw);
      return norm < raw ? 0 : 1;
    }
    if (*fixtures) {
      rgnn::ExperimentConfig cfg = resolve(o, "fixtures");
      const std::vector<rgnn::FixtureCheck> checks = rgnn::run_fixture_checks();
      bool ok = true;
      for (const auto& c : checks) {
        std::printf("%-34s %s value %.10g expected %.10g%s%s\n", c.name.c_str(),
                    c.passed ? "PASS" : "FAIL", c.value, c.expected,
                    c.detail.empty() ? "" : "  ", c.detail.c_str());
        ok &= c.passed;
      }
      if (!o.out.empty()) write(rgnn::run_fixture_suite(), cfg);
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
