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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "rgnn/errors.h"
#include "rgnn/limit_operator.h"
#include "rgnn/positional_encodings.h"
#include "rgnn/spectral.h"

namespace rgnn {
namespace {

using nlohmann::json;

std::string alpha_rule_name(AlphaRule rule) {
  return rule == AlphaRule::kConstant ? "constant" : "log";
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

// One (n, trial) cell of a sweep.
struct Cell {
  int n;
  int trial;
};

std::vector<Cell> cells(const ExperimentConfig& cfg) {
  std::vector<Cell> out;
  for (int n : cfg.schedule) {
    for (int t = 0; t < cfg.trials; ++t) out.push_back({n, t});
  }
  return out;
}

struct CellRow {
  std::string metric;
  double value;
  std::string flag;
};

// Runs `body` on every cell and assembles rows in schedule order.
ConvergenceReport sweep(const ExperimentConfig& cfg,
                        const std::function<std::vector<CellRow>(const Cell&)>& body) {
  cfg.validate();
  const auto all = cells(cfg);
  std::vector<std::vector<CellRow>> results(all.size());
  parallel_for(static_cast<int>(all.size()),
               [&](int i) { results[i] = body(all[i]); }, cfg.threads);
  ConvergenceReport report;
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (auto& r : results[i]) {
      report.add(cfg.experiment_id, all[i].n, all[i].trial, r.metric, r.value,
                 std::move(r.flag));
    }
  }
  report.metadata = {{"experiment_id", cfg.experiment_id},
                     {"config", cfg.ToJson()},
                     {"version", kVersion},
                     {"seed", cfg.seed}};
  return report;
}

Graph trial_graph(const ExperimentConfig& cfg, const KernelModel& model,
                  const Cell& c) {
  return sample_graph(model, c.n, cfg.alpha_for(c.n),
                      stream_seed(cfg.seed, static_cast<std::uint64_t>(c.n),
                                  static_cast<std::uint64_t>(c.trial)));
}

LimitFunction make_probe(const ExperimentConfig& cfg, const KernelModel& model) {
  std::string probe = cfg.probe;
  if (probe == "default") probe = model.is_sbm() ? "onehot:0" : "identity";
  if (probe == "ones") return LimitFunction::Constant(model, Eigen::RowVectorXd::Ones(1));
  if (probe == "zero") return LimitFunction::Constant(model, Eigen::RowVectorXd::Zero(1));
  if (probe == "identity") {
    return LimitFunction::FromClosure(model, 1, [](double x) {
      return Eigen::RowVectorXd::Constant(1, x);
    });
  }
  if (probe.rfind("onehot:", 0) == 0) {
    if (!model.is_sbm()) throw ConfigError("onehot probe needs an SBM");
    const int k = std::stoi(probe.substr(7));
    if (k < 0 || k >= model.communities()) throw ConfigError("onehot community out of range");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(model.communities());
    v[k] = 1.0;
    return LimitFunction::FromNodeValues(model, v);
  }
  throw ConfigError("unknown probe: " + cfg.probe);
}

LimitFunction feature_limit(const KernelModel& model) {
  const LatentMap f0 = default_feature_map(model);
  return LimitFunction::FromClosure(model, 2, f0);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (schedule.empty()) throw ConfigError("empty n schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] < 2) throw ConfigError("graph sizes must be at least 2");
    if (i && schedule[i] <= schedule[i - 1]) {
      throw ConfigError("n schedule must be strictly increasing");
    }
  }
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (q < 1) throw ConfigError("q must be >= 1");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (alpha_rule == AlphaRule::kConstant && alpha > 1.0) {
    throw ConfigError("constant sparsity must lie in (0, 1]");
  }
  if (!(noise_variance >= 0.0)) throw ConfigError("noise variance must be >= 0");
  if (gnn_draws < 1) throw ConfigError("gnn_draws must be >= 1");
  for (int w : gnn_hidden) {
    if (w < 1) throw ConfigError("GNN widths must be positive");
  }
  if (train.steps < 0 || !(train.learning_rate > 0.0) || train.seeds < 1 ||
      train.n_train < 2 || train.n_test < 2 || train.branch_width < 1 ||
      train.branch_out < 1) {
    throw ConfigError("invalid training settings");
  }
  if (train.optimizer != "gd" && train.optimizer != "adam") {
    throw ConfigError("optimizer must be gd or adam");
  }
}

KernelModel ExperimentConfig::build_model() const { return model_from_json(model); }

double ExperimentConfig::alpha_for(int n) const {
  if (alpha_rule == AlphaRule::kConstant) return alpha;
  return std::min(1.0, alpha * std::log(static_cast<double>(n)) / n);
}

ExperimentConfig ExperimentConfig::FromJson(const json& j) {
  reject_unknown(j,
                 {"experiment_id", "model", "shift", "schedule", "alpha_rule",
                  "alpha", "trials", "seed", "q", "probe", "gnn_hidden",
                  "gnn_draws", "noise_variance", "filter_keep", "fit_filter",
                  "w_equals_s", "threads", "train", "output"},
                 "config");
  ExperimentConfig c;
  read_if(j, "experiment_id", c.experiment_id);
  if (j.contains("model")) c.model = j.at("model");
  if (j.contains("shift")) c.shift = parse_shift_kind(j.at("shift").get<std::string>());
  read_if(j, "schedule", c.schedule);
  if (j.contains("alpha_rule")) {
    const auto rule = j.at("alpha_rule").get<std::string>();
    if (rule == "constant") {
      c.alpha_rule = AlphaRule::kConstant;
    } else if (rule == "log") {
      c.alpha_rule = AlphaRule::kLogOverN;
      c.alpha = 4.0;
    } else {
      throw ConfigError("alpha_rule must be constant or log");
    }
  }
  read_if(j, "alpha", c.alpha);
  read_if(j, "trials", c.trials);
  read_if(j, "seed", c.seed);
  read_if(j, "q", c.q);
  read_if(j, "probe", c.probe);
  read_if(j, "gnn_hidden", c.gnn_hidden);
  read_if(j, "gnn_draws", c.gnn_draws);
  read_if(j, "noise_variance", c.noise_variance);
  read_if(j, "filter_keep", c.filter_keep);
  read_if(j, "fit_filter", c.fit_filter);
  read_if(j, "w_equals_s", c.w_equals_s);
  read_if(j, "threads", c.threads);
  read_if(j, "output", c.output);
  if (j.contains("train")) {
    const json& t = j.at("train");
    reject_unknown(t,
                   {"steps", "learning_rate", "optimizer", "n_train", "n_test",
                    "seeds", "target", "branch_width", "branch_out"},
                   "train");
    read_if(t, "steps", c.train.steps);
    read_if(t, "learning_rate", c.train.learning_rate);
    read_if(t, "optimizer", c.train.optimizer);
    read_if(t, "n_train", c.train.n_train);
    read_if(t, "n_test", c.train.n_test);
    read_if(t, "seeds", c.train.seeds);
    read_if(t, "target", c.train.target);
    read_if(t, "branch_width", c.train.branch_width);
    read_if(t, "branch_out", c.train.branch_out);
  }
  c.validate();
  return c;
}

json ExperimentConfig::ToJson() const {
  return {{"experiment_id", experiment_id},
          {"model", model},
          {"shift", std::string(to_string(shift))},
          {"schedule", schedule},
          {"alpha_rule", alpha_rule_name(alpha_rule)},
          {"alpha", alpha},
          {"trials", trials},
          {"seed", seed},
          {"q", q},
          {"probe", probe},
          {"gnn_hidden", gnn_hidden},
          {"gnn_draws", gnn_draws},
          {"noise_variance", noise_variance},
          {"filter_keep", filter_keep},
          {"fit_filter", fit_filter},
          {"w_equals_s", w_equals_s},
          {"train",
           {{"steps", train.steps},
            {"learning_rate", train.learning_rate},
            {"optimizer", train.optimizer},
            {"n_train", train.n_train},
            {"n_test", train.n_test},
            {"seeds", train.seeds},
            {"target", train.target},
            {"branch_width", train.branch_width},
            {"branch_out", train.branch_out}}}};
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return ExperimentConfig::FromJson(j);
}

void parallel_for(int count, const std::function<void(int)>& body, int threads) {
  if (count <= 0) return;
  int workers = threads > 0 ? threads
                            : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

LatentMap default_feature_map(const KernelModel& model) {
  if (model.is_sbm()) {
    return [](double k) {
      Eigen::RowVectorXd v(2);
      v << (k == 0.0 ? 1.0 : -0.5), 0.25 + 0.5 * k;
      return v;
    };
  }
  return [](double x) {
    Eigen::RowVectorXd v(2);
    v << x, std::cos(M_PI * x);
    return v;
  };
}

ConvergenceReport run_assumption_sweep(const ExperimentConfig& cfg) {
  const KernelModel model = cfg.build_model();
  model.require_shift(cfg.shift);
  const LimitFunction f = make_probe(cfg, model);
  const LimitFunction sf = apply_limit_operator(model, cfg.shift, f);
  return sweep(cfg, [&](const Cell& c) {
    const Graph g = trial_graph(cfg, model, c);
    const Eigen::MatrixXd s = shift_matrix(g, cfg.shift);
    const double err = mse_norm(s * f.sample(g.latents) - sf.sample(g.latents));
    return std::vector<CellRow>{{"assumption_mse", err, ""},
                                {"op_norm", operator_norm(s), ""}};
  });
}

ConvergenceReport run_signnet_sweep(const ExperimentConfig& cfg) {
  const KernelModel model = cfg.build_model();
  const LimitEigenSystem limit = limit_eigenpairs(model, cfg.shift, cfg.q);
  ConvergenceReport report = sweep(cfg, [&](const Cell& c) {
    const Graph g = trial_graph(cfg, model, c);
    const MatrixEigenSystem es = sym_eig(shift_matrix(g, cfg.shift));
    bool tie = limit.has_ties;
    const int check = std::min(cfg.q + 1, es.dim());
    for (int i = 0; i + 1 < check; ++i) {
      if (es.values[i] - es.values[i + 1] < 1e-6) tie = true;
    }
    const std::string flag = tie ? "tie" : "";
    std::vector<CellRow> rows;
    for (int i = 0; i < cfg.q; ++i) {
      const std::string idx = std::to_string(i + 1);
      rows.push_back({"alignment_u" + idx,
                      eigvec_alignment_error(es.vectors.col(i), limit.functions[i],
                                             g.latents),
                      flag});
      rows.push_back({"eigenvalue_error_" + idx,
                      std::abs(es.values[i] - limit.values[i]), flag});
    }
    return rows;
  });
  if (!report.rows.empty() && report.flag_rate() == 1.0) {
    throw DegenerateExperimentError("every trial has tied eigenvalues", report);
  }
  return report;
}

ConvergenceReport run_filter_sweep(const ExperimentConfig& cfg) {
  const KernelModel model = cfg.build_model();
  const IdealReluFilter ideal(filter_from_limit_gap(model, cfg.shift, cfg.filter_keep));
  ConvergenceReport report = sweep(cfg, [&](const Cell& c) {
    const Graph g = trial_graph(cfg, model, c);
    const Eigen::MatrixXd s = shift_matrix(g, cfg.shift);
    const Eigen::MatrixXd w =
        cfg.w_equals_s ? s : gram_matrix(model, g.latents, cfg.shift);
    const MatrixEigenSystem es = sym_eig(s);
    const Eigen::MatrixXd filtered =
        apply_spectral_filter(es, [&](double t) { return ideal(t); });
    std::vector<CellRow> rows{{"raw_frobenius", (s - w).norm(), ""},
                              {"ideal_frobenius", (filtered - w).norm(), ""}};
    if (cfg.fit_filter) rows.push_back({"fitted_frobenius", fit_filter(es, w).error, ""});
    rows.push_back({"op_norm", operator_norm(s - w), ""});
    return rows;
  });
  report.metadata["filter_center"] = ideal.params().center;
  report.metadata["filter_half_width"] = ideal.params().half_width;
  return report;
}

ConvergenceReport run_distance_sweep(const ExperimentConfig& cfg) {
  const KernelModel model = cfg.build_model();
  PeConfig pe;
  pe.family = PeFamily::kDistance;
  pe.q = cfg.q;
  pe.normalize = true;
  pe.filter_params = filter_from_limit_gap(model, cfg.shift, cfg.filter_keep);
  Rng rng = make_rng(stream_seed(cfg.seed, 0, 0, 11));
  pe.mlp = MlpParams::Glorot({cfg.q, 16, 4}, rng);
  const LimitFunction limit = limit_distance_pe(model, cfg.shift, pe);
  return sweep(cfg, [&](const Cell& c) {
    const Graph g = trial_graph(cfg, model, c);
    const PeResult r = distance_pe(shift_matrix(g, cfg.shift), pe);
    return std::vector<CellRow>{
        {"distance_pe_mse", mse_norm(r.values - limit.sample(g.latents)),
         r.warnings.empty() ? "" : "conditioning"}};
  });
}

ConvergenceReport run_noise_sweep(const ExperimentConfig& cfg) {
  const KernelModel model = cfg.build_model();
  const LatentMap f0 = default_feature_map(model);
  const LimitFunction f = feature_limit(model);
  const LimitFunction sf = apply_limit_operator(model, cfg.shift, f);
  const NoiseSpec noise = NoiseSpec::Isotropic(2, cfg.noise_variance);
  ConvergenceReport report = sweep(cfg, [&](const Cell& c) {
    const Graph g = trial_graph(cfg, model, c);
    const std::uint64_t seed = stream_seed(cfg.seed, static_cast<std::uint64_t>(c.n),
                                           static_cast<std::uint64_t>(c.trial));
    const Eigen::MatrixXd z = noisy_features(f0, g.latents, noise, seed);
    const Eigen::MatrixXd s = shift_matrix(g, cfg.shift);
    const double feature = mse_norm(z - f.sample(g.latents));
    return std::vector<CellRow>{
        {"feature_mse_sq", feature * feature, ""},
        {"smoothing_mse", mse_norm(smoothing_pe(s, z) - sf.sample(g.latents)), ""}};
  });
  report.metadata["noise_trace"] = 2.0 * cfg.noise_variance;
  return report;
}

ConvergenceReport run_cgnn_sweep(const ExperimentConfig& cfg) {
  const KernelModel model = cfg.build_model();
  const LimitFunction f = feature_limit(model);
  std::vector<int> widths{2};
  widths.insert(widths.end(), cfg.gnn_hidden.begin(), cfg.gnn_hidden.end());
  widths.push_back(1);
  std::vector<GnnParams> thetas;
  std::vector<LimitFunction> limits;
  for (int d = 0; d < cfg.gnn_draws; ++d) {
    Rng rng = make_rng(stream_seed(cfg.seed, 0, static_cast<std::uint64_t>(d), 12));
    thetas.push_back(GnnParams::Glorot(widths, rng));
    // Nonzero biases so the ReLUs are not all anchored at the origin.
    std::uniform_real_distribution<double> bias(-0.5, 0.5);
    for (auto& layer : thetas.back().layers) {
      for (Eigen::Index k = 0; k < layer.bias.size(); ++k) layer.bias[k] = bias(rng);
    }
    limits.push_back(cgnn_eval(model, cfg.shift, f, thetas.back()));
  }
  return sweep(cfg, [&](const Cell& c) {
    const Graph g = trial_graph(cfg, model, c);
    const Eigen::MatrixXd s = shift_matrix(g, cfg.shift);
    const Eigen::MatrixXd x = f.sample(g.latents);
    std::vector<CellRow> rows;
    for (int d = 0; d < cfg.gnn_draws; ++d) {
      rows.push_back({"cgnn_mse_theta" + std::to_string(d),
                      mse_norm(mpnn_forward(s, x, thetas[d]) - limits[d].sample(g.latents)),
                      ""});
    }
    return rows;
  });
}

}  // namespace rgnn
