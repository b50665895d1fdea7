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

#include <cmath>
#include <limits>

#include "rgnn/errors.h"
#include "rgnn/harness.h"
#include "rgnn/positional_encodings.h"
#include "rgnn/spectral.h"

namespace rgnn {
namespace {

double target_value(const std::string& name, double x) {
  if (name == "cos_pi") return std::cos(M_PI * x);
  if (name == "sin_pi") return std::sin(M_PI * x);
  if (name == "zero") return 0.0;
  if (name == "abs") return std::abs(x);
  if (name == "square") return x * x;
  throw ConfigError("unknown regression target: " + name);
}

// Graph-side inputs of one regression problem.
struct Problem {
  Eigen::MatrixXd shift;
  Eigen::MatrixXd eigvecs;  // first q, scaled per setting
  Eigen::MatrixXd target;   // n x 1
};

Problem make_problem(const KernelModel& model, const ExperimentConfig& cfg, int n,
                     std::uint64_t seed, bool normalize) {
  const Graph g = sample_graph(model, n, cfg.alpha_for(n), seed);
  Problem p;
  p.shift = shift_matrix(g, cfg.shift);
  const MatrixEigenSystem es = sym_eig(p.shift);
  const double scale = normalize ? std::sqrt(static_cast<double>(n)) : 1.0;
  p.eigvecs = scale * es.vectors.leftCols(cfg.q);
  p.target.resize(n, 1);
  for (int i = 0; i < n; ++i) p.target(i, 0) = target_value(cfg.train.target, g.latents[i]);
  return p;
}

struct Network {
  std::vector<MlpParams> branches;
  GnnParams gnn;
};

Eigen::MatrixXd encode(const Network& net, const Problem& p) {
  Eigen::MatrixXd z(p.eigvecs.rows(), net.gnn.input_dim());
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < net.branches.size(); ++i) {
    const Eigen::MatrixXd block = signnet_symmetrize(net.branches[i], p.eigvecs.col(i));
    z.middleCols(at, block.cols()) = block;
    at += block.cols();
  }
  return z;
}

double rmse(const Network& net, const Problem& p) {
  return mse_norm(mpnn_forward(p.shift, encode(net, p), net.gnn) - p.target);
}

Eigen::VectorXd pack(const Network& net) {
  std::vector<Eigen::VectorXd> parts;
  Eigen::Index total = 0;
  for (const auto& b : net.branches) {
    parts.push_back(flatten(b));
    total += parts.back().size();
  }
  parts.push_back(flatten(net.gnn));
  total += parts.back().size();
  Eigen::VectorXd out(total);
  Eigen::Index at = 0;
  for (const auto& v : parts) {
    out.segment(at, v.size()) = v;
    at += v.size();
  }
  return out;
}

void unpack(const Eigen::VectorXd& flat, Network& net) {
  Eigen::Index at = 0;
  for (auto& b : net.branches) {
    const auto size = flatten(b).size();
    unflatten(flat.segment(at, size), b);
    at += size;
  }
  unflatten(flat.segment(at, flat.size() - at), net.gnn);
}

// Loss (mean squared error) and its gradient with respect to pack(net).
double loss_and_gradient(const Network& net, const Problem& p, Eigen::VectorXd& grad) {
  const Eigen::MatrixXd z = encode(net, p);
  const Eigen::MatrixXd resid = mpnn_forward(p.shift, z, net.gnn) - p.target;
  const double n = static_cast<double>(resid.rows());
  const GnnGradient g = mpnn_gradient(p.shift, z, net.gnn, (2.0 / n) * resid);
  Network grad_net{{}, g.params};
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < net.branches.size(); ++i) {
    const auto width = net.branches[i].output_dim();
    grad_net.branches.push_back(signnet_gradient(net.branches[i], p.eigvecs.col(i),
                                                 g.input.middleCols(at, width)));
    at += width;
  }
  grad = pack(grad_net);
  return resid.squaredNorm() / n;
}

// Full-batch training; returns false when the loss stops being finite.
bool train(Network& net, const Problem& p, const TrainConfig& t) {
  Eigen::VectorXd theta = pack(net);
  Eigen::VectorXd grad;
  Eigen::VectorXd m = Eigen::VectorXd::Zero(theta.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(theta.size());
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  for (int step = 1; step <= t.steps; ++step) {
    unpack(theta, net);
    const double loss = loss_and_gradient(net, p, grad);
    if (!std::isfinite(loss) || !grad.allFinite()) return false;
    if (t.optimizer == "gd") {
      theta -= t.learning_rate * grad;
    } else {
      m = kBeta1 * m + (1.0 - kBeta1) * grad;
      v = kBeta2 * v + (1.0 - kBeta2) * grad.cwiseProduct(grad);
      const double c1 = 1.0 - std::pow(kBeta1, step);
      const double c2 = 1.0 - std::pow(kBeta2, step);
      theta -= t.learning_rate *
               ((m / c1).array() / ((v / c2).array().sqrt() + kEps)).matrix();
    }
  }
  unpack(theta, net);
  return std::isfinite(rmse(net, p));
}

}  // namespace

Fig1Result run_fig1_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const KernelModel model = cfg.build_model();
  const TrainConfig& t = cfg.train;
  struct Job {
    int seed;
    bool normalize;
  };
  std::vector<Job> jobs;
  for (int s = 0; s < t.seeds; ++s) {
    jobs.push_back({s, true});
    jobs.push_back({s, false});
  }
  struct Outcome {
    Fig1Model model;
    double train_error = 0.0;
    double test_error = 0.0;
  };
  std::vector<Outcome> outcomes(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), [&](int j) {
    const auto [s, normalize] = jobs[j];
    const auto us = static_cast<std::uint64_t>(s);
    const Problem train_p = make_problem(
        model, cfg, t.n_train,
        stream_seed(cfg.seed, static_cast<std::uint64_t>(t.n_train), us, 21), normalize);
    const Problem test_p = make_problem(
        model, cfg, t.n_test,
        stream_seed(cfg.seed, static_cast<std::uint64_t>(t.n_test), us, 22), normalize);
    // Both settings start from the same parameters.
    Rng rng = make_rng(stream_seed(cfg.seed, 0, us, 23));
    Network net;
    for (int i = 0; i < cfg.q; ++i) {
      net.branches.push_back(MlpParams::Glorot({1, t.branch_width, t.branch_out}, rng));
    }
    std::vector<int> widths{cfg.q * t.branch_out};
    widths.insert(widths.end(), cfg.gnn_hidden.begin(), cfg.gnn_hidden.end());
    widths.push_back(1);
    net.gnn = GnnParams::Glorot(widths, rng);

    Outcome& out = outcomes[j];
    out.model.seed = s;
    out.model.normalize = normalize;
    out.model.diverged = !train(net, train_p, t);
    out.model.branches = net.branches;
    out.model.gnn = net.gnn;
    if (!out.model.diverged) {
      out.train_error = rmse(net, train_p);
      out.test_error = rmse(net, test_p);
    } else {
      out.train_error = out.test_error = std::numeric_limits<double>::quiet_NaN();
    }
  }, cfg.threads);

  Fig1Result result;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const Outcome& o = outcomes[j];
    const std::string setting = jobs[j].normalize ? "normalized" : "unnormalized";
    const std::string flag = o.model.diverged ? "diverged" : "";
    result.report.add(cfg.experiment_id, t.n_train, jobs[j].seed,
                      "train_error_" + setting, o.train_error, flag);
    result.report.add(cfg.experiment_id, t.n_test, jobs[j].seed,
                      "test_error_" + setting, o.test_error, flag);
    result.models.push_back(o.model);
  }
  result.report.metadata = {{"experiment_id", cfg.experiment_id},
                            {"config", cfg.ToJson()},
                            {"version", kVersion},
                            {"seed", cfg.seed}};
  return result;
}

}  // namespace rgnn
