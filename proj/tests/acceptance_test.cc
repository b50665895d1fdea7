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

// Acceptance checks. Prints one PASS/FAIL line per criterion; the exit code
// is nonzero when any selected criterion fails.
//
//   acceptance_test                 all criteria
//   acceptance_test --criterion 4   one criterion (repeatable)

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "rgnn/graph_sampler.h"
#include "rgnn/harness.h"
#include "rgnn/neural.h"
#include "rgnn/positional_encodings.h"
#include "rgnn/spectral.h"
#include "test_util.h"

namespace {

using namespace rgnn;
using rgnn::testing::compare_with_finite_differences;
using rgnn::testing::random_matrix;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (ok ? "" : "FAILED ") << what << "; ";
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

nlohmann::json gaussian_model() { return {{"kind", "gaussian"}, {"sigma", 0.5}}; }

ExperimentConfig sweep_config(const std::string& id, nlohmann::json model,
                              ShiftKind kind) {
  ExperimentConfig cfg;
  cfg.experiment_id = id;
  cfg.model = std::move(model);
  cfg.shift = kind;
  cfg.seed = 20260101;
  return cfg;
}

// Median at the largest schedule size over the median at the smallest.
double ratio(const ConvergenceReport& r, const std::string& metric, int lo = 250,
             int hi = 2000) {
  return r.median(metric, hi) / r.median(metric, lo);
}

void criterion1(Outcome& o) {
  const auto start = std::chrono::steady_clock::now();
  const auto checks = run_fixture_checks();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& c : checks) {
    o.require(c.passed, c.name + "=" + fmt(c.value) +
                            (c.passed ? "" : " (" + c.detail + ")"));
  }
  o.require(secs < 1.0, "runtime " + fmt(secs) + " s");
}

void criterion2(Outcome& o) {
  const KernelModel model = two_block_fixture();
  double mpnn = 0, signnet = 0, distance = 0, smoothing = 0, sign = 0, deepset = 0;
  for (int seed = 0; seed < 20; ++seed) {
    const Graph g = sample_graph(model, 50, 1.0, stream_seed(7, 50, seed));
    Rng rng = make_rng(stream_seed(7, 50, seed, 99));
    const std::vector<int> perm = random_permutation(50, rng);
    const Eigen::MatrixXd s = shift_matrix(g, ShiftKind::kAdjacency);
    const Eigen::MatrixXd ps = permute_symmetric(s, perm);
    const Eigen::MatrixXd z = random_matrix(50, 3, rng);
    const Eigen::MatrixXd pz = permute_rows(z, perm);
    auto dev = [&](const Eigen::MatrixXd& permuted, const Eigen::MatrixXd& base) {
      return (permuted - permute_rows(base, perm)).cwiseAbs().maxCoeff();
    };

    const GnnParams theta = GnnParams::Glorot({3, 8, 8, 2}, rng);
    mpnn = std::max(mpnn, dev(mpnn_forward(ps, pz, theta), mpnn_forward(s, z, theta)));

    PeConfig sn;
    sn.family = PeFamily::kSignNet;
    sn.q = 2;
    for (int i = 0; i < 2; ++i) {
      MlpParams b = MlpParams::Glorot({1, 8, 4}, rng);
      b.biases[0] = random_matrix(1, 8, rng, 0.3);
      sn.branches.push_back(b);
    }
    signnet = std::max(signnet, dev(signnet_pe(ps, sn).values, signnet_pe(s, sn).values));

    PeConfig dp;
    dp.family = PeFamily::kDistance;
    dp.q = 3;
    dp.mlp = MlpParams::Glorot({3, 8, 2}, rng);
    dp.mlp.biases[0] = random_matrix(1, 8, rng, 0.3);
    distance = std::max(distance, dev(distance_pe(ps, dp).values, distance_pe(s, dp).values));
    smoothing = std::max(smoothing, dev(smoothing_pe(ps, pz), smoothing_pe(s, z)));

    MatrixEigenSystem es = sym_eig(s);
    const Eigen::MatrixXd before = signnet_pe(es, sn).values;
    es.vectors.col(0) *= -1.0;
    es.vectors.col(1) *= -1.0;
    sign = std::max(sign, (signnet_pe(es, sn).values - before).cwiseAbs().maxCoeff());

    const MlpParams f = MlpParams::Glorot({3, 8, 2}, rng);
    deepset = std::max(deepset, (deepset_aggregate(f, pz) - deepset_aggregate(f, z))
                                    .cwiseAbs()
                                    .maxCoeff());
  }
  o.require(mpnn <= 1e-10, "mpnn equivariance " + fmt(mpnn));
  o.require(signnet <= 1e-10, "signnet equivariance " + fmt(signnet));
  o.require(distance <= 1e-10, "distance equivariance " + fmt(distance));
  o.require(smoothing <= 1e-10, "smoothing equivariance " + fmt(smoothing));
  o.require(sign <= 1e-15, "sign invariance " + fmt(sign));
  o.require(deepset <= 1e-12, "deep set invariance " + fmt(deepset));
}

void criterion3(Outcome& o) {
  double worst_mlp = 0, worst_mpnn = 0;
  int skipped = 0;
  for (int c = 0; c < 20; ++c) {
    Rng rng = make_rng(stream_seed(3, 0, c));
    // MLP: loss = <mlp(x), R>.
    MlpParams p = MlpParams::Glorot({3, 6, 5, 2}, rng);
    for (auto& b : p.biases) b = random_matrix(1, static_cast<int>(b.size()), rng, 0.2);
    const Eigen::MatrixXd x = random_matrix(7, 3, rng);
    const Eigen::MatrixXd r = random_matrix(7, 2, rng);
    auto mlp_loss = [&](const Eigen::VectorXd& flat) {
      MlpParams q = p;
      unflatten(flat, q);
      return mlp_forward(q, x).cwiseProduct(r).sum();
    };
    const auto m = compare_with_finite_differences(
        mlp_loss, flatten(p), flatten(mlp_gradient(p, x, r).params));
    worst_mlp = std::max(worst_mlp, m.relative_error);
    skipped += m.skipped;

    // MPNN: loss = mean squared output.
    const int n = 12;
    Eigen::MatrixXd a = random_matrix(n, n, rng);
    const Eigen::MatrixXd s = (a + a.transpose()) / (2.0 * n);
    const Eigen::MatrixXd z = random_matrix(n, 3, rng);
    GnnParams theta = GnnParams::Glorot({3, 6, 5, 2}, rng);
    for (auto& l : theta.layers) l.bias = random_matrix(1, static_cast<int>(l.bias.size()), rng, 0.2);
    auto mpnn_loss = [&](const Eigen::VectorXd& flat) {
      GnnParams t = theta;
      unflatten(flat, t);
      return mpnn_forward(s, z, t).squaredNorm() / (n * 2.0);
    };
    const Eigen::MatrixXd out = mpnn_forward(s, z, theta);
    const auto g = mpnn_gradient(s, z, theta, out * (2.0 / (n * 2.0)));
    const auto q = compare_with_finite_differences(mpnn_loss, flatten(theta),
                                                   flatten(g.params));
    worst_mpnn = std::max(worst_mpnn, q.relative_error);
    skipped += q.skipped;
  }
  o.require(worst_mlp < 1e-4, "MLP worst relative error " + fmt(worst_mlp));
  o.require(worst_mpnn < 1e-4, "MPNN worst relative error " + fmt(worst_mpnn));
  o.detail << "kink coordinates skipped " << skipped << "; ";
}

void criterion4(Outcome& o) {
  const std::vector<std::pair<std::string, nlohmann::json>> models = {
      {"sbm", ExperimentConfig{}.model}, {"gaussian", gaussian_model()}};
  for (const auto& [name, model] : models) {
    for (ShiftKind kind : {ShiftKind::kAdjacency, ShiftKind::kLaplacian}) {
      const auto cfg = sweep_config("assumption", model, kind);
      const auto report = run_assumption_sweep(cfg);
      const double r = ratio(report, "assumption_mse");
      o.require(r < 0.6, name + "/" + std::string(to_string(kind)) + " ratio " + fmt(r));
    }
  }
}

void criterion5(Outcome& o) {
  const auto report =
      run_signnet_sweep(sweep_config("signnet", ExperimentConfig{}.model, ShiftKind::kAdjacency));
  for (int i = 1; i <= 2; ++i) {
    const std::string idx = std::to_string(i);
    const double a = ratio(report, "alignment_u" + idx);
    const double e = ratio(report, "eigenvalue_error_" + idx);
    o.require(a < 0.6, "alignment u" + idx + " ratio " + fmt(a));
    o.require(e < 0.5, "eigenvalue " + idx + " ratio " + fmt(e));
  }
  o.detail << "flag rate " << fmt(report.flag_rate()) << "; ";
}

void criterion6(Outcome& o) {
  const auto report =
      run_filter_sweep(sweep_config("filter", ExperimentConfig{}.model, ShiftKind::kAdjacency));
  const double ideal = ratio(report, "ideal_frobenius");
  const double raw = ratio(report, "raw_frobenius");
  const double fitted = report.median("fitted_frobenius", 1000);
  const double ideal_1000 = report.median("ideal_frobenius", 1000);
  o.require(ideal < 0.5, "ideal ratio " + fmt(ideal));
  o.require(raw >= 0.5 && raw <= 2.0, "raw ratio " + fmt(raw));
  o.require(fitted <= 1.2 * ideal_1000,
            "fitted/ideal at n=1000 " + fmt(fitted / ideal_1000));
}

void criterion7(Outcome& o) {
  auto cfg = sweep_config("noise", ExperimentConfig{}.model, ShiftKind::kAdjacency);
  cfg.schedule = {250, 500, 1000, 2000, 4000};
  const auto report = run_noise_sweep(cfg);
  const double trace = 2.0 * cfg.noise_variance;
  const double feature = report.median("feature_mse_sq", 4000);
  const double rel = std::abs(feature - trace) / trace;
  const double smooth = ratio(report, "smoothing_mse");
  o.require(rel <= 0.1, "feature MSE^2 at n=4000 " + fmt(feature) + " vs trace " + fmt(trace));
  o.require(smooth < 0.6, "smoothing ratio " + fmt(smooth));
}

void criterion8(Outcome& o) {
  const auto report =
      run_cgnn_sweep(sweep_config("cgnn", ExperimentConfig{}.model, ShiftKind::kAdjacency));
  for (int d = 0; d < 3; ++d) {
    const std::string m = "cgnn_mse_theta" + std::to_string(d);
    const double r = ratio(report, m);
    o.require(r < 0.6, m + " ratio " + fmt(r));
  }
}

void criterion9(Outcome& o) {
  auto cfg = sweep_config("fig1", gaussian_model(), ShiftKind::kAdjacency);
  cfg.seed = 0;
  const auto result = run_fig1_experiment(cfg);
  const auto& r = result.report;
  const int tr = cfg.train.n_train, te = cfg.train.n_test;
  const double norm_train = r.median("train_error_normalized", tr);
  const double norm_test = r.median("test_error_normalized", te);
  const double raw_test = r.median("test_error_unnormalized", te);
  o.require(norm_test < raw_test,
            "test error normalized " + fmt(norm_test) + " vs unnormalized " + fmt(raw_test));
  o.require(norm_test <= 2.0 * norm_train,
            "normalized test/train " + fmt(norm_test / norm_train));
  o.detail << "flag rate " << fmt(r.flag_rate()) << "; ";
}

void criterion10(Outcome& o) {
  Rng rng = make_rng(10);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = 30;
  int held = 0, inconclusive = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  for (int c = 0; c < 100; ++c) {
    // Eigenvalues spaced at least 0.5 apart, random orthogonal basis.
    Eigen::VectorXd lambda(n);
    for (int i = 0; i < n; ++i) lambda[i] = i + 0.5 * unit(rng);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(n, n, rng));
    const Eigen::MatrixXd basis = qr.householderQ();
    const Eigen::MatrixXd s = basis * lambda.asDiagonal() * basis.transpose();
    Eigen::MatrixXd e = rgnn::testing::random_symmetric(n, rng);
    e *= (0.01 + 0.2 * unit(rng)) * 0.5 / operator_norm(e);
    const int p = static_cast<int>(unit(rng) * n);
    const auto r = davis_kahan_check(s, s + e, p);
    if (r.inconclusive) ++inconclusive;
    if (r.holds) ++held;
    min_slack = std::min(min_slack, r.slack);
  }
  o.require(held == 100 && inconclusive == 0,
            std::to_string(held) + "/100 hold, min slack " + fmt(min_slack));
}

const std::map<int, std::pair<std::string, std::function<void(Outcome&)>>>& criteria() {
  static const std::map<int, std::pair<std::string, std::function<void(Outcome&)>>> all = {
      {1, {"exact fixtures", criterion1}},
      {2, {"structural invariants", criterion2}},
      {3, {"gradient correctness", criterion3}},
      {4, {"shift consistency decay", criterion4}},
      {5, {"eigenvector convergence", criterion5}},
      {6, {"spectral filter convergence", criterion6}},
      {7, {"noisy feature smoothing", criterion7}},
      {8, {"discrete to continuous GNN", criterion8}},
      {9, {"renormalized encodings generalize", criterion9}},
      {10, {"eigenvector perturbation bound", criterion10}},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      selected.insert(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
      return 2;
    }
  }
  if (selected.empty()) {
    for (const auto& [id, entry] : criteria()) selected.insert(id);
  }
  int failures = 0;
  for (int id : selected) {
    const auto it = criteria().find(id);
    if (it == criteria().end()) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      it->second.second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d %s  %s (%.1f s): %s\n", id, o.pass ? "PASS" : "FAIL",
                it->second.first.c_str(), secs, o.detail.str().c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
