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
#include <random>

#include "rgnn/harness.h"
#include "rgnn/limit_operator.h"
#include "rgnn/positional_encodings.h"
#include "rgnn/spectral.h"

namespace rgnn {
namespace {

FixtureCheck near(std::string name, double value, double expected, double tol) {
  FixtureCheck c{std::move(name), value, expected, tol,
                 std::abs(value - expected) <= tol, ""};
  if (!c.passed) {
    c.detail = "observed " + std::to_string(value) + ", expected " +
               std::to_string(expected);
  }
  return c;
}

FixtureCheck above(std::string name, double value, double threshold) {
  FixtureCheck c{std::move(name), value, threshold, 0.0, value > threshold, ""};
  if (!c.passed) {
    c.detail = "observed " + std::to_string(value) + ", need > " +
               std::to_string(threshold);
  }
  return c;
}

// Largest |a(t) - b(t)| over `count` deterministic points in [lo, hi].
template <typename A, typename B>
double max_deviation(A&& a, B&& b, double lo, double hi, int count) {
  Rng rng = make_rng(0xf1c5ULL);
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::MatrixXd t(count, 1);
  for (int i = 0; i < count; ++i) t(i, 0) = dist(rng);
  const Eigen::VectorXd fa = a(t);
  double worst = 0.0;
  for (int i = 0; i < count; ++i) worst = std::max(worst, std::abs(fa[i] - b(t(i, 0))));
  return worst;
}

KernelModel four_block_fixture() {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(4, 4);
  c(0, 1) = c(1, 0) = 1.0;
  return KernelModel::Sbm(c, Eigen::VectorXd::Constant(4, 0.25));
}

}  // namespace

std::vector<FixtureCheck> run_fixture_checks() {
  std::vector<FixtureCheck> out;
  const KernelModel sbm = two_block_fixture();
  constexpr auto kAdj = ShiftKind::kAdjacency;

  const LimitFunction ones = LimitFunction::Constant(sbm, Eigen::RowVectorXd::Ones(1));
  const Eigen::MatrixXd s1 = apply_limit_operator(sbm, kAdj, ones).node_values();
  out.push_back(near("shift_of_ones_0", s1(0, 0), 1.0 / 3.0, 1e-12));
  out.push_back(near("shift_of_ones_1", s1(1, 0), 1.0 / 3.0, 1e-12));

  const LimitEigenSystem es = limit_eigenpairs(sbm, kAdj, 2);
  out.push_back(near("lambda_1", es.values[0], 1.0 / 3.0, 1e-12));
  out.push_back(near("lambda_2", es.values[1], 1.0 / 12.0, 1e-12));
  const Eigen::VectorXd u2 = es.functions[1].node_values().col(0);
  out.push_back(near("u2_ratio", u2[0] / u2[1], 2.0, 1e-10));
  out.push_back(near("u2_norm", l2_norm(es.functions[1], sbm), 1.0, 1e-12));
  out.push_back(near("laplacian_shift_kernel_00",
                     sbm.shift_kernel(ShiftKind::kLaplacian, 0, 0), 1.5, 1e-12));
  out.push_back(near("s_delta_square_00", s_delta_powers(sbm, kAdj, 0, 0, 2)[1],
                     1.0 / 8.0, 1e-12));

  const double k = 1.5;
  const MlpParams clamp = clamp_mlp(k);
  out.push_back(near("clamp_mlp_max_deviation",
                     max_deviation([&](const Eigen::MatrixXd& t) {
                                     return Eigen::VectorXd(mlp_forward(clamp, t).col(0));
                                   },
                                   [&](double t) { return std::clamp(t, -k, k); },
                                   -3 * k, 3 * k, 10000),
                     0.0, 1e-14));

  const ReluFilterParams gap = filter_from_limit_gap(sbm, kAdj);
  out.push_back(near("ideal_filter_center", gap.center, 1.0 / 24.0, 1e-12));
  out.push_back(near("ideal_filter_half_width", gap.half_width, 1.0 / 48.0, 1e-12));
  const IdealReluFilter ideal(gap);
  out.push_back(near("ideal_filter_max_deviation",
                     max_deviation([&](const Eigen::MatrixXd& t) {
                                     return Eigen::VectorXd(mlp_forward(ideal.mlp(), t).col(0));
                                   },
                                   ideal, -0.5, 0.5, 10000),
                     0.0, 1e-14));

  // Constant inputs stay constant through a limit GNN on this model.
  Rng rng = make_rng(0x9e37ULL);
  const GnnParams theta = GnnParams::Glorot({1, 8, 8, 1}, rng);
  const Eigen::VectorXd constant_out = cgnn_eval(sbm, kAdj, ones, theta).node_values().col(0);
  out.push_back(near("constant_gnn_spread",
                     constant_out.maxCoeff() - constant_out.minCoeff(), 0.0, 1e-10));
  // While |u2| separates the communities.
  PeConfig pe;
  pe.family = PeFamily::kSignNet;
  pe.q = 2;
  MlpParams relu = MlpParams::Zeros({1, 1, 1});
  relu.weights[0](0, 0) = 1.0;
  relu.weights[1](0, 0) = 1.0;
  pe.branches = {relu, relu};
  const Eigen::VectorXd col = limit_signnet_pe(sbm, kAdj, pe).node_values().col(1);
  out.push_back(above("signnet_u2_spread", std::abs(col[0] - col[1]), 1e-6));

  // Four-block model: distance encoding with f(t) = t + 1, q = 1.
  const KernelModel four = four_block_fixture();
  PeConfig dist;
  dist.family = PeFamily::kDistance;
  dist.q = 1;
  dist.mlp = MlpParams::Zeros({1, 1});
  dist.mlp.weights[0](0, 0) = 1.0;
  dist.mlp.biases[0][0] = 1.0;
  const LimitFunction g = limit_distance_pe(four, kAdj, dist);
  const Eigen::VectorXd gv = g.node_values().col(0);
  out.push_back(near("distance_pe_zero_rows_equal", gv[2] - gv[3], 0.0, 1e-12));
  out.push_back(near("distance_pe_zero_row_value", gv[2], 1.0, 1e-12));
  const Eigen::VectorXd h = apply_limit_operator(four, kAdj, g).node_values().col(0);
  out.push_back(above("shifted_distance_pe_separation", std::abs(h[2] - h[3]), 1e-6));
  return out;
}

ConvergenceReport run_fixture_suite() {
  ConvergenceReport report;
  for (const auto& c : run_fixture_checks()) {
    report.add("fixtures", 0, 0, c.name, c.value, c.passed ? "" : "failed");
  }
  report.metadata = {{"experiment_id", "fixtures"}, {"version", kVersion}};
  return report;
}

}  // namespace rgnn
