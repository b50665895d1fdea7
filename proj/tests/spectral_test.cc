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

#include "rgnn/spectral.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "rgnn/graph_sampler.h"
#include "test_util.h"

namespace rgnn {
namespace {

using testing::random_matrix;
using testing::random_symmetric;

TEST(SymEigTest, IdentityAndDiagonal) {
  EXPECT_EQ(sym_eig(Eigen::MatrixXd::Identity(3, 3)).values, Eigen::Vector3d::Ones());
  const MatrixEigenSystem es = sym_eig(Eigen::Vector3d(2, -1, 0).asDiagonal());
  EXPECT_DOUBLE_EQ(es.values[0], 2.0);
  EXPECT_DOUBLE_EQ(es.values[1], 0.0);
  EXPECT_DOUBLE_EQ(es.values[2], -1.0);
}

TEST(SymEigTest, ReconstructsRandomMatrix) {
  Rng rng = make_rng(1);
  const Eigen::MatrixXd s = random_symmetric(50, rng);
  const MatrixEigenSystem es = sym_eig(s);
  const Eigen::MatrixXd& u = es.vectors;
  EXPECT_LE((u * es.values.asDiagonal() * u.transpose() - s).norm(), 1e-8 * s.norm());
  EXPECT_LE((u * u.transpose() - Eigen::MatrixXd::Identity(50, 50)).cwiseAbs().maxCoeff(), 1e-8);
  for (int i = 0; i + 1 < 50; ++i) EXPECT_GE(es.values[i], es.values[i + 1]);
  const double norm = operator_norm(s);
  for (int i = 0; i < 50; ++i) {
    EXPECT_LE((s * u.col(i) - es.values[i] * u.col(i)).norm(), 1e-8 * norm);
  }
}

TEST(SymEigTest, RejectsNonFinite) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2, 2);
  s(0, 1) = std::nan("");
  EXPECT_THROW(sym_eig(s), std::invalid_argument);
}

TEST(MseNormTest, Examples) {
  EXPECT_DOUBLE_EQ(mse_norm(Eigen::MatrixXd::Ones(7, 1)), 1.0);
  EXPECT_DOUBLE_EQ(mse_norm(Eigen::MatrixXd::Zero(4, 3)), 0.0);
  Rng rng = make_rng(2);
  const Eigen::MatrixXd z = random_matrix(5, 3, rng);
  Eigen::MatrixXd doubled(10, 3);
  doubled << z, z;
  EXPECT_NEAR(mse_norm(doubled), mse_norm(z), 1e-15);
}

TEST(MseNormTest, ConvergesToL2Distance) {
  // f(x) = x, g(x) = x^2 on uniform[-1, 1]: ||f - g||^2 = 1/3 + 1/5.
  const double target = std::sqrt(1.0 / 3.0 + 1.0 / 5.0);
  std::vector<double> errors;
  for (int t = 0; t < 10; ++t) {
    Rng rng = make_rng(100 + t);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd d(10000, 1);
    for (int i = 0; i < 10000; ++i) {
      const double x = u(rng);
      d(i, 0) = x - x * x;
    }
    errors.push_back(std::abs(mse_norm(d) - target) / target);
  }
  std::sort(errors.begin(), errors.end());
  EXPECT_LT(0.5 * (errors[4] + errors[5]), 0.05);
}

TEST(OperatorNormTest, LanczosAgreesWithDenseSolver) {
  Rng rng = make_rng(3);
  const Eigen::MatrixXd s = random_symmetric(600, rng);
  const double exact = operator_norm(s, 10000);
  EXPECT_NEAR(operator_norm(s, 100), exact, 1e-6 * exact);
}

TEST(AlignmentErrorTest, ZeroForExactSamplingAndSignFree) {
  const KernelModel m = KernelModel::Gaussian();
  const LimitFunction f = LimitFunction::FromClosure(m, 1, [](double x) {
    return Eigen::RowVectorXd::Constant(1, std::cos(x));
  });
  const std::vector<double> latents{-0.5, 0.1, 0.7, 0.9};
  const Eigen::VectorXd u = f.sample(latents).col(0) / 2.0;
  EXPECT_NEAR(eigvec_alignment_error(u, f, latents), 0.0, 1e-15);
  const Eigen::VectorXd v = u + Eigen::VectorXd::Constant(4, 0.01);
  EXPECT_EQ(eigvec_alignment_error(v, f, latents), eigvec_alignment_error(-v, f, latents));
  EXPECT_THROW(eigvec_alignment_error(u.head(3), f, latents), std::invalid_argument);
}

TEST(IdealReluFilterTest, ClosedFormExamples) {
  const ReluFilterParams p{0.3, 0.1};
  const IdealReluFilter h(p);
  EXPECT_DOUBLE_EQ(h(0.0), 0.0);
  EXPECT_NEAR(h(0.3 + 0.1 + 1.0), 1.4, 1e-15);
  EXPECT_NEAR(h(-1.4), -1.4, 1e-15);
  EXPECT_NEAR(h(0.3), (0.3 + 0.1) / 2.0, 1e-15);
  EXPECT_NEAR(h(-0.3), -(0.3 + 0.1) / 2.0, 1e-15);
  EXPECT_DOUBLE_EQ(h(0.19), 0.0);
  EXPECT_DOUBLE_EQ(h(-0.19), 0.0);
}

TEST(IdealReluFilterTest, MlpAgreesWithClosedForm) {
  const IdealReluFilter h({1.0 / 24.0, 1.0 / 48.0});
  Rng rng = make_rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd t(10000, 1);
  for (int i = 0; i < 10000; ++i) t(i, 0) = u(rng);
  const Eigen::MatrixXd out = mlp_forward(h.mlp(), t);
  for (int i = 0; i < 10000; ++i) ASSERT_NEAR(out(i, 0), h(t(i, 0)), 1e-14);
}

TEST(IdealReluFilterTest, RejectsEmptyDeadZone) {
  EXPECT_THROW(IdealReluFilter({0.1, 0.2}), std::invalid_argument);
  EXPECT_THROW(IdealReluFilter({0.1, 0.0}), std::invalid_argument);
}

TEST(FilterFromGapTest, FixtureGap) {
  const ReluFilterParams p = filter_from_limit_gap(two_block_fixture(), ShiftKind::kAdjacency);
  EXPECT_NEAR(p.center, 1.0 / 24.0, 1e-15);
  EXPECT_NEAR(p.half_width, 1.0 / 48.0, 1e-15);
  const ReluFilterParams q = filter_from_spectrum(Eigen::Vector3d(-0.9, 0.5, 0.1), 2);
  EXPECT_NEAR(q.center, 0.3, 1e-15);
  EXPECT_NEAR(q.half_width, 0.1, 1e-15);
}

TEST(ApplySpectralFilterTest, IdentityZeroAndConjugation) {
  Rng rng = make_rng(5);
  const Eigen::MatrixXd s = random_symmetric(20, rng);
  EXPECT_LE((apply_spectral_filter(s, [](double t) { return t; }) - s).norm(), 1e-8 * s.norm());
  EXPECT_EQ(apply_spectral_filter(s, [](double) { return 0.0; }).norm(), 0.0);
  const std::vector<int> perm = random_permutation(20, rng);
  const auto h = [](double t) { return std::tanh(t) + 0.1 * t * t; };
  const Eigen::MatrixXd lhs = apply_spectral_filter(permute_symmetric(s, perm), h);
  const Eigen::MatrixXd rhs = permute_symmetric(apply_spectral_filter(s, h), perm);
  EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FitFilterTest, TargetEqualToShiftIsFitExactly) {
  Rng rng = make_rng(6);
  const Eigen::MatrixXd s = random_symmetric(30, rng) / 30.0;
  const FittedFilter fit = fit_filter(s, s);
  EXPECT_LE(fit.error, 1e-8);
}

TEST(FitFilterTest, NeverWorseThanUnfiltered) {
  const KernelModel m = two_block_fixture();
  for (int t = 0; t < 3; ++t) {
    const Graph g = sample_graph(m, 200, 1.0, 40 + t);
    const Eigen::MatrixXd s = shift_matrix(g, ShiftKind::kAdjacency);
    const Eigen::MatrixXd w = gram_matrix(m, g.latents, ShiftKind::kAdjacency);
    const FittedFilter fit = fit_filter(s, w);
    EXPECT_LE(fit.error, (s - w).norm() + 1e-12);
    // The oracle filter from the true gap is in the searched family's span.
    const IdealReluFilter ideal(filter_from_limit_gap(m, ShiftKind::kAdjacency));
    const double oracle =
        (apply_spectral_filter(s, [&](double x) { return ideal(x); }) - w).norm();
    EXPECT_LE(fit.error, 1.2 * oracle);
  }
}

TEST(FitFilterTest, ZeroTargetDrivesFilterToZero) {
  Rng rng = make_rng(7);
  const Eigen::MatrixXd s = random_symmetric(25, rng) / 25.0;
  const MatrixEigenSystem es = sym_eig(s);
  const FittedFilter fit = fit_filter(es, Eigen::MatrixXd::Zero(25, 25));
  // Truncating everything below the largest eigenvalue magnitude is in the
  // family, so the error is at most the largest |lambda|.
  EXPECT_LE(fit.error, es.values.cwiseAbs().maxCoeff() + 1e-12);
  EXPECT_LT(fit.error, s.norm());
}

TEST(FitFilterTest, GradientMlpImprovesOnInitialization) {
  const KernelModel m = two_block_fixture();
  const Graph g = sample_graph(m, 150, 1.0, 9);
  const Eigen::MatrixXd s = shift_matrix(g, ShiftKind::kAdjacency);
  const Eigen::MatrixXd w = gram_matrix(m, g.latents, ShiftKind::kAdjacency);
  FitOptions opt;
  opt.method = FitMethod::kGradientMlp;
  opt.iterations = 300;
  opt.seed = 3;
  const FittedFilter fit = fit_filter(s, w, opt);
  ASSERT_TRUE(fit.mlp.has_value());
  ASSERT_GE(fit.trace.size(), 2u);
  EXPECT_LT(fit.trace.back().objective, fit.trace.front().objective);
  EXPECT_NEAR(fit.error * fit.error, fit.trace.back().objective, 1e-8);
}

TEST(FitFilterTest, RejectsZeroBudgetAndShapeMismatch) {
  const Eigen::MatrixXd s = Eigen::MatrixXd::Identity(3, 3);
  FitOptions opt;
  opt.grid_size = 0;
  EXPECT_THROW(fit_filter(s, s, opt), std::invalid_argument);
  opt = {};
  opt.method = FitMethod::kGradientMlp;
  opt.iterations = 0;
  EXPECT_THROW(fit_filter(s, s, opt), std::invalid_argument);
  EXPECT_THROW(fit_filter(s, Eigen::MatrixXd::Identity(2, 2)), std::invalid_argument);
}

TEST(FitFilterTest, TraceCsv) {
  Rng rng = make_rng(8);
  const Eigen::MatrixXd s = random_symmetric(10, rng);
  const FittedFilter fit = fit_filter(s, 0.5 * s);
  const auto path = (std::filesystem::temp_directory_path() / "rgnn_trace.csv").string();
  write_fit_trace(fit, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "iteration,objective,parameters");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, static_cast<int>(fit.trace.size()));
  std::remove(path.c_str());
}

TEST(DavisKahanTest, IdenticalMatricesHold) {
  Rng rng = make_rng(9);
  const Eigen::MatrixXd s = random_symmetric(10, rng);
  const DavisKahanResult r = davis_kahan_check(s, s, 3);
  EXPECT_TRUE(r.holds);
  EXPECT_NEAR(r.lhs, 0.0, 1e-12);
}

TEST(DavisKahanTest, TwoByTwoHandCase) {
  const Eigen::Matrix2d s = Eigen::Vector2d(2, 1).asDiagonal();
  Eigen::Matrix2d t = s;
  t(0, 1) = t(1, 0) = 1e-3;
  const DavisKahanResult r = davis_kahan_check(s, t, 0);
  EXPECT_TRUE(r.holds);
  EXPECT_GT(r.slack, 0.0);
  EXPECT_NEAR(r.gap, 1.0, 1e-15);
  EXPECT_NEAR(r.bound, 1e-3, 1e-12);
}

TEST(DavisKahanTest, UnscaledBoundFailsForLargePerturbations) {
  // diag(1, 0) against [[1/2, b], [b, 1/2]]: the top eigenvector rotates by
  // pi/4 while ||E|| is about 1/2, so 2 sin(pi/8) > 1/2.
  const Eigen::Matrix2d s = Eigen::Vector2d(1, 0).asDiagonal();
  Eigen::Matrix2d t;
  t << 0.5, 1e-6, 1e-6, 0.5;
  const DavisKahanResult r = davis_kahan_check(s, t, 0);
  EXPECT_FALSE(r.holds);
  EXPECT_NEAR(r.lhs, 2.0 * std::sin(M_PI / 8.0), 1e-5);
}

TEST(DavisKahanTest, FlagsDegenerateGap) {
  const DavisKahanResult r =
      davis_kahan_check(Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Identity(3, 3), 1);
  EXPECT_TRUE(r.inconclusive);
}

TEST(KatoTest, EigenvalueShiftBoundedByOperatorNorm) {
  Rng rng = make_rng(10);
  for (int t = 0; t < 50; ++t) {
    const Eigen::MatrixXd a = random_symmetric(15, rng);
    const Eigen::MatrixXd b = a + 0.1 * random_symmetric(15, rng);
    const double gap = (sym_eig(a).values - sym_eig(b).values).cwiseAbs().maxCoeff();
    EXPECT_LE(gap, operator_norm(a - b) + 1e-12);
  }
}

}  // namespace
}  // namespace rgnn
