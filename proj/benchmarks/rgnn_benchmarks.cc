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

#include <benchmark/benchmark.h>

#include "rgnn/graph_sampler.h"
#include "rgnn/kernel_models.h"
#include "rgnn/limit_operator.h"
#include "rgnn/neural.h"
#include "rgnn/positional_encodings.h"
#include "rgnn/spectral.h"

namespace rgnn {
namespace {

Eigen::MatrixXd fixture_shift(int n) {
  const Graph g = sample_graph(two_block_fixture(), n, 1.0, 7);
  return shift_matrix(g, ShiftKind::kAdjacency);
}

void BM_SampleGraph(benchmark::State& state) {
  const KernelModel m = two_block_fixture();
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_graph(m, n, 1.0, 1));
  state.SetComplexityN(n);
}
BENCHMARK(BM_SampleGraph)->Arg(250)->Arg(500)->Arg(1000)->Arg(2000)->Complexity(benchmark::oNSquared);

void BM_SymEig(benchmark::State& state) {
  const Eigen::MatrixXd s = fixture_shift(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sym_eig(s));
}
BENCHMARK(BM_SymEig)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_OperatorNormLanczos(benchmark::State& state) {
  const Eigen::MatrixXd s = fixture_shift(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(operator_norm(s));
}
BENCHMARK(BM_OperatorNormLanczos)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_MpnnForward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd s = fixture_shift(n);
  Rng rng = make_rng(3);
  const GnnParams p = GnnParams::Glorot({2, 16, 16, 1}, rng);
  const Eigen::MatrixXd z = Eigen::MatrixXd::Ones(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(mpnn_forward(s, z, p));
}
BENCHMARK(BM_MpnnForward)->Arg(250)->Arg(500)->Arg(1000)->Arg(2000);

void BM_DistancePe(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MatrixEigenSystem es = sym_eig(fixture_shift(n));
  Rng rng = make_rng(4);
  PeConfig cfg;
  cfg.family = PeFamily::kDistance;
  cfg.q = 2;
  cfg.mlp = MlpParams::Glorot({2, 8, 1}, rng);
  cfg.filter_params = filter_from_limit_gap(two_block_fixture(), ShiftKind::kAdjacency);
  for (auto _ : state) benchmark::DoNotOptimize(distance_pe(es, cfg));
}
BENCHMARK(BM_DistancePe)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_FitFilterGrid(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const KernelModel m = two_block_fixture();
  const Graph g = sample_graph(m, n, 1.0, 5);
  const MatrixEigenSystem es = sym_eig(shift_matrix(g, ShiftKind::kAdjacency));
  const Eigen::MatrixXd w = gram_matrix(m, g.latents, ShiftKind::kAdjacency);
  for (auto _ : state) benchmark::DoNotOptimize(fit_filter(es, w));
}
BENCHMARK(BM_FitFilterGrid)->Arg(250)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_GaussianLimitEigenpairs(benchmark::State& state) {
  const KernelModel m = KernelModel::Gaussian();
  for (auto _ : state) benchmark::DoNotOptimize(limit_eigenpairs(m, ShiftKind::kAdjacency, 4));
}
BENCHMARK(BM_GaussianLimitEigenpairs)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace rgnn

BENCHMARK_MAIN();
