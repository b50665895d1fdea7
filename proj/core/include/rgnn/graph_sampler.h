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

#ifndef RGNN_GRAPH_SAMPLER_H_
#define RGNN_GRAPH_SAMPLER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rgnn/kernel_models.h"

namespace rgnn {

// A sampled latent-position graph. Adjacency is dense, symmetric, 0/1 with a
// zero diagonal.
struct Graph {
  std::vector<double> latents;
  Eigen::MatrixXd adjacency;
  double sparsity = 1.0;  // alpha_n
  std::optional<Eigen::MatrixXd> features;

  int size() const { return static_cast<int>(latents.size()); }
};

// x_i ~ P iid, a_ij ~ Bernoulli(alpha w(x_i, x_j)) for i < j, mirrored.
// Deterministic given seed.
Graph sample_graph(const KernelModel& model, int n, double alpha,
                   std::uint64_t seed);

// Same edge draw on given latents.
Graph sample_graph_on(const KernelModel& model, std::vector<double> latents,
                      double alpha, std::uint64_t seed);

// Adjacency: A / (n alpha). Laplacian: D^{-1/2} A D^{-1/2}, with the rows and
// columns of isolated nodes left at zero.
Eigen::MatrixXd shift_matrix(const Graph& g, ShiftKind kind);

int count_isolated(const Graph& g);

// W_ij = w_S(x_i, x_j) / n, diagonal included.
Eigen::MatrixXd gram_matrix(const KernelModel& model,
                            std::span<const double> latents, ShiftKind kind);

// Covariance of the additive node-feature noise.
struct NoiseSpec {
  Eigen::MatrixXd covariance;

  static NoiseSpec Isotropic(int dim, double variance) {
    return {variance * Eigen::MatrixXd::Identity(dim, dim)};
  }
};

using LatentMap = std::function<Eigen::RowVectorXd(double)>;

// Row i is f0(x_i) + nu_i with nu_i ~ N(0, C_nu), iid.
Eigen::MatrixXd noisy_features(const LatentMap& f0,
                               std::span<const double> latents,
                               const NoiseSpec& noise, std::uint64_t seed);

// Permutation helpers; perm maps new position -> old position, i.e. the
// permutation matrix sigma has sigma(i, perm[i]) = 1.
Eigen::MatrixXd permute_rows(const Eigen::MatrixXd& m,
                             std::span<const int> perm);
Eigen::MatrixXd permute_symmetric(const Eigen::MatrixXd& s,
                                  std::span<const int> perm);
Graph permute_graph(const Graph& g, std::span<const int> perm);
std::vector<int> random_permutation(int n, Rng& rng);

// Plain-text export: edge list "i j" per line (0-based, i < j) behind a
// "# nodes <n> sparsity <alpha>" header, and a latent sidecar with one value
// per line.
void write_graph(const Graph& g, const std::string& edges_path,
                 const std::string& latents_path);
Graph read_graph(const std::string& edges_path,
                 const std::string& latents_path);

}  // namespace rgnn

#endif  // RGNN_GRAPH_SAMPLER_H_
