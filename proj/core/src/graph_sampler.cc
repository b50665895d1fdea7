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

#include "rgnn/graph_sampler.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "rgnn/errors.h"

namespace rgnn {

Graph sample_graph(const KernelModel& model, int n, double alpha,
                   std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("node count must be >= 0");
  Rng rng = make_rng(stream_seed(seed, 0, 0, /*tag=*/1));
  std::vector<double> latents(n);
  for (auto& x : latents) x = model.sample_latent(rng);
  return sample_graph_on(model, std::move(latents), alpha, seed);
}

Graph sample_graph_on(const KernelModel& model, std::vector<double> latents,
                      double alpha, std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InvalidProbabilityError("sparsity alpha_n must be in (0, 1]");
  }
  if (alpha * model.max_kernel() > 1.0) {
    throw InvalidProbabilityError("alpha_n * max w exceeds 1");
  }
  for (double x : latents) model.check_latent(x);
  const int n = static_cast<int>(latents.size());
  Graph g;
  g.sparsity = alpha;
  g.adjacency = Eigen::MatrixXd::Zero(n, n);
  Rng rng = make_rng(stream_seed(seed, 0, 0, /*tag=*/2));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int j = 1; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      const double p = alpha * model.kernel(latents[i], latents[j]);
      if (unif(rng) < p) {
        g.adjacency(i, j) = 1.0;
        g.adjacency(j, i) = 1.0;
      }
    }
  }
  g.latents = std::move(latents);
  return g;
}

Eigen::MatrixXd shift_matrix(const Graph& g, ShiftKind kind) {
  const int n = g.size();
  if (kind == ShiftKind::kAdjacency) {
    if (n == 0) return Eigen::MatrixXd(0, 0);
    return g.adjacency / (n * g.sparsity);
  }
  const Eigen::VectorXd deg = g.adjacency.rowwise().sum();
  Eigen::VectorXd inv_sqrt(n);
  for (int i = 0; i < n; ++i) {
    inv_sqrt[i] = deg[i] > 0.0 ? 1.0 / std::sqrt(deg[i]) : 0.0;
  }
  return inv_sqrt.asDiagonal() * g.adjacency * inv_sqrt.asDiagonal();
}

int count_isolated(const Graph& g) {
  return static_cast<int>(
      (g.adjacency.rowwise().sum().array() == 0.0).count());
}

Eigen::MatrixXd gram_matrix(const KernelModel& model,
                            std::span<const double> latents, ShiftKind kind) {
  const auto n = static_cast<double>(latents.size());
  if (latents.empty()) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd w = model.shift_kernel_matrix(kind, latents, latents);
  // Exact symmetry regardless of evaluation order.
  w = 0.5 * (w + w.transpose()).eval();
  return w / n;
}

Eigen::MatrixXd noisy_features(const LatentMap& f0,
                               std::span<const double> latents,
                               const NoiseSpec& noise, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(latents.size());
  const Eigen::Index p = noise.covariance.rows();
  if (noise.covariance.cols() != p) {
    throw ShapeError("noise covariance must be square");
  }
  if ((noise.covariance - noise.covariance.transpose()).cwiseAbs().maxCoeff() >
      1e-12) {
    throw std::invalid_argument("noise covariance must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(noise.covariance);
  if (es.eigenvalues().minCoeff() < -1e-12) {
    throw std::invalid_argument("noise covariance must be p.s.d.");
  }
  // C = R R^T with R = U sqrt(Lambda).
  const Eigen::MatrixXd root =
      es.eigenvectors() *
      es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  Eigen::MatrixXd z(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::RowVectorXd row = f0(latents[i]);
    if (row.size() != p) throw ShapeError("f0 output width != noise dimension");
    z.row(i) = row;
  }
  Rng rng = make_rng(stream_seed(seed, 0, 0, /*tag=*/3));
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < p; ++c) g(i, c) = normal(rng);
  }
  z += g * root.transpose();
  return z;
}

Eigen::MatrixXd permute_rows(const Eigen::MatrixXd& m,
                             std::span<const int> perm) {
  if (static_cast<Eigen::Index>(perm.size()) != m.rows()) {
    throw ShapeError("permutation length != row count");
  }
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.row(i) = m.row(perm[i]);
  return out;
}

Eigen::MatrixXd permute_symmetric(const Eigen::MatrixXd& s,
                                  std::span<const int> perm) {
  if (s.rows() != s.cols() ||
      static_cast<Eigen::Index>(perm.size()) != s.rows()) {
    throw ShapeError("permutation length != matrix size");
  }
  const auto n = s.rows();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = s(perm[i], perm[j]);
  }
  return out;
}

Graph permute_graph(const Graph& g, std::span<const int> perm) {
  Graph out;
  out.sparsity = g.sparsity;
  out.latents.resize(g.latents.size());
  for (std::size_t i = 0; i < perm.size(); ++i) out.latents[i] = g.latents[perm[i]];
  out.adjacency = permute_symmetric(g.adjacency, perm);
  if (g.features) out.features = permute_rows(*g.features, perm);
  return out;
}

std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

void write_graph(const Graph& g, const std::string& edges_path,
                 const std::string& latents_path) {
  std::ofstream edges(edges_path);
  if (!edges) throw std::runtime_error("cannot write " + edges_path);
  edges << "# nodes " << g.size() << " sparsity "
        << std::setprecision(17) << g.sparsity << "\n";
  for (int j = 1; j < g.size(); ++j) {
    for (int i = 0; i < j; ++i) {
      if (g.adjacency(i, j) != 0.0) edges << i << ' ' << j << '\n';
    }
  }
  std::ofstream lat(latents_path);
  if (!lat) throw std::runtime_error("cannot write " + latents_path);
  lat << std::setprecision(17);
  for (double x : g.latents) lat << x << '\n';
}

Graph read_graph(const std::string& edges_path,
                 const std::string& latents_path) {
  std::ifstream lat(latents_path);
  if (!lat) throw std::runtime_error("cannot read " + latents_path);
  Graph g;
  double x;
  while (lat >> x) g.latents.push_back(x);
  const int n = g.size();
  g.adjacency = Eigen::MatrixXd::Zero(n, n);

  std::ifstream edges(edges_path);
  if (!edges) throw std::runtime_error("cannot read " + edges_path);
  std::string line;
  while (std::getline(edges, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    if (line[0] == '#') {
      std::string tag;
      is >> tag;
      while (is >> tag) {
        if (tag == "sparsity") is >> g.sparsity;
      }
      continue;
    }
    int i, j;
    if (!(is >> i >> j) || i < 0 || j < 0 || i >= n || j >= n || i == j) {
      throw std::runtime_error("bad edge line '" + line + "' in " + edges_path);
    }
    g.adjacency(i, j) = 1.0;
    g.adjacency(j, i) = 1.0;
  }
  return g;
}

}  // namespace rgnn
