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

#ifndef RGNN_KERNEL_MODELS_H_
#define RGNN_KERNEL_MODELS_H_

// Latent-position random graph models: a latent space with a sampling
// distribution P and a connectivity kernel w. Two families are supported:
//
//   * stochastic block models, where latents are community indices
//     0..K-1 (stored as doubles holding integral values), w is a K x K
//     matrix C and P a probability vector;
//   * a Gaussian kernel w(x, y) = a * exp(-(x - y)^2 / (2 sigma^2)) on an
//     interval [lo, hi] with the uniform distribution.
//
// Every model carries a quadrature rule for integrals against P. For SBMs the
// rule is exact (nodes are the communities, weights are P); for continuous
// models it is Gauss-Legendre rescaled to probability weights. Most of the
// limit-object machinery is written once against that rule.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "rgnn/rng.h"

namespace rgnn {

enum class ShiftKind {
  kAdjacency,  // S = A / (n alpha_n), w_S = w
  kLaplacian,  // S = D^{-1/2} A D^{-1/2}, w_S = w / sqrt(d(x) d(y))
};

std::string_view to_string(ShiftKind kind);
ShiftKind parse_shift_kind(std::string_view text);

// Probability-weighted quadrature: sum_g weights[g] f(nodes[g]) ~ E_P f.
struct Quadrature {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

// Gauss-Legendre rule on [lo, hi] with weights summing to one.
Quadrature gauss_legendre(int count, double lo, double hi);

struct GaussianParams {
  double sigma = 0.5;
  double lo = -1.0;
  double hi = 1.0;
  double amplitude = 1.0;  // peak value of w, in (0, 1]
  int quadrature_nodes = 512;
};

// Minimum degree below which Laplacian experiments are rejected.
inline constexpr double kMinDegree = 1e-6;

class KernelModel {
 public:
  enum class Variant { kSbm, kContinuous };

  // Validates C (square, symmetric, entries in [0, 1]) and P (nonnegative,
  // sums to one within 1e-12).
  static KernelModel Sbm(Eigen::MatrixXd connectivity,
                         Eigen::VectorXd proportions);
  static KernelModel Gaussian(const GaussianParams& params = {});

  Variant variant() const;
  bool is_sbm() const { return variant() == Variant::kSbm; }
  int communities() const;
  const Eigen::MatrixXd& connectivity() const;
  const Eigen::VectorXd& proportions() const;
  const GaussianParams& gaussian() const;
  const Quadrature& quadrature() const;

  // Throws DomainError when x is not a latent point of this model.
  void check_latent(double x) const;

  // w(x, y).
  double kernel(double x, double y) const;
  double max_kernel() const;

  // d(x) = E_{y~P} w(x, y); exact for SBMs, quadrature otherwise.
  double degree(double x) const;
  double min_degree() const;

  // w_S(x, y). Throws DegenerateModelError on zero degree (Laplacian).
  double shift_kernel(ShiftKind kind, double x, double y) const;

  // [w_S(xs[i], ys[j])]_{ij}, computing each degree once.
  Eigen::MatrixXd shift_kernel_matrix(ShiftKind kind,
                                      std::span<const double> xs,
                                      std::span<const double> ys) const;

  // [w_S(x, node_h)]_h over the quadrature nodes, using cached node degrees.
  Eigen::RowVectorXd shift_kernel_row(ShiftKind kind, double x) const;

  // d at the quadrature nodes.
  const Eigen::VectorXd& node_degrees() const;

  // w_S between quadrature nodes. Cached; thread-safe.
  const Eigen::MatrixXd& node_shift_kernel(ShiftKind kind) const;

  // Rejects Laplacian use when min d(x) over the quadrature nodes (with
  // positive weight) is below kMinDegree.
  void require_shift(ShiftKind kind) const;

  double sample_latent(Rng& rng) const;

  // SBM relabeling: community k of the result is community perm[k] of this.
  KernelModel relabeled(std::span<const int> perm) const;

  nlohmann::json to_json() const;

 private:
  struct Impl;
  explicit KernelModel(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

// The two-community fixture C = [[1/2, 1/4], [1/4, 3/8]], P = (1/3, 2/3).
KernelModel two_block_fixture();

// {"kind": "sbm", "C": [[...]], "P": [...]} or
// {"kind": "gaussian", "sigma": s, "interval": [a, b], "amplitude": a,
//  "quadrature_nodes": m}.
KernelModel model_from_json(const nlohmann::json& spec);
KernelModel load_model(const std::string& path);

}  // namespace rgnn

#endif  // RGNN_KERNEL_MODELS_H_
