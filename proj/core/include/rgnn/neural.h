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

#ifndef RGNN_NEURAL_H_
#define RGNN_NEURAL_H_

// ReLU MLPs and the message-passing network
//   Z^(l) = relu(Z^(l-1) T0 + S Z^(l-1) T1 + 1 b^T),  out = Z^(L) T + 1 b^T
// with hand-written reverse mode. Nodes are rows throughout, so weights are
// d_in x d_out and act by right multiplication.

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rgnn/kernel_models.h"
#include "rgnn/limit_operator.h"
#include "rgnn/rng.h"

namespace rgnn {

struct MlpParams {
  std::vector<Eigen::MatrixXd> weights;    // d_l x d_{l+1}
  std::vector<Eigen::RowVectorXd> biases;  // 1 x d_{l+1}

  // Uniform(-a, a) weights with a = sqrt(6 / (fan_in + fan_out)), zero biases.
  static MlpParams Glorot(const std::vector<int>& widths, Rng& rng);
  static MlpParams Zeros(const std::vector<int>& widths);

  int layers() const { return static_cast<int>(weights.size()); }
  int input_dim() const;
  int output_dim() const;
  std::vector<int> widths() const;
  // Throws ShapeError on a broken chain, invalid_argument on non-finite data.
  void validate() const;
};

// Rows of x are inputs. Hidden layers use ReLU, the last layer is linear.
Eigen::MatrixXd mlp_forward(const MlpParams& p, const Eigen::MatrixXd& x);

struct MlpGradient {
  MlpParams params;       // d loss / d weights, biases
  Eigen::MatrixXd input;  // d loss / d x
};

// Backpropagates `upstream` (d loss / d output, same shape as the output).
// relu'(0) is taken as 0.
MlpGradient mlp_gradient(const MlpParams& p, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& upstream);

struct GnnLayer {
  Eigen::MatrixXd self_weight;      // theta_0
  Eigen::MatrixXd neighbor_weight;  // theta_1
  Eigen::RowVectorXd bias;
};

struct GnnParams {
  std::vector<GnnLayer> layers;
  Eigen::MatrixXd readout;
  Eigen::RowVectorXd readout_bias;

  // widths = {d_0, hidden..., d_out}; one message-passing layer per hidden
  // width, then the linear readout.
  static GnnParams Glorot(const std::vector<int>& widths, Rng& rng);
  static GnnParams Zeros(const std::vector<int>& widths);

  int input_dim() const;
  int output_dim() const;
  std::vector<int> widths() const;
  void validate() const;
};

Eigen::MatrixXd mpnn_forward(const Eigen::MatrixXd& s, const Eigen::MatrixXd& z0,
                             const GnnParams& theta);

struct GnnGradient {
  GnnParams params;
  Eigen::MatrixXd input;  // d loss / d Z0
};

GnnGradient mpnn_gradient(const Eigen::MatrixXd& s, const Eigen::MatrixXd& z0,
                          const GnnParams& theta,
                          const Eigen::MatrixXd& upstream);

// Continuous counterpart of mpnn_forward: the same recursion with S replaced
// by the limit operator. Exact on SBMs; on continuous models the result is
// evaluable at any latent (the operator term uses the quadrature rule).
LimitFunction cgnn_eval(const KernelModel& model, ShiftKind kind,
                        const LimitFunction& f0, const GnnParams& theta);

// f(u) + f(-u) with u a column of scalars; p must have input width 1.
Eigen::MatrixXd signnet_symmetrize(const MlpParams& p, const Eigen::VectorXd& u);

// Parameter gradient of signnet_symmetrize.
MlpParams signnet_gradient(const MlpParams& p, const Eigen::VectorXd& u,
                           const Eigen::MatrixXd& upstream);

// Mean over rows of mlp_forward(rows).
Eigen::RowVectorXd deepset_aggregate(const MlpParams& p,
                                     const Eigen::MatrixXd& rows);

// Scalar MLP t -> clamp(t, -k, k) = relu(t + k) - relu(t - k) - k.
MlpParams clamp_mlp(double k);

// Flat parameter vectors, in layer order (weights column-major, then bias).
Eigen::VectorXd flatten(const MlpParams& p);
void unflatten(const Eigen::VectorXd& flat, MlpParams& p);
Eigen::VectorXd flatten(const GnnParams& p);
void unflatten(const Eigen::VectorXd& flat, GnnParams& p);

// Text tensor dump. Each tensor is a "# <name> <rows> <cols>" line followed by
// its rows; values are written with round-trip precision.
void write_tensors(std::ostream& out, const std::string& prefix,
                   const MlpParams& p);
void write_tensors(std::ostream& out, const std::string& prefix,
                   const GnnParams& p);
// Reads tensors written by write_tensors into an existing shape.
void read_tensors(std::istream& in, MlpParams& p);
void read_tensors(std::istream& in, GnnParams& p);

}  // namespace rgnn

#endif  // RGNN_NEURAL_H_
