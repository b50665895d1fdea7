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

#ifndef RGNN_LIMIT_OPERATOR_H_
#define RGNN_LIMIT_OPERATOR_H_

// Functions on the latent space and the limit shift operator
//   (S f)(x) = E_{y~P} w_S(x, y) f(y).
// For SBMs everything is exact finite arithmetic over the K communities; for
// continuous kernels integrals use the model's quadrature rule, and functions
// obtained through the operator carry a Nystrom-style pointwise extension.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rgnn/kernel_models.h"

namespace rgnn {

class LimitFunction {
 public:
  enum class Representation {
    kExact,    // K x q values over the communities
    kGrid,     // values on the quadrature nodes, linear interpolation between
    kClosure,  // evaluable at any latent, node values cached
  };
  using Pointwise = std::function<Eigen::RowVectorXd(double)>;

  LimitFunction() = default;

  // Values at the model's quadrature nodes (rows) for each output (cols).
  // Exact for SBMs, grid otherwise.
  static LimitFunction FromNodeValues(const KernelModel& model,
                                      Eigen::MatrixXd values);
  // Black-box function; node values are evaluated eagerly.
  static LimitFunction FromClosure(const KernelModel& model, int dim,
                                   Pointwise fn);
  static LimitFunction Constant(const KernelModel& model,
                                const Eigen::RowVectorXd& value);

  Representation representation() const { return representation_; }
  int dim() const { return static_cast<int>(values_.cols()); }
  const Eigen::MatrixXd& node_values() const { return values_; }

  Eigen::RowVectorXd operator()(double x) const;

  // [f(x_i)]_i, an n x q matrix.
  Eigen::MatrixXd sample(std::span<const double> latents) const;

  // Output column c as a scalar function.
  LimitFunction column(int c) const;

 private:
  Representation representation_ = Representation::kExact;
  Eigen::MatrixXd values_;
  Eigen::VectorXd nodes_;
  Pointwise pointwise_;
};

// S f. Throws ShapeError when f was built for a different latent space.
LimitFunction apply_limit_operator(const KernelModel& model, ShiftKind kind,
                                   const LimitFunction& f);

// ||f||_{L2(P)}.
double l2_norm(const LimitFunction& f, const KernelModel& model);

// Eigen ordering: nonzero eigenvalues descending, then zeros.
inline constexpr double kZeroEigenvalue = 1e-10;
inline constexpr double kTieTolerance = 1e-9;

struct LimitEigenSystem {
  Eigen::VectorXd values;
  // Scalar eigenfunctions, L2(P)-orthonormal, sign canonicalized so that the
  // node value of largest magnitude is positive.
  std::vector<LimitFunction> functions;
  bool truncated = false;  // some requested pair has a zero eigenvalue
  bool has_ties = false;   // two of the first q + 1 eigenvalues within 1e-9
  std::vector<std::string> warnings;

  int count() const { return static_cast<int>(values.size()); }
};

// SBM: eigendecomposition of C_P = diag(sqrt P) C_S diag(sqrt P) mapped back
// by diag(1/sqrt P). Continuous: Nystrom on the weighted quadrature kernel,
// with extension u(x) = (1/lambda) E_y w_S(x, y) u(y).
LimitEigenSystem limit_eigenpairs(const KernelModel& model, ShiftKind kind,
                                  int q);

// All eigenvalues of the operator in the limit ordering (K of them for SBMs,
// one per quadrature node otherwise).
Eigen::VectorXd limit_spectrum(const KernelModel& model, ShiftKind kind);

// [S delta_x(z), S^2 delta_x(z), ..., S^q delta_x(z)] where
// S delta_x = w_S(., x) and S^k delta_x = S (S^{k-1} delta_x).
Eigen::VectorXd s_delta_powers(const KernelModel& model, ShiftKind kind,
                               double x, double z, int q);

// Serializes eigenpairs as CSV: index, eigenvalue, then node values.
void write_eigensystem_csv(const LimitEigenSystem& es, const std::string& path);

}  // namespace rgnn

#endif  // RGNN_LIMIT_OPERATOR_H_
