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

#ifndef RGNN_SPECTRAL_H_
#define RGNN_SPECTRAL_H_

// Dense symmetric spectral tools: eigensystems, MSE-type norms, spectral
// filters S -> U h(Lambda) U^T, the piecewise-linear ReLU filter with a dead
// zone around zero, and fitting of a filter to a target matrix.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rgnn/limit_operator.h"
#include "rgnn/neural.h"

namespace rgnn {

struct MatrixEigenSystem {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // orthonormal columns

  int dim() const { return static_cast<int>(values.size()); }
};

// Full decomposition of a symmetric matrix (symmetrized defensively).
// Throws std::invalid_argument on non-finite input.
MatrixEigenSystem sym_eig(const Eigen::MatrixXd& s);

// ||Z||_F / sqrt(n).
double mse_norm(const Eigen::MatrixXd& z);

// Largest absolute eigenvalue of a symmetric matrix. Exact for small
// matrices, Lanczos with full reorthogonalization beyond `exact_limit`.
double operator_norm(const Eigen::MatrixXd& s, int exact_limit = 400);

// min over s in {-1, 1} of mse_norm(s sqrt(n) u - [u_limit(x_i)]_i).
double eigvec_alignment_error(const Eigen::VectorXd& u_sampled,
                              const LimitFunction& u_limit,
                              std::span<const double> latents);

struct ReluFilterParams {
  double center = 0.0;      // lambda bar
  double half_width = 0.0;  // tau

  // Requires half_width > 0 and center - half_width > 0.
  void validate() const;
};

// Identity for |t| >= center + half_width, zero for |t| <= center -
// half_width, linear in between.
class IdealReluFilter {
 public:
  explicit IdealReluFilter(const ReluFilterParams& params);

  const ReluFilterParams& params() const { return params_; }
  // The six-ReLU closed form.
  double operator()(double t) const;
  // One hidden layer of width 4 realizing the same function.
  const MlpParams& mlp() const { return mlp_; }

 private:
  ReluFilterParams params_;
  MlpParams mlp_;
};

IdealReluFilter ideal_relu_filter(const ReluFilterParams& params);

// Filter parameters for keeping the `keep` eigenvalues of largest magnitude:
// with a the smallest kept |lambda| and b the largest dropped one,
// tau = (a - b) / 4 and center = (a + b) / 2.
ReluFilterParams filter_from_spectrum(const Eigen::VectorXd& values, int keep);

// Same from the limit operator. keep <= 0 keeps every nonzero eigenvalue
// (SBMs) or picks the largest gap among the leading eight (continuous).
ReluFilterParams filter_from_limit_gap(const KernelModel& model,
                                       ShiftKind kind, int keep = 0);

using ScalarFunction = std::function<double(double)>;

Eigen::MatrixXd apply_spectral_filter(const MatrixEigenSystem& es,
                                      const ScalarFunction& h);
Eigen::MatrixXd apply_spectral_filter(const Eigen::MatrixXd& s,
                                      const ScalarFunction& h);

enum class FitMethod { kGridIdeal, kGradientMlp };

struct FitOptions {
  FitMethod method = FitMethod::kGridIdeal;
  int grid_size = 32;        // per axis, GridIdeal
  int iterations = 2000;     // GradientMlp
  double step = 1e-2;        // GradientMlp
  int hidden = 16;           // GradientMlp
  std::uint64_t seed = 0;    // GradientMlp initialization
  int trace_every = 0;       // 0 records only improvements
};

struct FitTraceRow {
  int iteration = 0;
  double objective = 0.0;  // squared Frobenius error
  std::vector<double> parameters;
};

struct FittedFilter {
  FitMethod method = FitMethod::kGridIdeal;
  bool identity = false;  // the identity candidate won (GridIdeal)
  std::optional<ReluFilterParams> ideal;
  std::optional<MlpParams> mlp;
  double error = 0.0;  // Frobenius norm of S_filtered - W
  std::vector<FitTraceRow> trace;

  double operator()(double t) const;
};

// Minimizes ||U diag(h(lambda)) U^T - W||_F over the chosen family.
// GridIdeal also evaluates the identity, so the result never exceeds
// ||S - W||_F.
FittedFilter fit_filter(const MatrixEigenSystem& es, const Eigen::MatrixXd& w,
                        const FitOptions& options = {});
FittedFilter fit_filter(const Eigen::MatrixXd& s, const Eigen::MatrixXd& w,
                        const FitOptions& options = {});

// CSV with columns iteration, objective, parameters (';'-separated).
void write_fit_trace(const FittedFilter& fit, const std::string& path);

struct DavisKahanResult {
  bool inconclusive = false;  // eigengap of S below 1e-8
  bool holds = false;
  double gap = 0.0;
  double lhs = 0.0;    // min_s ||s u_p - u~_p||
  double bound = 0.0;  // ||S - S~||_op / gap
  double slack = 0.0;  // bound - lhs
};

// p is the 0-based position in descending order.
DavisKahanResult davis_kahan_check(const Eigen::MatrixXd& s,
                                   const Eigen::MatrixXd& s_tilde, int p);

}  // namespace rgnn

#endif  // RGNN_SPECTRAL_H_
