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

#ifndef RGNN_POSITIONAL_ENCODINGS_H_
#define RGNN_POSITIONAL_ENCODINGS_H_

// Positional encodings computed from a shift matrix, and their limits.
//
//   SignNet:   column block i is f_i(c u_i) + f_i(-c u_i), c = sqrt(n) or 1.
//   Distance:  row i is (1/n) sum_j f(c [S_h e_j, ..., S_h^q e_j]_i) with
//              c = n or 1 and S_h an optional spectral filter of S.
//   Smoothing: S Z.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rgnn/kernel_models.h"
#include "rgnn/limit_operator.h"
#include "rgnn/neural.h"
#include "rgnn/spectral.h"

namespace rgnn {

enum class PeFamily { kSignNet, kDistance, kSmoothing };

std::string_view to_string(PeFamily family);
PeFamily parse_pe_family(std::string_view text);

struct PeConfig {
  PeFamily family = PeFamily::kSignNet;
  int q = 1;
  bool normalize = true;
  std::vector<MlpParams> branches;  // SignNet: q scalar-input MLPs
  MlpParams mlp;                    // Distance: input width q
  // Distance only. `filter` takes precedence over `filter_params`.
  std::optional<ReluFilterParams> filter_params;
  ScalarFunction filter;

  void validate() const;
  bool has_filter() const { return filter || filter_params.has_value(); }
  ScalarFunction filter_function() const;
};

// Tie tolerance for the multiplicity warning of SignNet encodings.
inline constexpr double kPeTieTolerance = 1e-9;
// Distance encodings warn when ||S_h||^q exceeds this.
inline constexpr double kPowerConditioningBound = 1e6;

struct PeResult {
  Eigen::MatrixXd values;
  Eigen::VectorXd eigenvalues;  // SignNet: the first q + 1 (or n) values
  bool tie = false;
  std::vector<std::string> warnings;
};

PeResult signnet_pe(const Eigen::MatrixXd& s, const PeConfig& cfg);
PeResult signnet_pe(const MatrixEigenSystem& es, const PeConfig& cfg);

PeResult distance_pe(const Eigen::MatrixXd& s, const PeConfig& cfg);
PeResult distance_pe(const MatrixEigenSystem& es, const PeConfig& cfg);

Eigen::MatrixXd smoothing_pe(const Eigen::MatrixXd& s, const Eigen::MatrixXd& z);

// x -> [Qf_i(u_i(x))]_i with the limit eigenfunctions u_i.
LimitFunction limit_signnet_pe(const KernelModel& model, ShiftKind kind,
                               const PeConfig& cfg);

// z -> E_{x~P} f([S_h delta_x(z), ..., S_h^q delta_x(z)]).
LimitFunction limit_distance_pe(const KernelModel& model, ShiftKind kind,
                                const PeConfig& cfg);

// CSV with a "# family=<f> q=<q> normalize=<0|1>" header line, then a column
// header pe_0..pe_{p-1} and one row per node.
void write_pe_csv(const Eigen::MatrixXd& pe, const PeConfig& cfg,
                  const std::string& path);

}  // namespace rgnn

#endif  // RGNN_POSITIONAL_ENCODINGS_H_
