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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>

#include "rgnn/errors.h"

namespace rgnn {
namespace {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols()) throw ShapeError("matrix is not square");
  if (!s.allFinite()) throw std::invalid_argument("non-finite matrix entries");
  return 0.5 * (s + s.transpose());
}

Eigen::VectorXd descending_values(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(s),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

double lanczos_norm(const Eigen::MatrixXd& s, int steps) {
  const Eigen::Index n = s.rows();
  const int k = static_cast<int>(std::min<Eigen::Index>(n, steps));
  Eigen::MatrixXd v(n, k);
  std::vector<double> alpha, beta;
  Rng rng(0x5eedULL);
  std::normal_distribution<double> normal;
  Eigen::VectorXd q(n);
  for (Eigen::Index i = 0; i < n; ++i) q[i] = normal(rng);
  q.normalize();
  for (int j = 0; j < k; ++j) {
    v.col(j) = q;
    Eigen::VectorXd w = s * q;
    alpha.push_back(q.dot(w));
    // Two passes of classical Gram-Schmidt against the whole basis.
    for (int pass = 0; pass < 2; ++pass) {
      w -= v.leftCols(j + 1) * (v.leftCols(j + 1).transpose() * w);
    }
    const double b = w.norm();
    if (j + 1 == k || b < 1e-12) break;
    beta.push_back(b);
    q = w / b;
  }
  const auto m = static_cast<Eigen::Index>(alpha.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    t(i, i) = alpha[i];
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<double> log_space(double lo, double hi, int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 1.0 : static_cast<double>(i) / (count - 1);
    out[i] = std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
  }
  return out;
}

// Squared error of U diag(mu) U^T - W from the diagonal of U^T W U.
double fit_objective(const Eigen::VectorXd& mu, const Eigen::VectorXd& diag,
                     double w_sq) {
  return mu.squaredNorm() - 2.0 * mu.dot(diag) + w_sq;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

}  // namespace

MatrixEigenSystem sym_eig(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(s));
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("symmetric eigensolver did not converge");
  }
  MatrixEigenSystem out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

double mse_norm(const Eigen::MatrixXd& z) {
  if (z.rows() == 0) return 0.0;
  return z.norm() / std::sqrt(static_cast<double>(z.rows()));
}

double operator_norm(const Eigen::MatrixXd& s, int exact_limit) {
  if (s.rows() == 0) return 0.0;
  if (s.rows() <= exact_limit) return descending_values(s).cwiseAbs().maxCoeff();
  return lanczos_norm(symmetrized(s), 120);
}

double eigvec_alignment_error(const Eigen::VectorXd& u_sampled,
                              const LimitFunction& u_limit,
                              std::span<const double> latents) {
  if (u_sampled.size() != static_cast<Eigen::Index>(latents.size())) {
    throw ShapeError("eigenvector length differs from the number of latents");
  }
  if (u_limit.dim() != 1) throw ShapeError("limit eigenfunction must be scalar");
  const Eigen::VectorXd target = u_limit.sample(latents).col(0);
  const Eigen::VectorXd scaled =
      std::sqrt(static_cast<double>(u_sampled.size())) * u_sampled;
  return std::min(mse_norm(scaled - target), mse_norm(-scaled - target));
}

void ReluFilterParams::validate() const {
  if (!(half_width > 0.0) || !(center - half_width > 0.0) ||
      !std::isfinite(center)) {
    throw std::invalid_argument(
        "ReLU filter needs half_width > 0 and center > half_width");
  }
}

IdealReluFilter::IdealReluFilter(const ReluFilterParams& params)
    : params_(params) {
  params_.validate();
  const double c = params_.center;
  const double t = params_.half_width;
  const double a = (c + t) / (2.0 * t);
  mlp_ = MlpParams::Zeros({1, 4, 1});
  mlp_.weights[0] << 1.0, 1.0, -1.0, -1.0;
  mlp_.biases[0] << -(c - t), -(c + t), -(c - t), -(c + t);
  mlp_.weights[1] << a, 1.0 - a, -a, a - 1.0;
}

double IdealReluFilter::operator()(double x) const {
  const double c = params_.center;
  const double t = params_.half_width;
  const double a = (c + t) / (2.0 * t);
  auto r = [](double v) { return v > 0.0 ? v : 0.0; };
  return a * (r(x - c + t) - r(x - c - t)) + r(x - c - t) -
         a * (r(-x - c + t) - r(-x - c - t)) - r(-x - c - t);
}

IdealReluFilter ideal_relu_filter(const ReluFilterParams& params) {
  return IdealReluFilter(params);
}

ReluFilterParams filter_from_spectrum(const Eigen::VectorXd& values, int keep) {
  if (keep < 1 || keep >= values.size()) {
    throw std::invalid_argument("filter must keep between 1 and count-1 values");
  }
  std::vector<double> mags(values.data(), values.data() + values.size());
  for (double& m : mags) m = std::abs(m);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  const double a = mags[keep - 1];
  const double b = mags[keep];
  if (!(a - b > 0.0)) {
    throw DegenerateModelError("no spectral gap after the kept eigenvalues");
  }
  ReluFilterParams p{0.5 * (a + b), 0.25 * (a - b)};
  p.validate();
  return p;
}

ReluFilterParams filter_from_limit_gap(const KernelModel& model,
                                       ShiftKind kind, int keep) {
  Eigen::VectorXd spectrum = limit_spectrum(model, kind);
  if (model.is_sbm()) {
    // Communities without mass contribute exact zeros.
    Eigen::VectorXd padded(spectrum.size() + 1);
    padded << spectrum, 0.0;
    spectrum = padded;
  }
  if (keep <= 0) {
    if (model.is_sbm()) {
      keep = static_cast<int>(
          (spectrum.array().abs() > kZeroEigenvalue).count());
    } else {
      std::vector<double> mags(spectrum.data(),
                               spectrum.data() + spectrum.size());
      for (double& m : mags) m = std::abs(m);
      std::sort(mags.begin(), mags.end(), std::greater<>());
      double best = -1.0;
      const int limit = std::min<int>(8, static_cast<int>(mags.size()) - 1);
      for (int k = 1; k <= limit; ++k) {
        if (mags[k - 1] - mags[k] > best) {
          best = mags[k - 1] - mags[k];
          keep = k;
        }
      }
    }
  }
  return filter_from_spectrum(spectrum, keep);
}

Eigen::MatrixXd apply_spectral_filter(const MatrixEigenSystem& es,
                                      const ScalarFunction& h) {
  Eigen::VectorXd mu(es.dim());
  for (int i = 0; i < es.dim(); ++i) mu[i] = h(es.values[i]);
  // Only columns with a nonzero filtered value contribute.
  std::vector<int> keep;
  for (int i = 0; i < es.dim(); ++i) {
    if (mu[i] != 0.0) keep.push_back(i);
  }
  const auto n = es.vectors.rows();
  Eigen::MatrixXd u(n, static_cast<Eigen::Index>(keep.size()));
  Eigen::VectorXd m(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    u.col(static_cast<Eigen::Index>(j)) = es.vectors.col(keep[j]);
    m[static_cast<Eigen::Index>(j)] = mu[keep[j]];
  }
  Eigen::MatrixXd out = u * m.asDiagonal() * u.transpose();
  return 0.5 * (out + out.transpose());
}

Eigen::MatrixXd apply_spectral_filter(const Eigen::MatrixXd& s,
                                      const ScalarFunction& h) {
  return apply_spectral_filter(sym_eig(s), h);
}

double FittedFilter::operator()(double t) const {
  if (identity) return t;
  if (ideal) return IdealReluFilter(*ideal)(t);
  if (mlp) return mlp_forward(*mlp, Eigen::MatrixXd::Constant(1, 1, t))(0, 0);
  return t;
}

FittedFilter fit_filter(const MatrixEigenSystem& es, const Eigen::MatrixXd& w,
                        const FitOptions& options) {
  const auto n = es.vectors.rows();
  if (w.rows() != n || w.cols() != n) throw ShapeError("S and W differ in shape");
  const Eigen::VectorXd diag =
      es.vectors.cwiseProduct(w * es.vectors).colwise().sum().transpose();
  const double w_sq = w.squaredNorm();
  FittedFilter fit;
  fit.method = options.method;
  double best = std::numeric_limits<double>::infinity();

  if (options.method == FitMethod::kGridIdeal) {
    if (options.grid_size < 1) throw ConfigError("fit budget must be positive");
    best = fit_objective(es.values, diag, w_sq);
    fit.identity = true;
    fit.trace.push_back({0, best, {}});
    const double top = es.values.cwiseAbs().maxCoeff();
    if (top > 0.0) {
      const auto centers = log_space(1e-3 * top, top, options.grid_size);
      const auto ratios = log_space(1e-2, 0.99, options.grid_size);
      int iteration = 0;
      for (double c : centers) {
        for (double r : ratios) {
          ++iteration;
          const IdealReluFilter h({c, r * c});
          Eigen::VectorXd mu = es.values.unaryExpr(h);
          const double obj = fit_objective(mu, diag, w_sq);
          if (obj < best) {
            best = obj;
            fit.identity = false;
            fit.ideal = h.params();
            fit.trace.push_back({iteration, obj, {c, r * c}});
          } else if (options.trace_every > 0 &&
                     iteration % options.trace_every == 0) {
            fit.trace.push_back({iteration, obj, {c, r * c}});
          }
        }
      }
    }
  } else {
    if (options.iterations < 1 || options.hidden < 1 || !(options.step > 0)) {
      throw ConfigError("fit budget must be positive");
    }
    Rng rng = make_rng(options.seed);
    MlpParams p = MlpParams::Glorot({1, options.hidden, 1}, rng);
    MlpParams best_params = p;
    const Eigen::MatrixXd lambdas = es.values;
    // Gradient of the objective averaged over eigenvalues, so the step size
    // does not scale with n.
    const double scale = 1.0 / static_cast<double>(std::max<Eigen::Index>(n, 1));
    for (int it = 0; it <= options.iterations; ++it) {
      const Eigen::VectorXd mu = mlp_forward(p, lambdas).col(0);
      const double obj = fit_objective(mu, diag, w_sq);
      if (!std::isfinite(obj)) break;
      const bool improved = obj < best;
      if (improved) {
        best = obj;
        best_params = p;
      }
      if (improved || (options.trace_every > 0 && it % options.trace_every == 0)) {
        fit.trace.push_back({it, obj, to_vector(flatten(p))});
      }
      if (it == options.iterations) break;
      const Eigen::MatrixXd upstream = (2.0 * scale) * (mu - diag);
      const MlpParams g = mlp_gradient(p, lambdas, upstream).params;
      unflatten(flatten(p) - options.step * flatten(g), p);
    }
    fit.mlp = best_params;
  }
  // Exact final error; the expanded objective loses digits near zero.
  fit.error = (apply_spectral_filter(es, [&](double t) { return fit(t); }) - w)
                  .norm();
  return fit;
}

FittedFilter fit_filter(const Eigen::MatrixXd& s, const Eigen::MatrixXd& w,
                        const FitOptions& options) {
  if (s.rows() != w.rows() || s.cols() != w.cols()) {
    throw ShapeError("S and W differ in shape");
  }
  return fit_filter(sym_eig(s), w, options);
}

void write_fit_trace(const FittedFilter& fit, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << std::setprecision(17) << "iteration,objective,parameters\n";
  for (const auto& row : fit.trace) {
    out << row.iteration << ',' << row.objective << ',';
    for (std::size_t i = 0; i < row.parameters.size(); ++i) {
      if (i) out << ';';
      out << row.parameters[i];
    }
    out << '\n';
  }
}

DavisKahanResult davis_kahan_check(const Eigen::MatrixXd& s,
                                   const Eigen::MatrixXd& s_tilde, int p) {
  if (s.rows() != s_tilde.rows() || s.cols() != s_tilde.cols()) {
    throw ShapeError("Davis-Kahan pair differs in shape");
  }
  const MatrixEigenSystem a = sym_eig(s);
  const MatrixEigenSystem b = sym_eig(s_tilde);
  if (p < 0 || p >= a.dim()) throw std::out_of_range("eigen index");
  DavisKahanResult r;
  r.gap = std::numeric_limits<double>::infinity();
  if (p > 0) r.gap = std::min(r.gap, a.values[p - 1] - a.values[p]);
  if (p + 1 < a.dim()) r.gap = std::min(r.gap, a.values[p] - a.values[p + 1]);
  if (!(r.gap > 1e-8)) {
    r.inconclusive = true;
    return r;
  }
  const Eigen::VectorXd u = a.vectors.col(p);
  const Eigen::VectorXd v = b.vectors.col(p);
  r.lhs = std::min((u - v).norm(), (u + v).norm());
  r.bound = operator_norm(s - s_tilde, std::numeric_limits<int>::max()) / r.gap;
  r.slack = r.bound - r.lhs;
  r.holds = r.slack >= 0.0;
  return r;
}

}  // namespace rgnn
