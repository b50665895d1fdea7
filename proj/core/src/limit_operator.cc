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

#include "rgnn/limit_operator.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "rgnn/errors.h"

namespace rgnn {
namespace {

void check_compatible(const KernelModel& model, const LimitFunction& f) {
  const auto& nodes = model.quadrature().nodes;
  if (f.node_values().rows() != nodes.size()) {
    throw ShapeError("limit function lives on a different latent space");
  }
  const bool exact = f.representation() == LimitFunction::Representation::kExact;
  if (exact != model.is_sbm()) {
    throw ShapeError("exact (community) functions need an SBM model");
  }
}

}  // namespace

LimitFunction LimitFunction::FromNodeValues(const KernelModel& model,
                                            Eigen::MatrixXd values) {
  const auto& q = model.quadrature();
  if (values.rows() != q.size()) {
    throw ShapeError("node values need one row per quadrature node");
  }
  if (!values.allFinite()) throw std::invalid_argument("non-finite values");
  LimitFunction f;
  f.representation_ =
      model.is_sbm() ? Representation::kExact : Representation::kGrid;
  f.values_ = std::move(values);
  f.nodes_ = q.nodes;
  return f;
}

LimitFunction LimitFunction::FromClosure(const KernelModel& model, int dim,
                                         Pointwise fn) {
  const auto& q = model.quadrature();
  Eigen::MatrixXd values(q.size(), dim);
  for (int g = 0; g < q.size(); ++g) {
    Eigen::RowVectorXd v = fn(q.nodes[g]);
    if (v.size() != dim) throw ShapeError("closure output width != dim");
    values.row(g) = v;
  }
  LimitFunction f = FromNodeValues(model, std::move(values));
  if (!model.is_sbm()) {
    f.representation_ = Representation::kClosure;
    f.pointwise_ = std::move(fn);
  }
  return f;
}

LimitFunction LimitFunction::Constant(const KernelModel& model,
                                      const Eigen::RowVectorXd& value) {
  Eigen::MatrixXd values = value.replicate(model.quadrature().size(), 1);
  LimitFunction f = FromNodeValues(model, std::move(values));
  if (!model.is_sbm()) {
    f.representation_ = Representation::kClosure;
    f.pointwise_ = [value](double) { return value; };
  }
  return f;
}

Eigen::RowVectorXd LimitFunction::operator()(double x) const {
  switch (representation_) {
    case Representation::kExact: {
      const auto k = values_.rows();
      if (!(x >= 0.0 && x < static_cast<double>(k)) || x != std::floor(x)) {
        throw DomainError("latent is not a community index");
      }
      return values_.row(static_cast<Eigen::Index>(x));
    }
    case Representation::kClosure:
      return pointwise_(x);
    case Representation::kGrid: {
      const auto m = nodes_.size();
      if (m == 1 || x <= nodes_[0]) return values_.row(0);
      if (x >= nodes_[m - 1]) return values_.row(m - 1);
      const auto* it = std::upper_bound(nodes_.data(), nodes_.data() + m, x);
      const auto hi = static_cast<Eigen::Index>(it - nodes_.data());
      const auto lo = hi - 1;
      const double t = (x - nodes_[lo]) / (nodes_[hi] - nodes_[lo]);
      return (1.0 - t) * values_.row(lo) + t * values_.row(hi);
    }
  }
  return {};
}

Eigen::MatrixXd LimitFunction::sample(std::span<const double> latents) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(latents.size()), dim());
  for (std::size_t i = 0; i < latents.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = (*this)(latents[i]);
  }
  return out;
}

LimitFunction LimitFunction::column(int c) const {
  if (c < 0 || c >= dim()) throw std::out_of_range("column index");
  LimitFunction f;
  f.representation_ = representation_;
  f.values_ = values_.col(c);
  f.nodes_ = nodes_;
  if (pointwise_) {
    f.pointwise_ = [fn = pointwise_, c](double x) {
      return Eigen::RowVectorXd::Constant(1, fn(x)[c]);
    };
  }
  return f;
}

LimitFunction apply_limit_operator(const KernelModel& model, ShiftKind kind,
                                   const LimitFunction& f) {
  check_compatible(model, f);
  const auto& q = model.quadrature();
  // Integrand values weighted by the probability mass of each node.
  Eigen::MatrixXd weighted = q.weights.asDiagonal() * f.node_values();
  Eigen::MatrixXd values = model.node_shift_kernel(kind) * weighted;
  if (model.is_sbm()) return LimitFunction::FromNodeValues(model, values);
  return LimitFunction::FromClosure(
      model, f.dim(), [model, kind, weighted = std::move(weighted)](double x) {
        return Eigen::RowVectorXd(model.shift_kernel_row(kind, x) * weighted);
      });
}

double l2_norm(const LimitFunction& f, const KernelModel& model) {
  check_compatible(model, f);
  const auto& w = model.quadrature().weights;
  return std::sqrt(
      std::max(0.0, w.dot(f.node_values().rowwise().squaredNorm())));
}

namespace {

struct OrderedSpectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // Euclidean eigenvectors of the weighted kernel
};

// Limit ordering: nonzero eigenvalues descending, then the zeros.
OrderedSpectrum weighted_spectrum(const KernelModel& model, ShiftKind kind,
                                  bool with_vectors) {
  model.require_shift(kind);
  const auto& q = model.quadrature();
  const Eigen::VectorXd root = q.weights.cwiseSqrt();
  Eigen::MatrixXd m = root.asDiagonal() * model.node_shift_kernel(kind) *
                      root.asDiagonal();
  m = 0.5 * (m + m.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      m, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  std::vector<int> order(ev.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const bool za = std::abs(ev[a]) <= kZeroEigenvalue;
    const bool zb = std::abs(ev[b]) <= kZeroEigenvalue;
    if (za != zb) return zb;
    return ev[a] > ev[b];
  });
  OrderedSpectrum out;
  out.values.resize(ev.size());
  if (with_vectors) out.vectors.resize(ev.size(), ev.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    out.values[ii] = ev[order[i]];
    if (with_vectors) out.vectors.col(ii) = es.eigenvectors().col(order[i]);
  }
  return out;
}

}  // namespace

Eigen::VectorXd limit_spectrum(const KernelModel& model, ShiftKind kind) {
  return weighted_spectrum(model, kind, false).values;
}

LimitEigenSystem limit_eigenpairs(const KernelModel& model, ShiftKind kind,
                                  int q) {
  const auto& quad = model.quadrature();
  if (q < 1 || q > quad.size()) {
    std::ostringstream os;
    os << "requested " << q << " eigenpairs, rank bound is " << quad.size();
    throw std::invalid_argument(os.str());
  }
  const OrderedSpectrum spec = weighted_spectrum(model, kind, true);
  const Eigen::MatrixXd& kernel = model.node_shift_kernel(kind);
  const Eigen::VectorXd& w = quad.weights;

  LimitEigenSystem out;
  out.values = spec.values.head(q);
  for (int i = 0; i < q; ++i) {
    const double lambda = spec.values[i];
    const bool zero = std::abs(lambda) <= kZeroEigenvalue;
    if (zero && !out.truncated) {
      out.truncated = true;
      out.warnings.push_back("eigenpair " + std::to_string(i) +
                             " has a zero eigenvalue; spectrum truncated");
    }
    Eigen::VectorXd u(quad.size());
    for (int g = 0; g < quad.size(); ++g) {
      u[g] = w[g] > 0.0 ? spec.vectors(g, i) / std::sqrt(w[g]) : 0.0;
    }
    // Nodes without mass take the extension value.
    if (!zero) {
      for (int g = 0; g < quad.size(); ++g) {
        if (w[g] == 0.0) u[g] = kernel.row(g).dot(w.cwiseProduct(u)) / lambda;
      }
    }
    Eigen::Index arg = 0;
    u.cwiseAbs().maxCoeff(&arg);
    if (u[arg] < 0.0) u = -u;

    if (model.is_sbm() || zero) {
      out.functions.push_back(LimitFunction::FromNodeValues(model, u));
    } else {
      Eigen::VectorXd weighted = w.cwiseProduct(u) / lambda;
      LimitFunction f = LimitFunction::FromClosure(
          model, 1, [model, kind, weighted](double x) {
            return Eigen::RowVectorXd::Constant(
                1, model.shift_kernel_row(kind, x).dot(weighted));
          });
      out.functions.push_back(std::move(f));
    }
  }
  const int check = std::min<int>(q + 1, static_cast<int>(spec.values.size()));
  for (int i = 0; i + 1 < check; ++i) {
    if (std::abs(spec.values[i] - spec.values[i + 1]) < kTieTolerance) {
      out.has_ties = true;
      out.warnings.push_back("eigenvalues " + std::to_string(i) + " and " +
                             std::to_string(i + 1) + " are tied");
      break;
    }
  }
  return out;
}

Eigen::VectorXd s_delta_powers(const KernelModel& model, ShiftKind kind,
                               double x, double z, int q) {
  if (q < 1) throw std::invalid_argument("q must be >= 1");
  Eigen::VectorXd out(q);
  out[0] = model.shift_kernel(kind, z, x);
  if (q == 1) return out;
  const auto& w = model.quadrature().weights;
  const Eigen::MatrixXd& kernel = model.node_shift_kernel(kind);
  const Eigen::RowVectorXd z_row = model.shift_kernel_row(kind, z);
  // Node values of S^k delta_x.
  Eigen::VectorXd g = model.shift_kernel_row(kind, x).transpose();
  for (int k = 1; k < q; ++k) {
    const Eigen::VectorXd wg = w.cwiseProduct(g);
    out[k] = z_row.dot(wg);
    if (k + 1 < q) g = kernel * wg;
  }
  return out;
}

void write_eigensystem_csv(const LimitEigenSystem& es,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << std::setprecision(17);
  const auto m = es.functions.empty() ? 0 : es.functions[0].node_values().rows();
  out << "index,eigenvalue";
  for (Eigen::Index g = 0; g < m; ++g) out << ",node_" << g;
  out << '\n';
  for (int i = 0; i < es.count(); ++i) {
    out << i << ',' << es.values[i];
    const auto& v = es.functions[i].node_values();
    for (Eigen::Index g = 0; g < v.rows(); ++g) out << ',' << v(g, 0);
    out << '\n';
  }
}

}  // namespace rgnn
