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

#include "rgnn/positional_encodings.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "rgnn/errors.h"

namespace rgnn {

std::string_view to_string(PeFamily family) {
  switch (family) {
    case PeFamily::kSignNet:
      return "signnet";
    case PeFamily::kDistance:
      return "distance";
    case PeFamily::kSmoothing:
      return "smoothing";
  }
  return "unknown";
}

PeFamily parse_pe_family(std::string_view text) {
  if (text == "signnet") return PeFamily::kSignNet;
  if (text == "distance") return PeFamily::kDistance;
  if (text == "smoothing") return PeFamily::kSmoothing;
  throw ConfigError("unknown PE family: " + std::string(text));
}

void PeConfig::validate() const {
  if (q < 1) throw ConfigError("PE needs q >= 1");
  switch (family) {
    case PeFamily::kSignNet:
      if (static_cast<int>(branches.size()) != q) {
        throw ConfigError("SignNet needs one branch MLP per eigenvector");
      }
      for (const auto& b : branches) {
        b.validate();
        if (b.input_dim() != 1) throw ConfigError("SignNet branches take scalars");
      }
      break;
    case PeFamily::kDistance:
      mlp.validate();
      if (mlp.input_dim() != q) throw ConfigError("distance MLP input must be q");
      if (filter_params) filter_params->validate();
      break;
    case PeFamily::kSmoothing:
      break;
  }
}

ScalarFunction PeConfig::filter_function() const {
  if (filter) return filter;
  if (filter_params) {
    IdealReluFilter h(*filter_params);
    return [h](double t) { return h(t); };
  }
  return [](double t) { return t; };
}

PeResult signnet_pe(const Eigen::MatrixXd& s, const PeConfig& cfg) {
  return signnet_pe(sym_eig(s), cfg);
}

PeResult signnet_pe(const MatrixEigenSystem& es, const PeConfig& cfg) {
  if (cfg.family != PeFamily::kSignNet) throw ConfigError("not a SignNet config");
  cfg.validate();
  const int n = es.dim();
  if (cfg.q > n) throw ConfigError("q exceeds the graph size");
  PeResult out;
  out.eigenvalues = es.values.head(std::min(cfg.q + 1, n));
  for (Eigen::Index i = 0; i + 1 < out.eigenvalues.size(); ++i) {
    if (out.eigenvalues[i] - out.eigenvalues[i + 1] < kPeTieTolerance) {
      out.tie = true;
      out.warnings.push_back("eigenvalues " + std::to_string(i) + " and " +
                             std::to_string(i + 1) +
                             " coincide; eigenvector basis is ambiguous");
    }
  }
  const double scale = cfg.normalize ? std::sqrt(static_cast<double>(n)) : 1.0;
  std::vector<Eigen::MatrixXd> blocks;
  Eigen::Index width = 0;
  for (int i = 0; i < cfg.q; ++i) {
    blocks.push_back(signnet_symmetrize(cfg.branches[i], scale * es.vectors.col(i)));
    width += blocks.back().cols();
  }
  out.values.resize(n, width);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.values.middleCols(at, b.cols()) = b;
    at += b.cols();
  }
  return out;
}

PeResult distance_pe(const Eigen::MatrixXd& s, const PeConfig& cfg) {
  return distance_pe(sym_eig(s), cfg);
}

PeResult distance_pe(const MatrixEigenSystem& es, const PeConfig& cfg) {
  if (cfg.family != PeFamily::kDistance) throw ConfigError("not a distance config");
  cfg.validate();
  const int n = es.dim();
  PeResult out;
  const ScalarFunction h = cfg.filter_function();

  // S_h^k = U_r diag(h_r^k) U_r^T over the eigenpairs with h != 0.
  std::vector<int> keep;
  Eigen::VectorXd filtered(n);
  for (int i = 0; i < n; ++i) {
    filtered[i] = h(es.values[i]);
    if (filtered[i] != 0.0) keep.push_back(i);
  }
  const auto r = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXd u(n, r);
  Eigen::VectorXd mu(r);
  for (Eigen::Index j = 0; j < r; ++j) {
    u.col(j) = es.vectors.col(keep[j]);
    mu[j] = filtered[keep[j]];
  }
  const double norm = r ? mu.cwiseAbs().maxCoeff() : 0.0;
  if (std::pow(norm, cfg.q) > kPowerConditioningBound) {
    std::ostringstream os;
    os << "||S_h||^q = " << std::pow(norm, cfg.q)
       << " exceeds the conditioning bound";
    out.warnings.push_back(os.str());
  }
  const double scale = cfg.normalize ? static_cast<double>(n) : 1.0;
  Eigen::MatrixXd powers(r, cfg.q);
  Eigen::VectorXd m = mu;
  for (int k = 0; k < cfg.q; ++k) {
    powers.col(k) = m;
    m = m.cwiseProduct(mu);
  }
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, cfg.mlp.output_dim());
  for (int j = 0; j < n; ++j) {
    // Column k of the stack is S_h^{k+1} e_j.
    const Eigen::MatrixXd coeff =
        powers.array().colwise() * u.row(j).transpose().array();
    const Eigen::MatrixXd stack = scale * (u * coeff);
    sum += mlp_forward(cfg.mlp, stack);
  }
  out.values = sum / static_cast<double>(n);
  return out;
}

Eigen::MatrixXd smoothing_pe(const Eigen::MatrixXd& s, const Eigen::MatrixXd& z) {
  if (s.rows() != s.cols() || s.cols() != z.rows()) {
    throw ShapeError("smoothing PE: S must be n x n with n = rows of Z");
  }
  return s * z;
}

LimitFunction limit_signnet_pe(const KernelModel& model, ShiftKind kind,
                               const PeConfig& cfg) {
  if (cfg.family != PeFamily::kSignNet) throw ConfigError("not a SignNet config");
  cfg.validate();
  if (!cfg.normalize) {
    throw ConfigError("SignNet limit exists only for normalized eigenvectors");
  }
  const LimitEigenSystem es = limit_eigenpairs(model, kind, cfg.q);
  int width = 0;
  for (const auto& b : cfg.branches) width += b.output_dim();
  auto eval = [es, branches = cfg.branches, width](double x) {
    Eigen::RowVectorXd out(width);
    Eigen::Index at = 0;
    for (std::size_t i = 0; i < branches.size(); ++i) {
      const double u = es.functions[i](x)[0];
      const Eigen::RowVectorXd v =
          signnet_symmetrize(branches[i], Eigen::VectorXd::Constant(1, u));
      out.segment(at, v.size()) = v;
      at += v.size();
    }
    return out;
  };
  if (model.is_sbm()) {
    const auto& nodes = model.quadrature().nodes;
    Eigen::MatrixXd values(nodes.size(), width);
    for (Eigen::Index g = 0; g < nodes.size(); ++g) values.row(g) = eval(nodes[g]);
    return LimitFunction::FromNodeValues(model, values);
  }
  return LimitFunction::FromClosure(model, width, eval);
}

LimitFunction limit_distance_pe(const KernelModel& model, ShiftKind kind,
                                const PeConfig& cfg) {
  if (cfg.family != PeFamily::kDistance) throw ConfigError("not a distance config");
  cfg.validate();
  model.require_shift(kind);
  const auto& quad = model.quadrature();
  const Eigen::VectorXd& w = quad.weights;
  const int q = cfg.q;
  const MlpParams mlp = cfg.mlp;

  // powers(z) is m x q with entry (g, k) = S_h^{k+1} delta_{x_g}(z).
  std::function<Eigen::MatrixXd(double)> powers;
  if (!cfg.has_filter()) {
    const Eigen::MatrixXd& kernel = model.node_shift_kernel(kind);
    powers = [model, kind, kernel, w, q](double z) {
      Eigen::MatrixXd p(w.size(), q);
      p.col(0) = model.shift_kernel_row(kind, z).transpose();
      for (int k = 1; k < q; ++k) p.col(k) = kernel * w.cwiseProduct(p.col(k - 1));
      return p;
    };
  } else {
    const ScalarFunction h = cfg.filter_function();
    const Eigen::VectorXd spectrum = limit_spectrum(model, kind);
    int r = 0;
    for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
      if (h(spectrum[i]) != 0.0) r = static_cast<int>(i) + 1;
    }
    if (r == 0) {
      powers = [w, q](double) { return Eigen::MatrixXd::Zero(w.size(), q).eval(); };
    } else {
      const LimitEigenSystem es = limit_eigenpairs(model, kind, r);
      Eigen::MatrixXd u_nodes(w.size(), r);
      Eigen::MatrixXd coeff(r, q);
      for (int i = 0; i < r; ++i) {
        u_nodes.col(i) = es.functions[i].node_values().col(0);
        const double hi = h(es.values[i]);
        double m = hi;
        for (int k = 0; k < q; ++k) {
          coeff(i, k) = m;
          m *= hi;
        }
      }
      powers = [es, u_nodes, coeff, r](double z) {
        Eigen::VectorXd uz(r);
        for (int i = 0; i < r; ++i) uz[i] = es.functions[i](z)[0];
        return Eigen::MatrixXd(u_nodes * (coeff.array().colwise() * uz.array()).matrix());
      };
    }
  }
  auto eval = [powers, mlp, w](double z) {
    const Eigen::MatrixXd out = mlp_forward(mlp, powers(z));
    return Eigen::RowVectorXd(w.transpose() * out);
  };
  if (model.is_sbm()) {
    const auto& nodes = quad.nodes;
    Eigen::MatrixXd values(nodes.size(), mlp.output_dim());
    for (Eigen::Index g = 0; g < nodes.size(); ++g) values.row(g) = eval(nodes[g]);
    return LimitFunction::FromNodeValues(model, values);
  }
  return LimitFunction::FromClosure(model, mlp.output_dim(), eval);
}

void write_pe_csv(const Eigen::MatrixXd& pe, const PeConfig& cfg,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# family=" << to_string(cfg.family) << " q=" << cfg.q
      << " normalize=" << (cfg.normalize ? 1 : 0) << '\n';
  for (Eigen::Index c = 0; c < pe.cols(); ++c) out << (c ? "," : "") << "pe_" << c;
  out << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < pe.rows(); ++i) {
    for (Eigen::Index c = 0; c < pe.cols(); ++c) out << (c ? "," : "") << pe(i, c);
    out << '\n';
  }
}

}  // namespace rgnn
