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

#include "rgnn/neural.h"

#include <cmath>
#include <istream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "rgnn/errors.h"

namespace rgnn {
namespace {

Eigen::MatrixXd relu(const Eigen::MatrixXd& m) { return m.cwiseMax(0.0); }

// Mask of the ReLU derivative, with relu'(0) = 0.
Eigen::MatrixXd relu_mask(const Eigen::MatrixXd& pre) {
  return (pre.array() > 0.0).cast<double>().matrix();
}

Eigen::MatrixXd glorot(int rows, int cols, Rng& rng) {
  const double a = std::sqrt(6.0 / (rows + cols));
  std::uniform_real_distribution<double> dist(-a, a);
  Eigen::MatrixXd m(rows, cols);
  // Filled row by row so the draw order does not depend on storage order.
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
  }
  return m;
}

void check_widths(const std::vector<int>& widths, std::size_t min_size) {
  if (widths.size() < min_size) throw ShapeError("too few layer widths");
  for (int w : widths) {
    if (w < 1) throw ShapeError("layer widths must be positive");
  }
}

void check_input(const Eigen::MatrixXd& x, int width, const char* what) {
  if (x.cols() != width) {
    std::ostringstream os;
    os << what << ": input has " << x.cols() << " columns, expected " << width;
    throw ShapeError(os.str());
  }
}

template <typename Visit>
void visit_mlp(MlpParams& p, Visit&& visit) {
  for (int l = 0; l < p.layers(); ++l) {
    visit(p.weights[l].data(), p.weights[l].size());
    visit(p.biases[l].data(), p.biases[l].size());
  }
}

template <typename Visit>
void visit_gnn(GnnParams& p, Visit&& visit) {
  for (auto& layer : p.layers) {
    visit(layer.self_weight.data(), layer.self_weight.size());
    visit(layer.neighbor_weight.data(), layer.neighbor_weight.size());
    visit(layer.bias.data(), layer.bias.size());
  }
  visit(p.readout.data(), p.readout.size());
  visit(p.readout_bias.data(), p.readout_bias.size());
}

template <typename Params, typename Visitor>
Eigen::VectorXd flatten_with(const Params& p, Visitor visitor) {
  Params copy = p;
  Eigen::Index total = 0;
  visitor(copy, [&](double*, Eigen::Index size) { total += size; });
  Eigen::VectorXd flat(total);
  Eigen::Index at = 0;
  visitor(copy, [&](double* data, Eigen::Index size) {
    flat.segment(at, size) = Eigen::Map<Eigen::VectorXd>(data, size);
    at += size;
  });
  return flat;
}

template <typename Params, typename Visitor>
void unflatten_with(const Eigen::VectorXd& flat, Params& p, Visitor visitor) {
  Eigen::Index total = 0;
  visitor(p, [&](double*, Eigen::Index size) { total += size; });
  if (total != flat.size()) throw ShapeError("flat parameter size mismatch");
  Eigen::Index at = 0;
  visitor(p, [&](double* data, Eigen::Index size) {
    Eigen::Map<Eigen::VectorXd>(data, size) = flat.segment(at, size);
    at += size;
  });
}

void write_tensor(std::ostream& out, const std::string& name,
                  const Eigen::MatrixXd& m) {
  out << "# " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << std::setprecision(17) << m(i, j);
    }
    out << '\n';
  }
}

template <typename Derived>
void read_tensor(std::istream& in, Eigen::MatrixBase<Derived>& m) {
  std::string line;
  while (std::getline(in, line) && line.empty()) {
  }
  std::istringstream header(line);
  std::string hash, name;
  Eigen::Index rows = 0, cols = 0;
  if (!(header >> hash >> name >> rows >> cols) || hash != "#") {
    throw std::runtime_error("malformed tensor header: " + line);
  }
  if (rows != m.rows() || cols != m.cols()) {
    throw ShapeError("tensor " + name + " has the wrong shape");
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("truncated tensor");
    std::istringstream row(line);
    for (Eigen::Index j = 0; j < cols; ++j) {
      std::string cell;
      std::getline(row, cell, ',');
      m(i, j) = std::stod(cell);
    }
  }
}

}  // namespace

MlpParams MlpParams::Glorot(const std::vector<int>& widths, Rng& rng) {
  check_widths(widths, 2);
  MlpParams p;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    p.weights.push_back(glorot(widths[l], widths[l + 1], rng));
    p.biases.push_back(Eigen::RowVectorXd::Zero(widths[l + 1]));
  }
  return p;
}

MlpParams MlpParams::Zeros(const std::vector<int>& widths) {
  check_widths(widths, 2);
  MlpParams p;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    p.weights.push_back(Eigen::MatrixXd::Zero(widths[l], widths[l + 1]));
    p.biases.push_back(Eigen::RowVectorXd::Zero(widths[l + 1]));
  }
  return p;
}

int MlpParams::input_dim() const {
  return weights.empty() ? 0 : static_cast<int>(weights.front().rows());
}

int MlpParams::output_dim() const {
  return weights.empty() ? 0 : static_cast<int>(weights.back().cols());
}

std::vector<int> MlpParams::widths() const {
  std::vector<int> w;
  if (weights.empty()) return w;
  w.push_back(input_dim());
  for (const auto& m : weights) w.push_back(static_cast<int>(m.cols()));
  return w;
}

void MlpParams::validate() const {
  if (weights.empty()) throw ShapeError("MLP has no layers");
  if (weights.size() != biases.size()) throw ShapeError("bias count mismatch");
  for (int l = 0; l < layers(); ++l) {
    if (biases[l].size() != weights[l].cols()) {
      throw ShapeError("bias width mismatch at layer " + std::to_string(l));
    }
    if (l > 0 && weights[l].rows() != weights[l - 1].cols()) {
      throw ShapeError("weight chain broken at layer " + std::to_string(l));
    }
    if (!weights[l].allFinite() || !biases[l].allFinite()) {
      throw std::invalid_argument("non-finite MLP parameters");
    }
  }
}

Eigen::MatrixXd mlp_forward(const MlpParams& p, const Eigen::MatrixXd& x) {
  p.validate();
  check_input(x, p.input_dim(), "mlp_forward");
  Eigen::MatrixXd h = x;
  for (int l = 0; l < p.layers(); ++l) {
    Eigen::MatrixXd pre = h * p.weights[l];
    pre.rowwise() += p.biases[l];
    h = l + 1 < p.layers() ? relu(pre) : std::move(pre);
  }
  return h;
}

MlpGradient mlp_gradient(const MlpParams& p, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& upstream) {
  p.validate();
  check_input(x, p.input_dim(), "mlp_gradient");
  if (upstream.rows() != x.rows() || upstream.cols() != p.output_dim()) {
    throw ShapeError("mlp_gradient: upstream shape mismatch");
  }
  const int layers = p.layers();
  std::vector<Eigen::MatrixXd> inputs(layers), pres(layers);
  Eigen::MatrixXd h = x;
  for (int l = 0; l < layers; ++l) {
    inputs[l] = h;
    pres[l] = h * p.weights[l];
    pres[l].rowwise() += p.biases[l];
    if (l + 1 < layers) h = relu(pres[l]);
  }
  MlpGradient g{MlpParams::Zeros(p.widths()), {}};
  Eigen::MatrixXd delta = upstream;
  for (int l = layers - 1; l >= 0; --l) {
    if (l + 1 < layers) delta = delta.cwiseProduct(relu_mask(pres[l]));
    g.params.weights[l] = inputs[l].transpose() * delta;
    g.params.biases[l] = delta.colwise().sum();
    delta = delta * p.weights[l].transpose();
  }
  g.input = std::move(delta);
  return g;
}

GnnParams GnnParams::Glorot(const std::vector<int>& widths, Rng& rng) {
  check_widths(widths, 2);
  GnnParams p;
  for (std::size_t l = 0; l + 2 < widths.size(); ++l) {
    GnnLayer layer;
    layer.self_weight = glorot(widths[l], widths[l + 1], rng);
    layer.neighbor_weight = glorot(widths[l], widths[l + 1], rng);
    layer.bias = Eigen::RowVectorXd::Zero(widths[l + 1]);
    p.layers.push_back(std::move(layer));
  }
  const auto k = widths.size();
  p.readout = glorot(widths[k - 2], widths[k - 1], rng);
  p.readout_bias = Eigen::RowVectorXd::Zero(widths[k - 1]);
  return p;
}

GnnParams GnnParams::Zeros(const std::vector<int>& widths) {
  check_widths(widths, 2);
  GnnParams p;
  for (std::size_t l = 0; l + 2 < widths.size(); ++l) {
    p.layers.push_back({Eigen::MatrixXd::Zero(widths[l], widths[l + 1]),
                        Eigen::MatrixXd::Zero(widths[l], widths[l + 1]),
                        Eigen::RowVectorXd::Zero(widths[l + 1])});
  }
  const auto k = widths.size();
  p.readout = Eigen::MatrixXd::Zero(widths[k - 2], widths[k - 1]);
  p.readout_bias = Eigen::RowVectorXd::Zero(widths[k - 1]);
  return p;
}

int GnnParams::input_dim() const {
  return static_cast<int>(layers.empty() ? readout.rows()
                                         : layers.front().self_weight.rows());
}

int GnnParams::output_dim() const { return static_cast<int>(readout.cols()); }

std::vector<int> GnnParams::widths() const {
  std::vector<int> w{input_dim()};
  for (const auto& layer : layers) {
    w.push_back(static_cast<int>(layer.self_weight.cols()));
  }
  w.push_back(output_dim());
  return w;
}

void GnnParams::validate() const {
  Eigen::Index width = input_dim();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    const auto out = layer.self_weight.cols();
    if (layer.self_weight.rows() != width ||
        layer.neighbor_weight.rows() != width ||
        layer.neighbor_weight.cols() != out || layer.bias.size() != out) {
      throw ShapeError("GNN layer " + std::to_string(l) + " shape mismatch");
    }
    if (!layer.self_weight.allFinite() || !layer.neighbor_weight.allFinite() ||
        !layer.bias.allFinite()) {
      throw std::invalid_argument("non-finite GNN parameters");
    }
    width = out;
  }
  if (readout.rows() != width || readout_bias.size() != readout.cols()) {
    throw ShapeError("GNN readout shape mismatch");
  }
  if (!readout.allFinite() || !readout_bias.allFinite()) {
    throw std::invalid_argument("non-finite GNN parameters");
  }
}

namespace {

void check_mpnn_shapes(const Eigen::MatrixXd& s, const Eigen::MatrixXd& z0,
                       const GnnParams& theta) {
  theta.validate();
  if (s.rows() != s.cols() || s.rows() != z0.rows()) {
    throw ShapeError("mpnn: S must be n x n with n = rows of Z0");
  }
  check_input(z0, theta.input_dim(), "mpnn");
}

}  // namespace

Eigen::MatrixXd mpnn_forward(const Eigen::MatrixXd& s, const Eigen::MatrixXd& z0,
                             const GnnParams& theta) {
  check_mpnn_shapes(s, z0, theta);
  Eigen::MatrixXd z = z0;
  for (const auto& layer : theta.layers) {
    Eigen::MatrixXd pre = z * layer.self_weight + s * (z * layer.neighbor_weight);
    pre.rowwise() += layer.bias;
    z = relu(pre);
  }
  Eigen::MatrixXd out = z * theta.readout;
  out.rowwise() += theta.readout_bias;
  return out;
}

GnnGradient mpnn_gradient(const Eigen::MatrixXd& s, const Eigen::MatrixXd& z0,
                          const GnnParams& theta,
                          const Eigen::MatrixXd& upstream) {
  check_mpnn_shapes(s, z0, theta);
  if (upstream.rows() != z0.rows() || upstream.cols() != theta.output_dim()) {
    throw ShapeError("mpnn_gradient: upstream shape mismatch");
  }
  const std::size_t layers = theta.layers.size();
  std::vector<Eigen::MatrixXd> inputs(layers), masks(layers);
  Eigen::MatrixXd z = z0;
  for (std::size_t l = 0; l < layers; ++l) {
    const auto& layer = theta.layers[l];
    inputs[l] = z;
    Eigen::MatrixXd pre = z * layer.self_weight + s * (z * layer.neighbor_weight);
    pre.rowwise() += layer.bias;
    masks[l] = relu_mask(pre);
    z = relu(pre);
  }
  GnnGradient g{GnnParams::Zeros(theta.widths()), {}};
  g.params.readout = z.transpose() * upstream;
  g.params.readout_bias = upstream.colwise().sum();
  Eigen::MatrixXd delta = upstream * theta.readout.transpose();
  const Eigen::MatrixXd st = s.transpose();
  for (std::size_t l = layers; l-- > 0;) {
    const auto& layer = theta.layers[l];
    auto& grad = g.params.layers[l];
    delta = delta.cwiseProduct(masks[l]);
    const Eigen::MatrixXd st_delta = st * delta;
    grad.self_weight = inputs[l].transpose() * delta;
    grad.neighbor_weight = inputs[l].transpose() * st_delta;
    grad.bias = delta.colwise().sum();
    delta = delta * layer.self_weight.transpose() +
            st_delta * layer.neighbor_weight.transpose();
  }
  g.input = std::move(delta);
  return g;
}

LimitFunction cgnn_eval(const KernelModel& model, ShiftKind kind,
                        const LimitFunction& f0, const GnnParams& theta) {
  theta.validate();
  if (f0.dim() != theta.input_dim()) {
    throw ShapeError("cgnn_eval: f0 dimension does not match theta");
  }
  if (f0.node_values().rows() != model.quadrature().size() ||
      (f0.representation() == LimitFunction::Representation::kExact) !=
          model.is_sbm()) {
    throw ShapeError("cgnn_eval: f0 representation does not match the model");
  }
  model.require_shift(kind);
  const Eigen::VectorXd& w = model.quadrature().weights;
  const Eigen::MatrixXd& kernel = model.node_shift_kernel(kind);

  // Probability-weighted node values of each layer input, which is all the
  // operator term needs.
  std::vector<Eigen::MatrixXd> weighted;
  Eigen::MatrixXd f = f0.node_values();
  for (const auto& layer : theta.layers) {
    weighted.push_back(w.asDiagonal() * f);
    Eigen::MatrixXd pre = f * layer.self_weight +
                          (kernel * weighted.back()) * layer.neighbor_weight;
    pre.rowwise() += layer.bias;
    f = relu(pre);
  }
  Eigen::MatrixXd out = f * theta.readout;
  out.rowwise() += theta.readout_bias;
  if (model.is_sbm()) return LimitFunction::FromNodeValues(model, out);

  auto eval = [model, kind, f0, theta, weighted](double x) {
    Eigen::RowVectorXd v = f0(x);
    for (std::size_t l = 0; l < theta.layers.size(); ++l) {
      const auto& layer = theta.layers[l];
      Eigen::RowVectorXd pre =
          v * layer.self_weight +
          (model.shift_kernel_row(kind, x) * weighted[l]) * layer.neighbor_weight +
          layer.bias;
      v = pre.cwiseMax(0.0);
    }
    return Eigen::RowVectorXd(v * theta.readout + theta.readout_bias);
  };
  return LimitFunction::FromClosure(model, theta.output_dim(), std::move(eval));
}

Eigen::MatrixXd signnet_symmetrize(const MlpParams& p,
                                   const Eigen::VectorXd& u) {
  if (p.input_dim() != 1) throw ShapeError("SignNet branch needs input width 1");
  const Eigen::MatrixXd plus = mlp_forward(p, u);
  const Eigen::MatrixXd minus = mlp_forward(p, -u);
  return plus + minus;
}

MlpParams signnet_gradient(const MlpParams& p, const Eigen::VectorXd& u,
                           const Eigen::MatrixXd& upstream) {
  if (p.input_dim() != 1) throw ShapeError("SignNet branch needs input width 1");
  MlpParams g = mlp_gradient(p, u, upstream).params;
  const MlpParams minus = mlp_gradient(p, -u, upstream).params;
  for (int l = 0; l < g.layers(); ++l) {
    g.weights[l] += minus.weights[l];
    g.biases[l] += minus.biases[l];
  }
  return g;
}

Eigen::RowVectorXd deepset_aggregate(const MlpParams& p,
                                     const Eigen::MatrixXd& rows) {
  if (rows.rows() == 0) throw ShapeError("deep set over an empty set");
  return mlp_forward(p, rows).colwise().mean();
}

MlpParams clamp_mlp(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw std::invalid_argument("clamp bound must be positive");
  }
  MlpParams p = MlpParams::Zeros({1, 2, 1});
  p.weights[0] << 1.0, 1.0;
  p.biases[0] << k, -k;
  p.weights[1] << 1.0, -1.0;
  p.biases[1] << -k;
  return p;
}

Eigen::VectorXd flatten(const MlpParams& p) {
  return flatten_with(p, [](MlpParams& q, auto&& v) { visit_mlp(q, v); });
}

void unflatten(const Eigen::VectorXd& flat, MlpParams& p) {
  unflatten_with(flat, p, [](MlpParams& q, auto&& v) { visit_mlp(q, v); });
}

Eigen::VectorXd flatten(const GnnParams& p) {
  return flatten_with(p, [](GnnParams& q, auto&& v) { visit_gnn(q, v); });
}

void unflatten(const Eigen::VectorXd& flat, GnnParams& p) {
  unflatten_with(flat, p, [](GnnParams& q, auto&& v) { visit_gnn(q, v); });
}

void write_tensors(std::ostream& out, const std::string& prefix,
                   const MlpParams& p) {
  for (int l = 0; l < p.layers(); ++l) {
    const std::string tag = prefix + ".layer" + std::to_string(l);
    write_tensor(out, tag + ".weight", p.weights[l]);
    write_tensor(out, tag + ".bias", p.biases[l]);
  }
}

void write_tensors(std::ostream& out, const std::string& prefix,
                   const GnnParams& p) {
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const std::string tag = prefix + ".layer" + std::to_string(l);
    write_tensor(out, tag + ".theta0", p.layers[l].self_weight);
    write_tensor(out, tag + ".theta1", p.layers[l].neighbor_weight);
    write_tensor(out, tag + ".bias", p.layers[l].bias);
  }
  write_tensor(out, prefix + ".readout.weight", p.readout);
  write_tensor(out, prefix + ".readout.bias", p.readout_bias);
}

void read_tensors(std::istream& in, MlpParams& p) {
  for (int l = 0; l < p.layers(); ++l) {
    read_tensor(in, p.weights[l]);
    read_tensor(in, p.biases[l]);
  }
}

void read_tensors(std::istream& in, GnnParams& p) {
  for (auto& layer : p.layers) {
    read_tensor(in, layer.self_weight);
    read_tensor(in, layer.neighbor_weight);
    read_tensor(in, layer.bias);
  }
  read_tensor(in, p.readout);
  read_tensor(in, p.readout_bias);
}

}  // namespace rgnn
