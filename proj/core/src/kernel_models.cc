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

#include "rgnn/kernel_models.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rgnn/errors.h"

namespace rgnn {

std::string_view to_string(ShiftKind kind) {
  return kind == ShiftKind::kAdjacency ? "adjacency" : "laplacian";
}

ShiftKind parse_shift_kind(std::string_view text) {
  if (text == "adjacency") return ShiftKind::kAdjacency;
  if (text == "laplacian") return ShiftKind::kLaplacian;
  throw ConfigError("unknown shift kind '" + std::string(text) +
                    "' (expected adjacency|laplacian)");
}

Quadrature gauss_legendre(int count, double lo, double hi) {
  if (count < 1) throw std::invalid_argument("quadrature needs >= 1 node");
  if (!(hi > lo)) throw std::invalid_argument("quadrature interval is empty");
  Quadrature q;
  q.nodes.resize(count);
  q.weights.resize(count);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  for (int i = 0; i < (count + 1) / 2; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= count; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = count * (t * p1 - p0) / (t * t - 1.0);
      const double step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-16) break;
    }
    // Legendre weight 2 / ((1 - t^2) P'(t)^2), halved for probability mass.
    const double w = 1.0 / ((1.0 - t * t) * dp * dp);
    q.nodes[i] = mid - half * t;
    q.nodes[count - 1 - i] = mid + half * t;
    q.weights[i] = w;
    q.weights[count - 1 - i] = w;
  }
  q.weights /= q.weights.sum();
  return q;
}

struct KernelModel::Impl {
  Variant variant = Variant::kSbm;
  Eigen::MatrixXd connectivity;
  Eigen::VectorXd proportions;
  Eigen::VectorXd community_degree;
  GaussianParams gaussian;
  Quadrature quadrature;
  Eigen::VectorXd node_degrees;

  mutable std::once_flag shift_once[2];
  mutable Eigen::MatrixXd node_shift[2];
};

KernelModel::KernelModel(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

KernelModel KernelModel::Sbm(Eigen::MatrixXd connectivity,
                             Eigen::VectorXd proportions) {
  const auto k = connectivity.rows();
  if (k == 0 || connectivity.cols() != k || proportions.size() != k) {
    throw std::invalid_argument("SBM needs a K x K matrix and a length-K P");
  }
  if (!connectivity.allFinite() || !proportions.allFinite()) {
    throw std::invalid_argument("SBM parameters must be finite");
  }
  if ((connectivity - connectivity.transpose()).cwiseAbs().maxCoeff() != 0.0) {
    throw std::invalid_argument("SBM connectivity must be symmetric");
  }
  if (connectivity.minCoeff() < 0.0 || connectivity.maxCoeff() > 1.0) {
    throw std::invalid_argument("SBM connectivity entries must be in [0, 1]");
  }
  if (proportions.minCoeff() < 0.0 ||
      std::abs(proportions.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument("SBM proportions must be a probability vector");
  }
  auto impl = std::make_shared<Impl>();
  impl->variant = Variant::kSbm;
  impl->community_degree = connectivity * proportions;
  impl->quadrature.nodes = Eigen::VectorXd::LinSpaced(k, 0.0, k - 1.0);
  impl->quadrature.weights = proportions;
  impl->connectivity = std::move(connectivity);
  impl->proportions = std::move(proportions);
  impl->node_degrees = impl->community_degree;
  return KernelModel(std::move(impl));
}

KernelModel KernelModel::Gaussian(const GaussianParams& params) {
  if (!(params.sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  if (!(params.hi > params.lo)) throw std::invalid_argument("empty interval");
  if (!(params.amplitude > 0.0 && params.amplitude <= 1.0)) {
    throw std::invalid_argument("kernel amplitude must be in (0, 1]");
  }
  auto impl = std::make_shared<Impl>();
  impl->variant = Variant::kContinuous;
  impl->gaussian = params;
  impl->quadrature =
      gauss_legendre(params.quadrature_nodes, params.lo, params.hi);
  KernelModel model(impl);
  const auto& q = impl->quadrature;
  impl->node_degrees.resize(q.size());
  for (int g = 0; g < q.size(); ++g) {
    impl->node_degrees[g] = model.degree(q.nodes[g]);
  }
  return model;
}

KernelModel::Variant KernelModel::variant() const { return impl_->variant; }

int KernelModel::communities() const {
  return is_sbm() ? static_cast<int>(impl_->connectivity.rows()) : 0;
}

const Eigen::MatrixXd& KernelModel::connectivity() const {
  return impl_->connectivity;
}
const Eigen::VectorXd& KernelModel::proportions() const {
  return impl_->proportions;
}
const GaussianParams& KernelModel::gaussian() const { return impl_->gaussian; }
const Quadrature& KernelModel::quadrature() const { return impl_->quadrature; }

void KernelModel::check_latent(double x) const {
  if (is_sbm()) {
    if (!(x >= 0.0 && x < communities()) || x != std::floor(x)) {
      std::ostringstream os;
      os << "latent " << x << " is not a community index in [0, "
         << communities() << ")";
      throw DomainError(os.str());
    }
  } else if (!(x >= impl_->gaussian.lo && x <= impl_->gaussian.hi)) {
    std::ostringstream os;
    os << "latent " << x << " outside [" << impl_->gaussian.lo << ", "
       << impl_->gaussian.hi << "]";
    throw DomainError(os.str());
  }
}

double KernelModel::kernel(double x, double y) const {
  check_latent(x);
  check_latent(y);
  if (is_sbm()) {
    return impl_->connectivity(static_cast<int>(x), static_cast<int>(y));
  }
  const auto& g = impl_->gaussian;
  const double d = x - y;
  return g.amplitude * std::exp(-d * d / (2.0 * g.sigma * g.sigma));
}

double KernelModel::max_kernel() const {
  return is_sbm() ? impl_->connectivity.maxCoeff() : impl_->gaussian.amplitude;
}

double KernelModel::degree(double x) const {
  check_latent(x);
  if (is_sbm()) return impl_->community_degree[static_cast<int>(x)];
  const auto& q = impl_->quadrature;
  double acc = 0.0;
  for (int g = 0; g < q.size(); ++g) acc += q.weights[g] * kernel(x, q.nodes[g]);
  return acc;
}

double KernelModel::min_degree() const {
  const auto& q = impl_->quadrature;
  double m = std::numeric_limits<double>::infinity();
  for (int g = 0; g < q.size(); ++g) {
    if (q.weights[g] > 0.0) m = std::min(m, degree(q.nodes[g]));
  }
  return m;
}

double KernelModel::shift_kernel(ShiftKind kind, double x, double y) const {
  const double w = kernel(x, y);
  if (kind == ShiftKind::kAdjacency) return w;
  const double dx = degree(x);
  const double dy = degree(y);
  if (!(dx > 0.0) || !(dy > 0.0)) {
    throw DegenerateModelError("zero degree under the normalized Laplacian");
  }
  return w / std::sqrt(dx * dy);
}

Eigen::MatrixXd KernelModel::shift_kernel_matrix(
    ShiftKind kind, std::span<const double> xs,
    std::span<const double> ys) const {
  const auto nx = static_cast<Eigen::Index>(xs.size());
  const auto ny = static_cast<Eigen::Index>(ys.size());
  Eigen::MatrixXd out(nx, ny);
  Eigen::VectorXd sx = Eigen::VectorXd::Ones(nx);
  Eigen::VectorXd sy = Eigen::VectorXd::Ones(ny);
  if (kind == ShiftKind::kLaplacian) {
    auto inv_sqrt_degree = [&](double x) {
      const double d = degree(x);
      if (!(d > 0.0)) {
        throw DegenerateModelError("zero degree under the normalized Laplacian");
      }
      return 1.0 / std::sqrt(d);
    };
    for (Eigen::Index i = 0; i < nx; ++i) sx[i] = inv_sqrt_degree(xs[i]);
    for (Eigen::Index j = 0; j < ny; ++j) sy[j] = inv_sqrt_degree(ys[j]);
  }
  for (Eigen::Index j = 0; j < ny; ++j) {
    for (Eigen::Index i = 0; i < nx; ++i) {
      out(i, j) = kernel(xs[i], ys[j]) * sx[i] * sy[j];
    }
  }
  return out;
}

const Eigen::VectorXd& KernelModel::node_degrees() const {
  return impl_->node_degrees;
}

Eigen::RowVectorXd KernelModel::shift_kernel_row(ShiftKind kind,
                                                 double x) const {
  const auto& q = impl_->quadrature;
  Eigen::RowVectorXd row(q.size());
  for (int g = 0; g < q.size(); ++g) row[g] = kernel(x, q.nodes[g]);
  if (kind == ShiftKind::kLaplacian) {
    const double dx = degree(x);
    if (!(dx > 0.0) || !(impl_->node_degrees.minCoeff() > 0.0)) {
      throw DegenerateModelError("zero degree under the normalized Laplacian");
    }
    row = row.cwiseQuotient(impl_->node_degrees.cwiseSqrt().transpose()) /
          std::sqrt(dx);
  }
  return row;
}

const Eigen::MatrixXd& KernelModel::node_shift_kernel(ShiftKind kind) const {
  const int slot = kind == ShiftKind::kAdjacency ? 0 : 1;
  std::call_once(impl_->shift_once[slot], [&] {
    const auto& nodes = impl_->quadrature.nodes;
    std::span<const double> xs(nodes.data(), nodes.size());
    impl_->node_shift[slot] = shift_kernel_matrix(kind, xs, xs);
  });
  return impl_->node_shift[slot];
}

void KernelModel::require_shift(ShiftKind kind) const {
  if (kind != ShiftKind::kLaplacian) return;
  const double dmin = min_degree();
  if (!(dmin >= kMinDegree)) {
    std::ostringstream os;
    os << "normalized Laplacian needs min degree >= " << kMinDegree
       << ", model has " << dmin;
    throw DegenerateModelError(os.str());
  }
}

double KernelModel::sample_latent(Rng& rng) const {
  if (is_sbm()) {
    const auto& p = impl_->proportions;
    std::discrete_distribution<int> pick(p.data(), p.data() + p.size());
    return pick(rng);
  }
  std::uniform_real_distribution<double> u(impl_->gaussian.lo,
                                           impl_->gaussian.hi);
  return u(rng);
}

KernelModel KernelModel::relabeled(std::span<const int> perm) const {
  if (!is_sbm()) throw std::logic_error("relabeling needs an SBM");
  const int k = communities();
  if (static_cast<int>(perm.size()) != k) {
    throw std::invalid_argument("permutation length must equal K");
  }
  std::vector<bool> seen(k, false);
  for (int p : perm) {
    if (p < 0 || p >= k || seen[p]) {
      throw std::invalid_argument("not a permutation of the communities");
    }
    seen[p] = true;
  }
  Eigen::MatrixXd c(k, k);
  Eigen::VectorXd pr(k);
  for (int a = 0; a < k; ++a) {
    pr[a] = impl_->proportions[perm[a]];
    for (int b = 0; b < k; ++b) c(a, b) = impl_->connectivity(perm[a], perm[b]);
  }
  return Sbm(std::move(c), std::move(pr));
}

nlohmann::json KernelModel::to_json() const {
  nlohmann::json j;
  if (is_sbm()) {
    j["kind"] = "sbm";
    const int k = communities();
    j["C"] = nlohmann::json::array();
    for (int a = 0; a < k; ++a) {
      std::vector<double> row(k);
      for (int b = 0; b < k; ++b) row[b] = impl_->connectivity(a, b);
      j["C"].push_back(row);
    }
    j["P"] = std::vector<double>(impl_->proportions.data(),
                                 impl_->proportions.data() + k);
  } else {
    const auto& g = impl_->gaussian;
    j["kind"] = "gaussian";
    j["sigma"] = g.sigma;
    j["interval"] = {g.lo, g.hi};
    j["amplitude"] = g.amplitude;
    j["quadrature_nodes"] = g.quadrature_nodes;
  }
  return j;
}

KernelModel two_block_fixture() {
  Eigen::MatrixXd c(2, 2);
  c << 0.5, 0.25, 0.25, 0.375;
  Eigen::VectorXd p(2);
  p << 1.0 / 3.0, 2.0 / 3.0;
  return KernelModel::Sbm(c, p);
}

KernelModel model_from_json(const nlohmann::json& spec) {
  try {
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "sbm") {
      const auto rows = spec.at("C").get<std::vector<std::vector<double>>>();
      const auto probs = spec.at("P").get<std::vector<double>>();
      const auto k = static_cast<Eigen::Index>(rows.size());
      Eigen::MatrixXd c(k, k);
      for (Eigen::Index a = 0; a < k; ++a) {
        if (static_cast<Eigen::Index>(rows[a].size()) != k) {
          throw ConfigError("model.C must be square");
        }
        for (Eigen::Index b = 0; b < k; ++b) c(a, b) = rows[a][b];
      }
      Eigen::VectorXd p =
          Eigen::Map<const Eigen::VectorXd>(probs.data(), probs.size());
      return KernelModel::Sbm(c, p);
    }
    if (kind == "gaussian") {
      GaussianParams g;
      g.sigma = spec.value("sigma", g.sigma);
      g.amplitude = spec.value("amplitude", g.amplitude);
      g.quadrature_nodes = spec.value("quadrature_nodes", g.quadrature_nodes);
      if (spec.contains("interval")) {
        const auto iv = spec.at("interval").get<std::vector<double>>();
        if (iv.size() != 2) throw ConfigError("model.interval needs [lo, hi]");
        g.lo = iv[0];
        g.hi = iv[1];
      }
      return KernelModel::Gaussian(g);
    }
    throw ConfigError("unknown model kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad model definition: ") + e.what());
  }
}

KernelModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse " + path + ": " + e.what());
  }
  return model_from_json(j.contains("model") ? j.at("model") : j);
}

}  // namespace rgnn
