// Copyright 2026 The eventinr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "eventinr/siren.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <string>

#include "eventinr/error.hpp"

namespace eventinr {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// ParameterSet

ParameterSet ParameterSet::zeros_like(const ParameterSet& other) {
  ParameterSet out;
  for (const auto& w : other.weights) out.weights.push_back(MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : other.biases) out.biases.push_back(VectorXd::Zero(b.size()));
  return out;
}

std::size_t ParameterSet::count() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
  for (const auto& b : biases) n += static_cast<std::size_t>(b.size());
  return n;
}

bool ParameterSet::same_shape(const ParameterSet& other) const {
  if (weights.size() != other.weights.size() || biases.size() != other.biases.size()) return false;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != other.weights[l].rows() || weights[l].cols() != other.weights[l].cols())
      return false;
  }
  for (std::size_t l = 0; l < biases.size(); ++l) {
    if (biases[l].size() != other.biases[l].size()) return false;
  }
  return true;
}

bool ParameterSet::all_finite() const {
  for (const auto& w : weights) {
    if (!w.allFinite()) return false;
  }
  for (const auto& b : biases) {
    if (!b.allFinite()) return false;
  }
  return true;
}

std::vector<double> ParameterSet::flatten() const {
  std::vector<double> out;
  out.reserve(count());
  for (std::size_t l = 0; l < weights.size(); ++l) {
    out.insert(out.end(), weights[l].data(), weights[l].data() + weights[l].size());
    out.insert(out.end(), biases[l].data(), biases[l].data() + biases[l].size());
  }
  return out;
}

void ParameterSet::assign_flat(std::span<const double> values) {
  if (values.size() != count()) throw Error(ErrorKind::kShapeMismatch, "flat parameter size");
  std::size_t pos = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    std::memcpy(weights[l].data(), values.data() + pos, sizeof(double) * weights[l].size());
    pos += static_cast<std::size_t>(weights[l].size());
    std::memcpy(biases[l].data(), values.data() + pos, sizeof(double) * biases[l].size());
    pos += static_cast<std::size_t>(biases[l].size());
  }
}

// ---------------------------------------------------------------------------
// SirenModel

SirenModel::SirenModel(std::vector<int> layer_sizes, double omega0, std::uint64_t seed,
                       int height, int width, TimeDomain domain)
    : layer_sizes_(std::move(layer_sizes)),
      omega0_(omega0),
      height_(height),
      width_(width),
      domain_(domain) {
  if (layer_sizes_.size() < 3) {
    throw Error(ErrorKind::kInvalidArchitecture, "need input, at least one hidden, and output layer");
  }
  if (layer_sizes_.front() != 1) throw Error(ErrorKind::kInvalidArchitecture, "input size must be 1");
  for (int n : layer_sizes_) {
    if (n < 1) throw Error(ErrorKind::kInvalidArchitecture, "layer sizes must be positive");
  }
  if (height < 1 || width < 1 ||
      static_cast<std::size_t>(layer_sizes_.back()) != static_cast<std::size_t>(height) * width) {
    throw Error(ErrorKind::kInvalidArchitecture, "output size must equal height * width");
  }
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) {
    throw Error(ErrorKind::kInvalidArchitecture, "omega0 must be positive");
  }
  if (!(domain.hi > domain.lo)) throw Error(ErrorKind::kInvalidArgument, "empty time domain");

  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double bound) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return (2.0 * u - 1.0) * bound;
  };
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    const int n_in = layer_sizes_[l];
    const int n_out = layer_sizes_[l + 1];
    const double bound =
        l == 0 ? 1.0 / n_in : std::sqrt(6.0 / static_cast<double>(n_in)) / omega0_;
    MatrixXd w(n_out, n_in);
    for (Index j = 0; j < w.cols(); ++j) {
      for (Index i = 0; i < w.rows(); ++i) w(i, j) = uniform(bound);
    }
    params_.weights.push_back(std::move(w));
    // Biases follow the reference SIREN code (framework default), which
    // gives the zero-bias odd features an even counterpart from the start.
    VectorXd b(n_out);
    const double bias_bound = 1.0 / std::sqrt(static_cast<double>(n_in));
    for (Index i = 0; i < b.size(); ++i) b[i] = uniform(bias_bound);
    params_.biases.push_back(std::move(b));
  }
}

SirenModel SirenModel::for_frames(int height, int width, int hidden_layers, int hidden_width,
                                  double omega0, std::uint64_t seed, TimeDomain domain) {
  if (hidden_layers < 1 || hidden_width < 1) {
    throw Error(ErrorKind::kInvalidArchitecture, "need at least one hidden layer");
  }
  std::vector<int> sizes{1};
  sizes.insert(sizes.end(), static_cast<std::size_t>(hidden_layers), hidden_width);
  sizes.push_back(height * width);
  return SirenModel(std::move(sizes), omega0, seed, height, width, domain);
}

ForwardPass SirenModel::forward_batch(std::span<const double> t_norm) const {
  const auto B = static_cast<Index>(t_norm.size());
  const std::size_t L = params_.weights.size();
  ForwardPass pass;
  pass.batch = t_norm.size();
  pass.inputs.resize(L);
  pass.preacts.resize(L - 1);

  // Input column block: values t, tangents dt/dt = 1.
  MatrixXd x(1, 2 * B);
  for (Index b = 0; b < B; ++b) x(0, b) = t_norm[static_cast<std::size_t>(b)];
  x.rightCols(B).setOnes();

  for (std::size_t l = 0; l + 1 < L; ++l) {
    const MatrixXd& w = params_.weights[l];
    MatrixXd z(w.rows(), 2 * B);
    z.noalias() = w * x;
    z.leftCols(B).colwise() += params_.biases[l];
    z *= omega0_;
    MatrixXd h(w.rows(), 2 * B);
    h.leftCols(B) = z.leftCols(B).array().sin();
    h.rightCols(B) = z.leftCols(B).array().cos() * z.rightCols(B).array();
    pass.inputs[l] = std::move(x);
    pass.preacts[l] = std::move(z);
    x = std::move(h);
  }
  pass.output.resize(params_.weights.back().rows(), 2 * B);
  pass.output.noalias() = params_.weights.back() * x;
  pass.output.leftCols(B).colwise() += params_.biases.back();
  pass.inputs[L - 1] = std::move(x);
  if (!pass.output.allFinite()) {
    throw Error(ErrorKind::kNonFiniteOutput, "network produced a non-finite value");
  }
  return pass;
}

FrameTangent SirenModel::forward_with_tangent(double t_norm) const {
  ForwardPass pass = forward_batch(std::span<const double>(&t_norm, 1));
  return {pass.output.col(0), pass.output.col(1)};
}

Eigen::VectorXd SirenModel::forward(double t_norm) const {
  return forward_with_tangent(t_norm).frame;
}

ParameterSet SirenModel::backward(const ForwardPass& pass, const MatrixXd& dloss_dframe,
                                  const MatrixXd* dloss_dtangent) const {
  const auto B = static_cast<Index>(pass.batch);
  const auto P = static_cast<Index>(pixels());
  if (dloss_dframe.rows() != P || dloss_dframe.cols() != B ||
      (dloss_dtangent && (dloss_dtangent->rows() != P || dloss_dtangent->cols() != B))) {
    throw Error(ErrorKind::kShapeMismatch, "loss seeds must be pixels x batch");
  }
  const std::size_t L = params_.weights.size();
  ParameterSet grads;
  grads.weights.resize(L);
  grads.biases.resize(L);

  MatrixXd g(P, 2 * B);
  g.leftCols(B) = dloss_dframe;
  if (dloss_dtangent) {
    g.rightCols(B) = *dloss_dtangent;
  } else {
    g.rightCols(B).setZero();
  }

  grads.weights[L - 1].noalias() = g * pass.inputs[L - 1].transpose();
  grads.biases[L - 1] = g.leftCols(B).rowwise().sum();
  MatrixXd gx;
  gx.noalias() = params_.weights[L - 1].transpose() * g;

  for (std::size_t l = L - 1; l-- > 0;) {
    const MatrixXd& z = pass.preacts[l];
    const auto a = z.leftCols(B).array();
    const auto a_dot = z.rightCols(B).array();
    const auto gh = gx.leftCols(B).array();
    const auto gh_dot = gx.rightCols(B).array();
    MatrixXd gz(z.rows(), 2 * B);
    const Eigen::ArrayXXd cos_a = a.cos();
    gz.leftCols(B) = gh * cos_a - gh_dot * a.sin() * a_dot;
    gz.rightCols(B) = gh_dot * cos_a;
    gz *= omega0_;
    grads.weights[l].noalias() = gz * pass.inputs[l].transpose();
    grads.biases[l] = gz.leftCols(B).rowwise().sum();
    if (l > 0) {
      gx.resize(params_.weights[l].cols(), 2 * B);
      gx.noalias() = params_.weights[l].transpose() * gz;
    }
  }
  if (!grads.all_finite()) throw Error(ErrorKind::kNonFiniteGradient, "non-finite gradient");
  return grads;
}

ParameterSet SirenModel::backward(double t_norm, const VectorXd& dloss_dframe,
                                  const VectorXd* dloss_dtangent) const {
  ForwardPass pass = forward_batch(std::span<const double>(&t_norm, 1));
  MatrixXd seed_frame = dloss_dframe;
  if (dloss_dtangent) {
    MatrixXd seed_tangent = *dloss_dtangent;
    return backward(pass, seed_frame, &seed_tangent);
  }
  return backward(pass, seed_frame, nullptr);
}

bool SirenModel::operator==(const SirenModel& other) const {
  if (layer_sizes_ != other.layer_sizes_ || omega0_ != other.omega0_ || height_ != other.height_ ||
      width_ != other.width_ || domain_.lo != other.domain_.lo || domain_.hi != other.domain_.hi)
    return false;
  for (std::size_t l = 0; l < params_.weights.size(); ++l) {
    if (params_.weights[l] != other.params_.weights[l] || params_.biases[l] != other.params_.biases[l])
      return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Adam

AdamState::AdamState(const ParameterSet& like, AdamConfig config)
    : config_(config), m_(ParameterSet::zeros_like(like)), v_(ParameterSet::zeros_like(like)) {
  if (!(config.lr > 0.0) || !(config.beta1 >= 0.0 && config.beta1 < 1.0) ||
      !(config.beta2 >= 0.0 && config.beta2 < 1.0) || !(config.eps > 0.0) ||
      !(config.decay > 0.0) || config.decay_every < 1) {
    throw Error(ErrorKind::kInvalidArgument, "invalid Adam configuration");
  }
}

double AdamState::lr() const {
  return config_.lr * std::pow(config_.decay, static_cast<double>(step_ / config_.decay_every));
}

void AdamState::step(ParameterSet& params, const ParameterSet& grads) {
  if (!params.same_shape(m_) || !grads.same_shape(m_)) {
    throw Error(ErrorKind::kShapeMismatch, "Adam state, parameters and gradients differ in shape");
  }
  const double lr = this->lr();
  ++step_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  auto update = [&](auto& theta, auto& m, auto& v, const auto& g) {
    m.array() = b1 * m.array() + (1.0 - b1) * g.array();
    v.array() = b2 * v.array() + (1.0 - b2) * g.array().square();
    theta.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + config_.eps);
  };
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    update(params.weights[l], m_.weights[l], v_.weights[l], grads.weights[l]);
    update(params.biases[l], m_.biases[l], v_.biases[l], grads.biases[l]);
  }
}

// ---------------------------------------------------------------------------
// Checkpoints
//
// magic "EVINRCK1" | u32 version | u32 n_sizes | i32 sizes[n] | f64 omega0 |
// i32 height | i32 width | f64 t_lo | f64 t_hi | per layer: f64 weights
// (column-major) then f64 bias.

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint IO assumes little endian");

constexpr char kMagic[8] = {'E', 'V', 'I', 'N', 'R', 'C', 'K', '1'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error(ErrorKind::kIo, "truncated checkpoint");
  return v;
}

void get_doubles(std::istream& in, double* dst, Index n) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(sizeof(double) * n));
  if (!in) throw Error(ErrorKind::kIo, "truncated checkpoint");
}

}  // namespace

void save_checkpoint(std::ostream& out, const SirenModel& model) {
  out.write(kMagic, sizeof kMagic);
  put(out, kVersion);
  put(out, static_cast<std::uint32_t>(model.layer_sizes().size()));
  for (int n : model.layer_sizes()) put(out, static_cast<std::int32_t>(n));
  put(out, model.omega0());
  put(out, static_cast<std::int32_t>(model.height()));
  put(out, static_cast<std::int32_t>(model.width()));
  put(out, model.domain().lo);
  put(out, model.domain().hi);
  const ParameterSet& p = model.params();
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    out.write(reinterpret_cast<const char*>(p.weights[l].data()),
              static_cast<std::streamsize>(sizeof(double) * p.weights[l].size()));
    out.write(reinterpret_cast<const char*>(p.biases[l].data()),
              static_cast<std::streamsize>(sizeof(double) * p.biases[l].size()));
  }
  if (!out) throw Error(ErrorKind::kIo, "checkpoint write failed");
}

void save_checkpoint(const std::filesystem::path& path, const SirenModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  save_checkpoint(out, model);
}

SirenModel load_checkpoint(std::istream& in) {
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw Error(ErrorKind::kIo, "not a model checkpoint");
  }
  if (get<std::uint32_t>(in) != kVersion) throw Error(ErrorKind::kIo, "unsupported checkpoint version");
  const auto n = get<std::uint32_t>(in);
  if (n < 3 || n > 1024) throw Error(ErrorKind::kIo, "corrupt checkpoint layer count");
  SirenModel model;
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto size = get<std::int32_t>(in);
    if (size < 1) throw Error(ErrorKind::kIo, "corrupt checkpoint layer size");
    model.layer_sizes_.push_back(size);
  }
  model.omega0_ = get<double>(in);
  model.height_ = get<std::int32_t>(in);
  model.width_ = get<std::int32_t>(in);
  model.domain_.lo = get<double>(in);
  model.domain_.hi = get<double>(in);
  if (model.layer_sizes_.front() != 1 || model.height_ < 1 || model.width_ < 1 ||
      static_cast<std::size_t>(model.layer_sizes_.back()) != model.pixels()) {
    throw Error(ErrorKind::kIo, "checkpoint header is inconsistent");
  }
  for (std::size_t l = 0; l + 1 < model.layer_sizes_.size(); ++l) {
    MatrixXd w(model.layer_sizes_[l + 1], model.layer_sizes_[l]);
    VectorXd b(model.layer_sizes_[l + 1]);
    get_doubles(in, w.data(), w.size());
    get_doubles(in, b.data(), b.size());
    model.params_.weights.push_back(std::move(w));
    model.params_.biases.push_back(std::move(b));
  }
  return model;
}

SirenModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return load_checkpoint(in);
}

}  // namespace eventinr
