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

// Sine-activated MLP mapping a normalized timestamp to a full H×W frame of
// log intensity, with an exact time tangent and parameter gradients of
// losses that depend on both the frame and its tangent.

#ifndef EVENTINR_SIREN_HPP_
#define EVENTINR_SIREN_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace eventinr {

/// Weights and biases per layer. Used for model parameters, gradients and
/// optimizer moments alike.
struct ParameterSet {
  std::vector<Eigen::MatrixXd> weights;  // weights[l] is out × in
  std::vector<Eigen::VectorXd> biases;

  static ParameterSet zeros_like(const ParameterSet& other);

  std::size_t count() const;
  bool same_shape(const ParameterSet& other) const;
  bool all_finite() const;
  /// Flattened view in layer order (weights column-major, then bias).
  std::vector<double> flatten() const;
  void assign_flat(std::span<const double> values);
};

/// Affine map of [lo, hi] seconds onto [-1, 1].
struct TimeDomain {
  double lo = -1.0;
  double hi = 1.0;

  double normalize(double seconds) const { return 2.0 * (seconds - lo) / (hi - lo) - 1.0; }
  /// d t_norm / d seconds.
  double slope() const { return 2.0 / (hi - lo); }
};

/// Activations recorded by a batched forward pass. Columns [0, B) carry
/// values and [B, 2B) carry d/dt_norm of the same quantities.
struct ForwardPass {
  std::size_t batch = 0;
  std::vector<Eigen::MatrixXd> inputs;   // input of every layer
  std::vector<Eigen::MatrixXd> preacts;  // sine arguments of hidden layers
  Eigen::MatrixXd output;               // pixels × 2B

  auto frames() const { return output.leftCols(static_cast<Eigen::Index>(batch)); }
  auto tangents() const { return output.rightCols(static_cast<Eigen::Index>(batch)); }
};

struct FrameTangent {
  Eigen::VectorXd frame;
  Eigen::VectorXd tangent;  // d frame / d t_norm
};

class SirenModel {
 public:
  /// Empty placeholder; assign a constructed model before use.
  SirenModel() = default;

  /// layer_sizes = {1, hidden..., height * width}. Hidden layers compute
  /// sin(omega0 * (W x + b)); the output layer is affine. First-layer weights
  /// are U(-1/n_in, 1/n_in), later ones U(-sqrt(6/n_in)/omega0, +...), and
  /// biases U(-1/sqrt(n_in), 1/sqrt(n_in)).
  SirenModel(std::vector<int> layer_sizes, double omega0, std::uint64_t seed, int height,
             int width, TimeDomain domain = {});

  /// {1, width x hidden_layers, height * width}.
  static SirenModel for_frames(int height, int width, int hidden_layers, int hidden_width,
                               double omega0, std::uint64_t seed, TimeDomain domain = {});

  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  double omega0() const { return omega0_; }
  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t pixels() const { return static_cast<std::size_t>(height_) * width_; }
  const TimeDomain& domain() const { return domain_; }
  std::size_t parameter_count() const { return params_.count(); }

  const ParameterSet& params() const { return params_; }
  ParameterSet& params() { return params_; }

  Eigen::VectorXd forward(double t_norm) const;
  FrameTangent forward_with_tangent(double t_norm) const;
  ForwardPass forward_batch(std::span<const double> t_norm) const;

  /// Gradient of sum(dloss_dframe ∘ F) + sum(dloss_dtangent ∘ dF/dt_norm).
  /// Both seeds are pixels × B; a null tangent seed means zero.
  ParameterSet backward(const ForwardPass& pass, const Eigen::MatrixXd& dloss_dframe,
                        const Eigen::MatrixXd* dloss_dtangent) const;
  ParameterSet backward(double t_norm, const Eigen::VectorXd& dloss_dframe,
                        const Eigen::VectorXd* dloss_dtangent) const;

  bool operator==(const SirenModel& other) const;

 private:
  friend SirenModel load_checkpoint(std::istream& in);

  std::vector<int> layer_sizes_;
  double omega0_ = 30.0;
  int height_ = 0;
  int width_ = 0;
  TimeDomain domain_;
  ParameterSet params_;
};

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double decay = 0.95;   // lr multiplier ...
  int decay_every = 10;  // ... applied after every this many steps
};

class AdamState {
 public:
  AdamState(const ParameterSet& like, AdamConfig config = {});

  /// Learning rate the next step will use.
  double lr() const;
  long step_count() const { return step_; }
  const AdamConfig& config() const { return config_; }
  const ParameterSet& first_moment() const { return m_; }
  const ParameterSet& second_moment() const { return v_; }

  /// Bias-corrected Adam update of `params` in place.
  void step(ParameterSet& params, const ParameterSet& grads);

 private:
  AdamConfig config_;
  ParameterSet m_;
  ParameterSet v_;
  long step_ = 0;
};

inline void adam_step(AdamState& state, ParameterSet& params, const ParameterSet& grads) {
  state.step(params, grads);
}

// Checkpoints: little-endian binary, see README for the layout.
void save_checkpoint(std::ostream& out, const SirenModel& model);
void save_checkpoint(const std::filesystem::path& path, const SirenModel& model);
SirenModel load_checkpoint(std::istream& in);
SirenModel load_checkpoint(const std::filesystem::path& path);

}  // namespace eventinr

#endif  // EVENTINR_SIREN_HPP_
