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

// Self-supervised fitting of SirenModels to event frames.
//
// The objective is L_temp + lambda * L_reg where L_temp compares each event
// frame with the network's time derivative at the interval midpoint times
// the interval duration, and L_reg penalizes forward-difference spatial
// gradients of the emitted frames. Both are means, so lambda does not
// depend on resolution or batch size.

#ifndef EVENTINR_TRAINER_HPP_
#define EVENTINR_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eventinr/event_frames.hpp"
#include "eventinr/event_io.hpp"
#include "eventinr/siren.hpp"

namespace eventinr {

struct TrainConfig {
  double lambda_reg = 0.05;
  double threshold_c = 1.0;
  double initial_bin = 1.0 / 32.0;  // seconds
  int initial_split = 1;             // equal pieces per stage-0 bin (ablations without C2F)
  int stages = 3;
  std::vector<int> refine_at_iters{100, 200};
  int total_iters = 300;
  double lr = 1e-4;
  double lr_decay = 0.95;
  int lr_decay_every = 10;
  double partition_tau = 5.0;  // seconds
  double overlap = 0.5;        // seconds shared by neighbouring partitions
  int batch_frames = 0;        // 0 = every frame each iteration
  std::uint64_t seed = 0;
  int hidden_layers = 3;
  int hidden_width = 512;
  double omega0 = 30.0;

  void validate() const;
};

/// `key = value` lines; '#' starts a comment. Keys match the field names,
/// `refine_at_iters` is a comma-separated list and `batch_frames = all`
/// selects full batches.
TrainConfig parse_train_config(std::string_view text, TrainConfig base = {});
TrainConfig read_train_config(const std::filesystem::path& path, TrainConfig base = {});
std::string format_train_config(const TrainConfig& cfg);

enum class Ablation { kBase, kBaseReg, kBaseC2F, kFull };

/// Variants without coarse-to-fine start directly at the finest resolution
/// the full schedule reaches (stage-0 bins split 2^(stages-1) ways).

/// Ablation variants share the finest temporal resolution: variants without
/// coarse-to-fine start directly at initial_bin / 2^(stages-1).
TrainConfig ablation_config(TrainConfig cfg, Ablation variant);

struct LossValue {
  double temporal = 0.0;
  double reg = 0.0;
  double total = 0.0;
};

struct TemporalLoss {
  double loss = 0.0;
  Eigen::MatrixXd dtangent;  // d loss / d (dF/dt_norm), pixels × |indices|
};

/// Evaluates at interval midpoints; `pass` must come from forward_batch over
/// the normalized midpoints of `indices` in order.
TemporalLoss temporal_loss(const ForwardPass& pass, double slope, const EventFrameStack& stack,
                           std::span<const std::size_t> indices);
TemporalLoss temporal_loss(const SirenModel& model, const EventFrameStack& stack,
                           std::span<const std::size_t> indices);

struct SpatialReg {
  double loss = 0.0;
  Frame grad;
};

/// mean over horizontal sites of (D_x f)^2 plus mean over vertical sites of
/// (D_y f)^2, forward differences.
SpatialReg spatial_reg_loss(const Frame& frame);

struct Objective {
  LossValue loss;
  ParameterSet grads;
};

Objective evaluate_objective(const SirenModel& model, const EventFrameStack& stack,
                             std::span<const std::size_t> indices, double lambda_reg);

struct Partition {
  int index = 0;
  double core_lo = 0.0;
  double core_hi = 0.0;
  double span_lo = 0.0;  // core plus overlap margins, clipped to the stream
  double span_hi = 0.0;
  EventStream events;
  EventFrameStack stack;
  SirenModel model;
};

/// ceil(duration / tau) partitions (at least one); interior boundaries are
/// widened by overlap / 2 on each side so neighbours share `overlap` seconds.
std::vector<Partition> make_partitions(const EventStream& stream, const TrainConfig& cfg);

struct TrainReport {
  int partition = 0;
  std::vector<LossValue> history;        // one entry per iteration, before its update
  std::vector<std::size_t> resolution;   // frames in the stack at each iteration
  double seconds = 0.0;

  std::size_t final_resolution() const { return resolution.empty() ? 0 : resolution.back(); }
};

TrainReport train_partition(Partition& partition, const TrainConfig& cfg);

struct Ensemble {
  std::vector<Partition> partitions;
  std::vector<TrainReport> reports;
};

/// Trains every partition independently on up to `threads` workers; the
/// result does not depend on the worker count.
Ensemble train_ensemble(const EventStream& stream, const TrainConfig& cfg, int threads = 1);

}  // namespace eventinr

#endif  // EVENTINR_TRAINER_HPP_
