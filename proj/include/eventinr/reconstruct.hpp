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

#ifndef EVENTINR_RECONSTRUCT_HPP_
#define EVENTINR_RECONSTRUCT_HPP_

#include <filesystem>
#include <span>
#include <vector>

#include "eventinr/grid.hpp"
#include "eventinr/trainer.hpp"

namespace eventinr {

struct LogVideo {
  int width = 0;
  int height = 0;
  std::vector<double> times;
  std::vector<Frame> frames;
};

struct ToneMapConfig {
  double gamma = 0.6;
};

/// Per-pixel additive offsets that make neighbouring models agree on their
/// mean output over each shared overlap. Offsets are centred so they sum to
/// zero; a single partition gets a zero offset.
std::vector<Eigen::VectorXd> stitch_offsets(std::span<const Partition> partitions);

/// Evaluates the ensemble at `times`. Inside an overlap the two aligned
/// neighbours are crossfaded linearly by position in the overlap.
LogVideo sample_video(std::span<const Partition> partitions, std::span<const double> times,
                      int threads = 1);

/// Subtracts the (lower) median of every value in the video.
LogVideo anchor_offset(LogVideo video);

/// (I / (I + 1))^gamma with I = exp(log_value).
double tone_map_value(double log_value, double gamma);
std::uint8_t quantize_unit(double value);
std::vector<Image8> tone_map(const LogVideo& video, const ToneMapConfig& cfg = {});

/// dF/dt (seconds) * window_dt per requested time, stitched like sample_video.
std::vector<Frame> enhance_events(std::span<const Partition> partitions,
                                  std::span<const double> times, double window_dt,
                                  int threads = 1);

/// byte = clamp(128 + 128 * value / scale).
Image8 signed_to_gray(const Frame& frame, double scale);

/// Frame times k / fps covering [t_lo, t_hi].
std::vector<double> uniform_times(double t_lo, double t_hi, double fps);

/// frame_%06d.pgm plus times.txt.
void write_frames(const std::filesystem::path& dir, std::span<const Image8> frames,
                  std::span<const double> times);

}  // namespace eventinr

#endif  // EVENTINR_RECONSTRUCT_HPP_
