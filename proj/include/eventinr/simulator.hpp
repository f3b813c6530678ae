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

// Synthetic scenes and a reference-level event simulator.

#ifndef EVENTINR_SIMULATOR_HPP_
#define EVENTINR_SIMULATOR_HPP_

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "eventinr/event_io.hpp"
#include "eventinr/grid.hpp"

namespace eventinr {

struct IntensityVideo {
  int width = 0;
  int height = 0;
  std::vector<double> times;
  std::vector<Frame> frames;  // intensities > 0
};

enum class SceneKind { kTranslatingGradient, kMovingChecker, kRotatingBars };

SceneKind parse_scene_kind(std::string_view name);
std::string_view to_string(SceneKind kind);

/// Frames at t = k / fps for k in [0, floor(duration * fps)). Intensities lie
/// in [0.05, 1]. The gradient scene translates a smooth periodic log-intensity
/// profile by exactly one period over `duration`.
IntensityVideo render_scene(SceneKind kind, int width, int height, double duration, double fps,
                            std::uint64_t seed);

struct SimConfig {
  double threshold_c = 0.25;
  double log_eps = 1e-3;
  double noise_rate = 0.0;  // spurious events per pixel per second
  std::uint64_t rng_seed = 0;
};

/// One event each time the linearly interpolated log intensity moves C away
/// from the pixel's reference level; the reference then steps by ±C. The
/// stream spans [times.front(), times.back()].
EventStream simulate_events(const IntensityVideo& video, const SimConfig& cfg);

/// log(I + eps) per frame.
std::vector<Frame> log_frames(const IntensityVideo& video, double log_eps);

/// frame_%06d.pgm (intensity * 255) plus times.txt.
void dump_video(const IntensityVideo& video, const std::filesystem::path& dir);

}  // namespace eventinr

#endif  // EVENTINR_SIMULATOR_HPP_
