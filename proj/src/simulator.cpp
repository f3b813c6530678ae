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

#include "eventinr/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <tuple>

#include "eventinr/error.hpp"
#include "eventinr/image_io.hpp"

namespace eventinr {
namespace {

constexpr double kMinIntensity = 0.05;
constexpr double kGradientHz = 2.0;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Uniform in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Maps a smooth periodic profile value in [-1, 1] to [0.05, 1].
double soft_level(double q) { return 0.5 + 0.5 * std::tanh(3.0 * q) / std::tanh(3.0); }

struct SceneParams {
  double a = 0.0;  // direction / rotation rate
  double b = 0.0;  // phase
  double c = 0.0;
};

double intensity_at(SceneKind kind, const SceneParams& p, int width, int height, double duration,
                    double x, double y, double t) {
  const double extent = std::max(width, height);
  switch (kind) {
    case SceneKind::kTranslatingGradient: {
      // Log intensity is a sinusoid along a fixed direction with a period of
      // two extents, drifting at kGradientHz periods per second.
      const double u = x * std::cos(p.a) + y * std::sin(p.a);
      const double s = u / (2.0 * extent) - kGradientHz * t + p.b;
      const double level = 0.5 + 0.5 * std::sin(kTwoPi * s);
      return std::pow(kMinIntensity, 1.0 - level);
    }
    case SceneKind::kMovingChecker: {
      const double cell = extent / 4.0;
      const double xs = x - p.a * t * extent / duration;
      const double ys = y - p.c * t * extent / duration;
      const double q = std::sin(std::numbers::pi * (xs / cell + p.b)) *
                       std::sin(std::numbers::pi * (ys / cell + p.b));
      return kMinIntensity + (1.0 - kMinIntensity) * soft_level(q);
    }
    case SceneKind::kRotatingBars: {
      const double angle = p.a * t + p.b;
      const double r = (x - 0.5 * (width - 1)) * std::cos(angle) +
                       (y - 0.5 * (height - 1)) * std::sin(angle);
      const double q = std::sin(kTwoPi * r / (extent / 3.0) + p.c);
      return kMinIntensity + (1.0 - kMinIntensity) * soft_level(q);
    }
  }
  return 1.0;
}

}  // namespace

SceneKind parse_scene_kind(std::string_view name) {
  if (name == "translating_gradient") return SceneKind::kTranslatingGradient;
  if (name == "moving_checker") return SceneKind::kMovingChecker;
  if (name == "rotating_bars") return SceneKind::kRotatingBars;
  throw Error(ErrorKind::kInvalidArgument, "unknown scene '" + std::string(name) + "'");
}

std::string_view to_string(SceneKind kind) {
  switch (kind) {
    case SceneKind::kTranslatingGradient: return "translating_gradient";
    case SceneKind::kMovingChecker: return "moving_checker";
    case SceneKind::kRotatingBars: return "rotating_bars";
  }
  return "unknown";
}

IntensityVideo render_scene(SceneKind kind, int width, int height, double duration, double fps,
                            std::uint64_t seed) {
  if (width < 8 || height < 8) {
    throw Error(ErrorKind::kInvalidDimensions, "scenes need at least 8x8 pixels");
  }
  if (!(duration > 0.0) || !(fps > 0.0) || !std::isfinite(duration * fps) ||
      duration * fps < 2.0) {
    throw Error(ErrorKind::kInvalidDimensions, "duration * fps must cover at least two frames");
  }
  std::mt19937_64 rng(seed);
  SceneParams params;
  switch (kind) {
    case SceneKind::kTranslatingGradient:
      params.a = kTwoPi * unit(rng);
      params.b = unit(rng);
      break;
    case SceneKind::kMovingChecker:
      params.a = 0.25 + 0.25 * unit(rng);
      params.b = unit(rng);
      params.c = 0.1 + 0.2 * unit(rng);
      break;
    case SceneKind::kRotatingBars:
      params.a = 0.5 + unit(rng);
      params.b = kTwoPi * unit(rng);
      params.c = kTwoPi * unit(rng);
      break;
  }

  const auto n = static_cast<std::size_t>(std::floor(duration * fps + 1e-9));
  IntensityVideo video;
  video.width = width;
  video.height = height;
  video.times.resize(n);
  video.frames.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / fps;
    video.times[k] = t;
    Frame f(height, width);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        f(y, x) = std::clamp(intensity_at(kind, params, width, height, duration, x, y, t),
                             kMinIntensity, 1.0);
      }
    }
    video.frames.push_back(std::move(f));
  }
  return video;
}

std::vector<Frame> log_frames(const IntensityVideo& video, double log_eps) {
  std::vector<Frame> out;
  out.reserve(video.frames.size());
  for (const Frame& f : video.frames) {
    Frame l(f.height, f.width);
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!(f.data[i] > 0.0)) {
        throw Error(ErrorKind::kNonPositiveIntensity, "intensity must be positive");
      }
      l.data[i] = std::log(f.data[i] + log_eps);
    }
    out.push_back(std::move(l));
  }
  return out;
}

EventStream simulate_events(const IntensityVideo& video, const SimConfig& cfg) {
  if (!(cfg.threshold_c > 0.0)) throw Error(ErrorKind::kInvalidArgument, "threshold C must be > 0");
  if (!(cfg.noise_rate >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "noise rate must be >= 0");
  if (!(cfg.log_eps >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "log_eps must be >= 0");
  if (video.frames.size() < 2 || video.frames.size() != video.times.size()) {
    throw Error(ErrorKind::kInvalidDimensions, "video needs at least two timed frames");
  }
  for (std::size_t k = 1; k < video.times.size(); ++k) {
    if (!(video.times[k] > video.times[k - 1])) {
      throw Error(ErrorKind::kInvalidArgument, "video times must strictly increase");
    }
  }
  for (const Frame& f : video.frames) {
    if (f.height != video.height || f.width != video.width) {
      throw Error(ErrorKind::kShapeMismatch, "frame size differs from video size");
    }
    for (double v : f.data) {
      if (!(v > 0.0)) throw Error(ErrorKind::kNonPositiveIntensity, "intensity must be > 0");
    }
  }

  const std::vector<Frame> logs = log_frames(video, cfg.log_eps);
  const double C = cfg.threshold_c;
  EventStream stream;
  stream.width = video.width;
  stream.height = video.height;
  stream.t_start = video.times.front();
  stream.t_end = video.times.back();

  const std::size_t pixels = static_cast<std::size_t>(video.width) * video.height;
  for (std::size_t i = 0; i < pixels; ++i) {
    const int x = static_cast<int>(i % video.width);
    const int y = static_cast<int>(i / video.width);
    double ref = logs[0].data[i];
    for (std::size_t k = 0; k + 1 < logs.size(); ++k) {
      const double la = logs[k].data[i];
      const double lb = logs[k + 1].data[i];
      const double ta = video.times[k];
      const double tb = video.times[k + 1];
      for (;;) {
        int polarity = 0;
        if (lb >= ref + C) {
          polarity = 1;
        } else if (lb <= ref - C) {
          polarity = -1;
        } else {
          break;
        }
        const double level = ref + polarity * C;
        const double frac = std::clamp((level - la) / (lb - la), 0.0, 1.0);
        stream.events.push_back({ta + frac * (tb - ta), x, y, polarity});
        ref = level;
      }
    }
  }

  if (cfg.noise_rate > 0.0) {
    std::mt19937_64 rng(cfg.rng_seed);
    const double span = stream.t_end - stream.t_start;
    const double mean = cfg.noise_rate * span;
    for (std::size_t i = 0; i < pixels; ++i) {
      // Poisson count by inversion on uniform draws.
      std::size_t count = 0;
      double p = std::exp(-mean);
      double cdf = p;
      const double u = unit(rng);
      while (u > cdf && count < 1000000) {
        ++count;
        p *= mean / static_cast<double>(count);
        cdf += p;
      }
      for (std::size_t j = 0; j < count; ++j) {
        const double t = stream.t_start + unit(rng) * span;
        const int polarity = unit(rng) < 0.5 ? -1 : 1;
        stream.events.push_back({t, static_cast<int>(i % video.width),
                                 static_cast<int>(i / video.width), polarity});
      }
    }
  }

  std::sort(stream.events.begin(), stream.events.end(), [](const Event& a, const Event& b) {
    return std::tie(a.t, a.y, a.x, a.polarity) < std::tie(b.t, b.y, b.x, b.polarity);
  });
  return stream;
}

void dump_video(const IntensityVideo& video, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  char name[32];
  for (std::size_t k = 0; k < video.frames.size(); ++k) {
    const Frame& f = video.frames[k];
    Image8 img(f.height, f.width);
    for (std::size_t i = 0; i < f.size(); ++i) {
      img.data[i] = static_cast<std::uint8_t>(std::clamp(std::lround(f.data[i] * 255.0), 0L, 255L));
    }
    std::snprintf(name, sizeof name, "frame_%06zu.pgm", k);
    write_pgm(dir / name, img);
  }
  write_file_atomic(dir / "times.txt", write_timestamps(video.times));
}

}  // namespace eventinr
