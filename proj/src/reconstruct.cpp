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

#include "eventinr/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "eventinr/error.hpp"
#include "eventinr/event_io.hpp"
#include "eventinr/image_io.hpp"
#include "eventinr/internal/parallel.hpp"

namespace eventinr {
namespace {

using Eigen::Index;
using Eigen::VectorXd;

constexpr std::size_t kChunk = 32;          // times per evaluation batch
constexpr int kOverlapSamples = 16;

struct Placement {
  std::size_t first = 0;
  std::size_t second = 0;
  double weight = 0.0;  // weight of `second`
  bool blend = false;
};

double tolerance(double t) { return 1e-9 * std::max(1.0, std::abs(t)); }

Placement locate(std::span<const Partition> parts, double t) {
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const Partition& p = parts[i];
    if (t < p.span_lo - tolerance(t) || t > p.span_hi + tolerance(t)) continue;
    if (i + 1 < parts.size()) {
      const double lo = parts[i + 1].span_lo;
      const double hi = p.span_hi;
      if (hi > lo && t > lo) {
        return {i, i + 1, std::clamp((t - lo) / (hi - lo), 0.0, 1.0), true};
      }
    }
    return {i, i, 0.0, false};
  }
  throw Error(ErrorKind::kTimeOutOfRange, "time " + std::to_string(t) + " is outside every trained span");
}

double clamp_norm(const SirenModel& m, double t) {
  return std::clamp(m.domain().normalize(t), -1.0, 1.0);
}

enum class Quantity { kFrame, kTangentSeconds };

// Evaluates one quantity of the stitched ensemble at `times`, writing into
// `out` (pre-sized frames).
void evaluate_chunk(std::span<const Partition> parts, std::span<const VectorXd> offsets,
                    std::span<const double> times, Quantity quantity, double factor,
                    std::span<Frame> out) {
  std::vector<Placement> where(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) where[j] = locate(parts, times[j]);
  for (Frame& f : out) std::fill(f.data.begin(), f.data.end(), 0.0);

  for (std::size_t p = 0; p < parts.size(); ++p) {
    std::vector<std::size_t> members;
    std::vector<double> t_norm;
    for (std::size_t j = 0; j < times.size(); ++j) {
      if (where[j].first == p || (where[j].blend && where[j].second == p)) {
        members.push_back(j);
        t_norm.push_back(clamp_norm(parts[p].model, times[j]));
      }
    }
    if (members.empty()) continue;
    const ForwardPass pass = parts[p].model.forward_batch(t_norm);
    const double slope = parts[p].model.domain().slope();
    for (std::size_t m = 0; m < members.size(); ++m) {
      const std::size_t j = members[m];
      const Placement& pl = where[j];
      const double w = !pl.blend ? 1.0 : (pl.first == p ? 1.0 - pl.weight : pl.weight);
      double* dst = out[j].data.data();
      const auto col = static_cast<Index>(m);
      if (quantity == Quantity::kFrame) {
        const double* src = pass.output.col(col).data();
        const double* off = offsets[p].data();
        for (std::size_t i = 0; i < out[j].size(); ++i) dst[i] += w * (src[i] + off[i]);
      } else {
        const double* src = pass.output.col(static_cast<Index>(pass.batch) + col).data();
        const double scale = slope * factor;
        for (std::size_t i = 0; i < out[j].size(); ++i) dst[i] += w * (src[i] * scale);
      }
    }
  }
}

void check_partitions(std::span<const Partition> parts) {
  if (parts.empty()) throw Error(ErrorKind::kInvalidArgument, "no trained partitions");
  for (const Partition& p : parts) {
    if (p.model.height() != parts.front().model.height() ||
        p.model.width() != parts.front().model.width()) {
      throw Error(ErrorKind::kShapeMismatch, "partitions disagree on frame size");
    }
  }
}

std::vector<Frame> evaluate(std::span<const Partition> parts, std::span<const double> times,
                            Quantity quantity, double factor, int threads) {
  check_partitions(parts);
  const std::vector<VectorXd> offsets =
      quantity == Quantity::kFrame ? stitch_offsets(parts) : std::vector<VectorXd>{};
  const int h = parts.front().model.height();
  const int w = parts.front().model.width();
  std::vector<Frame> frames(times.size(), Frame(h, w));
  const std::size_t chunks = (times.size() + kChunk - 1) / kChunk;
  internal::parallel_for(chunks, threads, [&](std::size_t c) {
    const std::size_t lo = c * kChunk;
    const std::size_t n = std::min(kChunk, times.size() - lo);
    evaluate_chunk(parts, offsets, times.subspan(lo, n), quantity, factor,
                   std::span<Frame>(frames).subspan(lo, n));
  });
  return frames;
}

VectorXd mean_over(const SirenModel& model, double lo, double hi) {
  std::vector<double> t;
  if (hi > lo) {
    for (int k = 0; k < kOverlapSamples; ++k) {
      t.push_back(clamp_norm(model, lo + (k + 0.5) * (hi - lo) / kOverlapSamples));
    }
  } else {
    t.push_back(clamp_norm(model, hi));
  }
  const ForwardPass pass = model.forward_batch(t);
  return pass.frames().rowwise().mean();
}

}  // namespace

std::vector<VectorXd> stitch_offsets(std::span<const Partition> parts) {
  check_partitions(parts);
  const auto pixels = static_cast<Index>(parts.front().model.pixels());
  std::vector<VectorXd> offsets(parts.size(), VectorXd::Zero(pixels));
  if (parts.size() == 1) return offsets;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    const double lo = parts[i + 1].span_lo;
    const double hi = parts[i].span_hi;
    const VectorXd left = mean_over(parts[i].model, lo, hi);
    const VectorXd right = mean_over(parts[i + 1].model, lo, hi);
    offsets[i + 1] = offsets[i] + left - right;
  }
  VectorXd mean = VectorXd::Zero(pixels);
  for (const auto& o : offsets) mean += o;
  mean /= static_cast<double>(offsets.size());
  for (auto& o : offsets) o -= mean;
  return offsets;
}

LogVideo sample_video(std::span<const Partition> partitions, std::span<const double> times,
                      int threads) {
  for (std::size_t j = 1; j < times.size(); ++j) {
    if (!(times[j] > times[j - 1])) {
      throw Error(ErrorKind::kInvalidArgument, "sample times must strictly increase");
    }
  }
  LogVideo video;
  video.frames = evaluate(partitions, times, Quantity::kFrame, 1.0, threads);
  video.times.assign(times.begin(), times.end());
  video.height = partitions.front().model.height();
  video.width = partitions.front().model.width();
  return video;
}

LogVideo anchor_offset(LogVideo video) {
  std::vector<double> values;
  for (const Frame& f : video.frames) values.insert(values.end(), f.data.begin(), f.data.end());
  if (values.empty()) return video;
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  const double median = *mid;
  for (Frame& f : video.frames) {
    for (double& v : f.data) v -= median;
  }
  return video;
}

double tone_map_value(double log_value, double gamma) {
  // I / (I + 1) written as a logistic to stay finite for large |log_value|.
  return std::pow(1.0 / (1.0 + std::exp(-log_value)), gamma);
}

std::uint8_t quantize_unit(double value) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(value * 255.0), 0L, 255L));
}

std::vector<Image8> tone_map(const LogVideo& video, const ToneMapConfig& cfg) {
  if (!(cfg.gamma > 0.0)) throw Error(ErrorKind::kInvalidArgument, "gamma must be > 0");
  std::vector<Image8> out;
  out.reserve(video.frames.size());
  for (const Frame& f : video.frames) {
    Image8 img(f.height, f.width);
    for (std::size_t i = 0; i < f.size(); ++i) img.data[i] = quantize_unit(tone_map_value(f.data[i], cfg.gamma));
    out.push_back(std::move(img));
  }
  return out;
}

std::vector<Frame> enhance_events(std::span<const Partition> partitions,
                                  std::span<const double> times, double window_dt, int threads) {
  if (!(window_dt > 0.0)) throw Error(ErrorKind::kInvalidArgument, "window_dt must be > 0");
  return evaluate(partitions, times, Quantity::kTangentSeconds, window_dt, threads);
}

Image8 signed_to_gray(const Frame& frame, double scale) {
  if (!(scale > 0.0)) throw Error(ErrorKind::kInvalidArgument, "scale must be > 0");
  Image8 img(frame.height, frame.width);
  for (std::size_t i = 0; i < frame.size(); ++i) {
    img.data[i] = static_cast<std::uint8_t>(
        std::clamp(std::lround(128.0 + 128.0 * frame.data[i] / scale), 0L, 255L));
  }
  return img;
}

std::vector<double> uniform_times(double t_lo, double t_hi, double fps) {
  if (!(fps > 0.0) || !(t_hi >= t_lo)) throw Error(ErrorKind::kInvalidArgument, "bad frame timing");
  std::vector<double> times;
  for (std::size_t k = 0;; ++k) {
    const double t = t_lo + static_cast<double>(k) / fps;
    if (t > t_hi + tolerance(t_hi)) break;
    times.push_back(std::min(t, t_hi));
  }
  return times;
}

void write_frames(const std::filesystem::path& dir, std::span<const Image8> frames,
                  std::span<const double> times) {
  std::filesystem::create_directories(dir);
  char name[32];
  for (std::size_t k = 0; k < frames.size(); ++k) {
    std::snprintf(name, sizeof name, "frame_%06zu.pgm", k);
    write_pgm(dir / name, frames[k]);
  }
  write_file_atomic(dir / "times.txt",
                    write_timestamps(std::vector<double>(times.begin(), times.end())));
}

}  // namespace eventinr
