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

#include "eventinr/event_frames.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "eventinr/error.hpp"
#include "eventinr/image_io.hpp"
#include "eventinr/internal/stacking.hpp"

namespace eventinr {
namespace internal {

EventFrameStack accumulate(const EventStream& stream, std::vector<Interval> intervals,
                           double threshold_c) {
  if (intervals.empty()) throw Error(ErrorKind::kEmptyStream, "no intervals");
  if (!(threshold_c > 0.0)) throw Error(ErrorKind::kInvalidArgument, "threshold C must be > 0");
  EventFrameStack stack;
  stack.width = stream.width;
  stack.height = stream.height;
  stack.threshold_c = threshold_c;
  const std::size_t T = intervals.size();
  stack.counts.assign(T, Grid<std::int32_t>(stream.height, stream.width, 0));
  stack.event_totals.assign(T, 0);

  std::size_t k = 0;
  const double lo = intervals.front().start;
  const double hi = intervals.back().end;
  for (const Event& e : stream.events) {
    if (e.t < lo || e.t > hi) continue;
    // Boundary events belong to the later interval.
    while (k + 1 < T && e.t >= intervals[k + 1].start) ++k;
    stack.counts[k](e.y, e.x) += e.polarity;
    ++stack.event_totals[k];
  }

  stack.frames.reserve(T);
  for (const auto& c : stack.counts) {
    Frame f(c.height, c.width);
    for (std::size_t i = 0; i < c.size(); ++i) f.data[i] = threshold_c * c.data[i];
    stack.frames.push_back(std::move(f));
  }
  stack.intervals = std::move(intervals);
  return stack;
}

std::vector<Interval> uniform_intervals(double t_start, double t_end, double bin_duration) {
  if (!(bin_duration > 0.0)) throw Error(ErrorKind::kInvalidArgument, "bin duration must be > 0");
  const double span = t_end - t_start;
  if (!(span > 0.0)) throw Error(ErrorKind::kEmptyStream, "stream has zero duration");
  // Tolerate representation error when span is an exact multiple of the bin.
  auto count = static_cast<std::size_t>(std::ceil(span / bin_duration - 1e-9));
  count = std::max<std::size_t>(count, 1);
  std::vector<Interval> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k].start = k == 0 ? t_start : out[k - 1].end;
    out[k].end = k + 1 == count ? t_end : t_start + static_cast<double>(k + 1) * bin_duration;
  }
  return out;
}

}  // namespace internal

EventFrameStack stack_uniform(const EventStream& stream, double bin_duration, double threshold_c) {
  if (stream.empty()) throw Error(ErrorKind::kEmptyStream, "cannot stack an empty event stream");
  return internal::accumulate(
      stream, internal::uniform_intervals(stream.t_start, stream.t_end, bin_duration), threshold_c);
}

EventFrameStack refine_bins(const EventFrameStack& stack, const EventStream& stream) {
  std::vector<Interval> children;
  children.reserve(2 * stack.size());
  auto it = stream.events.begin();
  const std::size_t T = stack.size();
  for (std::size_t k = 0; k < T; ++k) {
    const Interval& parent = stack.intervals[k];
    const bool last = k + 1 == T;
    it = std::lower_bound(it, stream.events.end(), parent.start,
                          [](const Event& e, double t) { return e.t < t; });
    auto stop = last ? std::upper_bound(it, stream.events.end(), parent.end,
                                        [](double t, const Event& e) { return t < e.t; })
                     : std::lower_bound(it, stream.events.end(), parent.end,
                                        [](const Event& e, double t) { return e.t < t; });
    const auto n = static_cast<std::size_t>(stop - it);
    double split = parent.midpoint();
    if (n >= 2) {
      const std::size_t lower = (n - 1) / 2;
      const double candidate = 0.5 * (it[lower].t + it[lower + 1].t);
      if (candidate > parent.start && candidate < parent.end) split = candidate;
    }
    children.push_back({parent.start, split});
    children.push_back({split, parent.end});
    it = stop;
  }
  return internal::accumulate(stream, std::move(children), stack.threshold_c);
}

Grid<std::int64_t> total_counts(const EventFrameStack& stack) {
  Grid<std::int64_t> total(stack.height, stack.width, 0);
  for (const auto& c : stack.counts) {
    for (std::size_t i = 0; i < c.size(); ++i) total.data[i] += c.data[i];
  }
  return total;
}

void dump_stack_pgm(const EventFrameStack& stack, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  double scale = 0.0;
  for (const auto& f : stack.frames) {
    for (double v : f.data) scale = std::max(scale, std::abs(v));
  }
  if (scale == 0.0) scale = 1.0;
  char name[32];
  for (std::size_t k = 0; k < stack.size(); ++k) {
    const Frame& f = stack.frames[k];
    Image8 img(f.height, f.width);
    for (std::size_t i = 0; i < f.size(); ++i) {
      img.data[i] = static_cast<std::uint8_t>(
          std::clamp(std::lround(127.5 + 127.5 * f.data[i] / scale), 0L, 255L));
    }
    std::snprintf(name, sizeof name, "frame_%06zu.pgm", k);
    write_pgm(dir / name, img);
  }
}

}  // namespace eventinr
