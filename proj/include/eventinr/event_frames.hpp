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

#ifndef EVENTINR_EVENT_FRAMES_HPP_
#define EVENTINR_EVENT_FRAMES_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "eventinr/event_io.hpp"
#include "eventinr/grid.hpp"

namespace eventinr {

/// Half-open [start, end); the last interval of a stack is closed.
struct Interval {
  double start = 0.0;
  double end = 0.0;

  double duration() const { return end - start; }
  double midpoint() const { return 0.5 * (start + end); }
};

/// T event frames of accumulated log-intensity change. `counts` holds the
/// signed event count per pixel and interval; `frames` is C times that.
struct EventFrameStack {
  int width = 0;
  int height = 0;
  double threshold_c = 1.0;
  std::vector<Interval> intervals;
  std::vector<Grid<std::int32_t>> counts;
  std::vector<Frame> frames;
  // Events (all pixels) falling into each interval.
  std::vector<std::size_t> event_totals;

  std::size_t size() const { return intervals.size(); }
  double t_start() const { return intervals.front().start; }
  double t_end() const { return intervals.back().end; }
};

EventFrameStack stack_uniform(const EventStream& stream, double bin_duration, double threshold_c);

/// Splits every interval in two at the event-count median (midpoint of the
/// two middle timestamps), or at its centre when it holds fewer than two
/// events. `stream` must be the one `stack` was built from.
EventFrameStack refine_bins(const EventFrameStack& stack, const EventStream& stream);

/// Per-pixel signed event count summed over every frame.
Grid<std::int64_t> total_counts(const EventFrameStack& stack);

/// Writes frame_%06d.pgm with ΔL scaled symmetrically about mid-gray.
void dump_stack_pgm(const EventFrameStack& stack, const std::filesystem::path& dir);

}  // namespace eventinr

#endif  // EVENTINR_EVENT_FRAMES_HPP_
