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

#ifndef EVENTINR_INTERNAL_STACKING_HPP_
#define EVENTINR_INTERNAL_STACKING_HPP_

#include <vector>

#include "eventinr/event_frames.hpp"

namespace eventinr::internal {

// Accumulates `stream` into the given tiling. Unlike stack_uniform this
// accepts streams without events (quiet partitions).
EventFrameStack accumulate(const EventStream& stream, std::vector<Interval> intervals,
                           double threshold_c);

std::vector<Interval> uniform_intervals(double t_start, double t_end, double bin_duration);

}  // namespace eventinr::internal

#endif  // EVENTINR_INTERNAL_STACKING_HPP_
