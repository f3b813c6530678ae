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


#include <doctest.h>

#include "eventinr/error.hpp"
#include "eventinr/event_frames.hpp"
#include "support.hpp"

using namespace eventinr;

namespace {

EventStream three_events() {
  EventStream s;
  s.width = 2;
  s.height = 1;
  s.t_start = 0.0;
  s.t_end = 1.0;
  s.events = {{0.1, 0, 0, 1}, {0.2, 0, 0, 1}, {0.9, 0, 0, -1}};
  return s;
}

}  // namespace

TEST_CASE("stack sums polarities per bin") {
  const auto stack = stack_uniform(three_events(), 0.5, 1.0);
  REQUIRE(stack.size() == 2);
  CHECK(stack.frames[0](0, 0) == 2.0);
  CHECK(stack.frames[1](0, 0) == -1.0);
  // Pixel with no events.
  CHECK(stack.frames[0](0, 1) == 0.0);
  CHECK(stack.frames[1](0, 1) == 0.0);
  CHECK(stack.intervals[0].start == 0.0);
  CHECK(stack.intervals[1].end == 1.0);
  CHECK(stack.event_totals == std::vector<std::size_t>{2, 1});
}

TEST_CASE("stack is linear in C") {
  const auto stack = stack_uniform(three_events(), 0.5, 0.25);
  CHECK(stack.frames[0](0, 0) == 0.5);
  CHECK(stack.frames[1](0, 0) == -0.25);
}

TEST_CASE("empty stream cannot be stacked") {
  EventStream s;
  s.t_end = 1.0;
  CHECK_THROWS_AS(stack_uniform(s, 0.5, 1.0), Error);
}

TEST_CASE("bad bin arguments are rejected") {
  CHECK_THROWS_AS(stack_uniform(three_events(), 0.0, 1.0), Error);
  CHECK_THROWS_AS(stack_uniform(three_events(), 0.5, 0.0), Error);
}

TEST_CASE("last bin is shortened and closed") {
  EventStream s = three_events();
  s.events.push_back({1.0, 1, 0, 1});
  const auto stack = stack_uniform(s, 0.3, 1.0);
  REQUIRE(stack.size() == 4);
  CHECK(stack.intervals.back().end == 1.0);
  CHECK(stack.intervals.back().duration() == doctest::Approx(0.1));
  CHECK(stack.frames.back()(0, 1) == 1.0);
}

TEST_CASE("refinement splits at the event median") {
  EventStream s;
  s.width = 1;
  s.height = 1;
  s.t_end = 1.0;
  s.events = {{0.1, 0, 0, 1}, {0.2, 0, 0, 1}, {0.3, 0, 0, 1}, {0.4, 0, 0, 1}};
  const auto parent = stack_uniform(s, 1.0, 1.0);
  REQUIRE(parent.size() == 1);
  const auto child = refine_bins(parent, s);
  REQUIRE(child.size() == 2);
  CHECK(child.intervals[0].end == doctest::Approx(0.25));
  CHECK(child.intervals[1].start == child.intervals[0].end);
  CHECK(child.event_totals == std::vector<std::size_t>{2, 2});
}

TEST_CASE("refinement of an empty interval splits at its midpoint") {
  EventStream s;
  s.width = 1;
  s.height = 1;
  s.t_end = 1.0;
  s.events = {{0.9, 0, 0, 1}};
  const auto parent = stack_uniform(s, 0.5, 1.0);
  const auto child = refine_bins(parent, s);
  REQUIRE(child.size() == 4);
  CHECK(child.intervals[0].end == 0.25);
  CHECK(child.frames[0](0, 0) == 0.0);
  CHECK(child.frames[1](0, 0) == 0.0);
}

TEST_CASE("property: refinement conserves per-pixel totals and event counts") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const EventStream s = test::random_stream(5, 3, 2.0, 20 + 40 * seed, seed);
    auto stack = stack_uniform(s, 0.125 * (1 + seed % 4), 0.2);
    const auto before = total_counts(stack);
    std::size_t n_before = 0;
    for (auto n : stack.event_totals) n_before += n;
    CHECK(n_before == s.size());
    for (int r = 0; r < 3; ++r) {
      const auto next = refine_bins(stack, s);
      CHECK(next.size() == 2 * stack.size());
      CHECK(total_counts(next) == before);
      for (std::size_t k = 0; k < next.size(); ++k) {
        CHECK(next.intervals[k].duration() > 0.0);
        if (k > 0) CHECK(next.intervals[k].start == next.intervals[k - 1].end);
      }
      stack = next;
    }
  }
}

TEST_CASE("property: frames equal C times counts") {
  const EventStream s = test::random_stream(4, 4, 1.0, 300, 9);
  for (double c : {0.1, 0.25, 1.0, 3.0}) {
    const auto stack = stack_uniform(s, 0.1, c);
    for (std::size_t k = 0; k < stack.size(); ++k) {
      for (std::size_t i = 0; i < stack.frames[k].size(); ++i) {
        CHECK(stack.frames[k].data[i] == c * stack.counts[k].data[i]);
      }
    }
  }
}
