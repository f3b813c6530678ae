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

#include <cmath>

#include "eventinr/error.hpp"
#include "eventinr/event_frames.hpp"
#include "eventinr/simulator.hpp"

using namespace eventinr;

namespace {

// 1×1 video whose log intensity is given per frame.
IntensityVideo single_pixel(const std::vector<double>& times, const std::vector<double>& logs) {
  IntensityVideo v;
  v.width = 1;
  v.height = 1;
  v.times = times;
  for (double l : logs) v.frames.push_back(Frame(1, 1, std::exp(l)));
  return v;
}

}  // namespace

TEST_CASE("render_scene frame count and range") {
  const auto v = render_scene(SceneKind::kTranslatingGradient, 64, 64, 2.0, 240.0, 1);
  REQUIRE(v.frames.size() == 480);
  REQUIRE(v.times.size() == 480);
  CHECK(v.times[1] == doctest::Approx(1.0 / 240.0));
  for (const Frame& f : v.frames) {
    for (double x : f.data) {
      REQUIRE(x >= 0.05);
      REQUIRE(x <= 1.0);
    }
  }
}

TEST_CASE("render_scene is deterministic per seed") {
  for (auto kind : {SceneKind::kTranslatingGradient, SceneKind::kMovingChecker,
                    SceneKind::kRotatingBars}) {
    const auto a = render_scene(kind, 16, 12, 0.5, 30.0, 7);
    const auto b = render_scene(kind, 16, 12, 0.5, 30.0, 7);
    const auto c = render_scene(kind, 16, 12, 0.5, 30.0, 8);
    CHECK(a.frames == b.frames);
    CHECK(a.frames != c.frames);
  }
}

TEST_CASE("render_scene rejects degenerate arguments") {
  CHECK_THROWS_AS(render_scene(SceneKind::kTranslatingGradient, 64, 64, 0.0, 240.0, 1), Error);
  CHECK_THROWS_AS(render_scene(SceneKind::kTranslatingGradient, 0, 0, 1.0, 240.0, 1), Error);
  CHECK_THROWS_AS(render_scene(SceneKind::kTranslatingGradient, 64, 64, 1.0, -1.0, 1), Error);
}

TEST_CASE("scene names") {
  for (auto kind : {SceneKind::kTranslatingGradient, SceneKind::kMovingChecker,
                    SceneKind::kRotatingBars}) {
    CHECK(parse_scene_kind(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(parse_scene_kind("waves"), Error);
}

TEST_CASE("linear log ramp crosses every threshold level once") {
  SimConfig cfg;
  cfg.threshold_c = 0.25;
  cfg.log_eps = 0.0;
  const auto s = simulate_events(single_pixel({0.0, 1.0}, {0.0, 1.0}), cfg);
  REQUIRE(s.size() == 4);
  const double expected[] = {0.25, 0.5, 0.75, 1.0};
  for (int i = 0; i < 4; ++i) {
    CHECK(s.events[i].polarity == 1);
    CHECK(s.events[i].t == doctest::Approx(expected[i]).epsilon(1e-12));
  }
  CHECK(s.t_start == 0.0);
  CHECK(s.t_end == 1.0);
}

TEST_CASE("falling ramp gives negative events at interpolated times") {
  SimConfig cfg;
  cfg.threshold_c = 0.5;
  cfg.log_eps = 0.0;
  const auto s = simulate_events(single_pixel({0.0, 0.5, 1.0}, {0.0, -1.0, -1.5}), cfg);
  REQUIRE(s.size() == 3);
  CHECK(s.events[0].t == doctest::Approx(0.25));
  CHECK(s.events[1].t == doctest::Approx(0.5));
  CHECK(s.events[2].t == doctest::Approx(1.0));
  for (const Event& e : s.events) CHECK(e.polarity == -1);
}

TEST_CASE("constant video gives no events without noise") {
  IntensityVideo v;
  v.width = 4;
  v.height = 3;
  v.times = {0.0, 0.1, 0.2};
  v.frames.assign(3, Frame(3, 4, 0.4));
  CHECK(simulate_events(v, {}).empty());
}

TEST_CASE("noise adds events deterministically per seed") {
  IntensityVideo v;
  v.width = 8;
  v.height = 8;
  v.times = {0.0, 1.0};
  v.frames.assign(2, Frame(8, 8, 0.5));
  SimConfig cfg;
  cfg.noise_rate = 5.0;
  cfg.rng_seed = 3;
  const auto a = simulate_events(v, cfg);
  const auto b = simulate_events(v, cfg);
  CHECK(a.events == b.events);
  // 320 expected; Poisson spread is about 18.
  CHECK(a.size() > 240);
  CHECK(a.size() < 400);
  CHECK_NOTHROW(a.validate());
}

TEST_CASE("simulate_events rejects bad input") {
  auto v = single_pixel({0.0, 1.0}, {0.0, 1.0});
  SimConfig cfg;
  cfg.threshold_c = 0.0;
  CHECK_THROWS_AS(simulate_events(v, cfg), Error);
  v.frames[1].data[0] = 0.0;
  CHECK_THROWS_AS(simulate_events(v, {}), Error);
  auto w = single_pixel({0.0, 0.0}, {0.0, 1.0});
  CHECK_THROWS_AS(simulate_events(w, {}), Error);
  auto one = single_pixel({0.0}, {0.0});
  CHECK_THROWS_AS(simulate_events(one, {}), Error);
}

TEST_CASE("property: accumulated events recover the log change within C") {
  for (auto kind : {SceneKind::kTranslatingGradient, SceneKind::kMovingChecker,
                    SceneKind::kRotatingBars}) {
    for (double c : {0.1, 0.25, 0.6}) {
      const auto v = render_scene(kind, 16, 16, 1.0, 60.0, 11);
      SimConfig cfg;
      cfg.threshold_c = c;
      const auto s = simulate_events(v, cfg);
      CHECK_NOTHROW(s.validate());
      const auto stack = stack_uniform(s, 0.1, c);
      const auto total = total_counts(stack);
      const auto logs = log_frames(v, cfg.log_eps);
      for (std::size_t i = 0; i < total.size(); ++i) {
        const double change = logs.back().data[i] - logs.front().data[i];
        REQUIRE(std::abs(c * total.data[i] - change) < c);
      }
    }
  }
}

TEST_CASE("property: monotone brightening produces only positive events") {
  IntensityVideo v;
  v.width = 8;
  v.height = 8;
  for (int k = 0; k < 20; ++k) {
    v.times.push_back(k * 0.05);
    Frame f(8, 8);
    for (int i = 0; i < 64; ++i) f.data[i] = 0.05 + (0.01 * (i + 1)) * k;
    v.frames.push_back(f);
  }
  const auto s = simulate_events(v, {});
  CHECK(!s.empty());
  for (const Event& e : s.events) REQUIRE(e.polarity == 1);
}

TEST_CASE("log_frames adds eps before the log") {
  const auto v = single_pixel({0.0, 1.0}, {0.0, 1.0});
  const auto l = log_frames(v, 0.5);
  CHECK(l[0].data[0] == doctest::Approx(std::log(1.5)));
}
