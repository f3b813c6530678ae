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


#ifndef EVENTINR_TESTS_SUPPORT_HPP_
#define EVENTINR_TESTS_SUPPORT_HPP_

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "eventinr/event_io.hpp"

namespace eventinr::test {

// Scratch directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("eventinr_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Sorted random events on a w×h sensor over [0, duration].
inline EventStream random_stream(int w, int h, double duration, std::size_t n,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(0.0, duration);
  std::uniform_int_distribution<int> ux(0, w - 1), uy(0, h - 1), up(0, 1);
  EventStream s;
  s.width = w;
  s.height = h;
  s.t_start = 0.0;
  s.t_end = duration;
  for (std::size_t i = 0; i < n; ++i) s.events.push_back({ut(rng), ux(rng), uy(rng), up(rng) ? 1 : -1});
  std::sort(s.events.begin(), s.events.end(), [](const Event& a, const Event& b) { return a.t < b.t; });
  return s;
}

inline double rel_err(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace eventinr::test

#endif  // EVENTINR_TESTS_SUPPORT_HPP_
