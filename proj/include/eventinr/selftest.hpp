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


#ifndef EVENTINR_SELFTEST_HPP_
#define EVENTINR_SELFTEST_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "eventinr/simulator.hpp"

namespace eventinr {

/// A rendered scene, its events and the ground-truth log video.
struct Fixture {
  IntensityVideo video;
  EventStream stream;
  std::vector<Frame> log_truth;
  double threshold_c = 0.25;
};

Fixture make_fixture(int size, double duration, double fps, double threshold_c,
                     double noise_rate, std::uint64_t seed = 1);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct SelftestOptions {
  bool quick = false;
  int threads = 1;
  std::filesystem::path work_dir;  // empty: a fresh directory under the system temp dir
  std::vector<int> only;           // empty: every criterion
  std::function<void(const CriterionResult&)> on_result;
};

/// Runs the closed-loop acceptance criteria in order. Exceptions inside a
/// criterion are reported as a failure of that criterion.
std::vector<CriterionResult> run_selftest(const SelftestOptions& options);

std::string format_result(const CriterionResult& result);

}  // namespace eventinr

#endif  // EVENTINR_SELFTEST_HPP_
