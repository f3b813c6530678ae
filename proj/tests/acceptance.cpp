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


// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.
//
//   acceptance [--quick] [--threads N] [--only ID]... [--work-dir DIR]

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "eventinr/selftest.hpp"

int main(int argc, char** argv) {
  eventinr::SelftestOptions options;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    auto value = [&]() -> const char* {
      if (i + 1 >= argc) {
        std::fprintf(stderr, "%s needs a value\n", arg.c_str());
        std::exit(2);
      }
      return argv[++i];
    };
    if (arg == "--quick") {
      options.quick = true;
    } else if (arg == "--threads") {
      options.threads = std::atoi(value());
    } else if (arg == "--only") {
      options.only.push_back(std::atoi(value()));
    } else if (arg == "--work-dir") {
      options.work_dir = value();
    } else {
      std::fprintf(stderr, "unknown argument %s\n", arg.c_str());
      return 2;
    }
  }
  options.on_result = [](const eventinr::CriterionResult& r) {
    std::printf("%s\n", eventinr::format_result(r).c_str());
    std::fflush(stdout);
  };
  int failed = 0;
  for (const auto& r : eventinr::run_selftest(options)) failed += r.pass ? 0 : 1;
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
