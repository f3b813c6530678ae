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

#include <fstream>
#include <sstream>

#include "eventinr/error.hpp"
#include "eventinr/event_frames.hpp"
#include "eventinr/event_io.hpp"
#include "support.hpp"

using namespace eventinr;

namespace {

ErrorKind kind_of(const std::string& text, const ParseOptions& opts = {}) {
  try {
    parse_events(text, opts);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::kIo;
}

std::size_t line_of(const std::string& text) {
  try {
    parse_events(text);
  } catch (const Error& e) {
    REQUIRE(e.line.has_value());
    return *e.line;
  }
  FAIL("no error thrown");
  return 0;
}

}  // namespace

TEST_CASE("zero_one encoding maps 1 to +1 and 0 to -1") {
  ParseOptions opts;
  opts.encoding = PolarityEncoding::kZeroOne;
  auto s = parse_events("0.003811000 57 38 1\n", opts);
  REQUIRE(s.size() == 1);
  CHECK(s.events[0] == Event{0.003811, 57, 38, 1});

  s = parse_events("0.5 3 4 0", opts);
  REQUIRE(s.size() == 1);
  CHECK(s.events[0] == Event{0.5, 3, 4, -1});
}

TEST_CASE("empty input gives an empty stream that cannot be stacked") {
  auto s = parse_events("");
  CHECK(s.empty());
  CHECK_THROWS_AS(stack_uniform(s, 0.1, 1.0), Error);
  s = parse_events("\n  \n# just a comment\n");
  CHECK(s.empty());
}

TEST_CASE("signed events are written with nine decimals") {
  EventStream s;
  s.t_end = 1.0;
  s.events.push_back({0.25, 0, 0, -1});
  CHECK(write_events(s) == "0.250000000 0 0 -1\n");
}

TEST_CASE("a stream of three events becomes three lines") {
  EventStream s;
  s.width = 4;
  s.height = 4;
  s.t_end = 1.0;
  s.events = {{0.1, 0, 0, 1}, {0.2, 1, 2, -1}, {0.3, 3, 3, 1}};
  const std::string text = write_events(s);
  std::istringstream in(text);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) lines += line.empty() ? 0 : 1;
  CHECK(lines == 3);
}

TEST_CASE("header sets the sensor size") {
  auto s = parse_events("# width 10 height 7\n0.1 2 3 1\n");
  CHECK(s.width == 10);
  CHECK(s.height == 7);
  // Without a header the size is inferred from the largest coordinates.
  s = parse_events("0.1 2 3 1\n0.2 5 1 -1\n");
  CHECK(s.width == 6);
  CHECK(s.height == 4);
  // Explicit options override both.
  ParseOptions opts;
  opts.width = 32;
  opts.height = 16;
  s = parse_events("# width 10 height 7\n0.1 2 3 1\n", opts);
  CHECK(s.width == 32);
  CHECK(s.height == 16);
}

TEST_CASE("header span extends the stream past its events") {
  auto s = parse_events("# width 4 height 4 t_start 0.000000000 t_end 2.500000000\n0.5 1 1 1\n");
  CHECK(s.t_start == 0.0);
  CHECK(s.t_end == 2.5);
  s = parse_events("0.5 1 1 1\n0.75 1 1 1\n");
  CHECK(s.t_start == 0.5);
  CHECK(s.t_end == 0.75);
  CHECK_THROWS_AS(parse_events("# width 4 height 4 t_start 0.6 t_end 2.5\n0.5 1 1 1\n"), Error);
}

TEST_CASE("malformed input reports the error kind and line") {
  CHECK(kind_of("0.1 0 0 1\nfoo bar\n") == ErrorKind::kMalformedLine);
  CHECK(line_of("0.1 0 0 1\nfoo bar\n") == 2);
  CHECK(kind_of("0.1 0 0\n") == ErrorKind::kMalformedLine);
  CHECK(kind_of("0.1 0 0 1 5\n") == ErrorKind::kMalformedLine);
  CHECK(kind_of("-0.1 0 0 1\n") == ErrorKind::kMalformedLine);
  CHECK(kind_of("nan 0 0 1\n") == ErrorKind::kMalformedLine);
  CHECK(kind_of("0.1 -1 0 1\n") == ErrorKind::kMalformedLine);
  CHECK(kind_of("0.1 0 0 2\n") == ErrorKind::kPolarityOutOfRange);
  CHECK(kind_of("0.1 0 0 0\n") == ErrorKind::kPolarityOutOfRange);
  CHECK(line_of("# c\n\n0.2 0 0 1\n0.1 0 0 1\n") == 4);
  CHECK(kind_of("0.2 0 0 1\n0.1 0 0 1\n") == ErrorKind::kUnsortedStream);
  CHECK(kind_of("# width 4 height 4\n0.1 4 0 1\n") == ErrorKind::kInvalidDimensions);

  ParseOptions zo;
  zo.encoding = PolarityEncoding::kZeroOne;
  CHECK(kind_of("0.1 0 0 -1\n", zo) == ErrorKind::kPolarityOutOfRange);
}

TEST_CASE("equal timestamps are allowed") {
  auto s = parse_events("0.1 0 0 1\n0.1 1 0 -1\n");
  CHECK(s.size() == 2);
}

TEST_CASE("property: write then parse is the identity") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EventStream s = test::random_stream(1 + seed % 17, 1 + seed % 5, 3.0, 50 + seed * 13, seed);
    // Round to the written resolution first.
    for (Event& e : s.events) e.t = std::round(e.t * 1e9) / 1e9;
    for (auto enc : {PolarityEncoding::kSigned, PolarityEncoding::kZeroOne}) {
      WriteOptions w;
      w.encoding = enc;
      w.header = true;
      ParseOptions p;
      p.encoding = enc;
      const EventStream back = parse_events(write_events(s, w), p);
      REQUIRE(back.size() == s.size());
      CHECK(back.events == s.events);
      CHECK(back.width == s.width);
      CHECK(back.height == s.height);
      CHECK(back.t_start == s.t_start);
      CHECK(back.t_end == s.t_end);
    }
  }
}

TEST_CASE("file round trip") {
  test::TempDir dir("io");
  EventStream s = test::random_stream(8, 8, 1.0, 100, 3);
  for (Event& e : s.events) e.t = std::round(e.t * 1e9) / 1e9;
  write_events_file(dir.path() / "ev.txt", s, {PolarityEncoding::kSigned, true});
  const EventStream back = read_events_file(dir.path() / "ev.txt");
  CHECK(back.events == s.events);
  CHECK_THROWS_AS(read_events_file(dir.path() / "missing.txt"), Error);
}

TEST_CASE("slice keeps events in the closed range and spans it exactly") {
  EventStream s;
  s.width = 2;
  s.height = 1;
  s.t_end = 1.0;
  s.events = {{0.1, 0, 0, 1}, {0.25, 1, 0, 1}, {0.5, 0, 0, -1}, {0.75, 1, 0, 1}};
  const EventStream sl = s.slice(0.25, 0.5);
  CHECK(sl.size() == 2);
  CHECK(sl.t_start == 0.25);
  CHECK(sl.t_end == 0.5);
  CHECK_NOTHROW(sl.validate());
}

TEST_CASE("validate rejects broken streams") {
  EventStream s;
  s.width = 2;
  s.height = 2;
  s.t_end = 1.0;
  s.events = {{0.5, 0, 0, 1}, {0.4, 0, 0, 1}};
  CHECK_THROWS_AS(s.validate(), Error);
  s.events = {{0.5, 2, 0, 1}};
  CHECK_THROWS_AS(s.validate(), Error);
  s.events = {{1.5, 0, 0, 1}};
  CHECK_THROWS_AS(s.validate(), Error);
  s.events = {{0.5, 0, 0, 0}};
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("timestamps parse and must increase") {
  const auto t = parse_timestamps("0.0\n0.5\n\n1.25\n");
  CHECK(t == std::vector<double>{0.0, 0.5, 1.25});
  CHECK(parse_timestamps(write_timestamps(t)) == t);
  CHECK_THROWS_AS(parse_timestamps("0.5\n0.5\n"), Error);
  CHECK_THROWS_AS(parse_timestamps("abc\n"), Error);
}

TEST_CASE("polarity encoding names") {
  CHECK(parse_polarity_encoding("signed") == PolarityEncoding::kSigned);
  CHECK(parse_polarity_encoding("zero_one") == PolarityEncoding::kZeroOne);
  CHECK_THROWS_AS(parse_polarity_encoding("binary"), Error);
}
