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

// Text event streams: one `t x y p` record per line, optional
// `# width W height H [t_start A t_end B]` header. The optional span keeps
// quiet periods before the first and after the last event.

#ifndef EVENTINR_EVENT_IO_HPP_
#define EVENTINR_EVENT_IO_HPP_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eventinr {

struct Event {
  double t = 0.0;  // seconds
  int x = 0;       // column
  int y = 0;       // row
  int polarity = 1;  // -1 or +1

  bool operator==(const Event&) const = default;
};

struct EventStream {
  std::vector<Event> events;
  int width = 1;
  int height = 1;
  double t_start = 0.0;
  double t_end = 0.0;

  std::size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }
  double duration() const { return t_end - t_start; }

  /// Events with t in [lo, hi]; the result spans exactly [lo, hi].
  EventStream slice(double lo, double hi) const;

  /// Throws if any stream invariant is violated.
  void validate() const;
};

enum class PolarityEncoding { kSigned, kZeroOne };

PolarityEncoding parse_polarity_encoding(std::string_view name);

struct ParseOptions {
  PolarityEncoding encoding = PolarityEncoding::kSigned;
  std::optional<int> width;
  std::optional<int> height;
};

EventStream parse_events(std::string_view text, const ParseOptions& options = {});
EventStream parse_events(std::istream& in, const ParseOptions& options = {});
EventStream read_events_file(const std::filesystem::path& path,
                             const ParseOptions& options = {});

struct WriteOptions {
  PolarityEncoding encoding = PolarityEncoding::kSigned;
  bool header = false;
};

/// Times are written with nine decimals (nanosecond resolution).
std::string write_events(const EventStream& stream, const WriteOptions& options = {});
void write_events(std::ostream& out, const EventStream& stream,
                  const WriteOptions& options = {});
void write_events_file(const std::filesystem::path& path, const EventStream& stream,
                       const WriteOptions& options = {});

/// Strictly increasing timestamps, one per line.
std::vector<double> parse_timestamps(std::string_view text);
std::vector<double> read_timestamps_file(const std::filesystem::path& path);
std::string write_timestamps(const std::vector<double>& times);

}  // namespace eventinr

#endif  // EVENTINR_EVENT_IO_HPP_
