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

#include "eventinr/event_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "eventinr/error.hpp"

namespace eventinr {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

// Splits on ASCII whitespace into at most N tokens; returns the count found
// (N + 1 signals too many).
template <std::size_t N>
std::size_t tokenize(std::string_view line, std::array<std::string_view, N>& out) {
  std::size_t count = 0;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    if (i == line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (count == N) return N + 1;
    out[count++] = line.substr(i, j - i);
    i = j;
  }
  return count;
}

template <class T>
bool parse_number(std::string_view token, T& value) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  return ec == std::errc() && ptr == end;
}

bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), is_space);
}

struct Header {
  std::optional<int> width;
  std::optional<int> height;
  std::optional<double> t_start;
  std::optional<double> t_end;
};

// "# width W height H [t_start A t_end B]"; other comment lines are ignored.
void parse_header(std::string_view line, Header& header) {
  std::array<std::string_view, 10> tok{};
  line.remove_prefix(1);
  const std::size_t n = tokenize(line, tok);
  if (n != 4 && n != 8) return;
  int w = 0, h = 0;
  if (tok[0] != "width" || tok[2] != "height" || !parse_number(tok[1], w) ||
      !parse_number(tok[3], h)) {
    return;
  }
  header.width = w;
  header.height = h;
  double a = 0.0, b = 0.0;
  if (n == 8 && tok[4] == "t_start" && tok[6] == "t_end" && parse_number(tok[5], a) &&
      parse_number(tok[7], b)) {
    header.t_start = a;
    header.t_end = b;
  }
}

class LineParser {
 public:
  explicit LineParser(const ParseOptions& options) : options_(options) {}

  void feed(std::string_view line) {
    ++line_no_;
    if (blank(line)) return;
    std::size_t first = line.find_first_not_of(" \t\r\v\f");
    if (line[first] == '#') {
      parse_header(line.substr(first), header_);
      return;
    }
    std::array<std::string_view, 4> tok{};
    if (tokenize(line, tok) != 4) {
      throw parse_error(ErrorKind::kMalformedLine, line_no_, "expected 't x y p'");
    }
    Event ev;
    int raw_polarity = 0;
    if (!parse_number(tok[0], ev.t) || !std::isfinite(ev.t) || ev.t < 0.0) {
      throw parse_error(ErrorKind::kMalformedLine, line_no_, "bad timestamp '" + std::string(tok[0]) + "'");
    }
    if (!parse_number(tok[1], ev.x) || !parse_number(tok[2], ev.y) || ev.x < 0 || ev.y < 0) {
      throw parse_error(ErrorKind::kMalformedLine, line_no_, "bad pixel coordinate");
    }
    if (!parse_number(tok[3], raw_polarity)) {
      throw parse_error(ErrorKind::kMalformedLine, line_no_, "bad polarity '" + std::string(tok[3]) + "'");
    }
    ev.polarity = map_polarity(raw_polarity);
    if (!stream_.events.empty() && ev.t < stream_.events.back().t) {
      throw parse_error(ErrorKind::kUnsortedStream, line_no_, "timestamp decreases");
    }
    max_x_ = std::max(max_x_, ev.x);
    max_y_ = std::max(max_y_, ev.y);
    lines_.push_back(line_no_);
    stream_.events.push_back(ev);
  }

  EventStream finish() {
    // An empty stream without a header is 1x1 so it survives until stacking.
    int width = options_.width.value_or(header_.width.value_or(std::max(max_x_ + 1, 1)));
    int height = options_.height.value_or(header_.height.value_or(std::max(max_y_ + 1, 1)));
    if (width < 1 || height < 1) {
      throw Error(ErrorKind::kInvalidDimensions, "sensor size must be at least 1x1");
    }
    for (std::size_t i = 0; i < stream_.events.size(); ++i) {
      const Event& ev = stream_.events[i];
      if (ev.x >= width || ev.y >= height) {
        throw parse_error(ErrorKind::kInvalidDimensions, lines_[i], "pixel outside sensor");
      }
    }
    stream_.width = width;
    stream_.height = height;
    if (!stream_.events.empty()) {
      stream_.t_start = stream_.events.front().t;
      stream_.t_end = stream_.events.back().t;
    }
    // A recorded span may extend past the first and last event.
    if (header_.t_start && header_.t_end) {
      if (!(*header_.t_start <= stream_.t_start || stream_.events.empty()) ||
          !(*header_.t_end >= stream_.t_end) || !(*header_.t_end >= *header_.t_start)) {
        throw Error(ErrorKind::kTimeOutOfRange, "events fall outside the header's time span");
      }
      stream_.t_start = *header_.t_start;
      stream_.t_end = *header_.t_end;
    }
    return std::move(stream_);
  }

 private:
  int map_polarity(int raw) const {
    if (options_.encoding == PolarityEncoding::kZeroOne) {
      if (raw == 0) return -1;
      if (raw == 1) return 1;
    } else if (raw == -1 || raw == 1) {
      return raw;
    }
    throw parse_error(ErrorKind::kPolarityOutOfRange, line_no_,
                      "polarity " + std::to_string(raw));
  }

  ParseOptions options_;
  EventStream stream_;
  std::vector<std::size_t> lines_;
  std::size_t line_no_ = 0;
  int max_x_ = -1;
  int max_y_ = -1;
  Header header_;
};

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

EventStream EventStream::slice(double lo, double hi) const {
  EventStream out;
  out.width = width;
  out.height = height;
  out.t_start = lo;
  out.t_end = hi;
  auto first = std::lower_bound(events.begin(), events.end(), lo,
                                [](const Event& e, double t) { return e.t < t; });
  auto last = std::upper_bound(first, events.end(), hi,
                               [](double t, const Event& e) { return t < e.t; });
  out.events.assign(first, last);
  return out;
}

void EventStream::validate() const {
  if (width < 1 || height < 1) throw Error(ErrorKind::kInvalidDimensions, "sensor size < 1");
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (e.polarity != 1 && e.polarity != -1) {
      throw Error(ErrorKind::kPolarityOutOfRange, "event " + std::to_string(i));
    }
    if (e.x < 0 || e.y < 0 || e.x >= width || e.y >= height) {
      throw Error(ErrorKind::kInvalidDimensions, "event " + std::to_string(i) + " outside sensor");
    }
    if (i > 0 && e.t < events[i - 1].t) {
      throw Error(ErrorKind::kUnsortedStream, "event " + std::to_string(i));
    }
    if (e.t < t_start || e.t > t_end) {
      throw Error(ErrorKind::kTimeOutOfRange, "event " + std::to_string(i) + " outside stream span");
    }
  }
}

PolarityEncoding parse_polarity_encoding(std::string_view name) {
  if (name == "signed") return PolarityEncoding::kSigned;
  if (name == "zero_one") return PolarityEncoding::kZeroOne;
  throw Error(ErrorKind::kInvalidArgument, "unknown polarity encoding '" + std::string(name) + "'");
}

EventStream parse_events(std::string_view text, const ParseOptions& options) {
  LineParser parser(options);
  while (!text.empty()) {
    std::size_t nl = text.find('\n');
    parser.feed(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return parser.finish();
}

EventStream parse_events(std::istream& in, const ParseOptions& options) {
  LineParser parser(options);
  std::string line;
  while (std::getline(in, line)) parser.feed(line);
  return parser.finish();
}

EventStream read_events_file(const std::filesystem::path& path, const ParseOptions& options) {
  return parse_events(read_all(path), options);
}

void write_events(std::ostream& out, const EventStream& stream, const WriteOptions& options) {
  if (options.header) {
    char head[128];
    const int n = std::snprintf(head, sizeof head, "# width %d height %d t_start %.9f t_end %.9f\n",
                                stream.width, stream.height, stream.t_start, stream.t_end);
    out.write(head, n);
  }
  char buf[96];
  for (const Event& e : stream.events) {
    int p = e.polarity;
    if (options.encoding == PolarityEncoding::kZeroOne) p = e.polarity > 0 ? 1 : 0;
    int n = std::snprintf(buf, sizeof buf, "%.9f %d %d %d\n", e.t, e.x, e.y, p);
    out.write(buf, n);
  }
}

std::string write_events(const EventStream& stream, const WriteOptions& options) {
  std::ostringstream out;
  write_events(out, stream, options);
  return out.str();
}

void write_events_file(const std::filesystem::path& path, const EventStream& stream,
                       const WriteOptions& options) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  write_events(out, stream, options);
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

std::vector<double> parse_timestamps(std::string_view text) {
  std::vector<double> times;
  std::size_t line_no = 0;
  while (!text.empty()) {
    std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    ++line_no;
    if (!blank(line) && line[line.find_first_not_of(" \t\r\v\f")] != '#') {
      std::array<std::string_view, 1> tok{};
      double t = 0.0;
      if (tokenize(line, tok) != 1 || !parse_number(tok[0], t) || !std::isfinite(t)) {
        throw parse_error(ErrorKind::kMalformedLine, line_no, "expected one timestamp");
      }
      if (!times.empty() && t <= times.back()) {
        throw parse_error(ErrorKind::kUnsortedStream, line_no, "timestamps must strictly increase");
      }
      times.push_back(t);
    }
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return times;
}

std::vector<double> read_timestamps_file(const std::filesystem::path& path) {
  return parse_timestamps(read_all(path));
}

std::string write_timestamps(const std::vector<double>& times) {
  std::string out;
  char buf[64];
  for (double t : times) {
    int n = std::snprintf(buf, sizeof buf, "%.9f\n", t);
    out.append(buf, n);
  }
  return out;
}

}  // namespace eventinr
