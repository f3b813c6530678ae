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

#include "eventinr/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>

#include "eventinr/error.hpp"
#include "eventinr/internal/parallel.hpp"
#include "eventinr/internal/stacking.hpp"

namespace eventinr {

using Eigen::Index;
using Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Configuration

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::kInvalidArgument, what); };
  if (!(lambda_reg >= 0.0)) fail("lambda_reg must be >= 0");
  if (!(threshold_c > 0.0)) fail("threshold_c must be > 0");
  if (!(initial_bin > 0.0)) fail("initial_bin must be > 0");
  if (initial_split < 1) fail("initial_split must be >= 1");
  if (stages < 1) fail("stages must be >= 1");
  if (total_iters < 1) fail("total_iters must be >= 1");
  if (refine_at_iters.size() != static_cast<std::size_t>(stages - 1)) {
    fail("refine_at_iters must list stages - 1 iterations");
  }
  for (std::size_t i = 0; i < refine_at_iters.size(); ++i) {
    if (refine_at_iters[i] < 0 || refine_at_iters[i] >= total_iters) {
      fail("refine_at_iters entries must lie in [0, total_iters)");
    }
    if (i > 0 && refine_at_iters[i] <= refine_at_iters[i - 1]) {
      fail("refine_at_iters must be strictly increasing");
    }
  }
  if (!(lr > 0.0) || !(lr_decay > 0.0) || lr_decay_every < 1) fail("invalid learning-rate schedule");
  if (!(overlap >= 0.0) || !(partition_tau > overlap)) fail("need partition_tau > overlap >= 0");
  if (batch_frames < 0) fail("batch_frames must be >= 0");
  if (hidden_layers < 1 || hidden_width < 1) fail("need at least one hidden layer");
  if (!(omega0 > 0.0)) fail("omega0 must be > 0");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_value(std::string_view v, std::size_t line) {
  T out{};
  if (!v.empty() && v.front() == '+') v.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw parse_error(ErrorKind::kMalformedLine, line, "bad value '" + std::string(v) + "'");
  }
  return out;
}

// Accepts plain reals and fractions such as 1/32.
double parse_real(std::string_view v, std::size_t line) {
  const auto slash = v.find('/');
  if (slash == std::string_view::npos) return parse_value<double>(v, line);
  const double den = parse_value<double>(trim(v.substr(slash + 1)), line);
  if (den == 0.0) throw parse_error(ErrorKind::kMalformedLine, line, "division by zero");
  return parse_value<double>(trim(v.substr(0, slash)), line) / den;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

TrainConfig parse_train_config(std::string_view text, TrainConfig cfg) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw parse_error(ErrorKind::kMalformedLine, line_no, "expected key = value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key == "lambda_reg" || key == "lambda") {
      cfg.lambda_reg = parse_real(value, line_no);
    } else if (key == "threshold_c") {
      cfg.threshold_c = parse_real(value, line_no);
    } else if (key == "initial_bin") {
      cfg.initial_bin = parse_real(value, line_no);
    } else if (key == "initial_split") {
      cfg.initial_split = parse_value<int>(value, line_no);
    } else if (key == "stages") {
      cfg.stages = parse_value<int>(value, line_no);
    } else if (key == "refine_at_iters") {
      cfg.refine_at_iters.clear();
      if (value.size() >= 2 && value.front() == '[' && value.back() == ']') {
        value = value.substr(1, value.size() - 2);
      }
      while (!trim(value).empty()) {
        const auto comma = value.find(',');
        cfg.refine_at_iters.push_back(parse_value<int>(trim(value.substr(0, comma)), line_no));
        if (comma == std::string_view::npos) break;
        value = value.substr(comma + 1);
      }
    } else if (key == "total_iters") {
      cfg.total_iters = parse_value<int>(value, line_no);
    } else if (key == "lr") {
      cfg.lr = parse_real(value, line_no);
    } else if (key == "lr_decay") {
      cfg.lr_decay = parse_real(value, line_no);
    } else if (key == "lr_decay_every") {
      cfg.lr_decay_every = parse_value<int>(value, line_no);
    } else if (key == "partition_tau") {
      cfg.partition_tau = parse_real(value, line_no);
    } else if (key == "overlap") {
      cfg.overlap = parse_real(value, line_no);
    } else if (key == "batch_frames") {
      cfg.batch_frames = value == "all" ? 0 : parse_value<int>(value, line_no);
    } else if (key == "seed") {
      cfg.seed = parse_value<std::uint64_t>(value, line_no);
    } else if (key == "hidden_layers") {
      cfg.hidden_layers = parse_value<int>(value, line_no);
    } else if (key == "hidden_width") {
      cfg.hidden_width = parse_value<int>(value, line_no);
    } else if (key == "omega0") {
      cfg.omega0 = parse_real(value, line_no);
    } else {
      throw parse_error(ErrorKind::kMalformedLine, line_no, "unknown key '" + std::string(key) + "'");
    }
  }
  return cfg;
}

TrainConfig read_train_config(const std::filesystem::path& path, TrainConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_train_config(text, std::move(base));
}

std::string format_train_config(const TrainConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "lambda_reg = " << cfg.lambda_reg << '\n'
      << "threshold_c = " << cfg.threshold_c << '\n'
      << "initial_bin = " << cfg.initial_bin << '\n'
      << "initial_split = " << cfg.initial_split << '\n'
      << "stages = " << cfg.stages << '\n'
      << "refine_at_iters = ";
  for (std::size_t i = 0; i < cfg.refine_at_iters.size(); ++i) {
    out << (i ? ", " : "") << cfg.refine_at_iters[i];
  }
  out << '\n'
      << "total_iters = " << cfg.total_iters << '\n'
      << "lr = " << cfg.lr << '\n'
      << "lr_decay = " << cfg.lr_decay << '\n'
      << "lr_decay_every = " << cfg.lr_decay_every << '\n'
      << "partition_tau = " << cfg.partition_tau << '\n'
      << "overlap = " << cfg.overlap << '\n'
      << "batch_frames = ";
  if (cfg.batch_frames == 0) {
    out << "all";
  } else {
    out << cfg.batch_frames;
  }
  out << '\n'
      << "seed = " << cfg.seed << '\n'
      << "hidden_layers = " << cfg.hidden_layers << '\n'
      << "hidden_width = " << cfg.hidden_width << '\n'
      << "omega0 = " << cfg.omega0 << '\n';
  return out.str();
}

TrainConfig ablation_config(TrainConfig cfg, Ablation variant) {
  const bool reg = variant == Ablation::kBaseReg || variant == Ablation::kFull;
  const bool c2f = variant == Ablation::kBaseC2F || variant == Ablation::kFull;
  if (!reg) cfg.lambda_reg = 0.0;
  if (!c2f) {
    cfg.initial_split *= 1 << (cfg.stages - 1);
    cfg.stages = 1;
    cfg.refine_at_iters.clear();
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Losses

TemporalLoss temporal_loss(const ForwardPass& pass, double slope, const EventFrameStack& stack,
                           std::span<const std::size_t> indices) {
  const auto B = static_cast<Index>(indices.size());
  if (B == 0 || static_cast<std::size_t>(B) != pass.batch) {
    throw Error(ErrorKind::kShapeMismatch, "forward pass does not match frame indices");
  }
  const Index P = pass.output.rows();
  if (static_cast<std::size_t>(P) != static_cast<std::size_t>(stack.width) * stack.height) {
    throw Error(ErrorKind::kShapeMismatch, "model output does not match stack frame size");
  }
  TemporalLoss out;
  out.dtangent.resize(P, B);
  const double norm = 1.0 / (static_cast<double>(P) * static_cast<double>(B));
  double sum = 0.0;
  for (Index j = 0; j < B; ++j) {
    const std::size_t k = indices[static_cast<std::size_t>(j)];
    if (k >= stack.size()) throw Error(ErrorKind::kIndexOutOfRange, "frame index " + std::to_string(k));
    // dL/dt (seconds) times interval length.
    const double scale = slope * stack.intervals[k].duration();
    const double* target = stack.frames[k].data.data();
    const double* tangent = pass.output.col(B + j).data();
    double* seed = out.dtangent.col(j).data();
    for (Index i = 0; i < P; ++i) {
      const double r = target[i] - tangent[i] * scale;
      sum += r * r;
      seed[i] = -2.0 * r * scale * norm;
    }
  }
  out.loss = sum * norm;
  return out;
}

TemporalLoss temporal_loss(const SirenModel& model, const EventFrameStack& stack,
                           std::span<const std::size_t> indices) {
  std::vector<double> t(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] >= stack.size()) {
      throw Error(ErrorKind::kIndexOutOfRange, "frame index " + std::to_string(indices[j]));
    }
    t[j] = model.domain().normalize(stack.intervals[indices[j]].midpoint());
  }
  return temporal_loss(model.forward_batch(t), model.domain().slope(), stack, indices);
}

namespace {

// Adds scale * d(reg)/d(frame) into grad (when non-null) and returns reg.
double spatial_reg_raw(const double* f, double* grad, int height, int width, double scale) {
  const double nx = static_cast<double>(height) * (width - 1);
  const double ny = static_cast<double>(height - 1) * width;
  double sx = 0.0;
  double sy = 0.0;
  for (int y = 0; y < height; ++y) {
    const double* row = f + static_cast<std::size_t>(y) * width;
    double* grow = grad ? grad + static_cast<std::size_t>(y) * width : nullptr;
    for (int x = 0; x + 1 < width; ++x) {
      const double d = row[x + 1] - row[x];
      sx += d * d;
      if (grow) {
        const double g = 2.0 * d / nx * scale;
        grow[x + 1] += g;
        grow[x] -= g;
      }
    }
  }
  for (int y = 0; y + 1 < height; ++y) {
    const double* row = f + static_cast<std::size_t>(y) * width;
    const double* next = row + width;
    double* grow = grad ? grad + static_cast<std::size_t>(y) * width : nullptr;
    for (int x = 0; x < width; ++x) {
      const double d = next[x] - row[x];
      sy += d * d;
      if (grow) {
        const double g = 2.0 * d / ny * scale;
        grow[x + width] += g;
        grow[x] -= g;
      }
    }
  }
  return sx / nx + sy / ny;
}

}  // namespace

SpatialReg spatial_reg_loss(const Frame& frame) {
  if (frame.height < 2 || frame.width < 2) {
    throw Error(ErrorKind::kDegenerateFrame, "spatial regularization needs at least 2x2 pixels");
  }
  SpatialReg out;
  out.grad = Frame(frame.height, frame.width, 0.0);
  out.loss = spatial_reg_raw(frame.data.data(), out.grad.data.data(), frame.height, frame.width, 1.0);
  return out;
}

Objective evaluate_objective(const SirenModel& model, const EventFrameStack& stack,
                             std::span<const std::size_t> indices, double lambda_reg) {
  std::vector<double> t(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] >= stack.size()) {
      throw Error(ErrorKind::kIndexOutOfRange, "frame index " + std::to_string(indices[j]));
    }
    t[j] = model.domain().normalize(stack.intervals[indices[j]].midpoint());
  }
  const ForwardPass pass = model.forward_batch(t);
  TemporalLoss temporal = temporal_loss(pass, model.domain().slope(), stack, indices);

  const auto B = static_cast<Index>(indices.size());
  const Index P = pass.output.rows();
  MatrixXd dframe = MatrixXd::Zero(P, B);
  double reg = 0.0;
  if (lambda_reg > 0.0) {
    if (model.height() < 2 || model.width() < 2) {
      throw Error(ErrorKind::kDegenerateFrame, "spatial regularization needs at least 2x2 pixels");
    }
    const double scale = lambda_reg / static_cast<double>(B);
    for (Index j = 0; j < B; ++j) {
      reg += spatial_reg_raw(pass.output.col(j).data(), dframe.col(j).data(), model.height(),
                             model.width(), scale);
    }
    reg /= static_cast<double>(B);
  }

  Objective out;
  out.loss.temporal = temporal.loss;
  out.loss.reg = reg;
  out.loss.total = temporal.loss + lambda_reg * reg;
  out.grads = model.backward(pass, dframe, &temporal.dtangent);
  return out;
}

// ---------------------------------------------------------------------------
// Partitions and training

std::vector<Partition> make_partitions(const EventStream& stream, const TrainConfig& cfg) {
  cfg.validate();
  const double duration = stream.duration();
  if (!(duration > 0.0)) throw Error(ErrorKind::kEmptyStream, "event stream has zero duration");
  if (stream.empty()) throw Error(ErrorKind::kEmptyStream, "event stream has no events");
  const auto n = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(duration / cfg.partition_tau - 1e-9)));
  const double half = 0.5 * cfg.overlap;

  std::vector<Partition> parts(n);
  for (std::size_t i = 0; i < n; ++i) {
    Partition& p = parts[i];
    p.index = static_cast<int>(i);
    p.core_lo = stream.t_start + static_cast<double>(i) * cfg.partition_tau;
    p.core_hi = i + 1 == n ? stream.t_end : stream.t_start + static_cast<double>(i + 1) * cfg.partition_tau;
    p.span_lo = i == 0 ? p.core_lo : std::max(stream.t_start, p.core_lo - half);
    p.span_hi = i + 1 == n ? p.core_hi : std::min(stream.t_end, p.core_hi + half);
    p.events = stream.slice(p.span_lo, p.span_hi);
    std::vector<Interval> bins;
    for (const Interval& b : internal::uniform_intervals(p.span_lo, p.span_hi, cfg.initial_bin)) {
      for (int k = 0; k < cfg.initial_split; ++k) {
        const double lo = b.start + b.duration() * k / cfg.initial_split;
        const double hi = k + 1 == cfg.initial_split ? b.end : b.start + b.duration() * (k + 1) / cfg.initial_split;
        bins.push_back({lo, hi});
      }
    }
    p.stack = internal::accumulate(p.events, bins, cfg.threshold_c);
    p.model = SirenModel::for_frames(stream.height, stream.width, cfg.hidden_layers, cfg.hidden_width,
                                     cfg.omega0, splitmix64(cfg.seed ^ (0x51ed27ULL * (i + 1))),
                                     TimeDomain{p.span_lo, p.span_hi});
  }
  return parts;
}

TrainReport train_partition(Partition& partition, const TrainConfig& cfg) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();
  TrainReport report;
  report.partition = partition.index;
  report.history.reserve(static_cast<std::size_t>(cfg.total_iters));

  AdamConfig adam_cfg;
  adam_cfg.lr = cfg.lr;
  adam_cfg.decay = cfg.lr_decay;
  adam_cfg.decay_every = cfg.lr_decay_every;
  AdamState adam(partition.model.params(), adam_cfg);
  std::mt19937_64 rng(splitmix64(cfg.seed + 0x9e37ULL * static_cast<std::uint64_t>(partition.index + 1)));

  std::vector<std::size_t> indices;
  std::vector<std::size_t> pool;
  double initial = -1.0;
  auto refine = cfg.refine_at_iters.begin();
  for (int it = 0; it < cfg.total_iters; ++it) {
    while (refine != cfg.refine_at_iters.end() && *refine == it) {
      partition.stack = refine_bins(partition.stack, partition.events);
      ++refine;
    }
    const std::size_t T = partition.stack.size();
    if (cfg.batch_frames == 0 || static_cast<std::size_t>(cfg.batch_frames) >= T) {
      indices.resize(T);
      std::iota(indices.begin(), indices.end(), std::size_t{0});
    } else {
      pool.resize(T);
      std::iota(pool.begin(), pool.end(), std::size_t{0});
      const auto m = static_cast<std::size_t>(cfg.batch_frames);
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t r = j + static_cast<std::size_t>(rng() % (T - j));
        std::swap(pool[j], pool[r]);
      }
      indices.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m));
      std::sort(indices.begin(), indices.end());
    }

    Objective obj;
    try {
      obj = evaluate_objective(partition.model, partition.stack, indices, cfg.lambda_reg);
    } catch (Error& e) {
      if (e.kind() == ErrorKind::kNonFiniteOutput || e.kind() == ErrorKind::kNonFiniteGradient) {
        Error diverged(ErrorKind::kDivergedTraining,
                       "iteration " + std::to_string(it) + ": " + e.what());
        diverged.iteration = it;
        diverged.partition = partition.index;
        throw diverged;
      }
      throw;
    }
    const double total = obj.loss.total;
    if (initial < 0.0) initial = total;
    if (!std::isfinite(total) || (initial > 0.0 && total > 1e6 * initial)) {
      char msg[96];
      std::snprintf(msg, sizeof msg, "loss %.3g at iteration %d", total, it);
      Error diverged(ErrorKind::kDivergedTraining, msg);
      diverged.iteration = it;
      diverged.partition = partition.index;
      throw diverged;
    }
    report.history.push_back(obj.loss);
    report.resolution.push_back(T);
    adam.step(partition.model.params(), obj.grads);
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

Ensemble train_ensemble(const EventStream& stream, const TrainConfig& cfg, int threads) {
  Ensemble ensemble;
  ensemble.partitions = make_partitions(stream, cfg);
  ensemble.reports.resize(ensemble.partitions.size());
  internal::parallel_for(ensemble.partitions.size(), threads, [&](std::size_t i) {
    try {
      ensemble.reports[i] = train_partition(ensemble.partitions[i], cfg);
    } catch (Error& e) {
      e.partition = static_cast<int>(i);
      throw;
    }
  });
  return ensemble;
}

}  // namespace eventinr
