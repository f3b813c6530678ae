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


#include "eventinr/pipeline.hpp"

#include <algorithm>
#include <cstdio>

#include "eventinr/error.hpp"
#include "eventinr/eval.hpp"
#include "eventinr/image_io.hpp"

namespace eventinr {

Reconstruction reconstruct_stream(const EventStream& stream, const ReconstructOptions& options) {
  stream.validate();
  Reconstruction out;
  out.ensemble = train_ensemble(stream, options.train, options.threads);
  const std::vector<double> times = options.times.empty()
                                        ? uniform_times(stream.t_start, stream.t_end, options.fps)
                                        : options.times;
  out.video = anchor_offset(sample_video(out.ensemble.partitions, times, options.threads));
  out.frames = tone_map(out.video, options.tone);
  return out;
}

std::string training_report_csv(const Ensemble& ensemble) {
  std::string csv = "partition,iteration,frames,L_temp,L_reg,total\n";
  char line[160];
  for (const TrainReport& r : ensemble.reports) {
    for (std::size_t it = 0; it < r.history.size(); ++it) {
      const LossValue& v = r.history[it];
      const int n = std::snprintf(line, sizeof line, "%d,%zu,%zu,%.9g,%.9g,%.9g\n", r.partition,
                                  it, r.resolution[it], v.temporal, v.reg, v.total);
      csv.append(line, static_cast<std::size_t>(n));
    }
  }
  return csv;
}

void write_reconstruction(const std::filesystem::path& dir, const Reconstruction& result) {
  write_frames(dir, result.frames, result.video.times);
  char name[32];
  for (const Partition& p : result.ensemble.partitions) {
    std::snprintf(name, sizeof name, "partition_%03d.ckpt", p.index);
    save_checkpoint(dir / name, p.model);
  }
  write_file_atomic(dir / "report.csv", training_report_csv(result.ensemble));
}

Frame align_mean(const Frame& pred, const Frame& ref) {
  if (!pred.same_shape(ref)) throw Error(ErrorKind::kShapeMismatch, "frames differ in size");
  double shift = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) shift += ref.data[i] - pred.data[i];
  shift /= static_cast<double>(std::max<std::size_t>(pred.size(), 1));
  Frame out = pred;
  for (double& v : out.data) v += shift;
  return out;
}

double aligned_log_mse(const Frame& pred, const Frame& ref) {
  return mse(align_mean(pred, ref), ref);
}

}  // namespace eventinr
