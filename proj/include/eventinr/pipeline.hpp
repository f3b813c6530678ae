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


#ifndef EVENTINR_PIPELINE_HPP_
#define EVENTINR_PIPELINE_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "eventinr/reconstruct.hpp"
#include "eventinr/trainer.hpp"

namespace eventinr {

// End-to-end reconstruction shared by the command-line tool, the self-test
// and the Python module.

struct ReconstructOptions {
  TrainConfig train;
  ToneMapConfig tone;
  std::vector<double> times;  // empty: uniform at `fps` over the stream
  double fps = 30.0;
  int threads = 1;
};

struct Reconstruction {
  Ensemble ensemble;
  LogVideo video;  // anchored
  std::vector<Image8> frames;
};

Reconstruction reconstruct_stream(const EventStream& stream, const ReconstructOptions& options);

/// partition,iteration,frames,L_temp,L_reg,total
std::string training_report_csv(const Ensemble& ensemble);

/// frame_%06d.pgm, times.txt, partition_%03d.ckpt and report.csv.
void write_reconstruction(const std::filesystem::path& dir, const Reconstruction& result);

/// Per-frame mean alignment followed by MSE in the log domain.
double aligned_log_mse(const Frame& pred, const Frame& ref);

/// Shifts `pred` so its mean equals the mean of `ref`.
Frame align_mean(const Frame& pred, const Frame& ref);

}  // namespace eventinr

#endif  // EVENTINR_PIPELINE_HPP_
