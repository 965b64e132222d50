// Copyright 2026 The Selective Learning Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Empirical check of the mixed-parameter variance bound
//
//   |var_archive(t) - var_recomputed(t)| <= 4 * L_f * R * lr * G * (2K - 1)
//
// The archive variance mixes residuals produced by K successive parameter
// iterates; the recomputation re-predicts the same windows with the frozen
// parameters at an epoch boundary. The run uses clipped plain gradient
// descent so every step moves the parameters by at most lr * G.

#ifndef SL_THEOREM1_H_
#define SL_THEOREM1_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sl/dataset.h"
#include "sl/models.h"

namespace sl {

struct Theorem1Config {
  double lr = 1e-3;
  double clip_norm = 1.0;  // G
  std::size_t batch_size = 24;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  std::size_t max_timesteps = 64;  // sampled per epoch boundary
  std::size_t random_probes = 32;
};

struct Theorem1Report {
  double lr = 0.0;
  double clip_norm = 0.0;
  double lipschitz = 0.0;      // L_f, max over probes
  double residual_bound = 0.0;  // R, running max |residual|
  std::size_t iterations_per_epoch = 0;  // K
  double bound = 0.0;
  double max_gap = 0.0;
  std::size_t checked_timesteps = 0;
  std::size_t epochs = 0;
  std::vector<double> max_gap_per_epoch;
  bool pass = false;
};

double Theorem1Bound(double lipschitz, double residual_bound, double lr,
                     double clip_norm, std::size_t iterations_per_epoch);

// max over probes of ||f(X; a) - f(X; b)|| / ||a - b|| for a linear model.
// Probes are the worst-case direction of each window (the top right-singular
// vector of the window's input matrix augmented with a bias row, found by
// power iteration) plus `random_probes` random directions per window.
double MeasureLinearLipschitz(const ForecasterParams& params,
                              const WindowedSegment& segment,
                              std::size_t random_probes, std::uint64_t seed);

// Trains a linear model on `train` and compares archive variances against
// recomputed ones at every epoch boundary.
Theorem1Report Theorem1Check(const Theorem1Config& config,
                             const WindowedSegment& train);

}  // namespace sl

#endif  // SL_THEOREM1_H_
