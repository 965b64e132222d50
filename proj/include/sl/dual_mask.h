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

// Uncertainty mask, anomaly mask, their combination and the selective loss.
//
// Mask encoding everywhere: 1 = the entry stays in the loss, 0 = excluded.
// An entry is excluded as soon as either criterion flags it, so the combined
// kept-mask is the elementwise AND of the two kept-masks.
//
// Thresholds use strict comparisons. With tied scores fewer entries than the
// nominal budget may be excluded; that is deterministic and conservative.

#ifndef SL_DUAL_MASK_H_
#define SL_DUAL_MASK_H_

#include <cstddef>
#include <vector>

#include "sl/grid.h"
#include "sl/residual_archive.h"

namespace sl {

struct MaskRatios {
  double uncertainty = 0.0;  // r_u
  double anomaly = 0.0;      // r_a

  // Both must lie in [0, 1].
  void Validate() const;
};

// floor(ratio * n) with a 1e-9 guard against products like 0.29 * 100.
std::size_t RatioCount(double ratio, std::size_t n);

// Per-channel global entropy threshold, refreshed once per epoch.
struct UncertaintyThresholds {
  std::vector<double> gamma;  // +inf disables the channel
  int epoch = 0;
};

UncertaintyThresholds DisabledThresholds(std::size_t channels);

// Entropy of every (timestep, channel) in the archive; -inf where fewer than
// two residuals are buffered or the variance is zero.
Matrix EntropyTable(const ResidualArchive& archive);

// gamma such that exactly RatioCount(ratio, n) of n distinct finite values
// lie strictly above it. Non-finite values are left out of the population.
// Returns +inf when nothing is to be excluded.
double UpperThreshold(std::vector<double> values, double ratio);

// Rows of `entropies` are timesteps, columns channels.
UncertaintyThresholds UpdateUncertaintyThresholds(const Matrix& entropies,
                                                  double r_u, int epoch);
UncertaintyThresholds UpdateUncertaintyThresholds(
    const ResidualArchive& archive, double r_u, int epoch);

// 0 where entropy > gamma of the column's channel.
Mask UncertaintyMask(const Matrix& entropies,
                     const UncertaintyThresholds& thresholds);

// |residual_f| - |residual_g| elementwise. residual_g comes from the frozen
// estimation model on the same window.
Matrix AnomalyScores(const Matrix& residual_f, const Matrix& residual_g);

// Entries excluded per channel: min(floor(r_a * F), F - 1).
std::size_t NominalAnomalyCount(std::size_t horizon, double r_a);

struct AnomalyMaskResult {
  Mask mask;
  std::vector<double> gamma;  // per channel; -inf when disabled
};

// Per sample and channel, gamma_a is the score at rank NominalAnomalyCount in
// ascending order (ties broken by horizon index) and entries with a score
// strictly below gamma_a are excluded.
AnomalyMaskResult AnomalyMask(const Matrix& scores, double r_a);

Mask AllKept(std::size_t rows, std::size_t cols);

// Kept iff kept by both inputs.
Mask Combine(const Mask& uncertainty, const Mask& anomaly);

std::size_t KeptCount(const Mask& mask);

struct MaskPair {
  Mask uncertainty;
  Mask anomaly;
  Mask combined;
};

// Squared error summed over kept entries divided by the kept count. With an
// all-ones mask this is the plain MSE. Throws DegenerateMaskError when the
// mask keeps nothing.
double SelectiveLoss(const Matrix& pred, const Matrix& target,
                     const Mask& mask);

// 2 (pred - target) / kept at kept entries, exactly 0 elsewhere.
Matrix SelectiveLossGrad(const Matrix& pred, const Matrix& target,
                         const Mask& mask);

double MseLoss(const Matrix& pred, const Matrix& target);
Matrix MseLossGrad(const Matrix& pred, const Matrix& target);

}  // namespace sl

#endif  // SL_DUAL_MASK_H_
