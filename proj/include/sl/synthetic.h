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

#ifndef SL_SYNTHETIC_H_
#define SL_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sl/grid.h"
#include "sl/time_series.h"

namespace sl {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct PeriodicComponent {
  std::size_t period = 24;
  Interval amplitude{0.5, 1.5};
};

// Clean trend + sinusoid generator. Periods are in samples; the defaults read
// as daily / weekly / yearly cycles of an hourly series.
struct SynthConfig {
  std::size_t length = 2000;
  std::size_t channels = 1;
  Interval trend_slope{-1e-3, 1e-3};
  std::vector<PeriodicComponent> periods{
      {24, {0.5, 1.5}}, {168, {0.3, 1.0}}, {8760, {0.5, 2.0}}};
  // When false every phase is zero.
  bool random_phase = true;
  std::uint64_t seed = 0;

  void Validate() const;
};

TimeSeries SynthClean(const SynthConfig& config);

enum class CorruptionLabel : std::uint8_t { kClean = 0, kNoisy = 1, kSpike = 2 };
using LabelMatrix = Grid<std::uint8_t>;

struct CorruptionSpec {
  // One entry per channel, or a single entry broadcast to all channels.
  std::vector<double> noise_std{0.0};
  double spike_rate = 0.0;
  Interval spike_magnitude{3.0, 6.0};
  // Entries are labeled noisy only when the channel's noise_std exceeds this.
  double noise_label_floor = 0.0;
  std::uint64_t seed = 0;

  void Validate() const;
  double NoiseStd(std::size_t channel) const;
};

struct CorruptedSeries {
  TimeSeries series;
  LabelMatrix labels;
};

// Gaussian noise everywhere, then Bernoulli(spike_rate) spikes with uniform
// magnitude and random sign. Noise and spike draws use independent streams,
// so spike positions do not depend on the noise level.
CorruptedSeries Corrupt(const TimeSeries& series, const CorruptionSpec& spec);

LabelMatrix CleanLabels(std::size_t length, std::size_t channels);
LabelMatrix SliceLabels(const LabelMatrix& labels, std::size_t begin,
                        std::size_t end);

}  // namespace sl

#endif  // SL_SYNTHETIC_H_
