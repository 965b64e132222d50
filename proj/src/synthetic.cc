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

#include "sl/synthetic.h"

#include <cmath>
#include <numbers>
#include <random>

namespace sl {
namespace {

double Draw(std::mt19937_64& rng, const Interval& range) {
  if (range.lo == range.hi) return range.lo;
  return std::uniform_real_distribution<double>(range.lo, range.hi)(rng);
}

void CheckInterval(const Interval& range, const char* what) {
  if (!std::isfinite(range.lo) || !std::isfinite(range.hi) ||
      range.lo > range.hi) {
    throw ValidationError(std::string(what) + " range is not well-ordered");
  }
}

}  // namespace

void SynthConfig::Validate() const {
  if (length == 0 || channels == 0) {
    throw ValidationError("synthetic length and channels must be positive");
  }
  CheckInterval(trend_slope, "trend_slope");
  for (const auto& p : periods) {
    if (p.period < 2) throw ValidationError("synthetic periods must be >= 2");
    CheckInterval(p.amplitude, "amplitude");
  }
}

TimeSeries SynthClean(const SynthConfig& config) {
  config.Validate();
  std::mt19937_64 rng(config.seed);
  Matrix values(config.length, config.channels);
  for (std::size_t c = 0; c < config.channels; ++c) {
    const double slope = Draw(rng, config.trend_slope);
    std::vector<double> amp(config.periods.size());
    std::vector<double> phase(config.periods.size(), 0.0);
    for (std::size_t k = 0; k < config.periods.size(); ++k) {
      amp[k] = Draw(rng, config.periods[k].amplitude);
      if (config.random_phase) {
        phase[k] = Draw(rng, {0.0, 2.0 * std::numbers::pi});
      }
    }
    for (std::size_t t = 0; t < config.length; ++t) {
      const double tt = static_cast<double>(t);
      double v = slope * tt;
      for (std::size_t k = 0; k < config.periods.size(); ++k) {
        const double period = static_cast<double>(config.periods[k].period);
        v += amp[k] * std::sin(2.0 * std::numbers::pi * tt / period + phase[k]);
      }
      values(t, c) = v;
    }
  }
  return TimeSeries(std::move(values));
}

void CorruptionSpec::Validate() const {
  if (noise_std.empty()) throw ValidationError("noise_std must not be empty");
  for (double s : noise_std) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw ValidationError("noise_std must be finite and >= 0");
    }
  }
  if (!(spike_rate >= 0.0 && spike_rate <= 1.0)) {
    throw ValidationError("spike_rate must lie in [0, 1]");
  }
  CheckInterval(spike_magnitude, "spike_magnitude");
  if (!(noise_label_floor >= 0.0)) {
    throw ValidationError("noise_label_floor must be >= 0");
  }
}

double CorruptionSpec::NoiseStd(std::size_t channel) const {
  if (noise_std.size() == 1) return noise_std[0];
  if (channel >= noise_std.size()) {
    throw ContractError("noise_std has fewer entries than channels");
  }
  return noise_std[channel];
}

CorruptedSeries Corrupt(const TimeSeries& series, const CorruptionSpec& spec) {
  spec.Validate();
  if (spec.noise_std.size() != 1 &&
      spec.noise_std.size() != series.channels()) {
    throw ValidationError("noise_std needs 1 or N entries");
  }
  std::seed_seq noise_seed{spec.seed, std::uint64_t{0x6e6f697365}};
  std::seed_seq spike_seed{spec.seed, std::uint64_t{0x7370696b65}};
  std::mt19937_64 noise_rng(noise_seed);
  std::mt19937_64 spike_rng(spike_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution is_spike(spec.spike_rate);
  std::bernoulli_distribution positive(0.5);

  Matrix values = series.values();
  LabelMatrix labels(series.length(), series.channels(),
                     static_cast<std::uint8_t>(CorruptionLabel::kClean));
  for (std::size_t c = 0; c < series.channels(); ++c) {
    const double sd = spec.NoiseStd(c);
    const bool noisy = sd > spec.noise_label_floor;
    for (std::size_t t = 0; t < series.length(); ++t) {
      if (sd > 0.0) values(t, c) += sd * normal(noise_rng);
      if (noisy) labels(t, c) = static_cast<std::uint8_t>(CorruptionLabel::kNoisy);
      if (spec.spike_rate > 0.0 && is_spike(spike_rng)) {
        const double magnitude = Draw(spike_rng, spec.spike_magnitude);
        values(t, c) += positive(spike_rng) ? magnitude : -magnitude;
        labels(t, c) = static_cast<std::uint8_t>(CorruptionLabel::kSpike);
      }
    }
  }
  return {TimeSeries(std::move(values), series.channel_names()),
          std::move(labels)};
}

LabelMatrix CleanLabels(std::size_t length, std::size_t channels) {
  return LabelMatrix(length, channels,
                     static_cast<std::uint8_t>(CorruptionLabel::kClean));
}

LabelMatrix SliceLabels(const LabelMatrix& labels, std::size_t begin,
                        std::size_t end) {
  if (begin > end || end > labels.rows()) {
    throw ContractError("invalid label slice");
  }
  std::vector<std::uint8_t> out(labels.values().begin() + begin * labels.cols(),
                                labels.values().begin() + end * labels.cols());
  return LabelMatrix(end - begin, labels.cols(), std::move(out));
}

}  // namespace sl
