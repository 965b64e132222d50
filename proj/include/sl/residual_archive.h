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

#ifndef SL_RESIDUAL_ARCHIVE_H_
#define SL_RESIDUAL_ARCHIVE_H_

#include <cstddef>
#include <optional>
#include <vector>

namespace sl {

// min(t - L + 1, F): how many stride-1 windows predict timestep t when the
// segment is long enough on the right. Throws ContractError for t < L.
std::size_t NExpected(std::size_t t, std::size_t lookback,
                      std::size_t horizon);

struct ResidualStats {
  double mean = 0.0;
  double variance = 0.0;  // population form, divides by count
  std::size_t count = 0;
};

// Gaussian differential entropy 0.5 * ln(2 pi e variance). Returns -inf when
// the variance is zero; such timesteps are never treated as uncertain.
double Entropy(const ResidualStats& stats);
double EntropyOfVariance(double variance);

// Per (timestep, channel) ring buffers of the most recent prediction
// residuals over one training segment.
//
// The buffer at timestep t holds up to TargetCoverage(t) entries, i.e. the
// number of windows that predict t in one pass over the segment, which is
// never more than NExpected(t) or F. After a full stride-1 epoch every buffer
// therefore contains exactly one residual per covering window. Timesteps
// inside the first lookback have capacity zero.
//
// Record is the only mutator. Distinct keys may be written concurrently;
// writes to one key must be serialized.
class ResidualArchive {
 public:
  ResidualArchive() = default;
  ResidualArchive(std::size_t segment_length, std::size_t channels,
                  std::size_t lookback, std::size_t horizon);

  std::size_t segment_length() const { return length_; }
  std::size_t channels() const { return channels_; }
  std::size_t lookback() const { return lookback_; }
  std::size_t horizon() const { return horizon_; }

  std::size_t Capacity(std::size_t t) const;
  std::size_t Count(std::size_t t, std::size_t channel) const;

  // Throws NumericError for non-finite residuals, ContractError for keys with
  // zero capacity.
  void Record(std::size_t t, std::size_t channel, double residual);

  // Oldest first.
  std::vector<double> Contents(std::size_t t, std::size_t channel) const;

  // nullopt when fewer than two residuals are buffered.
  std::optional<ResidualStats> Variance(std::size_t t,
                                        std::size_t channel) const;

  // Largest |residual| currently buffered anywhere.
  double MaxAbsResidual() const;

  void Clear();

 private:
  std::size_t Slot(std::size_t t, std::size_t channel) const {
    return t * channels_ + channel;
  }
  void CheckKey(std::size_t t, std::size_t channel) const;

  std::size_t length_ = 0;
  std::size_t channels_ = 0;
  std::size_t lookback_ = 0;
  std::size_t horizon_ = 0;
  std::vector<double> data_;          // slot * horizon_ + ring position
  std::vector<std::size_t> head_;     // next write position per slot
  std::vector<std::size_t> count_;
};

}  // namespace sl

#endif  // SL_RESIDUAL_ARCHIVE_H_
