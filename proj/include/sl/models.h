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

// Channel-independent forecasters with hand-written forward and backward
// passes. One per-channel map R^L -> R^F is shared by every channel column.
//
//   linear   y = W x + b                          W: F x L
//   dlinear  y = Wt trend(x) + bt + Wr rem(x) + br (moving-average split)
//   mlp      y = W2 tanh(W1 x + b1) + b2          W1: H x L, W2: F x H
//
// Parameters live in one flat vector so optimizers can treat every kind
// alike; Blocks() exposes the named tensors.

#ifndef SL_MODELS_H_
#define SL_MODELS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sl/grid.h"

namespace sl {

enum class ModelKind : std::uint32_t { kLinear = 0, kDLinear = 1, kMlp = 2 };

std::string_view ModelKindName(ModelKind kind);
// Throws ValidationError on unknown names.
ModelKind ParseModelKind(std::string_view name);

struct ModelShape {
  ModelKind kind = ModelKind::kLinear;
  std::size_t lookback = 0;
  std::size_t horizon = 0;
  std::size_t hidden = 0;  // mlp only
  std::size_t kernel = 1;  // dlinear only; odd

  std::size_t ParameterCount() const;
  void Validate() const;

  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

// A named slice of the flat parameter (or gradient) vector.
struct TensorBlock {
  std::string_view name;
  std::size_t offset;
  std::size_t rows;
  std::size_t cols;
};

std::vector<TensorBlock> Blocks(const ModelShape& shape);

struct ForecasterParams {
  ModelShape shape;
  std::uint64_t seed = 0;
  std::vector<double> values;

  friend bool operator==(const ForecasterParams&,
                         const ForecasterParams&) = default;
};

struct GradientSet {
  ModelShape shape;
  std::vector<double> values;
  double loss = 0.0;
};

GradientSet ZeroGradient(const ModelShape& shape);

// Uniform in +-1/sqrt(fan_in) per tensor, drawn from a seeded engine.
ForecasterParams InitParams(const ModelShape& shape, std::uint64_t seed);

struct Decomposition {
  std::vector<double> trend;
  std::vector<double> remainder;
};

// Centered moving average with replicate padding of (kernel-1)/2 at both
// ends. Kernel must be odd and at most 2L-1.
Decomposition DecomposeMovingAverage(std::span<const double> window,
                                     std::size_t kernel);

// Scratch space reused across calls; one per thread.
struct ModelWorkspace {
  std::vector<double> hidden;
  std::vector<double> trend;
  std::vector<double> remainder;
  std::vector<double> padded_prefix;
  std::vector<double> delta;
};

// Per-channel kernels. x has L entries, y / dy have F entries.
void ForwardChannel(const ForecasterParams& params, std::span<const double> x,
                    std::span<double> y, ModelWorkspace& ws);
// Adds d(dy . f(x)) / d(params) into grad.
void AccumulateChannelGradient(const ForecasterParams& params,
                               std::span<const double> x,
                               std::span<const double> dy,
                               std::span<double> grad, ModelWorkspace& ws);

// Whole-window forms: input L x N, prediction / upstream F x N.
Matrix Forward(const ForecasterParams& params, const Matrix& input);
GradientSet Backward(const ForecasterParams& params, const Matrix& input,
                     const Matrix& upstream);

// Checkpoint layout (little-endian):
//   8 bytes  magic "SLCKPT01"
//   u32      kind, u32 reserved (0)
//   u64      lookback, horizon, hidden, kernel, seed, value count
//   f64[n]   values
std::string SerializeCheckpoint(const ForecasterParams& params);
ForecasterParams DeserializeCheckpoint(std::string_view bytes);
void SaveCheckpoint(const std::filesystem::path& path,
                    const ForecasterParams& params);
ForecasterParams LoadCheckpoint(const std::filesystem::path& path);

}  // namespace sl

#endif  // SL_MODELS_H_
