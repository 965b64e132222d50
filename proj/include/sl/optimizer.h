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

#ifndef SL_OPTIMIZER_H_
#define SL_OPTIMIZER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sl/models.h"

namespace sl {

enum class OptimizerKind { kAdam, kSgd };

std::string_view OptimizerKindName(OptimizerKind kind);
OptimizerKind ParseOptimizerKind(std::string_view name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // Global L2 norm bound applied to gradients before any moment update.
  std::optional<double> clip_norm;

  void Validate() const;
};

struct AdamState {
  std::uint64_t step = 0;
  std::vector<double> m;
  std::vector<double> v;
  OptimizerConfig config;
};

AdamState MakeAdamState(const OptimizerConfig& config, std::size_t size);

double GlobalNorm(std::span<const double> grads);

// Rescales in place so the global norm is at most max_norm. Returns the
// pre-clip norm.
double ClipByGlobalNorm(std::span<double> grads, double max_norm);

// Bias-corrected Adam update. Throws NumericError (leaving params and state
// untouched) when any gradient is non-finite. `grads` is taken by value
// because clipping rescales it.
void AdamStep(AdamState& state, ForecasterParams& params, GradientSet grads);

// Plain gradient descent, theta -= lr * clip(g).
void SgdStep(const OptimizerConfig& config, ForecasterParams& params,
             GradientSet grads);

// Dispatches on state.config.kind; SGD ignores the moments but still counts
// steps.
void OptimizerStep(AdamState& state, ForecasterParams& params,
                   GradientSet grads);

}  // namespace sl

#endif  // SL_OPTIMIZER_H_
