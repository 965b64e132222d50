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

#include "sl/optimizer.h"

#include <cmath>
#include <string>

namespace sl {

std::string_view OptimizerKindName(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "sgd";
}

OptimizerKind ParseOptimizerKind(std::string_view name) {
  if (name == "adam") return OptimizerKind::kAdam;
  if (name == "sgd") return OptimizerKind::kSgd;
  throw ValidationError("unknown optimizer '" + std::string(name) + "'");
}

void OptimizerConfig::Validate() const {
  if (!(lr >= 0.0) || !std::isfinite(lr)) {
    throw ValidationError("learning rate must be finite and >= 0");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ValidationError("Adam betas must lie in [0, 1)");
  }
  if (!(eps > 0.0)) throw ValidationError("Adam epsilon must be positive");
  if (clip_norm && !(*clip_norm > 0.0)) {
    throw ValidationError("clip norm must be positive");
  }
}

AdamState MakeAdamState(const OptimizerConfig& config, std::size_t size) {
  config.Validate();
  return {0, std::vector<double>(size, 0.0), std::vector<double>(size, 0.0),
          config};
}

double GlobalNorm(std::span<const double> grads) {
  double sq = 0.0;
  for (double g : grads) sq += g * g;
  return std::sqrt(sq);
}

double ClipByGlobalNorm(std::span<double> grads, double max_norm) {
  const double norm = GlobalNorm(grads);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (double& g : grads) g *= scale;
  }
  return norm;
}

namespace {

void CheckStep(const ForecasterParams& params, const GradientSet& grads) {
  if (grads.values.size() != params.values.size()) {
    throw ContractError("gradient and parameter sizes differ");
  }
  for (double g : grads.values) {
    if (!std::isfinite(g)) {
      throw NumericError("non-finite gradient; optimizer step aborted");
    }
  }
}

}  // namespace

void AdamStep(AdamState& state, ForecasterParams& params, GradientSet grads) {
  CheckStep(params, grads);
  if (state.m.size() != params.values.size()) {
    throw ContractError("Adam state does not match parameter count");
  }
  const OptimizerConfig& cfg = state.config;
  if (cfg.clip_norm) ClipByGlobalNorm(grads.values, *cfg.clip_norm);

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(cfg.beta1, t);
  const double bias2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < params.values.size(); ++i) {
    const double g = grads.values[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = state.m[i] / bias1;
    const double v_hat = state.v[i] / bias2;
    params.values[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

void SgdStep(const OptimizerConfig& config, ForecasterParams& params,
             GradientSet grads) {
  CheckStep(params, grads);
  if (config.clip_norm) ClipByGlobalNorm(grads.values, *config.clip_norm);
  for (std::size_t i = 0; i < params.values.size(); ++i) {
    params.values[i] -= config.lr * grads.values[i];
  }
}

void OptimizerStep(AdamState& state, ForecasterParams& params,
                   GradientSet grads) {
  if (state.config.kind == OptimizerKind::kAdam) {
    AdamStep(state, params, std::move(grads));
  } else {
    SgdStep(state.config, params, std::move(grads));
    ++state.step;
  }
}

}  // namespace sl
