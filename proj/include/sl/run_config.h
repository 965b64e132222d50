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

// Run configuration document (JSON) with strict schema validation.
//
// Resolution order, later wins:
//   built-in defaults < named preset < config file < environment < flags
//
// Environment: SL_OUTPUT_DIR, SL_THREADS. Unknown keys raise UsageError;
// values of the wrong type or out of range raise ValidationError.

#ifndef SL_RUN_CONFIG_H_
#define SL_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sl/dataset.h"
#include "sl/theorem1.h"
#include "sl/trainer.h"

namespace sl {

// Masking and split ratios bundled per benchmark dataset name.
struct Preset {
  std::string_view name;
  MaskRatios ratios;
  SplitSpec split;
};

const std::vector<Preset>& Presets();
// Throws ValidationError for unknown names.
const Preset& FindPreset(std::string_view name);

struct RunConfig {
  std::optional<std::string> preset;
  DataConfig data{std::nullopt, SynthConfig{}, std::nullopt, SplitSpec{}, 48,
                  24};
  TrainRunConfig train;
  EstimatorConfig estimator;
  std::optional<std::filesystem::path> estimator_checkpoint;
  std::filesystem::path output_dir = "runs/default";
  bool mask_audit = false;
  bool original_scale_metrics = false;
  bool theorem1_enabled = false;
  Theorem1Config theorem1;

  void Validate() const;
};

// Command-line overrides; unset fields leave the config untouched.
struct ConfigOverrides {
  std::optional<double> ru;
  std::optional<double> ra;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::filesystem::path> output_dir;
};

RunConfig ResolveConfig(std::string_view json_text,
                        const ConfigOverrides& overrides = {},
                        bool read_environment = true);
RunConfig ResolveConfigFile(const std::filesystem::path& path,
                            const ConfigOverrides& overrides = {},
                            bool read_environment = true);

// Every field spelled out; feeding the result back through ResolveConfig
// reproduces the same RunConfig.
std::string ResolvedConfigJson(const RunConfig& config);

}  // namespace sl

#endif  // SL_RUN_CONFIG_H_
