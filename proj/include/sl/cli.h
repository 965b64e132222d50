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

// `slearn` command-line front end.
//
// Subcommands: synth, pretrain-estimator, train, evaluate, zero-shot, ablate,
// theorem1, export-curves. Exit status: 0 success, 1 runtime failure,
// 2 usage error (unknown flag or config key), 3 validation error. Failures
// print one JSON line {"error": <category>, "message": <text>} to stderr.

#ifndef SL_CLI_H_
#define SL_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace sl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitValidation = 3;

// `args` excludes the program name.
int Dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace sl

#endif  // SL_CLI_H_
