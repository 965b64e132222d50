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

// Run-directory files. All text output is UTF-8 and newline-terminated, and
// doubles use the shortest round-trip form so reruns are byte-identical.
//
// history.csv columns, in order:
//   epoch, train_loss, val_mse, val_mae, test_mse, test_mae,
//   frac_uncertainty, frac_anomaly, frac_combined,
//   skipped_samples, skipped_updates, gamma_u_0 .. gamma_u_{N-1}
//
// curves.csv columns: epoch, series_name, value (one row per epoch and
// non-epoch history column, history column order within each epoch).
//
// mask_audit.csv columns:
//   epoch, origin, channel, step, entropy, anomaly_score,
//   mask_uncertainty, mask_anomaly, mask_combined

#ifndef SL_ARTIFACTS_H_
#define SL_ARTIFACTS_H_

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>

#include "sl/theorem1.h"
#include "sl/trainer.h"

namespace sl {

// Writes `content` verbatim, creating parent directories. Throws
// Error("io", ...) on failure.
void WriteTextFile(const std::filesystem::path& path,
                   const std::string& content);
std::string ReadTextFile(const std::filesystem::path& path);

std::string HistoryCsv(const EpochHistory& history, std::size_t channels);

// Final and best-epoch metrics plus realized mask fractions. Contains no
// paths or timings.
std::string MetricsJson(const TrainResult& result, AblationMode mode,
                        double realized_combined_fraction,
                        const Metrics* best_test_original = nullptr);

std::string Theorem1Json(const Theorem1Report& report);

// Long-format view of a history.csv text. Values are copied as text.
std::string CurvesCsv(const std::string& history_csv);

// Reads run_dir/history.csv and writes run_dir/curves.csv. Throws
// Error("io", ...) when the directory or history file is missing.
std::filesystem::path ExportCurves(const std::filesystem::path& run_dir);

class MaskAuditWriter {
 public:
  explicit MaskAuditWriter(const std::filesystem::path& path);
  void Write(const MaskAuditEvent& event);
  MaskAuditSink Sink();

 private:
  std::ofstream out_;
};

}  // namespace sl

#endif  // SL_ARTIFACTS_H_
