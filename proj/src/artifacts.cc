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

#include "sl/artifacts.h"

#include <cmath>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "sl/errors.h"
#include "sl/format.h"

namespace sl {

using nlohmann::json;

namespace {

// JSON has no infinities; they are written as strings.
json Number(double v) {
  if (std::isfinite(v)) return v;
  return FormatDouble(v);
}

json MetricsObject(const Metrics& m) {
  return {{"mse", Number(m.mse)}, {"mae", Number(m.mae)}};
}

std::vector<std::string> SplitLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

void WriteTextFile(const std::filesystem::path& path,
                   const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw Error("io", "cannot create " + path.parent_path().string() +
                            ": " + ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io", "cannot write " + path.string());
  out << content;
  if (!out) throw Error("io", "write failed for " + path.string());
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::string HistoryCsv(const EpochHistory& history, std::size_t channels) {
  std::string out =
      "epoch,train_loss,val_mse,val_mae,test_mse,test_mae,frac_uncertainty,"
      "frac_anomaly,frac_combined,skipped_samples,skipped_updates";
  for (std::size_t c = 0; c < channels; ++c) {
    out += ",gamma_u_" + std::to_string(c);
  }
  out += '\n';
  for (const auto& r : history.epochs) {
    out += std::to_string(r.epoch);
    for (double v : {r.train_loss, r.val.mse, r.val.mae, r.test.mse,
                     r.test.mae, r.frac_uncertainty, r.frac_anomaly,
                     r.frac_combined}) {
      out += ',' + FormatDouble(v);
    }
    out += ',' + std::to_string(r.skipped_samples);
    out += ',' + std::to_string(r.skipped_updates);
    for (std::size_t c = 0; c < channels; ++c) {
      out += ',';
      out += c < r.gamma_u.size() ? FormatDouble(r.gamma_u[c]) : "inf";
    }
    out += '\n';
  }
  return out;
}

std::string MetricsJson(const TrainResult& result, AblationMode mode,
                        double realized_combined_fraction,
                        const Metrics* best_test_original) {
  json doc;
  doc["mode"] = AblationModeName(mode);
  doc["epochs_run"] = result.history.epochs.size();
  doc["best_epoch"] = result.best_epoch;
  doc["realized_combined_fraction"] = Number(realized_combined_fraction);
  if (!result.history.epochs.empty()) {
    const EpochRecord& last = result.history.epochs.back();
    doc["final"] = {{"train_loss", Number(last.train_loss)},
                    {"val", MetricsObject(last.val)},
                    {"test", MetricsObject(last.test)}};
    const int best = result.best_epoch;
    if (best >= 1 &&
        static_cast<std::size_t>(best) <= result.history.epochs.size()) {
      const EpochRecord& b = result.history.epochs[best - 1];
      doc["best"] = {{"train_loss", Number(b.train_loss)},
                     {"val", MetricsObject(b.val)},
                     {"test", MetricsObject(b.test)}};
    }
    double fu = 0.0, fa = 0.0, fc = 0.0, entries = 0.0;
    std::size_t skipped_samples = 0, skipped_updates = 0;
    for (const auto& r : result.history.epochs) {
      const double e = static_cast<double>(r.entries);
      fu += r.frac_uncertainty * e;
      fa += r.frac_anomaly * e;
      fc += r.frac_combined * e;
      entries += e;
      skipped_samples += r.skipped_samples;
      skipped_updates += r.skipped_updates;
    }
    if (entries > 0.0) {
      fu /= entries;
      fa /= entries;
      fc /= entries;
    }
    doc["realized_fractions"] = {{"uncertainty", Number(fu)},
                                 {"anomaly", Number(fa)},
                                 {"combined", Number(fc)}};
    doc["skipped_samples"] = skipped_samples;
    doc["skipped_updates"] = skipped_updates;
  }
  if (best_test_original) {
    doc["best_test_original_scale"] = MetricsObject(*best_test_original);
  }
  return doc.dump(2) + "\n";
}

std::string Theorem1Json(const Theorem1Report& r) {
  json gaps = json::array();
  for (double g : r.max_gap_per_epoch) gaps.push_back(Number(g));
  json doc = {{"lr", Number(r.lr)},
              {"clip_norm", Number(r.clip_norm)},
              {"lipschitz", Number(r.lipschitz)},
              {"residual_bound", Number(r.residual_bound)},
              {"iterations_per_epoch", r.iterations_per_epoch},
              {"bound", Number(r.bound)},
              {"max_gap", Number(r.max_gap)},
              {"max_gap_per_epoch", gaps},
              {"checked_timesteps", r.checked_timesteps},
              {"epochs", r.epochs},
              {"pass", r.pass}};
  return doc.dump(2) + "\n";
}

std::string CurvesCsv(const std::string& history_csv) {
  std::istringstream in(history_csv);
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(1, "history.csv has no header");
  }
  const auto header = SplitLine(line);
  if (header.empty() || header[0] != "epoch") {
    throw ParseError(1, "history.csv must start with an epoch column");
  }
  std::string out = "epoch,series_name,value\n";
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = SplitLine(line);
    if (fields.size() != header.size()) {
      throw ParseError(line_no, "expected " + std::to_string(header.size()) +
                                    " fields, got " +
                                    std::to_string(fields.size()));
    }
    for (std::size_t i = 1; i < fields.size(); ++i) {
      out += fields[0] + ',' + header[i] + ',' + fields[i] + '\n';
    }
  }
  return out;
}

std::filesystem::path ExportCurves(const std::filesystem::path& run_dir) {
  if (!std::filesystem::is_directory(run_dir)) {
    throw Error("io", "run directory not found: " + run_dir.string());
  }
  const auto history = run_dir / "history.csv";
  if (!std::filesystem::exists(history)) {
    throw Error("io", "missing " + history.string());
  }
  const auto target = run_dir / "curves.csv";
  WriteTextFile(target, CurvesCsv(ReadTextFile(history)));
  return target;
}

MaskAuditWriter::MaskAuditWriter(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw Error("io", "cannot write " + path.string());
  out_ << "epoch,origin,channel,step,entropy,anomaly_score,"
          "mask_uncertainty,mask_anomaly,mask_combined\n";
}

void MaskAuditWriter::Write(const MaskAuditEvent& e) {
  const std::size_t f = e.masks.combined.rows();
  const std::size_t n = e.masks.combined.cols();
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t h = 0; h < f; ++h) {
      out_ << e.epoch << ',' << e.window.origin << ',' << c << ',' << h << ','
           << FormatDouble(e.entropies(h, c)) << ','
           << FormatDouble(e.scores(h, c)) << ','
           << int{e.masks.uncertainty(h, c)} << ','
           << int{e.masks.anomaly(h, c)} << ','
           << int{e.masks.combined(h, c)} << '\n';
    }
  }
}

MaskAuditSink MaskAuditWriter::Sink() {
  return [this](const MaskAuditEvent& e) { Write(e); };
}

}  // namespace sl
