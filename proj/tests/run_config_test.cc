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

#include "sl/run_config.h"

#include <cstdlib>

#include "gtest/gtest.h"
#include "sl/artifacts.h"

namespace sl {
namespace {

TEST(PresetTest, MaskingAndSplitRatios) {
  struct Row {
    const char* name;
    double ru, ra, train, val, test;
  };
  const Row rows[] = {
      {"ETTh1", 0.3, 0.3, 0.6, 0.2, 0.2},
      {"ETTh2", 0.1, 0.6, 0.6, 0.2, 0.2},
      {"ETTm1", 0.2, 0.2, 0.6, 0.2, 0.2},
      {"ETTm2", 0.2, 0.5, 0.6, 0.2, 0.2},
      {"Electricity", 0.1, 0.1, 0.7, 0.1, 0.2},
      {"Exchange", 0.0, 0.9, 0.7, 0.1, 0.2},
      {"Weather", 0.1, 0.2, 0.7, 0.1, 0.2},
      {"ILI", 0.1, 0.1, 0.7, 0.1, 0.2},
  };
  EXPECT_EQ(Presets().size(), std::size(rows));
  for (const Row& row : rows) {
    const Preset& p = FindPreset(row.name);
    EXPECT_EQ(p.ratios.uncertainty, row.ru) << row.name;
    EXPECT_EQ(p.ratios.anomaly, row.ra) << row.name;
    EXPECT_EQ(p.split.train, row.train) << row.name;
    EXPECT_EQ(p.split.val, row.val) << row.name;
    EXPECT_EQ(p.split.test, row.test) << row.name;
  }
  EXPECT_THROW(FindPreset("Traffic"), ValidationError);
}

TEST(ResolveConfigTest, DefaultsAreValid) {
  const RunConfig cfg = ResolveConfig("", {}, false);
  EXPECT_TRUE(cfg.data.synth.has_value());
  EXPECT_EQ(cfg.train.model.lookback, cfg.data.lookback);
  EXPECT_EQ(cfg.estimator.shape.kind, ModelKind::kDLinear);
}

TEST(ResolveConfigTest, PrecedenceDefaultsPresetFileFlags) {
  const char* text = R"({"preset": "ETTh2", "selective": {"ra": 0.4}})";
  RunConfig cfg = ResolveConfig(text, {}, false);
  EXPECT_EQ(cfg.train.ratios.uncertainty, 0.1);  // preset
  EXPECT_EQ(cfg.train.ratios.anomaly, 0.4);      // file over preset
  ConfigOverrides flags;
  flags.ra = 0.05;
  flags.seed = 9;
  cfg = ResolveConfig(text, flags, false);
  EXPECT_EQ(cfg.train.ratios.anomaly, 0.05);  // flag over file
  EXPECT_EQ(cfg.train.seed, 9u);
  EXPECT_EQ(cfg.estimator.seed, 9u);
}

TEST(ResolveConfigTest, PresetWithFlagOverrides) {
  ConfigOverrides flags;
  flags.ru = 0.3;
  flags.ra = 0.3;
  const RunConfig cfg = ResolveConfig(R"({"preset": "ETTh1"})", flags, false);
  EXPECT_EQ(cfg.train.ratios.uncertainty, 0.30);
  EXPECT_EQ(cfg.train.ratios.anomaly, 0.30);
  EXPECT_EQ(cfg.data.split.train, 0.6);
}

TEST(ResolveConfigTest, EnvironmentSitsBetweenFileAndFlags) {
  ::setenv("SL_OUTPUT_DIR", "from_env", 1);
  ::setenv("SL_THREADS", "3", 1);
  RunConfig cfg = ResolveConfig(R"({"output_dir": "from_file"})");
  EXPECT_EQ(cfg.output_dir, "from_env");
  EXPECT_EQ(cfg.train.threads, 3u);
  ConfigOverrides flags;
  flags.output_dir = "from_flag";
  cfg = ResolveConfig(R"({"output_dir": "from_file"})", flags);
  EXPECT_EQ(cfg.output_dir, "from_flag");
  ::setenv("SL_THREADS", "zero", 1);
  EXPECT_THROW(ResolveConfig(""), ValidationError);
  ::unsetenv("SL_OUTPUT_DIR");
  ::unsetenv("SL_THREADS");
}

TEST(ResolveConfigTest, UnknownKeysAreUsageErrors) {
  EXPECT_THROW(ResolveConfig(R"({"sedd": 1})", {}, false), UsageError);
  EXPECT_THROW(ResolveConfig(R"({"model": {"width": 3}})", {}, false),
               UsageError);
  EXPECT_THROW(
      ResolveConfig(R"({"data": {"synth": {"legnth": 3}}})", {}, false),
      UsageError);
}

TEST(ResolveConfigTest, BadValuesAreValidationErrors) {
  EXPECT_THROW(ResolveConfig(R"({"selective": {"ru": 1.5}})", {}, false),
               ValidationError);
  EXPECT_THROW(ResolveConfig(R"({"seed": -1})", {}, false), ValidationError);
  EXPECT_THROW(ResolveConfig(R"({"model": {"kind": "rnn"}})", {}, false),
               ValidationError);
  EXPECT_THROW(ResolveConfig(R"({"data": {"split": [0.5, 0.5]}})", {}, false),
               ValidationError);
  EXPECT_THROW(ResolveConfig("{not json", {}, false), ValidationError);
  ConfigOverrides flags;
  flags.mode = "sometimes";
  EXPECT_THROW(ResolveConfig("", flags, false), ValidationError);
  flags = {};
  flags.ru = 1.5;
  EXPECT_THROW(ResolveConfig("", flags, false), ValidationError);
}

TEST(ResolveConfigTest, CsvReplacesSynth) {
  const RunConfig cfg =
      ResolveConfig(R"({"data": {"csv_path": "x.csv"}})", {}, false);
  EXPECT_FALSE(cfg.data.synth.has_value());
  EXPECT_EQ(cfg.data.csv_path->string(), "x.csv");
}

TEST(ResolvedConfigJsonTest, RoundTripsEveryField) {
  const char* text = R"({
    "preset": "Weather",
    "data": {"synth": {"length": 500, "channels": 3,
                       "periods": [{"period": 12, "amplitude": [0.1, 0.2]}]},
             "corruption": {"noise_std": [0.1, 0.2, 0.3], "spike_rate": 0.05},
             "lookback": 32, "horizon": 16},
    "model": {"kind": "dlinear", "kernel": 7},
    "estimator": {"kind": "linear", "tolerance": 1e-5},
    "selective": {"mode": "random_mask", "random_mask_fraction": 0.125},
    "optimizer": {"kind": "sgd", "clip": 2.0, "epochs": 3},
    "seed": 12, "threads": 2, "output_dir": "out",
    "outputs": {"mask_audit": true},
    "theorem1": {"enabled": true, "batch_size": 16}
  })";
  const RunConfig a = ResolveConfig(text, {}, false);
  const std::string json_a = ResolvedConfigJson(a);
  const RunConfig b = ResolveConfig(json_a, {}, false);
  EXPECT_EQ(ResolvedConfigJson(b), json_a);
  EXPECT_EQ(b.train.random_mask_fraction, 0.125);
  EXPECT_EQ(b.train.optimizer.clip_norm, 2.0);
  EXPECT_EQ(b.data.corruption->noise_std.size(), 3u);
  EXPECT_EQ(b.data.synth->periods.size(), 1u);
  EXPECT_EQ(b.theorem1.batch_size, 16u);
  EXPECT_EQ(b.theorem1.seed, 12u);
  EXPECT_TRUE(b.mask_audit);
}

TEST(CurvesCsvTest, LongFormatPassThrough) {
  const std::string history =
      "epoch,a,b,c,d\n1,0.5,1,2,3\n2,0.25,1e-05,inf,4\n3,0.125,x,y,z\n";
  const std::string curves = CurvesCsv(history);
  std::size_t rows = 0;
  for (char ch : curves) rows += ch == '\n';
  EXPECT_EQ(rows, 1u + 12u);
  EXPECT_NE(curves.find("2,b,1e-05\n"), std::string::npos);
  EXPECT_NE(curves.find("2,c,inf\n"), std::string::npos);
  EXPECT_EQ(curves.substr(0, 23), "epoch,series_name,value");
  EXPECT_EQ(CurvesCsv(history), curves);
}

TEST(HistoryCsvTest, ColumnsAndFormatting) {
  EpochHistory h;
  EpochRecord r;
  r.epoch = 1;
  r.train_loss = 0.1;
  r.gamma_u = {std::numeric_limits<double>::infinity(), 2.5};
  h.epochs.push_back(r);
  const std::string text = HistoryCsv(h, 2);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "epoch,train_loss,val_mse,val_mae,test_mse,test_mae,"
            "frac_uncertainty,frac_anomaly,frac_combined,skipped_samples,"
            "skipped_updates,gamma_u_0,gamma_u_1");
  EXPECT_NE(text.find("\n1,0.1,0,0,0,0,0,0,0,0,0,inf,2.5\n"), std::string::npos);
}

}  // namespace
}  // namespace sl
