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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "sl/artifacts.h"
#include "sl/cli.h"
#include "sl/dual_mask.h"
#include "sl/residual_archive.h"
#include "sl/run_config.h"
#include "sl/synthetic.h"
#include "sl/theorem1.h"
#include "sl/trainer.h"

namespace py = pybind11;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ByteArray =
    py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

template <typename T, typename A>
sl::Grid<T> ToGrid(const A& array) {
  if (array.ndim() != 2) throw py::value_error("expected a 2-D array");
  const auto rows = static_cast<std::size_t>(array.shape(0));
  const auto cols = static_cast<std::size_t>(array.shape(1));
  return sl::Grid<T>(rows, cols,
                     std::vector<T>(array.data(), array.data() + rows * cols));
}

template <typename T>
py::array_t<T> ToArray(const sl::Grid<T>& grid) {
  py::array_t<T> out({grid.rows(), grid.cols()});
  std::copy(grid.values().begin(), grid.values().end(), out.mutable_data());
  return out;
}

py::dict MetricsDict(const sl::Metrics& m) {
  py::dict d;
  d["mse"] = m.mse;
  d["mae"] = m.mae;
  return d;
}

// Runs one configured training job in memory and returns its history.
py::dict Train(const std::string& config_json) {
  const sl::RunConfig cfg = sl::ResolveConfig(config_json, {}, false);
  const sl::PreparedData data = sl::PrepareData(cfg.data);
  std::optional<sl::ForecasterParams> estimator;
  if (cfg.train.EffectiveRatios().anomaly > 0.0 ||
      cfg.train.mode == sl::AblationMode::kRandomMask) {
    estimator = sl::PretrainEstimator(data.train, cfg.estimator);
  }
  sl::TrainResult result;
  {
    py::gil_scoped_release release;
    result = sl::TrainAblation(cfg.train, data.train, data.val, data.test,
                               estimator ? &*estimator : nullptr);
  }
  py::list epochs;
  for (const auto& e : result.history.epochs) {
    py::dict row;
    row["epoch"] = e.epoch;
    row["train_loss"] = e.train_loss;
    row["val"] = MetricsDict(e.val);
    row["test"] = MetricsDict(e.test);
    row["frac_uncertainty"] = e.frac_uncertainty;
    row["frac_anomaly"] = e.frac_anomaly;
    row["frac_combined"] = e.frac_combined;
    epochs.append(row);
  }
  py::dict out;
  out["history"] = epochs;
  out["best_epoch"] = result.best_epoch;
  out["history_csv"] =
      sl::HistoryCsv(result.history, data.train.channels());
  out["checkpoint"] = py::bytes(sl::SerializeCheckpoint(result.best));
  return out;
}

py::tuple RunCli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code;
  {
    py::gil_scoped_release release;
    code = sl::Dispatch(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Selective learning for time series forecasting (C++ core).";

  py::register_exception<sl::Error>(m, "Error", PyExc_RuntimeError);

  m.def("entropy_of_variance", &sl::EntropyOfVariance, py::arg("variance"),
        "Differential entropy of a Gaussian with the given variance.");
  m.def("n_expected", &sl::NExpected, py::arg("t"), py::arg("lookback"),
        py::arg("horizon"));
  m.def(
      "anomaly_scores",
      [](const DoubleArray& residual_f, const DoubleArray& residual_g) {
        return ToArray(sl::AnomalyScores(ToGrid<double>(residual_f),
                                         ToGrid<double>(residual_g)));
      },
      py::arg("residual_f"), py::arg("residual_g"));
  m.def(
      "anomaly_mask",
      [](const DoubleArray& scores, double r_a) {
        return ToArray(sl::AnomalyMask(ToGrid<double>(scores), r_a).mask);
      },
      py::arg("scores"), py::arg("r_a"),
      "Kept-mask (1 = kept) dropping the lowest scores per channel.");
  m.def(
      "uncertainty_thresholds",
      [](const DoubleArray& entropies, double r_u, int epoch) {
        return sl::UpdateUncertaintyThresholds(ToGrid<double>(entropies), r_u,
                                               epoch)
            .gamma;
      },
      py::arg("entropies"), py::arg("r_u"), py::arg("epoch") = 2);
  m.def(
      "selective_loss",
      [](const DoubleArray& pred, const DoubleArray& target,
         const ByteArray& mask) {
        return sl::SelectiveLoss(ToGrid<double>(pred), ToGrid<double>(target),
                                 ToGrid<std::uint8_t>(mask));
      },
      py::arg("pred"), py::arg("target"), py::arg("mask"));
  m.def(
      "synth_clean",
      [](std::size_t length, std::size_t channels, std::uint64_t seed) {
        sl::SynthConfig cfg;
        cfg.length = length;
        cfg.channels = channels;
        cfg.seed = seed;
        return ToArray(sl::SynthClean(cfg).values());
      },
      py::arg("length"), py::arg("channels") = 1, py::arg("seed") = 0);
  m.def("theorem1_bound", &sl::Theorem1Bound, py::arg("lipschitz"),
        py::arg("residual_bound"), py::arg("lr"), py::arg("clip_norm"),
        py::arg("iterations_per_epoch"));
  m.def(
      "resolve_config",
      [](const std::string& text) {
        return sl::ResolvedConfigJson(sl::ResolveConfig(text, {}, false));
      },
      py::arg("config_json") = "",
      "Fully resolved configuration as JSON text.");
  m.def("train", &Train, py::arg("config_json"),
        "Trains in memory and returns the per-epoch history.");
  m.def("run_cli", &RunCli, py::arg("args"),
        "Runs a slearn command; returns (exit_code, stdout, stderr).");
}
