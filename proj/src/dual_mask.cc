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

#include "sl/dual_mask.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sl/errors.h"

namespace sl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

void MaskRatios::Validate() const {
  auto ok = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!ok(uncertainty)) throw ValidationError("r_u must lie in [0, 1]");
  if (!ok(anomaly)) throw ValidationError("r_a must lie in [0, 1]");
}

std::size_t RatioCount(double ratio, std::size_t n) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw ContractError("ratio must lie in [0, 1]");
  }
  const double raw = std::floor(ratio * static_cast<double>(n) + 1e-9);
  return std::min(n, static_cast<std::size_t>(raw));
}

UncertaintyThresholds DisabledThresholds(std::size_t channels) {
  return {std::vector<double>(channels, kInf), 0};
}

Matrix EntropyTable(const ResidualArchive& archive) {
  Matrix out(archive.segment_length(), archive.channels(), -kInf);
  for (std::size_t t = 0; t < archive.segment_length(); ++t) {
    for (std::size_t c = 0; c < archive.channels(); ++c) {
      if (auto stats = archive.Variance(t, c)) out(t, c) = Entropy(*stats);
    }
  }
  return out;
}

double UpperThreshold(std::vector<double> values, double ratio) {
  std::erase_if(values, [](double v) { return !std::isfinite(v); });
  const std::size_t n = values.size();
  const std::size_t k = RatioCount(ratio, n);
  if (k == 0) return kInf;
  if (k == n) return -kInf;
  // The (n-k)-th smallest value: exactly k distinct values exceed it.
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(n - k - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

UncertaintyThresholds UpdateUncertaintyThresholds(const Matrix& entropies,
                                                  double r_u, int epoch) {
  UncertaintyThresholds out{std::vector<double>(entropies.cols(), kInf),
                            epoch};
  if (r_u == 0.0) return out;
  for (std::size_t c = 0; c < entropies.cols(); ++c) {
    out.gamma[c] = UpperThreshold(entropies.column(c), r_u);
  }
  return out;
}

UncertaintyThresholds UpdateUncertaintyThresholds(
    const ResidualArchive& archive, double r_u, int epoch) {
  return UpdateUncertaintyThresholds(EntropyTable(archive), r_u, epoch);
}

Mask UncertaintyMask(const Matrix& entropies,
                     const UncertaintyThresholds& thresholds) {
  if (thresholds.gamma.size() != entropies.cols()) {
    throw ContractError("threshold count does not match channel count");
  }
  Mask mask(entropies.rows(), entropies.cols(), 1);
  for (std::size_t r = 0; r < entropies.rows(); ++r) {
    for (std::size_t c = 0; c < entropies.cols(); ++c) {
      if (entropies(r, c) > thresholds.gamma[c]) mask(r, c) = 0;
    }
  }
  return mask;
}

Matrix AnomalyScores(const Matrix& residual_f, const Matrix& residual_g) {
  RequireSameShape(residual_f, residual_g, "AnomalyScores");
  Matrix out(residual_f.rows(), residual_f.cols());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values()[i] =
        std::abs(residual_f.values()[i]) - std::abs(residual_g.values()[i]);
  }
  return out;
}

std::size_t NominalAnomalyCount(std::size_t horizon, double r_a) {
  if (horizon == 0) return 0;
  return std::min(RatioCount(r_a, horizon), horizon - 1);
}

AnomalyMaskResult AnomalyMask(const Matrix& scores, double r_a) {
  const std::size_t f = scores.rows();
  AnomalyMaskResult out{Mask(f, scores.cols(), 1),
                        std::vector<double>(scores.cols(), -kInf)};
  const std::size_t k = NominalAnomalyCount(f, r_a);
  if (k == 0) return out;
  std::vector<std::size_t> order(f);
  for (std::size_t c = 0; c < scores.cols(); ++c) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return scores(a, c) < scores(b, c);
                     });
    const double gamma = scores(order[k], c);
    out.gamma[c] = gamma;
    for (std::size_t i = 0; i < f; ++i) {
      if (scores(i, c) < gamma) out.mask(i, c) = 0;
    }
  }
  return out;
}

Mask AllKept(std::size_t rows, std::size_t cols) {
  return Mask(rows, cols, 1);
}

Mask Combine(const Mask& uncertainty, const Mask& anomaly) {
  RequireSameShape(uncertainty, anomaly, "Combine");
  Mask out(uncertainty.rows(), uncertainty.cols());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values()[i] =
        (uncertainty.values()[i] != 0 && anomaly.values()[i] != 0) ? 1 : 0;
  }
  return out;
}

std::size_t KeptCount(const Mask& mask) {
  std::size_t n = 0;
  for (auto v : mask.values()) n += v != 0;
  return n;
}

double SelectiveLoss(const Matrix& pred, const Matrix& target,
                     const Mask& mask) {
  RequireSameShape(pred, target, "SelectiveLoss");
  RequireSameShape(pred, mask, "SelectiveLoss");
  const std::size_t kept = KeptCount(mask);
  if (kept == 0) throw DegenerateMaskError();
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (mask.values()[i] == 0) continue;
    const double d = target.values()[i] - pred.values()[i];
    sum += d * d;
  }
  return sum / static_cast<double>(kept);
}

Matrix SelectiveLossGrad(const Matrix& pred, const Matrix& target,
                         const Mask& mask) {
  RequireSameShape(pred, target, "SelectiveLossGrad");
  RequireSameShape(pred, mask, "SelectiveLossGrad");
  const std::size_t kept = KeptCount(mask);
  if (kept == 0) throw DegenerateMaskError();
  const double scale = 2.0 / static_cast<double>(kept);
  Matrix grad(pred.rows(), pred.cols(), 0.0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (mask.values()[i] == 0) continue;
    grad.values()[i] = scale * (pred.values()[i] - target.values()[i]);
  }
  return grad;
}

double MseLoss(const Matrix& pred, const Matrix& target) {
  return SelectiveLoss(pred, target, AllKept(pred.rows(), pred.cols()));
}

Matrix MseLossGrad(const Matrix& pred, const Matrix& target) {
  return SelectiveLossGrad(pred, target, AllKept(pred.rows(), pred.cols()));
}

}  // namespace sl
