// Copyright 2026 The dialign Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dialign/env.hpp"

namespace dialign::metrics {

/// AL(k) for k = 1..K, each a percentage in [0, 100].
struct AlignmentCurve {
  Eigen::VectorXd values;
  std::size_t instances = 0;
};

/// 100 x mean of column k - 1 of a (instances x turns) matrix of {0,1}
/// scores. Throws ArgumentError when k is out of range.
double alignment_level(const Eigen::MatrixXd& scores, int k);

/// Per-turn aligned flags of each episode as an (instances x turns) matrix,
/// truncated to the shortest episode.
Eigen::MatrixXd alignment_scores(const std::vector<EpisodeRecord>& episodes);

double alignment_level(const std::vector<EpisodeRecord>& episodes, int k);
AlignmentCurve alignment_curve(const std::vector<EpisodeRecord>& episodes);

enum class Normalization { Global, Running };

/// (AL(k) - m) / (M - m). Global uses the min/max over the whole curve;
/// Running uses the min/max over 1..k, with 0/0 mapped to 0.
/// Constant curves map to all zeros.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> normalize_curve(
    const Eigen::MatrixBase<Derived>& curve, Normalization mode = Normalization::Global) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = curve.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n);
  if (n == 0) return out;
  if (mode == Normalization::Global) {
    const Scalar lo = curve.minCoeff(), hi = curve.maxCoeff();
    if (hi > lo) out = ((curve.array() - lo) / (hi - lo)).matrix();
    return out;
  }
  Scalar lo = curve(0), hi = curve(0);
  for (Eigen::Index k = 0; k < n; ++k) {
    lo = std::min(lo, curve(k));
    hi = std::max(hi, curve(k));
    out(k) = hi > lo ? (curve(k) - lo) / (hi - lo) : Scalar(0);
  }
  return out;
}

template <typename Scalar>
struct RegressionFit {
  Scalar slope = 0;
  Scalar intercept = 0;
  Scalar r_squared = 0;
};

/// Ordinary least squares of y against k = 1..K. Zero-variance input yields
/// slope 0 and r^2 0.
template <typename Derived>
RegressionFit<typename Derived::Scalar> fit_improvement(const Eigen::MatrixBase<Derived>& y) {
  using Scalar = typename Derived::Scalar;
  RegressionFit<Scalar> fit;
  const Eigen::Index n = y.size();
  if (n == 0) return fit;
  const auto x = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::LinSpaced(n, Scalar(1), Scalar(n));
  const Scalar x_mean = x.mean(), y_mean = y.mean();
  const Scalar sxx = (x.array() - x_mean).square().sum();
  const Scalar syy = (y.array() - y_mean).square().sum();
  const Scalar sxy = ((x.array() - x_mean) * (y.array() - y_mean)).sum();
  fit.intercept = y_mean;
  if (n < 2 || syy <= Scalar(0) || sxx <= Scalar(0)) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = y_mean - fit.slope * x_mean;
  fit.r_squared = sxy * sxy / (sxx * syy);
  return fit;
}

/// Curve summary: mean AL, N-IR, N-R^2 and, as a diagnostic, the
/// r^2 of the raw curve.
struct CurveSummary {
  double average = 0.0;
  double n_ir = 0.0;
  double n_r2 = 0.0;
  double raw_r2 = 0.0;
};

CurveSummary summarize(const Eigen::VectorXd& curve, Normalization mode = Normalization::Global);

struct ConfusionMatrix {
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::int64_t total() const { return tp + fp + fn + tn; }
};

struct AgreementStats {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double specificity = 0.0;
  std::optional<double> kappa;  // undefined when expected agreement is 1
};

/// Throws ArgumentError for an empty matrix.
AgreementStats agreement_stats(const ConfusionMatrix& m);

/// Training judge (prediction) against truth-grounded alignment (reference),
/// over every logged turn.
ConfusionMatrix judge_confusion(const std::vector<EpisodeRecord>& episodes);

struct LongtermPoint {
  int turn = 0;
  double profile_score = 0.0;    // F1 profile reward of the estimate
  double theoretical_max = 0.0;  // fraction of attributes revealed
  double f1_ceiling = 0.0;       // best F1 reachable from what was revealed
  double recall = 0.0;
};

struct LongtermCurve {
  std::vector<LongtermPoint> points;
  double average_profile_score = 0.0;
};

/// Throws ArgumentError for a checkpoint outside the episode.
LongtermCurve longterm_profile_curve(const EpisodeRecord& episode, const std::vector<int>& checkpoints,
                                     const SlotMatcher& matcher = SlotMatcher::exact());

/// 1, 10, 20, ..., horizon.
std::vector<int> default_checkpoints(int horizon);

}  // namespace dialign::metrics
