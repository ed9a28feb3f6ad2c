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

#include "dialign/metrics.hpp"

#include <algorithm>
#include <string>

#include "dialign/error.hpp"

namespace dialign::metrics {

double alignment_level(const Eigen::MatrixXd& scores, int k) {
  if (k < 1 || k > scores.cols())
    throw ArgumentError("turn " + std::to_string(k) + " outside 1.." + std::to_string(scores.cols()));
  if (scores.rows() == 0) throw ArgumentError("alignment level over zero instances");
  return 100.0 * scores.col(k - 1).mean();
}

Eigen::MatrixXd alignment_scores(const std::vector<EpisodeRecord>& episodes) {
  if (episodes.empty()) return {};
  std::size_t turns = episodes.front().turns.size();
  for (const auto& ep : episodes) turns = std::min(turns, ep.turns.size());
  Eigen::MatrixXd scores(static_cast<Eigen::Index>(episodes.size()), static_cast<Eigen::Index>(turns));
  for (std::size_t i = 0; i < episodes.size(); ++i)
    for (std::size_t t = 0; t < turns; ++t)
      scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = episodes[i].turns[t].aligned ? 1.0 : 0.0;
  return scores;
}

double alignment_level(const std::vector<EpisodeRecord>& episodes, int k) {
  return alignment_level(alignment_scores(episodes), k);
}

AlignmentCurve alignment_curve(const std::vector<EpisodeRecord>& episodes) {
  const Eigen::MatrixXd scores = alignment_scores(episodes);
  AlignmentCurve curve;
  curve.instances = static_cast<std::size_t>(scores.rows());
  curve.values.resize(scores.cols());
  for (Eigen::Index k = 0; k < scores.cols(); ++k) curve.values(k) = alignment_level(scores, static_cast<int>(k + 1));
  return curve;
}

CurveSummary summarize(const Eigen::VectorXd& curve, Normalization mode) {
  CurveSummary s;
  if (curve.size() == 0) return s;
  s.average = curve.mean();
  const auto fit = fit_improvement(normalize_curve(curve, mode));
  s.n_ir = fit.slope;
  s.n_r2 = fit.r_squared;
  s.raw_r2 = fit_improvement(curve).r_squared;
  return s;
}

AgreementStats agreement_stats(const ConfusionMatrix& m) {
  if (m.tp < 0 || m.fp < 0 || m.fn < 0 || m.tn < 0) throw ArgumentError("negative confusion-matrix count");
  if (m.total() == 0) throw ArgumentError("agreement statistics over an empty confusion matrix");
  const double tp = static_cast<double>(m.tp), fp = static_cast<double>(m.fp);
  const double fn = static_cast<double>(m.fn), tn = static_cast<double>(m.tn);
  const double n = tp + fp + fn + tn;
  auto ratio = [](double a, double b) { return b > 0 ? a / b : 0.0; };

  AgreementStats s;
  s.accuracy = (tp + tn) / n;
  s.precision = ratio(tp, tp + fp);
  s.recall = ratio(tp, tp + fn);
  s.f1 = ratio(2 * tp, 2 * tp + fp + fn);
  s.specificity = ratio(tn, tn + fp);
  const double expected = ((tp + fp) * (tp + fn) + (fn + tn) * (fp + tn)) / (n * n);
  if (expected < 1.0) s.kappa = (s.accuracy - expected) / (1.0 - expected);
  return s;
}

ConfusionMatrix judge_confusion(const std::vector<EpisodeRecord>& episodes) {
  ConfusionMatrix m;
  for (const auto& ep : episodes)
    for (const auto& t : ep.turns) {
      const bool predicted = t.reward.response == 1.0;
      if (predicted && t.aligned) ++m.tp;
      else if (predicted) ++m.fp;
      else if (t.aligned) ++m.fn;
      else ++m.tn;
    }
  return m;
}

LongtermCurve longterm_profile_curve(const EpisodeRecord& episode, const std::vector<int>& checkpoints,
                                     const SlotMatcher& matcher) {
  LongtermCurve curve;
  for (int k : checkpoints) {
    if (k < 1 || k > static_cast<int>(episode.turns.size()))
      throw ArgumentError("checkpoint " + std::to_string(k) + " outside the " +
                          std::to_string(episode.turns.size()) + "-turn episode");
    const auto& turn = episode.turns[static_cast<std::size_t>(k - 1)];
    const auto pr = precision_recall(turn.action.estimate_update, turn.truth, matcher);
    LongtermPoint p;
    p.turn = k;
    p.profile_score = profile_reward(turn.action.estimate_update, turn.truth, matcher);
    p.theoretical_max = turn.theoretical_max;
    p.f1_ceiling = 2.0 * p.theoretical_max / (p.theoretical_max + 1.0);
    p.recall = pr.recall;
    curve.points.push_back(p);
  }
  if (!curve.points.empty()) {
    for (const auto& p : curve.points) curve.average_profile_score += p.profile_score;
    curve.average_profile_score /= static_cast<double>(curve.points.size());
  }
  return curve;
}

std::vector<int> default_checkpoints(int horizon) {
  std::vector<int> out{1};
  for (int k = 10; k <= horizon; k += 10) out.push_back(k);
  return out;
}

}  // namespace dialign::metrics
