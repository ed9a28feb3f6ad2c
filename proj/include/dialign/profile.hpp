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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dialign {

/// Named, ordered set of slot names. Closed schemas reject unknown slots on
/// insertion; open schemas accept any non-empty name.
class SlotSchema {
 public:
  SlotSchema(std::string name, std::vector<std::string> slots, bool open_schema = false);

  /// The ten-field default schema.
  static std::shared_ptr<const SlotSchema> aloe();

  const std::string& name() const { return name_; }
  const std::vector<std::string>& slots() const { return slots_; }
  bool open() const { return open_; }

  /// Index of a slot by normalized name, if declared.
  std::optional<std::size_t> index_of(std::string_view slot) const;
  bool accepts(std::string_view slot) const;

 private:
  std::string name_;
  std::vector<std::string> slots_;
  bool open_;
};

using SchemaPtr = std::shared_ptr<const SlotSchema>;

/// Case fold, punctuation to space, whitespace collapse, trim.
std::string normalize_text(std::string_view text);
std::vector<std::string> normalized_tokens(std::string_view text);
/// Jaccard index of the normalized token sets; 1 when both are empty.
double jaccard(std::string_view a, std::string_view b);

/// Slot-value mapping over a schema. Entries keep insertion order; slot names
/// are stored verbatim and are unique after normalization.
class Profile {
 public:
  using Entry = std::pair<std::string, std::string>;

  /// Empty profile over the built-in closed schema.
  Profile();
  explicit Profile(SchemaPtr schema);

  const SlotSchema& schema() const { return *schema_; }
  const SchemaPtr& schema_ptr() const { return schema_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Inserts or replaces. Throws SchemaError for a slot the closed schema
  /// does not declare and ArgumentError for an empty value.
  Profile& set(std::string_view slot, std::string_view value);
  bool erase(std::string_view slot);
  const std::string* find(std::string_view slot) const;
  bool contains(std::string_view slot) const { return find(slot) != nullptr; }

  friend bool operator==(const Profile& a, const Profile& b);

 private:
  SchemaPtr schema_;
  std::vector<Entry> entries_;
};

/// Value-equality predicate on (slot, value, value). Symmetric and reflexive.
class SlotMatcher {
 public:
  enum class Kind { ExactNormalized, TokenOverlap, External };
  using Predicate = std::function<bool(std::string_view slot, std::string_view a, std::string_view b)>;

  static SlotMatcher exact();
  /// Jaccard similarity of normalized token sets, accepted at >= threshold.
  static SlotMatcher token_overlap(double threshold = 0.5);
  static SlotMatcher external(Predicate predicate, std::string label = "external");
  /// Parses "exact" or "token:<threshold>".
  static SlotMatcher parse(std::string_view spec);

  Kind kind() const { return kind_; }
  double threshold() const { return threshold_; }
  std::string describe() const;

  bool operator()(std::string_view slot, std::string_view a, std::string_view b) const;

 private:
  Kind kind_ = Kind::ExactNormalized;
  double threshold_ = 1.0;
  Predicate external_;
  std::string label_;
};

/// Number of estimate entries whose slot exists in truth and whose value
/// matches. Throws SchemaError when the profiles use different schemas.
std::size_t overlap_count(const Profile& estimate, const Profile& truth, const SlotMatcher& matcher);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

/// Slot-wise precision and recall. Precision of an empty estimate is 0.
/// Throws ConfigError for an empty truth.
PrecisionRecall precision_recall(const Profile& estimate, const Profile& truth, const SlotMatcher& matcher);

/// F1 profile reward, 2|E ∩ T| / (|E| + |T|). Throws ConfigError for an empty truth.
double profile_reward(const Profile& estimate, const Profile& truth, const SlotMatcher& matcher);

// ---------------------------------------------------------------------------
// Overlap-estimation benchmark

struct OverlapBenchCase {
  Profile original;
  Profile rewritten;
  std::size_t ground_truth_overlap = 0;  // a: paraphrased items
  std::size_t altered_count = 0;         // b: items replaced by different content
};

/// Rewrites a paraphrased items and b altered items of source (disjoint,
/// seeded). The rewritten profile holds only those a + b items.
OverlapBenchCase build_overlap_bench(const Profile& source, std::size_t a, std::size_t b, std::uint64_t seed);

/// Deterministic meaning-preserving rewrite of a value, driven by the bundled
/// paraphrase table. variant selects the rule.
std::string paraphrase_value(std::string_view slot, std::string_view value, std::uint64_t variant);

struct MatcherReport {
  double exact_acc = 0.0;
  double fuzzy_acc = 0.0;
  double mse = 0.0;
  double rmse = 0.0;
  std::size_t cases = 0;
};

/// Scores predicted overlap counts against ground truth.
MatcherReport score_overlap_predictions(const std::vector<std::size_t>& predicted,
                                        const std::vector<std::size_t>& truth);

/// Runs the matcher over every case (predicted = overlap_count(rewritten, original)).
MatcherReport eval_matcher(const std::vector<OverlapBenchCase>& cases, const SlotMatcher& matcher);

}  // namespace dialign
