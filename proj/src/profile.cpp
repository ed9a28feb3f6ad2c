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

#include "dialign/profile.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include "dialign/data.hpp"
#include "dialign/error.hpp"
#include "dialign/rng.hpp"

namespace dialign {

SlotSchema::SlotSchema(std::string name, std::vector<std::string> slots, bool open_schema)
    : name_(std::move(name)), slots_(std::move(slots)), open_(open_schema) {
  if (name_.empty()) throw ConfigError("slot schema needs a name");
  if (slots_.empty() && !open_) throw ConfigError("closed slot schema '" + name_ + "' has no slots");
  std::set<std::string> seen;
  for (const auto& s : slots_) {
    auto key = normalize_text(s);
    if (key.empty()) throw ConfigError("empty slot name in schema '" + name_ + "'");
    if (!seen.insert(key).second) throw ConfigError("duplicate slot '" + s + "' in schema '" + name_ + "'");
  }
}

SchemaPtr SlotSchema::aloe() {
  static const SchemaPtr schema = [] {
    const auto& spec = data::value_pools().at("closed_schema");
    return std::make_shared<const SlotSchema>(spec.at("name").get<std::string>(),
                                              spec.at("slots").get<std::vector<std::string>>(), false);
  }();
  return schema;
}

std::optional<std::size_t> SlotSchema::index_of(std::string_view slot) const {
  const auto key = normalize_text(slot);
  for (std::size_t i = 0; i < slots_.size(); ++i)
    if (normalize_text(slots_[i]) == key) return i;
  return std::nullopt;
}

bool SlotSchema::accepts(std::string_view slot) const {
  if (normalize_text(slot).empty()) return false;
  return open_ || index_of(slot).has_value();
}

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c) || std::ispunct(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::vector<std::string> normalized_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  const auto norm = normalize_text(text);
  std::size_t pos = 0;
  while (pos < norm.size()) {
    auto next = norm.find(' ', pos);
    if (next == std::string::npos) next = norm.size();
    tokens.emplace_back(norm.substr(pos, next - pos));
    pos = next + 1;
  }
  return tokens;
}

// ---------------------------------------------------------------------------

Profile::Profile() : schema_(SlotSchema::aloe()) {}

Profile::Profile(SchemaPtr schema) : schema_(std::move(schema)) {
  if (!schema_) throw ConfigError("profile requires a schema");
}

Profile& Profile::set(std::string_view slot, std::string_view value) {
  if (!schema_->accepts(slot))
    throw SchemaError("slot '" + std::string(slot) + "' is not declared by schema '" + schema_->name() + "'");
  if (normalize_text(value).empty())
    throw ArgumentError("slot '" + std::string(slot) + "' needs a non-empty value");
  const auto key = normalize_text(slot);
  for (auto& [name, v] : entries_) {
    if (normalize_text(name) == key) {
      v = std::string(value);
      return *this;
    }
  }
  entries_.emplace_back(std::string(slot), std::string(value));
  return *this;
}

bool Profile::erase(std::string_view slot) {
  const auto key = normalize_text(slot);
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const Entry& e) { return normalize_text(e.first) == key; });
  if (it == entries_.end()) return false;
  entries_.erase(it);
  return true;
}

const std::string* Profile::find(std::string_view slot) const {
  const auto key = normalize_text(slot);
  for (const auto& [name, value] : entries_)
    if (normalize_text(name) == key) return &value;
  return nullptr;
}

bool operator==(const Profile& a, const Profile& b) {
  return a.schema_->name() == b.schema_->name() && a.entries_ == b.entries_;
}

// ---------------------------------------------------------------------------

SlotMatcher SlotMatcher::exact() { return SlotMatcher{}; }

SlotMatcher SlotMatcher::token_overlap(double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ArgumentError("token-overlap threshold must lie in [0,1]");
  SlotMatcher m;
  m.kind_ = Kind::TokenOverlap;
  m.threshold_ = threshold;
  return m;
}

SlotMatcher SlotMatcher::external(Predicate predicate, std::string label) {
  if (!predicate) throw ArgumentError("external matcher needs a predicate");
  SlotMatcher m;
  m.kind_ = Kind::External;
  m.external_ = std::move(predicate);
  m.label_ = std::move(label);
  return m;
}

SlotMatcher SlotMatcher::parse(std::string_view spec) {
  if (spec == "exact") return exact();
  constexpr std::string_view prefix = "token:";
  if (spec.starts_with(prefix)) {
    const auto rest = spec.substr(prefix.size());
    double thr = 0.0;
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), thr);
    if (ec != std::errc{} || ptr != rest.data() + rest.size())
      throw ArgumentError("bad token-overlap threshold in matcher spec '" + std::string(spec) + "'");
    return token_overlap(thr);
  }
  if (spec == "token") return token_overlap();
  throw ArgumentError("unknown matcher '" + std::string(spec) + "' (expected exact or token:<thr>)");
}

std::string SlotMatcher::describe() const {
  switch (kind_) {
    case Kind::ExactNormalized:
      return "exact";
    case Kind::TokenOverlap: {
      char buf[32];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), threshold_);
      return "token:" + std::string(buf, ptr);
    }
    case Kind::External:
      return label_;
  }
  return "unknown";
}

double jaccard(std::string_view a, std::string_view b) {
  auto ta = normalized_tokens(a);
  auto tb = normalized_tokens(b);
  std::sort(ta.begin(), ta.end());
  ta.erase(std::unique(ta.begin(), ta.end()), ta.end());
  std::sort(tb.begin(), tb.end());
  tb.erase(std::unique(tb.begin(), tb.end()), tb.end());
  if (ta.empty() && tb.empty()) return 1.0;
  std::vector<std::string> common;
  std::set_intersection(ta.begin(), ta.end(), tb.begin(), tb.end(), std::back_inserter(common));
  const double inter = static_cast<double>(common.size());
  return inter / (static_cast<double>(ta.size() + tb.size()) - inter);
}

bool SlotMatcher::operator()(std::string_view slot, std::string_view a, std::string_view b) const {
  switch (kind_) {
    case Kind::ExactNormalized:
      return normalize_text(a) == normalize_text(b);
    case Kind::TokenOverlap:
      return jaccard(a, b) >= threshold_;
    case Kind::External:
      return external_(slot, a, b);
  }
  return false;
}

// ---------------------------------------------------------------------------

std::size_t overlap_count(const Profile& estimate, const Profile& truth, const SlotMatcher& matcher) {
  if (estimate.schema().name() != truth.schema().name())
    throw SchemaError("profile schemas differ: '" + estimate.schema().name() + "' vs '" + truth.schema().name() + "'");
  std::size_t count = 0;
  for (const auto& [slot, value] : estimate.entries()) {
    const std::string* expected = truth.find(slot);
    if (expected && matcher(slot, value, *expected)) ++count;
  }
  return count;
}

PrecisionRecall precision_recall(const Profile& estimate, const Profile& truth, const SlotMatcher& matcher) {
  if (truth.empty()) throw ConfigError("ground-truth profile is empty");
  const auto overlap = static_cast<double>(overlap_count(estimate, truth, matcher));
  PrecisionRecall pr;
  pr.precision = estimate.empty() ? 0.0 : overlap / static_cast<double>(estimate.size());
  pr.recall = overlap / static_cast<double>(truth.size());
  return pr;
}

double profile_reward(const Profile& estimate, const Profile& truth, const SlotMatcher& matcher) {
  if (truth.empty()) throw ConfigError("ground-truth profile is empty");
  const auto overlap = static_cast<double>(overlap_count(estimate, truth, matcher));
  return 2.0 * overlap / static_cast<double>(estimate.size() + truth.size());
}

// ---------------------------------------------------------------------------

std::string paraphrase_value(std::string_view slot, std::string_view value, std::uint64_t variant) {
  const auto& rules = data::paraphrase_rules();
  std::vector<std::string> prefixes;
  if (auto it = rules.at("slot_prefixes").find(std::string(slot)); it != rules.at("slot_prefixes").end())
    prefixes = it->get<std::vector<std::string>>();
  for (const auto& p : rules.at("generic_prefixes")) prefixes.push_back(p.get<std::string>());
  const auto case_rules = rules.at("case_rules").get<std::vector<std::string>>();

  const std::size_t choice = variant % (prefixes.size() + case_rules.size());
  std::string out(value);
  if (choice < prefixes.size()) return prefixes[choice] + " " + out;

  const auto& rule = case_rules[choice - prefixes.size()];
  if (rule == "upper") {
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
  } else if (rule == "title") {
    bool start = true;
    for (auto& c : out) {
      c = static_cast<char>(start ? std::toupper(static_cast<unsigned char>(c))
                                  : std::tolower(static_cast<unsigned char>(c)));
      start = std::isspace(static_cast<unsigned char>(c)) != 0;
    }
  } else {
    out += ".";
  }
  return out;
}

namespace {

// A substitute whose tokens barely overlap the original, so no reasonable
// matcher threshold accepts it.
std::string altered_value(const std::string& slot, const std::string& value, Rng& rng) {
  std::vector<std::string> candidates;
  for (auto& v : data::pool_for(slot))
    if (jaccard(v, value) < 0.25) candidates.push_back(std::move(v));
  if (candidates.empty()) return "unrelated " + std::to_string(rng() % 1000) + " detail";
  return candidates[uniform_index(rng, candidates.size())];
}

}  // namespace

OverlapBenchCase build_overlap_bench(const Profile& source, std::size_t a, std::size_t b, std::uint64_t seed) {
  if (a + b > source.size())
    throw ArgumentError("a + b = " + std::to_string(a + b) + " exceeds the " + std::to_string(source.size()) +
                        " source entries");
  Rng rng(seed);
  std::vector<std::size_t> order(source.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  shuffle(std::span(order), rng);

  // 1 = paraphrase, 2 = alter, 0 = dropped.
  std::vector<int> role(source.size(), 0);
  for (std::size_t i = 0; i < a; ++i) role[order[i]] = 1;
  for (std::size_t i = a; i < a + b; ++i) role[order[i]] = 2;

  OverlapBenchCase bench{source, Profile(source.schema_ptr()), a, b};
  for (std::size_t i = 0; i < source.size(); ++i) {
    const auto& [slot, value] = source.entries()[i];
    if (role[i] == 1) bench.rewritten.set(slot, paraphrase_value(slot, value, rng()));
    if (role[i] == 2) bench.rewritten.set(slot, altered_value(slot, value, rng));
  }
  return bench;
}

MatcherReport score_overlap_predictions(const std::vector<std::size_t>& predicted,
                                        const std::vector<std::size_t>& truth) {
  if (predicted.empty()) throw ArgumentError("matcher evaluation needs at least one case");
  if (predicted.size() != truth.size()) throw ArgumentError("prediction and truth counts differ");
  MatcherReport r;
  r.cases = predicted.size();
  double exact = 0, fuzzy = 0, sq = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double err = static_cast<double>(predicted[i]) - static_cast<double>(truth[i]);
    exact += err == 0.0;
    fuzzy += std::abs(err) <= 1.0;
    sq += err * err;
  }
  const auto n = static_cast<double>(r.cases);
  r.exact_acc = exact / n;
  r.fuzzy_acc = fuzzy / n;
  r.mse = sq / n;
  r.rmse = std::sqrt(r.mse);
  return r;
}

MatcherReport eval_matcher(const std::vector<OverlapBenchCase>& cases, const SlotMatcher& matcher) {
  if (cases.empty()) throw ArgumentError("matcher evaluation needs at least one case");
  std::vector<std::size_t> predicted, truth;
  for (const auto& c : cases) {
    predicted.push_back(overlap_count(c.rewritten, c.original, matcher));
    truth.push_back(c.ground_truth_overlap);
  }
  return score_overlap_predictions(predicted, truth);
}

}  // namespace dialign
