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

#include <doctest.h>

#include <cmath>

#include "dialign/error.hpp"
#include "dialign/profile.hpp"
#include "dialign/rng.hpp"
#include "oracles.hpp"

using namespace dialign;

namespace {

Profile make(std::initializer_list<std::pair<const char*, const char*>> entries) {
  Profile p(SlotSchema::aloe());
  for (const auto& [s, v] : entries) p.set(s, v);
  return p;
}

oracle::Entries entries_of(const Profile& p) { return {p.entries().begin(), p.entries().end()}; }

Profile random_profile(Rng& rng) {
  static const std::vector<std::string> values = {"34", "Paris", "paris", "nurse", "Nurse.", "teacher", "  34 "};
  const auto& slots = SlotSchema::aloe()->slots();
  Profile p(SlotSchema::aloe());
  const std::size_t n = uniform_index(rng, 11);
  std::vector<std::size_t> idx(slots.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  shuffle(std::span<std::size_t>(idx), rng);
  for (std::size_t i = 0; i < n; ++i) p.set(slots[idx[i]], values[uniform_index(rng, values.size())]);
  return p;
}

const auto kExact = SlotMatcher::exact();

}  // namespace

TEST_SUITE("profile") {
  TEST_CASE("closed schema holds the ten default fields and rejects unknown slots") {
    const auto schema = SlotSchema::aloe();
    REQUIRE(schema->slots().size() == 10);
    CHECK(schema->slots().front() == "Age");
    CHECK(schema->slots().back() == "Others");
    CHECK_FALSE(schema->open());
    Profile p(schema);
    CHECK_THROWS_AS(p.set("Favorite Food", "ramen"), SchemaError);
    CHECK_THROWS_AS(p.set("Age", ""), ArgumentError);
    p.set("age", "34");
    p.set("AGE", "35");
    CHECK(p.size() == 1);
    CHECK(*p.find("Age") == "35");
  }

  TEST_CASE("open schema accepts unseen slot names") {
    auto schema = std::make_shared<const SlotSchema>("open", std::vector<std::string>{"Pet"}, true);
    Profile p(schema);
    p.set("Favorite Food", "ramen");
    CHECK(p.contains("favorite food"));
  }

  TEST_CASE("schema validation") {
    CHECK_THROWS_AS(SlotSchema("x", {}), ConfigError);
    CHECK_THROWS_AS(SlotSchema("x", {"Age", "age"}), ConfigError);
  }

  TEST_CASE("normalization folds case, punctuation and whitespace") {
    CHECK(normalize_text("  Hello,   World!! ") == "hello world");
    CHECK(normalize_text("Nurse.") == "nurse");
    CHECK(normalized_tokens("rock-climbing and jazz") == std::vector<std::string>{"rock", "climbing", "and", "jazz"});
  }

  TEST_CASE("overlap count examples") {
    const auto truth5 = make({{"Age", "34"}, {"Gender", "female"}, {"Occupation", "teacher"}, {"Location", "Paris"},
                              {"Interests", "skiing"}});
    CHECK(overlap_count(truth5, truth5, kExact) == 5);
    CHECK(overlap_count(Profile(SlotSchema::aloe()), truth5, kExact) == 0);
    const auto estimate =
        make({{"Age", "34"}, {"Gender", "female"}, {"Occupation", "nurse"}, {"Location", "Paris"}});
    CHECK(overlap_count(estimate, truth5, kExact) == oracle::overlap(entries_of(estimate), entries_of(truth5)));
    CHECK(overlap_count(estimate, truth5, kExact) == 3);
  }

  TEST_CASE("profiles from different schemas cannot be compared") {
    auto other = std::make_shared<const SlotSchema>("other", std::vector<std::string>{"Age"}, true);
    Profile a(other);
    a.set("Age", "34");
    CHECK_THROWS_AS(overlap_count(a, make({{"Age", "34"}}), kExact), SchemaError);
  }

  TEST_CASE("profile reward examples") {
    const auto truth5 = make({{"Age", "34"}, {"Gender", "female"}, {"Occupation", "teacher"}, {"Location", "Paris"},
                              {"Interests", "skiing"}});
    const auto estimate =
        make({{"Age", "34"}, {"Gender", "female"}, {"Occupation", "nurse"}, {"Location", "Paris"}});
    CHECK(profile_reward(estimate, truth5, kExact) == doctest::Approx(6.0 / 9.0).epsilon(1e-12));
    CHECK(profile_reward(truth5, truth5, kExact) == 1.0);

    Profile truth10(SlotSchema::aloe());
    for (const auto& s : SlotSchema::aloe()->slots()) truth10.set(s, "x");
    CHECK(profile_reward(Profile(SlotSchema::aloe()), truth10, kExact) == 0.0);
    CHECK_THROWS_AS(profile_reward(estimate, Profile(SlotSchema::aloe()), kExact), ConfigError);
  }

  TEST_CASE("precision and recall") {
    const auto truth5 = make({{"Age", "34"}, {"Gender", "female"}, {"Occupation", "teacher"}, {"Location", "Paris"},
                              {"Interests", "skiing"}});
    const auto estimate =
        make({{"Age", "34"}, {"Gender", "female"}, {"Occupation", "nurse"}, {"Location", "Paris"}});
    const auto pr = precision_recall(estimate, truth5, kExact);
    CHECK(pr.precision == doctest::Approx(0.75));
    CHECK(pr.recall == doctest::Approx(0.6));
    const double harmonic = 2 * pr.precision * pr.recall / (pr.precision + pr.recall);
    CHECK(harmonic == doctest::Approx(profile_reward(estimate, truth5, kExact)));
    const auto perfect = precision_recall(truth5, truth5, kExact);
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    const auto empty = precision_recall(Profile(SlotSchema::aloe()), truth5, kExact);
    CHECK(empty.precision == 0.0);
    CHECK(empty.recall == 0.0);
  }

  TEST_CASE("overlap and F1 agree with the brute-force oracle on random pairs") {
    Rng rng(2024);
    for (int i = 0; i < 1000; ++i) {
      const auto e = random_profile(rng);
      auto t = random_profile(rng);
      if (t.empty()) t.set("Age", "34");
      const auto oe = entries_of(e), ot = entries_of(t);
      REQUIRE(overlap_count(e, t, kExact) == oracle::overlap(oe, ot));
      REQUIRE(profile_reward(e, t, kExact) == oracle::f1(oe, ot));
      if (!e.empty()) REQUIRE(profile_reward(e, t, kExact) == profile_reward(t, e, kExact));
      const double r = profile_reward(e, t, kExact);
      REQUIRE(r >= 0.0);
      REQUIRE(r <= 1.0);
      const bool identical = e.size() == t.size() && overlap_count(e, t, kExact) == t.size();
      REQUIRE((r == 1.0) == identical);
    }
  }

  TEST_CASE("adding entries moves recall and overlap the right way") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
      auto truth = random_profile(rng);
      if (truth.empty()) continue;
      auto estimate = random_profile(rng);
      const auto before = precision_recall(estimate, truth, kExact);
      const std::size_t overlap_before = overlap_count(estimate, truth, kExact);

      auto with_correct = estimate;
      const auto& [slot, value] = truth.entries()[uniform_index(rng, truth.size())];
      with_correct.set(slot, value);
      CHECK(precision_recall(with_correct, truth, kExact).recall >= before.recall);

      for (const auto& s : SlotSchema::aloe()->slots()) {
        if (truth.contains(s) || estimate.contains(s)) continue;
        auto with_wrong = estimate;
        with_wrong.set(s, "absent");
        CHECK(overlap_count(with_wrong, truth, kExact) <= overlap_before);
        break;
      }
    }
  }

  TEST_CASE("matchers are symmetric and reflexive") {
    const std::vector<SlotMatcher> matchers = {SlotMatcher::exact(), SlotMatcher::token_overlap(),
                                               SlotMatcher::token_overlap(0.3)};
    const std::vector<std::string> values = {"jazz", "Jazz!", "jazz and blues", "cool jazz music", "hiking", ""};
    for (const auto& m : matchers)
      for (const auto& a : values) {
        CHECK(m("Interests", a, a));
        for (const auto& b : values) CHECK(m("Interests", a, b) == m("Interests", b, a));
      }
    CHECK(SlotMatcher::exact()("Interests", "Jazz!", "jazz"));
    CHECK_FALSE(SlotMatcher::exact()("Interests", "jazz and blues", "jazz"));
    CHECK(SlotMatcher::token_overlap(0.5)("Interests", "jazz and blues", "blues and jazz"));
    CHECK_FALSE(SlotMatcher::token_overlap(0.5)("Interests", "jazz and blues", "jazz"));
    CHECK(jaccard("jazz and blues", "jazz") == doctest::Approx(1.0 / 3.0));
  }

  TEST_CASE("matcher specs") {
    CHECK(SlotMatcher::parse("exact").describe() == "exact");
    CHECK(SlotMatcher::parse("token").threshold() == 0.5);
    CHECK(SlotMatcher::parse("token:0.25").threshold() == 0.25);
    CHECK(SlotMatcher::parse("token:0.25").describe() == "token:0.25");
    CHECK_THROWS_AS(SlotMatcher::parse("token:1.5"), ArgumentError);
    CHECK_THROWS_AS(SlotMatcher::parse("fuzzy"), ArgumentError);
    const auto ext = SlotMatcher::external([](std::string_view, std::string_view, std::string_view) { return true; });
    CHECK(ext("Age", "1", "2"));
  }

  TEST_CASE("overlap bench construction") {
    Profile source(SlotSchema::aloe());
    const char* values[] = {"34", "female", "jazz and film", "masters in biology", "curious and calm",
                            "nurse", "married", "two siblings", "Lisbon", "plays chess"};
    for (std::size_t i = 0; i < 10; ++i) source.set(SlotSchema::aloe()->slots()[i], values[i]);

    const auto token = SlotMatcher::token_overlap();
    SUBCASE("paraphrase only") {
      const auto c = build_overlap_bench(source, 5, 0, 11);
      CHECK(c.ground_truth_overlap == 5);
      CHECK(c.rewritten.size() == 5);
      CHECK(overlap_count(c.rewritten, c.original, token) == 5);
    }
    SUBCASE("everything altered") {
      const auto c = build_overlap_bench(source, 0, 10, 11);
      CHECK(c.ground_truth_overlap == 0);
      CHECK(c.altered_count == 10);
      CHECK(overlap_count(c.rewritten, c.original, token) == 0);
    }
    SUBCASE("mixed on a seven-entry profile") {
      Profile seven(SlotSchema::aloe());
      for (std::size_t i = 0; i < 7; ++i) seven.set(source.entries()[i].first, source.entries()[i].second);
      const auto c = build_overlap_bench(seven, 3, 2, 5);
      CHECK(c.ground_truth_overlap == 3);
      CHECK(c.rewritten.size() == 5);
      CHECK(overlap_count(c.rewritten, c.original, token) == 3);
    }
    SUBCASE("reproducible from the seed") {
      CHECK(build_overlap_bench(source, 4, 3, 99).rewritten == build_overlap_bench(source, 4, 3, 99).rewritten);
    }
    CHECK_THROWS_AS(build_overlap_bench(source, 6, 5, 1), ArgumentError);
  }

  TEST_CASE("token matcher admits every paraphrase rule") {
    Profile source(SlotSchema::aloe());
    for (const auto& s : SlotSchema::aloe()->slots()) source.set(s, "value of " + s);
    std::vector<OverlapBenchCase> cases;
    for (std::uint64_t seed = 0; seed < 50; ++seed) cases.push_back(build_overlap_bench(source, 10, 0, seed));
    const auto report = eval_matcher(cases, SlotMatcher::token_overlap());
    CHECK(report.fuzzy_acc == 1.0);
    CHECK(report.exact_acc == 1.0);
  }

  TEST_CASE("overlap prediction scoring") {
    const auto r = score_overlap_predictions({4, 3, 5}, {4, 4, 3});
    CHECK(r.exact_acc == doctest::Approx(1.0 / 3.0));
    CHECK(r.fuzzy_acc == doctest::Approx(2.0 / 3.0));
    CHECK(r.mse == doctest::Approx(5.0 / 3.0));
    CHECK(r.rmse == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(r.fuzzy_acc >= r.exact_acc);

    const auto all = score_overlap_predictions({1, 2, 3}, {1, 2, 3});
    CHECK(all.exact_acc == 1.0);
    CHECK(all.fuzzy_acc == 1.0);
    CHECK(all.mse == 0.0);

    // Report-format fixture: 3 of 4 exact, one off by one.
    const auto row = score_overlap_predictions({1, 2, 3, 4}, {1, 2, 3, 3});
    CHECK(row.exact_acc == 0.75);
    CHECK(row.fuzzy_acc == 1.0);
    CHECK(row.mse == 0.25);
    CHECK(row.rmse == 0.5);

    CHECK_THROWS_AS(score_overlap_predictions({}, {}), ArgumentError);
    CHECK_THROWS_AS(eval_matcher({}, kExact), ArgumentError);
  }

  TEST_CASE("rmse squared reproduces mse") {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
      std::vector<std::size_t> p(1 + uniform_index(rng, 20)), t(p.size());
      for (std::size_t k = 0; k < p.size(); ++k) {
        p[k] = uniform_index(rng, 11);
        t[k] = uniform_index(rng, 11);
      }
      const auto r = score_overlap_predictions(p, t);
      CHECK(r.rmse * r.rmse == doctest::Approx(r.mse).epsilon(4e-16));
    }
  }
}
