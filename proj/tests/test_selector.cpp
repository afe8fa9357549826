// Copyright 2026 The Authors.
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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rumex/experiments.hpp"
#include "rumex/selector.hpp"

using namespace rumex;

namespace {

SelectionConfig base_cfg(UtilityMode mode, int k, double gamma) {
  SelectionConfig cfg;
  cfg.k = k;
  cfg.gamma = gamma;
  cfg.utility.mode = mode;
  cfg.utility.gamma = gamma;
  cfg.utility.alpha = 0.0;
  cfg.passes = 64;
  return cfg;
}

// lambda1 kept inside the checked bound so the monotonicity and the greedy
// guarantee apply
void set_bounded_lambda1(SelectionConfig& cfg, const CandidatePool& pool, Rng& rng) {
  Lambda1Check b = check_lambda1_bound(pool.sims, cfg.gamma, 0.0);
  cfg.utility.lambda1 = std::isinf(b.bound) ? rng.uniform() : rng.uniform() * b.bound;
}

double recompute(const Explanation& e, const CandidatePool& pool) {
  std::vector<int> members;
  for (const ExplanationMember& m : e.members) {
    for (std::size_t i = 0; i < pool.candidates.size(); ++i)
      if (pool.candidates[i].rumour_id == m.rumour_id) members.push_back(static_cast<int>(i));
  }
  return utility(members, pool.sims, e.config.utility);
}

}  // namespace

TEST_CASE("filter_candidates") {
  std::vector<Candidate> scored{{"s1", 0, 0.238}, {"s2", 1, 0.273},
                                {"s3", 2, 0.625}, {"s4", 3, 0.625}};
  SUBCASE("gamma 0 keeps everything") {
    CHECK(filter_candidates(scored, 0.0).size() == 4);
  }
  SUBCASE("gamma 1 keeps only exact matches") {
    CHECK(filter_candidates(scored, 1.0).empty());
    scored.push_back({"s5", 4, 1.0});
    auto f = filter_candidates(scored, 1.0);
    REQUIRE(f.size() == 1);
    CHECK(f[0].rumour_id == "s5");
  }
  SUBCASE("gamma 0.5 keeps the two strong candidates, earlier arrival first") {
    auto f = filter_candidates(scored, 0.5);
    REQUIRE(f.size() == 2);
    CHECK(f[0].rumour_id == "s3");  // same sim, lower arrival_seq
    CHECK(f[1].rumour_id == "s4");
  }
}

TEST_CASE("greedy selection") {
  Rng rng(1);
  SUBCASE("k = 1 picks the argmax-similarity candidate under content utility") {
    for (int t = 0; t < 50; ++t) {
      CandidatePool pool = random_candidate_pool(rng, 6, 0.2);
      SelectionConfig cfg = base_cfg(UtilityMode::Content, 1, 0.2);
      cfg.utility.lambda1 = rng.uniform(0.0, 2.0);  // first gain ignores lambda1
      Explanation e = greedy_select(pool, "q", cfg);
      REQUIRE(e.members.size() == 1);
      double best = 0.0;
      for (const Candidate& c : pool.candidates) best = std::max(best, c.sim);
      CHECK(e.members[0].sim == doctest::Approx(best));
    }
  }
  SUBCASE("empty candidate pool yields an empty explanation") {
    CandidatePool pool;
    Explanation e = greedy_select(pool, "q", base_cfg(UtilityMode::Hybrid, 3, 0.1));
    CHECK(e.members.empty());
    CHECK(e.utility_value == 0.0);
  }
  SUBCASE("achieves 1 - 1/e of the exhaustive optimum on random instances") {
    const double ratio = 1.0 - 1.0 / std::numbers::e;
    for (int t = 0; t < 200; ++t) {
      int m = 4 + static_cast<int>(rng.uniform_int(9));
      int k = 1 + static_cast<int>(rng.uniform_int(4));
      UtilityMode mode = static_cast<UtilityMode>(t % 3);
      CandidatePool pool = random_candidate_pool(rng, m, 0.1);
      SelectionConfig cfg = base_cfg(mode, k, 0.1);
      set_bounded_lambda1(cfg, pool, rng);
      cfg.utility.lambda2 = rng.uniform(0.0, 1.0);
      Explanation opt = brute_force_select(pool, "q", cfg);
      Explanation got = greedy_select(pool, "q", cfg);
      CHECK(got.utility_value >= ratio * opt.utility_value - 1e-9);
    }
  }
}

TEST_CASE("swap selection") {
  Rng rng(2);
  SUBCASE("an already-optimal initial set survives unchanged") {
    CandidatePool pool = random_candidate_pool(rng, 8, 0.1);
    SelectionConfig cfg = base_cfg(UtilityMode::Modality, 3, 0.1);
    cfg.utility.lambda2 = 0.7;
    Explanation opt = brute_force_select(pool, "q", cfg);
    std::vector<int> initial;
    for (const ExplanationMember& m : opt.members)
      for (std::size_t i = 0; i < pool.candidates.size(); ++i)
        if (pool.candidates[i].rumour_id == m.rumour_id)
          initial.push_back(static_cast<int>(i));
    Explanation e = swap_select(pool, "q", cfg, &initial);
    CHECK(e.utility_value == doctest::Approx(opt.utility_value));
  }
  SUBCASE("k = 1 converges to the best singleton") {
    for (int t = 0; t < 30; ++t) {
      CandidatePool pool = random_candidate_pool(rng, 7, 0.0);
      SelectionConfig cfg = base_cfg(UtilityMode::Hybrid, 1, 0.0);
      set_bounded_lambda1(cfg, pool, rng);
      cfg.utility.lambda2 = rng.uniform(0.0, 1.0);
      Explanation e = swap_select(pool, "q", cfg);
      double best = 0.0;
      for (std::size_t i = 0; i < pool.candidates.size(); ++i)
        best = std::max(best, utility({static_cast<int>(i)}, pool.sims, cfg.utility));
      CHECK(e.utility_value == doctest::Approx(best).epsilon(1e-9));
    }
  }
  SUBCASE("achieves half the optimum on random instances") {
    for (int t = 0; t < 150; ++t) {
      int m = 4 + static_cast<int>(rng.uniform_int(9));
      int k = 1 + static_cast<int>(rng.uniform_int(4));
      UtilityMode mode = static_cast<UtilityMode>(t % 3);
      CandidatePool pool = random_candidate_pool(rng, m, 0.1);
      SelectionConfig cfg = base_cfg(mode, k, 0.1);
      set_bounded_lambda1(cfg, pool, rng);
      cfg.utility.lambda2 = rng.uniform(0.0, 1.0);
      Explanation opt = brute_force_select(pool, "q", cfg);
      Explanation got = swap_select(pool, "q", cfg);
      CHECK(got.utility_value >= 0.5 * opt.utility_value - 1e-9);
    }
  }
}

TEST_CASE("one-pass swap selection") {
  Rng rng(3);
  SUBCASE("fills while below k, rejecting sub-gamma items") {
    SelectionConfig cfg = base_cfg(UtilityMode::Modality, 2, 0.5);
    cfg.utility.lambda2 = 0.5;
    OnePassState state("q", cfg);
    CHECK(state.observe({"a", 0, 0.4, 1.0, {}}, "q") == false);  // below gamma
    CHECK(state.observe({"b", 1, 0.6, 1.0, {}}, "q") == true);
    CHECK(state.observe({"c", 2, 0.9, 0.5, {}}, "q") == true);
    CHECK(state.members().size() == 2);
  }
  SUBCASE("a huge beta blocks every swap once full") {
    SelectionConfig cfg = base_cfg(UtilityMode::Modality, 2, 0.0);
    cfg.beta = 1e9;
    cfg.utility.lambda2 = 0.5;
    OnePassState state("q", cfg);
    state.observe({"a", 0, 0.1, 0.0, {}}, "q");
    state.observe({"b", 1, 0.2, 0.0, {}}, "q");
    CHECK(state.observe({"c", 2, 0.99, 3.0, {}}, "q") == false);
    CHECK(state.members()[0].rumour_id == "a");
  }
  SUBCASE("StaleQuery on a different query id") {
    OnePassState state("q", base_cfg(UtilityMode::Modality, 2, 0.0));
    CHECK_THROWS_AS(state.observe({"a", 0, 0.5, 0.0, {}}, "other"), Error);
  }
  SUBCASE("modality utility with beta = 2 achieves a quarter of the optimum") {
    for (int t = 0; t < 300; ++t) {
      int m = 4 + static_cast<int>(rng.uniform_int(9));
      int k = 1 + static_cast<int>(rng.uniform_int(4));
      CandidatePool pool = random_candidate_pool(rng, m, 0.1);
      SelectionConfig cfg = base_cfg(UtilityMode::Modality, k, 0.1);
      cfg.beta = 2.0;
      cfg.utility.lambda2 = rng.uniform(0.0, 1.0);
      OnePassState state("q", cfg);
      for (std::size_t i = 0; i < pool.candidates.size(); ++i) {
        OnePassState::Item item;
        item.rumour_id = pool.candidates[i].rumour_id;
        item.arrival_seq = pool.candidates[i].arrival_seq;
        item.sim = pool.candidates[i].sim;
        item.coverage = pool.sims.coverage[i];
        state.observe(item, "q");
      }
      Explanation opt = brute_force_select(pool, "q", cfg);
      CHECK(state.utility_value() >= 0.25 * opt.utility_value - 1e-9);
    }
  }
}

TEST_CASE("brute force oracle") {
  Rng rng(4);
  SUBCASE("selects everything when k covers the pool and gains are positive") {
    CandidatePool pool = random_candidate_pool(rng, 5, 0.1);
    SelectionConfig cfg = base_cfg(UtilityMode::Modality, 8, 0.1);
    cfg.utility.lambda2 = 0.5;
    Explanation e = brute_force_select(pool, "q", cfg);
    CHECK(e.members.size() == 5);
  }
  SUBCASE("a single candidate is chosen iff its utility is positive") {
    CandidatePool pool = random_candidate_pool(rng, 1, 0.3);
    SelectionConfig cfg = base_cfg(UtilityMode::Content, 3, 0.3);
    Explanation e = brute_force_select(pool, "q", cfg);
    CHECK(e.members.size() == 1);  // 2 * sim > 0
  }
  SUBCASE("refuses oversized pools") {
    CandidatePool pool = random_candidate_pool(rng, 40, 0.0);
    SelectionConfig cfg = base_cfg(UtilityMode::Content, 10, 0.0);
    CHECK_THROWS_AS(brute_force_select(pool, "q", cfg), Error);
  }
  SUBCASE("modular case: every strategy matches the oracle (top-k by sim)") {
    for (int t = 0; t < 40; ++t) {
      int m = 4 + static_cast<int>(rng.uniform_int(7));
      int k = 1 + static_cast<int>(rng.uniform_int(3));
      CandidatePool pool = random_candidate_pool(rng, m, 0.05);
      SelectionConfig cfg = base_cfg(static_cast<UtilityMode>(t % 3), k, 0.05);
      // lambda1 = lambda2 = 0 keeps every utility modular
      Explanation opt = brute_force_select(pool, "q", cfg);
      Explanation g = greedy_select(pool, "q", cfg);
      Explanation s = swap_select(pool, "q", cfg);
      CHECK(g.utility_value == doctest::Approx(opt.utility_value).epsilon(1e-9));
      CHECK(s.utility_value == doctest::Approx(opt.utility_value).epsilon(1e-9));
      // and the oracle's value equals the top-k sum under content scaling
      std::vector<double> sims;
      for (const Candidate& c : pool.candidates) sims.push_back(c.sim);
      std::sort(sims.rbegin(), sims.rend());
      double topk = 0.0;
      for (int i = 0; i < k && i < static_cast<int>(sims.size()); ++i) topk += sims[i];
      double scale = cfg.utility.mode == UtilityMode::Content
                         ? 2.0
                         : cfg.utility.mode == UtilityMode::Modality ? 1.0 : 3.0;
      CHECK(opt.utility_value == doctest::Approx(scale * topk).epsilon(1e-9));
    }
  }
}

TEST_CASE("explanations are deterministic, bounded, and recomputable") {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    int m = 3 + static_cast<int>(rng.uniform_int(9));
    int k = 1 + static_cast<int>(rng.uniform_int(4));
    double gamma = rng.uniform(0.0, 0.5);
    CandidatePool pool = random_candidate_pool(rng, m, gamma);
    SelectionConfig cfg = base_cfg(static_cast<UtilityMode>(t % 3), k, gamma);
    set_bounded_lambda1(cfg, pool, rng);
    cfg.utility.lambda2 = rng.uniform(0.0, 1.0);

    Explanation a = greedy_select(pool, "q", cfg);
    Explanation b = greedy_select(pool, "q", cfg);
    CHECK(explanation_to_json(a).dump() == explanation_to_json(b).dump());

    for (const Explanation* e : {&a}) {
      CHECK(static_cast<int>(e->members.size()) <= k);
      for (const ExplanationMember& mem : e->members) CHECK(mem.sim >= gamma);
      CHECK(recompute(*e, pool) == doctest::Approx(e->utility_value).epsilon(1e-9));
      // the recorded gains telescope to the utility
      double gains = 0.0;
      for (const ExplanationMember& mem : e->members) gains += mem.gain;
      CHECK(gains == doctest::Approx(e->utility_value).epsilon(1e-9));
    }
  }
}

TEST_CASE("one-pass state serialization round trip") {
  SelectionConfig cfg = base_cfg(UtilityMode::Modality, 3, 0.2);
  cfg.utility.lambda2 = 0.4;
  OnePassState state("q7", cfg);
  state.observe({"a", 0, 0.5, 1.0, {0.1, 0.9}}, "q7");
  state.observe({"b", 1, 0.7, 0.5, {0.8, 0.2}}, "q7");
  OnePassState back = OnePassState::from_json(state.to_json());
  CHECK(back.query_id() == "q7");
  CHECK(back.members().size() == 2);
  CHECK(back.utility_value() == doctest::Approx(state.utility_value()));
}
