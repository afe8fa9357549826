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

#ifndef RUMEX_SELECTOR_HPP
#define RUMEX_SELECTOR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "rumex/linalg.hpp"
#include "rumex/utility.hpp"

namespace rumex {

enum class Strategy { Greedy, Swap, OnePass };

Strategy strategy_from_string(const std::string& s);
const char* strategy_name(Strategy s);

struct SelectionConfig {
  int k = 5;
  double gamma = 0.0;
  Strategy strategy = Strategy::Greedy;
  int passes = 16;    // Swap: maximum passes, one applied swap per pass
  double beta = 2.0;  // OnePass swap threshold; the 1/4 guarantee holds for
                      // modality-based utility with beta = 2
  UtilityConfig utility;

  void validate() const;
};

struct Candidate {
  std::string rumour_id;
  std::uint64_t arrival_seq = 0;
  double sim = 0.0;  // sim(s, q)
};

// Candidates aligned index-for-index with their similarity/coverage data.
struct CandidatePool {
  std::vector<Candidate> candidates;
  CandidateSims sims;
};

struct ExplanationMember {
  std::string rumour_id;
  double sim = 0.0;
  double gain = 0.0;  // marginal utility at its position in the member order
};

struct Explanation {
  std::string query_id;
  std::vector<ExplanationMember> members;
  double utility_value = 0.0;
  SelectionConfig config;
  std::uint64_t model_version = 0;
  bool cached = false;
};

nlohmann::json explanation_to_json(const Explanation& e);

// Keeps exactly the candidates with sim >= gamma, ordered by descending
// score, ties broken by earlier arrival.
std::vector<Candidate> filter_candidates(std::vector<Candidate> scored, double gamma);

// Standard greedy maximization: repeatedly adds the candidate with the
// largest marginal gain, stopping at k members or a non-positive best gain.
// Gain ties go to the earlier arrival. 1 - 1/e approximation.
Explanation greedy_select(const CandidatePool& pool, const std::string& query_id,
                          const SelectionConfig& cfg);

// Multi-pass local search from `initial` (top-k by sim when null): each pass
// applies the first utility-improving swap of equal-size subsets, enumerated
// by swap size 1..k and candidate order; stops on a pass with no improvement
// or after cfg.passes. 1/2 approximation at a swap-stable solution.
Explanation swap_select(const CandidatePool& pool, const std::string& query_id,
                        const SelectionConfig& cfg,
                        const std::vector<int>* initial = nullptr);

// Exhaustive maximization over all subsets of size <= k; refuses pools with
// more than `max_subsets` subsets (TooManySubsets). Test oracle.
Explanation brute_force_select(const CandidatePool& pool, const std::string& query_id,
                               const SelectionConfig& cfg,
                               std::size_t max_subsets = 50000);

// Streaming candidate solution for a fixed query: each arriving rumour
// either fills the set (when it passes gamma) or replaces the member whose
// eviction maximizes utility, but only when that beats beta * mu(C_k).
// Stores members only, never rejected subgraphs.
class OnePassState {
 public:
  struct Item {
    std::string rumour_id;
    std::uint64_t arrival_seq = 0;
    double sim = 0.0;       // sim(s, q) for the bound query
    double coverage = 0.0;  // cov_alpha(s)
    Vec embedding;          // pairwise sims for content/hybrid modes
  };

  OnePassState() = default;
  OnePassState(std::string query_id, SelectionConfig cfg);

  const std::string& query_id() const { return query_id_; }

  // Fails with StaleQuery when `query id` differs from the bound query.
  // Returns true when the member set changed.
  bool observe(const Item& item, const std::string& query_id);

  // Replaces the member set (greedy recomputation after a cache-median
  // change rebinds the state).
  void reseed(std::vector<Item> members);

  const std::vector<Item>& members() const { return members_; }
  double utility_value() const;
  Explanation to_explanation(std::uint64_t model_version) const;

  nlohmann::json to_json() const;
  static OnePassState from_json(const nlohmann::json& j);

 private:
  std::string query_id_;
  SelectionConfig cfg_;
  std::vector<Item> members_;

  CandidateSims member_sims(const Item* extra) const;
};

}  // namespace rumex

#endif  // RUMEX_SELECTOR_HPP
