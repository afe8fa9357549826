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

#include "rumex/selector.hpp"

#include <algorithm>
#include <cmath>

#include "rumex/hmpgcn.hpp"

namespace rumex {

namespace {

constexpr double kImproveEps = 1e-12;

// Members in canonical output order (descending sim, then earlier arrival),
// with each member's marginal gain along that order.
Explanation finalize(const CandidatePool& pool, std::vector<int> chosen,
                     const std::string& query_id, const SelectionConfig& cfg,
                     bool keep_order = false) {
  if (!keep_order) {
    std::sort(chosen.begin(), chosen.end(), [&](int a, int b) {
      const Candidate& ca = pool.candidates[a];
      const Candidate& cb = pool.candidates[b];
      if (ca.sim != cb.sim) return ca.sim > cb.sim;
      return ca.arrival_seq < cb.arrival_seq;
    });
  }
  Explanation e;
  e.query_id = query_id;
  e.config = cfg;
  std::vector<int> prefix;
  double prev = 0.0;
  for (int idx : chosen) {
    prefix.push_back(idx);
    double value = utility(prefix, pool.sims, cfg.utility);
    e.members.push_back({pool.candidates[idx].rumour_id, pool.candidates[idx].sim,
                         value - prev});
    prev = value;
  }
  e.utility_value = prev;
  return e;
}

// Next k-combination of candidate indices in lexicographic order.
bool next_combination(std::vector<int>& comb, int n) {
  int k = static_cast<int>(comb.size());
  for (int i = k - 1; i >= 0; --i) {
    if (comb[i] < n - k + i) {
      ++comb[i];
      for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
      return true;
    }
  }
  return false;
}

std::vector<int> top_k_by_sim(const CandidatePool& pool, int k) {
  std::vector<int> order(pool.candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Candidate& ca = pool.candidates[a];
    const Candidate& cb = pool.candidates[b];
    if (ca.sim != cb.sim) return ca.sim > cb.sim;
    return ca.arrival_seq < cb.arrival_seq;
  });
  if (static_cast<int>(order.size()) > k) order.resize(k);
  return order;
}

}  // namespace

Strategy strategy_from_string(const std::string& s) {
  if (s == "greedy") return Strategy::Greedy;
  if (s == "swap") return Strategy::Swap;
  if (s == "onepass" || s == "one-pass") return Strategy::OnePass;
  fail(ErrorCode::ConfigError, "unknown strategy '" + s + "'");
}

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Greedy: return "greedy";
    case Strategy::Swap: return "swap";
    case Strategy::OnePass: return "onepass";
  }
  return "?";
}

void SelectionConfig::validate() const {
  if (k < 1) fail(ErrorCode::ConfigError, "k must be >= 1");
  if (gamma < 0.0 || gamma > 1.0) fail(ErrorCode::ConfigError, "gamma must lie in [0,1]");
  if (passes < 1) fail(ErrorCode::ConfigError, "passes must be >= 1");
  if (beta < 1.0) fail(ErrorCode::ConfigError, "beta must be >= 1");
  utility.validate();
}

nlohmann::json explanation_to_json(const Explanation& e) {
  nlohmann::json members = nlohmann::json::array();
  for (const ExplanationMember& m : e.members)
    members.push_back({{"rumour_id", m.rumour_id}, {"sim", m.sim}, {"gain", m.gain}});
  return nlohmann::json{
      {"query_id", e.query_id},
      {"members", members},
      {"utility", e.utility_value},
      {"cached", e.cached},
      {"model_version", e.model_version},
      {"config",
       {{"k", e.config.k},
        {"gamma", e.config.gamma},
        {"strategy", strategy_name(e.config.strategy)},
        {"passes", e.config.passes},
        {"beta", e.config.beta},
        {"utility_mode", utility_mode_name(e.config.utility.mode)},
        {"sim_source", sim_source_name(e.config.utility.sim_source)},
        {"lambda1", e.config.utility.lambda1},
        {"lambda2", e.config.utility.lambda2},
        {"alpha", e.config.utility.alpha},
        {"delta", e.config.utility.delta}}}};
}

std::vector<Candidate> filter_candidates(std::vector<Candidate> scored, double gamma) {
  std::vector<Candidate> out;
  out.reserve(scored.size());
  for (Candidate& c : scored)
    if (c.sim >= gamma) out.push_back(std::move(c));
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    return a.arrival_seq < b.arrival_seq;
  });
  return out;
}

Explanation greedy_select(const CandidatePool& pool, const std::string& query_id,
                          const SelectionConfig& cfg) {
  cfg.validate();
  int m = static_cast<int>(pool.candidates.size());
  std::vector<bool> taken(m, false);
  std::vector<int> chosen;
  std::vector<ExplanationMember> in_order;
  double current = 0.0;
  for (int step = 0; step < cfg.k; ++step) {
    int best = -1;
    double best_gain = 0.0;
    for (int c = 0; c < m; ++c) {
      if (taken[c]) continue;
      chosen.push_back(c);
      double gain = utility(chosen, pool.sims, cfg.utility) - current;
      chosen.pop_back();
      bool wins = best < 0 ? gain > 0.0
                           : (gain > best_gain ||
                              (gain == best_gain && pool.candidates[c].arrival_seq <
                                                        pool.candidates[best].arrival_seq));
      if (wins && gain > 0.0) {
        best = c;
        best_gain = gain;
      }
    }
    if (best < 0) break;  // max marginal gain <= 0
    taken[best] = true;
    chosen.push_back(best);
    current += best_gain;
    in_order.push_back({pool.candidates[best].rumour_id, pool.candidates[best].sim, best_gain});
  }
  Explanation e;
  e.query_id = query_id;
  e.config = cfg;
  e.members = std::move(in_order);  // greedy order is the selection order
  e.utility_value = current;
  return e;
}

Explanation swap_select(const CandidatePool& pool, const std::string& query_id,
                        const SelectionConfig& cfg, const std::vector<int>* initial) {
  cfg.validate();
  int m = static_cast<int>(pool.candidates.size());
  std::vector<int> current = initial ? *initial : top_k_by_sim(pool, cfg.k);
  if (static_cast<int>(current.size()) > cfg.k)
    fail(ErrorCode::ConfigError, "initial set larger than k");
  double value = utility(current, pool.sims, cfg.utility);

  for (int pass = 0; pass < cfg.passes; ++pass) {
    bool improved = false;
    std::vector<bool> in_set(m, false);
    for (int c : current) in_set[c] = true;
    std::vector<int> outsiders;
    for (int c = 0; c < m; ++c)
      if (!in_set[c]) outsiders.push_back(c);

    int n_out = static_cast<int>(outsiders.size());
    int n_in = static_cast<int>(current.size());
    int max_size = std::min(n_in, n_out);
    for (int t = 1; t <= max_size && !improved; ++t) {
      std::vector<int> pick_in(t);  // positions into `current`
      for (int i = 0; i < t; ++i) pick_in[i] = i;
      do {
        std::vector<int> pick_out(t);  // positions into `outsiders`
        for (int i = 0; i < t; ++i) pick_out[i] = i;
        do {
          std::vector<int> trial;
          trial.reserve(current.size());
          std::vector<bool> removed(n_in, false);
          for (int i : pick_in) removed[i] = true;
          for (int i = 0; i < n_in; ++i)
            if (!removed[i]) trial.push_back(current[i]);
          for (int i : pick_out) trial.push_back(outsiders[i]);
          double trial_value = utility(trial, pool.sims, cfg.utility);
          if (trial_value > value + kImproveEps) {
            current = std::move(trial);
            value = trial_value;
            improved = true;
            break;
          }
        } while (next_combination(pick_out, n_out));
        if (improved) break;
      } while (next_combination(pick_in, n_in));
    }
    if (!improved) break;
  }
  return finalize(pool, current, query_id, cfg);
}

Explanation brute_force_select(const CandidatePool& pool, const std::string& query_id,
                               const SelectionConfig& cfg, std::size_t max_subsets) {
  cfg.validate();
  int m = static_cast<int>(pool.candidates.size());
  int kk = std::min(cfg.k, m);
  double total = 1.0;  // empty set
  double binom = 1.0;
  for (int i = 1; i <= kk; ++i) {
    binom = binom * (m - i + 1) / i;
    total += binom;
    if (total > static_cast<double>(max_subsets))
      fail(ErrorCode::TooManySubsets,
           "subset count exceeds " + std::to_string(max_subsets));
  }
  std::vector<int> best;  // empty set, utility 0
  double best_value = 0.0;
  for (int size = 1; size <= kk; ++size) {
    std::vector<int> comb(size);
    for (int i = 0; i < size; ++i) comb[i] = i;
    do {
      double value = utility(comb, pool.sims, cfg.utility);
      if (value > best_value + kImproveEps) {
        best_value = value;
        best = comb;
      }
    } while (next_combination(comb, m));
  }
  return finalize(pool, best, query_id, cfg);
}

OnePassState::OnePassState(std::string query_id, SelectionConfig cfg)
    : query_id_(std::move(query_id)), cfg_(std::move(cfg)) {
  cfg_.validate();
}

CandidateSims OnePassState::member_sims(const Item* extra) const {
  std::size_t n = members_.size() + (extra ? 1 : 0);
  CandidateSims sims;
  sims.to_query.resize(n);
  sims.coverage.resize(n);
  sims.between.assign(n, std::vector<double>(n, 0.0));
  auto item_at = [&](std::size_t i) -> const Item& {
    return i < members_.size() ? members_[i] : *extra;
  };
  for (std::size_t i = 0; i < n; ++i) {
    sims.to_query[i] = item_at(i).sim;
    sims.coverage[i] = item_at(i).coverage;
    sims.between[i][i] = 1.0;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec& a = item_at(i).embedding;
      const Vec& b = item_at(j).embedding;
      double s = (!a.empty() && !b.empty()) ? embedding_similarity(a, b) : 0.0;
      sims.between[i][j] = sims.between[j][i] = s;
    }
  return sims;
}

double OnePassState::utility_value() const {
  std::vector<int> all(members_.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return utility(all, member_sims(nullptr), cfg_.utility);
}

bool OnePassState::observe(const Item& item, const std::string& query_id) {
  if (query_id != query_id_)
    fail(ErrorCode::StaleQuery, "one-pass state is bound to query '" + query_id_ + "'");
  if (item.sim < cfg_.gamma) return false;
  if (static_cast<int>(members_.size()) < cfg_.k) {
    members_.push_back(item);
    return true;
  }
  int evict = -1;
  double best_value = 0.0;
  double current;
  if (cfg_.utility.mode == UtilityMode::Modality) {
    // modular utility: each member contributes independently, so the swap
    // decision is a constant-time weight exchange per candidate eviction
    auto weight = [&](const Item& it) {
      return it.sim + cfg_.utility.lambda2 * it.sim * it.coverage;
    };
    current = 0.0;
    for (const Item& m : members_) current += weight(m);
    double incoming = weight(item);
    for (std::size_t out = 0; out < members_.size(); ++out) {
      double value = current - weight(members_[out]) + incoming;
      bool wins = evict < 0 || value > best_value ||
                  (value == best_value &&
                   members_[out].arrival_seq < members_[evict].arrival_seq);
      if (wins) {
        evict = static_cast<int>(out);
        best_value = value;
      }
    }
  } else {
    current = utility_value();
    CandidateSims sims = member_sims(&item);
    int new_idx = static_cast<int>(members_.size());
    for (std::size_t out = 0; out < members_.size(); ++out) {
      std::vector<int> subset;
      for (std::size_t i = 0; i < members_.size(); ++i)
        if (i != out) subset.push_back(static_cast<int>(i));
      subset.push_back(new_idx);
      double value = utility(subset, sims, cfg_.utility);
      bool wins = evict < 0 || value > best_value ||
                  (value == best_value &&
                   members_[out].arrival_seq < members_[evict].arrival_seq);
      if (wins) {
        evict = static_cast<int>(out);
        best_value = value;
      }
    }
  }
  if (evict >= 0 && best_value > cfg_.beta * current + kImproveEps) {
    members_[evict] = item;
    return true;
  }
  return false;
}

void OnePassState::reseed(std::vector<Item> members) {
  if (static_cast<int>(members.size()) > cfg_.k)
    fail(ErrorCode::ConfigError, "reseed set larger than k");
  members_ = std::move(members);
}

Explanation OnePassState::to_explanation(std::uint64_t model_version) const {
  CandidatePool pool;
  for (const Item& it : members_)
    pool.candidates.push_back({it.rumour_id, it.arrival_seq, it.sim});
  pool.sims = member_sims(nullptr);
  std::vector<int> all(members_.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  SelectionConfig cfg = cfg_;
  cfg.strategy = Strategy::OnePass;
  Explanation e = finalize(pool, all, query_id_, cfg);
  e.model_version = model_version;
  return e;
}

nlohmann::json OnePassState::to_json() const {
  nlohmann::json members = nlohmann::json::array();
  for (const Item& it : members_)
    members.push_back({{"rumour_id", it.rumour_id},
                       {"arrival_seq", it.arrival_seq},
                       {"sim", it.sim},
                       {"coverage", it.coverage},
                       {"embedding", it.embedding}});
  return nlohmann::json{{"query_id", query_id_},
                        {"k", cfg_.k},
                        {"gamma", cfg_.gamma},
                        {"beta", cfg_.beta},
                        {"passes", cfg_.passes},
                        {"utility_mode", utility_mode_name(cfg_.utility.mode)},
                        {"lambda1", cfg_.utility.lambda1},
                        {"lambda2", cfg_.utility.lambda2},
                        {"alpha", cfg_.utility.alpha},
                        {"delta", cfg_.utility.delta},
                        {"members", members}};
}

OnePassState OnePassState::from_json(const nlohmann::json& j) {
  SelectionConfig cfg;
  cfg.k = j.at("k").get<int>();
  cfg.gamma = j.at("gamma").get<double>();
  cfg.beta = j.at("beta").get<double>();
  cfg.passes = j.at("passes").get<int>();
  cfg.strategy = Strategy::OnePass;
  cfg.utility.mode = utility_mode_from_string(j.at("utility_mode").get<std::string>());
  cfg.utility.lambda1 = j.at("lambda1").get<double>();
  cfg.utility.lambda2 = j.at("lambda2").get<double>();
  cfg.utility.alpha = j.at("alpha").get<double>();
  cfg.utility.delta = j.at("delta").get<double>();
  cfg.utility.gamma = cfg.gamma;
  OnePassState st(j.at("query_id").get<std::string>(), cfg);
  for (const auto& mj : j.at("members")) {
    Item it;
    it.rumour_id = mj.at("rumour_id").get<std::string>();
    it.arrival_seq = mj.at("arrival_seq").get<std::uint64_t>();
    it.sim = mj.at("sim").get<double>();
    it.coverage = mj.at("coverage").get<double>();
    it.embedding = mj.at("embedding").get<Vec>();
    st.members_.push_back(std::move(it));
  }
  return st;
}

}  // namespace rumex
