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

#include "rumex/median_cache.hpp"

#include <algorithm>

#include "rumex/hmpgcn.hpp"

namespace rumex {

std::vector<int> MedianCache::observe(const Observation& obs) {
  std::vector<int> stale;
  if (size() < cfg_.capacity) {
    // seeding: the rumour becomes its own median
    Median m;
    m.representative = obs.rumour_id;
    m.embedding = obs.embedding;
    m.reservoir.push_back({obs.rumour_id, obs.embedding});
    m.assigned = 1;
    SelectionConfig state_cfg = cfg_.onepass;
    state_cfg.strategy = Strategy::OnePass;
    m.state = OnePassState(obs.rumour_id, state_cfg);
    medians_.push_back(std::move(m));
    feed_states(obs);
    return stale;
  }

  int target = nearest_within(obs.embedding, 2.0 + 1e-9);  // cosine distance <= 2 always
  Median& med = medians_[target];
  med.assigned += 1;
  if (static_cast<int>(med.reservoir.size()) < cfg_.reservoir_cap) {
    med.reservoir.push_back({obs.rumour_id, obs.embedding});
  } else {
    // counter-keyed reservoir sampling: stateless and replay-deterministic
    double u = keyed_uniform(cfg_.rng_seed, target, med.assigned, 0);
    auto j = static_cast<std::size_t>(u * static_cast<double>(med.assigned));
    if (j < med.reservoir.size()) med.reservoir[j] = {obs.rumour_id, obs.embedding};
  }

  // medoid re-estimation over the reservoir (plus the current representative
  // as a virtual member so it can defend its seat after rotating out)
  auto sum_dist = [&](const Vec& v) {
    double s = 0.0;
    for (const Member& mem : med.reservoir) s += cos_dist(v, mem.embedding);
    return s;
  };
  double rep_sum = sum_dist(med.embedding);
  int best = -1;
  double best_sum = rep_sum;
  for (std::size_t i = 0; i < med.reservoir.size(); ++i) {
    if (med.reservoir[i].rumour_id == med.representative) continue;
    double s = sum_dist(med.reservoir[i].embedding);
    bool wins = s < best_sum - 1e-12 ||
                (best >= 0 && s < best_sum + 1e-12 &&
                 med.reservoir[i].rumour_id < med.reservoir[best].rumour_id);
    if (wins) {
      best = static_cast<int>(i);
      best_sum = s;
    }
  }
  if (best >= 0) {
    med.representative = med.reservoir[best].rumour_id;
    med.embedding = med.reservoir[best].embedding;
    med.stale = true;
    SelectionConfig state_cfg = cfg_.onepass;
    state_cfg.strategy = Strategy::OnePass;
    med.state = OnePassState(med.representative, state_cfg);  // rebound, empty
    stale.push_back(target);
  }

  feed_states(obs);
  return stale;
}

void MedianCache::feed_states(const Observation& obs) {
  for (Median& med : medians_) {
    if (med.representative == obs.rumour_id) continue;  // no self-explanation
    OnePassState::Item item;
    item.rumour_id = obs.rumour_id;
    item.arrival_seq = obs.arrival_seq;
    item.sim = embedding_similarity(obs.embedding, med.embedding);
    item.coverage = obs.coverage;
    item.embedding = obs.embedding;
    med.state.observe(item, med.representative);
  }
}

int MedianCache::nearest_within(const Vec& unit_embedding, double eps) const {
  int best = -1;
  double best_dist = 0.0;
  for (int i = 0; i < size(); ++i) {
    double d = cos_dist(unit_embedding, medians_[i].embedding);
    if (d > eps) continue;
    if (best < 0 || d < best_dist) {
      best = i;
      best_dist = d;
    }
  }
  return best;
}

void MedianCache::reseed(int median_idx, std::vector<OnePassState::Item> members) {
  Median& med = medians_[median_idx];
  med.state.reseed(std::move(members));
  med.stale = false;
}

nlohmann::json MedianCache::to_json() const {
  nlohmann::json meds = nlohmann::json::array();
  for (const Median& m : medians_) {
    nlohmann::json reservoir = nlohmann::json::array();
    for (const Member& mem : m.reservoir)
      reservoir.push_back({{"rumour_id", mem.rumour_id}, {"embedding", mem.embedding}});
    meds.push_back({{"representative", m.representative},
                    {"embedding", m.embedding},
                    {"reservoir", reservoir},
                    {"assigned", m.assigned},
                    {"stale", m.stale},
                    {"state", m.state.to_json()}});
  }
  return nlohmann::json{{"capacity", cfg_.capacity},
                        {"reservoir_cap", cfg_.reservoir_cap},
                        {"rng_seed", cfg_.rng_seed},
                        {"onepass_k", cfg_.onepass.k},
                        {"onepass_gamma", cfg_.onepass.gamma},
                        {"onepass_beta", cfg_.onepass.beta},
                        {"onepass_utility_mode", utility_mode_name(cfg_.onepass.utility.mode)},
                        {"onepass_lambda1", cfg_.onepass.utility.lambda1},
                        {"onepass_lambda2", cfg_.onepass.utility.lambda2},
                        {"onepass_alpha", cfg_.onepass.utility.alpha},
                        {"onepass_delta", cfg_.onepass.utility.delta},
                        {"medians", meds}};
}

MedianCache MedianCache::from_json(const nlohmann::json& j) {
  Config cfg;
  cfg.capacity = j.at("capacity").get<int>();
  cfg.reservoir_cap = j.at("reservoir_cap").get<int>();
  cfg.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  cfg.onepass.k = j.at("onepass_k").get<int>();
  cfg.onepass.gamma = j.at("onepass_gamma").get<double>();
  cfg.onepass.beta = j.at("onepass_beta").get<double>();
  cfg.onepass.strategy = Strategy::OnePass;
  cfg.onepass.utility.mode =
      utility_mode_from_string(j.at("onepass_utility_mode").get<std::string>());
  cfg.onepass.utility.lambda1 = j.at("onepass_lambda1").get<double>();
  cfg.onepass.utility.lambda2 = j.at("onepass_lambda2").get<double>();
  cfg.onepass.utility.alpha = j.at("onepass_alpha").get<double>();
  cfg.onepass.utility.delta = j.at("onepass_delta").get<double>();
  cfg.onepass.utility.gamma = cfg.onepass.gamma;
  MedianCache cache(cfg);
  for (const auto& mj : j.at("medians")) {
    Median m;
    m.representative = mj.at("representative").get<std::string>();
    m.embedding = mj.at("embedding").get<Vec>();
    for (const auto& rj : mj.at("reservoir"))
      m.reservoir.push_back(
          {rj.at("rumour_id").get<std::string>(), rj.at("embedding").get<Vec>()});
    m.assigned = mj.at("assigned").get<std::uint64_t>();
    m.stale = mj.at("stale").get<bool>();
    m.state = OnePassState::from_json(mj.at("state"));
    cache.medians_.push_back(std::move(m));
  }
  return cache;
}

}  // namespace rumex
