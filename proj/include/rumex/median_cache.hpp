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

#ifndef RUMEX_MEDIAN_CACHE_HPP
#define RUMEX_MEDIAN_CACHE_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "rumex/rng.hpp"
#include "rumex/selector.hpp"

namespace rumex {

// Incremental k-medians over rumour embeddings, with one maintained
// explanation per median (one-pass swap selection keyed by the median's
// representative rumour). The first K rumours seed the medians; afterwards
// each arrival is assigned to the nearest median by cosine distance and the
// median is re-estimated as the medoid of a bounded reservoir of assigned
// members. A representative change flags the median STALE: its candidate
// set must be recomputed (greedy over the index) before the fast path may
// serve it again.
class MedianCache {
 public:
  struct Config {
    int capacity = 20;       // K
    int reservoir_cap = 64;  // medoid sample per median
    std::uint64_t rng_seed = 7;
    SelectionConfig onepass;  // per-median selection parameters
  };

  struct Member {
    std::string rumour_id;
    Vec embedding;  // unit
  };

  struct Median {
    std::string representative;
    Vec embedding;  // unit vector of the representative
    std::vector<Member> reservoir;
    std::uint64_t assigned = 0;
    bool stale = false;
    OnePassState state;
  };

  MedianCache() = default;
  explicit MedianCache(Config cfg) : cfg_(std::move(cfg)) {}

  int size() const { return static_cast<int>(medians_.size()); }
  int capacity() const { return cfg_.capacity; }
  const Config& config() const { return cfg_; }
  const Median& median(int i) const { return medians_[i]; }
  const std::vector<Median>& medians() const { return medians_; }

  struct Observation {
    std::string rumour_id;
    std::uint64_t arrival_seq = 0;
    Vec embedding;  // unit
    double coverage = 0.0;
  };

  // Returns the indices of medians whose representative changed (now
  // stale). Every median's one-pass state is fed the new rumour, scored
  // against that median's representative.
  std::vector<int> observe(const Observation& obs);

  // Nearest median by cosine distance within eps, or -1. Ties go to the
  // lowest median index.
  int nearest_within(const Vec& unit_embedding, double eps) const;

  // Reseeds a stale median's one-pass state after greedy recomputation.
  void reseed(int median_idx, std::vector<OnePassState::Item> members);

  void clear() { medians_.clear(); }

  nlohmann::json to_json() const;
  static MedianCache from_json(const nlohmann::json& j);

 private:
  Config cfg_;
  std::vector<Median> medians_;

  static double cos_dist(const Vec& a, const Vec& b) { return 1.0 - dot(a, b); }
  void feed_states(const Observation& obs);
};

}  // namespace rumex

#endif  // RUMEX_MEDIAN_CACHE_HPP
