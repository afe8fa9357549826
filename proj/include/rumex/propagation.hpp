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

#ifndef RUMEX_PROPAGATION_HPP
#define RUMEX_PROPAGATION_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rumex/msg_graph.hpp"
#include "rumex/rng.hpp"

namespace rumex {

enum class PropagationModel { SI, SIS, SIR, IC, LT };

PropagationModel propagation_model_from_string(const std::string& s);
const char* propagation_model_name(PropagationModel m);

struct PropagationConfig {
  PropagationModel model = PropagationModel::SI;
  double infection_prob = 0.1;  // per-attempt success probability (SI/SIS/SIR/IC)
  double recovery_prob = 0.0;   // SIS / SIR
  double lt_threshold = 0.5;
  double lt_weight_lo = 0.1;  // LT edge weights sampled uniformly in [lo, hi)
  double lt_weight_hi = 1.0;
  int max_steps = 10;
  int seed_count = 1;
  std::vector<std::string> seeds;  // explicit seed ids; overrides seed_count
  std::uint64_t rng_seed = 1;

  void validate() const;
};

// Ever-infected/activated nodes plus the transmitting edges. With multiple
// seeds the transmission structure splits into per-seed connected pieces;
// `components` lists them so each can be emitted as its own (connected)
// rumour subgraph.
struct PropagationResult {
  std::vector<int> nodes;  // dense ids, sorted
  std::vector<int> edges;  // transmitting edge indices, sorted
  struct Component {
    std::vector<int> nodes;
    std::vector<int> edges;
  };
  std::vector<Component> components;
};

// Per-element feature source for synthetic graphs. `modality` is a node
// modality index when is_edge is false, else an edge modality index.
using FeatureSampler = std::function<Vec(bool is_edge, int modality, int dim, Rng& rng)>;

FeatureSampler uniform_feature_sampler();

// Connected random simple graph: a random attachment tree plus extra
// edges. Each extra edge closes a triangle with probability `triangle_p`
// (social graphs cluster locally; two-hop neighbourhoods need cycles) and
// joins a uniform pair otherwise. Node modalities are drawn from
// `modality_weights` (uniform when empty). Deterministic under rng_seed.
// Fails with InfeasibleEdgeCount when n_edges < n_nodes - 1 or exceeds the
// simple-graph maximum.
MsgGraph gen_base_graph(std::shared_ptr<const ModalitySchema> schema, int n_nodes,
                        long long n_edges, std::uint64_t rng_seed,
                        const std::vector<double>& modality_weights = {},
                        const FeatureSampler& sampler = {}, double triangle_p = 0.0);

// SI / SIS / SIR. Attempt draws are keyed by (seed, sender, receiver,
// attempt index), so runs sharing a seed are coupled: raising
// infection_prob can only grow the output set.
PropagationResult simulate_infection(const MsgGraph& graph, const PropagationConfig& cfg);

// IC / LT, synchronous rounds until convergence or max_steps. In IC each
// directed pair is attempted at most once.
PropagationResult simulate_influence(const MsgGraph& graph, const PropagationConfig& cfg);

}  // namespace rumex

#endif  // RUMEX_PROPAGATION_HPP
