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

#ifndef RUMEX_GRAPH_SIM_HPP
#define RUMEX_GRAPH_SIM_HPP

#include <cstddef>
#include <vector>

#include "rumex/kernel.hpp"
#include "rumex/msg_graph.hpp"

namespace rumex {

// MCS and GED are NP-hard; exact search runs up to `exact_node_bound` nodes.
// Beyond it, GED falls back to beam search and MCS does too when
// `allow_approx_mcs` is set (it refuses with SizeLimitExceeded otherwise).
struct GraphSimConfig {
  int exact_node_bound = 12;
  int beam_width = 100;
  bool allow_approx_mcs = false;
  std::size_t astar_max_expansions = 2000000;  // safety valve -> beam fallback
};

struct ScoreResult {
  double score = 0.0;
  bool approximate = false;
};

struct MappingResult {
  std::vector<int> map;  // g1 local -> g2 local, or -1 when unmatched
  int common_nodes = 0;
  int common_edges = 0;
  bool approximate = false;
};

// Maximum common (node + edge) subgraph under kernel-equality of nodes and
// edges: branch and bound over node mappings, an edge counts when both
// endpoints are mapped and its features are kernel-equal.
MappingResult mcs_mapping(const SubgraphView& g1, const SubgraphView& g2,
                          const SimilarityKernel& kernel, const GraphSimConfig& cfg = {});

// (|V_c| + |E_c|) / (|V_c| + |E_c| + |V_delta| + |E_delta|), where delta
// counts nodes/edges of either graph outside the common part.
ScoreResult mcs_similarity(const SubgraphView& g1, const SubgraphView& g2,
                           const SimilarityKernel& kernel, const GraphSimConfig& cfg = {});

// Scores the MCS node mapping by the Jaccard similarity of the mapped
// nodes' modality-feature sets, derives edge scores as the endpoint mean,
// and normalizes by the same denominator as mcs_similarity. Equals
// mcs_similarity when every mapped pair scores 1.
ScoreResult graphsim(const SubgraphView& g1, const SubgraphView& g2,
                     const SimilarityKernel& kernel, const GraphSimConfig& cfg = {});

struct GedResult {
  double cost = 0.0;
  bool approximate = false;
};

// Unit-cost graph edit distance: insert/delete cost 1 for nodes and edges,
// substitution 0 when kernel-equal and 1 otherwise. Exact A* up to the node
// bound, beam search beyond it (flagged approximate).
GedResult ged(const SubgraphView& g1, const SubgraphView& g2,
              const SimilarityKernel& kernel, const GraphSimConfig& cfg = {});

// 1 - GED / (|V1| + |E1| + |V2| + |E2|), clamped to [0, 1].
ScoreResult ged_similarity(const SubgraphView& g1, const SubgraphView& g2,
                           const SimilarityKernel& kernel, const GraphSimConfig& cfg = {});

}  // namespace rumex

#endif  // RUMEX_GRAPH_SIM_HPP
