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

#ifndef RUMEX_UTILITY_HPP
#define RUMEX_UTILITY_HPP

#include <string>
#include <vector>

#include "rumex/kernel.hpp"
#include "rumex/msg_graph.hpp"

namespace rumex {

enum class UtilityMode { Content, Modality, Hybrid };
enum class SimSource { Embedding, MCS, Graphsim, GED };

UtilityMode utility_mode_from_string(const std::string& s);
const char* utility_mode_name(UtilityMode m);
SimSource sim_source_from_string(const std::string& s);
const char* sim_source_name(SimSource s);

struct UtilityConfig {
  double lambda1 = 0.0;  // redundancy penalty weight (content-based)
  double lambda2 = 0.0;  // coverage bonus weight (modality-based)
  double alpha = 0.0;    // coverage decay, in [0,1]; alpha <= gamma with modality terms
  double delta = 1.0;    // coverage distance threshold, >= 0
  double gamma = 0.0;    // candidate similarity threshold, in [0,1]
  UtilityMode mode = UtilityMode::Hybrid;
  SimSource sim_source = SimSource::Embedding;

  void validate() const;
};

// Precomputed inputs for a candidate pool: similarity to the query,
// symmetric pairwise similarities, and modality coverage per candidate.
struct CandidateSims {
  std::vector<double> to_query;
  std::vector<std::vector<double>> between;
  std::vector<double> coverage;  // may stay empty for content-only scoring

  std::size_t size() const { return to_query.size(); }
};

// dist(v, s) = min over nodes u of s of 1 - sim(v, u).
double dist_node_to_subgraph(const MsgGraph& graph, int v_dense, const SubgraphView& s,
                             const SimilarityKernel& kernel);

// dist(a, s) = min over graph nodes v of modality a of dist(v, s);
// +infinity when the graph holds no node of that modality.
double dist_modality_to_subgraph(int modality, const SubgraphView& s,
                                 const SimilarityKernel& kernel);

// cov_alpha over explicit per-modality distances: sum of alpha^d for every
// d <= delta, with 0^0 = 1 so an exact touch always counts fully.
double coverage_from_distances(const std::vector<double>& distances, double alpha,
                               double delta);

// cov_alpha(s) = sum over modalities within distance delta of
// alpha^dist(a, s). Note that with cross-modality similarity pinned to 0, a
// modality's distance to an in-graph subgraph is 0 when s contains it and 1
// otherwise; fractional distances arise only for out-of-graph queries.
double coverage_modality(const SubgraphView& s, double alpha, double delta,
                         const SimilarityKernel& kernel);

// mu_C(S) = 2 sum_s sim(s,q) - lambda1 sum_s sum_{s' != s} sim(s,s').
// The double sum runs over ordered pairs: each unordered pair counts twice.
double utility_content(const std::vector<int>& members, const CandidateSims& sims,
                       double lambda1);

// mu_M(S) = sum_s sim(s,q) + lambda2 sum_s sim(s,q) cov_alpha(s).
double utility_modality(const std::vector<int>& members, const CandidateSims& sims,
                        double lambda2);

// mu(S) = mu_C(S) + mu_M(S).
double utility_hybrid(const std::vector<int>& members, const CandidateSims& sims,
                      double lambda1, double lambda2);

double utility(const std::vector<int>& members, const CandidateSims& sims,
               const UtilityConfig& cfg);

// lambda1 <= gamma / max_s sum_{s' != s} sim(s, s') over the candidate
// pool. A pool without pairwise similarity mass passes for any lambda1.
struct Lambda1Check {
  bool ok = true;
  double bound = 0.0;  // +infinity when no pair penalty exists
  int witness = -1;    // candidate attaining the max row sum
  double max_row_sum = 0.0;
};

Lambda1Check check_lambda1_bound(const CandidateSims& sims, double gamma, double lambda1);

}  // namespace rumex

#endif  // RUMEX_UTILITY_HPP
