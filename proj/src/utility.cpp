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

#include "rumex/utility.hpp"

#include <cmath>
#include <limits>

namespace rumex {

UtilityMode utility_mode_from_string(const std::string& s) {
  if (s == "content") return UtilityMode::Content;
  if (s == "modality") return UtilityMode::Modality;
  if (s == "hybrid") return UtilityMode::Hybrid;
  fail(ErrorCode::ConfigError, "unknown utility mode '" + s + "'");
}

const char* utility_mode_name(UtilityMode m) {
  switch (m) {
    case UtilityMode::Content: return "content";
    case UtilityMode::Modality: return "modality";
    case UtilityMode::Hybrid: return "hybrid";
  }
  return "?";
}

SimSource sim_source_from_string(const std::string& s) {
  if (s == "embedding") return SimSource::Embedding;
  if (s == "mcs") return SimSource::MCS;
  if (s == "graphsim") return SimSource::Graphsim;
  if (s == "ged") return SimSource::GED;
  fail(ErrorCode::ConfigError, "unknown sim source '" + s + "'");
}

const char* sim_source_name(SimSource s) {
  switch (s) {
    case SimSource::Embedding: return "embedding";
    case SimSource::MCS: return "mcs";
    case SimSource::Graphsim: return "graphsim";
    case SimSource::GED: return "ged";
  }
  return "?";
}

void UtilityConfig::validate() const {
  if (lambda1 < 0.0 || lambda2 < 0.0)
    fail(ErrorCode::ConfigError, "lambda weights must be >= 0");
  if (alpha < 0.0 || alpha > 1.0) fail(ErrorCode::ConfigError, "alpha must lie in [0,1]");
  if (delta < 0.0) fail(ErrorCode::ConfigError, "delta must be >= 0");
  if (gamma < 0.0 || gamma > 1.0) fail(ErrorCode::ConfigError, "gamma must lie in [0,1]");
  if (mode != UtilityMode::Content && alpha > gamma)
    fail(ErrorCode::ConfigError, "modality coverage requires alpha <= gamma");
}

double dist_node_to_subgraph(const MsgGraph& graph, int v_dense, const SubgraphView& s,
                             const SimilarityKernel& kernel) {
  if (s.num_nodes() == 0) fail(ErrorCode::ConfigError, "subgraph must be non-empty");
  const MsgGraph::Node& v = graph.node(v_dense);
  double best = 1.0;
  for (int u = 0; u < s.num_nodes(); ++u) {
    if (s.modality(u) != v.modality) continue;  // cross-modality sim is 0
    double d = 1.0 - kernel.feature_score(v.features, s.features(u));
    if (d < best) best = d;
    if (best == 0.0) break;
  }
  return best;
}

double dist_modality_to_subgraph(int modality, const SubgraphView& s,
                                 const SimilarityKernel& kernel) {
  const MsgGraph& graph = s.graph();
  double best = std::numeric_limits<double>::infinity();
  for (int v = 0; v < graph.num_nodes(); ++v) {
    if (graph.node(v).modality != modality) continue;
    double d = dist_node_to_subgraph(graph, v, s, kernel);
    if (d < best) best = d;
    if (best == 0.0) break;
  }
  return best;
}

double coverage_from_distances(const std::vector<double>& distances, double alpha,
                               double delta) {
  double cov = 0.0;
  for (double d : distances)
    if (d <= delta) cov += std::pow(alpha, d);  // pow(0, 0) == 1
  return cov;
}

double coverage_modality(const SubgraphView& s, double alpha, double delta,
                         const SimilarityKernel& kernel) {
  const ModalitySchema& schema = s.graph().schema();
  std::vector<double> dists;
  dists.reserve(schema.num_node_modalities());
  for (int a = 0; a < schema.num_node_modalities(); ++a)
    dists.push_back(dist_modality_to_subgraph(a, s, kernel));
  return coverage_from_distances(dists, alpha, delta);
}

double utility_content(const std::vector<int>& members, const CandidateSims& sims,
                       double lambda1) {
  double relevance = 0.0;
  for (int s : members) relevance += sims.to_query[s];
  double penalty = 0.0;
  for (int s : members)
    for (int t : members)
      if (t != s) penalty += sims.between[s][t];
  return 2.0 * relevance - lambda1 * penalty;
}

double utility_modality(const std::vector<int>& members, const CandidateSims& sims,
                        double lambda2) {
  double total = 0.0;
  for (int s : members)
    total += sims.to_query[s] + lambda2 * sims.to_query[s] * sims.coverage[s];
  return total;
}

double utility_hybrid(const std::vector<int>& members, const CandidateSims& sims,
                      double lambda1, double lambda2) {
  return utility_content(members, sims, lambda1) + utility_modality(members, sims, lambda2);
}

double utility(const std::vector<int>& members, const CandidateSims& sims,
               const UtilityConfig& cfg) {
  switch (cfg.mode) {
    case UtilityMode::Content: return utility_content(members, sims, cfg.lambda1);
    case UtilityMode::Modality: return utility_modality(members, sims, cfg.lambda2);
    case UtilityMode::Hybrid:
      return utility_hybrid(members, sims, cfg.lambda1, cfg.lambda2);
  }
  return 0.0;
}

Lambda1Check check_lambda1_bound(const CandidateSims& sims, double gamma, double lambda1) {
  Lambda1Check out;
  out.bound = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < sims.size(); ++s) {
    double row = 0.0;
    for (std::size_t t = 0; t < sims.size(); ++t)
      if (t != s) row += sims.between[s][t];
    if (row > out.max_row_sum) {
      out.max_row_sum = row;
      out.witness = static_cast<int>(s);
    }
  }
  if (out.max_row_sum > 0.0) out.bound = gamma / out.max_row_sum;
  out.ok = lambda1 <= out.bound;
  return out;
}

}  // namespace rumex
