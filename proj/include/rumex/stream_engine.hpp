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

#ifndef RUMEX_STREAM_ENGINE_HPP
#define RUMEX_STREAM_ENGINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "rumex/drift.hpp"
#include "rumex/events.hpp"
#include "rumex/hmpgcn.hpp"
#include "rumex/median_cache.hpp"
#include "rumex/selector.hpp"
#include "rumex/vector_index.hpp"

namespace rumex {

struct EngineConfig {
  ModelConfig model;
  SelectionConfig selection;  // explain defaults; events override k and gamma
  int cache_capacity = 20;
  int reservoir_cap = 64;
  int calibration_window = 50;
  double drift_kappa = -1.0;  // < 0: auto from calibration
  double drift_threshold = 25.0;
  bool drift_enabled = true;
  bool refresh_on_drift = true;
  int refresh_epochs = 5;
  double epsilon_cache = 0.02;  // fast-path radius in cosine distance; < 0 disables
  int overfetch_min = 64;       // index retrieval size is max(4k, overfetch_min)
  SimilarityKernel kernel = SimilarityKernel::graded(1.0);  // coverage distances

  nlohmann::json to_json() const;
  static EngineConfig from_json(const nlohmann::json& j);
};

// Single-writer streaming loop: ingests graph/rumour events, maintains the
// vector index, the k-medians explanation cache, and the drift detector,
// and answers explain queries. Readers work on const snapshots; the model
// is immutable per version and swapped atomically on refresh.
class StreamEngine {
 public:
  StreamEngine(std::shared_ptr<const ModalitySchema> schema, EngineConfig cfg);

  struct EventResult {
    std::optional<Explanation> explanation;  // for explain events
    bool drift = false;
    std::uint64_t model_version = 0;
  };

  EventResult handle(const StreamEvent& ev);

  // Offline step: trains cfg.model on the current graph and (re)indexes all
  // registered rumours in arrival order.
  std::vector<double> train_model();

  // Installs a checkpointed model (SchemaMismatch on a foreign schema).
  void adopt_model(EmbeddingModel model);

  bool has_model() const { return model_.has_value(); }
  const EmbeddingModel& model() const;
  std::uint64_t model_version() const;

  // Continues SGD for cfg.refresh_epochs, bumps the version, re-embeds the
  // index, and rebuilds cache and detector against the new space.
  std::uint64_t refresh_model();

  // Explains a registered rumour (the rumour itself is excluded from its
  // own candidate pool) or an inline node set (nothing excluded).
  Explanation explain_rumour(const std::string& rumour_id, SelectionConfig cfg);
  Explanation explain_nodes(const std::string& query_id,
                            const std::vector<std::string>& node_ids, SelectionConfig cfg);

  // Same selection over all rumours without the index; comparison oracle
  // for the index path (never takes the cache fast path).
  Explanation explain_rumour_full_scan(const std::string& rumour_id, SelectionConfig cfg);
  Explanation explain_nodes_full_scan(const std::string& query_id,
                                      const std::vector<std::string>& node_ids,
                                      SelectionConfig cfg);

  const MsgGraph& graph() const { return graph_; }
  const RumourLog& rumours() const { return log_; }
  const VectorIndex& index() const;
  const MedianCache& cache() const { return cache_; }
  const DriftDetector* detector() const { return detector_ ? &*detector_ : nullptr; }
  const EngineConfig& config() const { return cfg_; }

  void save_checkpoint(const std::string& dir) const;
  static StreamEngine load_checkpoint(const std::string& dir);

 private:
  std::shared_ptr<const ModalitySchema> schema_;
  EngineConfig cfg_;
  MsgGraph graph_;
  RumourLog log_;
  std::optional<EmbeddingModel> model_;
  std::optional<VectorIndex> index_;
  MedianCache cache_;
  std::optional<DriftDetector> detector_;
  std::unordered_map<std::string, std::pair<double, int>> coverage_cache_;  // cov, |V| then

  Vec embed_view(const SubgraphView& view) const;
  double coverage_of_rumour(const std::string& id, bool at_detect);
  bool needs_coverage(const SelectionConfig& cfg) const;
  void register_embedded(const RumourSubgraph& rumour, bool allow_drift, EventResult* out);
  void reseed_median(int median_idx);
  void rebuild_runtime_state();
  CandidatePool build_pool(const std::vector<Candidate>& filtered, const SubgraphView& qview,
                           const SelectionConfig& cfg);
  Explanation select_with(const CandidatePool& pool, const std::string& query_id,
                          const SelectionConfig& cfg);
  Explanation explain_impl(const std::string& query_id, const SubgraphView& qview,
                           const std::string& exclude_id, SelectionConfig cfg,
                           bool use_index, bool allow_cache);
  Explanation empty_explanation(const std::string& query_id,
                                const SelectionConfig& cfg) const;
};

// Reconstruction events for an existing graph (checkpointing, round trips).
std::vector<StreamEvent> graph_to_events(const MsgGraph& graph);

}  // namespace rumex

#endif  // RUMEX_STREAM_ENGINE_HPP
