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

#ifndef RUMEX_HMPGCN_HPP
#define RUMEX_HMPGCN_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "rumex/linalg.hpp"
#include "rumex/msg_graph.hpp"
#include "rumex/rng.hpp"

namespace rumex {

// Heterogeneous message-passing graph network. Nodes exchange messages
// through per-(sender, receiver)-modality matrices; received messages are
// summed after a nonlinearity, and the update combines the community
// embedding, the node's own embedding, and a fixed summary of its incident
// edge features. Layers use tanh; the logistic function is reserved for the
// pairwise scores inside the loss.
struct ModelConfig {
  int embed_dim = 8;   // d
  int num_layers = 1;  // L; also the positive-sampling hop depth
  int q_plus = 3;      // positive sample count per node
  int q_minus = 3;     // negative sample count per node
  double learning_rate = 0.05;
  int epochs = 50;
  std::uint64_t rng_seed = 1;

  void validate() const;
};

struct LayerParams {
  // message[s * A + t]: d x d matrix for sender modality s, receiver t
  std::vector<Mat> message;
  Mat w_agg;     // d x d
  Vec bias;      // d
  Mat w_concat;  // d x 3d: combine(community, self, edge summary)
};

// Immutable once published; refreshes produce a new version.
struct EmbeddingModel {
  std::uint64_t schema_hash = 0;
  int num_node_modalities = 0;
  std::vector<int> node_dims;
  std::vector<int> edge_dims;
  ModelConfig config;
  std::vector<Mat> proj_node;  // per node modality: d x d_a input lift
  std::vector<Mat> proj_edge;  // per edge modality: d x d_e lift for summaries
  std::vector<LayerParams> layers;
  std::uint64_t version = 1;
};

struct ParamBlock {
  std::string name;
  std::vector<double>* data;
};

// All trainable parameters in a fixed order (used by init, SGD, the
// checkpoint format, and gradient checks).
std::vector<ParamBlock> param_blocks(EmbeddingModel& model);

// Zero-initialized gradient holder with the same shapes.
EmbeddingModel zeros_like(const EmbeddingModel& model);

EmbeddingModel init_model(const ModalitySchema& schema, const ModelConfig& cfg);

struct NodeEmbeddings {
  std::vector<Vec> z;  // indexed by view-local node
  std::uint64_t model_version = 0;
};

// Truncated message passing over the view: only view nodes send, only along
// view edges. Passing view_all(graph) embeds the full graph. Fails with
// SchemaMismatch when the model was trained against a different schema.
NodeEmbeddings forward(const SubgraphView& view, const EmbeddingModel& model);

// Positive/negative pools for one node: positives are same-modality nodes
// within `depth` hops; negatives are different-modality nodes beyond
// `depth` hops (or unreachable). Sampling is without replacement when the
// pool is large enough, with replacement otherwise.
struct SamplePools {
  std::vector<int> positives;  // view-local ids
  std::vector<int> negatives;
  bool pos_pool_empty = false;
  bool neg_pool_empty = false;
};

// The full candidate pools before sampling, in ascending local order.
struct PairPools {
  std::vector<int> positives;
  std::vector<int> negatives;
};

PairPools enumerate_pools(const SubgraphView& view, int v_local, int depth);

SamplePools sample_pairs(const SubgraphView& view, int v_local, int depth, int q_plus,
                         int q_minus, Rng& rng);

// Frozen samples for every node of a view.
struct PairSet {
  std::vector<SamplePools> by_node;
};

PairSet sample_all_pairs(const SubgraphView& view, const ModelConfig& cfg, Rng& rng);

// Negative-sampling loss over the final-layer embeddings. Empty pools
// contribute zero; logistic arguments are clamped below at 1e-12.
double pair_loss(const NodeEmbeddings& emb, const PairSet& pairs, const ModelConfig& cfg);

// Full forward + backward pass: returns the loss and accumulates parameter
// gradients into `grad` (which must be zeros_like(model)).
double loss_and_gradient(const SubgraphView& view, const EmbeddingModel& model,
                         const PairSet& pairs, EmbeddingModel& grad);

struct TrainResult {
  EmbeddingModel model;
  std::vector<double> loss_trace;  // loss at the start of each epoch
};

// SGD training on the full graph; deterministic under cfg.rng_seed. Fails
// with NonFiniteLoss when the loss diverges.
TrainResult train(const MsgGraph& graph, const ModelConfig& cfg);

// Continues SGD from the given parameters for `epochs` more epochs (warm
// start for drift adaptation); the result carries version + 1.
TrainResult continue_training(const MsgGraph& graph, const EmbeddingModel& start, int epochs);

// Mean of the truncated node embeddings.
Vec embed_subgraph_nodes(const SubgraphView& view, const EmbeddingModel& model);

// Degree-weighted combination z_s = sum_u deg_s(u) z_u / (2 |E_s|); equals
// the mean over edges of (z_u + z_v) / 2. Fails with NoEdges on edgeless
// views (callers fall back to the node-based embedding).
Vec embed_subgraph_edges(const SubgraphView& view, const EmbeddingModel& model);

// Cosine similarity mapped to [0, 1]. Fails with ZeroVector.
double embedding_similarity(const Vec& a, const Vec& b);

// Versioned checkpoint; loading rejects a schema-hash mismatch.
nlohmann::json model_to_json(const EmbeddingModel& model);
EmbeddingModel model_from_json(const nlohmann::json& j);
void save_model(const EmbeddingModel& model, const std::string& path);
EmbeddingModel load_model(const std::string& path, const ModalitySchema& expected_schema);

}  // namespace rumex

#endif  // RUMEX_HMPGCN_HPP
