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

#ifndef RUMEX_MSG_GRAPH_HPP
#define RUMEX_MSG_GRAPH_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rumex/linalg.hpp"
#include "rumex/schema.hpp"

namespace rumex {

// Undirected multi-modal social graph. Node ids are opaque strings mapped to
// dense integers internally; edges are stored once with canonical (u < v)
// endpoints and are queryable from both sides via adjacency lists. The graph
// only grows (no deletion), so dense node/edge indices are stable.
class MsgGraph {
 public:
  struct Node {
    std::string id;
    int modality;
    Vec features;
  };

  struct Edge {
    int u;  // dense id, u < v
    int v;
    Vec features;
  };

  struct Incidence {
    int neighbour;  // dense id of the other endpoint
    int edge;       // edge index
  };

  explicit MsgGraph(std::shared_ptr<const ModalitySchema> schema)
      : schema_(std::move(schema)) {}

  const ModalitySchema& schema() const { return *schema_; }
  std::shared_ptr<const ModalitySchema> schema_ptr() const { return schema_; }

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  bool has_node(const std::string& id) const { return by_id_.count(id) > 0; }
  // Dense index of an external id; fails with UnknownNode.
  int node_index(const std::string& id) const;
  const Node& node(int dense) const { return nodes_[dense]; }
  const Edge& edge(int idx) const { return edges_[idx]; }
  const std::vector<Incidence>& adjacent(int dense) const { return adj_[dense]; }
  int degree(int dense) const { return static_cast<int>(adj_[dense].size()); }

  bool has_edge(int u, int v) const { return find_edge(u, v) >= 0; }
  // Edge index for (u, v) in either endpoint order, or -1.
  int find_edge(int u, int v) const;

  // Returns the dense id of the new node. Fails on duplicate ids, unknown
  // modality, or a feature vector whose length differs from the schema dim.
  int add_node(const std::string& id, const std::string& modality, Vec features);
  // Fails when an endpoint is missing, the edge already exists, the edge is a
  // self-loop, or the features mismatch the edge modality dim.
  int add_edge(const std::string& u, const std::string& v, Vec features);
  int add_edge_dense(int u, int v, Vec features);

  int edge_modality_of(const Edge& e) const {
    return schema_->edge_modality(nodes_[e.u].modality, nodes_[e.v].modality);
  }

  // True when `nodes` (dense ids) induce a connected subgraph. Empty sets
  // are not connected; singletons are.
  bool is_connected_subset(const std::vector<int>& nodes) const;

  // Immutable copy for concurrent readers; the stream loop keeps mutating
  // the original while snapshots stay valid until dropped.
  std::shared_ptr<const MsgGraph> snapshot() const {
    return std::make_shared<const MsgGraph>(*this);
  }

 private:
  std::shared_ptr<const ModalitySchema> schema_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Incidence>> adj_;
  std::unordered_map<std::string, int> by_id_;
  std::unordered_map<std::uint64_t, int> edge_by_key_;

  static std::uint64_t edge_key(int u, int v) {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
  }
};

// A detected rumour: a connected induced subgraph of the parent graph at its
// arrival time. Edge indices are snapshotted at detection because the parent
// graph keeps growing; features stay shared with the parent.
struct RumourSubgraph {
  std::string id;
  std::vector<int> nodes;  // dense ids, sorted ascending
  std::vector<int> edges;  // parent edge indices, induced at arrival
  std::uint64_t arrival_seq = 0;
};

// Read-only induced-subgraph view with local indexing, the common currency
// of the similarity measures and the truncated message passing.
class SubgraphView {
 public:
  SubgraphView() = default;
  SubgraphView(const MsgGraph* g, std::vector<int> nodes, std::vector<int> edges);

  const MsgGraph& graph() const { return *g_; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  int dense_id(int local) const { return nodes_[local]; }
  const std::vector<int>& dense_ids() const { return nodes_; }
  const std::vector<int>& edge_ids() const { return edges_; }
  int local_of(int dense) const;  // -1 when the node is outside the view

  int modality(int local) const { return g_->node(nodes_[local]).modality; }
  const Vec& features(int local) const { return g_->node(nodes_[local]).features; }
  const std::string& node_id(int local) const { return g_->node(nodes_[local]).id; }

  struct LocalEdge {
    int u;  // local indices
    int v;
    int edge;  // parent edge index
  };
  const std::vector<LocalEdge>& local_edges() const { return local_edges_; }
  const Vec& edge_features(int parent_edge) const { return g_->edge(parent_edge).features; }
  int edge_modality(int parent_edge) const { return g_->edge_modality_of(g_->edge(parent_edge)); }

  // Within-view adjacency: (local neighbour, parent edge index).
  const std::vector<std::pair<int, int>>& adjacent(int local) const { return adj_[local]; }
  int degree(int local) const { return static_cast<int>(adj_[local].size()); }

  bool is_connected() const;

 private:
  const MsgGraph* g_ = nullptr;
  std::vector<int> nodes_;
  std::vector<int> edges_;
  std::vector<LocalEdge> local_edges_;
  std::vector<std::vector<std::pair<int, int>>> adj_;
  std::unordered_map<int, int> local_by_dense_;
};

// Exactly the edges of `graph` with both endpoints in `node_ids`. Fails with
// UnknownNode on ids outside the graph. Inducing again on the result's node
// set returns an equal view.
SubgraphView induced_subgraph(const MsgGraph& graph, const std::vector<std::string>& node_ids);
SubgraphView induced_subgraph_dense(const MsgGraph& graph, std::vector<int> dense_ids);

// The whole graph as a view.
SubgraphView view_all(const MsgGraph& graph);

// View of a registered rumour (uses its arrival-time edge snapshot).
SubgraphView view_of(const MsgGraph& graph, const RumourSubgraph& rumour);

}  // namespace rumex

#endif  // RUMEX_MSG_GRAPH_HPP
