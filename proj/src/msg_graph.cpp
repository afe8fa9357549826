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

#include "rumex/msg_graph.hpp"

#include <algorithm>
#include <queue>

namespace rumex {

int MsgGraph::node_index(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) fail(ErrorCode::UnknownNode, "no node with id '" + id + "'");
  return it->second;
}

int MsgGraph::find_edge(int u, int v) const {
  auto it = edge_by_key_.find(edge_key(u, v));
  return it == edge_by_key_.end() ? -1 : it->second;
}

int MsgGraph::add_node(const std::string& id, const std::string& modality, Vec features) {
  if (by_id_.count(id)) fail(ErrorCode::DuplicateId, "node id '" + id + "' already exists");
  int mod = schema_->index_of(modality);
  if (static_cast<int>(features.size()) != schema_->node_dim(mod))
    fail(ErrorCode::FeatureDimMismatch,
         "node '" + id + "' of modality '" + modality + "' expects dim " +
             std::to_string(schema_->node_dim(mod)) + ", got " +
             std::to_string(features.size()));
  int dense = static_cast<int>(nodes_.size());
  by_id_[id] = dense;
  nodes_.push_back({id, mod, std::move(features)});
  adj_.emplace_back();
  return dense;
}

int MsgGraph::add_edge(const std::string& u, const std::string& v, Vec features) {
  return add_edge_dense(node_index(u), node_index(v), std::move(features));
}

int MsgGraph::add_edge_dense(int u, int v, Vec features) {
  if (u == v) fail(ErrorCode::ConfigError, "self-loops are not allowed");
  if (find_edge(u, v) >= 0)
    fail(ErrorCode::DuplicateId,
         "edge (" + nodes_[u].id + ", " + nodes_[v].id + ") already exists");
  int em = schema_->edge_modality(nodes_[u].modality, nodes_[v].modality);
  if (static_cast<int>(features.size()) != schema_->edge_dim_by_index(em))
    fail(ErrorCode::FeatureDimMismatch,
         "edge (" + nodes_[u].id + ", " + nodes_[v].id + ") expects dim " +
             std::to_string(schema_->edge_dim_by_index(em)) + ", got " +
             std::to_string(features.size()));
  if (u > v) std::swap(u, v);
  int idx = static_cast<int>(edges_.size());
  edges_.push_back({u, v, std::move(features)});
  adj_[u].push_back({v, idx});
  adj_[v].push_back({u, idx});
  edge_by_key_[edge_key(u, v)] = idx;
  return idx;
}

bool MsgGraph::is_connected_subset(const std::vector<int>& nodes) const {
  if (nodes.empty()) return false;
  std::unordered_map<int, bool> in_set;
  in_set.reserve(nodes.size());
  for (int n : nodes) in_set[n] = false;
  std::queue<int> q;
  q.push(nodes[0]);
  in_set[nodes[0]] = true;
  std::size_t seen = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (const Incidence& inc : adj_[u]) {
      auto it = in_set.find(inc.neighbour);
      if (it != in_set.end() && !it->second) {
        it->second = true;
        ++seen;
        q.push(inc.neighbour);
      }
    }
  }
  return seen == nodes.size();
}

SubgraphView::SubgraphView(const MsgGraph* g, std::vector<int> nodes, std::vector<int> edges)
    : g_(g), nodes_(std::move(nodes)), edges_(std::move(edges)) {
  local_by_dense_.reserve(nodes_.size());
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) local_by_dense_[nodes_[i]] = i;
  adj_.resize(nodes_.size());
  local_edges_.reserve(edges_.size());
  for (int e : edges_) {
    const MsgGraph::Edge& ed = g_->edge(e);
    int lu = local_by_dense_.at(ed.u);
    int lv = local_by_dense_.at(ed.v);
    local_edges_.push_back({lu, lv, e});
    adj_[lu].push_back({lv, e});
    adj_[lv].push_back({lu, e});
  }
}

int SubgraphView::local_of(int dense) const {
  auto it = local_by_dense_.find(dense);
  return it == local_by_dense_.end() ? -1 : it->second;
}

bool SubgraphView::is_connected() const {
  if (nodes_.empty()) return false;
  std::vector<bool> seen(nodes_.size(), false);
  std::queue<int> q;
  q.push(0);
  seen[0] = true;
  int count = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (auto [nb, e] : adj_[u]) {
      (void)e;
      if (!seen[nb]) {
        seen[nb] = true;
        ++count;
        q.push(nb);
      }
    }
  }
  return count == num_nodes();
}

SubgraphView induced_subgraph_dense(const MsgGraph& graph, std::vector<int> dense_ids) {
  std::sort(dense_ids.begin(), dense_ids.end());
  dense_ids.erase(std::unique(dense_ids.begin(), dense_ids.end()), dense_ids.end());
  for (int d : dense_ids)
    if (d < 0 || d >= graph.num_nodes())
      fail(ErrorCode::UnknownNode, "dense id out of range");
  std::unordered_map<int, bool> in_set;
  in_set.reserve(dense_ids.size());
  for (int d : dense_ids) in_set[d] = true;
  std::vector<int> edges;
  for (int d : dense_ids) {
    for (const MsgGraph::Incidence& inc : graph.adjacent(d)) {
      if (inc.neighbour > d && in_set.count(inc.neighbour)) edges.push_back(inc.edge);
    }
  }
  std::sort(edges.begin(), edges.end());
  return SubgraphView(&graph, std::move(dense_ids), std::move(edges));
}

SubgraphView induced_subgraph(const MsgGraph& graph, const std::vector<std::string>& node_ids) {
  std::vector<int> dense;
  dense.reserve(node_ids.size());
  for (const std::string& id : node_ids) dense.push_back(graph.node_index(id));
  return induced_subgraph_dense(graph, std::move(dense));
}

SubgraphView view_all(const MsgGraph& graph) {
  std::vector<int> nodes(graph.num_nodes());
  for (int i = 0; i < graph.num_nodes(); ++i) nodes[i] = i;
  std::vector<int> edges(graph.num_edges());
  for (int i = 0; i < graph.num_edges(); ++i) edges[i] = i;
  return SubgraphView(&graph, std::move(nodes), std::move(edges));
}

SubgraphView view_of(const MsgGraph& graph, const RumourSubgraph& rumour) {
  return SubgraphView(&graph, rumour.nodes, rumour.edges);
}

}  // namespace rumex
