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

#include "rumex/events.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace rumex {

using nlohmann::json;

const RumourSubgraph& RumourLog::register_rumour(const MsgGraph& graph, const std::string& id,
                                                 const std::vector<std::string>& node_ids) {
  if (by_id_.count(id)) fail(ErrorCode::DuplicateId, "rumour id '" + id + "' already exists");
  if (node_ids.empty()) fail(ErrorCode::ConfigError, "rumour '" + id + "' has no nodes");
  SubgraphView view = induced_subgraph(graph, node_ids);
  if (!view.is_connected())
    fail(ErrorCode::DisconnectedRumour,
         "rumour '" + id + "' does not induce a connected subgraph");
  RumourSubgraph r;
  r.id = id;
  r.nodes = view.dense_ids();
  r.edges = view.edge_ids();
  r.arrival_seq = next_seq_++;
  by_id_[id] = rumours_.size();
  rumours_.push_back(std::move(r));
  return rumours_.back();
}

void RumourLog::restore(RumourSubgraph r) {
  if (by_id_.count(r.id)) fail(ErrorCode::DuplicateId, "rumour id '" + r.id + "' already exists");
  next_seq_ = std::max(next_seq_, r.arrival_seq + 1);
  by_id_[r.id] = rumours_.size();
  rumours_.push_back(std::move(r));
}

const RumourSubgraph& RumourLog::get(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) fail(ErrorCode::UnknownNode, "no rumour with id '" + id + "'");
  return rumours_[it->second];
}

std::optional<RumourSubgraph> apply_event(MsgGraph& graph, RumourLog& log,
                                          const StreamEvent& ev) {
  switch (ev.type) {
    case StreamEvent::Type::AddNode:
      graph.add_node(ev.id, ev.modality, ev.features);
      return std::nullopt;
    case StreamEvent::Type::AddEdge:
      graph.add_edge(ev.u, ev.v, ev.features);
      return std::nullopt;
    case StreamEvent::Type::DetectRumour:
      return log.register_rumour(graph, ev.id, ev.node_ids);
    case StreamEvent::Type::ExplainQuery:
      return std::nullopt;
  }
  return std::nullopt;
}

json event_to_json(const StreamEvent& ev) {
  json j;
  switch (ev.type) {
    case StreamEvent::Type::AddNode:
      j["type"] = "add_node";
      j["id"] = ev.id;
      j["modality"] = ev.modality;
      j["features"] = ev.features;
      break;
    case StreamEvent::Type::AddEdge:
      j["type"] = "add_edge";
      j["u"] = ev.u;
      j["v"] = ev.v;
      j["features"] = ev.features;
      break;
    case StreamEvent::Type::DetectRumour:
      j["type"] = "rumour";
      j["id"] = ev.id;
      j["node_ids"] = ev.node_ids;
      break;
    case StreamEvent::Type::ExplainQuery:
      j["type"] = "explain";
      j["query_id"] = ev.id;
      if (!ev.rumour_ref.empty())
        j["rumour_id"] = ev.rumour_ref;
      else
        j["node_ids"] = ev.node_ids;
      j["k"] = ev.k;
      j["gamma"] = ev.gamma;
      break;
  }
  return j;
}

StreamEvent event_from_json(const json& j) {
  StreamEvent ev;
  const std::string type = j.at("type").get<std::string>();
  if (type == "add_node") {
    ev.type = StreamEvent::Type::AddNode;
    ev.id = j.at("id").get<std::string>();
    ev.modality = j.at("modality").get<std::string>();
    ev.features = j.at("features").get<Vec>();
  } else if (type == "add_edge") {
    ev.type = StreamEvent::Type::AddEdge;
    ev.u = j.at("u").get<std::string>();
    ev.v = j.at("v").get<std::string>();
    ev.features = j.at("features").get<Vec>();
  } else if (type == "rumour") {
    ev.type = StreamEvent::Type::DetectRumour;
    ev.id = j.at("id").get<std::string>();
    ev.node_ids = j.at("node_ids").get<std::vector<std::string>>();
  } else if (type == "explain") {
    ev.type = StreamEvent::Type::ExplainQuery;
    ev.id = j.at("query_id").get<std::string>();
    if (j.contains("rumour_id"))
      ev.rumour_ref = j.at("rumour_id").get<std::string>();
    else
      ev.node_ids = j.at("node_ids").get<std::vector<std::string>>();
    ev.k = j.at("k").get<int>();
    ev.gamma = j.at("gamma").get<double>();
  } else {
    fail(ErrorCode::IoError, "unknown event type '" + type + "'");
  }
  return ev;
}

json schema_to_json(const ModalitySchema& schema) {
  json mods = json::array();
  for (int i = 0; i < schema.num_node_modalities(); ++i)
    mods.push_back({{"name", schema.name(i)}, {"dim", schema.node_dim(i)}});
  json edges = json::array();
  for (int e = 0; e < schema.num_edge_modalities(); ++e) {
    auto [i, j] = schema.edge_modality_pair(e);
    edges.push_back({{"a", schema.name(i)}, {"b", schema.name(j)},
                     {"dim", schema.edge_dim_by_index(e)}});
  }
  return json{{"type", "schema"}, {"node_modalities", mods}, {"edge_dims", edges}};
}

std::shared_ptr<const ModalitySchema> schema_from_json(const json& j) {
  std::vector<std::pair<std::string, int>> mods;
  for (const auto& m : j.at("node_modalities"))
    mods.emplace_back(m.at("name").get<std::string>(), m.at("dim").get<int>());
  std::vector<std::tuple<std::string, std::string, int>> edges;
  if (j.contains("edge_dims"))
    for (const auto& e : j.at("edge_dims"))
      edges.emplace_back(e.at("a").get<std::string>(), e.at("b").get<std::string>(),
                         e.at("dim").get<int>());
  return std::make_shared<ModalitySchema>(mods, edges);
}

EventFile read_events(std::istream& in) {
  EventFile out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      fail(ErrorCode::IoError, "line " + std::to_string(lineno) + ": " + e.what());
    }
    try {
      if (j.at("type") == "schema") {
        if (out.schema || !out.events.empty())
          fail(ErrorCode::IoError, "schema line must come first");
        out.schema = schema_from_json(j);
      } else {
        out.events.push_back(event_from_json(j));
      }
    } catch (const json::exception& e) {
      fail(ErrorCode::IoError, "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

EventFile read_events_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  return read_events(in);
}

void write_events(std::ostream& out, const ModalitySchema& schema,
                  const std::vector<StreamEvent>& events) {
  out << schema_to_json(schema).dump() << "\n";
  for (const StreamEvent& ev : events) out << event_to_json(ev).dump() << "\n";
}

}  // namespace rumex
