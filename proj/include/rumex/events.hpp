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

#ifndef RUMEX_EVENTS_HPP
#define RUMEX_EVENTS_HPP

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rumex/msg_graph.hpp"

namespace rumex {

// One element of the input stream. Events are totally ordered by their
// position in the stream (line order in a JSONL file).
struct StreamEvent {
  enum class Type { AddNode, AddEdge, DetectRumour, ExplainQuery };

  Type type = Type::AddNode;

  // AddNode: id, modality, features. DetectRumour: id, node_ids.
  // ExplainQuery: id is the query id; either rumour_ref names a registered
  // rumour or node_ids give the query subgraph inline.
  std::string id;
  std::string modality;
  Vec features;
  std::string u, v;  // AddEdge endpoints
  std::vector<std::string> node_ids;
  std::string rumour_ref;
  int k = 0;
  double gamma = 0.0;
};

// Registry of detected rumours with monotone arrival sequence numbers.
// Rumours may overlap in nodes; nothing forbids it.
class RumourLog {
 public:
  // Validates that all nodes exist and induce a connected subgraph, then
  // snapshots the induced edge set. Fails with DuplicateId, UnknownNode, or
  // DisconnectedRumour.
  const RumourSubgraph& register_rumour(const MsgGraph& graph, const std::string& id,
                                        const std::vector<std::string>& node_ids);

  // Re-inserts a rumour verbatim (checkpoint restore); keeps sequence
  // numbers monotone.
  void restore(RumourSubgraph r);

  bool has(const std::string& id) const { return by_id_.count(id) > 0; }
  const RumourSubgraph& get(const std::string& id) const;
  const RumourSubgraph& at(std::size_t i) const { return rumours_[i]; }
  std::size_t size() const { return rumours_.size(); }
  const std::vector<RumourSubgraph>& all() const { return rumours_; }

 private:
  std::vector<RumourSubgraph> rumours_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::uint64_t next_seq_ = 0;
};

// Applies one event. AddNode/AddEdge mutate the graph; DetectRumour
// registers a rumour and returns it; ExplainQuery is a no-op here (the
// stream engine answers it) and yields nullopt.
std::optional<RumourSubgraph> apply_event(MsgGraph& graph, RumourLog& log,
                                          const StreamEvent& ev);

nlohmann::json event_to_json(const StreamEvent& ev);
StreamEvent event_from_json(const nlohmann::json& j);

nlohmann::json schema_to_json(const ModalitySchema& schema);
std::shared_ptr<const ModalitySchema> schema_from_json(const nlohmann::json& j);

// JSONL event file: optional leading {"type":"schema",...} line, then one
// event per line. Fails with IoError on malformed lines.
struct EventFile {
  std::shared_ptr<const ModalitySchema> schema;  // null when no schema line
  std::vector<StreamEvent> events;
};

EventFile read_events(std::istream& in);
EventFile read_events_file(const std::string& path);
void write_events(std::ostream& out, const ModalitySchema& schema,
                  const std::vector<StreamEvent>& events);

}  // namespace rumex

#endif  // RUMEX_EVENTS_HPP
