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

#ifndef RUMEX_SCHEMA_HPP
#define RUMEX_SCHEMA_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "rumex/errors.hpp"

namespace rumex {

// Node and edge types of a multi-modal social graph. Node modalities are
// named and ordered; edge modalities are the unordered pairs of node
// modalities, each with its own feature dimension. Immutable once built.
class ModalitySchema {
 public:
  ModalitySchema() = default;

  // `node_modalities` is a list of (name, feature_dim). `edge_dims` maps an
  // unordered pair of modality names to the edge feature dimension; pairs not
  // listed default to `default_edge_dim`.
  ModalitySchema(
      const std::vector<std::pair<std::string, int>>& node_modalities,
      const std::vector<std::tuple<std::string, std::string, int>>& edge_dims = {},
      int default_edge_dim = 1);

  int num_node_modalities() const { return static_cast<int>(names_.size()); }
  int num_edge_modalities() const {
    int a = num_node_modalities();
    return a * (a + 1) / 2;
  }

  const std::string& name(int modality) const { return names_[modality]; }
  int node_dim(int modality) const { return node_dims_[modality]; }

  // Index of a node modality name; fails with SchemaMismatch when unknown.
  int index_of(const std::string& name) const;
  bool has(const std::string& name) const { return by_name_.count(name) > 0; }

  // Canonical index of the edge modality (i, j); order of i, j is irrelevant.
  int edge_modality(int i, int j) const;
  int edge_dim_by_index(int edge_mod) const { return edge_dims_[edge_mod]; }
  int edge_dim(int i, int j) const { return edge_dims_[edge_modality(i, j)]; }
  // The two node modalities making up an edge modality, smaller index first.
  std::pair<int, int> edge_modality_pair(int edge_mod) const;

  // FNV-1a over the canonical serialization; model checkpoints store it and
  // refuse to load against a different schema.
  std::uint64_t hash() const { return hash_; }

 private:
  std::vector<std::string> names_;
  std::vector<int> node_dims_;
  std::vector<int> edge_dims_;  // indexed by edge_modality(i, j)
  std::unordered_map<std::string, int> by_name_;
  std::uint64_t hash_ = 0;

  void compute_hash();
};

}  // namespace rumex

#endif  // RUMEX_SCHEMA_HPP
