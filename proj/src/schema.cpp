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

#include "rumex/schema.hpp"

#include <algorithm>

namespace rumex {

ModalitySchema::ModalitySchema(
    const std::vector<std::pair<std::string, int>>& node_modalities,
    const std::vector<std::tuple<std::string, std::string, int>>& edge_dims,
    int default_edge_dim) {
  if (node_modalities.empty())
    fail(ErrorCode::ConfigError, "schema needs at least one node modality");
  for (const auto& [name, dim] : node_modalities) {
    if (dim < 1)
      fail(ErrorCode::ConfigError, "feature dim of '" + name + "' must be >= 1");
    if (by_name_.count(name))
      fail(ErrorCode::DuplicateId, "duplicate modality name '" + name + "'");
    by_name_[name] = static_cast<int>(names_.size());
    names_.push_back(name);
    node_dims_.push_back(dim);
  }
  if (default_edge_dim < 1)
    fail(ErrorCode::ConfigError, "default edge dim must be >= 1");
  edge_dims_.assign(num_edge_modalities(), default_edge_dim);
  for (const auto& [a, b, dim] : edge_dims) {
    if (dim < 1) fail(ErrorCode::ConfigError, "edge dim must be >= 1");
    edge_dims_[edge_modality(index_of(a), index_of(b))] = dim;
  }
  compute_hash();
}

int ModalitySchema::index_of(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end())
    fail(ErrorCode::SchemaMismatch, "unknown modality '" + name + "'");
  return it->second;
}

int ModalitySchema::edge_modality(int i, int j) const {
  if (i > j) std::swap(i, j);
  // pairs (0,0),(0,1),...,(0,A-1),(1,1),... in row-major upper triangle
  int a = num_node_modalities();
  return i * a - i * (i - 1) / 2 + (j - i);
}

std::pair<int, int> ModalitySchema::edge_modality_pair(int edge_mod) const {
  int a = num_node_modalities();
  for (int i = 0; i < a; ++i) {
    int row = a - i;
    if (edge_mod < row) return {i, i + edge_mod};
    edge_mod -= row;
  }
  fail(ErrorCode::SchemaMismatch, "edge modality index out of range");
}

void ModalitySchema::compute_hash() {
  std::uint64_t h = 1469598103934665603ULL;  // FNV offset basis
  auto mix = [&h](const void* data, std::size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  for (std::size_t i = 0; i < names_.size(); ++i) {
    mix(names_[i].data(), names_[i].size());
    mix(&node_dims_[i], sizeof(int));
  }
  for (int d : edge_dims_) mix(&d, sizeof(int));
  hash_ = h;
}

}  // namespace rumex
