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

#ifndef RUMEX_VECTOR_INDEX_HPP
#define RUMEX_VECTOR_INDEX_HPP

#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "rumex/linalg.hpp"

namespace rumex {

// Exact nearest-neighbour index over unit-normalized embeddings. Cosine
// similarity equals the dot product on unit vectors, which is monotone in
// Euclidean distance, so a kd-tree with Euclidean pruning answers cosine
// top-m exactly. Fresh inserts land in a linear tail until the next rebuild;
// queries always return the same id set as a full linear scan (ties broken
// by id).
class VectorIndex {
 public:
  explicit VectorIndex(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(ids_.size()); }
  bool contains(const std::string& id) const { return by_id_.count(id) > 0; }
  const Vec& vector_of(const std::string& id) const;

  // Normalizes on insert. Fails with DuplicateId or ZeroVector.
  void insert(const std::string& id, const Vec& z);

  // Replaces a stored vector (model refresh re-embedding).
  void update(const std::string& id, const Vec& z);

  struct Hit {
    std::string id;
    double cosine;
  };

  // The m stored ids maximizing cosine with the query, best first.
  std::vector<Hit> knn(const Vec& query, int m) const;

  nlohmann::json to_json() const;
  static VectorIndex from_json(const nlohmann::json& j);

 private:
  struct Node {
    int point = -1;
    int axis = 0;
    int left = -1;
    int right = -1;
  };

  int dim_;
  std::vector<std::string> ids_;
  std::vector<Vec> points_;  // unit vectors
  std::unordered_map<std::string, int> by_id_;

  mutable std::vector<Node> nodes_;
  mutable int root_ = -1;
  mutable int built_ = 0;       // points_[0..built_) are in the tree
  mutable bool dirty_ = false;  // vector content changed; full rebuild needed

  void rebuild_if_needed() const;
  int build(std::vector<int>& idx, int lo, int hi, int depth) const;
};

}  // namespace rumex

#endif  // RUMEX_VECTOR_INDEX_HPP
