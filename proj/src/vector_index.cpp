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

#include "rumex/vector_index.hpp"

#include <algorithm>

namespace rumex {

namespace {

// Worst-first ordering for the running top-m: larger distance is worse,
// larger id breaks ties (so the kept set matches a scan with id ties).
struct Entry {
  double d2;
  int point;
  const std::string* id;

  bool better_than(const Entry& o) const {
    if (d2 != o.d2) return d2 < o.d2;
    return *id < *o.id;
  }
};

}  // namespace

const Vec& VectorIndex::vector_of(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) fail(ErrorCode::UnknownNode, "index has no id '" + id + "'");
  return points_[it->second];
}

void VectorIndex::insert(const std::string& id, const Vec& z) {
  if (by_id_.count(id)) fail(ErrorCode::DuplicateId, "index already holds '" + id + "'");
  if (static_cast<int>(z.size()) != dim_)
    fail(ErrorCode::ConfigError, "vector dimension mismatch");
  Vec unit = normalized(z);
  by_id_[id] = static_cast<int>(ids_.size());
  ids_.push_back(id);
  points_.push_back(std::move(unit));
}

void VectorIndex::update(const std::string& id, const Vec& z) {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) fail(ErrorCode::UnknownNode, "index has no id '" + id + "'");
  points_[it->second] = normalized(z);
  dirty_ = true;
}

void VectorIndex::rebuild_if_needed() const {
  int n = static_cast<int>(points_.size());
  int tail = n - built_;
  if (!dirty_ && tail < std::max(64, built_)) return;
  nodes_.clear();
  nodes_.reserve(n);
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  root_ = n == 0 ? -1 : build(idx, 0, n, 0);
  built_ = n;
  dirty_ = false;
}

int VectorIndex::build(std::vector<int>& idx, int lo, int hi, int depth) const {
  if (lo >= hi) return -1;
  int axis = depth % dim_;
  int mid = (lo + hi) / 2;
  std::nth_element(idx.begin() + lo, idx.begin() + mid, idx.begin() + hi,
                   [&](int a, int b) {
                     if (points_[a][axis] != points_[b][axis])
                       return points_[a][axis] < points_[b][axis];
                     return a < b;
                   });
  int me = static_cast<int>(nodes_.size());
  nodes_.push_back({idx[mid], axis, -1, -1});
  int left = build(idx, lo, mid, depth + 1);
  int right = build(idx, mid + 1, hi, depth + 1);
  nodes_[me].left = left;
  nodes_[me].right = right;
  return me;
}

std::vector<VectorIndex::Hit> VectorIndex::knn(const Vec& query, int m) const {
  if (static_cast<int>(query.size()) != dim_)
    fail(ErrorCode::ConfigError, "query dimension mismatch");
  Vec q = normalized(query);
  rebuild_if_needed();

  std::vector<Entry> best;  // sorted best-first, size <= m
  auto consider = [&](int point) {
    Entry e{sq_dist(q, points_[point]), point, &ids_[point]};
    if (static_cast<int>(best.size()) == m && !e.better_than(best.back())) return;
    auto pos = std::upper_bound(best.begin(), best.end(), e,
                                [](const Entry& a, const Entry& b) {
                                  return a.better_than(b);
                                });
    best.insert(pos, e);
    if (static_cast<int>(best.size()) > m) best.pop_back();
  };

  // tree part
  auto descend = [&](auto&& self, int node) -> void {
    if (node < 0) return;
    const Node& nd = nodes_[node];
    consider(nd.point);
    double diff = q[nd.axis] - points_[nd.point][nd.axis];
    int near = diff < 0 ? nd.left : nd.right;
    int far = diff < 0 ? nd.right : nd.left;
    self(self, near);
    // visit the far side unless the splitting plane is strictly beyond the
    // current worst (equality may still hold a smaller id at equal distance)
    if (static_cast<int>(best.size()) < m || diff * diff <= best.back().d2)
      self(self, far);
  };
  descend(descend, root_);

  // linear tail
  for (int i = built_; i < static_cast<int>(points_.size()); ++i) consider(i);

  std::vector<Hit> out;
  out.reserve(best.size());
  for (const Entry& e : best) out.push_back({ids_[e.point], dot(q, points_[e.point])});
  return out;
}

nlohmann::json VectorIndex::to_json() const {
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t i = 0; i < ids_.size(); ++i)
    entries.push_back({{"id", ids_[i]}, {"vector", points_[i]}});
  return nlohmann::json{{"dim", dim_}, {"entries", entries}};
}

VectorIndex VectorIndex::from_json(const nlohmann::json& j) {
  VectorIndex idx(j.at("dim").get<int>());
  for (const auto& e : j.at("entries"))
    idx.insert(e.at("id").get<std::string>(), e.at("vector").get<Vec>());
  return idx;
}

}  // namespace rumex
