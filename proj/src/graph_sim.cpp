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

#include "rumex/graph_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>

namespace rumex {

namespace {

// Node compatibility for the common-subgraph search. Kernel mode demands
// kernel-equal features (MCS proper); modality mode only demands equal
// modalities (graphsim scores the feature differences afterwards).
enum class MatchMode { Kernel, Modality };

struct McsSearch {
  const SubgraphView& g1;
  const SubgraphView& g2;
  const SimilarityKernel& kernel;
  MatchMode mode;
  int beam_width;

  std::vector<int> order;      // g1 locals, degree-descending
  std::vector<int> pos_of;     // g1 local -> position
  std::vector<int> rem_edges;  // g1 edges whose later endpoint is at position >= pos
  std::vector<std::vector<int>> compat;  // per position

  McsSearch(const SubgraphView& a, const SubgraphView& b, const SimilarityKernel& k,
            MatchMode m, int beam)
      : g1(a), g2(b), kernel(k), mode(m), beam_width(beam) {
    int n1 = g1.num_nodes();
    order.resize(n1);
    for (int i = 0; i < n1; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int x, int y) {
      if (g1.degree(x) != g1.degree(y)) return g1.degree(x) > g1.degree(y);
      return x < y;
    });
    pos_of.assign(n1, 0);
    for (int p = 0; p < n1; ++p) pos_of[order[p]] = p;

    rem_edges.assign(n1 + 1, 0);
    std::vector<int> later_count(n1 + 1, 0);
    for (const auto& e : g1.local_edges())
      later_count[std::max(pos_of[e.u], pos_of[e.v])]++;
    for (int p = n1 - 1; p >= 0; --p) rem_edges[p] = rem_edges[p + 1] + later_count[p];

    compat.resize(n1);
    for (int p = 0; p < n1; ++p) {
      int v = order[p];
      for (int j = 0; j < g2.num_nodes(); ++j)
        if (node_compatible(v, j)) compat[p].push_back(j);
    }
  }

  bool node_compatible(int i, int j) const {
    if (g1.modality(i) != g2.modality(j)) return false;
    if (mode == MatchMode::Modality) return true;
    return kernel.feature_equal(g1.features(i), g2.features(j));
  }

  bool edge_compatible(int e1, int e2) const {
    if (mode == MatchMode::Modality) return true;
    return kernel.feature_equal(g1.edge_features(e1), g2.edge_features(e2));
  }

  int find_g2_edge(int a, int b) const {
    for (auto [nb, e] : g2.adjacent(a))
      if (nb == b) return e;
    return -1;
  }

  // Edges gained by mapping g1 local v1 -> g2 local j given current map.
  int gained_edges(int v1, int j, const std::vector<int>& map) const {
    int gained = 0;
    for (auto [nb, e1] : g1.adjacent(v1)) {
      int m = map[nb];
      if (m < 0) continue;
      int e2 = find_g2_edge(j, m);
      if (e2 >= 0 && edge_compatible(e1, e2)) ++gained;
    }
    return gained;
  }

  // --- exact branch and bound ---
  std::vector<int> best_map;
  int best_nodes = 0, best_edges = 0, best_value = -1;
  std::vector<int> map;
  std::vector<char> used;
  int used_count = 0;

  void run_exact() {
    map.assign(g1.num_nodes(), -1);
    used.assign(g2.num_nodes(), 0);
    recurse(0, 0, 0);
  }

  void recurse(int pos, int nodes, int edges) {
    int value = nodes + edges;
    if (value > best_value) {
      best_value = value;
      best_nodes = nodes;
      best_edges = edges;
      best_map = map;
    }
    int n1 = g1.num_nodes();
    if (pos == n1) return;
    int rem_nodes = std::min(n1 - pos, g2.num_nodes() - used_count);
    int rem_e = std::min(rem_edges[pos], g2.num_edges() - edges);
    if (value + rem_nodes + rem_e <= best_value) return;

    int v1 = order[pos];
    for (int j : compat[pos]) {
      if (used[j]) continue;
      int gained = gained_edges(v1, j, map);
      map[v1] = j;
      used[j] = 1;
      ++used_count;
      recurse(pos + 1, nodes + 1, edges + gained);
      --used_count;
      used[j] = 0;
      map[v1] = -1;
    }
    recurse(pos + 1, nodes, edges);  // leave v1 unmatched
  }

  // --- beam search for graphs above the exact bound ---
  struct BeamState {
    std::vector<int> map;
    std::vector<char> used;
    int used_count = 0;
    int nodes = 0, edges = 0;
    std::uint64_t tick = 0;
  };

  void run_beam() {
    int n1 = g1.num_nodes();
    std::uint64_t ticker = 0;
    std::vector<BeamState> beam(1);
    beam[0].map.assign(n1, -1);
    beam[0].used.assign(g2.num_nodes(), 0);
    for (int pos = 0; pos < n1; ++pos) {
      std::vector<BeamState> next;
      int v1 = order[pos];
      for (const BeamState& st : beam) {
        for (int j : compat[pos]) {
          if (st.used[j]) continue;
          BeamState child = st;
          child.edges += gained_edges(v1, j, st.map);
          child.map[v1] = j;
          child.used[j] = 1;
          ++child.used_count;
          ++child.nodes;
          child.tick = ++ticker;
          next.push_back(std::move(child));
        }
        BeamState skip = st;
        skip.tick = ++ticker;
        next.push_back(std::move(skip));
      }
      auto rank = [&](const BeamState& st) {
        int rem_nodes = std::min(n1 - pos - 1, g2.num_nodes() - st.used_count);
        int rem_e = std::min(rem_edges[pos + 1], g2.num_edges() - st.edges);
        return st.nodes + st.edges + rem_nodes + rem_e;
      };
      std::sort(next.begin(), next.end(), [&](const BeamState& a, const BeamState& b) {
        int ra = rank(a), rb = rank(b);
        if (ra != rb) return ra > rb;
        return a.tick < b.tick;
      });
      if (static_cast<int>(next.size()) > beam_width) next.resize(beam_width);
      beam = std::move(next);
    }
    for (const BeamState& st : beam) {
      if (st.nodes + st.edges > best_value) {
        best_value = st.nodes + st.edges;
        best_nodes = st.nodes;
        best_edges = st.edges;
        best_map = st.map;
      }
    }
  }
};

MappingResult run_mcs(const SubgraphView& g1, const SubgraphView& g2,
                      const SimilarityKernel& kernel, const GraphSimConfig& cfg,
                      MatchMode mode) {
  if (g1.num_nodes() == 0 || g2.num_nodes() == 0)
    fail(ErrorCode::ConfigError, "common-subgraph search needs non-empty graphs");
  MappingResult out;
  bool exact = std::max(g1.num_nodes(), g2.num_nodes()) <= cfg.exact_node_bound;
  if (!exact && !cfg.allow_approx_mcs)
    fail(ErrorCode::SizeLimitExceeded,
         "graphs exceed the exact node bound (" + std::to_string(cfg.exact_node_bound) +
             "); enable allow_approx_mcs for beam search");
  McsSearch search(g1, g2, kernel, mode, cfg.beam_width);
  if (exact)
    search.run_exact();
  else
    search.run_beam();
  out.map = search.best_map;
  out.common_nodes = search.best_nodes;
  out.common_edges = search.best_edges;
  out.approximate = !exact;
  return out;
}

double mcs_denominator(const SubgraphView& g1, const SubgraphView& g2,
                       const MappingResult& m) {
  int common = m.common_nodes + m.common_edges;
  int delta_nodes = (g1.num_nodes() - m.common_nodes) + (g2.num_nodes() - m.common_nodes);
  int delta_edges = (g1.num_edges() - m.common_edges) + (g2.num_edges() - m.common_edges);
  return static_cast<double>(common + delta_nodes + delta_edges);
}

// Jaccard over the modality-feature set {modality} u {(dim, value)}; values
// compare equal within `tol`. Only called for same-modality pairs.
double feature_jaccard(const Vec& a, const Vec& b, double tol) {
  int eq = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) <= tol) ++eq;
  int d = static_cast<int>(a.size());
  double inter = 1.0 + eq;
  double uni = 2.0 * (1 + d) - inter;
  return inter / uni;
}

}  // namespace

MappingResult mcs_mapping(const SubgraphView& g1, const SubgraphView& g2,
                          const SimilarityKernel& kernel, const GraphSimConfig& cfg) {
  return run_mcs(g1, g2, kernel, cfg, MatchMode::Kernel);
}

ScoreResult mcs_similarity(const SubgraphView& g1, const SubgraphView& g2,
                           const SimilarityKernel& kernel, const GraphSimConfig& cfg) {
  MappingResult m = run_mcs(g1, g2, kernel, cfg, MatchMode::Kernel);
  double denom = mcs_denominator(g1, g2, m);
  double common = m.common_nodes + m.common_edges;
  return {denom > 0.0 ? common / denom : 1.0, m.approximate};
}

ScoreResult graphsim(const SubgraphView& g1, const SubgraphView& g2,
                     const SimilarityKernel& kernel, const GraphSimConfig& cfg) {
  MappingResult m = run_mcs(g1, g2, kernel, cfg, MatchMode::Modality);
  double tol = kernel.equality_tolerance();
  std::vector<double> node_score(g1.num_nodes(), 0.0);
  double total = 0.0;
  for (int i = 0; i < g1.num_nodes(); ++i) {
    if (m.map[i] < 0) continue;
    node_score[i] = feature_jaccard(g1.features(i), g2.features(m.map[i]), tol);
    total += node_score[i];
  }
  for (const auto& e : g1.local_edges()) {
    int a = m.map[e.u], b = m.map[e.v];
    if (a < 0 || b < 0) continue;
    bool matched = false;
    for (auto [nb, e2] : g2.adjacent(a)) {
      (void)e2;
      if (nb == b) {
        matched = true;
        break;
      }
    }
    if (matched) total += 0.5 * (node_score[e.u] + node_score[e.v]);
  }
  double denom = mcs_denominator(g1, g2, m);
  return {denom > 0.0 ? total / denom : 1.0, m.approximate};
}

namespace {

struct GedSearch {
  const SubgraphView& g1;
  const SubgraphView& g2;
  const SimilarityKernel& kernel;

  std::vector<int> order;
  std::vector<int> pos_of;
  std::vector<int> rem_edges1;

  GedSearch(const SubgraphView& a, const SubgraphView& b, const SimilarityKernel& k)
      : g1(a), g2(b), kernel(k) {
    int n1 = g1.num_nodes();
    order.resize(n1);
    for (int i = 0; i < n1; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int x, int y) {
      if (g1.degree(x) != g1.degree(y)) return g1.degree(x) > g1.degree(y);
      return x < y;
    });
    pos_of.assign(n1, 0);
    for (int p = 0; p < n1; ++p) pos_of[order[p]] = p;
    rem_edges1.assign(n1 + 1, 0);
    std::vector<int> later(n1 + 1, 0);
    for (const auto& e : g1.local_edges()) later[std::max(pos_of[e.u], pos_of[e.v])]++;
    for (int p = n1 - 1; p >= 0; --p) rem_edges1[p] = rem_edges1[p + 1] + later[p];
  }

  bool node_equal(int i, int j) const {
    return g1.modality(i) == g2.modality(j) &&
           kernel.feature_equal(g1.features(i), g2.features(j));
  }
  bool edge_equal(int e1, int e2) const {
    return g1.edge_modality(e1) == g2.edge_modality(e2) &&
           kernel.feature_equal(g1.edge_features(e1), g2.edge_features(e2));
  }

  int find_g2_edge(int a, int b) const {
    for (auto [nb, e] : g2.adjacent(a))
      if (nb == b) return e;
    return -1;
  }

  // Edit cost contributed by assigning the g1 node at `pos` to g2 local `w`
  // (or deleting it when w < 0), against the prefix assignment `map`.
  double assign_cost(const std::vector<int>& map, int pos, int w) const {
    double cost = 0.0;
    int v1 = order[pos];
    cost += w < 0 ? 1.0 : (node_equal(v1, w) ? 0.0 : 1.0);
    for (auto [nb, e1] : g1.adjacent(v1)) {
      int p = pos_of[nb];
      if (p >= pos) continue;
      int m = map[p];
      int e2 = (w >= 0 && m >= 0) ? find_g2_edge(w, m) : -1;
      if (e2 >= 0)
        cost += edge_equal(e1, e2) ? 0.0 : 1.0;
      else
        cost += 1.0;  // g1 edge deleted
    }
    if (w >= 0) {
      // inserted g2 edges between w and already-mapped nodes with no g1 twin
      for (auto [nb2, e2] : g2.adjacent(w)) {
        (void)e2;
        int p_prev = -1;
        for (int p = 0; p < pos; ++p)
          if (map[p] == nb2) {
            p_prev = p;
            break;
          }
        if (p_prev < 0) continue;
        int v_prev = order[p_prev];
        bool has_g1 = false;
        for (auto [nb1, e1] : g1.adjacent(v1)) {
          (void)e1;
          if (nb1 == v_prev) {
            has_g1 = true;
            break;
          }
        }
        if (!has_g1) cost += 1.0;
      }
    }
    return cost;
  }

  // Insert every unused g2 node and every g2 edge touching one.
  double completion_cost(const std::vector<int>& map) const {
    std::vector<char> used(g2.num_nodes(), 0);
    int used_count = 0;
    for (int m : map)
      if (m >= 0) {
        used[m] = 1;
        ++used_count;
      }
    double cost = g2.num_nodes() - used_count;
    for (const auto& e : g2.local_edges())
      if (!used[e.u] || !used[e.v]) cost += 1.0;
    return cost;
  }

  // Admissible bound: forced node insert/deletes plus forced edge ops.
  double heuristic(const std::vector<int>& map, int pos) const {
    int used_count = 0;
    std::vector<char> used(g2.num_nodes(), 0);
    for (int p = 0; p < pos; ++p)
      if (map[p] >= 0) {
        used[map[p]] = 1;
        ++used_count;
      }
    int r1 = g1.num_nodes() - pos;
    int r2 = g2.num_nodes() - used_count;
    int e1r = rem_edges1[pos];
    int e2r = 0;
    for (const auto& e : g2.local_edges())
      if (!used[e.u] || !used[e.v]) ++e2r;
    return std::abs(r1 - r2) + std::abs(e1r - e2r);
  }

  struct State {
    std::vector<int> map;  // per position
    int pos = 0;
    double g = 0.0;
    double f = 0.0;
    std::uint64_t tick = 0;
  };

  bool astar(std::size_t max_expansions, double& out_cost) {
    int n1 = g1.num_nodes();
    auto cmp = [](const State& a, const State& b) {
      if (a.f != b.f) return a.f > b.f;
      return a.tick > b.tick;
    };
    std::priority_queue<State, std::vector<State>, decltype(cmp)> open(cmp);
    std::uint64_t ticker = 0;
    State init;
    init.f = heuristic(init.map, 0);
    open.push(init);
    std::size_t expanded = 0;
    while (!open.empty()) {
      State st = open.top();
      open.pop();
      if (st.pos == n1) {
        out_cost = st.g;
        return true;
      }
      if (++expanded > max_expansions) return false;
      expand(st, ticker, [&](State&& child) { open.push(std::move(child)); });
    }
    out_cost = completion_cost({});
    return true;  // n1 == 0
  }

  template <typename Push>
  void expand(const State& st, std::uint64_t& ticker, Push push) {
    int n1 = g1.num_nodes();
    std::vector<char> used(g2.num_nodes(), 0);
    for (int m : st.map)
      if (m >= 0) used[m] = 1;
    auto make_child = [&](int w) {
      State child;
      child.map = st.map;
      child.map.push_back(w);
      child.pos = st.pos + 1;
      child.g = st.g + assign_cost(st.map, st.pos, w);
      if (child.pos == n1) {
        child.g += completion_cost(child.map);
        child.f = child.g;
      } else {
        child.f = child.g + heuristic(child.map, child.pos);
      }
      child.tick = ++ticker;
      push(std::move(child));
    };
    for (int w = 0; w < g2.num_nodes(); ++w)
      if (!used[w]) make_child(w);
    make_child(-1);
  }

  double beam(int beam_width) {
    int n1 = g1.num_nodes();
    std::uint64_t ticker = 0;
    std::vector<State> beam_states(1);
    beam_states[0].f = heuristic(beam_states[0].map, 0);
    for (int pos = 0; pos < n1; ++pos) {
      std::vector<State> next;
      for (const State& st : beam_states)
        expand(st, ticker, [&](State&& child) { next.push_back(std::move(child)); });
      std::sort(next.begin(), next.end(), [](const State& a, const State& b) {
        if (a.f != b.f) return a.f < b.f;
        return a.tick < b.tick;
      });
      if (static_cast<int>(next.size()) > beam_width) next.resize(beam_width);
      beam_states = std::move(next);
    }
    double best = std::numeric_limits<double>::infinity();
    for (const State& st : beam_states) best = std::min(best, st.g);
    if (beam_states.empty()) best = completion_cost({});  // n1 == 0
    return best;
  }
};

}  // namespace

GedResult ged(const SubgraphView& g1, const SubgraphView& g2,
              const SimilarityKernel& kernel, const GraphSimConfig& cfg) {
  GedSearch search(g1, g2, kernel);
  bool exact = std::max(g1.num_nodes(), g2.num_nodes()) <= cfg.exact_node_bound;
  if (exact) {
    double cost = 0.0;
    if (search.astar(cfg.astar_max_expansions, cost)) return {cost, false};
  }
  return {search.beam(cfg.beam_width), true};
}

ScoreResult ged_similarity(const SubgraphView& g1, const SubgraphView& g2,
                           const SimilarityKernel& kernel, const GraphSimConfig& cfg) {
  GedResult r = ged(g1, g2, kernel, cfg);
  double denom = g1.num_nodes() + g1.num_edges() + g2.num_nodes() + g2.num_edges();
  if (denom <= 0.0) return {1.0, r.approximate};
  double s = 1.0 - r.cost / denom;
  return {std::clamp(s, 0.0, 1.0), r.approximate};
}

}  // namespace rumex
