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

#include "rumex/propagation.hpp"

#include <algorithm>
#include <queue>
#include <unordered_set>

namespace rumex {

namespace {

constexpr std::uint64_t kRecoveryTag = 0x5245434f56ULL;
constexpr std::uint64_t kLtWeightTag = 0x4c545754ULL;

std::vector<int> resolve_seeds(const MsgGraph& graph, const PropagationConfig& cfg) {
  std::vector<int> seeds;
  if (!cfg.seeds.empty()) {
    for (const std::string& id : cfg.seeds) seeds.push_back(graph.node_index(id));
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  } else {
    if (cfg.seed_count < 1 || graph.num_nodes() == 0)
      fail(ErrorCode::EmptySeedSet, "no seed nodes");
    Rng rng(cfg.rng_seed);
    int want = std::min(cfg.seed_count, graph.num_nodes());
    seeds = rng.sample_without_replacement(graph.num_nodes(), want);
    std::sort(seeds.begin(), seeds.end());
  }
  if (seeds.empty()) fail(ErrorCode::EmptySeedSet, "no seed nodes");
  return seeds;
}

// Components of (nodes, transmit edges); each piece contains >= 1 seed by
// construction, since every non-seed node is reached over a transmit edge.
void split_components(const MsgGraph& graph, PropagationResult& res) {
  std::unordered_map<int, std::vector<std::pair<int, int>>> adj;  // node -> (nb, edge)
  for (int n : res.nodes) adj[n];
  for (int e : res.edges) {
    const MsgGraph::Edge& ed = graph.edge(e);
    adj[ed.u].push_back({ed.v, e});
    adj[ed.v].push_back({ed.u, e});
  }
  std::unordered_set<int> seen;
  for (int start : res.nodes) {
    if (seen.count(start)) continue;
    PropagationResult::Component comp;
    std::unordered_set<int> comp_edges;
    std::queue<int> q;
    q.push(start);
    seen.insert(start);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      comp.nodes.push_back(u);
      for (auto [nb, e] : adj[u]) {
        comp_edges.insert(e);
        if (!seen.count(nb)) {
          seen.insert(nb);
          q.push(nb);
        }
      }
    }
    comp.edges.assign(comp_edges.begin(), comp_edges.end());
    std::sort(comp.nodes.begin(), comp.nodes.end());
    std::sort(comp.edges.begin(), comp.edges.end());
    res.components.push_back(std::move(comp));
  }
}

void finalize(const MsgGraph& graph, PropagationResult& res) {
  std::sort(res.nodes.begin(), res.nodes.end());
  std::sort(res.edges.begin(), res.edges.end());
  split_components(graph, res);
}

}  // namespace

PropagationModel propagation_model_from_string(const std::string& s) {
  if (s == "si" || s == "SI") return PropagationModel::SI;
  if (s == "sis" || s == "SIS") return PropagationModel::SIS;
  if (s == "sir" || s == "SIR") return PropagationModel::SIR;
  if (s == "ic" || s == "IC") return PropagationModel::IC;
  if (s == "lt" || s == "LT") return PropagationModel::LT;
  fail(ErrorCode::ConfigError, "unknown propagation model '" + s + "'");
}

const char* propagation_model_name(PropagationModel m) {
  switch (m) {
    case PropagationModel::SI: return "si";
    case PropagationModel::SIS: return "sis";
    case PropagationModel::SIR: return "sir";
    case PropagationModel::IC: return "ic";
    case PropagationModel::LT: return "lt";
  }
  return "?";
}

void PropagationConfig::validate() const {
  auto in01 = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in01(infection_prob) || !in01(recovery_prob) || !in01(lt_threshold))
    fail(ErrorCode::ConfigError, "probabilities must lie in [0,1]");
  if (max_steps < 1) fail(ErrorCode::ConfigError, "max_steps must be >= 1");
  if (lt_weight_lo < 0.0 || lt_weight_hi < lt_weight_lo)
    fail(ErrorCode::ConfigError, "invalid LT weight range");
}

FeatureSampler uniform_feature_sampler() {
  return [](bool, int, int dim, Rng& rng) {
    Vec f(dim);
    for (double& x : f) x = rng.uniform();
    return f;
  };
}

MsgGraph gen_base_graph(std::shared_ptr<const ModalitySchema> schema, int n_nodes,
                        long long n_edges, std::uint64_t rng_seed,
                        const std::vector<double>& modality_weights,
                        const FeatureSampler& sampler, double triangle_p) {
  if (n_nodes < 1) fail(ErrorCode::ConfigError, "need at least one node");
  long long max_edges = static_cast<long long>(n_nodes) * (n_nodes - 1) / 2;
  if (n_edges > max_edges || (n_nodes >= 2 && n_edges < n_nodes - 1))
    fail(ErrorCode::InfeasibleEdgeCount,
         "cannot build a connected simple graph with " + std::to_string(n_nodes) +
             " nodes and " + std::to_string(n_edges) + " edges");

  const FeatureSampler sample = sampler ? sampler : uniform_feature_sampler();
  Rng rng(rng_seed);
  MsgGraph g(schema);

  int a = schema->num_node_modalities();
  std::vector<double> weights = modality_weights;
  if (weights.empty()) weights.assign(a, 1.0);
  if (static_cast<int>(weights.size()) != a)
    fail(ErrorCode::ConfigError, "modality weight count mismatch");
  double total = 0.0;
  for (double w : weights) total += w;
  if (total <= 0.0) fail(ErrorCode::ConfigError, "modality weights must sum > 0");

  for (int i = 0; i < n_nodes; ++i) {
    double x = rng.uniform() * total;
    int mod = a - 1;
    for (int m = 0; m < a; ++m) {
      if (x < weights[m]) {
        mod = m;
        break;
      }
      x -= weights[m];
    }
    g.add_node("n" + std::to_string(i), schema->name(mod),
               sample(false, mod, schema->node_dim(mod), rng));
  }

  auto add_edge = [&](int u, int v) {
    int em = schema->edge_modality(g.node(u).modality, g.node(v).modality);
    g.add_edge_dense(u, v, sample(true, em, schema->edge_dim_by_index(em), rng));
  };

  // random attachment tree, then extra edges with optional triadic closure
  for (int i = 1; i < n_nodes; ++i) add_edge(i, static_cast<int>(rng.uniform_int(i)));
  long long remaining = n_edges - (n_nodes - 1);
  while (remaining > 0) {
    if (triangle_p > 0.0 && rng.uniform() < triangle_p) {
      int w = static_cast<int>(rng.uniform_int(n_nodes));
      int deg = g.degree(w);
      if (deg >= 2) {
        int a = g.adjacent(w)[rng.uniform_int(deg)].neighbour;
        int b = g.adjacent(w)[rng.uniform_int(deg)].neighbour;
        if (a != b && !g.has_edge(a, b)) {
          add_edge(a, b);
          --remaining;
          continue;
        }
      }
    }
    int u = static_cast<int>(rng.uniform_int(n_nodes));
    int v = static_cast<int>(rng.uniform_int(n_nodes));
    if (u == v || g.has_edge(u, v)) continue;
    add_edge(u, v);
    --remaining;
  }
  return g;
}

PropagationResult simulate_infection(const MsgGraph& graph, const PropagationConfig& cfg) {
  cfg.validate();
  if (cfg.model != PropagationModel::SI && cfg.model != PropagationModel::SIS &&
      cfg.model != PropagationModel::SIR)
    fail(ErrorCode::ConfigError, "simulate_infection expects SI, SIS, or SIR");
  std::vector<int> seeds = resolve_seeds(graph, cfg);

  enum State : char { S, I, R };
  std::vector<State> state(graph.num_nodes(), S);
  std::vector<bool> ever(graph.num_nodes(), false);
  std::vector<int> infected = seeds;  // currently infectious, kept sorted
  PropagationResult res;
  for (int s : seeds) {
    state[s] = I;
    ever[s] = true;
    res.nodes.push_back(s);
  }
  // attempts per directed pair index the coupled uniform draws
  std::unordered_map<std::uint64_t, std::uint32_t> attempt;
  auto pair_key = [](int u, int v) {
    return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
  };

  for (int step = 0; step < cfg.max_steps; ++step) {
    // infection phase: first successful infector in node order wins
    int attempts_made = 0;
    std::unordered_map<int, int> newly;  // node -> transmitting edge
    for (int u : infected) {
      for (const MsgGraph::Incidence& inc : graph.adjacent(u)) {
        if (state[inc.neighbour] != S) continue;
        std::uint32_t k = attempt[pair_key(u, inc.neighbour)]++;
        ++attempts_made;
        double draw = keyed_uniform(cfg.rng_seed, u, inc.neighbour, k);
        if (draw < cfg.infection_prob && !newly.count(inc.neighbour))
          newly[inc.neighbour] = inc.edge;
      }
    }
    for (const auto& [v, e] : newly) {
      state[v] = I;
      if (!ever[v]) {
        ever[v] = true;
        res.nodes.push_back(v);
        res.edges.push_back(e);
      }
    }
    // recovery phase
    if (cfg.model != PropagationModel::SI && cfg.recovery_prob > 0.0) {
      for (int v = 0; v < graph.num_nodes(); ++v) {
        if (state[v] != I || newly.count(v)) continue;  // fresh infections persist a round
        double draw = keyed_uniform(cfg.rng_seed ^ kRecoveryTag, v, step, 0);
        if (draw < cfg.recovery_prob)
          state[v] = cfg.model == PropagationModel::SIS ? S : R;
      }
    }
    infected.clear();
    for (int v = 0; v < graph.num_nodes(); ++v)
      if (state[v] == I) infected.push_back(v);
    if (infected.empty()) break;
    // without any infective-susceptible contact the frontier is exhausted
    // for good, except under SIS where recoveries reopen susceptibility
    if (attempts_made == 0 && newly.empty() && cfg.model != PropagationModel::SIS) break;
  }
  finalize(graph, res);
  return res;
}

PropagationResult simulate_influence(const MsgGraph& graph, const PropagationConfig& cfg) {
  cfg.validate();
  if (cfg.model != PropagationModel::IC && cfg.model != PropagationModel::LT)
    fail(ErrorCode::ConfigError, "simulate_influence expects IC or LT");
  std::vector<int> seeds = resolve_seeds(graph, cfg);

  std::vector<bool> active(graph.num_nodes(), false);
  PropagationResult res;
  for (int s : seeds) {
    active[s] = true;
    res.nodes.push_back(s);
  }

  if (cfg.model == PropagationModel::IC) {
    std::vector<int> frontier = seeds;  // activated last round; attempt once
    for (int step = 0; step < cfg.max_steps && !frontier.empty(); ++step) {
      std::unordered_map<int, int> newly;
      for (int u : frontier) {
        for (const MsgGraph::Incidence& inc : graph.adjacent(u)) {
          if (active[inc.neighbour]) continue;
          double draw = keyed_uniform(cfg.rng_seed, u, inc.neighbour, 0);
          if (draw < cfg.infection_prob && !newly.count(inc.neighbour))
            newly[inc.neighbour] = inc.edge;
        }
      }
      frontier.clear();
      for (const auto& [v, e] : newly) {
        active[v] = true;
        res.nodes.push_back(v);
        res.edges.push_back(e);
        frontier.push_back(v);
      }
      std::sort(frontier.begin(), frontier.end());
    }
  } else {  // LT
    // edge weights fixed per run, keyed by edge index
    std::vector<double> weight(graph.num_edges());
    for (int e = 0; e < graph.num_edges(); ++e)
      weight[e] = cfg.lt_weight_lo + (cfg.lt_weight_hi - cfg.lt_weight_lo) *
                                         keyed_uniform(cfg.rng_seed ^ kLtWeightTag, e, 0, 0);
    for (int step = 0; step < cfg.max_steps; ++step) {
      std::vector<std::pair<int, std::vector<int>>> newly;  // node, activating edges
      for (int v = 0; v < graph.num_nodes(); ++v) {
        if (active[v]) continue;
        double influence = 0.0;
        std::vector<int> from;
        for (const MsgGraph::Incidence& inc : graph.adjacent(v)) {
          if (active[inc.neighbour]) {
            influence += weight[inc.edge];
            from.push_back(inc.edge);
          }
        }
        if (influence > cfg.lt_threshold) newly.push_back({v, std::move(from)});
      }
      if (newly.empty()) break;
      for (auto& [v, from] : newly) {
        active[v] = true;
        res.nodes.push_back(v);
        for (int e : from) res.edges.push_back(e);
      }
    }
    std::sort(res.edges.begin(), res.edges.end());
    res.edges.erase(std::unique(res.edges.begin(), res.edges.end()), res.edges.end());
  }
  finalize(graph, res);
  return res;
}

}  // namespace rumex
