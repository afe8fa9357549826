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

#include "rumex/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "rumex/drift.hpp"
#include "rumex/graph_sim.hpp"

namespace rumex {

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  std::size_t n = x.size();
  if (n < 2 || y.size() != n) fail(ErrorCode::ConfigError, "pearson needs >= 2 paired samples");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::shared_ptr<const ModalitySchema> default_schema() {
  return std::make_shared<ModalitySchema>(
      std::vector<std::pair<std::string, int>>{
          {"user", 8}, {"tweet", 16}, {"hashtag", 4}, {"link", 6}},
      std::vector<std::tuple<std::string, std::string, int>>{}, 4);
}

namespace {

// Standalone copy of an ego subgraph with `drop_edges` (view edge ids)
// removed; node ids and features carry over unchanged.
MsgGraph materialize(const SubgraphView& view, const std::vector<int>& drop_edges) {
  MsgGraph g(view.graph().schema_ptr());
  for (int i = 0; i < view.num_nodes(); ++i)
    g.add_node(view.node_id(i), view.graph().schema().name(view.modality(i)),
               view.features(i));
  for (const auto& e : view.local_edges()) {
    if (std::find(drop_edges.begin(), drop_edges.end(), e.edge) != drop_edges.end())
      continue;
    g.add_edge(view.node_id(e.u), view.node_id(e.v), view.edge_features(e.edge));
  }
  return g;
}

std::vector<int> two_hop_ego(const MsgGraph& g, int root, int cap) {
  std::vector<int> nodes;
  std::vector<int> dist(g.num_nodes(), -1);
  std::queue<int> q;
  q.push(root);
  dist[root] = 0;
  while (!q.empty() && static_cast<int>(nodes.size()) < cap) {
    int u = q.front();
    q.pop();
    nodes.push_back(u);
    if (dist[u] >= 2) continue;
    for (const MsgGraph::Incidence& inc : g.adjacent(u)) {
      if (dist[inc.neighbour] < 0) {
        dist[inc.neighbour] = dist[u] + 1;
        q.push(inc.neighbour);
      }
    }
  }
  return nodes;
}

bool connected_without(const SubgraphView& view, const std::vector<int>& dropped) {
  int n = view.num_nodes();
  if (n == 0) return false;
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : view.local_edges()) {
    if (std::find(dropped.begin(), dropped.end(), e.edge) != dropped.end()) continue;
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<bool> seen(n, false);
  std::queue<int> q;
  q.push(0);
  seen[0] = true;
  int count = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int nb : adj[u])
      if (!seen[nb]) {
        seen[nb] = true;
        ++count;
        q.push(nb);
      }
  }
  return count == n;
}

}  // namespace

MsgGraph gen_small_world_graph(std::shared_ptr<const ModalitySchema> schema, int n_nodes,
                               int neighbours, double rewire_p, std::uint64_t rng_seed,
                               const FeatureSampler& sampler) {
  if (n_nodes < 2 * neighbours + 2)
    fail(ErrorCode::ConfigError, "small-world graph needs more nodes");
  const FeatureSampler sample = sampler ? sampler : uniform_feature_sampler();
  Rng rng(rng_seed);
  MsgGraph g(schema);
  int a = schema->num_node_modalities();
  for (int i = 0; i < n_nodes; ++i) {
    int mod = static_cast<int>(rng.uniform_int(a));
    g.add_node("n" + std::to_string(i), schema->name(mod),
               sample(false, mod, schema->node_dim(mod), rng));
  }
  auto add = [&](int u, int v) {
    if (u == v || g.has_edge(u, v)) return false;
    int em = schema->edge_modality(g.node(u).modality, g.node(v).modality);
    g.add_edge_dense(u, v, sample(true, em, schema->edge_dim_by_index(em), rng));
    return true;
  };
  for (int i = 0; i < n_nodes; ++i) {
    for (int off = 1; off <= neighbours; ++off) {
      int j = (i + off) % n_nodes;
      if (rng.uniform() < rewire_p) {
        // rewire to a uniform non-neighbour; keep the lattice edge if the
        // retry budget runs out so the degree sequence stays regular
        bool placed = false;
        for (int attempt = 0; attempt < 20 && !placed; ++attempt)
          placed = add(i, static_cast<int>(rng.uniform_int(n_nodes)));
        if (placed) continue;
      }
      add(i, j);
    }
  }
  return g;
}

CorrelationResult run_correlation_experiment(const CorrelationConfig& cfg) {
  auto schema = default_schema();
  MsgGraph graph = gen_base_graph(schema, cfg.n_nodes, cfg.n_edges, cfg.rng_seed,
                                  cfg.modality_weights, {}, cfg.triangle_p);
  return run_correlation_experiment_on(graph, cfg);
}

CorrelationResult run_correlation_experiment_on(const MsgGraph& graph,
                                                const CorrelationConfig& cfg) {
  ModelConfig mc = cfg.model;
  mc.rng_seed = hash_combine(cfg.rng_seed, 0x4d4f44ULL);
  EmbeddingModel model = train(graph, mc).model;

  Rng rng(hash_combine(cfg.rng_seed, 0x504152ULL));
  SimilarityKernel kernel = SimilarityKernel::exact(0.0);
  GraphSimConfig gcfg;
  gcfg.allow_approx_mcs = true;

  CorrelationResult out;
  int attempts = 0;
  while (static_cast<int>(out.rows.size()) < cfg.n_pairs && attempts < cfg.n_pairs * 60) {
    ++attempts;
    int root = static_cast<int>(rng.uniform_int(graph.num_nodes()));
    std::vector<int> ego_nodes = two_hop_ego(graph, root, cfg.ego_cap);
    if (static_cast<int>(ego_nodes.size()) != cfg.ego_cap) continue;
    SubgraphView ego = induced_subgraph_dense(graph, ego_nodes);
    if (ego.num_edges() < cfg.min_ego_edges) continue;
    if (cfg.max_ego_edges > 0 && ego.num_edges() > cfg.max_ego_edges) continue;

    int deletions = 1 + static_cast<int>(out.rows.size()) % cfg.max_deletions;
    std::vector<int> dropped;
    bool ok = true;
    for (int d = 0; d < deletions && ok; ++d) {
      ok = false;
      for (int attempt = 0; attempt < 50; ++attempt) {
        int pick = static_cast<int>(rng.uniform_int(ego.num_edges()));
        int edge_id = ego.local_edges()[pick].edge;
        if (std::find(dropped.begin(), dropped.end(), edge_id) != dropped.end()) continue;
        dropped.push_back(edge_id);
        if (connected_without(ego, dropped)) {
          ok = true;
          break;
        }
        dropped.pop_back();
      }
    }
    if (!ok) continue;

    MsgGraph ga = materialize(ego, {});
    MsgGraph gb = materialize(ego, dropped);
    SubgraphView va = view_all(ga);
    SubgraphView vb = view_all(gb);

    CorrelationRow row;
    row.deletions = deletions;
    row.ged_cost = ged(va, vb, kernel, gcfg).cost;
    auto compose = [&](const SubgraphView& v) {
      return cfg.edge_composition ? embed_subgraph_edges(v, model)
                                  : embed_subgraph_nodes(v, model);
    };
    Vec za = compose(va), zb = compose(vb);
    if (norm2(za) < 1e-12 || norm2(zb) < 1e-12) continue;  // degenerate cancellation
    row.embedding_sim = embedding_similarity(za, zb);
    if (cfg.classical_measures) {
      row.mcs = mcs_similarity(va, vb, kernel, gcfg).score;
      row.graphsim = graphsim(va, vb, kernel, gcfg).score;
    }
    out.rows.push_back(row);
  }
  if (out.rows.size() < 2)
    fail(ErrorCode::ConfigError, "correlation experiment produced too few pairs");

  std::vector<double> emb, geds, mcss, gss;
  for (const CorrelationRow& r : out.rows) {
    emb.push_back(r.embedding_sim);
    geds.push_back(r.ged_cost);
    mcss.push_back(r.mcs);
    gss.push_back(r.graphsim);
  }
  out.pearson_embedding_ged = pearson(emb, geds);
  if (cfg.classical_measures) {
    out.pearson_embedding_mcs = pearson(emb, mcss);
    out.pearson_embedding_graphsim = pearson(emb, gss);
  }
  return out;
}

DriftExperimentResult run_drift_experiment(const DriftExperimentConfig& cfg) {
  DriftExperimentResult out;
  double total_delay = 0.0;
  for (int run = 0; run < cfg.runs; ++run) {
    Rng rng(hash_combine(cfg.rng_seed, run));
    DriftDetector::Config dc;
    dc.calibration_window = cfg.calibration_window;
    dc.kappa = cfg.kappa;
    dc.threshold = cfg.threshold;
    DriftDetector det(dc, cfg.dim);
    auto sample = [&](double mean) {
      Vec z(cfg.dim);
      for (double& x : z) x = rng.normal(mean, 1.0);
      return z;
    };
    for (int i = 0; i < cfg.pre_change; ++i) det.feed_zeta(sample(0.0));
    for (int i = 1; i <= cfg.post_change; ++i) {
      if (det.feed_zeta(sample(cfg.shift)) == DriftDetector::Outcome::Drift) {
        ++out.detected_within_deadline;
        total_delay += i;
        break;
      }
    }
  }
  if (out.detected_within_deadline > 0)
    out.mean_delay = total_delay / out.detected_within_deadline;

  for (int run = 0; run < cfg.null_runs; ++run) {
    Rng rng(hash_combine(cfg.rng_seed ^ 0x4e554cULL, run));
    DriftDetector::Config dc;
    dc.calibration_window = cfg.calibration_window;
    dc.kappa = cfg.kappa;
    dc.threshold = cfg.threshold;
    DriftDetector det(dc, cfg.dim);
    for (int i = 0; i < cfg.null_run_length; ++i) {
      Vec z(cfg.dim);
      for (double& x : z) x = rng.normal();
      DriftDetector::Outcome o = det.feed_zeta(z);
      if (o != DriftDetector::Outcome::Calibrating) {
        ++out.null_samples;
        if (o == DriftDetector::Outcome::Drift) ++out.null_alarms;
      }
    }
  }
  return out;
}

CandidatePool random_candidate_pool(Rng& rng, int m, double gamma, double max_coverage) {
  CandidatePool pool;
  pool.sims.to_query.resize(m);
  pool.sims.coverage.resize(m);
  pool.sims.between.assign(m, std::vector<double>(m, 0.0));
  for (int i = 0; i < m; ++i) {
    pool.candidates.push_back({"c" + std::to_string(i), static_cast<std::uint64_t>(i),
                               0.0});
    pool.sims.to_query[i] = rng.uniform(gamma, 1.0);
    pool.candidates[i].sim = pool.sims.to_query[i];
    pool.sims.coverage[i] = rng.uniform(0.0, max_coverage);
    pool.sims.between[i][i] = 1.0;
  }
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      pool.sims.between[i][j] = pool.sims.between[j][i] = rng.uniform();
  return pool;
}

}  // namespace rumex
