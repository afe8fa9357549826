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

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <queue>
#include <set>

#include "rumex/hmpgcn.hpp"
#include "rumex/propagation.hpp"

using namespace rumex;

namespace {

std::shared_ptr<const ModalitySchema> two_mod_schema(int da = 2, int db = 2, int de = 2) {
  return std::make_shared<ModalitySchema>(
      std::vector<std::pair<std::string, int>>{{"a", da}, {"b", db}},
      std::vector<std::tuple<std::string, std::string, int>>{}, de);
}

void set_identity(Mat& m) {
  m.set_zero();
  for (int i = 0; i < std::min(m.rows, m.cols); ++i) m(i, i) = 1.0;
}

MsgGraph random_two_mod_graph(Rng& rng, int n, int extra_edges) {
  auto schema = two_mod_schema(2, 3, 2);
  MsgGraph g(schema);
  for (int i = 0; i < n; ++i) {
    bool a = rng.uniform() < 0.5;
    Vec f(a ? 2 : 3);
    for (double& x : f) x = rng.uniform(-1.0, 1.0);
    g.add_node("n" + std::to_string(i), a ? "a" : "b", f);
  }
  auto edge_feat = [&](int u, int v) {
    int em = schema->edge_modality(g.node(u).modality, g.node(v).modality);
    Vec f(schema->edge_dim_by_index(em));
    for (double& x : f) x = rng.uniform(-1.0, 1.0);
    return f;
  };
  for (int i = 1; i < n; ++i) {
    int j = static_cast<int>(rng.uniform_int(i));
    g.add_edge_dense(i, j, edge_feat(i, j));
  }
  for (int t = 0; t < extra_edges; ++t) {
    int u = static_cast<int>(rng.uniform_int(n)), v = static_cast<int>(rng.uniform_int(n));
    if (u != v && !g.has_edge(u, v)) g.add_edge_dense(u, v, edge_feat(u, v));
  }
  return g;
}

}  // namespace

TEST_CASE("forward matches a hand computation of the three phases (L=1, d=2)") {
  auto schema = two_mod_schema();
  MsgGraph g(schema);
  g.add_node("x", "a", {0.5, -0.25});
  g.add_node("y", "a", {0.1, 0.3});
  g.add_node("z", "b", {-0.4, 0.2});
  g.add_edge("x", "y", {1.0, 0.0});
  g.add_edge("y", "z", {0.0, 1.0});

  ModelConfig cfg;
  cfg.embed_dim = 2;
  cfg.num_layers = 1;
  EmbeddingModel model = init_model(*schema, cfg);
  // identity projections; message matrices scale by the (sender, receiver)
  // modality pair; identity aggregation with zero bias; the combine picks
  // community + self + edge summary with distinct weights
  for (Mat& p : model.proj_node) set_identity(p);
  for (Mat& p : model.proj_edge) set_identity(p);
  LayerParams& lp = model.layers[0];
  double scale[2][2] = {{1.0, 0.5}, {0.25, 2.0}};
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t) {
      lp.message[s * 2 + t].set_zero();
      lp.message[s * 2 + t](0, 0) = scale[s][t];
      lp.message[s * 2 + t](1, 1) = scale[s][t];
    }
  set_identity(lp.w_agg);
  lp.bias = {0.0, 0.0};
  lp.w_concat.set_zero();
  for (int i = 0; i < 2; ++i) {
    lp.w_concat(i, i) = 1.0;       // community
    lp.w_concat(i, 2 + i) = 0.5;   // self
    lp.w_concat(i, 4 + i) = 0.25;  // edge summary
  }

  NodeEmbeddings emb = forward(view_all(g), model);

  // hand computation for node y (neighbours x of modality a, z of modality b)
  Vec zx{0.5, -0.25}, zy{0.1, 0.3}, zz{-0.4, 0.2};
  // sending: x -> y uses scale[a][a] = 1.0; z -> y uses scale[b][a] = 0.25
  Vec m_xy{1.0 * zx[0], 1.0 * zx[1]};
  Vec m_zy{0.25 * zz[0], 0.25 * zz[1]};
  // receiving: sum of tanh(W_agg m + b) = sum of tanh(m)
  Vec recv_y{std::tanh(m_xy[0]) + std::tanh(m_zy[0]),
             std::tanh(m_xy[1]) + std::tanh(m_zy[1])};
  // edge summary: mean of identity-lifted incident edge features
  Vec esum_y{(1.0 + 0.0) / 2.0, (0.0 + 1.0) / 2.0};
  Vec expected_y{std::tanh(recv_y[0] + 0.5 * zy[0] + 0.25 * esum_y[0]),
                 std::tanh(recv_y[1] + 0.5 * zy[1] + 0.25 * esum_y[1])};
  CHECK(emb.z[1][0] == doctest::Approx(expected_y[0]).epsilon(1e-12));
  CHECK(emb.z[1][1] == doctest::Approx(expected_y[1]).epsilon(1e-12));

  // node x: single neighbour y (a -> a), edge summary = its one edge feature
  Vec recv_x{std::tanh(zy[0]), std::tanh(zy[1])};
  Vec expected_x{std::tanh(recv_x[0] + 0.5 * zx[0] + 0.25 * 1.0),
                 std::tanh(recv_x[1] + 0.5 * zx[1] + 0.25 * 0.0)};
  CHECK(emb.z[0][0] == doctest::Approx(expected_x[0]).epsilon(1e-12));
  CHECK(emb.z[0][1] == doctest::Approx(expected_x[1]).epsilon(1e-12));
}

TEST_CASE("isolated nodes receive an all-zero community embedding") {
  auto schema = two_mod_schema();
  MsgGraph g(schema);
  g.add_node("solo", "a", {0.3, 0.7});
  ModelConfig cfg;
  cfg.embed_dim = 2;
  cfg.num_layers = 1;
  EmbeddingModel model = init_model(*schema, cfg);
  for (Mat& p : model.proj_node) set_identity(p);
  LayerParams& lp = model.layers[0];
  set_identity(lp.w_agg);
  lp.bias = {0.0, 0.0};
  lp.w_concat.set_zero();
  for (int i = 0; i < 2; ++i) {
    lp.w_concat(i, i) = 1.0;
    lp.w_concat(i, 2 + i) = 1.0;
    lp.w_concat(i, 4 + i) = 1.0;
  }
  NodeEmbeddings emb = forward(view_all(g), model);
  // community and edge summary are zero, so the output is tanh(self)
  CHECK(emb.z[0][0] == doctest::Approx(std::tanh(0.3)).epsilon(1e-12));
  CHECK(emb.z[0][1] == doctest::Approx(std::tanh(0.7)).epsilon(1e-12));
}

TEST_CASE("permutation equivariance: relabelled graphs embed identically") {
  Rng rng(3);
  MsgGraph g = random_two_mod_graph(rng, 12, 8);
  ModelConfig cfg;
  cfg.embed_dim = 4;
  cfg.num_layers = 2;
  cfg.rng_seed = 5;
  EmbeddingModel model = init_model(g.schema(), cfg);

  // rebuild with nodes inserted in reverse order
  MsgGraph h(g.schema_ptr());
  for (int i = g.num_nodes() - 1; i >= 0; --i)
    h.add_node(g.node(i).id, g.schema().name(g.node(i).modality), g.node(i).features);
  for (int e = 0; e < g.num_edges(); ++e)
    h.add_edge(g.node(g.edge(e).u).id, g.node(g.edge(e).v).id, g.edge(e).features);

  NodeEmbeddings eg = forward(view_all(g), model);
  NodeEmbeddings eh = forward(view_all(h), model);
  for (int i = 0; i < g.num_nodes(); ++i) {
    int hi = h.node_index(g.node(i).id);
    for (int d = 0; d < cfg.embed_dim; ++d)
      CHECK(eg.z[i][d] == doctest::Approx(eh.z[hi][d]).epsilon(1e-12));
  }
}

TEST_CASE("modality sensitivity: switching a node's modality moves its embedding") {
  auto schema = two_mod_schema(2, 2, 2);
  MsgGraph g(schema);
  g.add_node("p", "a", {0.2, 0.4});
  g.add_node("q", "a", {0.6, -0.1});
  g.add_edge("p", "q", {0.0, 0.0});
  MsgGraph h(schema);
  h.add_node("p", "a", {0.2, 0.4});
  h.add_node("q", "b", {0.6, -0.1});  // same features, different modality
  h.add_edge("p", "q", {0.0, 0.0});

  ModelConfig cfg;
  cfg.embed_dim = 3;
  cfg.rng_seed = 11;  // random init keeps the per-pair message matrices distinct
  EmbeddingModel model = init_model(*schema, cfg);
  NodeEmbeddings eg = forward(view_all(g), model);
  NodeEmbeddings eh = forward(view_all(h), model);
  double diff = 0.0;
  for (int d = 0; d < cfg.embed_dim; ++d) diff += std::abs(eg.z[1][d] - eh.z[1][d]);
  CHECK(diff > 1e-6);
}

TEST_CASE("sampling pools") {
  auto schema = two_mod_schema();
  SUBCASE("star centre has no same-modality neighbour within one hop") {
    MsgGraph g(schema);
    g.add_node("c", "a", {0, 0});
    for (int i = 0; i < 3; ++i) {
      g.add_node("l" + std::to_string(i), "b", {0, 0});
      g.add_edge_dense(0, i + 1, {0, 0});
    }
    PairPools pools = enumerate_pools(view_all(g), 0, 1);
    CHECK(pools.positives.empty());
    Rng rng(1);
    SamplePools s = sample_pairs(view_all(g), 0, 1, 2, 2, rng);
    CHECK(s.pos_pool_empty);
    CHECK(s.positives.empty());
  }
  SUBCASE("complete same-modality graph has no negatives") {
    MsgGraph g(schema);
    for (int i = 0; i < 4; ++i) g.add_node("n" + std::to_string(i), "a", {0, 0});
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) g.add_edge_dense(i, j, {0, 0});
    PairPools pools = enumerate_pools(view_all(g), 0, 1);
    CHECK(pools.negatives.empty());
    Rng rng(1);
    SamplePools s = sample_pairs(view_all(g), 0, 1, 2, 2, rng);
    CHECK(s.neg_pool_empty);
  }
  SUBCASE("pools equal a brute-force BFS enumeration on a 6-node graph") {
    MsgGraph g(schema);
    g.add_node("n0", "a", {0, 0});
    g.add_node("n1", "b", {0, 0});
    g.add_node("n2", "a", {0, 0});
    g.add_node("n3", "b", {0, 0});
    g.add_node("n4", "a", {0, 0});
    g.add_node("n5", "b", {0, 0});
    g.add_edge("n0", "n1", {0, 0});
    g.add_edge("n1", "n2", {0, 0});
    g.add_edge("n2", "n3", {0, 0});
    g.add_edge("n3", "n4", {0, 0});
    // n5 stays isolated
    SubgraphView v = view_all(g);
    for (int depth = 1; depth <= 2; ++depth) {
      for (int start = 0; start < 6; ++start) {
        // independent BFS oracle
        std::vector<int> dist(6, 1000);
        std::queue<int> q;
        dist[start] = 0;
        q.push(start);
        while (!q.empty()) {
          int u = q.front();
          q.pop();
          for (auto [nb, e] : v.adjacent(u)) {
            (void)e;
            if (dist[nb] > dist[u] + 1) {
              dist[nb] = dist[u] + 1;
              q.push(nb);
            }
          }
        }
        std::vector<int> want_pos, want_neg;
        for (int u = 0; u < 6; ++u) {
          if (u == start) continue;
          if (dist[u] <= depth && v.modality(u) == v.modality(start)) want_pos.push_back(u);
          if (dist[u] > depth && v.modality(u) != v.modality(start)) want_neg.push_back(u);
        }
        PairPools pools = enumerate_pools(v, start, depth);
        CHECK(pools.positives == want_pos);
        CHECK(pools.negatives == want_neg);
      }
    }
  }
}

TEST_CASE("pair loss hand values") {
  ModelConfig cfg;
  cfg.embed_dim = 2;
  cfg.q_plus = 1;
  cfg.q_minus = 1;
  SUBCASE("all-zero embeddings give 2 log 2") {
    NodeEmbeddings emb;
    emb.z = {{0.0, 0.0}, {0.0, 0.0}};
    PairSet pairs;
    pairs.by_node.resize(2);
    pairs.by_node[0].positives = {1};
    pairs.by_node[0].negatives = {1};
    CHECK(pair_loss(emb, pairs, cfg) ==
          doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  }
  SUBCASE("aligned positives and anti-aligned negatives drive the loss to 0") {
    NodeEmbeddings emb;
    emb.z = {{30.0, 0.0}, {30.0, 0.0}, {-30.0, 0.0}};
    PairSet pairs;
    pairs.by_node.resize(3);
    pairs.by_node[0].positives = {1};
    pairs.by_node[0].negatives = {2};
    CHECK(pair_loss(emb, pairs, cfg) < 1e-9);
  }
  SUBCASE("empty pools contribute zero") {
    NodeEmbeddings emb;
    emb.z = {{1.0, 1.0}};
    PairSet pairs;
    pairs.by_node.resize(1);
    CHECK(pair_loss(emb, pairs, cfg) == 0.0);
  }
}

TEST_CASE("backprop matches central finite differences") {
  Rng rng(17);
  MsgGraph g = random_two_mod_graph(rng, 5, 3);
  ModelConfig cfg;
  cfg.embed_dim = 3;
  cfg.num_layers = 2;
  cfg.q_plus = 2;
  cfg.q_minus = 2;
  cfg.rng_seed = 23;
  EmbeddingModel model = init_model(g.schema(), cfg);
  SubgraphView view = view_all(g);
  Rng sample_rng(41);
  PairSet pairs = sample_all_pairs(view, cfg, sample_rng);

  EmbeddingModel grad = zeros_like(model);
  loss_and_gradient(view, model, pairs, grad);

  auto mblocks = param_blocks(model);
  auto gblocks = param_blocks(grad);
  const double h = 1e-5;
  double max_rel = 0.0;
  for (std::size_t b = 0; b < mblocks.size(); ++b) {
    std::vector<double>& theta = *mblocks[b].data;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      double saved = theta[i];
      theta[i] = saved + h;
      double up = pair_loss(forward(view, model), pairs, cfg);
      theta[i] = saved - h;
      double down = pair_loss(forward(view, model), pairs, cfg);
      theta[i] = saved;
      double fd = (up - down) / (2.0 * h);
      double bp = (*gblocks[b].data)[i];
      double rel = std::abs(fd - bp) / std::max(std::abs(fd) + std::abs(bp), 1e-4);
      max_rel = std::max(max_rel, rel);
    }
  }
  INFO("max relative gradient error ", max_rel);
  CHECK(max_rel <= 1e-4);
}

TEST_CASE("training") {
  Rng rng(8);
  MsgGraph g = random_two_mod_graph(rng, 100, 100);
  ModelConfig cfg;
  cfg.embed_dim = 4;
  cfg.num_layers = 1;
  cfg.learning_rate = 0.001;
  cfg.rng_seed = 99;

  SUBCASE("zero epochs returns the initialization unchanged") {
    cfg.epochs = 0;
    TrainResult r = train(g, cfg);
    EmbeddingModel fresh = init_model(g.schema(), cfg);
    auto a = param_blocks(r.model);
    auto b = param_blocks(fresh);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(*a[i].data == *b[i].data);
    CHECK(r.loss_trace.empty());
  }
  SUBCASE("same seed gives bit-identical models") {
    cfg.epochs = 6;
    TrainResult r1 = train(g, cfg);
    TrainResult r2 = train(g, cfg);
    auto a = param_blocks(r1.model);
    auto b = param_blocks(r2.model);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(*a[i].data == *b[i].data);
    CHECK(r1.loss_trace == r2.loss_trace);
  }
  SUBCASE("loss trace mostly decreases early in training") {
    cfg.epochs = 50;
    cfg.q_plus = 6;  // larger pools damp the per-epoch sampling noise
    cfg.q_minus = 6;
    TrainResult r = train(g, cfg);
    REQUIRE(r.loss_trace.size() == 50);
    int increases = 0;
    for (int i = 1; i < 10; ++i)
      if (r.loss_trace[i] > r.loss_trace[i - 1]) ++increases;
    INFO("first entries: ", r.loss_trace[0], " ", r.loss_trace[1], " ... ",
         r.loss_trace[9]);
    CHECK(increases <= 2);
    CHECK(r.loss_trace[9] < r.loss_trace[0]);
  }
  SUBCASE("non-finite features surface as NonFiniteLoss") {
    MsgGraph bad(g.schema_ptr());
    bad.add_node("x", "a", {std::nan(""), 0.0});
    bad.add_node("y", "a", {0.0, 0.0});
    bad.add_edge("x", "y", {0.0, 0.0});
    cfg.epochs = 1;
    CHECK_THROWS_AS(train(bad, cfg), Error);
  }
}

TEST_CASE("subgraph embeddings") {
  Rng rng(5);
  MsgGraph g = random_two_mod_graph(rng, 14, 10);
  ModelConfig cfg;
  cfg.embed_dim = 4;
  cfg.num_layers = 2;
  cfg.rng_seed = 3;
  EmbeddingModel model = init_model(g.schema(), cfg);

  SUBCASE("single node: the truncated embedding itself") {
    SubgraphView v = induced_subgraph_dense(g, {0});
    Vec z = embed_subgraph_nodes(v, model);
    NodeEmbeddings emb = forward(v, model);
    for (int d = 0; d < 4; ++d) CHECK(z[d] == doctest::Approx(emb.z[0][d]));
  }
  SUBCASE("two identical nodes, disconnected in the view: mean equals either") {
    MsgGraph h(g.schema_ptr());
    h.add_node("p", "a", {0.4, 0.6});
    h.add_node("q", "a", {0.4, 0.6});
    SubgraphView v = view_all(h);
    Vec mean = embed_subgraph_nodes(v, model);
    NodeEmbeddings emb = forward(v, model);
    for (int d = 0; d < 4; ++d) {
      CHECK(mean[d] == doctest::Approx(emb.z[0][d]).epsilon(1e-12));
      CHECK(emb.z[0][d] == doctest::Approx(emb.z[1][d]).epsilon(1e-15));
    }
  }
  SUBCASE("truncated passing equals a standalone forward on the induced graph") {
    std::vector<int> subset{0, 1, 2, 5, 7};
    SubgraphView v = induced_subgraph_dense(g, subset);
    // materialize the same subgraph as its own graph
    MsgGraph h(g.schema_ptr());
    for (int i = 0; i < v.num_nodes(); ++i)
      h.add_node(v.node_id(i), g.schema().name(v.modality(i)), v.features(i));
    for (const auto& e : v.local_edges())
      h.add_edge(v.node_id(e.u), v.node_id(e.v), v.edge_features(e.edge));
    Vec a = embed_subgraph_nodes(v, model);
    Vec b = embed_subgraph_nodes(view_all(h), model);
    for (int d = 0; d < 4; ++d) CHECK(a[d] == doctest::Approx(b[d]).epsilon(1e-12));
  }
  SUBCASE("edge-based embedding equals the mean over edges of endpoint averages") {
    std::vector<int> subset{0, 1, 2, 3, 4, 5, 6};
    SubgraphView v = induced_subgraph_dense(g, subset);
    REQUIRE(v.num_edges() >= 1);
    NodeEmbeddings emb = forward(v, model);
    Vec expect(4, 0.0);
    for (const auto& e : v.local_edges())
      for (int d = 0; d < 4; ++d)
        expect[d] += 0.5 * (emb.z[e.u][d] + emb.z[e.v][d]) / v.num_edges();
    Vec got = embed_subgraph_edges(v, model);
    for (int d = 0; d < 4; ++d) CHECK(got[d] == doctest::Approx(expect[d]).epsilon(1e-12));
  }
  SUBCASE("star expansion: (3 z_c + z_1 + z_2 + z_3) / 6") {
    MsgGraph star(g.schema_ptr());
    star.add_node("c", "a", {0.1, 0.2});
    star.add_node("l1", "b", {0.3, 0.1, 0.0});
    star.add_node("l2", "b", {0.4, -0.1, 0.2});
    star.add_node("l3", "a", {-0.2, 0.5});
    star.add_edge("c", "l1", {0.0, 0.0});
    star.add_edge("c", "l2", {0.0, 0.0});
    star.add_edge("c", "l3", {0.0, 0.0});
    SubgraphView v = view_all(star);
    NodeEmbeddings emb = forward(v, model);
    Vec got = embed_subgraph_edges(v, model);
    for (int d = 0; d < 4; ++d) {
      double expect = (3.0 * emb.z[0][d] + emb.z[1][d] + emb.z[2][d] + emb.z[3][d]) / 6.0;
      CHECK(got[d] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  SUBCASE("no edges") {
    SubgraphView v = induced_subgraph_dense(g, {0});
    CHECK_THROWS_AS(embed_subgraph_edges(v, model), Error);
  }
  SUBCASE("isomorphic subgraphs embed equally under both compositions") {
    // two disjoint copies of the same labelled structure inside one graph
    MsgGraph h(g.schema_ptr());
    for (int copy = 0; copy < 2; ++copy) {
      std::string p = copy == 0 ? "x" : "y";
      h.add_node(p + "0", "a", {0.1, 0.9});
      h.add_node(p + "1", "b", {0.2, 0.3, 0.4});
      h.add_node(p + "2", "a", {-0.5, 0.6});
      h.add_edge(p + "0", p + "1", {1.0, 0.5});
      h.add_edge(p + "1", p + "2", {0.5, 1.0});
    }
    SubgraphView va = induced_subgraph(h, {"x0", "x1", "x2"});
    SubgraphView vb = induced_subgraph(h, {"y0", "y1", "y2"});
    Vec na = embed_subgraph_nodes(va, model), nb = embed_subgraph_nodes(vb, model);
    Vec ea = embed_subgraph_edges(va, model), eb = embed_subgraph_edges(vb, model);
    for (int d = 0; d < 4; ++d) {
      CHECK(na[d] == doctest::Approx(nb[d]).epsilon(1e-12));
      CHECK(ea[d] == doctest::Approx(eb[d]).epsilon(1e-12));
    }
  }
}

TEST_CASE("embedding similarity") {
  CHECK(embedding_similarity({1.0, 2.0}, {1.0, 2.0}) == doctest::Approx(1.0));
  CHECK(embedding_similarity({1.0, 0.0}, {-1.0, 0.0}) == doctest::Approx(0.0));
  CHECK(embedding_similarity({1.0, 0.0}, {0.0, 5.0}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(embedding_similarity({0.0, 0.0}, {1.0, 0.0}), Error);
}

TEST_CASE("warm-start refresh") {
  Rng rng(44);
  MsgGraph g = random_two_mod_graph(rng, 60, 50);
  ModelConfig cfg;
  cfg.embed_dim = 4;
  cfg.num_layers = 1;
  cfg.learning_rate = 3e-4;
  cfg.epochs = 20;
  cfg.rng_seed = 6;
  EmbeddingModel trained = train(g, cfg).model;

  // held-out evaluation pairs, oversampled to damp the sampling noise
  ModelConfig eval_cfg = cfg;
  eval_cfg.q_plus = 8;
  eval_cfg.q_minus = 8;

  SUBCASE("a few refresh epochs on an unchanged graph barely move the loss") {
    SubgraphView view = view_all(g);
    Rng pair_rng(77);
    PairSet pairs = sample_all_pairs(view, eval_cfg, pair_rng);
    double before = pair_loss(forward(view, trained), pairs, eval_cfg);
    EmbeddingModel refreshed = continue_training(g, trained, 5).model;
    double after = pair_loss(forward(view, refreshed), pairs, eval_cfg);
    INFO("loss before ", before, " after ", after);
    CHECK(after <= 1.05 * before);
    CHECK(refreshed.version == trained.version + 1);
  }
  SUBCASE("refresh adapts to a grown graph better than the frozen model") {
    // extend the graph by ~30% new nodes wired densely among themselves: a
    // neighbourhood pattern the frozen model never saw
    MsgGraph grown = g;
    int base = grown.num_nodes();
    Rng ext(9);
    for (int i = 0; i < 18; ++i) {
      Vec f(2);
      for (double& x : f) x = ext.uniform(2.0, 3.0);  // shifted feature range
      grown.add_node("x" + std::to_string(i), "a", f);
    }
    for (int i = 0; i < 18; ++i)
      for (int j = i + 1; j < 18; ++j)
        if (ext.uniform() < 0.4) grown.add_edge_dense(base + i, base + j, {0.0, 0.0});
    grown.add_edge_dense(base, 0, {0.0, 0.0});  // keep it attached

    SubgraphView view = view_all(grown);
    Rng pair_rng(78);
    PairSet pairs = sample_all_pairs(view, eval_cfg, pair_rng);
    double frozen_loss = pair_loss(forward(view, trained), pairs, eval_cfg);
    EmbeddingModel refreshed = continue_training(grown, trained, 10).model;
    double refreshed_loss = pair_loss(forward(view, refreshed), pairs, eval_cfg);
    INFO("frozen ", frozen_loss, " refreshed ", refreshed_loss);
    CHECK(refreshed_loss < frozen_loss);
  }
}

TEST_CASE("checkpoint round trip and schema hash rejection") {
  Rng rng(2);
  MsgGraph g = random_two_mod_graph(rng, 10, 6);
  ModelConfig cfg;
  cfg.embed_dim = 3;
  cfg.epochs = 2;
  cfg.learning_rate = 0.01;
  TrainResult r = train(g, cfg);

  std::string path =
      (std::filesystem::temp_directory_path() / "rumex_model_test.json").string();
  save_model(r.model, path);
  EmbeddingModel back = load_model(path, g.schema());
  auto a = param_blocks(r.model);
  auto b = param_blocks(back);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(*a[i].data == *b[i].data);
  CHECK(back.version == r.model.version);

  auto other = two_mod_schema(3, 3, 3);
  CHECK_THROWS_AS(load_model(path, *other), Error);
  std::filesystem::remove(path);
}
