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

#include "rumex/hmpgcn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>

namespace rumex {

namespace {

constexpr double kLogClamp = 1e-12;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Vec tanh_vec(const Vec& x) {
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::tanh(x[i]);
  return y;
}

// Everything the backward pass needs from one forward run.
struct Trace {
  std::vector<Vec> esum;            // per node, shared across layers
  std::vector<std::vector<Vec>> z;  // (L+1) x n
  // Directed edge 2e is u->v of local edge e, 2e+1 is v->u.
  std::vector<std::vector<Vec>> msg;     // L x 2E
  std::vector<std::vector<Vec>> tanh_a;  // L x 2E
  std::vector<std::vector<Vec>> cvec;    // L x n, length 3d
};

void check_schema(const SubgraphView& view, const EmbeddingModel& model) {
  if (view.graph().schema().hash() != model.schema_hash)
    fail(ErrorCode::SchemaMismatch, "model was trained against a different schema");
}

Trace forward_traced(const SubgraphView& view, const EmbeddingModel& model) {
  check_schema(view, model);
  int n = view.num_nodes();
  int d = model.config.embed_dim;
  int layers = model.config.num_layers;
  int num_mod = model.num_node_modalities;

  Trace tr;
  tr.esum.assign(n, Vec(d, 0.0));
  for (int v = 0; v < n; ++v) {
    const auto& adj = view.adjacent(v);
    if (adj.empty()) continue;
    for (auto [nb, e] : adj) {
      (void)nb;
      int em = view.edge_modality(e);
      Vec lifted = matvec(model.proj_edge[em], view.edge_features(e));
      add_scaled(tr.esum[v], 1.0 / adj.size(), lifted);
    }
  }

  tr.z.resize(layers + 1);
  tr.z[0].resize(n);
  for (int v = 0; v < n; ++v)
    tr.z[0][v] = matvec(model.proj_node[view.modality(v)], view.features(v));

  int directed = 2 * view.num_edges();
  tr.msg.assign(layers, {});
  tr.tanh_a.assign(layers, {});
  tr.cvec.assign(layers, {});
  for (int l = 0; l < layers; ++l) {
    const LayerParams& lp = model.layers[l];
    tr.msg[l].resize(directed);
    tr.tanh_a[l].resize(directed);
    std::vector<Vec> recv(n, Vec(d, 0.0));
    const auto& ledges = view.local_edges();
    for (int e = 0; e < view.num_edges(); ++e) {
      int u = ledges[e].u, v = ledges[e].v;
      for (int dir = 0; dir < 2; ++dir) {
        int from = dir == 0 ? u : v;
        int to = dir == 0 ? v : u;
        const Mat& m = lp.message[view.modality(from) * num_mod + view.modality(to)];
        Vec message = matvec(m, tr.z[l][from]);
        Vec a = matvec(lp.w_agg, message);
        for (int i = 0; i < d; ++i) a[i] += lp.bias[i];
        Vec t = tanh_vec(a);
        for (int i = 0; i < d; ++i) recv[to][i] += t[i];
        tr.msg[l][2 * e + dir] = std::move(message);
        tr.tanh_a[l][2 * e + dir] = std::move(t);
      }
    }
    tr.cvec[l].resize(n);
    tr.z[l + 1].resize(n);
    for (int v = 0; v < n; ++v) {
      Vec c(3 * d);
      for (int i = 0; i < d; ++i) {
        c[i] = recv[v][i];
        c[d + i] = tr.z[l][v][i];
        c[2 * d + i] = tr.esum[v][i];
      }
      tr.z[l + 1][v] = tanh_vec(matvec(lp.w_concat, c));
      tr.cvec[l][v] = std::move(c);
    }
  }
  return tr;
}

// Loss over final embeddings; optionally accumulates dL/dz into gz.
double pair_loss_impl(const std::vector<Vec>& z, const PairSet& pairs,
                      const ModelConfig& cfg, std::vector<Vec>* gz) {
  double loss = 0.0;
  for (std::size_t v = 0; v < pairs.by_node.size(); ++v) {
    const SamplePools& p = pairs.by_node[v];
    if (!p.positives.empty()) {
      double scale = static_cast<double>(cfg.q_plus) / p.positives.size();
      for (int u : p.positives) {
        double x = dot(z[v], z[u]);
        double s = sigmoid(x);
        loss -= scale * std::log(std::max(s, kLogClamp));
        if (gz && s > kLogClamp) {
          double coeff = -scale * (1.0 - s);
          add_scaled((*gz)[v], coeff, z[u]);
          add_scaled((*gz)[u], coeff, z[v]);
        }
      }
    }
    if (!p.negatives.empty()) {
      double scale = static_cast<double>(cfg.q_minus) / p.negatives.size();
      for (int u : p.negatives) {
        double x = dot(z[v], z[u]);
        double s = sigmoid(-x);
        loss -= scale * std::log(std::max(s, kLogClamp));
        if (gz && s > kLogClamp) {
          double coeff = scale * sigmoid(x);
          add_scaled((*gz)[v], coeff, z[u]);
          add_scaled((*gz)[u], coeff, z[v]);
        }
      }
    }
  }
  return loss;
}

void sgd_step(EmbeddingModel& model, EmbeddingModel& grad, double lr) {
  auto mblocks = param_blocks(model);
  auto gblocks = param_blocks(grad);
  for (std::size_t b = 0; b < mblocks.size(); ++b) {
    std::vector<double>& m = *mblocks[b].data;
    const std::vector<double>& g = *gblocks[b].data;
    for (std::size_t i = 0; i < m.size(); ++i) m[i] -= lr * g[i];
  }
}

TrainResult run_epochs(const MsgGraph& graph, EmbeddingModel model, int epochs, Rng rng) {
  if (graph.num_nodes() == 0)
    fail(ErrorCode::ConfigError, "cannot train on an empty graph");
  TrainResult out;
  SubgraphView view = view_all(graph);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    PairSet pairs = sample_all_pairs(view, model.config, rng);
    EmbeddingModel grad = zeros_like(model);
    double loss = loss_and_gradient(view, model, pairs, grad);
    if (!std::isfinite(loss))
      fail(ErrorCode::NonFiniteLoss,
           "loss diverged at epoch " + std::to_string(epoch) +
               "; lower the learning rate");
    out.loss_trace.push_back(loss);
    sgd_step(model, grad, model.config.learning_rate);
  }
  out.model = std::move(model);
  return out;
}

nlohmann::json mat_to_json(const Mat& m) {
  return {{"rows", m.rows}, {"cols", m.cols}, {"data", m.a}};
}

Mat mat_from_json(const nlohmann::json& j) {
  Mat m(j.at("rows").get<int>(), j.at("cols").get<int>());
  m.a = j.at("data").get<std::vector<double>>();
  if (m.a.size() != static_cast<std::size_t>(m.rows) * m.cols)
    fail(ErrorCode::IoError, "matrix payload size mismatch");
  return m;
}

}  // namespace

void ModelConfig::validate() const {
  if (embed_dim < 1) fail(ErrorCode::ConfigError, "embed_dim must be >= 1");
  if (num_layers < 1) fail(ErrorCode::ConfigError, "num_layers must be >= 1");
  if (q_plus < 1 || q_minus < 1)
    fail(ErrorCode::ConfigError, "sample counts must be >= 1");
  if (epochs < 0) fail(ErrorCode::ConfigError, "epochs must be >= 0");
  if (!(learning_rate > 0.0))
    fail(ErrorCode::ConfigError, "learning_rate must be > 0");
}

std::vector<ParamBlock> param_blocks(EmbeddingModel& model) {
  std::vector<ParamBlock> blocks;
  for (std::size_t i = 0; i < model.proj_node.size(); ++i)
    blocks.push_back({"proj_node[" + std::to_string(i) + "]", &model.proj_node[i].a});
  for (std::size_t i = 0; i < model.proj_edge.size(); ++i)
    blocks.push_back({"proj_edge[" + std::to_string(i) + "]", &model.proj_edge[i].a});
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    LayerParams& lp = model.layers[l];
    std::string prefix = "layer" + std::to_string(l) + ".";
    for (std::size_t m = 0; m < lp.message.size(); ++m)
      blocks.push_back({prefix + "message[" + std::to_string(m) + "]", &lp.message[m].a});
    blocks.push_back({prefix + "w_agg", &lp.w_agg.a});
    blocks.push_back({prefix + "bias", &lp.bias});
    blocks.push_back({prefix + "w_concat", &lp.w_concat.a});
  }
  return blocks;
}

EmbeddingModel zeros_like(const EmbeddingModel& model) {
  EmbeddingModel g = model;
  for (ParamBlock& b : param_blocks(g)) std::fill(b.data->begin(), b.data->end(), 0.0);
  return g;
}

EmbeddingModel init_model(const ModalitySchema& schema, const ModelConfig& cfg) {
  cfg.validate();
  EmbeddingModel model;
  model.schema_hash = schema.hash();
  model.num_node_modalities = schema.num_node_modalities();
  model.config = cfg;
  int d = cfg.embed_dim;
  int a = schema.num_node_modalities();
  for (int m = 0; m < a; ++m) {
    model.node_dims.push_back(schema.node_dim(m));
    model.proj_node.emplace_back(d, schema.node_dim(m));
  }
  for (int e = 0; e < schema.num_edge_modalities(); ++e) {
    model.edge_dims.push_back(schema.edge_dim_by_index(e));
    model.proj_edge.emplace_back(d, schema.edge_dim_by_index(e));
  }
  for (int l = 0; l < cfg.num_layers; ++l) {
    LayerParams lp;
    for (int m = 0; m < a * a; ++m) lp.message.emplace_back(d, d);
    lp.w_agg = Mat(d, d);
    lp.bias.assign(d, 0.0);
    lp.w_concat = Mat(d, 3 * d);
    model.layers.push_back(std::move(lp));
  }
  double bound = 1.0 / std::sqrt(static_cast<double>(d));
  Rng rng(cfg.rng_seed);
  for (ParamBlock& b : param_blocks(model))
    for (double& x : *b.data) x = rng.uniform(-bound, bound);
  model.version = 1;
  return model;
}

NodeEmbeddings forward(const SubgraphView& view, const EmbeddingModel& model) {
  Trace tr = forward_traced(view, model);
  NodeEmbeddings out;
  out.z = std::move(tr.z.back());
  out.model_version = model.version;
  return out;
}

PairPools enumerate_pools(const SubgraphView& view, int v_local, int depth) {
  int n = view.num_nodes();
  std::vector<int> dist(n, std::numeric_limits<int>::max());
  std::queue<int> q;
  dist[v_local] = 0;
  q.push(v_local);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    if (dist[u] >= depth) continue;
    for (auto [nb, e] : view.adjacent(u)) {
      (void)e;
      if (dist[nb] > dist[u] + 1) {
        dist[nb] = dist[u] + 1;
        q.push(nb);
      }
    }
  }
  PairPools pools;
  int mod = view.modality(v_local);
  for (int u = 0; u < n; ++u) {
    if (u == v_local) continue;
    if (dist[u] <= depth && view.modality(u) == mod)
      pools.positives.push_back(u);
    else if (dist[u] > depth && view.modality(u) != mod)
      pools.negatives.push_back(u);
  }
  return pools;
}

SamplePools sample_pairs(const SubgraphView& view, int v_local, int depth, int q_plus,
                         int q_minus, Rng& rng) {
  PairPools raw = enumerate_pools(view, v_local, depth);
  const std::vector<int>& pos_pool = raw.positives;
  const std::vector<int>& neg_pool = raw.negatives;
  auto draw = [&rng](const std::vector<int>& pool, int count) {
    std::vector<int> out;
    if (pool.empty()) return out;
    if (static_cast<int>(pool.size()) >= count) {
      for (int idx : rng.sample_without_replacement(static_cast<int>(pool.size()), count))
        out.push_back(pool[idx]);
    } else {
      for (int i = 0; i < count; ++i)
        out.push_back(pool[rng.uniform_int(pool.size())]);
    }
    return out;
  };
  SamplePools pools;
  pools.pos_pool_empty = pos_pool.empty();
  pools.neg_pool_empty = neg_pool.empty();
  pools.positives = draw(pos_pool, q_plus);
  pools.negatives = draw(neg_pool, q_minus);
  return pools;
}

PairSet sample_all_pairs(const SubgraphView& view, const ModelConfig& cfg, Rng& rng) {
  PairSet set;
  set.by_node.reserve(view.num_nodes());
  for (int v = 0; v < view.num_nodes(); ++v)
    set.by_node.push_back(
        sample_pairs(view, v, cfg.num_layers, cfg.q_plus, cfg.q_minus, rng));
  return set;
}

double pair_loss(const NodeEmbeddings& emb, const PairSet& pairs, const ModelConfig& cfg) {
  return pair_loss_impl(emb.z, pairs, cfg, nullptr);
}

double loss_and_gradient(const SubgraphView& view, const EmbeddingModel& model,
                         const PairSet& pairs, EmbeddingModel& grad) {
  Trace tr = forward_traced(view, model);
  int n = view.num_nodes();
  int d = model.config.embed_dim;
  int layers = model.config.num_layers;
  int num_mod = model.num_node_modalities;

  std::vector<Vec> gz(n, Vec(d, 0.0));
  double loss = pair_loss_impl(tr.z[layers], pairs, model.config, &gz);

  std::vector<Vec> esum_grad(n, Vec(d, 0.0));
  const auto& ledges = view.local_edges();
  for (int l = layers - 1; l >= 0; --l) {
    const LayerParams& lp = model.layers[l];
    LayerParams& gl = grad.layers[l];
    std::vector<Vec> g_recv(n, Vec(d, 0.0));
    std::vector<Vec> g_prev(n, Vec(d, 0.0));
    for (int v = 0; v < n; ++v) {
      // through update: z^{l+1} = tanh(W_concat cvec)
      Vec du(d);
      for (int i = 0; i < d; ++i) {
        double zi = tr.z[l + 1][v][i];
        du[i] = gz[v][i] * (1.0 - zi * zi);
      }
      outer_acc(gl.w_concat, du, tr.cvec[l][v]);
      Vec gc = matvec_transpose(lp.w_concat, du);
      for (int i = 0; i < d; ++i) {
        g_recv[v][i] += gc[i];
        g_prev[v][i] += gc[d + i];
        esum_grad[v][i] += gc[2 * d + i];
      }
    }
    // through receive and send
    for (int e = 0; e < view.num_edges(); ++e) {
      int u = ledges[e].u, v = ledges[e].v;
      for (int dir = 0; dir < 2; ++dir) {
        int from = dir == 0 ? u : v;
        int to = dir == 0 ? v : u;
        const Vec& t = tr.tanh_a[l][2 * e + dir];
        Vec da(d);
        for (int i = 0; i < d; ++i) da[i] = g_recv[to][i] * (1.0 - t[i] * t[i]);
        outer_acc(gl.w_agg, da, tr.msg[l][2 * e + dir]);
        for (int i = 0; i < d; ++i) gl.bias[i] += da[i];
        Vec gm = matvec_transpose(lp.w_agg, da);
        int mi = view.modality(from) * num_mod + view.modality(to);
        outer_acc(gl.message[mi], gm, tr.z[l][from]);
        matvec_transpose_acc(lp.message[mi], gm, g_prev[from]);
      }
    }
    gz = std::move(g_prev);
  }
  // input projections: z^0 = P f(v); edge summaries feed every layer
  for (int v = 0; v < n; ++v) {
    outer_acc(grad.proj_node[view.modality(v)], gz[v], view.features(v));
    const auto& adj = view.adjacent(v);
    if (adj.empty()) continue;
    Vec scaled = esum_grad[v];
    for (double& x : scaled) x /= adj.size();
    for (auto [nb, e] : adj) {
      (void)nb;
      outer_acc(grad.proj_edge[view.edge_modality(e)], scaled, view.edge_features(e));
    }
  }
  return loss;
}

TrainResult train(const MsgGraph& graph, const ModelConfig& cfg) {
  EmbeddingModel model = init_model(graph.schema(), cfg);
  return run_epochs(graph, std::move(model),
                    cfg.epochs, Rng(hash_combine(cfg.rng_seed, 0x5452414eULL)));
}

TrainResult continue_training(const MsgGraph& graph, const EmbeddingModel& start, int epochs) {
  if (epochs < 1) fail(ErrorCode::ConfigError, "refresh needs at least one epoch");
  if (graph.schema().hash() != start.schema_hash)
    fail(ErrorCode::SchemaMismatch, "graph schema differs from the model's");
  TrainResult out =
      run_epochs(graph, start, epochs,
                 Rng(hash_combine(start.config.rng_seed, start.version)));
  out.model.version = start.version + 1;
  return out;
}

Vec embed_subgraph_nodes(const SubgraphView& view, const EmbeddingModel& model) {
  if (view.num_nodes() == 0)
    fail(ErrorCode::ConfigError, "cannot embed an empty subgraph");
  NodeEmbeddings emb = forward(view, model);
  Vec mean(model.config.embed_dim, 0.0);
  for (const Vec& z : emb.z) add_scaled(mean, 1.0, z);
  for (double& x : mean) x /= emb.z.size();
  return mean;
}

Vec embed_subgraph_edges(const SubgraphView& view, const EmbeddingModel& model) {
  if (view.num_edges() == 0)
    fail(ErrorCode::NoEdges, "edge-based embedding needs at least one edge");
  NodeEmbeddings emb = forward(view, model);
  Vec out(model.config.embed_dim, 0.0);
  for (int v = 0; v < view.num_nodes(); ++v)
    add_scaled(out, static_cast<double>(view.degree(v)), emb.z[v]);
  for (double& x : out) x /= 2.0 * view.num_edges();
  return out;
}

double embedding_similarity(const Vec& a, const Vec& b) {
  return (cosine(a, b) + 1.0) / 2.0;
}

nlohmann::json model_to_json(const EmbeddingModel& model) {
  nlohmann::json j;
  j["format"] = "rumex-model";
  j["schema_hash"] = model.schema_hash;
  j["version"] = model.version;
  j["num_node_modalities"] = model.num_node_modalities;
  j["node_dims"] = model.node_dims;
  j["edge_dims"] = model.edge_dims;
  j["config"] = {{"embed_dim", model.config.embed_dim},
                 {"num_layers", model.config.num_layers},
                 {"q_plus", model.config.q_plus},
                 {"q_minus", model.config.q_minus},
                 {"learning_rate", model.config.learning_rate},
                 {"epochs", model.config.epochs},
                 {"rng_seed", model.config.rng_seed}};
  auto mats = nlohmann::json::array();
  for (const Mat& m : model.proj_node) mats.push_back(mat_to_json(m));
  j["proj_node"] = mats;
  mats = nlohmann::json::array();
  for (const Mat& m : model.proj_edge) mats.push_back(mat_to_json(m));
  j["proj_edge"] = mats;
  auto layers = nlohmann::json::array();
  for (const LayerParams& lp : model.layers) {
    nlohmann::json lj;
    auto msgs = nlohmann::json::array();
    for (const Mat& m : lp.message) msgs.push_back(mat_to_json(m));
    lj["message"] = msgs;
    lj["w_agg"] = mat_to_json(lp.w_agg);
    lj["bias"] = lp.bias;
    lj["w_concat"] = mat_to_json(lp.w_concat);
    layers.push_back(std::move(lj));
  }
  j["layers"] = layers;
  return j;
}

EmbeddingModel model_from_json(const nlohmann::json& j) {
  if (!j.contains("format") || j.at("format") != "rumex-model")
    fail(ErrorCode::IoError, "not a model checkpoint");
  EmbeddingModel m;
  m.schema_hash = j.at("schema_hash").get<std::uint64_t>();
  m.version = j.at("version").get<std::uint64_t>();
  m.num_node_modalities = j.at("num_node_modalities").get<int>();
  m.node_dims = j.at("node_dims").get<std::vector<int>>();
  m.edge_dims = j.at("edge_dims").get<std::vector<int>>();
  const auto& c = j.at("config");
  m.config.embed_dim = c.at("embed_dim").get<int>();
  m.config.num_layers = c.at("num_layers").get<int>();
  m.config.q_plus = c.at("q_plus").get<int>();
  m.config.q_minus = c.at("q_minus").get<int>();
  m.config.learning_rate = c.at("learning_rate").get<double>();
  m.config.epochs = c.at("epochs").get<int>();
  m.config.rng_seed = c.at("rng_seed").get<std::uint64_t>();
  for (const auto& mj : j.at("proj_node")) m.proj_node.push_back(mat_from_json(mj));
  for (const auto& mj : j.at("proj_edge")) m.proj_edge.push_back(mat_from_json(mj));
  for (const auto& lj : j.at("layers")) {
    LayerParams lp;
    for (const auto& mj : lj.at("message")) lp.message.push_back(mat_from_json(mj));
    lp.w_agg = mat_from_json(lj.at("w_agg"));
    lp.bias = lj.at("bias").get<Vec>();
    lp.w_concat = mat_from_json(lj.at("w_concat"));
    m.layers.push_back(std::move(lp));
  }
  return m;
}

void save_model(const EmbeddingModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
  out << model_to_json(model).dump() << "\n";
}

EmbeddingModel load_model(const std::string& path, const ModalitySchema& expected_schema) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::IoError, std::string("malformed checkpoint: ") + e.what());
  }
  EmbeddingModel m = model_from_json(j);
  if (m.schema_hash != expected_schema.hash())
    fail(ErrorCode::SchemaMismatch, "checkpoint schema hash does not match");
  return m;
}

}  // namespace rumex
