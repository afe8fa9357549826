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

#include "rumex/stream_engine.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "rumex/graph_sim.hpp"

namespace rumex {

namespace {

nlohmann::json selection_to_json(const SelectionConfig& s) {
  return nlohmann::json{{"k", s.k},
                        {"gamma", s.gamma},
                        {"strategy", strategy_name(s.strategy)},
                        {"passes", s.passes},
                        {"beta", s.beta},
                        {"utility_mode", utility_mode_name(s.utility.mode)},
                        {"sim_source", sim_source_name(s.utility.sim_source)},
                        {"lambda1", s.utility.lambda1},
                        {"lambda2", s.utility.lambda2},
                        {"alpha", s.utility.alpha},
                        {"delta", s.utility.delta}};
}

SelectionConfig selection_from_json(const nlohmann::json& j) {
  SelectionConfig s;
  s.k = j.at("k").get<int>();
  s.gamma = j.at("gamma").get<double>();
  s.strategy = strategy_from_string(j.at("strategy").get<std::string>());
  s.passes = j.at("passes").get<int>();
  s.beta = j.at("beta").get<double>();
  s.utility.mode = utility_mode_from_string(j.at("utility_mode").get<std::string>());
  s.utility.sim_source = sim_source_from_string(j.at("sim_source").get<std::string>());
  s.utility.lambda1 = j.at("lambda1").get<double>();
  s.utility.lambda2 = j.at("lambda2").get<double>();
  s.utility.alpha = j.at("alpha").get<double>();
  s.utility.delta = j.at("delta").get<double>();
  s.utility.gamma = s.gamma;
  return s;
}

bool onepass_compatible(const SelectionConfig& want, const SelectionConfig& have) {
  return want.k == have.k && want.gamma == have.gamma &&
         want.utility.mode == have.utility.mode &&
         want.utility.lambda1 == have.utility.lambda1 &&
         want.utility.lambda2 == have.utility.lambda2 &&
         want.utility.alpha == have.utility.alpha &&
         want.utility.delta == have.utility.delta;
}

}  // namespace

nlohmann::json EngineConfig::to_json() const {
  return nlohmann::json{
      {"model",
       {{"embed_dim", model.embed_dim},
        {"num_layers", model.num_layers},
        {"q_plus", model.q_plus},
        {"q_minus", model.q_minus},
        {"learning_rate", model.learning_rate},
        {"epochs", model.epochs},
        {"rng_seed", model.rng_seed}}},
      {"selection", selection_to_json(selection)},
      {"cache_capacity", cache_capacity},
      {"reservoir_cap", reservoir_cap},
      {"calibration_window", calibration_window},
      {"drift_kappa", drift_kappa},
      {"drift_threshold", drift_threshold},
      {"drift_enabled", drift_enabled},
      {"refresh_on_drift", refresh_on_drift},
      {"refresh_epochs", refresh_epochs},
      {"epsilon_cache", epsilon_cache},
      {"overfetch_min", overfetch_min},
      {"kernel",
       {{"kind", kernel.kind == SimilarityKernel::Kind::ExactMatch ? "exact" : "graded"},
        {"epsilon", kernel.epsilon},
        {"scale", kernel.scale}}}};
}

EngineConfig EngineConfig::from_json(const nlohmann::json& j) {
  EngineConfig c;
  const auto& m = j.at("model");
  c.model.embed_dim = m.at("embed_dim").get<int>();
  c.model.num_layers = m.at("num_layers").get<int>();
  c.model.q_plus = m.at("q_plus").get<int>();
  c.model.q_minus = m.at("q_minus").get<int>();
  c.model.learning_rate = m.at("learning_rate").get<double>();
  c.model.epochs = m.at("epochs").get<int>();
  c.model.rng_seed = m.at("rng_seed").get<std::uint64_t>();
  c.selection = selection_from_json(j.at("selection"));
  c.cache_capacity = j.at("cache_capacity").get<int>();
  c.reservoir_cap = j.at("reservoir_cap").get<int>();
  c.calibration_window = j.at("calibration_window").get<int>();
  c.drift_kappa = j.at("drift_kappa").get<double>();
  c.drift_threshold = j.at("drift_threshold").get<double>();
  c.drift_enabled = j.at("drift_enabled").get<bool>();
  c.refresh_on_drift = j.at("refresh_on_drift").get<bool>();
  c.refresh_epochs = j.at("refresh_epochs").get<int>();
  c.epsilon_cache = j.at("epsilon_cache").get<double>();
  c.overfetch_min = j.at("overfetch_min").get<int>();
  const auto& k = j.at("kernel");
  c.kernel = k.at("kind") == "exact" ? SimilarityKernel::exact(k.at("epsilon").get<double>())
                                     : SimilarityKernel::graded(k.at("scale").get<double>());
  return c;
}

StreamEngine::StreamEngine(std::shared_ptr<const ModalitySchema> schema, EngineConfig cfg)
    : schema_(std::move(schema)), cfg_(std::move(cfg)), graph_(schema_) {
  MedianCache::Config mc;
  mc.capacity = cfg_.cache_capacity;
  mc.reservoir_cap = cfg_.reservoir_cap;
  mc.onepass = cfg_.selection;
  mc.onepass.strategy = Strategy::OnePass;
  mc.onepass.utility.gamma = mc.onepass.gamma;
  cache_ = MedianCache(mc);
}

const EmbeddingModel& StreamEngine::model() const {
  if (!model_) fail(ErrorCode::ModelMissing, "no trained model; run train first");
  return *model_;
}

std::uint64_t StreamEngine::model_version() const { return model_ ? model_->version : 0; }

const VectorIndex& StreamEngine::index() const {
  if (!index_) fail(ErrorCode::ModelMissing, "no index before a model exists");
  return *index_;
}

Vec StreamEngine::embed_view(const SubgraphView& view) const {
  Vec z = view.num_edges() > 0 ? embed_subgraph_edges(view, *model_)
                               : embed_subgraph_nodes(view, *model_);
  if (norm2(z) < 1e-12 && view.num_edges() > 0) z = embed_subgraph_nodes(view, *model_);
  if (norm2(z) < 1e-12) {
    // saturated coordinates can cancel exactly; such subgraphs carry no
    // direction, so they share one fixed axis instead of crashing the index
    z.assign(model_->config.embed_dim, 0.0);
    z[0] = 1.0;
  }
  return z;
}

bool StreamEngine::needs_coverage(const SelectionConfig& cfg) const {
  return cfg.utility.mode != UtilityMode::Content && cfg.utility.lambda2 > 0.0;
}

double StreamEngine::coverage_of_rumour(const std::string& id, bool at_detect) {
  auto it = coverage_cache_.find(id);
  if (it != coverage_cache_.end() && (at_detect || it->second.second == graph_.num_nodes()))
    return it->second.first;
  const RumourSubgraph& r = log_.get(id);
  double cov = coverage_modality(view_of(graph_, r), cfg_.selection.utility.alpha,
                                 cfg_.selection.utility.delta, cfg_.kernel);
  coverage_cache_[id] = {cov, graph_.num_nodes()};
  return cov;
}

void StreamEngine::register_embedded(const RumourSubgraph& rumour, bool allow_drift,
                                     EventResult* out) {
  Vec z = embed_view(view_of(graph_, rumour));
  index_->insert(rumour.id, z);
  const Vec& unit = index_->vector_of(rumour.id);

  MedianCache::Observation obs;
  obs.rumour_id = rumour.id;
  obs.arrival_seq = rumour.arrival_seq;
  obs.embedding = unit;
  obs.coverage = needs_coverage(cfg_.selection) ? coverage_of_rumour(rumour.id, true) : 0.0;
  for (int mi : cache_.observe(obs)) reseed_median(mi);

  if (cfg_.drift_enabled && allow_drift) {
    if (!detector_ && cache_.size() >= cache_.capacity()) {
      std::vector<Vec> anchors;
      for (const MedianCache::Median& m : cache_.medians()) anchors.push_back(m.embedding);
      DriftDetector::Config dc;
      dc.calibration_window = cfg_.calibration_window;
      dc.kappa = cfg_.drift_kappa;
      dc.threshold = cfg_.drift_threshold;
      detector_.emplace(dc, std::move(anchors));
    }
    if (detector_) {
      DriftDetector::Outcome o = detector_->feed_embedding(unit);
      if (o == DriftDetector::Outcome::Drift) {
        if (out) out->drift = true;
        if (cfg_.refresh_on_drift) refresh_model();
      }
    }
  }
}

StreamEngine::EventResult StreamEngine::handle(const StreamEvent& ev) {
  EventResult result;
  switch (ev.type) {
    case StreamEvent::Type::AddNode:
    case StreamEvent::Type::AddEdge:
      apply_event(graph_, log_, ev);
      break;
    case StreamEvent::Type::DetectRumour: {
      auto rumour = apply_event(graph_, log_, ev);
      if (model_) register_embedded(*rumour, true, &result);
      break;
    }
    case StreamEvent::Type::ExplainQuery: {
      SelectionConfig cfg = cfg_.selection;
      cfg.k = ev.k;  // events carry k explicitly; validation rejects k < 1
      cfg.gamma = ev.gamma;
      cfg.utility.gamma = ev.gamma;
      result.explanation = ev.rumour_ref.empty()
                               ? explain_nodes(ev.id, ev.node_ids, cfg)
                               : explain_rumour(ev.rumour_ref, cfg);
      break;
    }
  }
  result.model_version = model_version();
  return result;
}

void StreamEngine::rebuild_runtime_state() {
  index_.emplace(model_->config.embed_dim);
  cache_.clear();
  detector_.reset();
  coverage_cache_.clear();
  for (const RumourSubgraph& r : log_.all()) register_embedded(r, false, nullptr);
  if (cfg_.drift_enabled && cache_.size() >= cache_.capacity()) {
    std::vector<Vec> anchors;
    for (const MedianCache::Median& m : cache_.medians()) anchors.push_back(m.embedding);
    DriftDetector::Config dc;
    dc.calibration_window = cfg_.calibration_window;
    dc.kappa = cfg_.drift_kappa;
    dc.threshold = cfg_.drift_threshold;
    detector_.emplace(dc, std::move(anchors));
  }
}

std::vector<double> StreamEngine::train_model() {
  TrainResult r = train(graph_, cfg_.model);
  model_ = std::move(r.model);
  rebuild_runtime_state();
  return r.loss_trace;
}

void StreamEngine::adopt_model(EmbeddingModel model) {
  if (model.schema_hash != schema_->hash())
    fail(ErrorCode::SchemaMismatch, "model schema hash does not match the stream schema");
  model_ = std::move(model);
  rebuild_runtime_state();
}

std::uint64_t StreamEngine::refresh_model() {
  if (!model_) fail(ErrorCode::ModelMissing, "nothing to refresh");
  TrainResult r = continue_training(graph_, *model_, cfg_.refresh_epochs);
  model_ = std::move(r.model);
  rebuild_runtime_state();
  return model_->version;
}

void StreamEngine::reseed_median(int median_idx) {
  const MedianCache::Median& med = cache_.median(median_idx);
  const SelectionConfig& cfg = cache_.config().onepass;
  int fetch = std::max(4 * cfg.k, cfg_.overfetch_min) + 1;
  std::vector<Candidate> scored;
  for (const VectorIndex::Hit& hit : index_->knn(med.embedding, fetch)) {
    if (hit.id == med.representative) continue;
    scored.push_back({hit.id, log_.get(hit.id).arrival_seq, (hit.cosine + 1.0) / 2.0});
  }
  std::vector<Candidate> filtered = filter_candidates(std::move(scored), cfg.gamma);
  CandidatePool pool = build_pool(filtered, view_of(graph_, log_.get(med.representative)), cfg);
  SelectionConfig greedy_cfg = cfg;
  greedy_cfg.strategy = Strategy::Greedy;
  Explanation e = greedy_select(pool, med.representative, greedy_cfg);
  std::vector<OnePassState::Item> items;
  for (const ExplanationMember& m : e.members) {
    OnePassState::Item it;
    it.rumour_id = m.rumour_id;
    it.arrival_seq = log_.get(m.rumour_id).arrival_seq;
    it.sim = m.sim;
    it.coverage = needs_coverage(cfg) ? coverage_of_rumour(m.rumour_id, true) : 0.0;
    it.embedding = index_->vector_of(m.rumour_id);
    items.push_back(std::move(it));
  }
  cache_.reseed(median_idx, std::move(items));
}

CandidatePool StreamEngine::build_pool(const std::vector<Candidate>& filtered,
                                       const SubgraphView& qview, const SelectionConfig& cfg) {
  CandidatePool pool;
  pool.candidates = filtered;
  std::size_t n = filtered.size();
  pool.sims.to_query.resize(n);
  pool.sims.coverage.assign(n, 0.0);
  pool.sims.between.assign(n, std::vector<double>(n, 0.0));

  SimSource source = cfg.utility.sim_source;
  if (source == SimSource::Embedding) {
    for (std::size_t i = 0; i < n; ++i) {
      pool.sims.to_query[i] = filtered[i].sim;
      pool.sims.between[i][i] = 1.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Vec& zi = index_->vector_of(filtered[i].rumour_id);
      for (std::size_t j = i + 1; j < n; ++j) {
        const Vec& zj = index_->vector_of(filtered[j].rumour_id);
        double s = (dot(zi, zj) + 1.0) / 2.0;
        pool.sims.between[i][j] = pool.sims.between[j][i] = s;
      }
    }
  } else {
    // graph-measure scoring; beam fallback keeps large rumours feasible
    GraphSimConfig gcfg;
    gcfg.allow_approx_mcs = true;
    auto pair_sim = [&](const SubgraphView& a, const SubgraphView& b) {
      switch (source) {
        case SimSource::MCS: return mcs_similarity(a, b, cfg_.kernel, gcfg).score;
        case SimSource::Graphsim: return graphsim(a, b, cfg_.kernel, gcfg).score;
        case SimSource::GED: return ged_similarity(a, b, cfg_.kernel, gcfg).score;
        default: return 0.0;
      }
    };
    std::vector<SubgraphView> views;
    views.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      views.push_back(view_of(graph_, log_.get(filtered[i].rumour_id)));
    for (std::size_t i = 0; i < n; ++i) {
      pool.sims.to_query[i] = pair_sim(views[i], qview);
      pool.candidates[i].sim = pool.sims.to_query[i];
      pool.sims.between[i][i] = 1.0;
      for (std::size_t j = 0; j < i; ++j) {
        double s = pair_sim(views[i], views[j]);
        pool.sims.between[i][j] = pool.sims.between[j][i] = s;
      }
    }
  }
  if (needs_coverage(cfg))
    for (std::size_t i = 0; i < n; ++i)
      pool.sims.coverage[i] = coverage_of_rumour(filtered[i].rumour_id, false);
  return pool;
}

Explanation StreamEngine::select_with(const CandidatePool& pool, const std::string& query_id,
                                      const SelectionConfig& cfg) {
  switch (cfg.strategy) {
    case Strategy::Greedy: return greedy_select(pool, query_id, cfg);
    case Strategy::Swap: return swap_select(pool, query_id, cfg);
    case Strategy::OnePass: {
      // ad-hoc one-pass: stream the retrieved candidates in arrival order
      OnePassState state(query_id, cfg);
      std::vector<int> order(pool.candidates.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return pool.candidates[a].arrival_seq < pool.candidates[b].arrival_seq;
      });
      for (int i : order) {
        OnePassState::Item item;
        item.rumour_id = pool.candidates[i].rumour_id;
        item.arrival_seq = pool.candidates[i].arrival_seq;
        item.sim = pool.sims.to_query[i];
        item.coverage = pool.sims.coverage[i];
        if (index_ && index_->contains(item.rumour_id))
          item.embedding = index_->vector_of(item.rumour_id);
        state.observe(item, query_id);
      }
      return state.to_explanation(model_version());
    }
  }
  fail(ErrorCode::ConfigError, "unknown strategy");
}

Explanation StreamEngine::empty_explanation(const std::string& query_id,
                                            const SelectionConfig& cfg) const {
  Explanation e;
  e.query_id = query_id;
  e.config = cfg;
  e.model_version = model_version();
  return e;
}

Explanation StreamEngine::explain_impl(const std::string& query_id, const SubgraphView& qview,
                                       const std::string& exclude_id, SelectionConfig cfg,
                                       bool use_index, bool allow_cache) {
  if (!model_) fail(ErrorCode::ModelMissing, "no trained model; run train first");
  cfg.utility.gamma = cfg.gamma;
  cfg.validate();
  if (log_.size() == 0) return empty_explanation(query_id, cfg);

  Vec zq = normalized(embed_view(qview));

  if (allow_cache && cfg_.epsilon_cache >= 0.0 &&
      onepass_compatible(cfg, cache_.config().onepass)) {
    int mi = cache_.nearest_within(zq, cfg_.epsilon_cache);
    if (mi >= 0 && !cache_.median(mi).stale) {
      Explanation e = cache_.median(mi).state.to_explanation(model_->version);
      e.query_id = query_id;
      e.cached = true;
      return e;
    }
  }

  std::vector<Candidate> scored;
  if (use_index) {
    int fetch = std::max(4 * cfg.k, cfg_.overfetch_min) + (exclude_id.empty() ? 0 : 1);
    for (const VectorIndex::Hit& hit : index_->knn(zq, fetch)) {
      if (hit.id == exclude_id) continue;
      scored.push_back({hit.id, log_.get(hit.id).arrival_seq, (hit.cosine + 1.0) / 2.0});
    }
  } else {
    for (const RumourSubgraph& r : log_.all()) {
      if (r.id == exclude_id) continue;
      if (!index_->contains(r.id)) continue;
      double cos = dot(zq, index_->vector_of(r.id));
      scored.push_back({r.id, r.arrival_seq, (cos + 1.0) / 2.0});
    }
  }
  std::vector<Candidate> filtered = filter_candidates(std::move(scored), cfg.gamma);
  if (filtered.empty()) return empty_explanation(query_id, cfg);
  CandidatePool pool = build_pool(filtered, qview, cfg);
  Explanation e = select_with(pool, query_id, cfg);
  e.model_version = model_->version;
  return e;
}

Explanation StreamEngine::explain_rumour(const std::string& rumour_id, SelectionConfig cfg) {
  const RumourSubgraph& r = log_.get(rumour_id);
  return explain_impl(rumour_id, view_of(graph_, r), rumour_id, std::move(cfg), true, true);
}

Explanation StreamEngine::explain_nodes(const std::string& query_id,
                                        const std::vector<std::string>& node_ids,
                                        SelectionConfig cfg) {
  SubgraphView qview = induced_subgraph(graph_, node_ids);
  return explain_impl(query_id, qview, "", std::move(cfg), true, true);
}

Explanation StreamEngine::explain_rumour_full_scan(const std::string& rumour_id,
                                                   SelectionConfig cfg) {
  const RumourSubgraph& r = log_.get(rumour_id);
  return explain_impl(rumour_id, view_of(graph_, r), rumour_id, std::move(cfg), false, false);
}

Explanation StreamEngine::explain_nodes_full_scan(const std::string& query_id,
                                                  const std::vector<std::string>& node_ids,
                                                  SelectionConfig cfg) {
  SubgraphView qview = induced_subgraph(graph_, node_ids);
  return explain_impl(query_id, qview, "", std::move(cfg), false, false);
}

std::vector<StreamEvent> graph_to_events(const MsgGraph& graph) {
  std::vector<StreamEvent> events;
  events.reserve(graph.num_nodes() + graph.num_edges());
  for (int v = 0; v < graph.num_nodes(); ++v) {
    const MsgGraph::Node& n = graph.node(v);
    StreamEvent ev;
    ev.type = StreamEvent::Type::AddNode;
    ev.id = n.id;
    ev.modality = graph.schema().name(n.modality);
    ev.features = n.features;
    events.push_back(std::move(ev));
  }
  for (int e = 0; e < graph.num_edges(); ++e) {
    const MsgGraph::Edge& ed = graph.edge(e);
    StreamEvent ev;
    ev.type = StreamEvent::Type::AddEdge;
    ev.u = graph.node(ed.u).id;
    ev.v = graph.node(ed.v).id;
    ev.features = ed.features;
    events.push_back(std::move(ev));
  }
  return events;
}

void StreamEngine::save_checkpoint(const std::string& dir) const {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create '" + dir + "': " + ec.message());

  {
    std::ofstream out(dir + "/graph.jsonl");
    if (!out) fail(ErrorCode::IoError, "cannot write graph.jsonl");
    write_events(out, *schema_, graph_to_events(graph_));
  }
  {
    nlohmann::json rumours = nlohmann::json::array();
    for (const RumourSubgraph& r : log_.all())
      rumours.push_back({{"id", r.id},
                         {"nodes", r.nodes},
                         {"edges", r.edges},
                         {"arrival_seq", r.arrival_seq}});
    nlohmann::json state{{"config", cfg_.to_json()},
                         {"rumours", rumours},
                         {"cache", cache_.to_json()},
                         {"detector", detector_ ? detector_->to_json() : nlohmann::json()},
                         {"has_model", model_.has_value()}};
    std::ofstream out(dir + "/state.json");
    if (!out) fail(ErrorCode::IoError, "cannot write state.json");
    out << state.dump() << "\n";
  }
  if (model_) save_model(*model_, dir + "/model.json");
  if (index_) {
    std::ofstream out(dir + "/index.json");
    if (!out) fail(ErrorCode::IoError, "cannot write index.json");
    out << index_->to_json().dump() << "\n";
  }
}

StreamEngine StreamEngine::load_checkpoint(const std::string& dir) {
  EventFile graph_file = read_events_file(dir + "/graph.jsonl");
  if (!graph_file.schema) fail(ErrorCode::IoError, "checkpoint graph lacks a schema line");

  std::ifstream in(dir + "/state.json");
  if (!in) fail(ErrorCode::IoError, "cannot open state.json");
  nlohmann::json state;
  in >> state;

  StreamEngine engine(graph_file.schema, EngineConfig::from_json(state.at("config")));
  for (const StreamEvent& ev : graph_file.events) apply_event(engine.graph_, engine.log_, ev);
  for (const auto& rj : state.at("rumours")) {
    RumourSubgraph r;
    r.id = rj.at("id").get<std::string>();
    r.nodes = rj.at("nodes").get<std::vector<int>>();
    r.edges = rj.at("edges").get<std::vector<int>>();
    r.arrival_seq = rj.at("arrival_seq").get<std::uint64_t>();
    engine.log_.restore(std::move(r));
  }
  if (state.at("has_model").get<bool>()) {
    engine.model_ = load_model(dir + "/model.json", *graph_file.schema);
    std::ifstream idx_in(dir + "/index.json");
    if (!idx_in) fail(ErrorCode::IoError, "cannot open index.json");
    nlohmann::json idx_json;
    idx_in >> idx_json;
    engine.index_ = VectorIndex::from_json(idx_json);
    engine.cache_ = MedianCache::from_json(state.at("cache"));
    if (!state.at("detector").is_null())
      engine.detector_ = DriftDetector::from_json(state.at("detector"));
  }
  return engine;
}

}  // namespace rumex
