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

// Command-line frontend: ingestion, training, explanation, synthetic
// stream simulation, benchmarks, and pairwise graph similarity. Data goes
// to stdout, logs to stderr, errors as one machine-readable JSON object on
// stderr with a nonzero exit code.

#include <climits>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rumex/drift.hpp"
#include "rumex/experiments.hpp"
#include "rumex/graph_sim.hpp"
#include "rumex/run_config.hpp"
#include "rumex/stream_engine.hpp"

using nlohmann::json;

namespace {

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

rumex::EngineConfig make_engine_config(const CommonOpts& common,
                                       const std::vector<std::string>& overrides) {
  rumex::EngineConfig cfg;
  if (!common.config_path.empty()) rumex::load_config_file(cfg, common.config_path);
  for (const std::string& kv : overrides) {
    std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
      rumex::fail(rumex::ErrorCode::ConfigError, "--set expects key=value, got '" + kv + "'");
    rumex::apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (common.seed_set) cfg.model.rng_seed = common.seed;
  return cfg;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

rumex::MsgGraph load_graph_file(const std::string& path,
                                std::shared_ptr<const rumex::ModalitySchema>* schema_out,
                                rumex::RumourLog* log_out) {
  rumex::EventFile file = rumex::read_events_file(path);
  if (!file.schema)
    rumex::fail(rumex::ErrorCode::IoError, "'" + path + "' lacks a leading schema line");
  rumex::MsgGraph graph(file.schema);
  rumex::RumourLog log;
  for (const rumex::StreamEvent& ev : file.events) {
    if (ev.type == rumex::StreamEvent::Type::ExplainQuery) continue;
    rumex::apply_event(graph, log, ev);
  }
  if (schema_out) *schema_out = file.schema;
  if (log_out) *log_out = std::move(log);
  return graph;
}

// --- simulate ---

struct SimulateOpts {
  std::string model = "ic";
  int nodes = 500;
  long long edges = 1500;
  int rumours = 20;
  int explains = 0;
  double p = 0.15;
  double recovery = 0.1;
  double lt_threshold = 0.4;
  int max_steps = 8;
  int seeds_per_rumour = 1;
  int explain_k = 5;
  double explain_gamma = 0.3;
  std::string out_path;
};

int cmd_simulate(const CommonOpts& common, const SimulateOpts& opt) {
  std::uint64_t seed = common.seed_set ? common.seed : 1;
  auto schema = rumex::default_schema();
  rumex::MsgGraph graph = rumex::gen_base_graph(schema, opt.nodes, opt.edges, seed);

  std::vector<rumex::StreamEvent> events = rumex::graph_to_events(graph);
  rumex::PropagationModel model = rumex::propagation_model_from_string(opt.model);
  bool influence = model == rumex::PropagationModel::IC || model == rumex::PropagationModel::LT;

  std::vector<std::string> rumour_ids;
  int produced = 0;
  for (int run = 0; produced < opt.rumours && run < opt.rumours * 20; ++run) {
    rumex::PropagationConfig cfg;
    cfg.model = model;
    cfg.infection_prob = opt.p;
    cfg.recovery_prob = opt.recovery;
    cfg.lt_threshold = opt.lt_threshold;
    cfg.max_steps = opt.max_steps;
    cfg.seed_count = opt.seeds_per_rumour;
    cfg.rng_seed = rumex::hash_combine(seed, 1000 + run);
    rumex::PropagationResult res = influence ? rumex::simulate_influence(graph, cfg)
                                             : rumex::simulate_infection(graph, cfg);
    for (const auto& comp : res.components) {
      if (produced >= opt.rumours) break;
      rumex::StreamEvent ev;
      ev.type = rumex::StreamEvent::Type::DetectRumour;
      ev.id = "r" + std::to_string(produced);
      for (int n : comp.nodes) ev.node_ids.push_back(graph.node(n).id);
      events.push_back(ev);
      rumour_ids.push_back(ev.id);
      ++produced;
    }
  }

  rumex::Rng qrng(rumex::hash_combine(seed, 0xE0ULL));
  for (int q = 0; q < opt.explains && !rumour_ids.empty(); ++q) {
    rumex::StreamEvent ev;
    ev.type = rumex::StreamEvent::Type::ExplainQuery;
    ev.id = "q" + std::to_string(q);
    ev.rumour_ref = rumour_ids[qrng.uniform_int(rumour_ids.size())];
    ev.k = opt.explain_k;
    ev.gamma = opt.explain_gamma;
    events.push_back(ev);
  }

  if (opt.out_path.empty()) {
    rumex::write_events(std::cout, *schema, events);
  } else {
    std::ofstream out(opt.out_path);
    if (!out) rumex::fail(rumex::ErrorCode::IoError, "cannot write '" + opt.out_path + "'");
    rumex::write_events(out, *schema, events);
  }
  std::cerr << "simulate: " << graph.num_nodes() << " nodes, " << graph.num_edges()
            << " edges, " << produced << " rumours\n";
  return 0;
}

// --- train ---

int cmd_train(const CommonOpts& common, const std::vector<std::string>& overrides,
              const std::string& events_path, const std::string& out_path) {
  rumex::EngineConfig cfg = make_engine_config(common, overrides);
  std::shared_ptr<const rumex::ModalitySchema> schema;
  rumex::MsgGraph graph = load_graph_file(events_path, &schema, nullptr);
  rumex::TrainResult result = rumex::train(graph, cfg.model);
  rumex::save_model(result.model, out_path);
  json j{{"epochs", static_cast<int>(result.loss_trace.size())},
         {"loss_trace", result.loss_trace},
         {"checkpoint", out_path},
         {"model_version", result.model.version}};
  if (!result.loss_trace.empty()) j["final_loss"] = result.loss_trace.back();
  std::cout << j.dump() << "\n";
  return 0;
}

// --- ingest ---

int cmd_ingest(const CommonOpts& common, const std::vector<std::string>& overrides,
               const std::string& events_path, const std::string& model_path,
               const std::string& checkpoint_out) {
  rumex::EngineConfig cfg = make_engine_config(common, overrides);
  rumex::EventFile file = rumex::read_events_file(events_path);
  if (!file.schema)
    rumex::fail(rumex::ErrorCode::IoError, "'" + events_path + "' lacks a schema line");
  rumex::StreamEngine engine(file.schema, cfg);
  if (!model_path.empty()) engine.adopt_model(rumex::load_model(model_path, *file.schema));

  int explains = 0, drift_alarms = 0;
  for (const rumex::StreamEvent& ev : file.events) {
    rumex::StreamEngine::EventResult r = engine.handle(ev);
    if (r.drift) ++drift_alarms;
    if (r.explanation) {
      ++explains;
      std::cout << rumex::explanation_to_json(*r.explanation).dump() << "\n";
    }
  }
  if (!checkpoint_out.empty()) engine.save_checkpoint(checkpoint_out);
  json summary{{"nodes", engine.graph().num_nodes()},
               {"edges", engine.graph().num_edges()},
               {"rumours", engine.rumours().size()},
               {"explains", explains},
               {"drift_alarms", drift_alarms},
               {"model_version", engine.model_version()},
               {"cache_medians", engine.cache().size()}};
  std::cout << summary.dump() << "\n";
  return 0;
}

// --- explain ---

struct ExplainOpts {
  std::string events_path;
  std::string checkpoint_dir;
  std::string model_path;
  std::string rumour_id;
  std::vector<std::string> nodes;
  int k = INT_MIN;  // INT_MIN: not given; validation rejects k < 1
  double gamma = -1.0;
  std::string strategy;
  std::string utility;
  bool full_scan = false;
};

int cmd_explain(const CommonOpts& common, const std::vector<std::string>& overrides,
                const ExplainOpts& opt) {
  rumex::EngineConfig cfg = make_engine_config(common, overrides);
  std::optional<rumex::StreamEngine> engine;
  if (!opt.checkpoint_dir.empty()) {
    engine.emplace(rumex::StreamEngine::load_checkpoint(opt.checkpoint_dir));
  } else {
    if (opt.events_path.empty())
      rumex::fail(rumex::ErrorCode::ConfigError, "need --events or --checkpoint");
    rumex::EventFile file = rumex::read_events_file(opt.events_path);
    if (!file.schema)
      rumex::fail(rumex::ErrorCode::IoError, "'" + opt.events_path + "' lacks a schema line");
    engine.emplace(file.schema, cfg);
    if (!opt.model_path.empty())
      engine->adopt_model(rumex::load_model(opt.model_path, engine->graph().schema()));
    for (const rumex::StreamEvent& ev : file.events) {
      if (ev.type == rumex::StreamEvent::Type::ExplainQuery) continue;
      engine->handle(ev);
    }
  }

  rumex::SelectionConfig sel = cfg.selection;
  if (opt.k != INT_MIN) sel.k = opt.k;  // k < 1 rejected by validate below
  if (opt.gamma >= 0.0) {
    sel.gamma = opt.gamma;
    sel.utility.gamma = opt.gamma;
  }
  if (!opt.strategy.empty()) sel.strategy = rumex::strategy_from_string(opt.strategy);
  if (!opt.utility.empty()) sel.utility.mode = rumex::utility_mode_from_string(opt.utility);
  sel.validate();

  rumex::Explanation e;
  if (!opt.rumour_id.empty()) {
    e = opt.full_scan ? engine->explain_rumour_full_scan(opt.rumour_id, sel)
                      : engine->explain_rumour(opt.rumour_id, sel);
  } else if (!opt.nodes.empty()) {
    e = opt.full_scan ? engine->explain_nodes_full_scan("q0", opt.nodes, sel)
                      : engine->explain_nodes("q0", opt.nodes, sel);
  } else {
    rumex::fail(rumex::ErrorCode::ConfigError, "need --rumour-id or --nodes");
  }
  std::cout << rumex::explanation_to_json(e).dump() << "\n";
  return 0;
}

// --- sim (pairwise measures) ---

int cmd_sim(const std::string& g1_path, const std::string& g2_path,
            const std::string& kernel_kind, double epsilon, double scale,
            const std::string& model_path, bool approx) {
  std::shared_ptr<const rumex::ModalitySchema> s1, s2;
  rumex::MsgGraph g1 = load_graph_file(g1_path, &s1, nullptr);
  rumex::MsgGraph g2 = load_graph_file(g2_path, &s2, nullptr);
  if (s1->hash() != s2->hash())
    rumex::fail(rumex::ErrorCode::SchemaMismatch, "graph schemas differ");

  rumex::SimilarityKernel kernel = kernel_kind == "graded"
                                       ? rumex::SimilarityKernel::graded(scale)
                                       : rumex::SimilarityKernel::exact(epsilon);
  rumex::GraphSimConfig gcfg;
  gcfg.allow_approx_mcs = approx;
  rumex::SubgraphView v1 = rumex::view_all(g1);
  rumex::SubgraphView v2 = rumex::view_all(g2);

  rumex::ScoreResult mcs = rumex::mcs_similarity(v1, v2, kernel, gcfg);
  rumex::ScoreResult gs = rumex::graphsim(v1, v2, kernel, gcfg);
  rumex::GedResult gd = rumex::ged(v1, v2, kernel, gcfg);
  rumex::ScoreResult gds = rumex::ged_similarity(v1, v2, kernel, gcfg);

  json j{{"mcs", {{"score", mcs.score}, {"approximate", mcs.approximate}}},
         {"graphsim", {{"score", gs.score}, {"approximate", gs.approximate}}},
         {"ged", {{"cost", gd.cost}, {"approximate", gd.approximate}}},
         {"ged_similarity", {{"score", gds.score}, {"approximate", gds.approximate}}}};
  if (!model_path.empty()) {
    rumex::EmbeddingModel model = rumex::load_model(model_path, *s1);
    auto embed = [&](const rumex::SubgraphView& v) {
      return v.num_edges() > 0 ? rumex::embed_subgraph_edges(v, model)
                               : rumex::embed_subgraph_nodes(v, model);
    };
    j["embedding"] = {{"score", rumex::embedding_similarity(embed(v1), embed(v2))}};
  }
  std::cout << j.dump() << "\n";
  return 0;
}

// --- bench ---

struct BenchOpts {
  std::string preset = "correlation";
  int nodes = 2000;
  long long edges = 12000;
  int pairs = 500;
  int epochs = -1;  // < 0: preset default
  int instances = 100;
  int k = 4;
  int runs = 200;
};

int bench_correlation(const CommonOpts& common, const BenchOpts& opt) {
  rumex::CorrelationConfig cfg;
  cfg.n_nodes = opt.nodes;
  cfg.n_edges = opt.edges;
  cfg.n_pairs = opt.pairs;
  if (opt.epochs >= 0) cfg.model.epochs = opt.epochs;
  cfg.rng_seed = common.seed_set ? common.seed : 42;
  cfg.classical_measures = true;
  rumex::CorrelationResult res = rumex::run_correlation_experiment(cfg);
  std::cout << "measure\tdataset\tpairs\tpearson_r\n";
  std::cout << "mcs\tsynthetic\t" << res.rows.size() << "\t"
            << format_double(res.pearson_embedding_mcs) << "\n";
  std::cout << "graphsim\tsynthetic\t" << res.rows.size() << "\t"
            << format_double(res.pearson_embedding_graphsim) << "\n";
  std::cout << "ged\tsynthetic\t" << res.rows.size() << "\t"
            << format_double(res.pearson_embedding_ged) << "\n";
  return 0;
}

int bench_selection(const CommonOpts& common, const BenchOpts& opt) {
  rumex::Rng rng(common.seed_set ? common.seed : 7);
  std::cout << "strategy\tinstances\tk\tmean_utility\tmean_ratio_vs_oracle\n";
  double sums[3] = {0, 0, 0};
  double ratios[3] = {0, 0, 0};
  for (int i = 0; i < opt.instances; ++i) {
    int m = 6 + static_cast<int>(rng.uniform_int(7));
    rumex::CandidatePool pool = rumex::random_candidate_pool(rng, m, 0.1);
    rumex::SelectionConfig cfg;
    cfg.k = opt.k;
    cfg.gamma = 0.1;
    cfg.utility.mode = rumex::UtilityMode::Modality;
    cfg.utility.lambda2 = 0.5;
    cfg.utility.alpha = 0.1;
    cfg.utility.gamma = cfg.gamma;
    cfg.passes = 64;
    rumex::Explanation oracle = rumex::brute_force_select(pool, "q", cfg);
    rumex::Explanation greedy = rumex::greedy_select(pool, "q", cfg);
    rumex::Explanation swapped = rumex::swap_select(pool, "q", cfg);
    rumex::OnePassState state("q", cfg);
    for (std::size_t c = 0; c < pool.candidates.size(); ++c) {
      rumex::OnePassState::Item item;
      item.rumour_id = pool.candidates[c].rumour_id;
      item.arrival_seq = pool.candidates[c].arrival_seq;
      item.sim = pool.candidates[c].sim;
      item.coverage = pool.sims.coverage[c];
      state.observe(item, "q");
    }
    double vals[3] = {greedy.utility_value, swapped.utility_value, state.utility_value()};
    for (int s = 0; s < 3; ++s) {
      sums[s] += vals[s];
      ratios[s] += oracle.utility_value > 0 ? vals[s] / oracle.utility_value : 1.0;
    }
  }
  const char* names[3] = {"greedy", "swap", "onepass"};
  for (int s = 0; s < 3; ++s)
    std::cout << names[s] << "\t" << opt.instances << "\t" << opt.k << "\t"
              << format_double(sums[s] / opt.instances) << "\t"
              << format_double(ratios[s] / opt.instances) << "\n";
  return 0;
}

int bench_drift(const CommonOpts& common, const BenchOpts& opt) {
  rumex::DriftExperimentConfig cfg;
  cfg.runs = opt.runs;
  cfg.rng_seed = common.seed_set ? common.seed : 99;
  cfg.threshold =
      rumex::DriftDetector::tune_threshold(500.0, cfg.dim, cfg.kappa, cfg.rng_seed, 100);
  rumex::DriftExperimentResult res = rumex::run_drift_experiment(cfg);
  std::cout << "metric\tvalue\n";
  std::cout << "threshold\t" << format_double(cfg.threshold) << "\n";
  std::cout << "runs\t" << cfg.runs << "\n";
  std::cout << "detected_within_" << cfg.post_change << "\t" << res.detected_within_deadline
            << "\n";
  std::cout << "mean_delay\t" << format_double(res.mean_delay) << "\n";
  std::cout << "null_samples\t" << res.null_samples << "\n";
  std::cout << "null_alarms\t" << res.null_alarms << "\n";
  return 0;
}

// --- drift-report ---

int cmd_drift_report(const CommonOpts& common, const std::vector<std::string>& overrides,
                     const std::string& events_path, const std::string& model_path) {
  rumex::EngineConfig cfg = make_engine_config(common, overrides);
  cfg.drift_enabled = true;
  cfg.refresh_on_drift = false;  // report only
  rumex::EventFile file = rumex::read_events_file(events_path);
  if (!file.schema)
    rumex::fail(rumex::ErrorCode::IoError, "'" + events_path + "' lacks a schema line");
  rumex::StreamEngine engine(file.schema, cfg);
  engine.adopt_model(rumex::load_model(model_path, *file.schema));

  std::cout << "arrival_seq\trumour_id\tstatistic\toutcome\n";
  for (const rumex::StreamEvent& ev : file.events) {
    if (ev.type == rumex::StreamEvent::Type::ExplainQuery) continue;
    bool is_rumour = ev.type == rumex::StreamEvent::Type::DetectRumour;
    rumex::StreamEngine::EventResult r = engine.handle(ev);
    if (!is_rumour) continue;
    const rumex::DriftDetector* det = engine.detector();
    std::string outcome = "inactive";
    double stat = 0.0;
    if (det) {
      if (!det->calibrated()) {
        outcome = "calibrating";
      } else {
        stat = det->statistic();
        outcome = r.drift ? "drift" : "none";
      }
    }
    std::cout << engine.rumours().get(ev.id).arrival_seq << "\t" << ev.id << "\t"
              << format_double(stat) << "\t" << outcome << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"streaming example-based explanations for rumour subgraphs"};
  app.require_subcommand(1);

  CommonOpts common;
  std::vector<std::string> overrides;
  app.add_option("--config", common.config_path, "key = value config file");
  app.add_option("--set", overrides, "config override, key=value (repeatable)");
  auto* seed_opt = app.add_option("--seed", common.seed, "rng seed override");

  SimulateOpts sim_opt;
  auto* sim_cmd = app.add_subcommand("simulate", "emit a synthetic event stream (JSONL)");
  sim_cmd->add_option("--model", sim_opt.model, "si|sis|sir|ic|lt");
  sim_cmd->add_option("--nodes", sim_opt.nodes, "base graph nodes");
  sim_cmd->add_option("--edges", sim_opt.edges, "base graph edges");
  sim_cmd->add_option("--rumours", sim_opt.rumours, "rumour count");
  sim_cmd->add_option("--explains", sim_opt.explains, "explain query count");
  sim_cmd->add_option("--p", sim_opt.p, "infection/activation probability");
  sim_cmd->add_option("--recovery", sim_opt.recovery, "recovery probability (sis/sir)");
  sim_cmd->add_option("--lt-threshold", sim_opt.lt_threshold, "LT threshold");
  sim_cmd->add_option("--max-steps", sim_opt.max_steps, "propagation rounds");
  sim_cmd->add_option("--seeds-per-rumour", sim_opt.seeds_per_rumour, "seed nodes per run");
  sim_cmd->add_option("--explain-k", sim_opt.explain_k, "k for emitted explain events");
  sim_cmd->add_option("--explain-gamma", sim_opt.explain_gamma, "gamma for explain events");
  sim_cmd->add_option("--out", sim_opt.out_path, "output file (default stdout)");

  std::string train_events, train_out = "model.json";
  auto* train_cmd = app.add_subcommand("train", "train the embedding model on a stream");
  train_cmd->add_option("--events", train_events, "events JSONL")->required();
  train_cmd->add_option("--out", train_out, "model checkpoint path");

  std::string ingest_events, ingest_model, ingest_checkpoint;
  auto* ingest_cmd = app.add_subcommand("ingest", "replay a stream, answer explain events");
  ingest_cmd->add_option("--events", ingest_events, "events JSONL")->required();
  ingest_cmd->add_option("--model", ingest_model, "model checkpoint");
  ingest_cmd->add_option("--checkpoint", ingest_checkpoint, "state checkpoint output dir");

  ExplainOpts explain_opt;
  auto* explain_cmd = app.add_subcommand("explain", "answer one explain query");
  explain_cmd->add_option("--events", explain_opt.events_path, "events JSONL");
  explain_cmd->add_option("--checkpoint", explain_opt.checkpoint_dir, "state checkpoint dir");
  explain_cmd->add_option("--model", explain_opt.model_path, "model checkpoint");
  explain_cmd->add_option("--rumour-id", explain_opt.rumour_id, "registered rumour to explain");
  explain_cmd->add_option("--nodes", explain_opt.nodes, "inline query node ids")
      ->delimiter(',');
  explain_cmd->add_option("--k", explain_opt.k, "explanation size");
  explain_cmd->add_option("--gamma", explain_opt.gamma, "similarity threshold");
  explain_cmd->add_option("--strategy", explain_opt.strategy, "greedy|swap|onepass");
  explain_cmd->add_option("--utility", explain_opt.utility, "content|modality|hybrid");
  explain_cmd->add_flag("--full-scan", explain_opt.full_scan, "bypass the index");

  std::string sim_g1, sim_g2, sim_kernel = "exact", sim_model;
  double sim_eps = 0.0, sim_scale = 1.0;
  bool sim_approx = false;
  auto* pair_cmd = app.add_subcommand("sim", "all similarity measures for a graph pair");
  pair_cmd->add_option("--g1", sim_g1, "first graph JSONL")->required();
  pair_cmd->add_option("--g2", sim_g2, "second graph JSONL")->required();
  pair_cmd->add_option("--kernel", sim_kernel, "exact|graded");
  pair_cmd->add_option("--epsilon", sim_eps, "exact-match tolerance");
  pair_cmd->add_option("--scale", sim_scale, "graded kernel bandwidth");
  pair_cmd->add_option("--model", sim_model, "model checkpoint for embedding similarity");
  pair_cmd->add_flag("--approx-mcs", sim_approx, "beam MCS above the exact bound");

  BenchOpts bench_opt;
  auto* bench_cmd = app.add_subcommand("bench", "experiment presets, TSV output");
  bench_cmd->add_option("--preset", bench_opt.preset, "correlation|selection|drift")
      ->required();
  bench_cmd->add_option("--nodes", bench_opt.nodes, "graph nodes (correlation)");
  bench_cmd->add_option("--edges", bench_opt.edges, "graph edges (correlation)");
  bench_cmd->add_option("--pairs", bench_opt.pairs, "subgraph pairs (correlation)");
  bench_cmd->add_option("--epochs", bench_opt.epochs, "training epochs (correlation)");
  bench_cmd->add_option("--instances", bench_opt.instances, "instances (selection)");
  bench_cmd->add_option("--k", bench_opt.k, "selection size (selection)");
  bench_cmd->add_option("--runs", bench_opt.runs, "Monte-Carlo runs (drift)");

  std::string report_events, report_model;
  auto* report_cmd = app.add_subcommand("drift-report", "per-rumour CUSUM trace (TSV)");
  report_cmd->add_option("--events", report_events, "events JSONL")->required();
  report_cmd->add_option("--model", report_model, "model checkpoint")->required();

  // global options (--seed, --config, --set) may follow the subcommand
  for (CLI::App* sc : app.get_subcommands(nullptr)) sc->fallthrough();

  try {
    app.parse(argc, argv);
    common.seed_set = seed_opt->count() > 0;

    if (sim_cmd->parsed()) return cmd_simulate(common, sim_opt);
    if (train_cmd->parsed()) return cmd_train(common, overrides, train_events, train_out);
    if (ingest_cmd->parsed())
      return cmd_ingest(common, overrides, ingest_events, ingest_model, ingest_checkpoint);
    if (explain_cmd->parsed()) return cmd_explain(common, overrides, explain_opt);
    if (pair_cmd->parsed())
      return cmd_sim(sim_g1, sim_g2, sim_kernel, sim_eps, sim_scale, sim_model, sim_approx);
    if (bench_cmd->parsed()) {
      if (bench_opt.preset == "correlation") return bench_correlation(common, bench_opt);
      if (bench_opt.preset == "selection") return bench_selection(common, bench_opt);
      if (bench_opt.preset == "drift") return bench_drift(common, bench_opt);
      rumex::fail(rumex::ErrorCode::ConfigError, "unknown preset '" + bench_opt.preset + "'");
    }
    if (report_cmd->parsed())
      return cmd_drift_report(common, overrides, report_events, report_model);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    json err{{"error", {{"type", "ConfigError"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const rumex::Error& e) {
    json err{{"error", {{"type", rumex::error_code_name(e.code())}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    json err{{"error", {{"type", "Internal"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
