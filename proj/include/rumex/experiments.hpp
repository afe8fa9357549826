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

#ifndef RUMEX_EXPERIMENTS_HPP
#define RUMEX_EXPERIMENTS_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "rumex/hmpgcn.hpp"
#include "rumex/propagation.hpp"
#include "rumex/selector.hpp"

namespace rumex {

double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Default multi-modal schema used by the synthetic experiments and the
// simulator (user / tweet / hashtag / link).
std::shared_ptr<const ModalitySchema> default_schema();

// Correlation between embedding similarity and classical graph similarity
// on pairs generated by deleting 1..7 edges from two-hop ego subgraphs of a
// synthetic graph, keeping them connected.
//
// The defaults are calibrated and deliberate. Ego graphs are homogeneous
// (exact node count, bounded edge count, heavily skewed modality mix) so the
// per-deletion similarity decrement is comparable across pairs, and the
// model is trained briefly at a conservative rate: driving the pair loss to
// its optimum saturates every tanh coordinate and quantizes the embedding
// space into sign patterns, which destroys the graded structural response
// this experiment measures.
struct CorrelationConfig {
  CorrelationConfig() {
    model.embed_dim = 16;
    model.num_layers = 1;
    model.epochs = 4;
    model.learning_rate = 1e-6;
  }

  int n_nodes = 2000;
  long long n_edges = 12000;
  double triangle_p = 0.7;  // clustered base graph so ego graphs hold cycles
  int n_pairs = 500;
  int max_deletions = 7;
  // exactly `ego_cap` nodes (BFS prefix) with an induced edge count inside
  // [min_ego_edges, max_ego_edges]
  int ego_cap = 10;
  int min_ego_edges = 16;
  int max_ego_edges = 26;  // <= 0: unbounded
  ModelConfig model;
  bool edge_composition = false;  // node-mean composition responds more evenly
  std::vector<double> modality_weights{17.0, 1.0, 1.0, 1.0};
  std::uint64_t rng_seed = 42;
  bool classical_measures = false;  // also score MCS / graphsim per pair
};

struct CorrelationRow {
  int deletions = 0;
  double ged_cost = 0.0;
  double embedding_sim = 0.0;
  double mcs = 0.0;       // only when classical_measures
  double graphsim = 0.0;  // only when classical_measures
};

struct CorrelationResult {
  std::vector<CorrelationRow> rows;
  double pearson_embedding_ged = 0.0;
  double pearson_embedding_mcs = 0.0;       // 0 unless classical_measures
  double pearson_embedding_graphsim = 0.0;  // 0 unless classical_measures
};

CorrelationResult run_correlation_experiment(const CorrelationConfig& cfg);

// Same experiment over a caller-supplied base graph.
CorrelationResult run_correlation_experiment_on(const MsgGraph& graph,
                                                const CorrelationConfig& cfg);

// Ring lattice with `neighbours` links per side, each rewired with
// probability `rewire_p` (small-world: clustered and nearly regular).
MsgGraph gen_small_world_graph(std::shared_ptr<const ModalitySchema> schema, int n_nodes,
                               int neighbours, double rewire_p, std::uint64_t rng_seed,
                               const FeatureSampler& sampler = {});

// Seeded Monte-Carlo for the CUSUM detector: null streams (for the
// false-alarm rate) and mean-shift streams (for the detection delay).
struct DriftExperimentConfig {
  int dim = 4;
  int runs = 1000;
  int pre_change = 200;  // includes the calibration window
  int post_change = 50;  // detection deadline
  double shift = 2.0;    // added to every coordinate after the change
  int calibration_window = 50;
  double kappa = 2.0;
  double threshold = 25.0;
  std::uint64_t rng_seed = 99;
  int null_runs = 100;
  int null_run_length = 2000;
};

struct DriftExperimentResult {
  int detected_within_deadline = 0;  // out of runs
  double mean_delay = 0.0;           // over detected runs
  long long null_samples = 0;
  int null_alarms = 0;
};

DriftExperimentResult run_drift_experiment(const DriftExperimentConfig& cfg);

// Random abstract selection instance: sims to the query uniform in
// [gamma, 1], pairwise sims uniform in [0, 1], coverages uniform in
// [0, max_coverage]; candidates arrive in index order.
CandidatePool random_candidate_pool(Rng& rng, int m, double gamma,
                                    double max_coverage = 2.0);

}  // namespace rumex

#endif  // RUMEX_EXPERIMENTS_HPP
