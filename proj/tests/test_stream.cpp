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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "rumex/drift.hpp"
#include "rumex/experiments.hpp"
#include "rumex/graph_sim.hpp"
#include "rumex/median_cache.hpp"
#include "rumex/stream_engine.hpp"
#include "rumex/vector_index.hpp"

using namespace rumex;

namespace {

Vec random_unit(Rng& rng, int d) {
  Vec v(d);
  for (double& x : v) x = rng.normal();
  return normalized(v);
}

// linear-scan oracle: top-m ids by cosine, ties broken by id
std::vector<std::string> scan_knn(const std::vector<std::pair<std::string, Vec>>& data,
                                  const Vec& q, int m) {
  Vec qn = normalized(q);
  std::vector<std::pair<double, std::string>> scored;
  for (const auto& [id, v] : data) scored.push_back({dot(qn, normalized(v)), id});
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::string> out;
  for (int i = 0; i < m && i < static_cast<int>(scored.size()); ++i)
    out.push_back(scored[i].second);
  return out;
}

SelectionConfig onepass_cfg(int k, double gamma) {
  SelectionConfig cfg;
  cfg.k = k;
  cfg.gamma = gamma;
  cfg.strategy = Strategy::OnePass;
  cfg.utility.mode = UtilityMode::Modality;
  cfg.utility.lambda2 = 0.5;
  cfg.utility.alpha = 0.0;
  cfg.utility.gamma = gamma;
  return cfg;
}

}  // namespace

TEST_CASE("vector index") {
  SUBCASE("single vector answers every query") {
    VectorIndex idx(3);
    idx.insert("a", {1.0, 0.0, 0.0});
    auto hits = idx.knn({0.2, 0.9, 0.1}, 5);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].id == "a");
  }
  SUBCASE("a stored vector is its own nearest neighbour") {
    Rng rng(1);
    VectorIndex idx(4);
    std::vector<std::pair<std::string, Vec>> data;
    for (int i = 0; i < 50; ++i) {
      Vec v = random_unit(rng, 4);
      idx.insert("v" + std::to_string(i), v);
      data.push_back({"v" + std::to_string(i), v});
    }
    for (int i = 0; i < 50; ++i) {
      auto hits = idx.knn(data[i].second, 1);
      REQUIRE(hits.size() == 1);
      CHECK(hits[0].id == data[i].first);
    }
  }
  SUBCASE("duplicate ids and zero vectors are rejected") {
    VectorIndex idx(2);
    idx.insert("a", {1.0, 0.0});
    CHECK_THROWS_AS(idx.insert("a", {0.0, 1.0}), Error);
    CHECK_THROWS_AS(idx.insert("z", {0.0, 0.0}), Error);
    CHECK_THROWS_AS(idx.knn({0.0, 0.0}, 1), Error);
  }
  SUBCASE("matches the linear-scan oracle on random data") {
    Rng rng(7);
    VectorIndex idx(8);
    std::vector<std::pair<std::string, Vec>> data;
    for (int i = 0; i < 200; ++i) {
      Vec v = random_unit(rng, 8);
      std::string id = "v" + std::to_string(i);
      idx.insert(id, v);
      data.push_back({id, v});
    }
    for (int q = 0; q < 50; ++q) {
      Vec query = random_unit(rng, 8);
      auto hits = idx.knn(query, 10);
      std::vector<std::string> got;
      for (const auto& h : hits) got.push_back(h.id);
      CHECK(got == scan_knn(data, query, 10));
    }
  }
  SUBCASE("updates keep exactness") {
    Rng rng(9);
    VectorIndex idx(4);
    std::vector<std::pair<std::string, Vec>> data;
    for (int i = 0; i < 120; ++i) {
      Vec v = random_unit(rng, 4);
      idx.insert("v" + std::to_string(i), v);
      data.push_back({"v" + std::to_string(i), v});
    }
    for (int i = 0; i < 120; i += 3) {
      Vec v = random_unit(rng, 4);
      idx.update(data[i].first, v);
      data[i].second = v;
    }
    for (int q = 0; q < 20; ++q) {
      Vec query = random_unit(rng, 4);
      auto hits = idx.knn(query, 7);
      std::vector<std::string> got;
      for (const auto& h : hits) got.push_back(h.id);
      CHECK(got == scan_knn(data, query, 7));
    }
  }
  SUBCASE("serialization round trip") {
    Rng rng(3);
    VectorIndex idx(4);
    for (int i = 0; i < 10; ++i) idx.insert("v" + std::to_string(i), random_unit(rng, 4));
    VectorIndex back = VectorIndex::from_json(idx.to_json());
    CHECK(back.size() == idx.size());
    Vec q = random_unit(rng, 4);
    auto a = idx.knn(q, 3);
    auto b = back.knn(q, 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].id == b[i].id);
  }
}

TEST_CASE("median cache") {
  SUBCASE("the first K rumours become medians") {
    MedianCache::Config cfg;
    cfg.capacity = 3;
    cfg.onepass = onepass_cfg(2, 0.0);
    MedianCache cache(cfg);
    Rng rng(5);
    for (int i = 0; i < 3; ++i) {
      auto stale = cache.observe({"r" + std::to_string(i),
                                  static_cast<std::uint64_t>(i), random_unit(rng, 4), 0.0});
      CHECK(stale.empty());
    }
    CHECK(cache.size() == 3);
    for (int i = 0; i < 3; ++i)
      CHECK(cache.median(i).representative == "r" + std::to_string(i));
  }
  SUBCASE("identical vectors are absorbed without ever going stale") {
    MedianCache::Config cfg;
    cfg.capacity = 2;
    cfg.onepass = onepass_cfg(2, 0.0);
    MedianCache cache(cfg);
    Vec v = normalized({1.0, 1.0, 0.0});
    for (int i = 0; i < 40; ++i) {
      auto stale = cache.observe({"r" + std::to_string(i),
                                  static_cast<std::uint64_t>(i), v, 0.0});
      CHECK(stale.empty());
    }
    CHECK(cache.size() == 2);
    CHECK_FALSE(cache.median(0).stale);
  }
  SUBCASE("two well-separated clusters put the medians near the true centroids") {
    MedianCache::Config cfg;
    cfg.capacity = 2;
    cfg.reservoir_cap = 64;
    cfg.onepass = onepass_cfg(3, 0.0);
    MedianCache cache(cfg);
    Rng rng(11);
    Vec c1(8, 0.0), c2(8, 0.0);
    c1[0] = 5.0;
    c2[3] = 5.0;
    Vec sum1(8, 0.0), sum2(8, 0.0);
    for (int i = 0; i < 200; ++i) {
      bool first = i % 2 == 0;
      Vec v(8);
      for (int d = 0; d < 8; ++d) v[d] = (first ? c1[d] : c2[d]) + 0.3 * rng.normal();
      Vec unit = normalized(v);
      add_scaled(first ? sum1 : sum2, 1.0, unit);
      cache.observe({"r" + std::to_string(i), static_cast<std::uint64_t>(i), unit, 0.0});
    }
    Vec cent1 = normalized(sum1), cent2 = normalized(sum2);
    REQUIRE(cache.size() == 2);
    for (int m = 0; m < 2; ++m) {
      double d1 = 1.0 - dot(cache.median(m).embedding, cent1);
      double d2 = 1.0 - dot(cache.median(m).embedding, cent2);
      CHECK(std::min(d1, d2) < 0.1);
    }
    // the two medians track different clusters
    double m0c1 = 1.0 - dot(cache.median(0).embedding, cent1);
    double m1c1 = 1.0 - dot(cache.median(1).embedding, cent1);
    CHECK(((m0c1 < 0.1) != (m1c1 < 0.1)));
  }
  SUBCASE("representative changes flag the median stale and rebind its state") {
    MedianCache::Config cfg;
    cfg.capacity = 1;
    cfg.reservoir_cap = 8;
    cfg.onepass = onepass_cfg(2, 0.0);
    MedianCache cache(cfg);
    Rng rng(13);
    // seed far from the pack, then stream a tight cluster elsewhere
    cache.observe({"seed", 0, normalized({1.0, 0.0, 0.0, 0.0}), 0.0});
    bool went_stale = false;
    for (int i = 0; i < 10; ++i) {
      Vec v{0.05 * rng.normal(), 1.0, 0.05 * rng.normal(), 0.0};
      auto stale = cache.observe({"c" + std::to_string(i),
                                  static_cast<std::uint64_t>(i + 1), normalized(v), 0.0});
      if (!stale.empty()) {
        went_stale = true;
        CHECK(cache.median(0).stale);
        CHECK(cache.median(0).representative != "seed");
        CHECK(cache.median(0).state.query_id() == cache.median(0).representative);
        cache.reseed(0, {});
        CHECK_FALSE(cache.median(0).stale);
      }
    }
    CHECK(went_stale);
  }
}

TEST_CASE("drift detector") {
  DriftDetector::Config cfg;
  cfg.calibration_window = 30;
  SUBCASE("strict observe before calibration raises NotCalibrated") {
    DriftDetector det(cfg, 4);
    CHECK_THROWS_AS(det.observe_zeta({0, 0, 0, 0}), Error);
    CHECK_THROWS_AS(det.statistic(), Error);
  }
  SUBCASE("a constant stream keeps the statistic at zero") {
    DriftDetector det(cfg, 3);
    Vec z{0.2, 0.4, 0.6};
    for (int i = 0; i < 30; ++i) det.feed_zeta(z);
    REQUIRE(det.calibrated());
    for (int i = 0; i < 100; ++i) CHECK(det.feed_zeta(z) == DriftDetector::Outcome::NoDrift);
    CHECK(det.statistic() == doctest::Approx(0.0));
  }
  SUBCASE("a huge threshold silences a null stream") {
    cfg.threshold = 1e9;
    cfg.kappa = 2.0;
    DriftDetector det(cfg, 4);
    Rng rng(21);
    for (int i = 0; i < 500; ++i) {
      Vec z(4);
      for (double& x : z) x = rng.normal();
      CHECK(det.feed_zeta(z) != DriftDetector::Outcome::Drift);
    }
  }
  SUBCASE("a mean shift is caught quickly in most seeded runs") {
    DriftExperimentConfig ec;
    ec.runs = 100;
    ec.null_runs = 20;
    ec.threshold = DriftDetector::tune_threshold(200.0, ec.dim, ec.kappa, 71, 60);
    ec.rng_seed = 1234;
    DriftExperimentResult res = run_drift_experiment(ec);
    INFO("detected ", res.detected_within_deadline, "/", ec.runs, " delay ", res.mean_delay);
    CHECK(res.detected_within_deadline >= 95);
    // null false alarms stay near the configured rate
    double rate = static_cast<double>(res.null_alarms) /
                  static_cast<double>(std::max<long long>(res.null_samples, 1));
    CHECK(rate <= 2.0 / 200.0);
  }
  SUBCASE("serialization round trip") {
    DriftDetector det(cfg, 2);
    Rng rng(2);
    for (int i = 0; i < 35; ++i) det.feed_zeta({rng.normal(), rng.normal()});
    DriftDetector back = DriftDetector::from_json(det.to_json());
    CHECK(back.calibrated());
    CHECK(back.statistic() == doctest::Approx(det.statistic()));
    CHECK(back.kappa() == doctest::Approx(det.kappa()));
  }
}

TEST_CASE("stream engine end to end") {
  auto schema = default_schema();
  EngineConfig cfg;
  cfg.model.embed_dim = 4;
  cfg.model.num_layers = 1;
  cfg.model.epochs = 4;
  cfg.model.learning_rate = 0.01;
  cfg.model.rng_seed = 5;
  cfg.selection.k = 3;
  cfg.selection.gamma = 0.0;
  cfg.selection.utility.mode = UtilityMode::Hybrid;
  cfg.selection.utility.lambda2 = 0.3;
  cfg.cache_capacity = 3;
  cfg.drift_enabled = false;
  cfg.epsilon_cache = -1.0;

  StreamEngine engine(schema, cfg);
  MsgGraph base = gen_base_graph(schema, 60, 140, 42);
  for (const StreamEvent& ev : graph_to_events(base)) engine.handle(ev);

  SUBCASE("explain before training fails with ModelMissing") {
    CHECK_THROWS_AS(engine.explain_nodes("q", {"n0", "n1"}, cfg.selection), Error);
  }

  engine.train_model();
  CHECK(engine.model_version() == 1);

  SUBCASE("no rumours yet: an empty explanation") {
    Explanation e = engine.explain_nodes("q", {"n0"}, cfg.selection);
    CHECK(e.members.empty());
    CHECK(e.utility_value == 0.0);
  }

  // stream rumours from IC cascades
  int produced = 0;
  for (int run = 0; produced < 12 && run < 200; ++run) {
    PropagationConfig pc;
    pc.model = PropagationModel::IC;
    pc.infection_prob = 0.4;
    pc.max_steps = 4;
    pc.rng_seed = 700 + run;
    PropagationResult res = simulate_influence(base, pc);
    for (const auto& comp : res.components) {
      if (comp.nodes.size() < 2 || produced >= 12) continue;
      StreamEvent ev;
      ev.type = StreamEvent::Type::DetectRumour;
      ev.id = "r" + std::to_string(produced++);
      for (int n : comp.nodes) ev.node_ids.push_back(base.node(n).id);
      engine.handle(ev);
    }
  }
  REQUIRE(engine.rumours().size() == 12);
  CHECK(engine.index().size() == 12);

  SUBCASE("a query equal to a stored rumour returns that rumour at sim 1") {
    const RumourSubgraph& r0 = engine.rumours().get("r0");
    std::vector<std::string> ids;
    for (int n : r0.nodes) ids.push_back(engine.graph().node(n).id);
    SelectionConfig sel = cfg.selection;
    sel.k = 1;
    Explanation e = engine.explain_nodes("twin", ids, sel);
    REQUIRE(e.members.size() == 1);
    CHECK(e.members[0].rumour_id == "r0");
    CHECK(e.members[0].sim == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("explaining a registered rumour excludes itself") {
    Explanation e = engine.explain_rumour("r0", cfg.selection);
    for (const auto& m : e.members) CHECK(m.rumour_id != "r0");
    CHECK(e.model_version == 1);
  }
  SUBCASE("index path matches the full scan on this small history") {
    Explanation a = engine.explain_rumour("r3", cfg.selection);
    Explanation b = engine.explain_rumour_full_scan("r3", cfg.selection);
    CHECK(a.utility_value == doctest::Approx(b.utility_value).epsilon(1e-9));
  }
  SUBCASE("one-pass strategy works for ad-hoc queries") {
    SelectionConfig sel = cfg.selection;
    sel.strategy = Strategy::OnePass;
    sel.utility.mode = UtilityMode::Modality;
    sel.utility.lambda2 = 0.3;
    sel.utility.alpha = 0.0;
    Explanation e = engine.explain_rumour("r5", sel);
    CHECK(static_cast<int>(e.members.size()) <= sel.k);
  }
  SUBCASE("graph-measure similarity sources drive the utility") {
    SelectionConfig sel = cfg.selection;
    sel.k = 2;
    sel.utility.sim_source = SimSource::Graphsim;
    Explanation e = engine.explain_rumour("r2", sel);
    for (const auto& m : e.members) {
      CHECK(m.sim >= 0.0);
      CHECK(m.sim <= 1.0);
    }
    // retrieval stays embedding-based, but the reported sims come from the
    // graph measure, so recomputing one by hand must agree
    if (!e.members.empty()) {
      SubgraphView qv = view_of(engine.graph(), engine.rumours().get("r2"));
      SubgraphView mv =
          view_of(engine.graph(), engine.rumours().get(e.members[0].rumour_id));
      GraphSimConfig gcfg;
      gcfg.allow_approx_mcs = true;
      double expect = graphsim(mv, qv, cfg.kernel, gcfg).score;
      CHECK(e.members[0].sim == doctest::Approx(expect).epsilon(1e-9));
    }
  }
  SUBCASE("explain events carry their own k and gamma") {
    StreamEvent ev;
    ev.type = StreamEvent::Type::ExplainQuery;
    ev.id = "qx";
    ev.rumour_ref = "r1";
    ev.k = 2;
    ev.gamma = 0.0;
    auto res = engine.handle(ev);
    REQUIRE(res.explanation.has_value());
    CHECK(static_cast<int>(res.explanation->members.size()) <= 2);
    ev.k = 0;  // invalid by contract
    CHECK_THROWS_AS(engine.handle(ev), Error);
  }
  SUBCASE("model refresh bumps the version and keeps explanations consistent") {
    std::uint64_t v2 = engine.refresh_model();
    CHECK(v2 == 2);
    Explanation e = engine.explain_rumour("r1", cfg.selection);
    CHECK(e.model_version == 2);
    Explanation s = engine.explain_rumour_full_scan("r1", cfg.selection);
    CHECK(e.utility_value == doctest::Approx(s.utility_value).epsilon(1e-9));
  }
  SUBCASE("cache fast path serves compatible queries, flagged as cached") {
    EngineConfig fast = cfg;
    fast.epsilon_cache = 2.1;  // any median qualifies
    StreamEngine engine2(schema, fast);
    for (const StreamEvent& ev : graph_to_events(base)) engine2.handle(ev);
    engine2.train_model();
    for (std::size_t i = 0; i < engine.rumours().size(); ++i) {
      const RumourSubgraph& r = engine.rumours().at(i);
      StreamEvent ev;
      ev.type = StreamEvent::Type::DetectRumour;
      ev.id = r.id;
      for (int n : r.nodes) ev.node_ids.push_back(base.node(n).id);
      engine2.handle(ev);
    }
    Explanation e = engine2.explain_rumour("r0", fast.selection);
    CHECK(e.cached);
    CHECK(static_cast<int>(e.members.size()) <= fast.selection.k);
    for (const auto& m : e.members) CHECK(m.sim >= fast.selection.gamma);
  }
  SUBCASE("checkpoint round trip preserves explanations") {
    std::string dir =
        (std::filesystem::temp_directory_path() / "rumex_engine_ckpt").string();
    engine.save_checkpoint(dir);
    StreamEngine back = StreamEngine::load_checkpoint(dir);
    CHECK(back.rumours().size() == engine.rumours().size());
    CHECK(back.index().size() == engine.index().size());
    CHECK(back.model_version() == engine.model_version());
    Explanation a = engine.explain_rumour("r2", cfg.selection);
    Explanation b = back.explain_rumour("r2", cfg.selection);
    CHECK(explanation_to_json(a).dump() == explanation_to_json(b).dump());
    std::filesystem::remove_all(dir);
  }
}

TEST_CASE("drift-driven refresh re-embeds the index") {
  auto schema = default_schema();
  EngineConfig cfg;
  cfg.model.embed_dim = 4;
  cfg.model.num_layers = 1;
  cfg.model.epochs = 3;
  cfg.model.learning_rate = 0.01;
  cfg.cache_capacity = 2;
  cfg.calibration_window = 5;
  cfg.drift_kappa = 0.0;      // aggressive: any deviation accumulates
  cfg.drift_threshold = 3.0;  // low threshold to force an alarm
  cfg.drift_enabled = true;
  cfg.refresh_on_drift = true;
  cfg.refresh_epochs = 1;
  cfg.epsilon_cache = -1.0;

  StreamEngine engine(schema, cfg);
  MsgGraph base = gen_base_graph(schema, 40, 90, 7);
  for (const StreamEvent& ev : graph_to_events(base)) engine.handle(ev);
  engine.train_model();

  bool drifted = false;
  int produced = 0;
  for (int run = 0; produced < 30 && run < 400; ++run) {
    PropagationConfig pc;
    pc.model = PropagationModel::SI;
    pc.infection_prob = 0.5;
    pc.max_steps = 3;
    pc.rng_seed = 900 + run;
    PropagationResult res = simulate_infection(base, pc);
    for (const auto& comp : res.components) {
      if (comp.nodes.size() < 2 || produced >= 30) continue;
      StreamEvent ev;
      ev.type = StreamEvent::Type::DetectRumour;
      ev.id = "r" + std::to_string(produced++);
      for (int n : comp.nodes) ev.node_ids.push_back(base.node(n).id);
      StreamEngine::EventResult r = engine.handle(ev);
      if (r.drift) drifted = true;
    }
  }
  // with a near-zero kappa the statistic accumulates to the low threshold
  CHECK(drifted);
  CHECK(engine.model_version() > 1);
  // every stored rumour was re-embedded under the new version
  CHECK(engine.index().size() == static_cast<int>(engine.rumours().size()));
}
