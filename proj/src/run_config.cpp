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

#include "rumex/run_config.hpp"

#include <fstream>

namespace rumex {

namespace {

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    int x = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    fail(ErrorCode::ConfigError, "bad integer for " + key + ": '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    fail(ErrorCode::ConfigError, "bad number for " + key + ": '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    unsigned long long x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    fail(ErrorCode::ConfigError, "bad integer for " + key + ": '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(ErrorCode::ConfigError, "bad boolean for " + key + ": '" + v + "'");
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void apply_config_entry(EngineConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "model.embed_dim") cfg.model.embed_dim = to_int(key, value);
  else if (key == "model.num_layers") cfg.model.num_layers = to_int(key, value);
  else if (key == "model.q_plus") cfg.model.q_plus = to_int(key, value);
  else if (key == "model.q_minus") cfg.model.q_minus = to_int(key, value);
  else if (key == "model.learning_rate") cfg.model.learning_rate = to_double(key, value);
  else if (key == "model.epochs") cfg.model.epochs = to_int(key, value);
  else if (key == "model.rng_seed") cfg.model.rng_seed = to_u64(key, value);
  else if (key == "selection.k") cfg.selection.k = to_int(key, value);
  else if (key == "selection.gamma") {
    cfg.selection.gamma = to_double(key, value);
    cfg.selection.utility.gamma = cfg.selection.gamma;
  } else if (key == "selection.strategy") cfg.selection.strategy = strategy_from_string(value);
  else if (key == "selection.passes") cfg.selection.passes = to_int(key, value);
  else if (key == "selection.beta") cfg.selection.beta = to_double(key, value);
  else if (key == "utility.mode") cfg.selection.utility.mode = utility_mode_from_string(value);
  else if (key == "utility.sim_source")
    cfg.selection.utility.sim_source = sim_source_from_string(value);
  else if (key == "utility.lambda1") cfg.selection.utility.lambda1 = to_double(key, value);
  else if (key == "utility.lambda2") cfg.selection.utility.lambda2 = to_double(key, value);
  else if (key == "utility.alpha") cfg.selection.utility.alpha = to_double(key, value);
  else if (key == "utility.delta") cfg.selection.utility.delta = to_double(key, value);
  else if (key == "engine.cache_capacity") cfg.cache_capacity = to_int(key, value);
  else if (key == "engine.reservoir_cap") cfg.reservoir_cap = to_int(key, value);
  else if (key == "engine.calibration_window") cfg.calibration_window = to_int(key, value);
  else if (key == "engine.drift_kappa") cfg.drift_kappa = to_double(key, value);
  else if (key == "engine.drift_threshold") cfg.drift_threshold = to_double(key, value);
  else if (key == "engine.drift_enabled") cfg.drift_enabled = to_bool(key, value);
  else if (key == "engine.refresh_on_drift") cfg.refresh_on_drift = to_bool(key, value);
  else if (key == "engine.refresh_epochs") cfg.refresh_epochs = to_int(key, value);
  else if (key == "engine.epsilon_cache") cfg.epsilon_cache = to_double(key, value);
  else if (key == "engine.overfetch_min") cfg.overfetch_min = to_int(key, value);
  else if (key == "kernel.kind") {
    if (value == "exact") cfg.kernel.kind = SimilarityKernel::Kind::ExactMatch;
    else if (value == "graded") cfg.kernel.kind = SimilarityKernel::Kind::Graded;
    else fail(ErrorCode::ConfigError, "kernel.kind must be exact or graded");
  } else if (key == "kernel.epsilon") cfg.kernel.epsilon = to_double(key, value);
  else if (key == "kernel.scale") cfg.kernel.scale = to_double(key, value);
  else fail(ErrorCode::ConfigError, "unknown config key '" + key + "'");
}

void load_config_file(EngineConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open config '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::ConfigError,
           path + ":" + std::to_string(lineno) + ": expected key = value");
    apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

}  // namespace rumex
