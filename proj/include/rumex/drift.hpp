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

#ifndef RUMEX_DRIFT_HPP
#define RUMEX_DRIFT_HPP

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "rumex/linalg.hpp"

namespace rumex {

// CUSUM change detection over dissimilarity vectors. Each rumour embedding
// is reduced to zeta = [dist(s, r_1), ..., dist(s, r_k)] against fixed
// anchor subgraphs; a calibration window establishes the reference mean and
// per-coordinate deviation, and the test then accumulates
// S_i = max(0, S_{i-1} + t_i - kappa) over the standardized norm
// t_i = ||(zeta_i - mu_0) / sigma_0||, alarming when S_i exceeds the
// threshold. The statistic resets to zero after an alarm.
class DriftDetector {
 public:
  struct Config {
    int calibration_window = 50;
    double kappa = -1.0;      // < 0: set from calibration (mean_t + 0.5 * std_t)
    double threshold = 25.0;  // h
  };

  enum class Outcome { Calibrating, NoDrift, Drift };

  DriftDetector() = default;

  // zeta vectors are fed directly (dimension = zeta_dim).
  DriftDetector(Config cfg, int zeta_dim);

  // Embeddings are fed and reduced against the anchors (unit vectors).
  DriftDetector(Config cfg, std::vector<Vec> anchors);

  bool calibrated() const { return calibrated_; }
  int zeta_dim() const { return zeta_dim_; }

  Vec zeta_of(const Vec& unit_embedding) const;

  // Feeds one sample; consumes it for calibration while the window is
  // open. Convenience wrapper over add_calibration/observe.
  Outcome feed_embedding(const Vec& unit_embedding);
  Outcome feed_zeta(const Vec& zeta);

  // Strict per-contract observation; fails with NotCalibrated during the
  // calibration window.
  Outcome observe_zeta(const Vec& zeta);

  double statistic() const;  // fails with NotCalibrated
  double kappa() const;      // fails with NotCalibrated
  double threshold() const { return cfg_.threshold; }
  void set_threshold(double h) { cfg_.threshold = h; }

  // Monte-Carlo threshold tuning: finds h such that the average run length
  // to false alarm on a standard-normal null stream is about `arl0_target`.
  // Simulates the calibration window too, since estimated reference moments
  // fatten the tail of the standardized norm.
  static double tune_threshold(double arl0_target, int dim, double kappa,
                               std::uint64_t seed, int runs = 200,
                               int calibration_window = 50);

  nlohmann::json to_json() const;
  static DriftDetector from_json(const nlohmann::json& j);

 private:
  Config cfg_;
  std::vector<Vec> anchors_;
  int zeta_dim_ = 0;

  std::vector<Vec> calibration_;
  bool calibrated_ = false;
  Vec mean_;
  Vec stddev_;
  double kappa_value_ = 0.0;
  double cusum_ = 0.0;

  void finalize_calibration();
  double standardized_norm(const Vec& zeta) const;
};

}  // namespace rumex

#endif  // RUMEX_DRIFT_HPP
