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

#include "rumex/drift.hpp"

#include <cmath>

#include "rumex/hmpgcn.hpp"
#include "rumex/rng.hpp"

namespace rumex {

DriftDetector::DriftDetector(Config cfg, int zeta_dim) : cfg_(cfg), zeta_dim_(zeta_dim) {
  if (zeta_dim_ < 1) fail(ErrorCode::ConfigError, "zeta dimension must be >= 1");
  if (cfg_.calibration_window < 2)
    fail(ErrorCode::ConfigError, "calibration window must be >= 2");
}

DriftDetector::DriftDetector(Config cfg, std::vector<Vec> anchors)
    : DriftDetector(cfg, static_cast<int>(anchors.size())) {
  anchors_ = std::move(anchors);
}

Vec DriftDetector::zeta_of(const Vec& unit_embedding) const {
  if (anchors_.empty())
    fail(ErrorCode::ConfigError, "detector has no anchors; feed zeta directly");
  Vec zeta(anchors_.size());
  for (std::size_t i = 0; i < anchors_.size(); ++i)
    zeta[i] = 1.0 - embedding_similarity(unit_embedding, anchors_[i]);
  return zeta;
}

DriftDetector::Outcome DriftDetector::feed_embedding(const Vec& unit_embedding) {
  return feed_zeta(zeta_of(unit_embedding));
}

DriftDetector::Outcome DriftDetector::feed_zeta(const Vec& zeta) {
  if (!calibrated_) {
    if (static_cast<int>(zeta.size()) != zeta_dim_)
      fail(ErrorCode::ConfigError, "zeta dimension mismatch");
    calibration_.push_back(zeta);
    if (static_cast<int>(calibration_.size()) >= cfg_.calibration_window)
      finalize_calibration();
    return Outcome::Calibrating;
  }
  return observe_zeta(zeta);
}

DriftDetector::Outcome DriftDetector::observe_zeta(const Vec& zeta) {
  if (!calibrated_)
    fail(ErrorCode::NotCalibrated, "detector is still inside its calibration window");
  if (static_cast<int>(zeta.size()) != zeta_dim_)
    fail(ErrorCode::ConfigError, "zeta dimension mismatch");
  double t = standardized_norm(zeta);
  cusum_ = std::max(0.0, cusum_ + t - kappa_value_);
  if (cusum_ > cfg_.threshold) {
    cusum_ = 0.0;
    return Outcome::Drift;
  }
  return Outcome::NoDrift;
}

void DriftDetector::finalize_calibration() {
  int n = static_cast<int>(calibration_.size());
  mean_.assign(zeta_dim_, 0.0);
  for (const Vec& z : calibration_) add_scaled(mean_, 1.0 / n, z);
  stddev_.assign(zeta_dim_, 0.0);
  for (const Vec& z : calibration_)
    for (int i = 0; i < zeta_dim_; ++i) {
      double d = z[i] - mean_[i];
      stddev_[i] += d * d / n;
    }
  for (double& s : stddev_) s = std::max(std::sqrt(s), 1e-9);
  calibrated_ = true;
  if (cfg_.kappa >= 0.0) {
    kappa_value_ = cfg_.kappa;
  } else {
    // slack just above the in-sample mean keeps the null statistic near 0
    double mt = 0.0, mt2 = 0.0;
    for (const Vec& z : calibration_) {
      double t = standardized_norm(z);
      mt += t / n;
      mt2 += t * t / n;
    }
    kappa_value_ = mt + 0.5 * std::sqrt(std::max(0.0, mt2 - mt * mt));
  }
  cusum_ = 0.0;
  calibration_.clear();
}

double DriftDetector::standardized_norm(const Vec& zeta) const {
  double s = 0.0;
  for (int i = 0; i < zeta_dim_; ++i) {
    double d = (zeta[i] - mean_[i]) / stddev_[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double DriftDetector::statistic() const {
  if (!calibrated_) fail(ErrorCode::NotCalibrated, "no statistic before calibration");
  return cusum_;
}

double DriftDetector::kappa() const {
  if (!calibrated_) fail(ErrorCode::NotCalibrated, "kappa is fixed at calibration");
  return kappa_value_;
}

double DriftDetector::tune_threshold(double arl0_target, int dim, double kappa,
                                     std::uint64_t seed, int runs,
                                     int calibration_window) {
  // Simulates the full pipeline on standard-normal null streams, including
  // the finite calibration window: estimating mu/sigma from few samples
  // fattens the tails of the standardized norm, so tuning against idealized
  // residuals would alarm too often in practice. The target is the long-run
  // alarm RATE (alarms per post-calibration sample, resets included), i.e.
  // one expected false alarm every arl0_target samples; this is stricter
  // than a mean first-alarm time, which unlucky calibrations barely dent.
  auto alarm_rate = [&](double h) {
    long long stream_len = static_cast<long long>(10.0 * arl0_target);
    long long samples = 0, alarms = 0;
    for (int r = 0; r < runs; ++r) {
      Rng rng(hash_combine(seed, r));
      Config cfg;
      cfg.calibration_window = calibration_window;
      cfg.kappa = kappa;
      cfg.threshold = h;
      DriftDetector det(cfg, dim);
      Vec z(dim);
      for (int i = 0; i < calibration_window; ++i) {
        for (double& x : z) x = rng.normal();
        det.feed_zeta(z);
      }
      for (long long i = 0; i < stream_len; ++i) {
        for (double& x : z) x = rng.normal();
        ++samples;
        if (det.feed_zeta(z) == Outcome::Drift) ++alarms;
      }
    }
    return static_cast<double>(alarms) / static_cast<double>(samples);
  };
  double target = 1.0 / arl0_target;
  double lo = 1e-3, hi = 1.0;
  while (alarm_rate(hi) > target && hi < 1e6) hi *= 2.0;
  for (int iter = 0; iter < 30; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (alarm_rate(mid) > target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-3 * hi) break;
  }
  return hi;
}

nlohmann::json DriftDetector::to_json() const {
  nlohmann::json anchors = nlohmann::json::array();
  for (const Vec& a : anchors_) anchors.push_back(a);
  nlohmann::json calib = nlohmann::json::array();
  for (const Vec& z : calibration_) calib.push_back(z);
  return nlohmann::json{{"calibration_window", cfg_.calibration_window},
                        {"kappa_cfg", cfg_.kappa},
                        {"threshold", cfg_.threshold},
                        {"zeta_dim", zeta_dim_},
                        {"anchors", anchors},
                        {"pending_calibration", calib},
                        {"calibrated", calibrated_},
                        {"mean", mean_},
                        {"stddev", stddev_},
                        {"kappa_value", kappa_value_},
                        {"cusum", cusum_}};
}

DriftDetector DriftDetector::from_json(const nlohmann::json& j) {
  Config cfg;
  cfg.calibration_window = j.at("calibration_window").get<int>();
  cfg.kappa = j.at("kappa_cfg").get<double>();
  cfg.threshold = j.at("threshold").get<double>();
  DriftDetector d(cfg, j.at("zeta_dim").get<int>());
  for (const auto& a : j.at("anchors")) d.anchors_.push_back(a.get<Vec>());
  for (const auto& z : j.at("pending_calibration")) d.calibration_.push_back(z.get<Vec>());
  d.calibrated_ = j.at("calibrated").get<bool>();
  d.mean_ = j.at("mean").get<Vec>();
  d.stddev_ = j.at("stddev").get<Vec>();
  d.kappa_value_ = j.at("kappa_value").get<double>();
  d.cusum_ = j.at("cusum").get<double>();
  return d;
}

}  // namespace rumex
