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

#ifndef RUMEX_LINALG_HPP
#define RUMEX_LINALG_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "rumex/errors.hpp"

namespace rumex {

using Vec = std::vector<double>;

// Dense row-major matrix. Embedding dims stay small (d <= 64), so a plain
// vector<double> with inline indexing beats pulling in a BLAS dependency.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }

  void set_zero() { std::fill(a.begin(), a.end(), 0.0); }
};

inline Vec matvec(const Mat& m, const Vec& x) {
  Vec y(m.rows, 0.0);
  for (int r = 0; r < m.rows; ++r) {
    double s = 0.0;
    const double* row = &m.a[static_cast<std::size_t>(r) * m.cols];
    for (int c = 0; c < m.cols; ++c) s += row[c] * x[c];
    y[r] = s;
  }
  return y;
}

// y += M^T x
inline void matvec_transpose_acc(const Mat& m, const Vec& x, Vec& y) {
  for (int r = 0; r < m.rows; ++r) {
    const double* row = &m.a[static_cast<std::size_t>(r) * m.cols];
    double xr = x[r];
    for (int c = 0; c < m.cols; ++c) y[c] += row[c] * xr;
  }
}

inline Vec matvec_transpose(const Mat& m, const Vec& x) {
  Vec y(m.cols, 0.0);
  matvec_transpose_acc(m, x, y);
  return y;
}

// G += x y^T
inline void outer_acc(Mat& g, const Vec& x, const Vec& y) {
  for (int r = 0; r < g.rows; ++r) {
    double* row = &g.a[static_cast<std::size_t>(r) * g.cols];
    double xr = x[r];
    for (int c = 0; c < g.cols; ++c) row[c] += xr * y[c];
  }
}

inline void add_scaled(Vec& y, double alpha, const Vec& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

inline double dot(const Vec& x, const Vec& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm2(const Vec& x) { return std::sqrt(dot(x, x)); }

inline Vec normalized(const Vec& x) {
  double n = norm2(x);
  if (n < 1e-300) fail(ErrorCode::ZeroVector, "cannot normalize a zero vector");
  Vec y(x);
  for (double& v : y) v /= n;
  return y;
}

inline double cosine(const Vec& x, const Vec& y) {
  double nx = norm2(x), ny = norm2(y);
  if (nx < 1e-300 || ny < 1e-300)
    fail(ErrorCode::ZeroVector, "cosine of a zero vector is undefined");
  return dot(x, y) / (nx * ny);
}

inline double sq_dist(const Vec& x, const Vec& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

inline bool all_finite(const Vec& x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace rumex

#endif  // RUMEX_LINALG_HPP
