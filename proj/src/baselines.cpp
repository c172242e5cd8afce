// Copyright 2026 The Actionfield Authors
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

#include "actionfield/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "actionfield/errors.hpp"

namespace actionfield {

using Eigen::MatrixXd;
using Eigen::VectorXd;

WaypointChunk waypoints_from(const ChunkRecord& c) {
  return {c.positions, c.duration, false, 256};
}

WaypointChunk quantize(const WaypointChunk& chunk, int bins) {
  if (bins < 2) throw ConfigError("config.invalid:bins:less_than_2");
  WaypointChunk out = chunk;
  out.quantized = true;
  out.bins = bins;
  const double levels = bins - 1;
  for (Eigen::Index d = 0; d < chunk.points.cols(); ++d) {
    const double lo = chunk.points.col(d).minCoeff();
    const double hi = chunk.points.col(d).maxCoeff();
    if (!(hi > lo)) continue;
    const double range = hi - lo;
    for (Eigen::Index k = 0; k < chunk.points.rows(); ++k) {
      const double x = (chunk.points(k, d) - lo) / range * levels;
      const double idx = std::clamp(std::ceil(x - 0.5), 0.0, levels);
      double v = lo + range * (idx / levels);
      if (idx == 0.0) v = lo;
      if (idx == levels) v = hi;
      out.points(k, d) = v;
    }
  }
  return out;
}

MatrixXd differentiate(const MatrixXd& x, double dt) {
  const Eigen::Index n = x.rows();
  if (n < 3) throw ConfigError("config.invalid:H:less_than_3");
  if (!(dt > 0.0)) throw ConfigError("config.invalid:dt:non_positive");
  MatrixXd v(n, x.cols());
  const double inv = 1.0 / (2.0 * dt);
  v.row(0) = (-3.0 * x.row(0) + 4.0 * x.row(1) - x.row(2)) * inv;
  for (Eigen::Index k = 1; k + 1 < n; ++k) v.row(k) = (x.row(k + 1) - x.row(k - 1)) * inv;
  v.row(n - 1) = (3.0 * x.row(n - 1) - 4.0 * x.row(n - 2) + x.row(n - 3)) * inv;
  return v;
}

MatrixXd fd_velocity(const WaypointChunk& chunk) {
  if (chunk.horizon() < 3) throw ConfigError("config.invalid:H:less_than_3");
  return differentiate(chunk.points, chunk.spacing());
}

MatrixXd fd_acceleration(const WaypointChunk& chunk) {
  const Eigen::Index n = chunk.horizon();
  if (n < 3) throw ConfigError("config.invalid:H:less_than_3");
  const MatrixXd& x = chunk.points;
  const double inv = 1.0 / (chunk.spacing() * chunk.spacing());
  MatrixXd a(n, x.cols());
  for (Eigen::Index k = 1; k + 1 < n; ++k)
    a.row(k) = (x.row(k + 1) - 2.0 * x.row(k) + x.row(k - 1)) * inv;
  if (n >= 4) {
    a.row(0) = (2.0 * x.row(0) - 5.0 * x.row(1) + 4.0 * x.row(2) - x.row(3)) * inv;
    a.row(n - 1) = (2.0 * x.row(n - 1) - 5.0 * x.row(n - 2) + 4.0 * x.row(n - 3) -
                    x.row(n - 4)) * inv;
  } else {
    a.row(0) = a.row(1);
    a.row(2) = a.row(1);
  }
  return a;
}

WaypointChunk interp_linear(const WaypointChunk& chunk, int count) {
  const int h = chunk.horizon();
  if (h < 2) throw ConfigError("config.invalid:H:less_than_2");
  if (count < 2) throw ConfigError("config.invalid:K:less_than_2");
  WaypointChunk out = chunk;
  out.points = MatrixXd(count, chunk.points.cols());
  for (int j = 0; j < count; ++j) {
    const double u = static_cast<double>(j) * (h - 1) / (count - 1);
    const int i = std::min(static_cast<int>(std::floor(u)), h - 2);
    const double frac = u - i;
    out.points.row(j) = (1.0 - frac) * chunk.points.row(i) + frac * chunk.points.row(i + 1);
  }
  return out;
}

VectorXd clamped_uniform_knots(int control_points, int degree) {
  if (degree < 1 || control_points < degree + 1)
    throw ConfigError("config.invalid:bspline:too_few_control_points");
  const int m = control_points + degree + 1;
  VectorXd knots(m);
  const int interior = control_points - degree - 1;
  for (int i = 0; i < m; ++i) {
    if (i <= degree) knots(i) = 0.0;
    else if (i >= m - degree - 1) knots(i) = 1.0;
    else knots(i) = static_cast<double>(i - degree) / (interior + 1);
  }
  return knots;
}

BsplineChunk make_bspline(MatrixXd control_points, double duration, int degree) {
  BsplineChunk b;
  b.knots = clamped_uniform_knots(static_cast<int>(control_points.rows()), degree);
  b.control_points = std::move(control_points);
  b.degree = degree;
  b.duration = duration;
  return b;
}

namespace {

int find_span(const VectorXd& knots, int control_points, int degree, double u) {
  if (u >= knots(control_points)) return control_points - 1;
  int k = degree;
  while (k + 1 < control_points && knots(k + 1) <= u) ++k;
  return k;
}

VectorXd de_boor(const BsplineChunk& b, double u) {
  const int p = b.degree;
  const int n = static_cast<int>(b.control_points.rows());
  u = std::clamp(u, 0.0, 1.0);
  const int k = find_span(b.knots, n, p, u);
  std::vector<VectorXd> d(p + 1);
  for (int j = 0; j <= p; ++j) d[j] = b.control_points.row(j + k - p).transpose();
  for (int r = 1; r <= p; ++r) {
    for (int j = p; j >= r; --j) {
      const int i = j + k - p;
      const double denom = b.knots(i + p - r + 1) - b.knots(i);
      const double alpha = denom > 0.0 ? (u - b.knots(i)) / denom : 0.0;
      d[j] = (1.0 - alpha) * d[j - 1] + alpha * d[j];
    }
  }
  return d[p];
}

}  // namespace

VectorXd bspline_eval(const BsplineChunk& b, double tau) {
  return de_boor(b, 0.5 * (tau + 1.0));
}

WaypointChunk bspline_sample(const BsplineChunk& b, int count) {
  if (count < 2) throw ConfigError("config.invalid:K:less_than_2");
  WaypointChunk out;
  out.duration = b.duration;
  out.points = MatrixXd(count, b.control_points.cols());
  for (int k = 0; k < count; ++k)
    out.points.row(k) = de_boor(b, static_cast<double>(k) / (count - 1)).transpose();
  return out;
}

BsplineFit fit_bspline(const WaypointChunk& chunk, int control_points, int degree) {
  const int h = chunk.horizon();
  if (control_points > h)
    throw ConfigError("config.invalid:bspline:underdetermined:P=" +
                      std::to_string(control_points) + ",H=" + std::to_string(h));
  BsplineChunk basis = make_bspline(MatrixXd::Identity(control_points, control_points),
                                    chunk.duration, degree);
  MatrixXd collocation(h, control_points);
  for (int k = 0; k < h; ++k)
    collocation.row(k) = de_boor(basis, static_cast<double>(k) / (h - 1)).transpose();
  MatrixXd ctrl = collocation.colPivHouseholderQr().solve(chunk.points);
  BsplineFit fit;
  const MatrixXd resid = collocation * ctrl - chunk.points;
  fit.residual_rms = std::sqrt(resid.squaredNorm() / static_cast<double>(resid.size()));
  fit.spline = make_bspline(std::move(ctrl), chunk.duration, degree);
  return fit;
}

}  // namespace actionfield
