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

#pragma once

// Discrete-waypoint and spline representations used as comparison points:
// uniform quantization, numerical differentiation, resampling, and clamped
// cubic B-splines.

#include <Eigen/Dense>

#include "actionfield/data.hpp"

namespace actionfield {

// H x D samples on the uniform grid t_k = k T / (H - 1).
struct WaypointChunk {
  Eigen::MatrixXd points;
  double duration = 1.0;
  bool quantized = false;
  int bins = 256;

  int horizon() const { return static_cast<int>(points.rows()); }
  double spacing() const { return duration / (horizon() - 1); }
};

WaypointChunk waypoints_from(const ChunkRecord& c);

// Per-dimension uniform grid of `bins` levels spanning the chunk's own
// [min, max]. Exact ties round toward the lower level. Constant dimensions
// pass through.
WaypointChunk quantize(const WaypointChunk& chunk, int bins);

// First derivative of row-sampled data: central differences in the
// interior, second-order one-sided stencils at both ends. Needs >= 3 rows.
Eigen::MatrixXd differentiate(const Eigen::MatrixXd& samples, double dt);

Eigen::MatrixXd fd_velocity(const WaypointChunk& chunk);
// Second difference; second-order one-sided stencils at the ends when
// H >= 4, the interior stencil shifted inward when H == 3.
Eigen::MatrixXd fd_acceleration(const WaypointChunk& chunk);

// Piecewise-linear resampling onto a uniform grid of `count` points.
WaypointChunk interp_linear(const WaypointChunk& chunk, int count);

struct BsplineChunk {
  Eigen::MatrixXd control_points;  // P x D
  int degree = 3;
  Eigen::VectorXd knots;           // clamped uniform on [0, 1]
  double duration = 1.0;
};

Eigen::VectorXd clamped_uniform_knots(int control_points, int degree);
BsplineChunk make_bspline(Eigen::MatrixXd control_points, double duration,
                          int degree = 3);

// de Boor evaluation at normalized time tau in [-1, 1].
Eigen::VectorXd bspline_eval(const BsplineChunk& b, double tau);
// Uniform resampling of the curve onto `count` points.
WaypointChunk bspline_sample(const BsplineChunk& b, int count);

struct BsplineFit {
  BsplineChunk spline;
  double residual_rms = 0.0;
};

// Linear least squares on the collocation matrix at the waypoint times.
BsplineFit fit_bspline(const WaypointChunk& chunk, int control_points, int degree = 3);

}  // namespace actionfield
