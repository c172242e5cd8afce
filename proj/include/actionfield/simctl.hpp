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

// Per-DoF double-integrator plant tracking a reference under either an
// impedance law fed by the analytic field or stiff position control fed by
// held waypoints.

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "actionfield/baselines.hpp"
#include "actionfield/field.hpp"

namespace actionfield {

struct Plant {
  Eigen::VectorXd mass;
  Eigen::VectorXd damping;
  Eigen::VectorXd position;
  Eigen::VectorXd velocity;
  double dt = 1e-3;

  int dof() const { return static_cast<int>(mass.size()); }
};

Plant make_plant(int dof, double mass, double damping, double dt);

// Semi-implicit Euler: v += dt (u - c v) / m, then x += dt v.
Plant step_plant(const Plant& p, const Eigen::VectorXd& u);

struct ImpedanceGains {
  Eigen::VectorXd kp;
  Eigen::VectorXd kd;

  // Kd = 2 sqrt(Kp m).
  static ImpedanceGains critically_damped(const Eigen::VectorXd& kp,
                                          const Eigen::VectorXd& mass);
};

// One row per plant step: the state before the step and the command held
// during it.
struct ControlTrace {
  std::string controller;
  double dt = 1e-3;
  std::vector<double> time;
  Eigen::MatrixXd position;
  Eigen::MatrixXd velocity;
  Eigen::MatrixXd ref_position;
  Eigen::MatrixXd ref_velocity;
  Eigen::MatrixXd command;
  bool aborted = false;
  std::string abort_reason;

  int steps() const { return static_cast<int>(time.size()); }
};

struct ControllerTiming {
  double controller_hz = 50.0;
  // Plant steps per controller tick; computed from plant dt.
  int substeps(double dt) const;
};

// u = Kp (anchor + Phi(tau) - x) + Kd ((2/T) dPhi/dtau - v), with tau
// mapped linearly from elapsed time onto [-1, 1] and u held between ticks.
ControlTrace run_impedance(const Plant& plant, const ModulatedField& field,
                           const ImpedanceGains& gains, double duration, int steps,
                           ControllerTiming timing = {},
                           const Eigen::VectorXd& anchor = Eigen::VectorXd());

// Same law with the velocity reference forced to zero and the position
// reference held at the most recent waypoint.
ControlTrace run_position_ctrl(const Plant& plant, const WaypointChunk& chunk,
                               const ImpedanceGains& gains, int steps,
                               ControllerTiming timing = {},
                               const Eigen::VectorXd& anchor = Eigen::VectorXd());

// Executes chunks back to back; each chunk's reference is re-anchored at
// the plant position reached at its start.
ControlTrace run_impedance_chain(const Plant& plant,
                                 std::span<const ModulatedField> fields,
                                 std::span<const double> durations,
                                 const ImpedanceGains& gains,
                                 ControllerTiming timing = {});

struct JitterMetrics {
  double vel_zero_crossing_rate = 0.0;  // sign changes per second per DoF
  double jerk_rms = 0.0;                // units / s^3
  double tracking_rmse = 0.0;           // units
  double hf_energy_ratio = 0.0;         // energy above fs/4 over total
};

// Velocity-only metrics for an N x D velocity series sampled every dt.
JitterMetrics velocity_jitter(const Eigen::MatrixXd& velocity, double dt);

JitterMetrics jitter_metrics(const ControlTrace& trace);

std::string trace_csv_header(int dof);
void write_trace_csv(const std::string& path, const ControlTrace& trace);

}  // namespace actionfield
