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

#include "actionfield/simctl.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "actionfield/errors.hpp"

namespace actionfield {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Plant make_plant(int dof, double mass, double damping, double dt) {
  if (dof < 1) throw ConfigError("config.invalid:sim:dof");
  if (!(mass > 0.0)) throw ConfigError("config.invalid:sim.mass:non_positive");
  if (damping < 0.0) throw ConfigError("config.invalid:sim.damping:negative");
  if (!(dt > 0.0)) throw ConfigError("config.invalid:sim.dt:non_positive");
  return {VectorXd::Constant(dof, mass), VectorXd::Constant(dof, damping),
          VectorXd::Zero(dof), VectorXd::Zero(dof), dt};
}

Plant step_plant(const Plant& p, const VectorXd& u) {
  Plant next = p;
  next.velocity.array() +=
      p.dt * (u.array() - p.damping.array() * p.velocity.array()) / p.mass.array();
  next.position += p.dt * next.velocity;
  return next;
}

ImpedanceGains ImpedanceGains::critically_damped(const VectorXd& kp,
                                                 const VectorXd& mass) {
  return {kp, 2.0 * (kp.array() * mass.array()).sqrt().matrix()};
}

int ControllerTiming::substeps(double dt) const {
  if (!(controller_hz > 0.0)) throw ConfigError("config.invalid:sim.controller_hz");
  const double ratio = 1.0 / (controller_hz * dt);
  const long n = std::lround(ratio);
  if (n < 1 || std::abs(ratio - n) > 1e-6 * ratio)
    throw ConfigError("config.invalid:sim.dt:not_a_divisor_of_controller_period");
  return static_cast<int>(n);
}

namespace {

struct Reference {
  VectorXd position;
  VectorXd velocity;
};

void check_gains(const Plant& plant, const ImpedanceGains& g) {
  if (g.kp.size() != plant.dof() || g.kd.size() != plant.dof())
    throw StructuralError("gains_dof");
  if ((g.kp.array() < 0.0).any() || (g.kd.array() < 0.0).any())
    throw ConfigError("config.invalid:sim:negative_gain");
}

ControlTrace allocate_trace(const std::string& tag, int dof, int steps, double dt) {
  ControlTrace t;
  t.controller = tag;
  t.dt = dt;
  t.time.reserve(steps);
  t.position = MatrixXd(steps, dof);
  t.velocity = MatrixXd(steps, dof);
  t.ref_position = MatrixXd(steps, dof);
  t.ref_velocity = MatrixXd(steps, dof);
  t.command = MatrixXd(steps, dof);
  return t;
}

void truncate(ControlTrace& t, int rows) {
  t.position.conservativeResize(rows, Eigen::NoChange);
  t.velocity.conservativeResize(rows, Eigen::NoChange);
  t.ref_position.conservativeResize(rows, Eigen::NoChange);
  t.ref_velocity.conservativeResize(rows, Eigen::NoChange);
  t.command.conservativeResize(rows, Eigen::NoChange);
}

// Shared rollout loop. `reference(t)` is queried once per controller tick;
// rows are appended to `trace` starting at `row`.
template <class RefFn>
Plant rollout(Plant plant, const ImpedanceGains& gains, int steps, int substeps,
              double t0, RefFn&& reference, ControlTrace& trace) {
  VectorXd u = VectorXd::Zero(plant.dof());
  Reference ref;
  for (int i = 0; i < steps; ++i) {
    const double t = t0 + i * plant.dt;
    if (i % substeps == 0) {
      ref = reference(i * plant.dt);
      u = gains.kp.cwiseProduct(ref.position - plant.position) +
          gains.kd.cwiseProduct(ref.velocity - plant.velocity);
      if (!u.allFinite()) {
        trace.aborted = true;
        trace.abort_reason = "numeric.non_finite_command:step=" + std::to_string(i);
        return plant;
      }
    }
    const int row = trace.steps();
    trace.time.push_back(t);
    trace.position.row(row) = plant.position.transpose();
    trace.velocity.row(row) = plant.velocity.transpose();
    trace.ref_position.row(row) = ref.position.transpose();
    trace.ref_velocity.row(row) = ref.velocity.transpose();
    trace.command.row(row) = u.transpose();
    plant = step_plant(plant, u);
  }
  return plant;
}

VectorXd resolve_anchor(const VectorXd& anchor, int dof) {
  if (anchor.size() == 0) return VectorXd::Zero(dof);
  if (anchor.size() != dof) throw StructuralError("anchor_dof");
  return anchor;
}

}  // namespace

ControlTrace run_impedance(const Plant& plant, const ModulatedField& field,
                           const ImpedanceGains& gains, double duration, int steps,
                           ControllerTiming timing, const VectorXd& anchor) {
  check_gains(plant, gains);
  if (field.action_dim() != plant.dof()) throw StructuralError("field_dof");
  if (!(duration > 0.0)) throw ConfigError("config.invalid:T:non_positive");
  if (steps < 1 || steps * plant.dt > duration * (1.0 + 1e-9))
    throw ConfigError("config.invalid:sim.steps:exceeds_chunk");
  const int sub = timing.substeps(plant.dt);
  const VectorXd base = resolve_anchor(anchor, plant.dof());
  const double scale = 2.0 / duration;

  ControlTrace trace = allocate_trace("impedance", plant.dof(), steps, plant.dt);
  auto reference = [&](double t) {
    const double tau[1] = {-1.0 + 2.0 * t / duration};
    const FieldJet jet = eval_jet(field, tau, 1);
    return Reference{base + jet.derivs[0].col(0), scale * jet.derivs[1].col(0)};
  };
  rollout(plant, gains, steps, sub, 0.0, reference, trace);
  truncate(trace, trace.steps());
  return trace;
}

ControlTrace run_position_ctrl(const Plant& plant, const WaypointChunk& chunk,
                               const ImpedanceGains& gains, int steps,
                               ControllerTiming timing, const VectorXd& anchor) {
  check_gains(plant, gains);
  if (chunk.points.cols() != plant.dof()) throw StructuralError("waypoint_dof");
  if (chunk.horizon() < 2) throw ConfigError("config.invalid:H:less_than_2");
  if (steps < 1 || steps * plant.dt > chunk.duration * (1.0 + 1e-9))
    throw ConfigError("config.invalid:sim.steps:exceeds_chunk");
  const int sub = timing.substeps(plant.dt);
  const VectorXd base = resolve_anchor(anchor, plant.dof());
  const double spacing = chunk.spacing();
  const int last = chunk.horizon() - 1;

  ControlTrace trace = allocate_trace("position", plant.dof(), steps, plant.dt);
  auto reference = [&](double t) {
    const int idx = std::min(last, static_cast<int>(std::floor(t / spacing + 1e-9)));
    return Reference{base + chunk.points.row(idx).transpose(),
                     VectorXd::Zero(plant.dof())};
  };
  rollout(plant, gains, steps, sub, 0.0, reference, trace);
  truncate(trace, trace.steps());
  return trace;
}

ControlTrace run_impedance_chain(const Plant& plant,
                                 std::span<const ModulatedField> fields,
                                 std::span<const double> durations,
                                 const ImpedanceGains& gains,
                                 ControllerTiming timing) {
  if (fields.size() != durations.size()) throw StructuralError("chain_lengths");
  check_gains(plant, gains);
  const int sub = timing.substeps(plant.dt);
  int total = 0;
  std::vector<int> chunk_steps;
  for (double d : durations) {
    if (!(d > 0.0)) throw ConfigError("config.invalid:T:non_positive");
    chunk_steps.push_back(static_cast<int>(std::floor(d / plant.dt + 1e-9)));
    total += chunk_steps.back();
  }
  ControlTrace trace = allocate_trace("impedance_chain", plant.dof(), total, plant.dt);
  Plant p = plant;
  double t0 = 0.0;
  for (std::size_t c = 0; c < fields.size(); ++c) {
    if (fields[c].action_dim() != plant.dof()) throw StructuralError("field_dof");
    const VectorXd base = p.position;
    const double duration = durations[c];
    const double scale = 2.0 / duration;
    const ModulatedField& field = fields[c];
    auto reference = [&](double t) {
      const double tau[1] = {-1.0 + 2.0 * t / duration};
      const FieldJet jet = eval_jet(field, tau, 1);
      return Reference{base + jet.derivs[0].col(0), scale * jet.derivs[1].col(0)};
    };
    p = rollout(p, gains, chunk_steps[c], sub, t0, reference, trace);
    if (trace.aborted) break;
    t0 += chunk_steps[c] * plant.dt;
  }
  truncate(trace, trace.steps());
  return trace;
}

namespace {

int count_sign_changes(const Eigen::VectorXd& v) {
  int count = 0;
  int prev = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const int s = (v(i) > 0.0) - (v(i) < 0.0);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++count;
    prev = s;
  }
  return count;
}

// Returns {energy above fs/4, total energy} over the one-sided spectrum.
std::pair<double, double> spectral_energy(const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> in(x.data(), x.data() + n);
  std::vector<fftw_complex> out(static_cast<std::size_t>(n / 2 + 1));
  // The FFTW planner is not thread-safe; execution is.
  static std::mutex planner;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner);
    plan = fftw_plan_dft_r2c_1d(n, in.data(), out.data(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner);
  fftw_destroy_plan(plan);
  double high = 0.0, total = 0.0;
  for (int k = 0; k <= n / 2; ++k) {
    const double e = out[k][0] * out[k][0] + out[k][1] * out[k][1];
    total += e;
    if (4 * k > n) high += e;
  }
  return {high, total};
}

}  // namespace

JitterMetrics velocity_jitter(const MatrixXd& velocity, double dt) {
  const Eigen::Index n = velocity.rows();
  if (n < 8) throw ConfigError("config.invalid:trace:shorter_than_8");
  if (!(dt > 0.0)) throw ConfigError("config.invalid:dt:non_positive");
  const Eigen::Index dof = velocity.cols();
  JitterMetrics m;
  const double duration = n * dt;
  double crossings = 0.0;
  double jerk_sq = 0.0;
  double high = 0.0, total = 0.0;
  for (Eigen::Index d = 0; d < dof; ++d) {
    const VectorXd v = velocity.col(d);
    crossings += count_sign_changes(v);
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
      const double j = (v(i + 1) - 2.0 * v(i) + v(i - 1)) / (dt * dt);
      jerk_sq += j * j;
    }
    const auto [h, t] = spectral_energy(v);
    high += h;
    total += t;
  }
  m.vel_zero_crossing_rate = crossings / duration / static_cast<double>(dof);
  m.jerk_rms = std::sqrt(jerk_sq / static_cast<double>((n - 2) * dof));
  m.hf_energy_ratio = total > 0.0 ? high / total : 0.0;
  return m;
}

JitterMetrics jitter_metrics(const ControlTrace& trace) {
  JitterMetrics m = velocity_jitter(trace.velocity, trace.dt);
  const MatrixXd e = trace.position - trace.ref_position;
  m.tracking_rmse = std::sqrt(e.squaredNorm() / static_cast<double>(e.size()));
  return m;
}

std::string trace_csv_header(int dof) {
  std::string h = "step,time";
  const char* groups[] = {"x", "v", "ref_x", "ref_v", "u"};
  for (const char* g : groups)
    for (int d = 0; d < dof; ++d) h += "," + std::string(g) + "_" + std::to_string(d);
  return h;
}

void write_trace_csv(const std::string& path, const ControlTrace& trace) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("io.unwritable:" + path);
  const int dof = static_cast<int>(trace.position.cols());
  out << trace_csv_header(dof) << '\n';
  char buf[64];
  for (int i = 0; i < trace.steps(); ++i) {
    out << i;
    std::snprintf(buf, sizeof buf, ",%.17g", trace.time[i]);
    out << buf;
    for (const MatrixXd* m : {&trace.position, &trace.velocity, &trace.ref_position,
                              &trace.ref_velocity, &trace.command}) {
      for (int d = 0; d < dof; ++d) {
        std::snprintf(buf, sizeof buf, ",%.17g", (*m)(i, d));
        out << buf;
      }
    }
    out << '\n';
  }
}

}  // namespace actionfield
