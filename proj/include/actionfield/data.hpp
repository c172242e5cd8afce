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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace actionfield {

enum class TaskKind { kMinJerk = 0, kSines = 1, kPickPlace = 2 };
inline constexpr int kTaskKinds = 3;

const char* task_name(TaskKind k);
TaskKind parse_task(const std::string& name);

// One training example. positions/velocities are H x D, rows on the
// uniform grid t_k = k T / (H - 1).
struct ChunkRecord {
  std::string id;
  double duration = 1.0;
  Eigen::MatrixXd positions;
  std::optional<Eigen::MatrixXd> velocities;
  // [task one-hot (3) | x0 (D) | xf (D)]
  Eigen::VectorXd context;
  bool anchored = false;
  std::optional<Eigen::VectorXd> offset;

  int horizon() const { return static_cast<int>(positions.rows()); }
  int dim() const { return static_cast<int>(positions.cols()); }
};

inline int context_dim(int action_dim) { return kTaskKinds + 2 * action_dim; }

Eigen::VectorXd make_context(TaskKind kind, const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& xf);

// Quintic x0 + (xf - x0)(10 s^3 - 15 s^4 + 6 s^5), s = t / T.
ChunkRecord gen_minjerk(const Eigen::VectorXd& x0, const Eigen::VectorXd& xf,
                        double duration, int horizon);

struct SineComponent {
  double amplitude = 1.0;
  double frequency_hz = 1.0;
  double phase = 0.0;
};

// x_d(t) = sum_i A_i sin(2 pi f_i t + phi_i), one component list per DoF.
ChunkRecord gen_sines(const std::vector<std::vector<SineComponent>>& per_dof,
                      double duration, int horizon);

// Min-jerk moves through `waypoints`, holding still for `dwell` seconds at
// every interior waypoint. Moves share the remaining time equally.
ChunkRecord gen_pickplace(const std::vector<Eigen::VectorXd>& waypoints,
                          double dwell, double duration, int horizon);

// Subtracts the first position row from every row (delta-from-start).
ChunkRecord anchor_chunk(const ChunkRecord& c);
ChunkRecord unanchor_chunk(const ChunkRecord& c);

// Randomized fixtures for `generate`.
std::vector<ChunkRecord> generate_dataset(TaskKind kind, int count, int dim,
                                          int horizon, double duration,
                                          std::uint64_t seed, bool anchor);

inline constexpr int kDatasetSchemaVersion = 1;

// Line-delimited JSON, one record per line.
std::vector<ChunkRecord> read_dataset(const std::string& path);
void write_dataset(const std::string& path, std::span<const ChunkRecord> records);

std::string record_to_line(const ChunkRecord& r);
ChunkRecord record_from_line(const std::string& line, int line_number);

}  // namespace actionfield
