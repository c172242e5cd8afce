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

#include "actionfield/data.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "actionfield/errors.hpp"
#include "json.hpp"

namespace actionfield {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

const char* task_name(TaskKind k) {
  switch (k) {
    case TaskKind::kMinJerk: return "minjerk";
    case TaskKind::kSines: return "sines";
    case TaskKind::kPickPlace: return "pickplace";
  }
  return "unknown";
}

TaskKind parse_task(const std::string& name) {
  if (name == "minjerk") return TaskKind::kMinJerk;
  if (name == "sines") return TaskKind::kSines;
  if (name == "pickplace") return TaskKind::kPickPlace;
  throw ConfigError("config.invalid:data.kind:" + name);
}

VectorXd make_context(TaskKind kind, const VectorXd& x0, const VectorXd& xf) {
  VectorXd c = VectorXd::Zero(kTaskKinds + x0.size() + xf.size());
  c(static_cast<int>(kind)) = 1.0;
  c.segment(kTaskKinds, x0.size()) = x0;
  c.tail(xf.size()) = xf;
  return c;
}

namespace {

void check_grid(double duration, int horizon) {
  if (!(duration > 0.0)) throw ConfigError("config.invalid:T:non_positive");
  if (horizon < 2) throw ConfigError("config.invalid:H:less_than_2");
}

double grid_time(int k, int horizon, double duration) {
  return duration * k / static_cast<double>(horizon - 1);
}

// Normalized quintic blend and its derivative with respect to s.
double blend(double s) { return s * s * s * (10.0 + s * (-15.0 + 6.0 * s)); }
double blend_rate(double s) { return 30.0 * s * s * (1.0 + s * (-2.0 + s)); }

}  // namespace

ChunkRecord gen_minjerk(const VectorXd& x0, const VectorXd& xf,
                        double duration, int horizon) {
  check_grid(duration, horizon);
  if (x0.size() != xf.size()) throw ConfigError("config.invalid:minjerk:dim");
  const Eigen::Index dim = x0.size();
  ChunkRecord r;
  r.duration = duration;
  r.positions = MatrixXd(horizon, dim);
  MatrixXd vel(horizon, dim);
  const VectorXd delta = xf - x0;
  for (int k = 0; k < horizon; ++k) {
    const double s = grid_time(k, horizon, duration) / duration;
    r.positions.row(k) = (x0 + blend(s) * delta).transpose();
    vel.row(k) = (blend_rate(s) / duration * delta).transpose();
  }
  r.velocities = std::move(vel);
  r.context = make_context(TaskKind::kMinJerk, x0, xf);
  return r;
}

ChunkRecord gen_sines(const std::vector<std::vector<SineComponent>>& per_dof,
                      double duration, int horizon) {
  check_grid(duration, horizon);
  const Eigen::Index dim = static_cast<Eigen::Index>(per_dof.size());
  if (dim < 1) throw ConfigError("config.invalid:sines:no_dof");
  ChunkRecord r;
  r.duration = duration;
  r.positions = MatrixXd::Zero(horizon, dim);
  MatrixXd vel = MatrixXd::Zero(horizon, dim);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  for (int k = 0; k < horizon; ++k) {
    const double t = grid_time(k, horizon, duration);
    for (Eigen::Index d = 0; d < dim; ++d) {
      for (const auto& c : per_dof[d]) {
        const double w = kTwoPi * c.frequency_hz;
        r.positions(k, d) += c.amplitude * std::sin(w * t + c.phase);
        vel(k, d) += c.amplitude * w * std::cos(w * t + c.phase);
      }
    }
  }
  r.velocities = std::move(vel);
  r.context = make_context(TaskKind::kSines, r.positions.row(0).transpose(),
                           r.positions.row(horizon - 1).transpose());
  return r;
}

ChunkRecord gen_pickplace(const std::vector<VectorXd>& waypoints, double dwell,
                          double duration, int horizon) {
  check_grid(duration, horizon);
  if (waypoints.size() < 2) throw ConfigError("config.invalid:pickplace:waypoints");
  if (dwell < 0.0) throw ConfigError("config.invalid:pickplace:dwell");
  const int moves = static_cast<int>(waypoints.size()) - 1;
  const double move_time = (duration - (moves - 1) * dwell) / moves;
  if (!(move_time > 0.0)) throw ConfigError("config.invalid:pickplace:dwell_too_long");
  const Eigen::Index dim = waypoints.front().size();

  ChunkRecord r;
  r.duration = duration;
  r.positions = MatrixXd(horizon, dim);
  MatrixXd vel = MatrixXd::Zero(horizon, dim);
  const double period = move_time + dwell;
  for (int k = 0; k < horizon; ++k) {
    const double t = grid_time(k, horizon, duration);
    int seg = std::min(static_cast<int>(t / period), moves - 1);
    const double local = t - seg * period;
    const VectorXd& a = waypoints[seg];
    const VectorXd& b = waypoints[seg + 1];
    if (local >= move_time) {
      // dwelling at waypoint seg + 1
      r.positions.row(k) = b.transpose();
    } else {
      const double s = local / move_time;
      r.positions.row(k) = (a + blend(s) * (b - a)).transpose();
      vel.row(k) = (blend_rate(s) / move_time * (b - a)).transpose();
    }
  }
  r.velocities = std::move(vel);
  r.context = make_context(TaskKind::kPickPlace, waypoints.front(),
                           waypoints.back());
  return r;
}

ChunkRecord anchor_chunk(const ChunkRecord& c) {
  if (c.anchored) throw DataError("data.already_anchored:" + c.id);
  if (c.horizon() < 1) throw DataError("data.empty_chunk:" + c.id);
  ChunkRecord out = c;
  const Eigen::RowVectorXd start = c.positions.row(0);
  out.positions.rowwise() -= start;
  out.offset = start.transpose();
  out.anchored = true;
  return out;
}

ChunkRecord unanchor_chunk(const ChunkRecord& c) {
  if (!c.anchored || !c.offset) throw DataError("data.not_anchored:" + c.id);
  ChunkRecord out = c;
  out.positions.rowwise() += c.offset->transpose();
  out.offset.reset();
  out.anchored = false;
  return out;
}

std::vector<ChunkRecord> generate_dataset(TaskKind kind, int count, int dim,
                                          int horizon, double duration,
                                          std::uint64_t seed, bool anchor) {
  if (count < 0 || dim < 1) throw ConfigError("config.invalid:data:size");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto random_vec = [&](double scale) {
    VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = scale * unit(rng);
    return v;
  };

  std::vector<ChunkRecord> out;
  for (int i = 0; i < count; ++i) {
    ChunkRecord r;
    switch (kind) {
      case TaskKind::kMinJerk:
        r = gen_minjerk(random_vec(1.0), random_vec(1.0), duration, horizon);
        break;
      case TaskKind::kSines: {
        std::uniform_real_distribution<double> amp(0.2, 0.6), freq(0.2, 1.0),
            phase(0.0, 2.0 * std::numbers::pi);
        std::vector<std::vector<SineComponent>> comps(dim);
        for (auto& c : comps)
          for (int j = 0; j < 2; ++j) c.push_back({amp(rng), freq(rng), phase(rng)});
        r = gen_sines(comps, duration, horizon);
        break;
      }
      case TaskKind::kPickPlace: {
        const VectorXd start = random_vec(1.0);
        const VectorXd mid = random_vec(1.0);
        const VectorXd end = random_vec(1.0);
        r = gen_pickplace({start, mid, end}, 0.15 * duration, duration, horizon);
        break;
      }
    }
    r.id = std::string(task_name(kind)) + "-" + std::to_string(i);
    out.push_back(anchor ? anchor_chunk(r) : std::move(r));
  }
  return out;
}

namespace {

json matrix_to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

MatrixXd json_to_matrix(const json& j, Eigen::Index rows, Eigen::Index cols,
                        const std::string& what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw DataError("data.dimension:" + what + ":rows");
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw DataError("data.dimension:" + what + ":cols");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[c].get<double>();
  }
  return m;
}

VectorXd json_to_vector(const json& j, const std::string& what) {
  if (!j.is_array()) throw DataError("data.dimension:" + what);
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

}  // namespace

std::string record_to_line(const ChunkRecord& r) {
  json j;
  j["schema_version"] = kDatasetSchemaVersion;
  j["id"] = r.id;
  j["T"] = r.duration;
  j["D"] = r.dim();
  j["H"] = r.horizon();
  j["positions"] = matrix_to_json(r.positions);
  if (r.velocities) j["velocities"] = matrix_to_json(*r.velocities);
  j["context"] = vector_to_json(r.context);
  j["anchored"] = r.anchored;
  if (r.offset) j["offset"] = vector_to_json(*r.offset);
  return j.dump();
}

ChunkRecord record_from_line(const std::string& line, int line_number) {
  const std::string where = ":line=" + std::to_string(line_number);
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error&) {
    throw DataError("data.malformed" + where);
  }
  ChunkRecord r;
  try {
    if (!j.is_object() || !j.contains("schema_version"))
      throw DataError("data.missing_schema_version" + where);
    if (j.at("schema_version").get<int>() != kDatasetSchemaVersion)
      throw DataError("data.schema_version" + where);
    r.id = j.at("id").get<std::string>();
    const std::string who = ":id=" + r.id;
    r.duration = j.at("T").get<double>();
    const int dim = j.at("D").get<int>();
    const int horizon = j.at("H").get<int>();
    if (!(r.duration > 0.0) || dim < 1 || horizon < 2)
      throw DataError("data.dimension" + who);
    try {
      r.positions = json_to_matrix(j.at("positions"), horizon, dim, "positions");
      if (j.contains("velocities"))
        r.velocities = json_to_matrix(j.at("velocities"), horizon, dim, "velocities");
    } catch (const DataError& e) {
      throw DataError(std::string(e.what()) + who);
    }
    r.context = json_to_vector(j.at("context"), "context");
    r.anchored = j.at("anchored").get<bool>();
    if (j.contains("offset")) {
      r.offset = json_to_vector(j.at("offset"), "offset");
      if (r.offset->size() != dim) throw DataError("data.dimension:offset" + who);
    }
    if (r.anchored && !r.offset) throw DataError("data.missing_offset" + who);
  } catch (const json::exception&) {
    throw DataError("data.malformed" + where);
  }
  return r;
}

std::vector<ChunkRecord> read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("data.unreadable:" + path);
  std::vector<ChunkRecord> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(record_from_line(line, number));
  }
  return out;
}

void write_dataset(const std::string& path, std::span<const ChunkRecord> records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("data.unwritable:" + path);
  for (const auto& r : records) out << record_to_line(r) << '\n';
  if (!out) throw DataError("data.unwritable:" + path);
}

}  // namespace actionfield
