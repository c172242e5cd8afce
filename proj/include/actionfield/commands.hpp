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

// Implementations behind the CLI subcommands. Each returns the list of
// files it wrote and echoes the resolved config as <command>.config.json in
// the output directory.

#include <span>
#include <string>
#include <vector>

#include "actionfield/config.hpp"
#include "actionfield/data.hpp"
#include "actionfield/model.hpp"
#include "actionfield/simctl.hpp"

namespace actionfield {

using OutputList = std::vector<std::string>;

OutputList cmd_generate(const RunConfig& cfg, const std::string& out_dir);
OutputList cmd_train(const RunConfig& cfg, const std::string& out_dir);
OutputList cmd_sample(const RunConfig& cfg, const std::string& out_dir);
OutputList cmd_simulate(const RunConfig& cfg, const std::string& out_dir);
OutputList cmd_compare(const RunConfig& cfg, const std::string& out_dir);

// "pos,vel,acc,jerk" in any order and subset.
DerivativeOrders parse_orders(const std::string& text);
std::string profile_csv_header(int dof, DerivativeOrders orders);
void write_profile_csv(const std::string& path, const KinematicProfile& p);

struct RepresentationRow {
  std::string name;
  double position_rmse = 0.0;
  double velocity_rmse = 0.0;
  // Velocity of the upsampled execution, read at the original grid points.
  double upsample_velocity_rmse = 0.0;
  double upsample_jerk_rms = 0.0;
};

struct RolloutRow {
  std::string controller;
  JitterMetrics metrics;
};

struct CompareReport {
  int chunks = 0;
  int upsample = 4;
  int bins = 256;
  std::vector<RepresentationRow> representations;
  std::vector<RolloutRow> rollouts;

  std::string to_markdown() const;
  std::string to_json() const;
};

// Averages over the first compare.max_chunks records of `dataset`, each of
// which must be a chunk the model was trained on.
CompareReport compare_representations(const Model& model,
                                      std::span<const ChunkRecord> dataset,
                                      const RunConfig& cfg);

}  // namespace actionfield
