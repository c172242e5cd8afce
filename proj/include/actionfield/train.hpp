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
#include <span>
#include <string>
#include <vector>

#include "actionfield/data.hpp"
#include "actionfield/field.hpp"
#include "actionfield/model.hpp"

namespace actionfield {

// Weights of the position / velocity / acceleration / jerk terms.
struct LossWeights {
  double position = 1.0;
  double velocity = 0.1;
  double acceleration = 0.01;
  double jerk = 0.001;

  void validate() const;
  bool needs_velocity_targets() const { return velocity > 0.0 || acceleration > 0.0; }
};

struct LossTerms {
  double position = 0.0;
  double velocity = 0.0;
  double acceleration = 0.0;
  double jerk = 0.0;
  double total = 0.0;
};

// Each loss is a mean over the chunk's H grid points of a squared norm,
// with tau-derivatives rescaled by (2/T)^n into physical units.
double loss_pos(const ModulatedField& field, const ChunkRecord& chunk);
double loss_vel(const ModulatedField& field, const ChunkRecord& chunk);
// Acceleration targets are central differences of the velocity targets.
double loss_acc(const ModulatedField& field, const ChunkRecord& chunk);
// Unsupervised; evaluated on `grid` points (0 selects the chunk's H).
double loss_jerk(const ModulatedField& field, const ChunkRecord& chunk, int grid = 0);
// Components that are not computable (missing velocity targets) are left
// at zero; `total` only includes weighted terms.
LossTerms total_loss(const ModulatedField& field, const ChunkRecord& chunk,
                     const LossWeights& w, int jerk_grid = 0);

Eigen::MatrixXd acceleration_targets(const ChunkRecord& chunk);

// Mean of total_loss over `batch`; batch[i] is trained as model chunk
// indices[i].
LossTerms batch_loss(const Model& model, std::span<const ChunkRecord> batch,
                     std::span<const int> indices, const LossWeights& w,
                     int jerk_grid = 0);

struct GradResult {
  LossTerms loss;
  Model grad;  // same layout as the model
};

// Exact reverse-mode gradient of batch_loss with respect to every trainable
// scalar in `model`.
GradResult grad_params(const Model& model, std::span<const ChunkRecord> batch,
                       std::span<const int> indices, const LossWeights& w,
                       int jerk_grid = 0);

enum class Optimizer { kAdamW, kSgd };

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.95;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
  int steps = 2000;
  int batch_size = 8;
  std::uint64_t seed = 0;
  Activation activation = Activation::kSine;
  Optimizer optimizer = Optimizer::kAdamW;
  int jerk_grid = 0;

  void validate() const;
};

struct LossRecord {
  int step = 0;
  LossTerms terms;
};

struct FitResult {
  Model model;
  std::vector<LossRecord> history;
};

// Runs config.steps optimizer updates on `model` in place. history[i] is
// the mini-batch loss before update i.
std::vector<LossRecord> train_model(Model& model, std::span<const ChunkRecord> dataset,
                                    const TrainConfig& config, const LossWeights& w);

FitResult fit(std::span<const ChunkRecord> dataset, const TrainConfig& config,
              const LossWeights& w, TrainMode mode, ModelArch arch);

// Error metrics against a chunk's stored targets, over all H x D entries.
double position_rmse(const ModulatedField& field, const ChunkRecord& chunk);
double velocity_rmse(const ModulatedField& field, const ChunkRecord& chunk);

inline constexpr const char* kLossCsvHeader = "step,L_pos,L_vel,L_acc,L_jerk,L_total";
void write_loss_history(const std::string& path, std::span<const LossRecord> history);

}  // namespace actionfield
