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

#include "actionfield/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include "actionfield/baselines.hpp"
#include "actionfield/errors.hpp"

namespace actionfield {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void LossWeights::validate() const {
  const double ws[] = {position, velocity, acceleration, jerk};
  bool any = false;
  for (double x : ws) {
    if (!(x >= 0.0) || !std::isfinite(x))
      throw ConfigError("config.invalid:train.lambdas:negative");
    any = any || x > 0.0;
  }
  if (!any) throw ConfigError("config.invalid:train.lambdas:all_zero");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("config.invalid:train.lr");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0))
    throw ConfigError("config.invalid:train.betas");
  if (steps < 0) throw ConfigError("config.invalid:train.steps");
  if (batch_size < 1) throw ConfigError("config.invalid:train.batch");
  if (weight_decay < 0.0) throw ConfigError("config.invalid:train.weight_decay");
  if (jerk_grid != 0 && jerk_grid < 2) throw ConfigError("config.invalid:train.jerk_grid");
}

MatrixXd acceleration_targets(const ChunkRecord& chunk) {
  if (!chunk.velocities) throw ConfigError("config.missing_velocity_targets:" + chunk.id);
  return differentiate(*chunk.velocities, chunk.duration / (chunk.horizon() - 1));
}

namespace {

// Loss terms for one chunk and, when `grad` is set, the pull-back of
// scale * total onto the effective field parameters.
LossTerms evaluate_chunk(const ModulatedField& field, const ChunkRecord& chunk,
                         const LossWeights& w, int jerk_grid, double scale,
                         std::vector<FieldGrad>* grads) {
  const int k = chunk.horizon();
  if (k < 2) throw DataError("data.horizon_too_short:" + chunk.id);
  if (chunk.dim() != field.action_dim())
    throw DataError("data.dimension:D:id=" + chunk.id);
  const bool has_vel = chunk.velocities.has_value();
  if (w.needs_velocity_targets() && !has_vel)
    throw ConfigError("config.missing_velocity_targets:" + chunk.id);

  const double s = 2.0 / chunk.duration;
  const bool same_grid = jerk_grid == 0 || jerk_grid == k;
  const std::vector<double> tau = tau_grid(k);
  const int order = same_grid ? 3 : (has_vel && k >= 3 ? 2 : 0);
  FieldTape tape(field, tau, order);
  const auto& a = tape.output().derivs;

  LossTerms t;
  std::array<MatrixXd, 4> seed;
  const MatrixXd d0 = a[0] - chunk.positions.transpose();
  t.position = d0.squaredNorm() / k;
  if (grads && w.position > 0.0) seed[0] = (scale * w.position * 2.0 / k) * d0;

  if (has_vel) {
    const MatrixXd d1 = s * a[1] - chunk.velocities->transpose();
    t.velocity = d1.squaredNorm() / k;
    if (grads && w.velocity > 0.0) seed[1] = (scale * w.velocity * 2.0 / k * s) * d1;
    if (k >= 3) {
      const MatrixXd d2 = s * s * a[2] - acceleration_targets(chunk).transpose();
      t.acceleration = d2.squaredNorm() / k;
      if (grads && w.acceleration > 0.0)
        seed[2] = (scale * w.acceleration * 2.0 / k * s * s) * d2;
    } else if (w.acceleration > 0.0) {
      throw DataError("data.horizon_too_short_for_acc:" + chunk.id);
    }
  }

  const double s3 = s * s * s;
  if (same_grid) {
    const MatrixXd j = s3 * a[3];
    t.jerk = j.squaredNorm() / k;
    if (grads && w.jerk > 0.0) seed[3] = (scale * w.jerk * 2.0 / k * s3) * j;
  } else {
    const std::vector<double> tau_j = tau_grid(jerk_grid);
    FieldTape jtape(field, tau_j, 3);
    const MatrixXd j = s3 * jtape.output().derivs[3];
    t.jerk = j.squaredNorm() / jerk_grid;
    if (grads && w.jerk > 0.0) {
      std::array<MatrixXd, 4> jseed;
      jseed[3] = (scale * w.jerk * 2.0 / jerk_grid * s3) * j;
      grads->push_back(jtape.backward(jseed));
    }
  }
  t.total = w.position * t.position + w.velocity * t.velocity +
            w.acceleration * t.acceleration + w.jerk * t.jerk;
  if (grads) grads->push_back(tape.backward(seed));
  return t;
}

void add_terms(LossTerms& acc, const LossTerms& t, double scale) {
  acc.position += scale * t.position;
  acc.velocity += scale * t.velocity;
  acc.acceleration += scale * t.acceleration;
  acc.jerk += scale * t.jerk;
  acc.total += scale * t.total;
}

void check_batch(const Model& model, std::span<const ChunkRecord> batch,
                 std::span<const int> indices) {
  if (batch.size() != indices.size()) throw StructuralError("batch_indices");
  if (batch.empty()) throw DataError("data.empty_batch");
  for (int i : indices) {
    if (i < 0 || i >= static_cast<int>(model.chunks.size()))
      throw DataError("data.unknown_chunk:" + std::to_string(i));
  }
}

}  // namespace

double loss_pos(const ModulatedField& field, const ChunkRecord& chunk) {
  return evaluate_chunk(field, chunk, {1, 0, 0, 0}, 0, 1.0, nullptr).position;
}

double loss_vel(const ModulatedField& field, const ChunkRecord& chunk) {
  if (!chunk.velocities) throw ConfigError("config.missing_velocity_targets:" + chunk.id);
  return evaluate_chunk(field, chunk, {0, 1, 0, 0}, 0, 1.0, nullptr).velocity;
}

double loss_acc(const ModulatedField& field, const ChunkRecord& chunk) {
  if (!chunk.velocities) throw ConfigError("config.missing_velocity_targets:" + chunk.id);
  return evaluate_chunk(field, chunk, {0, 0, 1, 0}, 0, 1.0, nullptr).acceleration;
}

double loss_jerk(const ModulatedField& field, const ChunkRecord& chunk, int grid) {
  return evaluate_chunk(field, chunk, {0, 0, 0, 1}, grid, 1.0, nullptr).jerk;
}

LossTerms total_loss(const ModulatedField& field, const ChunkRecord& chunk,
                     const LossWeights& w, int jerk_grid) {
  w.validate();
  return evaluate_chunk(field, chunk, w, jerk_grid, 1.0, nullptr);
}

LossTerms batch_loss(const Model& model, std::span<const ChunkRecord> batch,
                     std::span<const int> indices, const LossWeights& w,
                     int jerk_grid) {
  check_batch(model, batch, indices);
  LossTerms acc;
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const ModulatedField field = model.field_for(indices[i]);
    add_terms(acc, evaluate_chunk(field, batch[i], w, jerk_grid, 1.0, nullptr), scale);
  }
  return acc;
}

GradResult grad_params(const Model& model, std::span<const ChunkRecord> batch,
                       std::span<const int> indices, const LossWeights& w,
                       int jerk_grid) {
  check_batch(model, batch, indices);
  GradResult out{LossTerms{}, zero_grad_like(model)};
  Model& g = out.grad;
  const double scale = 1.0 / static_cast<double>(batch.size());
  const int depth = model.arch.depth;

  for (std::size_t i = 0; i < batch.size(); ++i) {
    const int idx = indices[i];
    const LatentBlock z = model.latent_for(idx);
    const auto blocks = allocate_tokens(z, depth, model.arch.groups);
    const ModulationCoeffs mods = project_modulation(blocks, model.heads, model.meta);
    const ModulatedField field = modulate(model.meta, mods);

    std::vector<FieldGrad> fgs;
    add_terms(out.loss, evaluate_chunk(field, batch[i], w, jerk_grid, scale, &fgs), scale);

    ModulationCoeffs gmods = ModulationCoeffs::identity(model.meta);
    for (const FieldGrad& fg : fgs) {
      g.meta.output.weight += fg.output.weight;
      g.meta.output.bias += fg.output.bias;
      for (int l = 0; l < depth; ++l) {
        const auto& w_meta = model.meta.layers[l].weight;
        const MatrixXd& gw = fg.layers[l].weight;
        g.meta.layers[l].weight.array() += gw.array() * (1.0 + mods.gamma[l].array());
        g.meta.layers[l].bias += fg.layers[l].bias;
        gmods.gamma[l].array() += gw.array() * w_meta.array();
        gmods.beta[l] += fg.layers[l].bias;
      }
    }
    const LatentBlock gz = project_modulation_backward(blocks, model.heads, gmods, g.heads);
    if (model.mode == TrainMode::kEncoder) {
      encode_context_backward(*model.encoder, model.chunks[idx].context, gz, *g.encoder);
    } else {
      g.latents[idx].tokens += gz.tokens;
    }
  }
  return out;
}

std::vector<LossRecord> train_model(Model& model, std::span<const ChunkRecord> dataset,
                                    const TrainConfig& config, const LossWeights& w) {
  config.validate();
  w.validate();
  if (dataset.empty()) throw DataError("data.empty_dataset");
  if (dataset.size() != model.chunks.size()) throw StructuralError("dataset_model_chunks");

  std::vector<LossRecord> history;
  if (config.steps == 0) return history;
  history.reserve(config.steps);

  const std::size_t n = dataset.size();
  const std::size_t batch = std::min<std::size_t>(config.batch_size, n);
  std::mt19937_64 rng(config.seed);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = n;  // forces a shuffle before the first batch

  const std::size_t count = param_count(model);
  std::vector<double> m1(count, 0.0), m2(count, 0.0);
  std::vector<double> params = flatten_params(model);
  double pow1 = 1.0, pow2 = 1.0;

  std::vector<ChunkRecord> items;
  std::vector<int> indices;
  for (int step = 0; step < config.steps; ++step) {
    items.clear();
    indices.clear();
    while (indices.size() < batch) {
      if (cursor >= n) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      indices.push_back(order[cursor]);
      items.push_back(dataset[order[cursor]]);
      ++cursor;
    }

    const GradResult gr = grad_params(model, items, indices, w, config.jerk_grid);
    if (!std::isfinite(gr.loss.total))
      throw DivergenceError("numeric.divergence:step=" + std::to_string(step) + ":loss");
    history.push_back({step, gr.loss});

    const std::vector<double> grad = flatten_params(gr.grad);
    const double lr = config.learning_rate;
    if (config.optimizer == Optimizer::kSgd) {
      for (std::size_t i = 0; i < count; ++i) params[i] -= lr * grad[i];
    } else {
      pow1 *= config.beta1;
      pow2 *= config.beta2;
      const double c1 = 1.0 - pow1, c2 = 1.0 - pow2;
      for (std::size_t i = 0; i < count; ++i) {
        m1[i] = config.beta1 * m1[i] + (1.0 - config.beta1) * grad[i];
        m2[i] = config.beta2 * m2[i] + (1.0 - config.beta2) * grad[i] * grad[i];
        const double mhat = m1[i] / c1;
        const double vhat = m2[i] / c2;
        params[i] -= lr * (mhat / (std::sqrt(vhat) + config.epsilon) +
                           config.weight_decay * params[i]);
      }
    }
    assign_params(model, params);
    if (!all_finite(model))
      throw DivergenceError("numeric.divergence:step=" + std::to_string(step) + ":params");
  }
  return history;
}

FitResult fit(std::span<const ChunkRecord> dataset, const TrainConfig& config,
              const LossWeights& w, TrainMode mode, ModelArch arch) {
  if (dataset.empty()) throw DataError("data.empty_dataset");
  arch.activation = config.activation;
  FitResult r{init_model(arch, mode, dataset, config.seed), {}};
  r.history = train_model(r.model, dataset, config, w);
  return r;
}

double position_rmse(const ModulatedField& field, const ChunkRecord& chunk) {
  const FieldJet jet = eval_jet(field, tau_grid(chunk.horizon()), 0);
  const MatrixXd e = jet.derivs[0] - chunk.positions.transpose();
  return std::sqrt(e.squaredNorm() / static_cast<double>(e.size()));
}

double velocity_rmse(const ModulatedField& field, const ChunkRecord& chunk) {
  if (!chunk.velocities) throw ConfigError("config.missing_velocity_targets:" + chunk.id);
  const FieldJet jet = eval_jet(field, tau_grid(chunk.horizon()), 1);
  const MatrixXd e = (2.0 / chunk.duration) * jet.derivs[1] - chunk.velocities->transpose();
  return std::sqrt(e.squaredNorm() / static_cast<double>(e.size()));
}

void write_loss_history(const std::string& path, std::span<const LossRecord> history) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("io.unwritable:" + path);
  out << kLossCsvHeader << '\n';
  char buf[256];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.step,
                  r.terms.position, r.terms.velocity, r.terms.acceleration,
                  r.terms.jerk, r.terms.total);
    out << buf;
  }
}

}  // namespace actionfield
