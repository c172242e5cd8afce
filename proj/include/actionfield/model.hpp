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

// Everything trainable in one value: shared meta-parameters, projection
// heads, and either a context encoder or a table of per-chunk latents.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "actionfield/data.hpp"
#include "actionfield/field.hpp"
#include "actionfield/hypermod.hpp"

namespace actionfield {

enum class TrainMode { kAutoDecoder, kEncoder };

const char* mode_name(TrainMode m);
TrainMode parse_mode(const std::string& name);

struct ModelArch {
  int depth = 3;
  std::vector<int> widths{64, 64, 64};
  int action_dim = 7;
  double omega0 = 30.0;
  int groups = 64;
  int latent_dim = 32;
  int head_hidden = 0;
  int encoder_hidden = 64;
  Activation activation = Activation::kSine;

  int tokens() const { return token_count(depth, groups); }
  void validate() const;
};

// What the model remembers about each training chunk.
struct ChunkSlot {
  std::string id;
  double duration = 1.0;
  Eigen::VectorXd context;
  std::optional<Eigen::VectorXd> offset;
};

struct Model {
  ModelArch arch;
  TrainMode mode = TrainMode::kAutoDecoder;
  SirenMeta meta;
  ProjectionHeads heads;
  std::optional<ContextEncoder> encoder;
  std::vector<LatentBlock> latents;  // auto-decoder mode only
  std::vector<ChunkSlot> chunks;

  // -1 when absent.
  int chunk_index(const std::string& id) const;
  LatentBlock latent_for(int chunk) const;
  ModulationCoeffs modulation_for(int chunk) const;
  ModulatedField field_for(int chunk) const;
  // Encoder mode only: field for an arbitrary context vector.
  ModulatedField field_for_context(const Eigen::VectorXd& context) const;
};

// Initial state is the identity modulation for every chunk. In encoder mode
// the heads start at zero; in auto-decoder mode the latents start at zero
// and the head weights are small and random so gradients reach both.
Model init_model(const ModelArch& arch, TrainMode mode,
                 std::span<const ChunkRecord> chunks, std::uint64_t seed);

namespace detail {
template <class A, class F>
void visit_affine(A& a, F& f) {
  f(a.weight);
  f(a.bias);
}
template <class M, class F>
void visit_mlp(M& m, F& f) {
  if (m.hidden) visit_affine(*m.hidden, f);
  visit_affine(m.out, f);
}
}  // namespace detail

// Calls f on every trainable Eigen array in a fixed order. Works for const
// and mutable models; a gradient Model visits in the same order.
template <class ModelT, class F>
void visit_params(ModelT& m, F&& f) {
  for (auto& l : m.meta.layers) detail::visit_affine(l, f);
  detail::visit_affine(m.meta.output, f);
  for (auto& lh : m.heads.layers) {
    for (auto& g : lh.gamma) detail::visit_mlp(g, f);
    detail::visit_mlp(lh.beta, f);
  }
  if (m.encoder) {
    f(m.encoder->queries);
    detail::visit_mlp(m.encoder->net, f);
  }
  for (auto& z : m.latents) f(z.tokens);
}

std::size_t param_count(const Model& m);
std::vector<double> flatten_params(const Model& m);
void assign_params(Model& m, std::span<const double> values);
Model zero_grad_like(const Model& m);
bool all_finite(const Model& m);

inline constexpr int kCheckpointFormatVersion = 1;

void save_checkpoint(const std::string& path, const Model& m);
Model load_checkpoint(const std::string& path);

}  // namespace actionfield
