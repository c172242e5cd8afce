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

// Context -> modulation coefficients: grouped token allocation over the
// latent sequence, per-group projection heads, a small context encoder and
// per-chunk auto-decoder latents.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "actionfield/field.hpp"

namespace actionfield {

// Q x d block of modulation latents, Q = L * (G + 1).
struct LatentBlock {
  Eigen::MatrixXd tokens;

  int count() const { return static_cast<int>(tokens.rows()); }
  int width() const { return static_cast<int>(tokens.cols()); }
};

inline int token_count(int depth, int groups) { return depth * (groups + 1); }

// Rows of one layer's block: `weight_rows` are G x d, `bias_row` is d.
struct LayerTokens {
  Eigen::MatrixXd weight_rows;
  Eigen::VectorXd bias_row;
};

std::vector<LayerTokens> allocate_tokens(const LatentBlock& z, int depth,
                                         int groups);

// Inverse of allocate_tokens.
LatentBlock concat_tokens(std::span<const LayerTokens> blocks);

// Affine map, optionally preceded by one tanh hidden layer.
struct Mlp {
  std::optional<Affine> hidden;
  Affine out;

  int input_dim() const;
  int output_dim() const { return static_cast<int>(out.weight.rows()); }
  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  // Accumulates parameter gradients into `grad` and returns dLoss/dx.
  Eigen::VectorXd backward(const Eigen::VectorXd& x,
                           const Eigen::VectorXd& grad_out, Mlp& grad) const;
};

Mlp zero_like(const Mlp& m);

struct LayerHeads {
  std::vector<Mlp> gamma;  // one per weight group
  Mlp beta;
};

// psi_gamma / psi_beta per hidden layer. Group g of layer l produces rows
// [g*n_l/G, (g+1)*n_l/G) of gamma^(l), flattened row-major.
struct ProjectionHeads {
  int groups = 1;
  std::vector<LayerHeads> layers;
};

struct HeadOptions {
  int groups = 1;
  int latent_dim = 32;
  int hidden = 0;  // 0 selects a single affine map
  // Scale of the uniform weight init; 0 gives all-zero heads. Bias terms
  // always start at zero.
  double weight_scale = 0.0;
  std::uint64_t seed = 0;
};

ProjectionHeads init_heads(const SirenMeta& meta, const HeadOptions& opts);

ModulationCoeffs project_modulation(std::span<const LayerTokens> blocks,
                                    const ProjectionHeads& heads,
                                    const SirenMeta& meta);

// Pulls dLoss/dgamma, dLoss/dbeta back through the heads. Head gradients
// accumulate into `head_grad`; the token gradient is returned.
LatentBlock project_modulation_backward(std::span<const LayerTokens> blocks,
                                        const ProjectionHeads& heads,
                                        const ModulationCoeffs& grad_mods,
                                        ProjectionHeads& head_grad);

// Learnable queries plus a two-layer tanh network applied to [c ; e_q] for
// every query token q.
struct ContextEncoder {
  Eigen::MatrixXd queries;  // Q x d
  Mlp net;                  // (C + d) -> hidden -> d

  int context_dim() const { return net.input_dim() - static_cast<int>(queries.cols()); }
};

struct EncoderOptions {
  int tokens = 2;
  int latent_dim = 32;
  int context_dim = 1;
  int hidden = 64;
  std::uint64_t seed = 0;
};

ContextEncoder init_encoder(const EncoderOptions& opts);

LatentBlock encode_context(const ContextEncoder& enc, const Eigen::VectorXd& c);

// Accumulates encoder parameter gradients given dLoss/dZ.
void encode_context_backward(const ContextEncoder& enc, const Eigen::VectorXd& c,
                             const LatentBlock& grad_z, ContextEncoder& grad);

ContextEncoder zero_like(const ContextEncoder& e);
ProjectionHeads zero_like(const ProjectionHeads& h);

// One zero-initialized latent block per chunk.
std::vector<LatentBlock> auto_decoder_latents(int num_chunks, int tokens,
                                              int latent_dim);

}  // namespace actionfield
