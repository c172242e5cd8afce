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

#include "actionfield/hypermod.hpp"

#include <random>
#include <string>

#include "actionfield/errors.hpp"

namespace actionfield {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<LayerTokens> allocate_tokens(const LatentBlock& z, int depth,
                                         int groups) {
  if (depth < 1 || groups < 1)
    throw StructuralError("token_allocation:non_positive");
  const int stride = groups + 1;
  if (z.count() != token_count(depth, groups))
    throw StructuralError("token_count:Q=" + std::to_string(z.count()) +
                          ",expected=" + std::to_string(token_count(depth, groups)));
  std::vector<LayerTokens> blocks;
  blocks.reserve(depth);
  for (int l = 0; l < depth; ++l) {
    const int start = l * stride;
    blocks.push_back({z.tokens.middleRows(start, groups),
                      z.tokens.row(start + groups).transpose()});
  }
  return blocks;
}

LatentBlock concat_tokens(std::span<const LayerTokens> blocks) {
  if (blocks.empty()) return {};
  const Eigen::Index groups = blocks.front().weight_rows.rows();
  const Eigen::Index d = blocks.front().weight_rows.cols();
  LatentBlock z{MatrixXd(blocks.size() * (groups + 1), d)};
  for (std::size_t l = 0; l < blocks.size(); ++l) {
    const Eigen::Index start = static_cast<Eigen::Index>(l) * (groups + 1);
    z.tokens.middleRows(start, groups) = blocks[l].weight_rows;
    z.tokens.row(start + groups) = blocks[l].bias_row.transpose();
  }
  return z;
}

int Mlp::input_dim() const {
  return static_cast<int>(hidden ? hidden->weight.cols() : out.weight.cols());
}

VectorXd Mlp::forward(const VectorXd& x) const {
  if (!hidden) return out.weight * x + out.bias;
  const VectorXd a = (hidden->weight * x + hidden->bias).array().tanh().matrix();
  return out.weight * a + out.bias;
}

VectorXd Mlp::backward(const VectorXd& x, const VectorXd& grad_out,
                       Mlp& grad) const {
  if (!hidden) {
    grad.out.weight.noalias() += grad_out * x.transpose();
    grad.out.bias += grad_out;
    return out.weight.transpose() * grad_out;
  }
  const VectorXd a = (hidden->weight * x + hidden->bias).array().tanh().matrix();
  grad.out.weight.noalias() += grad_out * a.transpose();
  grad.out.bias += grad_out;
  const VectorXd ga = out.weight.transpose() * grad_out;
  const VectorXd gpre = (ga.array() * (1.0 - a.array().square())).matrix();
  grad.hidden->weight.noalias() += gpre * x.transpose();
  grad.hidden->bias += gpre;
  return hidden->weight.transpose() * gpre;
}

namespace {

Affine zero_affine(const Affine& a) {
  return {MatrixXd::Zero(a.weight.rows(), a.weight.cols()),
          VectorXd::Zero(a.bias.size())};
}

Affine make_affine(int out, int in, double scale, std::mt19937_64& rng) {
  Affine a{MatrixXd::Zero(out, in), VectorXd::Zero(out)};
  if (scale > 0.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (Eigen::Index j = 0; j < a.weight.cols(); ++j)
      for (Eigen::Index i = 0; i < a.weight.rows(); ++i) a.weight(i, j) = dist(rng);
  }
  return a;
}

// Hidden layers of heads are always randomly initialized so that a zero
// output layer still lets gradients reach them.
Mlp make_mlp(int in, int hidden, int out, double out_scale,
             std::mt19937_64& rng) {
  Mlp m;
  if (hidden > 0) {
    m.hidden = make_affine(hidden, in, std::sqrt(6.0 / in), rng);
    m.out = make_affine(out, hidden, out_scale, rng);
  } else {
    m.out = make_affine(out, in, out_scale, rng);
  }
  return m;
}

}  // namespace

Mlp zero_like(const Mlp& m) {
  Mlp z;
  if (m.hidden) z.hidden = zero_affine(*m.hidden);
  z.out = zero_affine(m.out);
  return z;
}

ProjectionHeads init_heads(const SirenMeta& meta, const HeadOptions& opts) {
  if (opts.groups < 1 || opts.latent_dim < 1 || opts.hidden < 0)
    throw ConfigError("config.invalid:arch:heads");
  std::mt19937_64 rng(opts.seed);
  ProjectionHeads heads;
  heads.groups = opts.groups;
  int fan_in = 1;
  for (const auto& layer : meta.layers) {
    const int rows = static_cast<int>(layer.weight.rows());
    if (rows % opts.groups != 0)
      throw ConfigError("config.invalid:arch.G:width_" + std::to_string(rows) +
                        "_not_divisible");
    const int per_group = (rows / opts.groups) * fan_in;
    LayerHeads lh;
    for (int g = 0; g < opts.groups; ++g)
      lh.gamma.push_back(make_mlp(opts.latent_dim, opts.hidden, per_group,
                                  opts.weight_scale, rng));
    lh.beta = make_mlp(opts.latent_dim, opts.hidden, rows, opts.weight_scale, rng);
    heads.layers.push_back(std::move(lh));
    fan_in = rows;
  }
  return heads;
}

ModulationCoeffs project_modulation(std::span<const LayerTokens> blocks,
                                    const ProjectionHeads& heads,
                                    const SirenMeta& meta) {
  if (blocks.size() != meta.layers.size() ||
      heads.layers.size() != meta.layers.size())
    throw StructuralError("heads_layer_count");
  ModulationCoeffs mods;
  const int groups = heads.groups;
  for (std::size_t l = 0; l < meta.layers.size(); ++l) {
    const auto& w = meta.layers[l].weight;
    const auto& lh = heads.layers[l];
    const Eigen::Index rows = w.rows(), cols = w.cols();
    if (rows % groups != 0 || static_cast<int>(lh.gamma.size()) != groups ||
        blocks[l].weight_rows.rows() != groups)
      throw StructuralError("heads_groups:layer=" + std::to_string(l));
    const Eigen::Index per = rows / groups;
    MatrixXd gamma(rows, cols);
    for (int g = 0; g < groups; ++g) {
      const VectorXd tok = blocks[l].weight_rows.row(g).transpose();
      if (lh.gamma[g].input_dim() != tok.size() ||
          lh.gamma[g].output_dim() != per * cols)
        throw StructuralError("gamma_head_shape:layer=" + std::to_string(l) +
                              ",group=" + std::to_string(g));
      const VectorXd y = lh.gamma[g].forward(tok);
      for (Eigen::Index i = 0; i < per; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
          gamma(g * per + i, j) = y(i * cols + j);
    }
    if (lh.beta.input_dim() != blocks[l].bias_row.size() ||
        lh.beta.output_dim() != rows)
      throw StructuralError("beta_head_shape:layer=" + std::to_string(l));
    mods.gamma.push_back(std::move(gamma));
    mods.beta.push_back(lh.beta.forward(blocks[l].bias_row));
  }
  return mods;
}

LatentBlock project_modulation_backward(std::span<const LayerTokens> blocks,
                                        const ProjectionHeads& heads,
                                        const ModulationCoeffs& grad_mods,
                                        ProjectionHeads& head_grad) {
  const int groups = heads.groups;
  std::vector<LayerTokens> grad_blocks;
  for (std::size_t l = 0; l < heads.layers.size(); ++l) {
    const auto& lh = heads.layers[l];
    auto& gh = head_grad.layers[l];
    const MatrixXd& gg = grad_mods.gamma[l];
    const Eigen::Index cols = gg.cols();
    const Eigen::Index per = gg.rows() / groups;
    LayerTokens gt{MatrixXd(groups, blocks[l].weight_rows.cols()), VectorXd()};
    for (int g = 0; g < groups; ++g) {
      VectorXd gy(per * cols);
      for (Eigen::Index i = 0; i < per; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
          gy(i * cols + j) = gg(g * per + i, j);
      const VectorXd tok = blocks[l].weight_rows.row(g).transpose();
      gt.weight_rows.row(g) = lh.gamma[g].backward(tok, gy, gh.gamma[g]).transpose();
    }
    gt.bias_row = lh.beta.backward(blocks[l].bias_row, grad_mods.beta[l], gh.beta);
    grad_blocks.push_back(std::move(gt));
  }
  return concat_tokens(grad_blocks);
}

ContextEncoder init_encoder(const EncoderOptions& opts) {
  if (opts.tokens < 1 || opts.latent_dim < 1 || opts.context_dim < 0 ||
      opts.hidden < 1)
    throw ConfigError("config.invalid:arch:encoder");
  std::mt19937_64 rng(opts.seed);
  ContextEncoder enc;
  enc.queries = MatrixXd(opts.tokens, opts.latent_dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index j = 0; j < enc.queries.cols(); ++j)
    for (Eigen::Index i = 0; i < enc.queries.rows(); ++i)
      enc.queries(i, j) = normal(rng);
  const int in = opts.context_dim + opts.latent_dim;
  enc.net = make_mlp(in, opts.hidden, opts.latent_dim,
                     std::sqrt(6.0 / opts.hidden), rng);
  return enc;
}

LatentBlock encode_context(const ContextEncoder& enc, const VectorXd& c) {
  if (c.size() != enc.context_dim())
    throw DataError("data.context_dim:got=" + std::to_string(c.size()) +
                    ",expected=" + std::to_string(enc.context_dim()));
  const Eigen::Index q = enc.queries.rows(), d = enc.queries.cols();
  LatentBlock z{MatrixXd(q, d)};
  VectorXd input(c.size() + d);
  input.head(c.size()) = c;
  for (Eigen::Index i = 0; i < q; ++i) {
    input.tail(d) = enc.queries.row(i).transpose();
    z.tokens.row(i) = enc.net.forward(input).transpose();
  }
  return z;
}

void encode_context_backward(const ContextEncoder& enc, const VectorXd& c,
                             const LatentBlock& grad_z, ContextEncoder& grad) {
  const Eigen::Index q = enc.queries.rows(), d = enc.queries.cols();
  VectorXd input(c.size() + d);
  input.head(c.size()) = c;
  for (Eigen::Index i = 0; i < q; ++i) {
    input.tail(d) = enc.queries.row(i).transpose();
    const VectorXd gin =
        enc.net.backward(input, grad_z.tokens.row(i).transpose(), grad.net);
    grad.queries.row(i) += gin.tail(d).transpose();
  }
}

ContextEncoder zero_like(const ContextEncoder& e) {
  return {MatrixXd::Zero(e.queries.rows(), e.queries.cols()), zero_like(e.net)};
}

ProjectionHeads zero_like(const ProjectionHeads& h) {
  ProjectionHeads z;
  z.groups = h.groups;
  for (const auto& l : h.layers) {
    LayerHeads lz;
    for (const auto& g : l.gamma) lz.gamma.push_back(zero_like(g));
    lz.beta = zero_like(l.beta);
    z.layers.push_back(std::move(lz));
  }
  return z;
}

std::vector<LatentBlock> auto_decoder_latents(int num_chunks, int tokens,
                                              int latent_dim) {
  std::vector<LatentBlock> table;
  table.reserve(num_chunks > 0 ? num_chunks : 0);
  for (int i = 0; i < num_chunks; ++i)
    table.push_back({MatrixXd::Zero(tokens, latent_dim)});
  return table;
}

}  // namespace actionfield
