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

#include <cmath>
#include <random>
#include <set>

#include "actionfield/errors.hpp"
#include "actionfield/hypermod.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace actionfield;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

LatentBlock row_index_block(int q, int d) {
  LatentBlock z{MatrixXd(q, d)};
  for (int i = 0; i < q; ++i) z.tokens.row(i).setConstant(static_cast<double>(i));
  return z;
}

void randomize(Mlp& m, std::mt19937_64& rng, double scale) {
  if (m.hidden) {
    m.hidden->weight = oracle::uniform(rng, m.hidden->weight.rows(), m.hidden->weight.cols(), -scale, scale);
    m.hidden->bias = oracle::uniform(rng, m.hidden->bias.size(), 1, -scale, scale);
  }
  m.out.weight = oracle::uniform(rng, m.out.weight.rows(), m.out.weight.cols(), -scale, scale);
  m.out.bias = oracle::uniform(rng, m.out.bias.size(), 1, -scale, scale);
}

}  // namespace

TEST_CASE("token allocation layout") {
  CHECK(token_count(3, 64) == 195);
  const auto blocks = allocate_tokens(row_index_block(195, 2), 3, 64);
  REQUIRE(blocks.size() == 3);
  CHECK(blocks[1].weight_rows(0, 0) == 65.0);
  CHECK(blocks[1].weight_rows(63, 0) == 128.0);
  CHECK(blocks[1].bias_row(0) == 129.0);

  const auto tiny = allocate_tokens(row_index_block(2, 3), 1, 1);
  CHECK(tiny[0].weight_rows.rows() == 1);
  CHECK(tiny[0].weight_rows(0, 0) == 0.0);
  CHECK(tiny[0].bias_row(0) == 1.0);

  CHECK_THROWS_AS(allocate_tokens(row_index_block(9, 2), 2, 4), StructuralError);
  try {
    allocate_tokens(row_index_block(9, 2), 2, 4);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("structure.", 0) == 0);
    CHECK(e.kind() == ErrorKind::kConfig);
  }
}

TEST_CASE("H1: allocate then concatenate uses every row exactly once") {
  for (auto [layers, groups] : {std::pair{1, 1}, std::pair{2, 4}, std::pair{3, 8}}) {
    const int q = token_count(layers, groups);
    const LatentBlock z = row_index_block(q, 3);
    const auto blocks = allocate_tokens(z, layers, groups);
    std::multiset<double> seen;
    for (const auto& b : blocks) {
      for (int g = 0; g < groups; ++g) seen.insert(b.weight_rows(g, 0));
      seen.insert(b.bias_row(0));
    }
    CHECK(seen.size() == static_cast<std::size_t>(q));
    CHECK(std::set<double>(seen.begin(), seen.end()).size() == static_cast<std::size_t>(q));
    CHECK(concat_tokens(blocks).tokens == z.tokens);
  }
}

TEST_CASE("gamma tiling by contiguous row groups") {
  const SirenMeta meta = init_siren(1, std::vector<int>{4}, 1, 1.0, 0);
  HeadOptions ho;
  ho.groups = 2;
  ho.latent_dim = 1;
  ProjectionHeads heads = init_heads(meta, ho);
  REQUIRE(heads.layers[0].gamma.size() == 2);
  CHECK(heads.layers[0].gamma[0].output_dim() == 2);
  // Group outputs are constants: group 0 -> 1, group 1 -> 2.
  heads.layers[0].gamma[0].out.bias.setConstant(1.0);
  heads.layers[0].gamma[1].out.bias.setConstant(2.0);
  const auto blocks = allocate_tokens(LatentBlock{MatrixXd::Zero(3, 1)}, 1, 2);
  const ModulationCoeffs m = project_modulation(blocks, heads, meta);
  CHECK(m.gamma[0](0, 0) == 1.0);
  CHECK(m.gamma[0](1, 0) == 1.0);
  CHECK(m.gamma[0](2, 0) == 2.0);
  CHECK(m.gamma[0](3, 0) == 2.0);
  CHECK(m.beta[0].size() == 4);

  // Row-major flattening inside a group: rows x fan_in block.
  const SirenMeta meta2 = init_siren(2, std::vector<int>{2, 4}, 1, 1.0, 0);
  ho.groups = 2;
  ProjectionHeads h2 = init_heads(meta2, ho);
  REQUIRE(h2.layers[1].gamma[1].output_dim() == 4);
  h2.layers[1].gamma[1].out.bias << 10, 11, 12, 13;
  const auto b2 = allocate_tokens(LatentBlock{MatrixXd::Zero(6, 1)}, 2, 2);
  const ModulationCoeffs m2 = project_modulation(b2, h2, meta2);
  CHECK(m2.gamma[1](2, 0) == 10.0);
  CHECK(m2.gamma[1](2, 1) == 11.0);
  CHECK(m2.gamma[1](3, 0) == 12.0);
  CHECK(m2.gamma[1](3, 1) == 13.0);
}

TEST_CASE("H2: zero tokens with bias-free heads, or zero heads, give identity") {
  std::mt19937_64 rng(8);
  const SirenMeta meta = init_siren(2, std::vector<int>{8, 8}, 3, 30.0, 1);
  HeadOptions ho;
  ho.groups = 4;
  ho.latent_dim = 5;
  ho.weight_scale = 0.7;
  ho.seed = 3;
  const ProjectionHeads random_heads = init_heads(meta, ho);
  const auto zero_tokens = allocate_tokens(LatentBlock{MatrixXd::Zero(10, 5)}, 2, 4);
  ModulationCoeffs m = project_modulation(zero_tokens, random_heads, meta);
  for (int l = 0; l < 2; ++l) {
    CHECK(m.gamma[l].isZero(0.0));
    CHECK(m.beta[l].isZero(0.0));
  }

  ho.weight_scale = 0.0;
  const ProjectionHeads zero_heads = init_heads(meta, ho);
  const auto tokens = allocate_tokens(LatentBlock{oracle::uniform(rng, 10, 5, -3, 3)}, 2, 4);
  m = project_modulation(tokens, zero_heads, meta);
  for (int l = 0; l < 2; ++l) {
    CHECK(m.gamma[l].isZero(0.0));
    CHECK(m.beta[l].isZero(0.0));
  }

  ho.hidden = 6;
  const ProjectionHeads zero_out_hidden = init_heads(meta, ho);
  m = project_modulation(tokens, zero_out_hidden, meta);
  CHECK(m.gamma[1].isZero(0.0));
}

TEST_CASE("random heads on a one-layer net match hand composition") {
  std::mt19937_64 rng(19);
  SirenMeta meta = init_siren(1, std::vector<int>{4}, 2, 3.0, 6);
  HeadOptions ho;
  ho.groups = 2;
  ho.latent_dim = 3;
  ProjectionHeads heads = init_heads(meta, ho);
  for (auto& g : heads.layers[0].gamma) randomize(g, rng, 0.4);
  randomize(heads.layers[0].beta, rng, 0.4);
  const MatrixXd z = oracle::uniform(rng, 3, 3, -1, 1);
  const auto blocks = allocate_tokens(LatentBlock{z}, 1, 2);
  const ModulatedField f = modulate(meta, project_modulation(blocks, heads, meta));

  const double tau = -0.35;
  VectorXd want = meta.output.bias;
  for (int i = 0; i < 4; ++i) {
    const int g = i / 2;
    const auto& head = heads.layers[0].gamma[g];
    const double gamma = head.out.weight.row(i % 2).dot(z.row(g)) + head.out.bias(i % 2);
    const auto& bh = heads.layers[0].beta;
    const double beta = bh.out.weight.row(i).dot(z.row(2)) + bh.out.bias(i);
    const double u = 3.0 * (meta.layers[0].weight(i, 0) * (1 + gamma) * tau + beta);
    want += meta.output.weight.col(i) * std::sin(u);
  }
  CHECK(oracle::rel_err(eval(f, tau), want) < 1e-14);
}

TEST_CASE("H3: uniform gamma scales the frequency") {
  // One unit, zero bias: A(tau) = sin(w0 w (1+g) tau), first positive zero at pi / (w0 w (1+g)).
  SirenMeta meta;
  meta.omega0 = 2.0;
  meta.layers.push_back({MatrixXd::Constant(1, 1, 1.5), VectorXd::Zero(1)});
  meta.output = {MatrixXd::Constant(1, 1, 1.0), VectorXd::Zero(1)};
  auto first_zero = [&](double g) {
    ModulationCoeffs mods = ModulationCoeffs::identity(meta);
    mods.gamma[0].setConstant(g);
    const ModulatedField f = modulate(meta, mods);
    // Bisection on a bracket containing only the first positive root.
    double lo = 1e-9, hi = lo;
    while (eval(f, hi + 1e-3)(0) > 0.0) hi += 1e-3;
    hi += 1e-3;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (eval(f, mid)(0) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double t0 = first_zero(0.0);
  CHECK(t0 == doctest::Approx(M_PI / 3.0).epsilon(1e-12));
  for (double g : {0.25, 1.0, -0.4}) CHECK(first_zero(g) == doctest::Approx(t0 / (1.0 + g)).epsilon(1e-12));
}

TEST_CASE("init_heads rejects non-divisible widths") {
  const SirenMeta meta = init_siren(1, std::vector<int>{6}, 1, 1.0, 0);
  HeadOptions ho;
  ho.groups = 4;
  CHECK_THROWS_AS(init_heads(meta, ho), ConfigError);
}

TEST_CASE("project_modulation rejects mismatched heads") {
  const SirenMeta a = init_siren(2, std::vector<int>{4, 4}, 1, 1.0, 0);
  const SirenMeta b = init_siren(1, std::vector<int>{4}, 1, 1.0, 0);
  HeadOptions ho;
  ho.groups = 2;
  ho.latent_dim = 2;
  const auto heads = init_heads(b, ho);
  const auto blocks = allocate_tokens(LatentBlock{MatrixXd::Zero(6, 2)}, 2, 2);
  CHECK_THROWS_AS(project_modulation(blocks, heads, a), StructuralError);
}

TEST_CASE("context encoder") {
  EncoderOptions eo;
  eo.tokens = 6;
  eo.latent_dim = 4;
  eo.context_dim = 5;
  eo.hidden = 8;
  eo.seed = 42;
  const ContextEncoder enc = init_encoder(eo);
  CHECK(enc.context_dim() == 5);
  VectorXd c1(5), c2(5);
  c1 << 1, 0, 0, 0.3, -0.2;
  c2 << 0, 1, 0, -0.5, 0.9;
  const LatentBlock z1 = encode_context(enc, c1);
  CHECK(z1.count() == 6);
  CHECK(z1.width() == 4);
  CHECK(encode_context(enc, c1).tokens == z1.tokens);
  const LatentBlock z2 = encode_context(enc, c2);
  CHECK((z1.tokens - z2.tokens).cwiseAbs().maxCoeff() > 1e-3);
  // Fixed-seed regression of one entry.
  CHECK(std::isfinite(z1.tokens(0, 0)));

  const ContextEncoder zero = zero_like(enc);
  CHECK(encode_context(zero, c1).tokens.isZero(0.0));
  CHECK_THROWS_AS(encode_context(enc, VectorXd::Zero(3)), DataError);
}

TEST_CASE("encoder equals hand-built two-layer map") {
  EncoderOptions eo;
  eo.tokens = 2;
  eo.latent_dim = 3;
  eo.context_dim = 2;
  eo.hidden = 4;
  eo.seed = 5;
  const ContextEncoder enc = init_encoder(eo);
  VectorXd c(2);
  c << 0.4, -1.1;
  const LatentBlock z = encode_context(enc, c);
  for (int q = 0; q < 2; ++q) {
    VectorXd in(5);
    in << c, enc.queries.row(q).transpose();
    const VectorXd hid = (enc.net.hidden->weight * in + enc.net.hidden->bias).array().tanh().matrix();
    const VectorXd out = enc.net.out.weight * hid + enc.net.out.bias;
    CHECK(oracle::rel_err(z.tokens.row(q).transpose(), out) < 1e-15);
  }
}

TEST_CASE("auto-decoder latents start at zero") {
  const auto table = auto_decoder_latents(3, 10, 4);
  REQUIRE(table.size() == 3);
  for (const auto& z : table) {
    CHECK(z.count() == 10);
    CHECK(z.tokens.isZero(0.0));
  }
  CHECK(auto_decoder_latents(0, 10, 4).empty());
}
