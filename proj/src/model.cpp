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

#include "actionfield/model.hpp"

#include <cmath>
#include <fstream>

#include "actionfield/errors.hpp"
#include "json.hpp"

namespace actionfield {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

const char* mode_name(TrainMode m) {
  return m == TrainMode::kAutoDecoder ? "auto_decoder" : "encoder";
}

TrainMode parse_mode(const std::string& name) {
  if (name == "auto_decoder") return TrainMode::kAutoDecoder;
  if (name == "encoder") return TrainMode::kEncoder;
  throw ConfigError("config.invalid:train.mode:" + name);
}

void ModelArch::validate() const {
  if (depth < 1 || static_cast<int>(widths.size()) != depth)
    throw ConfigError("config.invalid:arch.widths:length_must_equal_L");
  if (action_dim < 1) throw ConfigError("config.invalid:arch.D:non_positive");
  if (groups < 1) throw ConfigError("config.invalid:arch.G:non_positive");
  if (latent_dim < 1) throw ConfigError("config.invalid:arch.d:non_positive");
  for (int w : widths) {
    if (w < 1) throw ConfigError("config.invalid:arch.widths:non_positive");
    if (w % groups != 0)
      throw ConfigError("config.invalid:arch.G:width_not_divisible");
  }
}

int Model::chunk_index(const std::string& id) const {
  for (std::size_t i = 0; i < chunks.size(); ++i)
    if (chunks[i].id == id) return static_cast<int>(i);
  return -1;
}

LatentBlock Model::latent_for(int chunk) const {
  if (chunk < 0 || chunk >= static_cast<int>(chunks.size()))
    throw DataError("data.unknown_chunk:" + std::to_string(chunk));
  if (mode == TrainMode::kEncoder)
    return encode_context(*encoder, chunks[chunk].context);
  return latents[chunk];
}

ModulationCoeffs Model::modulation_for(int chunk) const {
  const LatentBlock z = latent_for(chunk);
  const auto blocks = allocate_tokens(z, arch.depth, arch.groups);
  return project_modulation(blocks, heads, meta);
}

ModulatedField Model::field_for(int chunk) const {
  return modulate(meta, modulation_for(chunk));
}

ModulatedField Model::field_for_context(const VectorXd& context) const {
  if (!encoder) throw ConfigError("config.invalid:train.mode:needs_encoder");
  const LatentBlock z = encode_context(*encoder, context);
  const auto blocks = allocate_tokens(z, arch.depth, arch.groups);
  return modulate(meta, project_modulation(blocks, heads, meta));
}

Model init_model(const ModelArch& arch, TrainMode mode,
                 std::span<const ChunkRecord> chunks, std::uint64_t seed) {
  arch.validate();
  Model m;
  m.arch = arch;
  m.mode = mode;
  m.meta = init_siren(arch.depth, arch.widths, arch.action_dim, arch.omega0,
                      seed, arch.activation);
  HeadOptions ho;
  ho.groups = arch.groups;
  ho.latent_dim = arch.latent_dim;
  ho.hidden = arch.head_hidden;
  ho.seed = seed + 1;
  ho.weight_scale = mode == TrainMode::kAutoDecoder
                        ? 1.0 / std::sqrt(static_cast<double>(arch.latent_dim))
                        : 0.0;
  m.heads = init_heads(m.meta, ho);

  int cdim = -1;
  for (const auto& c : chunks) {
    if (c.dim() != arch.action_dim)
      throw DataError("data.dimension:D:id=" + c.id);
    if (cdim < 0) cdim = static_cast<int>(c.context.size());
    if (c.context.size() != cdim) throw DataError("data.dimension:context:id=" + c.id);
    m.chunks.push_back({c.id, c.duration, c.context, c.offset});
  }
  if (mode == TrainMode::kEncoder) {
    EncoderOptions eo;
    eo.tokens = arch.tokens();
    eo.latent_dim = arch.latent_dim;
    eo.context_dim = cdim < 0 ? context_dim(arch.action_dim) : cdim;
    eo.hidden = arch.encoder_hidden;
    eo.seed = seed + 2;
    m.encoder = init_encoder(eo);
  } else {
    m.latents = auto_decoder_latents(static_cast<int>(chunks.size()),
                                     arch.tokens(), arch.latent_dim);
  }
  return m;
}

std::size_t param_count(const Model& m) {
  std::size_t n = 0;
  visit_params(m, [&](const auto& a) { n += static_cast<std::size_t>(a.size()); });
  return n;
}

std::vector<double> flatten_params(const Model& m) {
  std::vector<double> out;
  out.reserve(param_count(m));
  visit_params(m, [&](const auto& a) {
    out.insert(out.end(), a.data(), a.data() + a.size());
  });
  return out;
}

void assign_params(Model& m, std::span<const double> values) {
  if (values.size() != param_count(m)) throw StructuralError("param_count");
  std::size_t pos = 0;
  visit_params(m, [&](auto& a) {
    std::copy_n(values.begin() + pos, a.size(), a.data());
    pos += static_cast<std::size_t>(a.size());
  });
}

Model zero_grad_like(const Model& m) {
  Model g = m;
  visit_params(g, [](auto& a) { a.setZero(); });
  return g;
}

bool all_finite(const Model& m) {
  bool ok = true;
  visit_params(m, [&](const auto& a) { ok = ok && a.allFinite(); });
  return ok;
}

namespace {

json mat_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vec_json(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

MatrixXd json_mat(const json& j) {
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols)
      throw DataError("checkpoint.ragged_matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

VectorXd json_vec(const json& j) {
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

json affine_json(const Affine& a) {
  return {{"W", mat_json(a.weight)}, {"b", vec_json(a.bias)}};
}

Affine json_affine(const json& j) {
  return {json_mat(j.at("W")), json_vec(j.at("b"))};
}

json mlp_json(const Mlp& m) {
  json j;
  j["hidden"] = m.hidden ? affine_json(*m.hidden) : json(nullptr);
  j["out"] = affine_json(m.out);
  return j;
}

Mlp json_mlp(const json& j) {
  Mlp m;
  if (!j.at("hidden").is_null()) m.hidden = json_affine(j.at("hidden"));
  m.out = json_affine(j.at("out"));
  return m;
}

}  // namespace

void save_checkpoint(const std::string& path, const Model& m) {
  json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["architecture"] = {{"L", m.arch.depth},
                       {"widths", m.arch.widths},
                       {"D", m.arch.action_dim},
                       {"omega0", m.arch.omega0},
                       {"G", m.arch.groups},
                       {"d", m.arch.latent_dim},
                       {"head_hidden", m.arch.head_hidden},
                       {"encoder_hidden", m.arch.encoder_hidden},
                       {"activation", activation_name(m.arch.activation)}};
  j["mode"] = mode_name(m.mode);

  json layers = json::array();
  for (const auto& l : m.meta.layers) layers.push_back(affine_json(l));
  j["meta"] = {{"layers", layers},
               {"w_out", mat_json(m.meta.output.weight)},
               {"b_out", vec_json(m.meta.output.bias)}};

  json heads = json::array();
  for (const auto& lh : m.heads.layers) {
    json gamma = json::array();
    for (const auto& g : lh.gamma) gamma.push_back(mlp_json(g));
    heads.push_back({{"gamma", gamma}, {"beta", mlp_json(lh.beta)}});
  }
  j["heads"] = {{"groups", m.heads.groups}, {"layers", heads}};

  j["encoder"] = m.encoder ? json{{"queries", mat_json(m.encoder->queries)},
                                  {"net", mlp_json(m.encoder->net)}}
                           : json(nullptr);

  json chunks = json::array();
  for (std::size_t i = 0; i < m.chunks.size(); ++i) {
    const auto& c = m.chunks[i];
    json cj = {{"id", c.id}, {"T", c.duration}, {"context", vec_json(c.context)}};
    if (c.offset) cj["offset"] = vec_json(*c.offset);
    if (m.mode == TrainMode::kAutoDecoder) cj["latent"] = mat_json(m.latents[i].tokens);
    chunks.push_back(std::move(cj));
  }
  j["chunks"] = chunks;

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("checkpoint.unwritable:" + path);
  out << j.dump(1) << '\n';
}

Model load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("checkpoint.unreadable:" + path);
  Model m;
  try {
    const json j = json::parse(in);
    if (j.at("format_version").get<int>() != kCheckpointFormatVersion)
      throw DataError("checkpoint.format_version");
    const json& a = j.at("architecture");
    m.arch.depth = a.at("L").get<int>();
    m.arch.widths = a.at("widths").get<std::vector<int>>();
    m.arch.action_dim = a.at("D").get<int>();
    m.arch.omega0 = a.at("omega0").get<double>();
    m.arch.groups = a.at("G").get<int>();
    m.arch.latent_dim = a.at("d").get<int>();
    m.arch.head_hidden = a.at("head_hidden").get<int>();
    m.arch.encoder_hidden = a.at("encoder_hidden").get<int>();
    m.arch.activation = parse_activation(a.at("activation").get<std::string>());
    m.arch.validate();
    m.mode = parse_mode(j.at("mode").get<std::string>());

    const json& meta = j.at("meta");
    for (const auto& l : meta.at("layers")) m.meta.layers.push_back(json_affine(l));
    m.meta.output = {json_mat(meta.at("w_out")), json_vec(meta.at("b_out"))};
    m.meta.omega0 = m.arch.omega0;
    m.meta.activation = m.arch.activation;

    const json& heads = j.at("heads");
    m.heads.groups = heads.at("groups").get<int>();
    for (const auto& lj : heads.at("layers")) {
      LayerHeads lh;
      for (const auto& g : lj.at("gamma")) lh.gamma.push_back(json_mlp(g));
      lh.beta = json_mlp(lj.at("beta"));
      m.heads.layers.push_back(std::move(lh));
    }
    if (!j.at("encoder").is_null()) {
      const json& e = j.at("encoder");
      m.encoder = ContextEncoder{json_mat(e.at("queries")), json_mlp(e.at("net"))};
    }
    for (const auto& cj : j.at("chunks")) {
      ChunkSlot c;
      c.id = cj.at("id").get<std::string>();
      c.duration = cj.at("T").get<double>();
      c.context = json_vec(cj.at("context"));
      if (cj.contains("offset")) c.offset = json_vec(cj.at("offset"));
      if (m.mode == TrainMode::kAutoDecoder)
        m.latents.push_back({json_mat(cj.at("latent"))});
      m.chunks.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint.malformed:") + path);
  }
  if (static_cast<int>(m.meta.layers.size()) != m.arch.depth ||
      m.meta.widths() != m.arch.widths || m.meta.action_dim() != m.arch.action_dim)
    throw DataError("checkpoint.inconsistent_architecture");
  if (m.mode == TrainMode::kEncoder && !m.encoder)
    throw DataError("checkpoint.missing_encoder");
  return m;
}

}  // namespace actionfield
