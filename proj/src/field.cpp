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

#include "actionfield/field.hpp"

#include <cmath>
#include <random>
#include <string>

#include "actionfield/errors.hpp"

namespace actionfield {

namespace {

using Eigen::ArrayXXd;
using Eigen::MatrixXd;

// Activation value and its first four derivatives, elementwise.
struct ActivationDerivs {
  std::array<ArrayXXd, 5> f;
};

ActivationDerivs activation_derivs(Activation act, const MatrixXd& z) {
  ActivationDerivs d;
  const ArrayXXd a = z.array();
  if (act == Activation::kSine) {
    const ArrayXXd s = a.sin();
    const ArrayXXd c = a.cos();
    d.f = {s, c, -s, -c, s};
  } else {
    const ArrayXXd zero = ArrayXXd::Zero(a.rows(), a.cols());
    d.f = {a.max(0.0), (a > 0.0).cast<double>(), zero, zero, zero};
  }
  return d;
}

// Faa di Bruno for a scalar activation composed with a tau-jet.
std::array<MatrixXd, 4> activate_jet(Activation act,
                                     const std::array<MatrixXd, 4>& z,
                                     int order) {
  const ActivationDerivs d = activation_derivs(act, z[0]);
  const auto& f = d.f;
  std::array<MatrixXd, 4> h;
  h[0] = f[0].matrix();
  if (order >= 1) {
    const ArrayXXd z1 = z[1].array();
    h[1] = (f[1] * z1).matrix();
    if (order >= 2) {
      const ArrayXXd z2 = z[2].array();
      h[2] = (f[2] * z1.square() + f[1] * z2).matrix();
      if (order >= 3) {
        const ArrayXXd z3 = z[3].array();
        h[3] = (f[3] * z1.cube() + 3.0 * f[2] * z1 * z2 + f[1] * z3).matrix();
      }
    }
  }
  return h;
}

void check_finite_tau(std::span<const double> tau) {
  for (double t : tau) {
    if (!std::isfinite(t)) throw DataError("field.non_finite_tau");
  }
}

}  // namespace

const char* activation_name(Activation a) {
  return a == Activation::kSine ? "sine" : "relu";
}

Activation parse_activation(const std::string& name) {
  if (name == "sine") return Activation::kSine;
  if (name == "relu") return Activation::kRelu;
  throw ConfigError("config.invalid:activation:" + name);
}

std::vector<int> SirenMeta::widths() const {
  std::vector<int> w;
  w.reserve(layers.size());
  for (const auto& l : layers) w.push_back(static_cast<int>(l.weight.rows()));
  return w;
}

SirenMeta init_siren(int depth, std::span<const int> widths, int action_dim,
                     double omega0, std::uint64_t seed, Activation activation) {
  if (depth < 1 || static_cast<int>(widths.size()) != depth || action_dim < 1)
    throw ConfigError("config.invalid:arch:non_positive_dimension");
  for (int w : widths) {
    if (w < 1) throw ConfigError("config.invalid:arch.widths:non_positive");
  }
  if (!(omega0 > 0.0) || !std::isfinite(omega0))
    throw ConfigError("config.invalid:arch.omega0:non_positive");

  std::mt19937_64 rng(seed);
  auto fill_uniform = [&rng](MatrixXd& m, double bound) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = dist(rng);
  };

  SirenMeta meta;
  meta.omega0 = omega0;
  meta.activation = activation;
  int fan_in = 1;
  for (int l = 0; l < depth; ++l) {
    Affine layer{MatrixXd(widths[l], fan_in), Eigen::VectorXd::Zero(widths[l])};
    const double bound = l == 0 ? 1.0 / fan_in
                                : std::sqrt(6.0 / fan_in) / omega0;
    fill_uniform(layer.weight, bound);
    meta.layers.push_back(std::move(layer));
    fan_in = widths[l];
  }
  meta.output = Affine{MatrixXd(action_dim, fan_in),
                       Eigen::VectorXd::Zero(action_dim)};
  fill_uniform(meta.output.weight, std::sqrt(6.0 / fan_in));
  return meta;
}

ModulationCoeffs ModulationCoeffs::identity(const SirenMeta& meta) {
  ModulationCoeffs m;
  for (const auto& l : meta.layers) {
    m.gamma.push_back(MatrixXd::Zero(l.weight.rows(), l.weight.cols()));
    m.beta.push_back(Eigen::VectorXd::Zero(l.bias.size()));
  }
  return m;
}

ModulatedField modulate(const SirenMeta& meta, const ModulationCoeffs& mods) {
  if (mods.gamma.size() != meta.layers.size() ||
      mods.beta.size() != meta.layers.size())
    throw StructuralError("modulation_layer_count");
  ModulatedField field;
  field.omega0 = meta.omega0;
  field.activation = meta.activation;
  field.output = meta.output;
  for (std::size_t l = 0; l < meta.layers.size(); ++l) {
    const auto& w = meta.layers[l].weight;
    const auto& g = mods.gamma[l];
    if (g.rows() != w.rows() || g.cols() != w.cols() ||
        mods.beta[l].size() != meta.layers[l].bias.size())
      throw StructuralError("modulation_shape:layer=" + std::to_string(l));
    Affine eff;
    eff.weight = (w.array() * (1.0 + g.array())).matrix();
    eff.bias = meta.layers[l].bias + mods.beta[l];
    field.layers.push_back(std::move(eff));
  }
  return field;
}

namespace {

// W * X evaluated one column at a time so that each column's rounding does
// not depend on how many columns are evaluated together.
MatrixXd per_column_product(const MatrixXd& w, const MatrixXd& x) {
  MatrixXd out(w.rows(), x.cols());
  for (Eigen::Index k = 0; k < x.cols(); ++k) out.col(k).noalias() = w * x.col(k);
  return out;
}

}  // namespace

FieldTape::FieldTape(const ModulatedField& field, std::span<const double> tau,
                     int order)
    : field_(&field), order_(order), points_(static_cast<int>(tau.size())) {
  check_finite_tau(tau);
  const int k = points_;
  const double w0 = field.omega0;

  std::array<MatrixXd, 4> h;
  h[0] = Eigen::Map<const Eigen::RowVectorXd>(tau.data(), k);
  h[1] = MatrixXd::Ones(1, k);
  h[2] = MatrixXd::Zero(1, k);
  h[3] = MatrixXd::Zero(1, k);

  for (const auto& layer : field.layers) {
    std::array<MatrixXd, 4> z;
    z[0] = w0 * (per_column_product(layer.weight, h[0]).colwise() + layer.bias);
    for (int n = 1; n <= order; ++n) z[n] = w0 * per_column_product(layer.weight, h[n]);
    inputs_.push_back(h);
    pre_.push_back(z);
    h = activate_jet(field.activation, z, order);
  }
  last_hidden_ = h;

  output_.order = order;
  const auto& out = field.output;
  output_.derivs[0] = per_column_product(out.weight, h[0]).colwise() + out.bias;
  for (int n = 1; n <= order; ++n) output_.derivs[n] = per_column_product(out.weight, h[n]);
}

FieldGrad FieldTape::backward(const std::array<MatrixXd, 4>& seed) const {
  const auto& field = *field_;
  const double w0 = field.omega0;
  const int order = order_;
  FieldGrad grad;
  grad.layers.resize(field.layers.size());

  auto has = [&](const std::array<MatrixXd, 4>& a, int n) {
    return n <= order && a[n].size() > 0;
  };

  grad.output.weight = MatrixXd::Zero(field.output.weight.rows(),
                                      field.output.weight.cols());
  grad.output.bias = Eigen::VectorXd::Zero(field.output.bias.size());
  std::array<MatrixXd, 4> gh;
  for (int n = 0; n <= order; ++n) {
    if (!has(seed, n)) continue;
    grad.output.weight.noalias() += seed[n] * last_hidden_[n].transpose();
    gh[n] = field.output.weight.transpose() * seed[n];
  }
  if (has(seed, 0)) grad.output.bias = seed[0].rowwise().sum();

  for (int l = static_cast<int>(field.layers.size()) - 1; l >= 0; --l) {
    const auto& z = pre_[l];
    const ActivationDerivs d = activation_derivs(field.activation, z[0]);
    const auto& f = d.f;
    const Eigen::Index rows = z[0].rows();
    const Eigen::Index cols = z[0].cols();
    auto arr = [&](const std::array<MatrixXd, 4>& a, int n) -> ArrayXXd {
      if (has(a, n)) return a[n].array();
      return ArrayXXd::Zero(rows, cols);
    };
    const ArrayXXd g0 = arr(gh, 0), g1 = arr(gh, 1), g2 = arr(gh, 2),
                   g3 = arr(gh, 3);
    const ArrayXXd z1 = arr(z, 1), z2 = arr(z, 2), z3 = arr(z, 3);

    std::array<ArrayXXd, 4> gz;
    gz[0] = g0 * f[1] + g1 * f[2] * z1 + g2 * (f[3] * z1.square() + f[2] * z2) +
            g3 * (f[4] * z1.cube() + 3.0 * f[3] * z1 * z2 + f[2] * z3);
    gz[1] = g1 * f[1] + 2.0 * g2 * f[2] * z1 +
            g3 * (3.0 * f[3] * z1.square() + 3.0 * f[2] * z2);
    gz[2] = g2 * f[1] + 3.0 * g3 * f[2] * z1;
    gz[3] = g3 * f[1];

    const auto& layer = field.layers[l];
    const auto& in = inputs_[l];
    auto& gl = grad.layers[l];
    gl.weight = MatrixXd::Zero(layer.weight.rows(), layer.weight.cols());
    for (int n = 0; n <= order; ++n)
      gl.weight.noalias() += w0 * (gz[n].matrix() * in[n].transpose());
    gl.bias = w0 * gz[0].matrix().rowwise().sum();

    if (l > 0) {
      for (int n = 0; n <= order; ++n)
        gh[n] = w0 * (layer.weight.transpose() * gz[n].matrix());
    }
  }
  return grad;
}

FieldJet eval_jet(const ModulatedField& field, std::span<const double> tau,
                  int order) {
  FieldTape tape(field, tau, order);
  return tape.output();
}

namespace {
Eigen::VectorXd eval_order(const ModulatedField& field, double tau, int order) {
  const double t[1] = {tau};
  return eval_jet(field, t, order).derivs[order].col(0);
}
}  // namespace

Eigen::VectorXd eval(const ModulatedField& field, double tau) {
  return eval_order(field, tau, 0);
}
Eigen::VectorXd eval_velocity(const ModulatedField& field, double tau) {
  return eval_order(field, tau, 1);
}
Eigen::VectorXd eval_acceleration(const ModulatedField& field, double tau) {
  return eval_order(field, tau, 2);
}
Eigen::VectorXd eval_jerk(const ModulatedField& field, double tau) {
  return eval_order(field, tau, 3);
}

std::vector<double> tau_grid(int count) {
  if (count < 2) throw ConfigError("config.invalid:K:less_than_2");
  std::vector<double> tau(count);
  for (int k = 0; k < count; ++k)
    tau[k] = -1.0 + (2.0 * k) / static_cast<double>(count - 1);
  return tau;
}

int DerivativeOrders::max_order() const {
  if (jerk) return 3;
  if (acceleration) return 2;
  if (velocity) return 1;
  return 0;
}

KinematicProfile sample_chunk(const ModulatedField& field, int count,
                              double duration, DerivativeOrders orders) {
  if (!(duration > 0.0)) throw ConfigError("config.invalid:T:non_positive");
  KinematicProfile p;
  p.tau = tau_grid(count);
  p.duration = duration;
  const FieldJet jet = eval_jet(field, p.tau, orders.max_order());
  const double scale = 2.0 / duration;
  if (orders.position) p.position = jet.derivs[0].transpose();
  if (orders.velocity) p.velocity = scale * jet.derivs[1].transpose();
  if (orders.acceleration)
    p.acceleration = scale * scale * jet.derivs[2].transpose();
  if (orders.jerk) p.jerk = scale * scale * scale * jet.derivs[3].transpose();
  return p;
}

}  // namespace actionfield
