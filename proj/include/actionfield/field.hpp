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

// Modulated sinusoidal implicit decoder: maps normalized chunk time
// tau in [-1, 1] to an action vector, with exact derivatives up to jerk.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace actionfield {

enum class Activation { kSine, kRelu };

const char* activation_name(Activation a);
Activation parse_activation(const std::string& name);

// y = weight * x + bias.
struct Affine {
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;
};

// Shared meta-parameters. Hidden layer l maps n_{l-1} -> n_l with n_0 = 1.
struct SirenMeta {
  std::vector<Affine> layers;
  Affine output;
  double omega0 = 30.0;
  Activation activation = Activation::kSine;

  int depth() const { return static_cast<int>(layers.size()); }
  int action_dim() const { return static_cast<int>(output.weight.rows()); }
  std::vector<int> widths() const;
};

SirenMeta init_siren(int depth, std::span<const int> widths, int action_dim,
                     double omega0, std::uint64_t seed,
                     Activation activation = Activation::kSine);

// Instance-specific deformation of the hidden layers. gamma[l] has the
// shape of layers[l].weight, beta[l] the shape of layers[l].bias.
struct ModulationCoeffs {
  std::vector<Eigen::MatrixXd> gamma;
  std::vector<Eigen::VectorXd> beta;

  static ModulationCoeffs identity(const SirenMeta& meta);
};

// Effective parameters of one trajectory's field. The output layer is
// passed through from the meta-parameters unmodulated.
struct ModulatedField {
  std::vector<Affine> layers;
  Affine output;
  double omega0 = 30.0;
  Activation activation = Activation::kSine;

  int action_dim() const { return static_cast<int>(output.weight.rows()); }
};

ModulatedField modulate(const SirenMeta& meta, const ModulationCoeffs& mods);

// Derivatives of the field output with respect to tau, one column per
// query point: derivs[n] is D x K and holds d^n A / d tau^n for n <= order.
struct FieldJet {
  int order = 0;
  std::array<Eigen::MatrixXd, 4> derivs;
};

FieldJet eval_jet(const ModulatedField& field, std::span<const double> tau,
                  int order);

Eigen::VectorXd eval(const ModulatedField& field, double tau);
Eigen::VectorXd eval_velocity(const ModulatedField& field, double tau);
Eigen::VectorXd eval_acceleration(const ModulatedField& field, double tau);
Eigen::VectorXd eval_jerk(const ModulatedField& field, double tau);

// Gradient of a scalar loss with respect to the effective parameters.
struct FieldGrad {
  std::vector<Affine> layers;
  Affine output;
};

// Records the forward jet pass so that a loss expressed on the output jet
// can be pulled back to the effective parameters (reverse mode through the
// derivative recursion).
class FieldTape {
 public:
  FieldTape(const ModulatedField& field, std::span<const double> tau, int order);

  const FieldJet& output() const { return output_; }

  // `seed[n]` is dLoss/d(derivs[n]); entries above `order` are ignored.
  FieldGrad backward(const std::array<Eigen::MatrixXd, 4>& seed) const;

 private:
  const ModulatedField* field_;
  int order_;
  int points_;
  // inputs_[l][n]: n-th tau-derivative of the input to hidden layer l.
  std::vector<std::array<Eigen::MatrixXd, 4>> inputs_;
  // pre_[l][n]: n-th tau-derivative of omega0 * (W h + b) at layer l.
  std::vector<std::array<Eigen::MatrixXd, 4>> pre_;
  std::array<Eigen::MatrixXd, 4> last_hidden_;
  FieldJet output_;
};

// Uniform query grid tau_k = -1 + 2k/(K-1).
std::vector<double> tau_grid(int count);

struct DerivativeOrders {
  bool position = true;
  bool velocity = false;
  bool acceleration = false;
  bool jerk = false;

  static DerivativeOrders all() { return {true, true, true, true}; }
  int max_order() const;
};

// Sampled kinematics. Rows are query points; derivative matrices are in
// physical units (per second^n) for a chunk lasting `duration` seconds.
struct KinematicProfile {
  std::vector<double> tau;
  double duration = 0.0;
  std::optional<Eigen::MatrixXd> position;
  std::optional<Eigen::MatrixXd> velocity;
  std::optional<Eigen::MatrixXd> acceleration;
  std::optional<Eigen::MatrixXd> jerk;
};

KinematicProfile sample_chunk(const ModulatedField& field, int count,
                              double duration, DerivativeOrders orders);

}  // namespace actionfield
