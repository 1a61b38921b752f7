// Copyright 2026 The HamFlow Authors
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

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace hamflow::neural {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Direction { Dynamics, Hamiltonian };

std::string to_string(Direction d);
Direction direction_from_string(const std::string& s);

struct ModelConfig {
  Direction direction = Direction::Dynamics;
  int input_width = 2;   ///< signal channels plus one time channel
  int output_width = 1;
  int o0_width = 3;
  int hidden = 128;
  int layers = 2;
  int encoder_layers = 4;
  int encoder_width = 128;
  /// Fields enter and leave the network divided by this factor.
  double field_scale = 5.0;
  /// The time channel carries t / time_scale.
  double time_scale = 1.0;

  /// Throws std::invalid_argument on non-positive widths or inconsistent direction widths.
  void validate() const;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

/// Location of one affine map y = W x + b inside the flat parameter vector.
struct DenseBlock {
  Eigen::Index w_offset = 0;
  Eigen::Index b_offset = 0;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
};

/// Parameter layout shared by a model and its gradient.
struct ParamLayout {
  std::vector<DenseBlock> encoder_h;
  std::vector<DenseBlock> encoder_c;
  /// Gate rows are stacked (f, i, C, o); columns are [h_prev, x].
  std::vector<DenseBlock> lstm;
  DenseBlock head;
  Eigen::Index size = 0;

  static ParamLayout build(const ModelConfig& c);
};

using ConstMatrixMap = Eigen::Map<const MatrixXd>;
using MatrixMap = Eigen::Map<MatrixXd>;
using ConstVectorMap = Eigen::Map<const VectorXd>;
using VectorMap = Eigen::Map<VectorXd>;

inline ConstMatrixMap weight(const VectorXd& p, const DenseBlock& b) {
  return ConstMatrixMap(p.data() + b.w_offset, b.rows, b.cols);
}
inline MatrixMap weight(VectorXd& p, const DenseBlock& b) {
  return MatrixMap(p.data() + b.w_offset, b.rows, b.cols);
}
inline ConstVectorMap bias(const VectorXd& p, const DenseBlock& b) {
  return ConstVectorMap(p.data() + b.b_offset, b.rows);
}
inline VectorMap bias(VectorXd& p, const DenseBlock& b) {
  return VectorMap(p.data() + b.b_offset, b.rows);
}

/// Encoder pair, stacked LSTM and linear head with all parameters in one vector.
class SequenceModel {
 public:
  SequenceModel() = default;
  /// Zero parameters.
  explicit SequenceModel(const ModelConfig& config);

  /// Uniform(+-1/sqrt(fan_in)) weights, zero biases, forget-gate bias one.
  static SequenceModel initialized(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const ParamLayout& layout() const { return layout_; }
  VectorXd& params() { return params_; }
  const VectorXd& params() const { return params_; }

  /// Free-form tag written by the training pipeline.
  std::string config_hash;

  void save(const std::filesystem::path& path) const;
  static SequenceModel load(const std::filesystem::path& path);
  friend void to_json(nlohmann::json& j, const SequenceModel& m);
  friend void from_json(const nlohmann::json& j, SequenceModel& m);

 private:
  ModelConfig config_;
  ParamLayout layout_;
  VectorXd params_;
};

/// One LSTM cell evaluation with the intermediate gates kept for differentiation.
struct CellCache {
  VectorXd f, i, g, o, c, tanh_c, h;
};

/// w: 4H x (H + in) stacked gate matrix, b: 4H.
CellCache lstm_cell_forward(const MatrixXd& w, const VectorXd& b, const VectorXd& x,
                            const VectorXd& h_prev, const VectorXd& c_prev);

/// Batched sequences: one (width x batch) matrix per time step.
using Sequence = std::vector<MatrixXd>;

struct ForwardCache {
  int batch = 0;
  /// Post-activation outputs of each encoder layer; entry 0 is the encoder input.
  std::vector<MatrixXd> enc_h;
  std::vector<MatrixXd> enc_c;
  Sequence inputs;
  /// [layer][t], each (4H x batch) post-activation gates.
  std::vector<Sequence> gates;
  std::vector<Sequence> cell;
  std::vector<Sequence> tanh_cell;
  std::vector<Sequence> hidden;
  Sequence outputs;

  const MatrixXd& h0() const { return enc_h.back(); }
  const MatrixXd& c0() const { return enc_c.back(); }
};

/// Encoded (h0, c0), each hidden x batch, for an o0 block of width o0_width x batch.
std::pair<MatrixXd, MatrixXd> encode_initial_state(const SequenceModel& m, const MatrixXd& o0);

/// Unrolls the model. inputs[t] is (input_width x batch), o0 is (o0_width x batch).
ForwardCache forward(const SequenceModel& m, const Sequence& inputs, const MatrixXd& o0);

/// Single-sample convenience: inputs is (n_steps x input_width), returns (n_steps x output_width).
MatrixXd model_forward(const SequenceModel& m, const MatrixXd& inputs, const VectorXd& o0);

/// Gradient of a scalar loss given dLoss/dOutputs per step (output_width x batch).
/// Returned in the model's parameter layout. `accumulate` adds into an existing vector.
VectorXd backward(const SequenceModel& m, const ForwardCache& cache, const Sequence& d_outputs);
void backward(const SequenceModel& m, const ForwardCache& cache, const Sequence& d_outputs,
              VectorXd& grad);

/// Mean over all entries of the squared difference.
double mse_loss(const MatrixXd& pred, const MatrixXd& truth);
double mse_loss(const Sequence& pred, const Sequence& truth);
/// Gradient of the sequence MSE with respect to pred.
Sequence mse_gradient(const Sequence& pred, const Sequence& truth);

}  // namespace hamflow::neural
