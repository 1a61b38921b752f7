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

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hamflow/neural/adam.hpp"
#include "hamflow/neural/sequence_model.hpp"
#include "hamflow/pipeline/dataset.hpp"

namespace hamflow::pipeline {

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
  double learning_rate = 0.0;
};

void to_json(nlohmann::json& j, const EpochStats& s);
void from_json(const nlohmann::json& j, EpochStats& s);

struct TrainOptions {
  neural::Direction direction = neural::Direction::Dynamics;
  ModelShape shape;
  TrainingConfig training;
  /// Per-epoch training state is written here when non-empty.
  std::filesystem::path state_dir;
  /// Continue from the state in `state_dir` if present.
  bool resume = false;
  std::function<void(const EpochStats&)> on_epoch;
};

struct TrainResult {
  /// Parameters of the epoch with the lowest validation loss.
  neural::SequenceModel model;
  std::vector<EpochStats> history;
  int best_epoch = -1;
  std::string manifest_hash;
};

/// Network inputs and targets for a set of records, one (width x batch) block per step.
struct Batch {
  neural::Sequence inputs;
  neural::Sequence targets;
  Eigen::MatrixXd o0;
};

/// Per-record feature matrices (rows = time steps).
struct Example {
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd targets;
  Eigen::VectorXd o0;
};

/// DYNAMICS: rows (fields / field_scale, t / time_scale) -> observables.
/// HAMILTONIAN: rows (observables, t / time_scale) -> fields / field_scale.
/// Network input rows for the hamiltonian direction. Row k pairs o(t_{k+1})
/// with t_k: the field held over [t_k, t_{k+1}) first shows up in o(t_{k+1}).
/// The last row repeats the final observation.
Eigen::MatrixXd hamiltonian_inputs(const Eigen::MatrixXd& observables, const Eigen::VectorXd& scaled_times);

Example make_example(const neural::ModelConfig& model, InitialStates mode, const TrajectoryRecord& r);

/// Stacks examples (equal lengths) truncated to the first `rows` steps (all when negative).
Batch make_batch(std::span<const Example* const> examples, int rows = -1);

/// Forward and backward over a batch in fixed chunks of 16 samples spread over `jobs`
/// threads; the gradient of the batch MSE is reduced in chunk order, so the result does
/// not depend on `jobs`. Returns the batch loss.
double batch_gradient(const neural::SequenceModel& model, const Batch& batch, int jobs,
                      Eigen::VectorXd& grad);

/// Forward-only MSE over examples in chunks of `chunk`.
double batch_loss(const neural::SequenceModel& model, std::span<const Example* const> examples,
                  int rows, int chunk = 64);

/// Minimizes the MSE with Adam on the train split and keeps the best validation checkpoint.
/// Throws NumericalError when the loss becomes non-finite.
TrainResult train(const Dataset& data, const TrainOptions& options);

/// Hash identifying a training run: manifest, direction, model shape and training settings.
std::string training_hash(const std::string& manifest_hash, const neural::ModelConfig& model,
                          const TrainingConfig& training);

}  // namespace hamflow::pipeline
