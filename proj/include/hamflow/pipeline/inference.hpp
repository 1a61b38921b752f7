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
#include <span>
#include <string>
#include <vector>

#include "hamflow/neural/sequence_model.hpp"
#include "hamflow/pipeline/dataset.hpp"

namespace hamflow::pipeline {

/// Observables predicted from the field(s) on their own grid. Reported values are
/// clamped to [-1, 1]; `raw` receives the unclamped network output when non-null.
dynamics::ObservableSeries predict_dynamics(const neural::SequenceModel& model,
                                            const std::vector<fields::DrivingField>& fields,
                                            const Eigen::VectorXd& o0,
                                            const dynamics::ObservableSet& observables,
                                            Eigen::MatrixXd* raw = nullptr);

/// Field estimates on the observable grid, in physical units.
std::vector<fields::DrivingField> infer_field(const neural::SequenceModel& model,
                                              const dynamics::ObservableSeries& observables,
                                              const Eigen::VectorXd& o0);

struct DetuningInference {
  fields::DrivingField delta1;
  fields::DrivingField delta2;
  /// Observables re-simulated with the inferred detunings.
  dynamics::ObservableSeries resimulated;
  /// MSE between re-simulated and input observables.
  double closed_loop_mse = 0.0;
};

/// Infers (Delta1, Delta2) for the superconducting pair and validates them by re-simulation.
DetuningInference infer_detuning(const neural::SequenceModel& model, const SystemConfig& system,
                                 const dynamics::ObservableSeries& observed,
                                 const std::vector<dynamics::BlochVector>& initial_state);

/// Squared-error statistics of a model on held-out records. Field errors are divided by
/// the model's field scale before squaring.
struct EvalReport {
  neural::Direction direction = neural::Direction::Dynamics;
  std::vector<std::string> columns;
  std::vector<double> times;
  /// Mean over instances of the squared error, rows = times.
  Eigen::MatrixXd mse_vs_time;
  std::vector<double> instance_train_mse;
  std::vector<double> instance_extrapolation_mse;
  double train_window_mse = 0.0;
  /// Zero when no time exceeds the split.
  double extrapolation_mse = 0.0;
  double split_time = 0.0;
  double rescale = 1.0;
  int instances = 0;

  nlohmann::json to_json() const;
  void write_json(const std::filesystem::path& path) const;
  /// Columns t, one per output, mean.
  void write_csv(const std::filesystem::path& path) const;
};

/// Evaluates `records` (equal grids) with the train window t <= split_time. Instances are
/// processed in parallel chunks and reduced in record order.
EvalReport evaluate(const neural::SequenceModel& model,
                    std::span<const TrajectoryRecord* const> records, InitialStates mode,
                    double split_time, int jobs = 1);

/// The NMR measurement protocol: 15 two-qubit Pauli expectations on the schedule's grid
/// (250 points at 200 us by default). Without a model the constant-B0 system is evolved
/// over warped step durations; with a DYNAMICS model the observables are predicted.
dynamics::ObservableSeries run_nmr_protocol(const SystemConfig& system,
                                            const fields::DrivingField& schedule,
                                            const std::vector<dynamics::BlochVector>& initial_state,
                                            const neural::SequenceModel* model = nullptr);

/// The 250-point, 200 us NMR grid starting at zero.
fields::UniformGrid nmr_protocol_grid();

/// Builds a uniform grid from sample times; throws if the spacing is not uniform.
fields::UniformGrid grid_from_times(const std::vector<double>& times);

}  // namespace hamflow::pipeline
