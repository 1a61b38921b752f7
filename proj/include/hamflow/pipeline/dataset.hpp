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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hamflow/dynamics/state.hpp"
#include "hamflow/pipeline/config.hpp"

namespace hamflow::dynamics {

void to_json(nlohmann::json& j, const ObservableSeries& s);
void from_json(const nlohmann::json& j, ObservableSeries& s);

}  // namespace hamflow::dynamics

namespace hamflow::pipeline {

using Logger = std::function<void(const std::string&)>;

/// One simulated trajectory: driving field(s), initial product state and observables.
struct TrajectoryRecord {
  dynamics::HamiltonianKind kind = dynamics::HamiltonianKind::TfimRing;
  /// B(t), or (Delta1(t), Delta2(t)) for the superconducting pair.
  std::vector<fields::DrivingField> fields;
  /// One Bloch vector per qubit.
  std::vector<dynamics::BlochVector> initial_state;
  dynamics::ObservableSeries observables;
  bool noise = false;
  double gamma = 0.0;
  /// Stream id of the record generator under the dataset seed.
  std::uint64_t seed = 0;
  std::string split;

  /// SHA-256 of the record content, split label excluded.
  std::string hash() const;
};

void to_json(nlohmann::json& j, const TrajectoryRecord& r);
void from_json(const nlohmann::json& j, TrajectoryRecord& r);

/// Encoder input: the broadcast Bloch vector, or all per-qubit vectors concatenated.
Eigen::VectorXd encoder_input(const std::vector<dynamics::BlochVector>& state, InitialStates mode);

struct SplitIndex {
  std::vector<int> train;
  std::vector<int> validation;
  std::vector<int> test;
};

struct DatasetManifest {
  int record_count = 0;
  DatasetConfig config;
  std::string content_hash;
  SplitIndex splits;
  /// Records that failed the simulator tolerance and were redrawn.
  int regenerated = 0;
};

void to_json(nlohmann::json& j, const DatasetManifest& m);

struct Dataset {
  DatasetManifest manifest;
  std::vector<TrajectoryRecord> records;

  std::vector<const TrajectoryRecord*> split(const std::string& name) const;
  /// Writes manifest.json and records.jsonl into `dir`, creating it.
  void save(const std::filesystem::path& dir) const;
  /// Loads and re-verifies the content hash.
  static Dataset load(const std::filesystem::path& dir);
};

/// Content hash over the config and every record hash with its split label.
std::string content_hash(const DatasetConfig& config, const std::vector<TrajectoryRecord>& records);

/// Exact simulation of one system under given fields and initial state; the grid is the field grid.
dynamics::ObservableSeries simulate(const SystemConfig& system,
                                    const std::vector<fields::DrivingField>& fields,
                                    const std::vector<dynamics::BlochVector>& initial_state);

/// Draws the field(s) of one record from the generator recipe.
std::vector<fields::DrivingField> draw_fields(fields::Rng& rng, const SystemConfig& system,
                                              const GeneratorConfig& gen, const fields::UniformGrid& grid);

/// Draws an initial product state per the system's initial-state mode.
std::vector<dynamics::BlochVector> draw_initial_state(fields::Rng& rng, const SystemConfig& system);

/// Simulates train, validation and test records; parallel over records with
/// per-record streams so the result is independent of `jobs`.
Dataset generate_dataset(const DatasetConfig& config, int jobs = 1, const Logger& log = {});

/// Runs fn(i) for i in [0, n) on up to `jobs` threads; rethrows the first failure.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

}  // namespace hamflow::pipeline
