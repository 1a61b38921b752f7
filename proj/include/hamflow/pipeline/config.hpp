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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hamflow/dynamics/hamiltonian.hpp"
#include "hamflow/dynamics/observables.hpp"
#include "hamflow/dynamics/state.hpp"
#include "hamflow/fields/generators.hpp"
#include "hamflow/neural/sequence_model.hpp"
#include "json.hpp"

namespace hamflow::pipeline {

/// Invalid or inconsistent configuration; the message names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kSchemaVersion = 1;

struct NoiseConfig {
  bool enabled = false;
  /// Per-site bit-flip rate.
  double gamma = 0.01;
};

/// How initial product states are drawn.
enum class InitialStates {
  Broadcast,  ///< one uniform Bloch vector repeated on every site
  PerQubit,   ///< independent uniform Bloch vector per site
  Fixed,      ///< `fixed_state` for every record
};

struct SystemConfig {
  dynamics::HamiltonianKind kind = dynamics::HamiltonianKind::TfimRing;
  int n_qubits = 5;
  /// J for the ring, B0 (Hz) for NMR, B0 (MHz) for the superconducting pair.
  double coupling = 1.0;
  double dt = 0.1;
  int substeps = 20;
  /// Empty selects the default set of the system kind.
  std::vector<std::string> observables;
  NoiseConfig noise;
  InitialStates initial_states = InitialStates::Broadcast;
  std::vector<dynamics::BlochVector> fixed_state;

  static SystemConfig tfim(int n_qubits);
  static SystemConfig nmr();
  static SystemConfig superconducting();

  dynamics::ObservableSet observable_set() const;
  int n_fields() const;
  /// Width of the encoder input: 3 for broadcast states, 3 per qubit otherwise.
  int o0_width() const;
  void validate() const;
};

enum class FieldFamily { GpMixture, Quench, Periodic };

std::string to_string(FieldFamily f);
FieldFamily field_family_from_string(const std::string& s);

/// Random field recipe. The drawn signal g(t) becomes offset + scale * g(t).
struct GeneratorConfig {
  FieldFamily family = FieldFamily::GpMixture;
  fields::MixtureRanges ranges;
  fields::Range heights{-3.0, 3.0};
  fields::Range amplitude{-3.0, 3.0};
  fields::Range omega{0.1, 4.0};
  double offset = 0.0;
  double scale = 1.0;
};

struct DatasetConfig {
  SystemConfig system;
  GeneratorConfig generator;
  int n_train = 2000;
  int n_validation = 200;
  int n_test = 100;
  double horizon = 5.0;
  double test_horizon = 15.0;
  std::uint64_t seed = 7;
};

struct ModelShape {
  int hidden = 128;
  int layers = 2;
  int encoder_layers = 4;
  int encoder_width = 128;
  /// Zero selects the system default (5 for ring and superconducting fields, B0 for NMR).
  double field_scale = 0.0;
  /// Zero selects the system default (1 for the ring, 1e-2 s for NMR, 1e-2 us for SC).
  double time_scale = 0.0;
};

struct TrainingConfig {
  int epochs = 30;
  int batch_size = 32;
  double learning_rate = 2e-3;
  /// Learning rate multiplier applied linearly from 1 at the first epoch to this value at the last.
  double final_lr_fraction = 0.1;
  std::uint64_t seed = 11;
  int jobs = 1;
  /// Validation MSE only counts rows with t <= validation_window; zero means the dataset horizon.
  double validation_window = 0.0;
};

struct PathsConfig {
  std::filesystem::path data = "hamflow_out/data";
  std::filesystem::path output = "hamflow_out/run";
};

/// Full parameter tree of a CLI invocation.
struct RunConfig {
  int schema_version = kSchemaVersion;
  std::uint64_t seed = 7;
  DatasetConfig dataset;
  ModelShape model;
  TrainingConfig training;
  PathsConfig paths;
  std::optional<neural::Direction> direction;
  /// Manifest hash the caller expects to train on; empty disables the check.
  std::string expected_manifest_hash;
};

void to_json(nlohmann::json& j, const SystemConfig& c);
void to_json(nlohmann::json& j, const GeneratorConfig& c);
void to_json(nlohmann::json& j, const DatasetConfig& c);
void to_json(nlohmann::json& j, const ModelShape& c);
void to_json(nlohmann::json& j, const TrainingConfig& c);
void to_json(nlohmann::json& j, const RunConfig& c);

/// Stream offset of the training seed (shuffling, initialization) under the root seed.
inline constexpr std::uint64_t kTrainingStream = 4;

std::uint64_t training_seed_for(std::uint64_t root_seed);

/// Sets the root seed and every seed derived from it.
void apply_root_seed(RunConfig& c, std::uint64_t seed);

/// Parses a config tree; absent fields keep their defaults, unknown keys are rejected.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// Model configuration implied by a dataset system and a requested direction.
neural::ModelConfig model_config_for(const SystemConfig& system, const ModelShape& shape,
                                     neural::Direction direction);

/// Dataset defaults of a system kind: grid, generator ranges and scaling.
DatasetConfig dataset_defaults(dynamics::HamiltonianKind kind);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace hamflow::pipeline
