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
#include <string>
#include <vector>

#include "hamflow/pipeline/config.hpp"
#include "hamflow/pipeline/dataset.hpp"

namespace hamflow::cli {

/// One thresholded quantity of a reproduction run.
struct Check {
  std::string id;
  double value = 0.0;
  /// "<", "<=" or ">=" against `threshold`.
  std::string relation = "<";
  double threshold = 0.0;
  bool passed = false;
};

struct ReproReport {
  std::string figure;
  nlohmann::json summary;
  std::vector<Check> checks;

  bool passed() const;
  /// Ids of failed checks, comma separated.
  std::string failures() const;
};

struct ReproOptions {
  pipeline::RunConfig config;
  std::filesystem::path output;
  int jobs = 1;
  pipeline::Logger log;
};

/// Figure ids accepted by run_repro.
const std::vector<std::string>& repro_figures();

/// Desk-scale configuration of a figure: system kind, dataset sizes, model and training.
pipeline::RunConfig repro_defaults(const std::string& figure);

/// Generates data, trains, evaluates and writes CSVs plus summary.json into `output`.
ReproReport run_repro(const std::string& figure, const ReproOptions& options);

/// Frequency of sign changes of a sampled signal: half the crossing rate, with crossings
/// located by linear interpolation.
double crossing_frequency(const std::vector<double>& t, const std::vector<double>& y);

/// Writes columns of equal length under a header with 17 significant digits.
void write_columns(const std::filesystem::path& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns);

}  // namespace hamflow::cli
