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

#include <string>
#include <vector>

#include "hamflow/pipeline/dataset.hpp"

namespace hamflow::cli {

/// Outcome of one analytic or statistical oracle suite.
struct OracleResult {
  int criterion = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  /// Worst observed quantities, human readable.
  std::string detail;
};

/// Rabi, ZZ conditional phase and bit-flip oracles; norm, trace, Hermiticity and
/// positivity over 100 GP-driven 5-qubit runs; eigendecomposition vs stepping at N <= 3.
OracleResult oracle_simulator();
/// Halving t shrinks the short-time truncation error by a factor in [6, 10] (20 instances).
OracleResult oracle_expansion_order();
/// Warped constant-coupling ZZ evolution equals direct time-dependent evolution (20 fields).
OracleResult oracle_time_warp();
/// Empirical covariance of 10,000 GP draws at three lags, plus degenerate inputs.
OracleResult oracle_gp_statistics();
/// Backpropagation vs central differences on 100 probes per direction, encoder included.
OracleResult oracle_gradient_check();
/// Zero-detuning superconducting pair oscillates at 2 B0.
OracleResult oracle_swap_frequency();

/// Runs the selected suites in order (1..6 select the suites above).
std::vector<OracleResult> run_oracle_suite(const std::vector<int>& criteria, const pipeline::Logger& log = {});

}  // namespace hamflow::cli
