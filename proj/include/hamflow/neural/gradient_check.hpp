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

#include "hamflow/neural/sequence_model.hpp"

namespace hamflow::neural {

struct GradientCheckReport {
  int probes = 0;
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  /// Smallest |analytic gradient| among the probed parameters.
  double min_gradient = 0.0;
};

/// Compares backward() on the MSE loss against central differences at `probes` parameters,
/// drawn round-robin across the head, every LSTM layer and both encoders.
GradientCheckReport gradient_check(const SequenceModel& model, const Sequence& inputs,
                                   const MatrixXd& o0, const Sequence& targets, int probes,
                                   double step, std::uint64_t seed);

}  // namespace hamflow::neural
