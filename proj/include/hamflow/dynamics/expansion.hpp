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

#include <vector>

#include "hamflow/dynamics/state.hpp"
#include "hamflow/fields/driving_field.hpp"

namespace hamflow::dynamics {

/// Second-order truncation of the unitary channel rho -> U rho U^dagger for
/// H = sum_a lambda_a E_a:
///
///   rho + i t sum_a lambda_a (rho E_a - E_a rho)
///       + t^2 sum_{a,b} lambda_a lambda_b [E_a rho E_b - (E_a E_b rho + rho E_a E_b)/2]
///
/// The result is trace one but need not be positive.
DensityMatrix short_time_expansion(const DensityMatrix& rho0, const PauliSum& hamiltonian,
                                   double t);

/// Durations tau_m = (1/B0) * integral of B over [(m-1) dt, m dt], m = 1..n_steps,
/// so that evolving a constant-B0 Hamiltonian for tau_m mimics B(t) over dt.
/// Integrals use the trapezoid rule on the field's own grid.
std::vector<double> warp_time_grid(const fields::DrivingField& field, double b0, double dt,
                                   int n_steps);

}  // namespace hamflow::dynamics
