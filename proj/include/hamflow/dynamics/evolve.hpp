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

#include <functional>
#include <span>

#include "hamflow/dynamics/hamiltonian.hpp"
#include "hamflow/dynamics/observables.hpp"
#include "hamflow/dynamics/state.hpp"

namespace hamflow::dynamics {

/// How a single substep with constant H is propagated.
///
/// Auto picks Eigendecomposition for N <= 4 and Taylor otherwise. Taylor sums
/// the exponential series of the substep generator until the next term falls
/// below double precision, so it stays unitary to roundoff. RungeKutta4 is the
/// classic fixed-step scheme; it drifts off the unit sphere and is only kept
/// for comparison.
enum class Integrator { Auto, Eigendecomposition, Taylor, RungeKutta4 };

struct EvolveOptions {
  Integrator integrator = Integrator::Auto;
  /// Norm (Schrodinger) or trace (Lindblad) drift that raises NumericalError.
  double drift_limit = 1e-6;
  /// Called at every recorded time, including t_start.
  std::function<void(double, const QuantumState&)> on_state;
  std::function<void(double, const DensityMatrix&)> on_density;
};

/// Integrates i d|psi>/dt = s H(t) |psi> (s = propagator_scale) with H held
/// at its midpoint value over each substep.
ObservableSeries evolve_schrodinger(const QuantumState& psi0, const HamiltonianSpec& spec,
                                    const TimeGrid& grid, const ObservableSet& obs,
                                    const EvolveOptions& options = {});

/// Same scheme over consecutive segments of arbitrary (possibly unequal)
/// duration. Row 0 is the initial state; row m follows segment m. Rows are
/// labelled with `labels` (size durations.size() + 1).
ObservableSeries evolve_schrodinger_segments(const QuantumState& psi0,
                                             const HamiltonianSpec& spec, double t_start,
                                             std::span<const double> durations,
                                             int substeps, const ObservableSet& obs,
                                             std::span<const double> labels,
                                             const EvolveOptions& options = {});

/// Integrates d rho/dt = -i s [H, rho] + gamma sum_i (X_i rho X_i - rho),
/// one bit-flip collapse operator per site.
ObservableSeries evolve_lindblad(const DensityMatrix& rho0, const HamiltonianSpec& spec,
                                 const TimeGrid& grid, const ObservableSet& obs, double gamma,
                                 const EvolveOptions& options = {});

/// exp(-i scale H t) psi by a single eigendecomposition of the constant H.
QuantumState propagate_exact(const QuantumState& psi, const CMatrix& h, double scale, double t);

/// One step psi <- exp(-i scale h H) psi with the requested integrator.
void step_state(CVector& psi, const PauliSum& h, double scale, double duration,
                Integrator integrator);

/// One step rho <- exp(duration * L) rho via the series of the generator.
void step_density(CMatrix& rho, const PauliSum& h, double scale, double gamma, double duration);

}  // namespace hamflow::dynamics
