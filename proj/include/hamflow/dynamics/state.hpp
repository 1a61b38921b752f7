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

#include <array>
#include <span>
#include <stdexcept>
#include <vector>

#include "hamflow/dynamics/pauli.hpp"
#include "hamflow/errors.hpp"

namespace hamflow::dynamics {

using BlochVector = std::array<double, 3>;

using hamflow::NumericalError;

struct QuantumState {
  CVector amplitudes;
  int n_qubits = 0;

  double norm() const { return amplitudes.norm(); }
  /// Throws NumericalError unless |norm - 1| <= tol.
  void check_normalized(double tol = 1e-9) const;
};

struct DensityMatrix {
  CMatrix entries;
  int n_qubits = 0;

  static DensityMatrix from_pure(const QuantumState& psi);

  Complex trace() const { return entries.trace(); }
  double hermiticity_error() const;
  double min_eigenvalue() const;
  /// Hermiticity and unit trace; positivity is left to min_eigenvalue().
  void check_valid(double tol = 1e-9) const;
};

/// Tensor product of single-qubit pure states with the given Bloch vectors.
/// The |0> amplitude of each factor is real and nonnegative; when it vanishes
/// the |1> amplitude is real instead.
QuantumState product_state(std::span<const BlochVector> bloch_vectors);

BlochVector uniform_bloch_vector(double u_cos_theta, double u_phi);

double expectation(const QuantumState& psi, const PauliString& p);
double expectation(const DensityMatrix& rho, const PauliString& p);

}  // namespace hamflow::dynamics
