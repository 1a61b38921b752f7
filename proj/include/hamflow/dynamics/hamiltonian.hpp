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

#include "hamflow/dynamics/pauli.hpp"
#include "hamflow/fields/driving_field.hpp"

namespace hamflow::dynamics {

enum class HamiltonianKind { TfimRing, NmrZZ, ScSwapDetuned, Custom };

std::string to_string(HamiltonianKind kind);
HamiltonianKind hamiltonian_kind_from_string(const std::string& name);

/// Model family, static couplings and references to the time-dependent drives.
///
///   TfimRing:      H = -sum_i (J Z_i Z_{i+1 mod N} + B(t) X_i)
///   NmrZZ:         H = (pi/2) B(t) Z_0 Z_1, B in Hz, t in seconds
///   ScSwapDetuned: H = (B0/2)(X_0 X_1 + Y_0 Y_1) + D1(t) Z_0 + D2(t) Z_1,
///                  B0 and D in MHz, t in microseconds
///   Custom:        a fixed, time-independent Pauli decomposition
///
/// The SC Hamiltonian is written in cycle frequencies, so its propagator is
/// exp(-2 pi i H t); the other two use exp(-i H t). See propagator_scale().
struct HamiltonianSpec {
  HamiltonianKind kind = HamiltonianKind::TfimRing;
  int n_qubits = 0;
  /// J for TFIM, nominal B0 for NMR, B0 for SC.
  double coupling = 1.0;
  /// B(t) for TFIM and NMR; (D1(t), D2(t)) for SC.
  std::vector<fields::DrivingField> drives;
  /// Only used by Custom.
  PauliSum static_terms;

  static HamiltonianSpec tfim(int n_qubits, double j, fields::DrivingField b);
  static HamiltonianSpec nmr(double b0, fields::DrivingField b);
  static HamiltonianSpec superconducting(double b0, fields::DrivingField delta1,
                                         fields::DrivingField delta2);
  static HamiltonianSpec custom(PauliSum terms);

  void validate() const;
};

/// Factor multiplying H in the exponent of the propagator.
double propagator_scale(HamiltonianKind kind);

/// Re-evaluates H(t) in place; the Pauli strings are built once.
class HamiltonianSampler {
 public:
  explicit HamiltonianSampler(const HamiltonianSpec& spec);
  const PauliSum& at(double t);

 private:
  const HamiltonianSpec* spec_;
  PauliSum terms_;
};

/// H(t) as a Pauli decomposition sum_a lambda_a E_a.
PauliSum hamiltonian_terms(const HamiltonianSpec& spec, double t);

/// Dense Hermitian H(t), 2^N x 2^N.
CMatrix build_hamiltonian(const HamiltonianSpec& spec, double t);

}  // namespace hamflow::dynamics
