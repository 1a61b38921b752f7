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

#include "hamflow/dynamics/state.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

namespace hamflow::dynamics {

namespace {

// Imaginary residues up to this size are roundoff and are dropped.
constexpr double kImagReject = 1e-8;

Complex y_phase(int y_count) {
  switch (y_count & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

double checked_real(Complex value) {
  if (std::abs(value.imag()) > kImagReject) {
    throw NumericalError("expectation: imaginary part " + std::to_string(value.imag()) +
                         " signals a corrupted state");
  }
  return value.real();
}

}  // namespace

void QuantumState::check_normalized(double tol) const {
  const double drift = std::abs(norm() - 1.0);
  if (drift > tol) {
    throw NumericalError("QuantumState: norm drift " + std::to_string(drift));
  }
}

DensityMatrix DensityMatrix::from_pure(const QuantumState& psi) {
  return {psi.amplitudes * psi.amplitudes.adjoint(), psi.n_qubits};
}

double DensityMatrix::hermiticity_error() const {
  return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  const CMatrix sym = 0.5 * (entries + entries.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void DensityMatrix::check_valid(double tol) const {
  if (entries.rows() != entries.cols() || entries.rows() != (Eigen::Index{1} << n_qubits)) {
    throw std::invalid_argument("DensityMatrix: shape does not match qubit count");
  }
  if (hermiticity_error() > tol) throw NumericalError("DensityMatrix: not Hermitian");
  const Complex tr = trace();
  if (std::abs(tr - Complex{1.0, 0.0}) > tol) {
    throw NumericalError("DensityMatrix: trace " + std::to_string(tr.real()) + " != 1");
  }
}

QuantumState product_state(std::span<const BlochVector> bloch_vectors) {
  if (bloch_vectors.empty()) throw std::invalid_argument("product_state: no qubits");
  CVector state = CVector::Ones(1);
  for (const auto& v : bloch_vectors) {
    const double length = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (!(std::abs(length - 1.0) <= 1e-9)) {
      throw std::invalid_argument("product_state: Bloch vector is not a unit vector");
    }
    const double z = std::clamp(v[2], -1.0, 1.0);
    const double up = std::sqrt(0.5 * (1.0 + z));
    const double down = std::sqrt(0.5 * (1.0 - z));
    CVector q(2);
    if (up > 0.0) {
      q << Complex{up, 0.0}, std::polar(down, std::atan2(v[1], v[0]));
    } else {
      q << Complex{0.0, 0.0}, Complex{1.0, 0.0};
    }
    CVector next(state.size() * 2);
    for (Eigen::Index i = 0; i < state.size(); ++i) {
      next[2 * i] = state[i] * q[0];
      next[2 * i + 1] = state[i] * q[1];
    }
    state = std::move(next);
  }
  return {std::move(state), static_cast<int>(bloch_vectors.size())};
}

BlochVector uniform_bloch_vector(double u_cos_theta, double u_phi) {
  const double z = 2.0 * u_cos_theta - 1.0;
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = 2.0 * std::numbers::pi * u_phi;
  return {r * std::cos(phi), r * std::sin(phi), z};
}

double expectation(const QuantumState& psi, const PauliString& p) {
  if (p.system_size() != psi.n_qubits) {
    throw std::invalid_argument("expectation: system size mismatch");
  }
  const auto x = p.x_mask();
  const auto z = p.z_mask();
  Complex total{0.0, 0.0};
  for (Eigen::Index b = 0; b < psi.amplitudes.size(); ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    const Complex term =
        std::conj(psi.amplitudes[static_cast<Eigen::Index>(ub ^ x)]) * psi.amplitudes[b];
    total += (std::popcount(ub & z) & 1) ? -term : term;
  }
  return checked_real(total * y_phase(p.y_count()));
}

double expectation(const DensityMatrix& rho, const PauliString& p) {
  if (p.system_size() != rho.n_qubits) {
    throw std::invalid_argument("expectation: system size mismatch");
  }
  const auto x = p.x_mask();
  const auto z = p.z_mask();
  Complex total{0.0, 0.0};
  for (Eigen::Index b = 0; b < rho.entries.rows(); ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    const Complex term = rho.entries(b, static_cast<Eigen::Index>(ub ^ x));
    total += (std::popcount(ub & z) & 1) ? -term : term;
  }
  return checked_real(total * y_phase(p.y_count()));
}

}  // namespace hamflow::dynamics
