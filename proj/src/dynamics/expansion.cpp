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

#include "hamflow/dynamics/expansion.hpp"

#include <cmath>
#include <stdexcept>

namespace hamflow::dynamics {

DensityMatrix short_time_expansion(const DensityMatrix& rho0, const PauliSum& hamiltonian,
                                   double t) {
  if (hamiltonian.system_size() != rho0.n_qubits) {
    throw std::invalid_argument("short_time_expansion: system size mismatch");
  }
  if (!hamiltonian.is_hermitian()) {
    throw std::invalid_argument("short_time_expansion: coefficient list is not Hermitian");
  }
  const auto& rho = rho0.entries;
  const auto& terms = hamiltonian.terms();
  std::vector<CMatrix> e;
  std::vector<double> lambda;
  e.reserve(terms.size());
  for (const auto& term : terms) {
    e.push_back(term.op.dense());
    lambda.push_back(term.coefficient.real());
  }

  CMatrix first = CMatrix::Zero(rho.rows(), rho.cols());
  for (std::size_t a = 0; a < e.size(); ++a) first += lambda[a] * (rho * e[a] - e[a] * rho);

  CMatrix second = CMatrix::Zero(rho.rows(), rho.cols());
  for (std::size_t a = 0; a < e.size(); ++a) {
    const CMatrix ea_rho = e[a] * rho;
    const CMatrix rho_ea = rho * e[a];
    for (std::size_t b = 0; b < e.size(); ++b) {
      second += (lambda[a] * lambda[b]) *
                (ea_rho * e[b] - 0.5 * (e[a] * (e[b] * rho) + rho_ea * e[b]));
    }
  }

  DensityMatrix out{rho + Complex{0.0, t} * first + (t * t) * second, rho0.n_qubits};
  return out;
}

std::vector<double> warp_time_grid(const fields::DrivingField& field, double b0, double dt,
                                   int n_steps) {
  if (b0 == 0.0 || !std::isfinite(b0)) throw std::invalid_argument("warp_time_grid: B0 must be nonzero");
  if (!(dt > 0.0) || n_steps < 0) throw std::invalid_argument("warp_time_grid: bad grid");
  const double span = field.t_end() - field.t_start();
  if (span < n_steps * dt - 1e-9 * dt) {
    throw std::invalid_argument("warp_time_grid: field domain shorter than n_steps * dt");
  }
  std::vector<double> durations(static_cast<std::size_t>(n_steps));
  const double t0 = field.t_start();
  for (int m = 1; m <= n_steps; ++m) {
    durations[static_cast<std::size_t>(m - 1)] =
        field.integral(t0 + (m - 1) * dt, t0 + m * dt) / b0;
  }
  return durations;
}

}  // namespace hamflow::dynamics
