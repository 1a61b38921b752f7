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

#include "hamflow/dynamics/evolve.hpp"

#include <cmath>
#include <string>

namespace hamflow::dynamics {

namespace {

constexpr int kMaxSeriesTerms = 80;
constexpr Complex kMinusI{0.0, -1.0};

Integrator resolve(Integrator integrator, int n_qubits) {
  if (integrator != Integrator::Auto) return integrator;
  return n_qubits <= 4 ? Integrator::Eigendecomposition : Integrator::Taylor;
}

// Number of equal pieces that keep |generator| * piece <= 1 so the series
// converges without cancellation.
int series_pieces(double generator_bound, double duration) {
  const double x = generator_bound * std::abs(duration);
  return std::max(1, static_cast<int>(std::ceil(x)));
}

void taylor_step(CVector& psi, const PauliSum& h, double scale, double duration) {
  const int pieces = series_pieces(scale * h.one_norm(), duration);
  const double tau = duration / pieces;
  CVector term(psi.size());
  CVector next(psi.size());
  for (int p = 0; p < pieces; ++p) {
    term = psi;
    for (int k = 1;; ++k) {
      if (k > kMaxSeriesTerms) throw NumericalError("Taylor propagator did not converge");
      h.apply(term, next);
      term = (kMinusI * (scale * tau / k)) * next;
      psi += term;
      if (term.norm() <= 1e-17 * psi.norm()) break;
    }
  }
}

void rk4_step(CVector& psi, const PauliSum& h, double scale, double duration) {
  const Complex c = kMinusI * scale;
  CVector k1, k2, k3, k4, tmp;
  h.apply(psi, k1);
  k1 *= c;
  tmp = psi + 0.5 * duration * k1;
  h.apply(tmp, k2);
  k2 *= c;
  tmp = psi + 0.5 * duration * k2;
  h.apply(tmp, k3);
  k3 *= c;
  tmp = psi + duration * k3;
  h.apply(tmp, k4);
  k4 *= c;
  psi += (duration / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void eigen_step(CVector& psi, const CMatrix& h, double scale, double duration) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  const auto& v = solver.eigenvectors();
  CVector coeffs = v.adjoint() * psi;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
    coeffs[i] *= std::polar(1.0, -scale * solver.eigenvalues()[i] * duration);
  }
  psi = v * coeffs;
}

// Generator of the Lindblad equation applied to a (Hermitian) matrix.
void lindblad_generator(const CMatrix& rho, const PauliSum& h, double scale, double gamma,
                        int n_qubits, CMatrix& out, CMatrix& scratch) {
  h.apply(rho, out);                  // H rho
  h.apply(rho.adjoint(), scratch);    // H rho^dagger = (rho H)^dagger
  out = (kMinusI * scale) * (out - scratch.adjoint());
  if (gamma == 0.0) return;
  const Eigen::Index dim = rho.rows();
  for (int site = 0; site < n_qubits; ++site) {
    const Eigen::Index mask = Eigen::Index{1} << (n_qubits - 1 - site);
    for (Eigen::Index b = 0; b < dim; ++b) {
      for (Eigen::Index a = 0; a < dim; ++a) {
        out(a, b) += gamma * (rho(a ^ mask, b ^ mask) - rho(a, b));
      }
    }
  }
}

void record(ObservableSeries& series, int row, const ObservableSet& obs,
            const QuantumState& psi) {
  for (std::size_t i = 0; i < obs.size(); ++i) {
    series.values(row, static_cast<Eigen::Index>(i)) = expectation(psi, obs[i]);
  }
}

void record(ObservableSeries& series, int row, const ObservableSet& obs,
            const DensityMatrix& rho) {
  for (std::size_t i = 0; i < obs.size(); ++i) {
    series.values(row, static_cast<Eigen::Index>(i)) = expectation(rho, obs[i]);
  }
}

void check_inputs(int state_qubits, const HamiltonianSpec& spec, const ObservableSet& obs) {
  spec.validate();
  if (state_qubits != spec.n_qubits) {
    throw std::invalid_argument("evolve: state size does not match the Hamiltonian");
  }
  if (obs.size() > 0 && obs.system_size() != spec.n_qubits) {
    throw std::invalid_argument("evolve: observable size does not match the Hamiltonian");
  }
}

}  // namespace

void step_state(CVector& psi, const PauliSum& h, double scale, double duration,
                Integrator integrator) {
  switch (resolve(integrator, h.system_size())) {
    case Integrator::Eigendecomposition: eigen_step(psi, h.dense(), scale, duration); return;
    case Integrator::Taylor: taylor_step(psi, h, scale, duration); return;
    case Integrator::RungeKutta4: rk4_step(psi, h, scale, duration); return;
    case Integrator::Auto: break;
  }
  throw std::logic_error("unresolved integrator");
}

void step_density(CMatrix& rho, const PauliSum& h, double scale, double gamma, double duration) {
  const int n = h.system_size();
  const double bound = 2.0 * scale * h.one_norm() + 2.0 * gamma * n;
  const int pieces = series_pieces(bound, duration);
  const double tau = duration / pieces;
  CMatrix term, next, scratch;
  for (int p = 0; p < pieces; ++p) {
    term = rho;
    for (int k = 1;; ++k) {
      if (k > kMaxSeriesTerms) throw NumericalError("Lindblad series did not converge");
      lindblad_generator(term, h, scale, gamma, n, next, scratch);
      term = (tau / k) * next;
      rho += term;
      if (term.norm() <= 1e-17 * rho.norm()) break;
    }
  }
}

QuantumState propagate_exact(const QuantumState& psi, const CMatrix& h, double scale, double t) {
  QuantumState out = psi;
  eigen_step(out.amplitudes, h, scale, t);
  return out;
}

ObservableSeries evolve_schrodinger_segments(const QuantumState& psi0,
                                             const HamiltonianSpec& spec, double t_start,
                                             std::span<const double> durations, int substeps,
                                             const ObservableSet& obs,
                                             std::span<const double> labels,
                                             const EvolveOptions& options) {
  check_inputs(psi0.n_qubits, spec, obs);
  if (substeps < 1) throw std::invalid_argument("evolve: substeps must be >= 1");
  if (labels.size() != durations.size() + 1) {
    throw std::invalid_argument("evolve: need one label per recorded row");
  }
  psi0.check_normalized();
  const double scale = propagator_scale(spec.kind);
  HamiltonianSampler sampler(spec);
  const Integrator integrator = resolve(options.integrator, spec.n_qubits);

  ObservableSeries series;
  series.times.assign(labels.begin(), labels.end());
  series.values.resize(static_cast<Eigen::Index>(labels.size()),
                       static_cast<Eigen::Index>(obs.size()));
  series.observables = obs;

  QuantumState psi = psi0;
  record(series, 0, obs, psi);
  if (options.on_state) options.on_state(labels[0], psi);
  double t = t_start;
  for (std::size_t m = 0; m < durations.size(); ++m) {
    const double h = durations[m] / substeps;
    for (int j = 0; j < substeps; ++j) {
      step_state(psi.amplitudes, sampler.at(t + (j + 0.5) * h), scale, h, integrator);
    }
    t = t_start;
    for (std::size_t i = 0; i <= m; ++i) t += durations[i];
    const double drift = std::abs(psi.norm() - 1.0);
    if (drift > options.drift_limit) {
      throw NumericalError("evolve_schrodinger: norm drift " + std::to_string(drift) +
                           " (substeps too coarse)");
    }
    record(series, static_cast<int>(m + 1), obs, psi);
    if (options.on_state) options.on_state(labels[m + 1], psi);
  }
  return series;
}

ObservableSeries evolve_schrodinger(const QuantumState& psi0, const HamiltonianSpec& spec,
                                    const TimeGrid& grid, const ObservableSet& obs,
                                    const EvolveOptions& options) {
  grid.validate();
  check_inputs(psi0.n_qubits, spec, obs);
  psi0.check_normalized();
  const double scale = propagator_scale(spec.kind);
  HamiltonianSampler sampler(spec);
  const Integrator integrator = resolve(options.integrator, spec.n_qubits);

  ObservableSeries series;
  series.times = grid.times();
  series.values.resize(grid.n_steps + 1, static_cast<Eigen::Index>(obs.size()));
  series.observables = obs;

  QuantumState psi = psi0;
  record(series, 0, obs, psi);
  if (options.on_state) options.on_state(grid.t_start, psi);
  const double h = grid.dt / grid.substeps_per_dt;
  for (int k = 0; k < grid.n_steps; ++k) {
    const double t = grid.time(k);
    for (int j = 0; j < grid.substeps_per_dt; ++j) {
      step_state(psi.amplitudes, sampler.at(t + (j + 0.5) * h), scale, h, integrator);
    }
    const double drift = std::abs(psi.norm() - 1.0);
    if (drift > options.drift_limit) {
      throw NumericalError("evolve_schrodinger: norm drift " + std::to_string(drift) +
                           " (substeps too coarse)");
    }
    record(series, k + 1, obs, psi);
    if (options.on_state) options.on_state(grid.time(k + 1), psi);
  }
  return series;
}

ObservableSeries evolve_lindblad(const DensityMatrix& rho0, const HamiltonianSpec& spec,
                                 const TimeGrid& grid, const ObservableSet& obs, double gamma,
                                 const EvolveOptions& options) {
  grid.validate();
  check_inputs(rho0.n_qubits, spec, obs);
  if (!(gamma >= 0.0)) throw std::invalid_argument("evolve_lindblad: gamma must be >= 0");
  rho0.check_valid();
  const double scale = propagator_scale(spec.kind);
  HamiltonianSampler sampler(spec);

  ObservableSeries series;
  series.times = grid.times();
  series.values.resize(grid.n_steps + 1, static_cast<Eigen::Index>(obs.size()));
  series.observables = obs;

  DensityMatrix rho = rho0;
  record(series, 0, obs, rho);
  if (options.on_density) options.on_density(grid.t_start, rho);
  const double h = grid.dt / grid.substeps_per_dt;
  for (int k = 0; k < grid.n_steps; ++k) {
    const double t = grid.time(k);
    for (int j = 0; j < grid.substeps_per_dt; ++j) {
      step_density(rho.entries, sampler.at(t + (j + 0.5) * h), scale, gamma, h);
    }
    const double drift = std::abs(rho.trace() - Complex{1.0, 0.0});
    if (drift > options.drift_limit) {
      throw NumericalError("evolve_lindblad: trace drift " + std::to_string(drift));
    }
    record(series, k + 1, obs, rho);
    if (options.on_density) options.on_density(grid.time(k + 1), rho);
  }
  return series;
}

}  // namespace hamflow::dynamics
