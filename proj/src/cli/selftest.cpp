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

#include "hamflow/cli/selftest.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "hamflow/dynamics/evolve.hpp"
#include "hamflow/dynamics/expansion.hpp"
#include "hamflow/fields/generators.hpp"
#include "hamflow/neural/gradient_check.hpp"
#include "hamflow/pipeline/config.hpp"

namespace hamflow::cli {

namespace {

using namespace dynamics;
using fields::DrivingField;
using fields::UniformGrid;
using std::numbers::pi;

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

QuantumState product(const std::vector<BlochVector>& v) { return product_state(v); }

BlochVector random_bloch(fields::Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double a = u(rng);
  return uniform_bloch_vector(a, u(rng));
}

PauliSum random_hamiltonian(fields::Rng& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PauliSum h(n);
  const int count = 1 << (2 * n);
  for (int code = 1; code < count; ++code) {
    std::vector<PauliFactor> f;
    for (int s = 0; s < n; ++s) {
      const int a = (code >> (2 * s)) & 3;
      if (a) f.push_back({s, static_cast<PauliAxis>(a - 1)});
    }
    h.add(u(rng), PauliString(n, std::move(f)));
  }
  return h;
}

// exp(-i H t) from the Hermitian eigensystem.
CMatrix unitary(const CMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const Eigen::VectorXcd phase = (es.eigenvalues().cast<Complex>() * Complex(0.0, -t)).array().exp();
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

template <class F>
OracleResult timed(int criterion, std::string name, F&& body) {
  OracleResult r;
  r.criterion = criterion;
  r.name = std::move(name);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail += std::string(r.detail.empty() ? "" : "; ") + "exception: " + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

OracleResult oracle_simulator() {
  return timed(1, "simulator oracles", [](OracleResult& r) {
    // Rabi: H = X on |0>, <Z>(t) = cos 2t.
    PauliSum hx(1);
    hx.add(1.0, PauliString::parse("X0", 1));
    const BlochVector up{0, 0, 1};
    const ObservableSet z0({PauliString::parse("Z0", 1)});
    const TimeGrid rabi_grid{0.0, pi / 100, 200, 20};
    double rabi = 0.0;
    for (auto integ : {Integrator::Eigendecomposition, Integrator::Taylor}) {
      EvolveOptions opt;
      opt.integrator = integ;
      const auto s = evolve_schrodinger(product({up}), HamiltonianSpec::custom(hx), rabi_grid, z0, opt);
      for (int k = 0; k <= rabi_grid.n_steps; ++k) {
        rabi = std::max(rabi, std::abs(s.values(k, 0) - std::cos(2.0 * rabi_grid.time(k))));
      }
    }

    // ZZ conditional phase: |0+>, <X1>(t) = cos(pi B0 t).
    const double b0 = 697.4;
    const auto nmr_grid = UniformGrid::from_horizon(2e-4, 0.05);
    const auto nmr = evolve_schrodinger(product({{0, 0, 1}, {1, 0, 0}}),
                                        HamiltonianSpec::nmr(b0, DrivingField::constant(b0, nmr_grid)),
                                        TimeGrid::from_uniform(nmr_grid), ObservableSet({PauliString::parse("X1", 2)}));
    double zz = 0.0;
    for (int k = 0; k <= nmr_grid.n_steps; ++k) {
      zz = std::max(zz, std::abs(nmr.values(k, 0) - std::cos(pi * b0 * nmr_grid.time(k))));
    }

    // Bit flip: <Z>(t) = exp(-2 gamma t).
    const double gamma = 0.3;
    const TimeGrid flip_grid{0.0, 0.1, 50, 10};
    const auto flip = evolve_lindblad(DensityMatrix::from_pure(product({up})), HamiltonianSpec::custom(PauliSum(1)),
                                      flip_grid, z0, gamma);
    double bit = 0.0;
    for (int k = 0; k <= flip_grid.n_steps; ++k) {
      bit = std::max(bit, std::abs(flip.values(k, 0) - std::exp(-2.0 * gamma * flip_grid.time(k))));
    }

    // Invariants over GP-driven 5-qubit rings.
    auto rng = fields::make_rng(2026, 1);
    const auto long_grid = UniformGrid::from_horizon(0.1, 15.0);
    const auto short_grid = UniformGrid::from_horizon(0.1, 1.0);
    const auto obs5 = ObservableSet::tfim_default(5);
    double norm = 0.0, trace = 0.0, herm = 0.0, min_eig = 1.0, range = 0.0;
    for (int run = 0; run < 100; ++run) {
      const auto b = fields::sample_gp_mixture(rng, long_grid);
      const std::vector<BlochVector> init(5, random_bloch(rng));
      EvolveOptions opt;
      opt.on_state = [&](double, const QuantumState& psi) { norm = std::max(norm, std::abs(psi.norm() - 1.0)); };
      const auto s = evolve_schrodinger(product(init), HamiltonianSpec::tfim(5, 1.0, b), TimeGrid::from_uniform(long_grid), obs5, opt);
      range = std::max(range, s.values.cwiseAbs().maxCoeff() - 1.0);

      EvolveOptions dopt;
      dopt.on_density = [&](double, const DensityMatrix& rho) {
        trace = std::max(trace, std::abs(rho.trace() - Complex(1.0, 0.0)));
        herm = std::max(herm, rho.hermiticity_error());
        min_eig = std::min(min_eig, rho.min_eigenvalue());
      };
      evolve_lindblad(DensityMatrix::from_pure(product(init)), HamiltonianSpec::tfim(5, 1.0, b.prefix(short_grid.n_points())),
                      TimeGrid::from_uniform(short_grid), obs5, 0.05, dopt);
    }

    // Stepping vs one-shot exp(-iHt) for constant H, N = 1..3.
    double brute = 0.0;
    for (int n = 1; n <= 3; ++n) {
      for (int trial = 0; trial < 3; ++trial) {
        const auto h = random_hamiltonian(rng, n);
        std::vector<BlochVector> init;
        for (int s = 0; s < n; ++s) init.push_back(random_bloch(rng));
        const auto psi0 = product(init);
        const TimeGrid g{0.0, 0.25, 12, 20};
        std::vector<CVector> stepped;
        EvolveOptions opt;
        opt.integrator = Integrator::Taylor;
        opt.on_state = [&](double, const QuantumState& psi) { stepped.push_back(psi.amplitudes); };
        evolve_schrodinger(psi0, HamiltonianSpec::custom(h), g, ObservableSet({PauliString::single(n, 0, PauliAxis::Z)}), opt);
        const CMatrix dense = h.dense();
        for (int k = 0; k <= g.n_steps; ++k) {
          const CVector exact = unitary(dense, g.time(k)) * psi0.amplitudes;
          brute = std::max(brute, (stepped[static_cast<std::size_t>(k)] - exact).cwiseAbs().maxCoeff());
        }
      }
    }
    r.passed = rabi < 1e-8 && zz < 1e-8 && bit < 1e-8 && norm <= 1e-9 && trace <= 1e-8 && herm <= 1e-9 &&
               min_eig >= -1e-8 && range <= 1e-9 && brute < 1e-8;
    r.detail = fmt("rabi %.1e, zz %.1e, bit-flip %.1e, stepping %.1e", rabi, zz, bit, brute) +
               fmt("; norm %.1e, trace %.1e, hermiticity %.1e, min eigenvalue %.1e", norm, trace, herm, min_eig);
  });
}

OracleResult oracle_expansion_order() {
  return timed(2, "short-time expansion order", [](OracleResult& r) {
    auto rng = fields::make_rng(2026, 2);
    double lo = 1e300, hi = 0.0;
    constexpr double t = 0.02;
    for (int i = 0; i < 20; ++i) {
      const int n = 1 + i % 2;
      const auto h = random_hamiltonian(rng, n);
      std::vector<BlochVector> init;
      for (int s = 0; s < n; ++s) init.push_back(random_bloch(rng));
      const auto rho0 = DensityMatrix::from_pure(product(init));
      auto error_at = [&](double tt) {
        const CMatrix u = unitary(h.dense(), tt);
        const CMatrix exact = u * rho0.entries * u.adjoint();
        return (short_time_expansion(rho0, h, tt).entries - exact).norm();
      };
      const double ratio = error_at(t) / error_at(t / 2);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    r.passed = lo >= 6.0 && hi <= 10.0;
    r.detail = fmt("error ratio in [%.3f, %.3f] over 20 instances", lo, hi);
  });
}

OracleResult oracle_time_warp() {
  return timed(3, "time-warp equivalence", [](OracleResult& r) {
    const auto nmr = pipeline::dataset_defaults(HamiltonianKind::NmrZZ);
    const double b0 = nmr.system.coupling;
    const auto g = UniformGrid::from_horizon(nmr.system.dt, 0.0498);
    auto rng = fields::make_rng(2026, 3);
    const auto obs = ObservableSet::two_qubit_paulis();
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const auto f = fields::sample_gp_mixture(rng, g, nmr.generator.ranges).scaled(nmr.generator.scale, b0);
      const auto psi0 = product({random_bloch(rng), random_bloch(rng)});
      const auto direct = evolve_schrodinger(psi0, HamiltonianSpec::nmr(b0, f), TimeGrid::from_uniform(g), obs);
      const auto durations = warp_time_grid(f, b0, g.dt, g.n_steps);
      const auto labels = g.times();
      const auto warped = evolve_schrodinger_segments(psi0, HamiltonianSpec::nmr(b0, DrivingField::constant(b0, g)),
                                                      g.t_start, durations, 20, obs, labels);
      worst = std::max(worst, (direct.values - warped.values).cwiseAbs().maxCoeff());
    }
    r.passed = worst < 1e-8;
    r.detail = fmt("max observable difference %.2e over 20 fields", worst);
  });
}

OracleResult oracle_gp_statistics() {
  return timed(4, "GP sampler statistics", [](OracleResult& r) {
    fields::GPParams p;
    p.c0 = 2.0;
    p.sigma = 3.0;
    p.dt = 0.1;
    p.horizon = 5.0;
    const fields::GpSampler sampler(p);
    auto rng = fields::make_rng(2026, 4);
    const int lags[3] = {0, 5, 10};
    double acc[3] = {0, 0, 0};
    double cnt[3] = {0, 0, 0};
    constexpr int kSamples = 10000;
    for (int s = 0; s < kSamples; ++s) {
      const auto draw = sampler.sample(rng);
      const auto& v = draw.values();
      for (int l = 0; l < 3; ++l) {
        for (std::size_t k = 0; k + static_cast<std::size_t>(lags[l]) < v.size(); ++k) {
          acc[l] += v[k] * v[k + static_cast<std::size_t>(lags[l])];
          cnt[l] += 1.0;
        }
      }
    }
    double worst = 0.0;
    for (int l = 0; l < 3; ++l) {
      const double want = p.c0 * std::exp(-lags[l] * lags[l] * p.dt * p.dt / (2.0 * p.sigma * p.sigma));
      worst = std::max(worst, std::abs(acc[l] / cnt[l] - want) / want);
    }
    const auto n = p.grid().n_points();
    double degenerate = 0.0;
    const auto from_zero = sampler.sample(Eigen::VectorXd::Zero(n));
    for (double x : from_zero.values()) degenerate = std::max(degenerate, std::abs(x));
    auto zero = p;
    zero.c0 = 0.0;
    const auto flat = fields::sample_gp(zero, rng);
    for (double x : flat.values()) degenerate = std::max(degenerate, std::abs(x));
    r.passed = worst < 0.05 && degenerate == 0.0;
    r.detail = fmt("worst relative covariance error %.2e at lags {0,5,10}; degenerate max %.1e", worst, degenerate);
  });
}

OracleResult oracle_gradient_check() {
  return timed(5, "gradient check", [](OracleResult& r) {
    const auto sys = pipeline::SystemConfig::tfim(5);
    const pipeline::ModelShape shape;
    double worst = 0.0;
    int probes = 0;
    std::uint64_t seed = 50;
    for (auto dir : {neural::Direction::Dynamics, neural::Direction::Hamiltonian}) {
      const auto cfg = pipeline::model_config_for(sys, shape, dir);
      const auto m = neural::SequenceModel::initialized(cfg, ++seed);
      auto rng = fields::make_rng(2026, 5 + seed);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      auto random = [&](Eigen::Index rows, Eigen::Index cols) {
        Eigen::MatrixXd x(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
          for (Eigen::Index i = 0; i < rows; ++i) x(i, j) = u(rng);
        return x;
      };
      neural::Sequence in(10), target(10);
      for (auto& x : in) x = random(cfg.input_width, 2);
      for (auto& x : target) x = random(cfg.output_width, 2);
      const auto rep = neural::gradient_check(m, in, random(cfg.o0_width, 2), target, 100, 1e-5, seed);
      worst = std::max(worst, rep.max_relative_error);
      probes += rep.probes;
    }
    r.passed = probes == 200 && worst <= 1e-5;
    r.detail = fmt("max relative error %.2e over %.0f probes", worst, probes);
  });
}

OracleResult oracle_swap_frequency() {
  return timed(6, "SWAP frequency", [](OracleResult& r) {
    const double b0 = 12.75;
    const auto g = UniformGrid::from_horizon(1e-4, 0.2);
    const auto zero = DrivingField::constant(0.0, g);
    const auto s = evolve_schrodinger(product({{0, 0, -1}, {0, 0, 1}}), HamiltonianSpec::superconducting(b0, zero, zero),
                                      TimeGrid::from_uniform(g), ObservableSet({PauliString::parse("Z1", 2)}));
    std::vector<double> crossings;
    for (int k = 1; k <= g.n_steps; ++k) {
      const double a = s.values(k - 1, 0), b = s.values(k, 0);
      if ((a < 0) != (b < 0)) crossings.push_back(g.time(k - 1) + a / (a - b) * g.dt);
    }
    const double f = crossings.size() < 2 ? 0.0
                                          : 0.5 * static_cast<double>(crossings.size() - 1) /
                                                (crossings.back() - crossings.front());
    const double rel = std::abs(f / (2.0 * b0) - 1.0);
    r.passed = rel < 0.01;
    r.detail = fmt("measured %.4f MHz, expected %.4f MHz, relative error %.1e", f, 2.0 * b0, rel);
  });
}

std::vector<OracleResult> run_oracle_suite(const std::vector<int>& criteria, const pipeline::Logger& log) {
  std::vector<OracleResult> out;
  for (int c : criteria) {
    switch (c) {
      case 1: out.push_back(oracle_simulator()); break;
      case 2: out.push_back(oracle_expansion_order()); break;
      case 3: out.push_back(oracle_time_warp()); break;
      case 4: out.push_back(oracle_gp_statistics()); break;
      case 5: out.push_back(oracle_gradient_check()); break;
      case 6: out.push_back(oracle_swap_frequency()); break;
      default: throw std::invalid_argument("no oracle suite " + std::to_string(c));
    }
    if (log) log(out.back().name + ": " + (out.back().passed ? "pass" : "FAIL") + " (" + out.back().detail + ")");
  }
  return out;
}

}  // namespace hamflow::cli
