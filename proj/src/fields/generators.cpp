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

#include "hamflow/fields/generators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hamflow::fields {

Rng make_rng(std::uint64_t root_seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(root_seed), static_cast<std::uint32_t>(root_seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  return Rng(seq);
}

Eigen::MatrixXd gp_correlation_matrix(const GPParams& p) {
  if (!(p.c0 >= 0.0) || !(p.sigma > 0.0)) {
    throw std::invalid_argument("GPParams: need c0 >= 0 and sigma > 0");
  }
  const int n = p.grid().n_points();
  if (n < 2) throw std::invalid_argument("GPParams: need at least two grid points");
  Eigen::MatrixXd c(n, n);
  const double scale = p.dt * p.dt / (2.0 * p.sigma * p.sigma);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double lag = static_cast<double>(i - j);
      c(i, j) = p.c0 * std::exp(-lag * lag * scale);
    }
  }
  return c;
}

Eigen::MatrixXd gp_factor(const GPParams& p) {
  const Eigen::MatrixXd c = gp_correlation_matrix(p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("sample_gp: eigendecomposition failed");
  }
  Eigen::VectorXd root = solver.eigenvalues();
  for (auto& lambda : root) lambda = lambda < 1e-12 ? 0.0 : std::sqrt(lambda);
  return solver.eigenvectors() * root.asDiagonal();
}

GpSampler::GpSampler(const GPParams& p) : params_(p) {
  if (p.c0 > 0.0) {
    factor_ = gp_factor(p);
  } else {
    gp_correlation_matrix(p);  // validates the remaining parameters
  }
}

DrivingField GpSampler::sample(const Eigen::VectorXd& x) const {
  const UniformGrid grid = params_.grid();
  if (x.size() != grid.n_points()) throw std::invalid_argument("sample_gp: noise length mismatch");
  std::vector<double> values(static_cast<std::size_t>(grid.n_points()), 0.0);
  if (factor_.size() > 0) {
    const Eigen::VectorXd d = factor_ * x;
    std::copy(d.data(), d.data() + d.size(), values.begin());
  }
  FieldMeta meta;
  meta.kind = "gp";
  meta.c0 = params_.c0;
  meta.sigma = params_.sigma;
  return DrivingField(grid, std::move(values), std::move(meta));
}

DrivingField GpSampler::sample(Rng& rng) const {
  const int n = params_.grid().n_points();
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = normal(rng);
  return sample(x);
}

DrivingField sample_gp(const GPParams& p, const Eigen::VectorXd& x) {
  return GpSampler(p).sample(x);
}

DrivingField sample_gp(const GPParams& p, Rng& rng) { return GpSampler(p).sample(rng); }

DrivingField sample_gp_mixture(Rng& rng, const UniformGrid& grid, const MixtureRanges& ranges) {
  std::uniform_real_distribution<double> c0_dist(ranges.c0.lo, ranges.c0.hi);
  std::uniform_real_distribution<double> sigma_dist(ranges.sigma.lo, ranges.sigma.hi);
  GPParams p;
  p.c0 = c0_dist(rng);
  p.sigma = sigma_dist(rng);
  p.dt = grid.dt;
  p.horizon = grid.n_steps * grid.dt;
  p.t_start = grid.t_start;
  auto field = sample_gp(p, rng);
  field.meta().kind = "gp_mixture";
  return field;
}

DrivingField make_quench(std::vector<std::pair<double, double>> steps, const UniformGrid& grid) {
  if (steps.empty()) throw std::invalid_argument("make_quench: empty step list");
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (steps[k].first < grid.t_start - 1e-12 || steps[k].first > grid.t_end() + 1e-12) {
      throw std::invalid_argument("make_quench: step time outside the horizon");
    }
    if (k > 0 && steps[k].first < steps[k - 1].first) {
      throw std::invalid_argument("make_quench: step times not sorted");
    }
  }
  std::vector<double> values(static_cast<std::size_t>(grid.n_points()));
  const double tol = 1e-9 * grid.dt;
  std::size_t active = 0;
  for (int k = 0; k < grid.n_points(); ++k) {
    const double t = grid.time(k);
    while (active + 1 < steps.size() && steps[active + 1].first <= t + tol) ++active;
    values[static_cast<std::size_t>(k)] = steps[active].second;
  }
  FieldMeta meta;
  meta.kind = "quench";
  meta.steps = std::move(steps);
  return DrivingField(grid, std::move(values), std::move(meta), Interpolation::Hold);
}

DrivingField random_quench(Rng& rng, const UniformGrid& grid, Range heights) {
  std::uniform_int_distribution<int> count_dist(1, 3);
  std::uniform_real_distribution<double> height_dist(heights.lo, heights.hi);
  std::uniform_real_distribution<double> time_dist(grid.t_start, grid.t_end());
  const int switches = count_dist(rng);
  std::vector<double> times;
  for (int k = 0; k < switches; ++k) times.push_back(time_dist(rng));
  std::sort(times.begin(), times.end());
  std::vector<std::pair<double, double>> steps{{grid.t_start, height_dist(rng)}};
  for (double t : times) steps.emplace_back(t, height_dist(rng));
  return make_quench(std::move(steps), grid);
}

DrivingField make_periodic(double amplitude, double omega, const UniformGrid& grid) {
  std::vector<double> values(static_cast<std::size_t>(grid.n_points()));
  for (int k = 0; k < grid.n_points(); ++k) {
    values[static_cast<std::size_t>(k)] = amplitude * std::cos(omega * grid.time(k));
  }
  FieldMeta meta;
  meta.kind = "periodic";
  meta.amplitude = amplitude;
  meta.omega = omega;
  return DrivingField(grid, std::move(values), std::move(meta));
}

DrivingField random_periodic(Rng& rng, const UniformGrid& grid, Range amplitude, Range omega) {
  std::uniform_real_distribution<double> a_dist(amplitude.lo, amplitude.hi);
  std::uniform_real_distribution<double> w_dist(omega.lo, omega.hi);
  const double a = a_dist(rng);
  const double w = w_dist(rng);
  return make_periodic(a, w, grid);
}

}  // namespace hamflow::fields
