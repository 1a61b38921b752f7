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
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hamflow/fields/driving_field.hpp"

namespace hamflow::fields {

using Rng = std::mt19937_64;

/// Independent stream for (root seed, stream id); identical inputs always
/// produce an identical engine state.
Rng make_rng(std::uint64_t root_seed, std::uint64_t stream_id);

/// Gaussian-process parameters: correlation amplitude c0 and correlation time
/// sigma on a grid of spacing dt covering [t_start, t_start + horizon].
struct GPParams {
  double c0 = 1.0;
  double sigma = 1.0;
  double dt = 0.1;
  double horizon = 15.0;
  double t_start = 0.0;

  UniformGrid grid() const { return UniformGrid::from_horizon(dt, horizon, t_start); }
};

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

struct MixtureRanges {
  Range c0{0.0, 4.0};
  Range sigma{1.0, 9.0};
};

/// C_nm = c0 exp(-(n-m)^2 dt^2 / (2 sigma^2)).
Eigen::MatrixXd gp_correlation_matrix(const GPParams& p);

/// Q sqrt(Lambda) for C = Q Lambda Q^T, eigenvalues below 1e-12 clamped to 0.
Eigen::MatrixXd gp_factor(const GPParams& p);

/// Caches the factor of one correlation matrix for repeated draws.
class GpSampler {
 public:
  explicit GpSampler(const GPParams& p);
  DrivingField sample(Rng& rng) const;
  DrivingField sample(const Eigen::VectorXd& x) const;
  const GPParams& params() const { return params_; }

 private:
  GPParams params_;
  Eigen::MatrixXd factor_;
};

/// d = Q sqrt(Lambda) x for a caller-supplied standard-normal vector x.
DrivingField sample_gp(const GPParams& p, const Eigen::VectorXd& x);
DrivingField sample_gp(const GPParams& p, Rng& rng);

/// Draws c0 and sigma uniformly from `ranges`, then samples the process.
DrivingField sample_gp_mixture(Rng& rng, const UniformGrid& grid,
                               const MixtureRanges& ranges = {});

/// Piecewise-constant field; each height applies from its step time onward.
/// The first step defines the value from t_start.
DrivingField make_quench(std::vector<std::pair<double, double>> steps, const UniformGrid& grid);

/// Heights uniform in `heights`, 1 to 3 switch times uniform over the grid.
DrivingField random_quench(Rng& rng, const UniformGrid& grid, Range heights = {-3.0, 3.0});

/// A cos(omega t) sampled on the grid.
DrivingField make_periodic(double amplitude, double omega, const UniformGrid& grid);

DrivingField random_periodic(Rng& rng, const UniformGrid& grid, Range amplitude = {-3.0, 3.0},
                             Range omega = {0.1, 4.0});

}  // namespace hamflow::fields
