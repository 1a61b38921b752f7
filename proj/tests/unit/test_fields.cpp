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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hamflow/fields/generators.hpp"

using namespace hamflow::fields;

TEST_CASE("correlation matrix entries") {
  GPParams p{4.0, 2.5, 0.1, 5.0};
  auto c = gp_correlation_matrix(p);
  CHECK(c.rows() == 51);
  for (Eigen::Index i = 0; i < c.rows(); ++i) CHECK(c(i, i) == 4.0);
  CHECK((c - c.transpose()).norm() == 0.0);

  p = {1.5, 1e6, 0.1, 5.0};
  c = gp_correlation_matrix(p);
  CHECK((c.array() - 1.5).abs().maxCoeff() < 1e-9);

  p = {1.0, 1.0, 0.1, 5.0};
  c = gp_correlation_matrix(p);
  CHECK(c(3, 13) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(c(13, 3) == doctest::Approx(0.6065306597).epsilon(1e-9));

  CHECK_THROWS_AS(gp_correlation_matrix({1.0, 0.0, 0.1, 5.0}), std::invalid_argument);
}

TEST_CASE("degenerate GP draws are exactly zero") {
  GPParams p{2.0, 3.0, 0.1, 15.0};
  const auto zero = sample_gp(p, Eigen::VectorXd::Zero(151));
  for (double v : zero.values()) CHECK(v == 0.0);

  p.c0 = 0.0;
  auto rng = make_rng(1, 0);
  const auto flat = sample_gp(p, rng);
  for (double v : flat.values()) CHECK(v == 0.0);
}

TEST_CASE("GP covariance and stationarity") {
  const GPParams p{2.0, 3.0, 0.1, 15.0};
  const GpSampler sampler(p);
  const auto c = gp_correlation_matrix(p);
  constexpr int kSamples = 10000;
  const int n = p.grid().n_points();
  Eigen::MatrixXd draws(kSamples, n);
  auto rng = make_rng(2024, 4);
  for (int s = 0; s < kSamples; ++s) {
    const auto f = sampler.sample(rng);
    for (int k = 0; k < n; ++k) draws(s, k) = f.values()[static_cast<std::size_t>(k)];
  }
  for (int lag : {0, 5, 10}) {
    double acc = 0.0;
    int count = 0;
    for (int k = 0; k + lag < n; ++k) {
      acc += draws.col(k).dot(draws.col(k + lag));
      count += kSamples;
    }
    const double empirical = acc / count;
    CHECK(std::abs(empirical - c(0, lag)) / c(0, lag) < 0.05);
  }
  const double bound = 3.0 * std::sqrt(p.c0 / kSamples);
  const Eigen::VectorXd mean = draws.colwise().mean();
  CHECK(mean.cwiseAbs().maxCoeff() <= bound);
}

TEST_CASE("GP mixture ranges, magnitude and determinism") {
  const auto grid = UniformGrid::from_horizon(0.1, 15.0);
  auto rng_a = make_rng(77, 3);
  auto rng_b = make_rng(77, 3);
  const auto a = sample_gp_mixture(rng_a, grid);
  const auto b = sample_gp_mixture(rng_b, grid);
  CHECK(a.values() == b.values());
  CHECK(a.grid() == grid);

  auto rng = make_rng(5, 0);
  int large = 0;
  constexpr int kDraws = 2000;
  for (int i = 0; i < kDraws; ++i) {
    const auto f = sample_gp_mixture(rng, grid);
    CHECK(f.meta().c0 >= 0.0);
    CHECK(f.meta().c0 <= 4.0);
    CHECK(f.meta().sigma >= 1.0);
    CHECK(f.meta().sigma <= 9.0);
    double peak = 0.0;
    for (double v : f.values()) peak = std::max(peak, std::abs(v));
    if (peak > 6.0) ++large;
  }
  CHECK(static_cast<double>(large) / kDraws < 0.02);
}

TEST_CASE("quench fields use left-closed steps") {
  const auto grid = UniformGrid::from_horizon(0.1, 15.0);
  const auto single = make_quench({{0.0, 2.0}}, grid);
  for (double v : single.values()) CHECK(v == 2.0);

  const auto two = make_quench({{0.0, 1.0}, {5.0, -1.0}}, grid);
  CHECK(two.values()[49] == 1.0);
  CHECK(two.values()[50] == -1.0);
  CHECK(two.value_at(4.9) == 1.0);
  CHECK(two.value_at(4.95) == 1.0);
  CHECK(two.value_at(5.0) == -1.0);

  CHECK_THROWS_AS(make_quench({}, grid), std::invalid_argument);
  CHECK_THROWS_AS(make_quench({{0.0, 1.0}, {20.0, 2.0}}, grid), std::invalid_argument);

  auto rng = make_rng(9, 1);
  for (int i = 0; i < 200; ++i) {
    const auto q = random_quench(rng, grid);
    CHECK(q.grid() == grid);
    for (double v : q.values()) {
      CHECK(v >= -3.0);
      CHECK(v <= 3.0);
    }
  }
}

TEST_CASE("periodic fields") {
  const UniformGrid grid{0.0, 0.5, 8};
  const auto zero = make_periodic(0.0, 1.3, grid);
  for (double v : zero.values()) CHECK(v == 0.0);
  const auto flat = make_periodic(2.0, 0.0, grid);
  for (double v : flat.values()) CHECK(v == 2.0);
  const auto alt = make_periodic(1.0, std::numbers::pi, grid);
  const double expected[] = {1, 0, -1, 0, 1, 0, -1, 0, 1};
  for (std::size_t k = 0; k < alt.size(); ++k) {
    CHECK(alt.values()[k] == doctest::Approx(expected[k]).epsilon(1e-12).scale(1.0));
  }
  auto rng = make_rng(3, 3);
  for (int i = 0; i < 100; ++i) {
    const auto f = random_periodic(rng, grid);
    CHECK(std::abs(f.meta().amplitude) <= 3.0);
    CHECK(f.meta().omega >= 0.1);
    CHECK(f.meta().omega <= 4.0);
  }
}

TEST_CASE("field interpolation, extension and integral") {
  const UniformGrid grid{0.0, 1.0, 3};
  const DrivingField f(grid, {0.0, 2.0, 2.0, -2.0});
  CHECK(f.value_at(0.5) == doctest::Approx(1.0));
  CHECK(f.value_at(2.25) == doctest::Approx(1.0));
  CHECK(f.value_at(-0.5) == 0.0);
  CHECK(f.value_at(3.5) == -2.0);
  CHECK_THROWS_AS(f.value_at(5.0), std::out_of_range);
  CHECK(f.integral(0.0, 3.0) == doctest::Approx(1.0 + 2.0 + 0.0));
  CHECK(f.integral(0.5, 1.5) == doctest::Approx(0.75 + 1.0));
  const DrivingField held(grid, {0.0, 2.0, 2.0, -2.0}, {}, Interpolation::Hold);
  CHECK(held.integral(0.0, 3.0) == doctest::Approx(4.0));
  CHECK(held.integral(0.5, 2.5) == doctest::Approx(3.0));
  CHECK(held.integral(2.5, 3.5) == doctest::Approx(1.0 - 1.0));
  CHECK_THROWS_AS(DrivingField(grid, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(DrivingField(grid, {0.0, 1.0, NAN, 0.0}), std::invalid_argument);

  nlohmann::json j = f;
  const auto back = j.get<DrivingField>();
  CHECK(back.values() == f.values());
  CHECK(back.grid() == f.grid());
}
