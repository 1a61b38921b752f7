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
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace hamflow::fields {

/// Uniform sample grid t_start + k*dt, k = 0..n_steps.
struct UniformGrid {
  double t_start = 0.0;
  double dt = 0.1;
  int n_steps = 150;

  static UniformGrid from_horizon(double dt, double horizon, double t_start = 0.0);

  int n_points() const { return n_steps + 1; }
  double time(int k) const { return t_start + k * dt; }
  double t_end() const { return time(n_steps); }
  std::vector<double> times() const;

  friend bool operator==(const UniformGrid&, const UniformGrid&) = default;
};

enum class Interpolation { Linear, Hold };

/// Generator descriptor carried alongside the samples.
struct FieldMeta {
  std::string kind = "custom";
  double c0 = 0.0;
  double sigma = 0.0;
  double amplitude = 0.0;
  double omega = 0.0;
  std::vector<std::pair<double, double>> steps;  // (time, height)
  std::uint64_t seed = 0;
};

void to_json(nlohmann::json& j, const FieldMeta& meta);
void from_json(const nlohmann::json& j, FieldMeta& meta);

/// Scalar control signal sampled on a uniform grid.
///
/// Between samples the signal is either linearly interpolated or held at the
/// most recent sample (left-closed steps). Outside the sampled interval the
/// end values are extended, for at most one grid spacing.
class DrivingField {
 public:
  DrivingField() = default;
  DrivingField(UniformGrid grid, std::vector<double> values, FieldMeta meta = {},
               Interpolation interpolation = Interpolation::Linear);

  /// A field that equals `value` at every time.
  static DrivingField constant(double value, const UniformGrid& grid);

  const UniformGrid& grid() const { return grid_; }
  std::vector<double> times() const { return grid_.times(); }
  const std::vector<double>& values() const { return values_; }
  const FieldMeta& meta() const { return meta_; }
  FieldMeta& meta() { return meta_; }
  Interpolation interpolation() const { return interpolation_; }
  std::size_t size() const { return values_.size(); }
  double dt() const { return grid_.dt; }
  double t_start() const { return grid_.t_start; }
  double t_end() const { return grid_.t_end(); }

  double value_at(double t) const;

  /// Exact integral over [a, b] of the interpolant: trapezoids for linear
  /// fields, rectangles for held ones.
  double integral(double a, double b) const;

  /// First n_points samples as a field on the shortened grid.
  DrivingField prefix(int n_points) const;

  DrivingField scaled(double factor, double offset = 0.0) const;

  void write_csv(const std::filesystem::path& path) const;

 private:
  UniformGrid grid_;
  std::vector<double> values_;
  FieldMeta meta_;
  Interpolation interpolation_ = Interpolation::Linear;
  bool constant_ = false;
};

void to_json(nlohmann::json& j, const DrivingField& field);
void from_json(const nlohmann::json& j, DrivingField& field);

}  // namespace hamflow::fields
