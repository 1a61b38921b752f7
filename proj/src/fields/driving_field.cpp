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

#include "hamflow/fields/driving_field.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace hamflow::fields {

UniformGrid UniformGrid::from_horizon(double dt, double horizon, double t_start) {
  if (!(dt > 0.0) || !(horizon > 0.0)) {
    throw std::invalid_argument("UniformGrid: dt and horizon must be positive");
  }
  const double steps = horizon / dt;
  const long rounded = std::lround(steps);
  if (std::abs(steps - static_cast<double>(rounded)) > 1e-9 * std::max(1.0, steps)) {
    throw std::invalid_argument("UniformGrid: horizon is not a multiple of dt");
  }
  return UniformGrid{t_start, dt, static_cast<int>(rounded)};
}

std::vector<double> UniformGrid::times() const {
  std::vector<double> out(static_cast<std::size_t>(n_points()));
  for (int k = 0; k < n_points(); ++k) out[static_cast<std::size_t>(k)] = time(k);
  return out;
}

void to_json(nlohmann::json& j, const FieldMeta& meta) {
  j = nlohmann::json{{"kind", meta.kind},           {"c0", meta.c0},
                     {"sigma", meta.sigma},         {"amplitude", meta.amplitude},
                     {"omega", meta.omega},         {"steps", meta.steps},
                     {"seed", meta.seed}};
}

void from_json(const nlohmann::json& j, FieldMeta& meta) {
  meta.kind = j.value("kind", std::string("custom"));
  meta.c0 = j.value("c0", 0.0);
  meta.sigma = j.value("sigma", 0.0);
  meta.amplitude = j.value("amplitude", 0.0);
  meta.omega = j.value("omega", 0.0);
  meta.steps = j.value("steps", std::vector<std::pair<double, double>>{});
  meta.seed = j.value("seed", std::uint64_t{0});
}

DrivingField::DrivingField(UniformGrid grid, std::vector<double> values, FieldMeta meta,
                           Interpolation interpolation)
    : grid_(grid), values_(std::move(values)), meta_(std::move(meta)),
      interpolation_(interpolation) {
  if (!(grid_.dt > 0.0) || grid_.n_steps < 0) {
    throw std::invalid_argument("DrivingField: invalid grid");
  }
  if (values_.size() != static_cast<std::size_t>(grid_.n_points())) {
    throw std::invalid_argument("DrivingField: value count does not match grid");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("DrivingField: non-finite value");
  }
}

DrivingField DrivingField::constant(double value, const UniformGrid& grid) {
  FieldMeta meta;
  meta.kind = "constant";
  meta.amplitude = value;
  DrivingField f(grid, std::vector<double>(static_cast<std::size_t>(grid.n_points()), value),
                 meta, Interpolation::Hold);
  f.constant_ = true;
  return f;
}

double DrivingField::value_at(double t) const {
  if (values_.empty()) throw std::logic_error("DrivingField: empty field");
  if (constant_) return values_.front();
  if (!std::isfinite(t)) throw std::out_of_range("DrivingField: field not defined at t");
  const double slack = grid_.dt * (1.0 + 1e-9);
  if (t < grid_.t_start - slack || t > t_end() + slack) {
    throw std::out_of_range("DrivingField: field not defined at t=" + std::to_string(t));
  }
  if (t <= grid_.t_start) return values_.front();
  if (t >= t_end()) return values_.back();
  const double u = (t - grid_.t_start) / grid_.dt;
  if (interpolation_ == Interpolation::Hold) {
    auto k = static_cast<std::size_t>(std::floor(u + 1e-9));
    return values_[std::min(k, values_.size() - 1)];
  }
  auto k = static_cast<std::size_t>(std::floor(u));
  if (k + 1 >= values_.size()) return values_.back();
  const double frac = u - static_cast<double>(k);
  return values_[k] + (values_[k + 1] - values_[k]) * frac;
}

namespace {

// Integral from t_start to t of the interpolant (piecewise linear, or held from
// the left), with the end values held constant outside the grid.
double cumulative(const DrivingField& f, double t) {
  const auto& v = f.values();
  const double t0 = f.t_start();
  const double dt = f.dt();
  if (t <= t0) return (t - t0) * v.front();
  const double u = (t - t0) / dt;
  const auto n_intervals = v.size() - 1;
  double total = 0.0;
  std::size_t k = 0;
  const bool hold = f.interpolation() == Interpolation::Hold;
  for (; k < n_intervals && static_cast<double>(k + 1) <= u; ++k) {
    total += (hold ? v[k] : 0.5 * (v[k] + v[k + 1])) * dt;
  }
  if (k >= n_intervals) return total + (t - f.t_end()) * v.back();
  const double frac = u - static_cast<double>(k);
  if (hold) return total + v[k] * frac * dt;
  const double end_value = v[k] + (v[k + 1] - v[k]) * frac;
  return total + 0.5 * (v[k] + end_value) * frac * dt;
}

}  // namespace

double DrivingField::integral(double a, double b) const {
  if (values_.empty()) throw std::logic_error("DrivingField: empty field");
  if (constant_) return (b - a) * values_.front();
  return cumulative(*this, b) - cumulative(*this, a);
}

DrivingField DrivingField::prefix(int n_points) const {
  if (n_points < 1 || n_points > grid_.n_points()) {
    throw std::invalid_argument("DrivingField::prefix: bad point count");
  }
  UniformGrid g{grid_.t_start, grid_.dt, n_points - 1};
  DrivingField out(g, std::vector<double>(values_.begin(), values_.begin() + n_points), meta_,
                   interpolation_);
  out.constant_ = constant_;
  return out;
}

DrivingField DrivingField::scaled(double factor, double offset) const {
  DrivingField out = *this;
  for (auto& v : out.values_) v = offset + factor * v;
  return out;
}

void DrivingField::write_csv(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << "t,B\n";
  char buf[64];
  for (int k = 0; k < grid_.n_points(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", grid_.time(k),
                  values_[static_cast<std::size_t>(k)]);
    os << buf;
  }
}

void to_json(nlohmann::json& j, const DrivingField& field) {
  j = nlohmann::json{
      {"t_start", field.grid().t_start},
      {"dt", field.grid().dt},
      {"n_steps", field.grid().n_steps},
      {"interpolation", field.interpolation() == Interpolation::Hold ? "hold" : "linear"},
      {"values", field.values()},
      {"meta", field.meta()}};
}

void from_json(const nlohmann::json& j, DrivingField& field) {
  UniformGrid g{j.at("t_start").get<double>(), j.at("dt").get<double>(),
                j.at("n_steps").get<int>()};
  auto meta = j.at("meta").get<FieldMeta>();
  const auto interp =
      j.value("interpolation", std::string("linear")) == "hold" ? Interpolation::Hold
                                                                 : Interpolation::Linear;
  auto values = j.at("values").get<std::vector<double>>();
  if (meta.kind == "constant") {
    field = DrivingField::constant(values.empty() ? 0.0 : values.front(), g);
    return;
  }
  field = DrivingField(g, std::move(values), std::move(meta), interp);
}

}  // namespace hamflow::fields
