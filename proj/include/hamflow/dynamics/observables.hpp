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

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hamflow/dynamics/pauli.hpp"
#include "hamflow/fields/driving_field.hpp"

namespace hamflow::dynamics {

/// Sample grid t_start + k*dt (k = 0..n_steps) with integrator refinement.
struct TimeGrid {
  double t_start = 0.0;
  double dt = 0.1;
  int n_steps = 50;
  int substeps_per_dt = 20;

  static TimeGrid from_uniform(const fields::UniformGrid& g, int substeps = 20) {
    return {g.t_start, g.dt, g.n_steps, substeps};
  }

  void validate() const;
  double time(int k) const { return t_start + k * dt; }
  std::vector<double> times() const;
};

class ObservableSet {
 public:
  ObservableSet() = default;
  explicit ObservableSet(std::vector<PauliString> entries);

  /// sigma_0^a for a in {x,y,z}, then sigma_0^a sigma_l^b for l = 1..floor(N/2).
  static ObservableSet tfim_default(int n_qubits);
  /// {I,X,Y,Z}^{(x)2} without the identity, 15 entries.
  static ObservableSet two_qubit_paulis();
  static ObservableSet from_names(const std::vector<std::string>& names, int n_qubits);

  const std::vector<PauliString>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const PauliString& operator[](std::size_t i) const { return entries_[i]; }
  std::vector<std::string> names() const;
  /// Index of the entry with the given name, or -1.
  int index_of(const std::string& name) const;
  int system_size() const { return entries_.empty() ? 0 : entries_.front().system_size(); }

 private:
  std::vector<PauliString> entries_;
};

/// Observable expectation values on a time grid, one row per time.
struct ObservableSeries {
  std::vector<double> times;
  Eigen::MatrixXd values;
  ObservableSet observables;

  void write_csv(const std::filesystem::path& path) const;
  static ObservableSeries read_csv(const std::filesystem::path& path, int n_qubits);
  /// Rows [0, n_rows).
  ObservableSeries prefix(int n_rows) const;
};

}  // namespace hamflow::dynamics
