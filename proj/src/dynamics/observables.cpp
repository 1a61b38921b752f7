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

#include "hamflow/dynamics/observables.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hamflow::dynamics {

void TimeGrid::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("TimeGrid: dt must be positive");
  if (n_steps < 1) throw std::invalid_argument("TimeGrid: need at least one step");
  if (substeps_per_dt < 1) throw std::invalid_argument("TimeGrid: substeps_per_dt must be >= 1");
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> out(static_cast<std::size_t>(n_steps) + 1);
  for (int k = 0; k <= n_steps; ++k) out[static_cast<std::size_t>(k)] = time(k);
  return out;
}

ObservableSet::ObservableSet(std::vector<PauliString> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].system_size() != entries_.front().system_size()) {
      throw std::invalid_argument("ObservableSet: mixed system sizes");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (entries_[i] == entries_[j]) {
        throw std::invalid_argument("ObservableSet: duplicate entry " + entries_[i].name());
      }
    }
  }
}

ObservableSet ObservableSet::tfim_default(int n_qubits) {
  constexpr PauliAxis axes[] = {PauliAxis::X, PauliAxis::Y, PauliAxis::Z};
  std::vector<PauliString> out;
  for (auto a : axes) out.push_back(PauliString::single(n_qubits, 0, a));
  for (int l = 1; l <= n_qubits / 2; ++l) {
    for (auto a : axes) {
      for (auto b : axes) out.push_back(PauliString::pair(n_qubits, 0, a, l, b));
    }
  }
  return ObservableSet(std::move(out));
}

ObservableSet ObservableSet::two_qubit_paulis() {
  std::vector<PauliString> out;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      if (a == 0 && b == 0) continue;
      std::vector<PauliFactor> factors;
      if (a > 0) factors.push_back({0, static_cast<PauliAxis>(a - 1)});
      if (b > 0) factors.push_back({1, static_cast<PauliAxis>(b - 1)});
      out.emplace_back(2, std::move(factors));
    }
  }
  return ObservableSet(std::move(out));
}

ObservableSet ObservableSet::from_names(const std::vector<std::string>& names, int n_qubits) {
  std::vector<PauliString> out;
  for (const auto& name : names) out.push_back(PauliString::parse(name, n_qubits));
  return ObservableSet(std::move(out));
}

std::vector<std::string> ObservableSet::names() const {
  std::vector<std::string> out;
  for (const auto& p : entries_) out.push_back(p.name());
  return out;
}

int ObservableSet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name() == name) return static_cast<int>(i);
  }
  return -1;
}

void ObservableSeries::write_csv(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << 't';
  for (const auto& name : observables.names()) os << ',' << name;
  os << '\n';
  char buf[40];
  for (std::size_t r = 0; r < times.size(); ++r) {
    std::snprintf(buf, sizeof buf, "%.17g", times[r]);
    os << buf;
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      std::snprintf(buf, sizeof buf, ",%.17g", values(static_cast<Eigen::Index>(r), c));
      os << buf;
    }
    os << '\n';
  }
}

ObservableSeries ObservableSeries::read_csv(const std::filesystem::path& path, int n_qubits) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(is, line);
  std::vector<std::string> names;
  {
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    if (cell != "t") throw std::runtime_error("series CSV: first column must be 't'");
    while (std::getline(ss, cell, ',')) names.push_back(cell);
  }
  ObservableSeries out;
  out.observables = ObservableSet::from_names(names, n_qubits);
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != names.size() + 1) throw std::runtime_error("series CSV: ragged row");
    rows.push_back(std::move(row));
  }
  out.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.times.push_back(rows[r][0]);
    for (std::size_t c = 0; c < names.size(); ++c) {
      out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c + 1];
    }
  }
  return out;
}

ObservableSeries ObservableSeries::prefix(int n_rows) const {
  if (n_rows < 0 || n_rows > values.rows()) {
    throw std::invalid_argument("ObservableSeries::prefix: bad row count");
  }
  return {std::vector<double>(times.begin(), times.begin() + n_rows), values.topRows(n_rows),
          observables};
}

}  // namespace hamflow::dynamics
