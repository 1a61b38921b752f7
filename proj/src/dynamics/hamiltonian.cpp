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

#include "hamflow/dynamics/hamiltonian.hpp"

#include <numbers>
#include <stdexcept>

namespace hamflow::dynamics {

std::string to_string(HamiltonianKind kind) {
  switch (kind) {
    case HamiltonianKind::TfimRing: return "tfim_ring";
    case HamiltonianKind::NmrZZ: return "nmr_zz";
    case HamiltonianKind::ScSwapDetuned: return "sc_swap_detuned";
    case HamiltonianKind::Custom: return "custom";
  }
  throw std::invalid_argument("unknown Hamiltonian kind");
}

HamiltonianKind hamiltonian_kind_from_string(const std::string& name) {
  if (name == "tfim_ring" || name == "tfim") return HamiltonianKind::TfimRing;
  if (name == "nmr_zz" || name == "nmr") return HamiltonianKind::NmrZZ;
  if (name == "sc_swap_detuned" || name == "sc") return HamiltonianKind::ScSwapDetuned;
  if (name == "custom") return HamiltonianKind::Custom;
  throw std::invalid_argument("unknown Hamiltonian kind '" + name + "'");
}

HamiltonianSpec HamiltonianSpec::tfim(int n_qubits, double j, fields::DrivingField b) {
  HamiltonianSpec spec{HamiltonianKind::TfimRing, n_qubits, j, {std::move(b)}};
  spec.validate();
  return spec;
}

HamiltonianSpec HamiltonianSpec::nmr(double b0, fields::DrivingField b) {
  HamiltonianSpec spec{HamiltonianKind::NmrZZ, 2, b0, {std::move(b)}};
  spec.validate();
  return spec;
}

HamiltonianSpec HamiltonianSpec::superconducting(double b0, fields::DrivingField delta1,
                                                 fields::DrivingField delta2) {
  HamiltonianSpec spec{HamiltonianKind::ScSwapDetuned, 2, b0,
                       {std::move(delta1), std::move(delta2)}};
  spec.validate();
  return spec;
}

HamiltonianSpec HamiltonianSpec::custom(PauliSum terms) {
  HamiltonianSpec spec;
  spec.kind = HamiltonianKind::Custom;
  spec.n_qubits = terms.system_size();
  spec.static_terms = std::move(terms);
  spec.validate();
  return spec;
}

void HamiltonianSpec::validate() const {
  switch (kind) {
    case HamiltonianKind::TfimRing:
      if (n_qubits < 3) throw std::invalid_argument("TFIM ring needs at least 3 qubits");
      if (drives.size() != 1) throw std::invalid_argument("TFIM needs one drive B(t)");
      return;
    case HamiltonianKind::NmrZZ:
      if (n_qubits != 2) throw std::invalid_argument("NMR ZZ model has exactly 2 qubits");
      if (drives.size() != 1) throw std::invalid_argument("NMR model needs one drive B(t)");
      return;
    case HamiltonianKind::ScSwapDetuned:
      if (n_qubits != 2) throw std::invalid_argument("SC model has exactly 2 qubits");
      if (drives.size() != 2) throw std::invalid_argument("SC model needs two detuning drives");
      return;
    case HamiltonianKind::Custom:
      if (n_qubits < 1 || static_terms.system_size() != n_qubits) {
        throw std::invalid_argument("custom Hamiltonian: size mismatch");
      }
      if (!static_terms.is_hermitian()) {
        throw std::invalid_argument("custom Hamiltonian: coefficients must be real");
      }
      return;
  }
  throw std::invalid_argument("unknown Hamiltonian kind");
}

double propagator_scale(HamiltonianKind kind) {
  switch (kind) {
    case HamiltonianKind::TfimRing:
    case HamiltonianKind::NmrZZ:
    case HamiltonianKind::Custom: return 1.0;
    case HamiltonianKind::ScSwapDetuned: return 2.0 * std::numbers::pi;
  }
  throw std::invalid_argument("unknown Hamiltonian kind");
}

HamiltonianSampler::HamiltonianSampler(const HamiltonianSpec& spec)
    : spec_(&spec), terms_(spec.n_qubits) {
  spec.validate();
  const int n = spec.n_qubits;
  switch (spec.kind) {
    case HamiltonianKind::TfimRing:
      for (int i = 0; i < n; ++i) {
        terms_.add(-spec.coupling,
                   PauliString::pair(n, i, PauliAxis::Z, (i + 1) % n, PauliAxis::Z));
      }
      for (int i = 0; i < n; ++i) terms_.add(0.0, PauliString::single(n, i, PauliAxis::X));
      break;
    case HamiltonianKind::NmrZZ:
      terms_.add(0.0, PauliString::pair(n, 0, PauliAxis::Z, 1, PauliAxis::Z));
      break;
    case HamiltonianKind::ScSwapDetuned:
      terms_.add(0.5 * spec.coupling, PauliString::pair(n, 0, PauliAxis::X, 1, PauliAxis::X));
      terms_.add(0.5 * spec.coupling, PauliString::pair(n, 0, PauliAxis::Y, 1, PauliAxis::Y));
      terms_.add(0.0, PauliString::single(n, 0, PauliAxis::Z));
      terms_.add(0.0, PauliString::single(n, 1, PauliAxis::Z));
      break;
    case HamiltonianKind::Custom:
      terms_ = spec.static_terms;
      break;
  }
}

const PauliSum& HamiltonianSampler::at(double t) {
  const auto& spec = *spec_;
  switch (spec.kind) {
    case HamiltonianKind::TfimRing: {
      const double b = spec.drives[0].value_at(t);
      for (int i = 0; i < spec.n_qubits; ++i) {
        terms_.set_coefficient(static_cast<std::size_t>(spec.n_qubits + i), -b);
      }
      break;
    }
    case HamiltonianKind::NmrZZ:
      terms_.set_coefficient(0, 0.5 * std::numbers::pi * spec.drives[0].value_at(t));
      break;
    case HamiltonianKind::ScSwapDetuned:
      terms_.set_coefficient(2, spec.drives[0].value_at(t));
      terms_.set_coefficient(3, spec.drives[1].value_at(t));
      break;
    case HamiltonianKind::Custom:
      break;
  }
  return terms_;
}

PauliSum hamiltonian_terms(const HamiltonianSpec& spec, double t) {
  HamiltonianSampler sampler(spec);
  return sampler.at(t);
}

CMatrix build_hamiltonian(const HamiltonianSpec& spec, double t) {
  return hamiltonian_terms(spec, t).dense();
}

}  // namespace hamflow::dynamics
