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

#include "hamflow/dynamics/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace hamflow::dynamics {

namespace {

std::uint64_t site_bit(int system_size, int site) {
  return std::uint64_t{1} << (system_size - 1 - site);
}

Complex i_power(int n) {
  switch (n & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

char axis_char(PauliAxis axis) {
  switch (axis) {
    case PauliAxis::X: return 'X';
    case PauliAxis::Y: return 'Y';
    case PauliAxis::Z: return 'Z';
  }
  return '?';
}

PauliString::PauliString(int system_size, std::vector<PauliFactor> factors)
    : system_size_(system_size), factors_(std::move(factors)) {
  if (system_size < 1 || system_size > 30) {
    throw std::invalid_argument("PauliString: system size out of range");
  }
  std::sort(factors_.begin(), factors_.end(),
            [](const PauliFactor& a, const PauliFactor& b) { return a.site < b.site; });
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    const auto& f = factors_[k];
    if (f.site < 0 || f.site >= system_size) {
      throw std::invalid_argument("PauliString: site index out of range");
    }
    if (k > 0 && factors_[k - 1].site == f.site) {
      throw std::invalid_argument("PauliString: repeated site index");
    }
    const auto bit = site_bit(system_size, f.site);
    if (f.axis != PauliAxis::Z) x_mask_ |= bit;
    if (f.axis != PauliAxis::X) z_mask_ |= bit;
    if (f.axis == PauliAxis::Y) ++y_count_;
  }
}

PauliString PauliString::parse(std::string_view name, int system_size) {
  if (name == "I") return PauliString(system_size, {});
  std::vector<PauliFactor> factors;
  std::size_t pos = 0;
  while (pos < name.size()) {
    PauliAxis axis;
    switch (std::toupper(static_cast<unsigned char>(name[pos]))) {
      case 'X': axis = PauliAxis::X; break;
      case 'Y': axis = PauliAxis::Y; break;
      case 'Z': axis = PauliAxis::Z; break;
      default:
        throw std::invalid_argument("PauliString: bad axis in '" + std::string(name) + "'");
    }
    ++pos;
    if (pos >= name.size() || !std::isdigit(static_cast<unsigned char>(name[pos]))) {
      throw std::invalid_argument("PauliString: missing site in '" + std::string(name) + "'");
    }
    int site = 0;
    while (pos < name.size() && std::isdigit(static_cast<unsigned char>(name[pos]))) {
      site = site * 10 + (name[pos] - '0');
      ++pos;
    }
    factors.push_back({site, axis});
  }
  if (factors.empty()) throw std::invalid_argument("PauliString: empty name");
  return PauliString(system_size, std::move(factors));
}

PauliString PauliString::single(int system_size, int site, PauliAxis axis) {
  return PauliString(system_size, {{site, axis}});
}

PauliString PauliString::pair(int system_size, int site_a, PauliAxis axis_a, int site_b,
                              PauliAxis axis_b) {
  return PauliString(system_size, {{site_a, axis_a}, {site_b, axis_b}});
}

std::string PauliString::name() const {
  if (factors_.empty()) return "I";
  std::string out;
  for (const auto& f : factors_) {
    out += axis_char(f.axis);
    out += std::to_string(f.site);
  }
  return out;
}

CMatrix PauliString::dense() const {
  const Eigen::Index dim = Eigen::Index{1} << system_size_;
  CMatrix m = CMatrix::Zero(dim, dim);
  const Complex base = i_power(y_count_);
  for (Eigen::Index b = 0; b < dim; ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    const double sign = (std::popcount(ub & z_mask_) & 1) ? -1.0 : 1.0;
    m(static_cast<Eigen::Index>(ub ^ x_mask_), b) = base * sign;
  }
  return m;
}

void PauliSum::add(Complex coefficient, const PauliString& op) {
  if (op.system_size() != system_size_) {
    throw std::invalid_argument("PauliSum: system size mismatch");
  }
  for (auto& term : terms_) {
    if (term.op == op) {
      term.coefficient += coefficient;
      return;
    }
  }
  terms_.push_back({coefficient, op});
}

bool PauliSum::is_hermitian(double tol) const {
  return std::all_of(terms_.begin(), terms_.end(), [tol](const PauliTerm& t) {
    return std::isfinite(t.coefficient.real()) && std::isfinite(t.coefficient.imag()) &&
           std::abs(t.coefficient.imag()) <= tol;
  });
}

double PauliSum::one_norm() const {
  double total = 0.0;
  for (const auto& t : terms_) total += std::abs(t.coefficient);
  return total;
}

CMatrix PauliSum::dense() const {
  const Eigen::Index dim = Eigen::Index{1} << system_size_;
  CMatrix m = CMatrix::Zero(dim, dim);
  for (const auto& t : terms_) m += t.coefficient * t.op.dense();
  return m;
}

void PauliSum::apply(const CVector& in, CVector& out) const {
  const Eigen::Index dim = in.size();
  out.setZero(dim);
  for (const auto& t : terms_) {
    const Complex c = t.coefficient * i_power(t.op.y_count());
    const auto x = t.op.x_mask();
    const auto z = t.op.z_mask();
    for (Eigen::Index b = 0; b < dim; ++b) {
      const auto ub = static_cast<std::uint64_t>(b);
      const Complex v = (std::popcount(ub & z) & 1) ? -c * in[b] : c * in[b];
      out[static_cast<Eigen::Index>(ub ^ x)] += v;
    }
  }
}

void PauliSum::apply(const CMatrix& in, CMatrix& out) const {
  const Eigen::Index dim = in.rows();
  out.setZero(dim, in.cols());
  for (const auto& t : terms_) {
    const Complex c = t.coefficient * i_power(t.op.y_count());
    const auto x = t.op.x_mask();
    const auto z = t.op.z_mask();
    for (Eigen::Index b = 0; b < dim; ++b) {
      const auto ub = static_cast<std::uint64_t>(b);
      const Complex phase = (std::popcount(ub & z) & 1) ? -c : c;
      out.row(static_cast<Eigen::Index>(ub ^ x)) += phase * in.row(b);
    }
  }
}

}  // namespace hamflow::dynamics
