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

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace hamflow::dynamics {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

enum class PauliAxis { X, Y, Z };

char axis_char(PauliAxis axis);

struct PauliFactor {
  int site = 0;
  PauliAxis axis = PauliAxis::Z;

  friend bool operator==(const PauliFactor&, const PauliFactor&) = default;
};

/// Tensor product of single-site Pauli operators on an N-qubit register.
/// Site 0 is the leftmost Kronecker factor, i.e. the most significant bit of a
/// computational-basis index. An empty factor list is the identity.
class PauliString {
 public:
  PauliString() = default;
  PauliString(int system_size, std::vector<PauliFactor> factors);

  /// Parses names like "Z0", "X0Y2" or "I" (identity).
  static PauliString parse(std::string_view name, int system_size);
  static PauliString single(int system_size, int site, PauliAxis axis);
  static PauliString pair(int system_size, int site_a, PauliAxis axis_a,
                          int site_b, PauliAxis axis_b);

  int system_size() const { return system_size_; }
  const std::vector<PauliFactor>& factors() const { return factors_; }
  bool is_identity() const { return factors_.empty(); }

  /// Factors sorted by site, e.g. "X0Y2"; the identity is "I".
  std::string name() const;

  // Bit masks over basis indices: P|b> = i^{n_y} (-1)^{|b & z|} |b ^ x>.
  std::uint64_t x_mask() const { return x_mask_; }
  std::uint64_t z_mask() const { return z_mask_; }
  int y_count() const { return y_count_; }

  CMatrix dense() const;

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.system_size_ == b.system_size_ && a.x_mask_ == b.x_mask_ &&
           a.z_mask_ == b.z_mask_;
  }

 private:
  int system_size_ = 0;
  std::vector<PauliFactor> factors_;
  std::uint64_t x_mask_ = 0;
  std::uint64_t z_mask_ = 0;
  int y_count_ = 0;
};

struct PauliTerm {
  Complex coefficient;
  PauliString op;
};

/// Linear combination of Pauli strings. A Hamiltonian is a PauliSum whose
/// coefficients are all real.
class PauliSum {
 public:
  PauliSum() = default;
  explicit PauliSum(int system_size) : system_size_(system_size) {}

  void add(Complex coefficient, const PauliString& op);
  void set_coefficient(std::size_t index, Complex coefficient) {
    terms_[index].coefficient = coefficient;
  }

  int system_size() const { return system_size_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }

  bool is_hermitian(double tol = 1e-12) const;
  /// Sum of |c_a|; an upper bound on the spectral radius.
  double one_norm() const;

  CMatrix dense() const;

  /// out = (*this) * in, without forming the dense matrix.
  void apply(const CVector& in, CVector& out) const;
  /// out = (*this) * in for every column of in.
  void apply(const CMatrix& in, CMatrix& out) const;

 private:
  int system_size_ = 0;
  std::vector<PauliTerm> terms_;
};

}  // namespace hamflow::dynamics
