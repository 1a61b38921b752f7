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

#include "doctest.h"
#include "hamflow/dynamics/pauli.hpp"
#include "hamflow/dynamics/state.hpp"

using namespace hamflow::dynamics;

namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix pauli_matrix(char axis) {
  CMatrix m(2, 2);
  switch (axis) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m = CMatrix::Identity(2, 2);
  }
  return m;
}

}  // namespace

TEST_CASE("pauli strings parse and print by site order") {
  const auto p = PauliString::parse("Y2X0", 3);
  CHECK(p.name() == "X0Y2");
  CHECK(PauliString::parse("I", 4).is_identity());
  CHECK_THROWS_AS(PauliString::parse("X0X0", 2), std::invalid_argument);
  CHECK_THROWS_AS(PauliString::parse("X3", 3), std::invalid_argument);
  CHECK_THROWS_AS(PauliString::parse("Q1", 3), std::invalid_argument);
}

TEST_CASE("dense Pauli strings equal explicit Kronecker products") {
  const char* names[] = {"X0", "Y1", "Z2", "X0Y1", "Y0Z2", "X0Y1Z2", "Y0Y1Y2"};
  for (const char* name : names) {
    const auto p = PauliString::parse(name, 3);
    std::string per_site = "III";
    for (const auto& f : p.factors()) per_site[static_cast<std::size_t>(f.site)] = axis_char(f.axis);
    const CMatrix expected =
        kron(kron(pauli_matrix(per_site[0]), pauli_matrix(per_site[1])), pauli_matrix(per_site[2]));
    CHECK((p.dense() - expected).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("matrix-free application matches the dense operator") {
  PauliSum h(3);
  h.add(0.7, PauliString::parse("X0Z1", 3));
  h.add(-1.3, PauliString::parse("Y2", 3));
  h.add(0.25, PauliString::parse("Y0Y1", 3));
  CVector v = CVector::Random(8);
  CVector out;
  h.apply(v, out);
  CHECK((out - h.dense() * v).norm() < 1e-13);
  CMatrix m = CMatrix::Random(8, 8);
  CMatrix mout;
  h.apply(m, mout);
  CHECK((mout - h.dense() * m).norm() < 1e-12);
  CHECK(h.is_hermitian());
  h.add(Complex(0, 0.5), PauliString::parse("Z0", 3));
  CHECK_FALSE(h.is_hermitian());
}

TEST_CASE("product states from Bloch vectors") {
  const BlochVector north{0, 0, 1};
  auto s = product_state(std::span(&north, 1));
  CHECK(s.amplitudes[0] == Complex(1, 0));
  CHECK(std::abs(s.amplitudes[1]) == 0.0);

  const BlochVector plus_x{1, 0, 0};
  s = product_state(std::span(&plus_x, 1));
  CHECK(s.amplitudes[0].real() == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(s.amplitudes[1].real() == doctest::Approx(1 / std::sqrt(2.0)));

  const std::vector<BlochVector> south{{0, 0, -1}, {0, 0, -1}};
  s = product_state(south);
  CHECK(std::abs(s.amplitudes[3] - Complex(1, 0)) < 1e-15);
  CHECK(s.amplitudes.head(3).norm() < 1e-15);

  const BlochVector bad{1, 1, 0};
  CHECK_THROWS_AS(product_state(std::span(&bad, 1)), std::invalid_argument);
}

TEST_CASE("product state Bloch vectors round trip through expectations") {
  const std::vector<BlochVector> vs{uniform_bloch_vector(0.3, 0.8), uniform_bloch_vector(0.9, 0.1),
                                    uniform_bloch_vector(0.05, 0.55)};
  const auto s = product_state(vs);
  CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-14));
  for (int site = 0; site < 3; ++site) {
    const PauliAxis axes[] = {PauliAxis::X, PauliAxis::Y, PauliAxis::Z};
    for (int a = 0; a < 3; ++a) {
      const double e = expectation(s, PauliString::single(3, site, axes[a]));
      CHECK(e == doctest::Approx(vs[static_cast<std::size_t>(site)][static_cast<std::size_t>(a)]).epsilon(1e-12));
    }
    // |0> amplitude of each factor is real and nonnegative
  }
  CHECK(s.amplitudes[0].real() >= 0.0);
  CHECK(s.amplitudes[0].imag() == 0.0);
}

TEST_CASE("expectation values of basis states") {
  const BlochVector zero{0, 0, 1};
  auto s = product_state(std::span(&zero, 1));
  CHECK(expectation(s, PauliString::parse("Z0", 1)) == 1.0);

  const BlochVector plus{1, 0, 0};
  s = product_state(std::span(&plus, 1));
  CHECK(expectation(s, PauliString::parse("Z0", 1)) == doctest::Approx(0.0));

  const std::vector<BlochVector> one_zero{{0, 0, -1}, {0, 0, 1}};
  s = product_state(one_zero);
  CHECK(expectation(s, PauliString::parse("Z0Z1", 2)) == -1.0);
  const auto rho = DensityMatrix::from_pure(s);
  CHECK(expectation(rho, PauliString::parse("Z0Z1", 2)) == -1.0);
  CHECK(expectation(rho, PauliString::parse("Z0", 2)) == -1.0);
  CHECK(expectation(rho, PauliString::parse("Z1", 2)) == 1.0);
}

TEST_CASE("corrupted states are rejected by expectation") {
  QuantumState s{CVector::Zero(2), 1};
  s.amplitudes << Complex(1, 0), Complex(0.5, 0);
  // <X> = 2 Re(a* b) is real, but a non-Hermitian "density" leaks an imaginary part
  DensityMatrix rho{CMatrix::Zero(2, 2), 1};
  rho.entries(0, 1) = Complex(0, 0.3);
  CHECK_THROWS_AS(expectation(rho, PauliString::parse("X0", 1)), NumericalError);
  CHECK_THROWS_AS(expectation(s, PauliString::parse("X0", 2)), std::invalid_argument);
}
