// Copyright 2026 The Pulseforge Authors.
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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "pulseforge/qcore.hpp"

using namespace pulseforge;

namespace {

CMatrix diff(const CMatrix& a, const CMatrix& b) { return a - b; }

}  // namespace

TEST_CASE("kron identity and Pauli cases") {
  CMatrix i2 = CMatrix::identity(2);
  CMatrix i4 = kron(i2, i2);
  REQUIRE(max_abs(diff(i4, CMatrix::identity(4))) == 0.0);

  CMatrix xi = kron(pauli_x(), i2);
  // Anti-diagonal 2x2 identity blocks.
  REQUIRE(xi(0, 2) == Complex(1.0));
  REQUIRE(xi(1, 3) == Complex(1.0));
  REQUIRE(xi(2, 0) == Complex(1.0));
  REQUIRE(xi(3, 1) == Complex(1.0));
  REQUIRE(xi(0, 0) == Complex(0.0));

  CMatrix zz = kron(pauli_z(), pauli_z());
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      const double expect = (i == j) ? ((i == 0 || i == 3) ? 1.0 : -1.0) : 0.0;
      REQUIRE(zz(i, j) == Complex(expect));
    }
}

TEST_CASE("kron definition holds elementwise on random input") {
  Rng rng(11);
  CMatrix a = oracles::random_hermitian(3, rng);
  CMatrix b = oracles::random_hermitian(2, rng);
  CMatrix c = kron(a, b);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < 2; ++l)
          REQUIRE(std::abs(c(i * 2 + k, j * 2 + l) - a(i, j) * b(k, l)) < 1e-15);
}

TEST_CASE("kron rejects capacity overflow") {
  CMatrix big = CMatrix::identity(kMaxDenseDim / 2);
  CMatrix small = CMatrix::identity(4);
  REQUIRE_THROWS_AS(kron(big, small), CapacityError);
}

TEST_CASE("matexp_hermitian zero matrix gives identity") {
  CMatrix z = CMatrix::zeros(3);
  CMatrix u = matexp_hermitian(z, 2.5);
  REQUIRE(max_abs(diff(u, CMatrix::identity(3))) < 1e-14);
}

TEST_CASE("matexp_hermitian of (pi/2)X over t=1 is -iX up to global phase") {
  CMatrix h = Complex(M_PI / 2.0) * pauli_x();
  CMatrix u = matexp_hermitian(h, 1.0);
  // exp(-i (pi/2) X) = cos(pi/2) I - i sin(pi/2) X = -iX exactly.
  CMatrix expect = Complex(0.0, -1.0) * pauli_x();
  REQUIRE(max_abs(diff(u, expect)) < 1e-12);
}

TEST_CASE("matexp_hermitian matches Taylor-series oracle on random 4x4") {
  Rng rng(42);
  CMatrix h = oracles::random_hermitian(4, rng);
  CMatrix u = matexp_hermitian(h, 0.5);
  CMatrix oracle = oracles::taylor_matexp(h, 0.5, 20);
  REQUIRE(max_abs(diff(u, oracle)) < 1e-8);
}

TEST_CASE("matexp_hermitian rejects non-Hermitian input") {
  CMatrix m(2, 2);
  m(0, 1) = 1.0;  // strictly upper triangular
  REQUIRE_THROWS_AS(matexp_hermitian(m, 1.0), ValidationError);
}

TEST_CASE("unitarity of matexp outputs on random Hermitian matrices") {
  Rng rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 2 + (rng.next_u64() % 5);
    CMatrix h = oracles::random_hermitian(n, rng);
    CMatrix u = matexp_hermitian(h, rng.uniform(0.0, 3.0));
    REQUIRE(unitarity_residual(u) <= 1e-9);
  }
}

TEST_CASE("pauli_matrix trivial cases") {
  CMatrix ii = pauli_matrix(PauliTerm(1.0, "II"));
  REQUIRE(max_abs(diff(ii, CMatrix::identity(4))) == 0.0);

  CMatrix zx = pauli_matrix(PauliTerm(0.5, "ZX"));
  CMatrix expect = Complex(0.5) * kron(pauli_z(), pauli_x());
  REQUIRE(max_abs(diff(zx, expect)) == 0.0);

  CMatrix my = pauli_matrix(PauliTerm(-1.0, "Y"));
  REQUIRE(max_abs(diff(my, Complex(-1.0) * pauli_y())) == 0.0);
}

TEST_CASE("expectation trivial and linearity") {
  StateVector zero = StateVector::basis_state(2, 0);
  ObservableSum z(1, {PauliTerm(1.0, "Z")});
  REQUIRE(expectation(zero, z) == Catch::Approx(1.0));

  StateVector plus(2);
  plus.amplitudes = {Complex(1 / std::sqrt(2.0)), Complex(1 / std::sqrt(2.0))};
  ObservableSum x(1, {PauliTerm(1.0, "X")});
  REQUIRE(expectation(plus, x) == Catch::Approx(1.0));

  // Linearity over random state and observables.
  Rng rng(3);
  StateVector psi(4);
  for (auto& a : psi.amplitudes) a = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
  psi.normalize();
  ObservableSum a(2, {PauliTerm(0.7, "XZ"), PauliTerm(-0.2, "YY")});
  ObservableSum b(2, {PauliTerm(1.3, "ZI"), PauliTerm(0.4, "XX")});
  const double alpha = 0.37, beta = -1.21;
  std::vector<PauliTerm> combined;
  for (auto t : a.terms) combined.emplace_back(alpha * t.coefficient, t.letters);
  for (auto t : b.terms) combined.emplace_back(beta * t.coefficient, t.letters);
  ObservableSum ab(2, combined);
  REQUIRE(expectation(psi, ab) ==
          Catch::Approx(alpha * expectation(psi, a) + beta * expectation(psi, b)).margin(1e-10));
}

TEST_CASE("expectation agrees with dense matrix route") {
  Rng rng(9);
  StateVector psi(8);
  for (auto& a : psi.amplitudes) a = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
  psi.normalize();
  ObservableSum obs(3, {PauliTerm(0.5, "XYZ"), PauliTerm(-1.1, "ZIX"), PauliTerm(0.3, "IYI")});
  CMatrix h = observable_matrix(obs);
  Complex dense{};
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      dense += std::conj(psi.amplitudes[i]) * h(i, j) * psi.amplitudes[j];
  REQUIRE(expectation(psi, obs) == Catch::Approx(dense.real()).margin(1e-12));
}

TEST_CASE("expectation with bus projects onto vacuum and reports leakage") {
  // 1 qubit x bus cutoff 3; put weight 0.64 on |0, vac>, 0.36 on |1, n=1>.
  StateVector s(6);
  s.amplitudes[0] = 0.8;  // qubit 0, bus 0
  s.amplitudes[4] = 0.6;  // qubit 1, bus 1 -> leakage
  ObservableSum z(1, {PauliTerm(1.0, "Z")});
  auto res = expectation_with_leakage(s, z);
  REQUIRE(res.leakage == Catch::Approx(0.36));
  REQUIRE(res.value == Catch::Approx(1.0));  // vacuum part is pure |0>
}

TEST_CASE("expectation dimension mismatch raises") {
  StateVector s(3);
  s.amplitudes[0] = 1.0;
  ObservableSum z(1, {PauliTerm(1.0, "Z")});
  REQUIRE_THROWS_AS(expectation(s, z), ValidationError);
}

TEST_CASE("ground_energy trivial cases") {
  ObservableSum z(1, {PauliTerm(1.0, "Z")});
  auto [e, v] = ground_energy(z);
  REQUIRE(e == Catch::Approx(-1.0));
  REQUIRE(std::norm(v.amplitudes[1]) == Catch::Approx(1.0));

  ObservableSum zz(2, {PauliTerm(1.0, "ZZ")});
  auto [e2, v2] = ground_energy(zz);
  REQUIRE(e2 == Catch::Approx(-1.0));
  // Degenerate: any unit vector in span{|01>, |10>} is acceptable.
  REQUIRE(std::norm(v2.amplitudes[1]) + std::norm(v2.amplitudes[2]) == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("ground_energy lower-bounds expectation on random states") {
  Rng rng(21);
  ObservableSum h(3, {PauliTerm(0.8, "ZZI"), PauliTerm(-0.5, "XIX"), PauliTerm(0.25, "IYY"),
                      PauliTerm(0.1, "ZXZ")});
  auto [e0, v0] = ground_energy(h);
  REQUIRE(expectation(v0, h) == Catch::Approx(e0).margin(1e-9));
  for (int trial = 0; trial < 100; ++trial) {
    StateVector psi(8);
    for (auto& a : psi.amplitudes) a = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
    psi.normalize();
    REQUIRE(expectation(psi, h) >= e0 - 1e-9);
  }
}

TEST_CASE("ground_energy capacity guard") {
  std::vector<PauliTerm> terms{PauliTerm(1.0, std::string(11, 'Z'))};
  ObservableSum h(11, terms);
  REQUIRE_THROWS_AS(ground_energy(h), CapacityError);
}

TEST_CASE("sample_counts deterministic and concentrated for basis states") {
  StateVector s = StateVector::basis_state(4, 0);
  auto counts = sample_counts(s, 1024, 5);
  REQUIRE(counts.size() == 1);
  REQUIRE(counts.at("00") == 1024);

  auto again = sample_counts(s, 1024, 5);
  REQUIRE(counts == again);
}

TEST_CASE("sample_counts frequency matches binomial error envelope") {
  StateVector plus(2);
  plus.amplitudes = {Complex(1 / std::sqrt(2.0)), Complex(1 / std::sqrt(2.0))};
  const std::uint64_t shots = 1000000;
  auto counts = sample_counts(plus, shots, 123);
  const double p0 = static_cast<double>(counts["0"]) / shots;
  // 3 sigma of sqrt(0.25/1e6).
  REQUIRE(std::abs(p0 - 0.5) <= 1.65e-3);
}

TEST_CASE("sample_counts is an unbiased Z estimator across seeds") {
  // State with <Z> = 0.28.
  const double p0 = 0.64;
  StateVector s(2);
  s.amplitudes = {Complex(std::sqrt(p0)), Complex(std::sqrt(1 - p0))};
  const double exact = 2 * p0 - 1;
  const int reps = 100;
  const std::uint64_t shots = 1024;
  double mean = 0.0;
  for (int r = 0; r < reps; ++r) {
    auto counts = sample_counts(s, shots, 1000 + r);
    const double z = (static_cast<double>(counts["0"]) - static_cast<double>(counts["1"])) / shots;
    mean += z;
  }
  mean /= reps;
  const double sigma = std::sqrt((1 - exact * exact) / shots);
  REQUIRE(std::abs(mean - exact) <= 3.0 * sigma / std::sqrt(static_cast<double>(reps)));
}

TEST_CASE("observable merges duplicate terms on construction") {
  ObservableSum h(1, {PauliTerm(0.3, "Z"), PauliTerm(0.2, "Z")});
  REQUIRE(h.terms.size() == 1);
  REQUIRE(h.terms[0].coefficient == Catch::Approx(0.5));
}

TEST_CASE("hermitian_eigensystem reconstructs the matrix") {
  Rng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + (rng.next_u64() % 6);
    CMatrix h = oracles::random_hermitian(n, rng);
    EigenSystem es = hermitian_eigensystem(h);
    REQUIRE(unitarity_residual(es.vectors) < 1e-10);
    // A V = V diag(lambda)
    CMatrix av = h * es.vectors;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i)
        REQUIRE(std::abs(av(i, j) - es.values[j] * es.vectors(i, j)) < 1e-9);
    REQUIRE(std::is_sorted(es.values.begin(), es.values.end()));
  }
}
