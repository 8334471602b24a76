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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pulseforge/matrix.hpp"
#include "pulseforge/rng.hpp"

// Core state/operator machinery. Endianness convention used everywhere:
// qubit 0 is the leftmost tensor factor and the most significant bit of a
// basis index or bitstring. When a bus mode is present it is the last
// (least significant) tensor factor.

namespace pulseforge {

inline const CMatrix& pauli_i() {
  static const CMatrix m = CMatrix::identity(2);
  return m;
}
inline const CMatrix& pauli_x() {
  static const CMatrix m = [] {
    CMatrix x(2, 2);
    x(0, 1) = 1.0;
    x(1, 0) = 1.0;
    return x;
  }();
  return m;
}
inline const CMatrix& pauli_y() {
  static const CMatrix m = [] {
    CMatrix y(2, 2);
    y(0, 1) = Complex(0, -1);
    y(1, 0) = Complex(0, 1);
    return y;
  }();
  return m;
}
inline const CMatrix& pauli_z() {
  static const CMatrix m = [] {
    CMatrix z(2, 2);
    z(0, 0) = 1.0;
    z(1, 1) = -1.0;
    return z;
  }();
  return m;
}

inline const CMatrix& pauli_by_letter(char letter) {
  switch (letter) {
    case 'I': return pauli_i();
    case 'X': return pauli_x();
    case 'Y': return pauli_y();
    case 'Z': return pauli_z();
    default: throw ValidationError(std::string("unknown Pauli letter '") + letter + "'");
  }
}

/// Normalized pure state over `dim` basis vectors.
struct StateVector {
  std::size_t dim = 0;
  std::vector<Complex> amplitudes;

  StateVector() = default;
  explicit StateVector(std::size_t d) : dim(d), amplitudes(d) {
    if (d == 0) throw ValidationError("StateVector: zero dimension");
    if (d > kMaxDenseDim) throw CapacityError("StateVector: dimension exceeds max");
  }

  static StateVector basis_state(std::size_t dim, std::size_t index) {
    StateVector s(dim);
    s.amplitudes.at(index) = 1.0;
    return s;
  }

  double norm() const {
    double n2 = 0.0;
    for (const auto& a : amplitudes) n2 += std::norm(a);
    return std::sqrt(n2);
  }

  void normalize() {
    const double n = norm();
    if (n == 0.0) throw ValidationError("StateVector: cannot normalize zero vector");
    for (auto& a : amplitudes) a /= n;
  }
};

/// One weighted Pauli string; coefficient in Hartree for molecular terms.
struct PauliTerm {
  double coefficient = 0.0;
  std::string letters;  // one of I,X,Y,Z per qubit, qubit 0 first

  PauliTerm() = default;
  PauliTerm(double c, std::string l) : coefficient(c), letters(std::move(l)) {
    if (!std::isfinite(coefficient)) throw ValidationError("PauliTerm: non-finite coefficient");
    for (char ch : letters) pauli_by_letter(ch);
  }
};

/// Weighted sum of Pauli strings acting on a fixed qubit register.
struct ObservableSum {
  std::size_t n_qubits = 0;
  std::vector<PauliTerm> terms;

  ObservableSum() = default;
  ObservableSum(std::size_t n, std::vector<PauliTerm> t) : n_qubits(n) {
    if (n == 0) throw ValidationError("ObservableSum: zero qubits");
    // Merge duplicate letter strings; keep first-seen order.
    std::map<std::string, std::size_t> seen;
    for (auto& term : t) {
      if (term.letters.size() != n)
        throw ValidationError("ObservableSum: term '" + term.letters + "' has wrong length");
      auto it = seen.find(term.letters);
      if (it == seen.end()) {
        seen.emplace(term.letters, terms.size());
        terms.push_back(std::move(term));
      } else {
        terms[it->second].coefficient += term.coefficient;
      }
    }
  }
};

/// coefficient · ⊗_i σ_{letter_i}, qubit 0 as the leftmost factor.
inline CMatrix pauli_matrix(const PauliTerm& term) {
  if (term.letters.empty()) throw ValidationError("pauli_matrix: empty letters");
  CMatrix m = pauli_by_letter(term.letters[0]);
  for (std::size_t i = 1; i < term.letters.size(); ++i) m = kron(m, pauli_by_letter(term.letters[i]));
  return term.coefficient * m;
}

inline CMatrix observable_matrix(const ObservableSum& obs) {
  const std::size_t dim = std::size_t{1} << obs.n_qubits;
  if (dim > kMaxDenseDim) throw CapacityError("observable_matrix: dimension exceeds max");
  CMatrix h(dim, dim);
  for (const auto& t : obs.terms) h = h + pauli_matrix(t);
  return h;
}

namespace detail {

// Applies one Pauli string to psi (qubit register only, dim = 2^n).
inline void apply_pauli_string(const std::string& letters, const std::vector<Complex>& in,
                               std::vector<Complex>& out) {
  const std::size_t n = letters.size();
  const std::size_t dim = std::size_t{1} << n;
  std::size_t flip = 0;  // X/Y positions toggle bits
  for (std::size_t q = 0; q < n; ++q)
    if (letters[q] == 'X' || letters[q] == 'Y') flip |= (std::size_t{1} << (n - 1 - q));
  for (std::size_t idx = 0; idx < dim; ++idx) {
    const std::size_t src = idx ^ flip;
    Complex factor{1.0, 0.0};
    for (std::size_t q = 0; q < n; ++q) {
      const std::size_t bit = (src >> (n - 1 - q)) & 1u;
      switch (letters[q]) {
        case 'I': break;
        case 'X': break;
        case 'Y': factor *= bit ? Complex(0, -1) : Complex(0, 1); break;
        case 'Z':
          if (bit) factor = -factor;
          break;
        default: throw ValidationError("apply_pauli_string: bad letter");
      }
    }
    out[idx] = factor * in[src];
  }
}

}  // namespace detail

struct ExpectationResult {
  double value = 0.0;
  double leakage = 0.0;  // weight outside the bus vacuum (0 when no bus)
};

/// ⟨ψ|H|ψ⟩ for a qubit-register observable. If the state carries a bus mode
/// (dim = 2^n · cutoff with the bus as the least significant factor), the
/// state is projected onto the bus vacuum and renormalized; the discarded
/// weight is reported as leakage.
inline ExpectationResult expectation_with_leakage(const StateVector& state, const ObservableSum& obs) {
  const std::size_t qdim = std::size_t{1} << obs.n_qubits;
  if (state.dim == 0 || state.dim % qdim != 0)
    throw ValidationError("expectation: state dimension incompatible with observable");
  const std::size_t cutoff = state.dim / qdim;

  std::vector<Complex> psi(qdim);
  double kept = 0.0;
  for (std::size_t i = 0; i < qdim; ++i) {
    psi[i] = state.amplitudes[i * cutoff];  // bus index 0
    kept += std::norm(psi[i]);
  }
  ExpectationResult res;
  res.leakage = std::max(0.0, 1.0 - kept);
  if (kept <= 0.0) throw ValidationError("expectation: state fully leaked out of bus vacuum");
  const double inv = 1.0 / std::sqrt(kept);
  for (auto& a : psi) a *= inv;

  std::vector<Complex> work(qdim);
  Complex acc{};
  for (const auto& term : obs.terms) {
    detail::apply_pauli_string(term.letters, psi, work);
    Complex dot{};
    for (std::size_t i = 0; i < qdim; ++i) dot += std::conj(psi[i]) * work[i];
    acc += term.coefficient * dot;
  }
  if (std::abs(acc.imag()) > 1e-10)
    throw ValidationError("expectation: imaginary residual above tolerance");
  res.value = acc.real();
  return res;
}

inline double expectation(const StateVector& state, const ObservableSum& obs) {
  return expectation_with_leakage(state, obs).value;
}

/// Minimal eigenvalue and eigenvector of the dense observable matrix.
/// Exact-diagonalization reference for FCI-style accuracy comparisons.
inline std::pair<double, StateVector> ground_energy(const ObservableSum& obs) {
  if (obs.n_qubits > 10) throw CapacityError("ground_energy: more than 10 qubits");
  CMatrix h = observable_matrix(obs);
  EigenSystem es = hermitian_eigensystem(h);
  StateVector ground(h.rows);
  for (std::size_t i = 0; i < h.rows; ++i) ground.amplitudes[i] = es.vectors(i, 0);
  return {es.values[0], ground};
}

/// Multinomial sample of `shots` bitstrings from |amplitudes|²; deterministic
/// for a fixed seed. Keys are bitstrings with qubit 0 as the first character.
inline std::map<std::string, std::uint64_t> sample_counts(const StateVector& state,
                                                          std::uint64_t shots,
                                                          std::uint64_t seed) {
  if (std::abs(state.norm() - 1.0) > 1e-9)
    throw ValidationError("sample_counts: state not normalized");
  std::size_t n_bits = 0;
  while ((std::size_t{1} << n_bits) < state.dim) ++n_bits;
  if ((std::size_t{1} << n_bits) != state.dim)
    throw ValidationError("sample_counts: dimension is not a power of two");

  std::vector<double> cdf(state.dim);
  double acc = 0.0;
  for (std::size_t i = 0; i < state.dim; ++i) {
    acc += std::norm(state.amplitudes[i]);
    cdf[i] = acc;
  }
  cdf.back() = 1.0;

  Rng rng(seed);
  std::vector<std::uint64_t> hits(state.dim, 0);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    hits[static_cast<std::size_t>(it - cdf.begin())]++;
  }
  std::map<std::string, std::uint64_t> counts;
  for (std::size_t i = 0; i < state.dim; ++i) {
    if (hits[i] == 0) continue;
    std::string bits(n_bits, '0');
    for (std::size_t q = 0; q < n_bits; ++q)
      if ((i >> (n_bits - 1 - q)) & 1u) bits[q] = '1';
    counts[bits] = hits[i];
  }
  return counts;
}

}  // namespace pulseforge
