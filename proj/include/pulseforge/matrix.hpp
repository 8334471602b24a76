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
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "pulseforge/errors.hpp"

namespace pulseforge {

using Complex = std::complex<double>;

/// Largest dense dimension the library will allocate (10 qubits times a bus
/// cutoff of 8). Anything bigger raises CapacityError instead of thrashing.
inline constexpr std::size_t kMaxDenseDim = (1u << 10) * 8;

/// Dense row-major complex matrix. Plain value type; all algebra lives in
/// free functions below.
struct CMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Complex> data;

  CMatrix() = default;
  CMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {
    if (r == 0 || c == 0) throw ValidationError("CMatrix: empty dimension");
    if (r > kMaxDenseDim || c > kMaxDenseDim)
      throw CapacityError("CMatrix: dimension " + std::to_string(std::max(r, c)) +
                          " exceeds max " + std::to_string(kMaxDenseDim));
  }

  Complex& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  static CMatrix zeros(std::size_t n) { return CMatrix(n, n); }

  static CMatrix identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols != b.rows) throw ValidationError("matmul: inner dimensions differ");
  CMatrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = 0; k < a.cols; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

inline CMatrix operator*(Complex s, const CMatrix& a) {
  CMatrix c = a;
  for (auto& v : c.data) v *= s;
  return c;
}

inline CMatrix operator+(const CMatrix& a, const CMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols) throw ValidationError("add: shape mismatch");
  CMatrix c = a;
  for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] += b.data[i];
  return c;
}

inline CMatrix operator-(const CMatrix& a, const CMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols) throw ValidationError("sub: shape mismatch");
  CMatrix c = a;
  for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] -= b.data[i];
  return c;
}

inline CMatrix adjoint(const CMatrix& a) {
  CMatrix c(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) c(j, i) = std::conj(a(i, j));
  return c;
}

inline double max_abs(const CMatrix& a) {
  double m = 0.0;
  for (const auto& v : a.data) m = std::max(m, std::abs(v));
  return m;
}

inline Complex trace(const CMatrix& a) {
  Complex t{};
  for (std::size_t i = 0; i < std::min(a.rows, a.cols); ++i) t += a(i, i);
  return t;
}

/// Max-abs deviation from the identity of U†U.
inline double unitarity_residual(const CMatrix& u) {
  CMatrix g = adjoint(u) * u;
  for (std::size_t i = 0; i < g.rows; ++i) g(i, i) -= 1.0;
  return max_abs(g);
}

inline bool is_hermitian(const CMatrix& a, double tol) {
  if (a.rows != a.cols) return false;
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = i; j < a.cols; ++j)
      if (std::abs(a(i, j) - std::conj(a(j, i))) > tol) return false;
  return true;
}

inline bool is_unitary(const CMatrix& u, double tol = 1e-9) {
  return u.rows == u.cols && unitarity_residual(u) <= tol;
}

/// Kronecker product: (a ⊗ b)[i·rb + k, j·cb + l] = a[i,j] · b[k,l].
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  if (a.data.empty() || b.data.empty()) throw ValidationError("kron: empty operand");
  if (a.rows * b.rows > kMaxDenseDim || a.cols * b.cols > kMaxDenseDim)
    throw CapacityError("kron: result dimension exceeds max " + std::to_string(kMaxDenseDim));
  CMatrix c(a.rows * b.rows, a.cols * b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex{}) continue;
      for (std::size_t k = 0; k < b.rows; ++k)
        for (std::size_t l = 0; l < b.cols; ++l)
          c(i * b.rows + k, j * b.cols + l) = aij * b(k, l);
    }
  return c;
}

/// Determinant by Gaussian elimination with partial pivoting.
inline Complex determinant(const CMatrix& m_in) {
  if (m_in.rows != m_in.cols) throw ValidationError("determinant: matrix not square");
  CMatrix m = m_in;
  const std::size_t n = m.rows;
  Complex det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
    if (std::abs(m(piv, col)) == 0.0) return Complex{};
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m(piv, c), m(col, c));
      det = -det;
    }
    det *= m(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const Complex factor = m(r, col) / m(col, col);
      for (std::size_t c = col; c < n; ++c) m(r, c) -= factor * m(col, c);
    }
  }
  return det;
}

struct EigenSystem {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // columns match values
};

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Self-contained and deterministic; sweeps until the largest off-diagonal
/// magnitude falls below 1e-12 relative to the matrix scale.
inline EigenSystem hermitian_eigensystem(const CMatrix& h_in) {
  if (h_in.rows != h_in.cols) throw ValidationError("eig: matrix not square");
  const std::size_t n = h_in.rows;
  CMatrix a = h_in;
  // Symmetrize to kill round-off drift; caller validated Hermiticity.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const Complex m = 0.5 * (a(i, j) + std::conj(a(j, i)));
      a(i, j) = m;
      a(j, i) = std::conj(m);
    }
  CMatrix v = CMatrix::identity(n);
  const double scale = std::max(1.0, max_abs(a));
  const double tol = 1e-12 * scale;

  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= tol) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double r = std::abs(apq);
        if (r <= tol) continue;
        const Complex phase = apq / r;  // e^{i·arg(apq)}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex se = s * phase;

        // A <- J† A J with J = [[c, s·e^{iφ}], [-s·e^{-iφ}, c]] on (p,q).
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = c * akp - std::conj(se) * akq;
          a(k, q) = se * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = c * apk - se * aqk;
          a(q, k) = std::conj(se) * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = Complex(a(p, p).real(), 0.0);
        a(q, q) = Complex(a(q, q).real(), 0.0);

        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = c * vkp - std::conj(se) * vkq;
          v(k, q) = se * vkp + c * vkq;
        }
      }
    }
  }

  EigenSystem es;
  es.values.resize(n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return diag[x] < diag[y]; });
  es.vectors = CMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    es.values[j] = diag[order[j]];
    for (std::size_t i = 0; i < n; ++i) es.vectors(i, j) = v(i, order[j]);
  }
  return es;
}

/// U = exp(-i·h·t) for Hermitian h (angular-frequency units, t in seconds),
/// via eigendecomposition. The result is unitary to ~1e-12.
inline CMatrix matexp_hermitian(const CMatrix& h, double t) {
  const double tol = 1e-10 * std::max(1.0, max_abs(h));
  if (!is_hermitian(h, tol)) throw ValidationError("matexp_hermitian: input not Hermitian");
  const std::size_t n = h.rows;
  EigenSystem es = hermitian_eigensystem(h);
  CMatrix u(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex sum{};
      for (std::size_t k = 0; k < n; ++k) {
        const Complex ph = std::polar(1.0, -es.values[k] * t);
        sum += es.vectors(i, k) * ph * std::conj(es.vectors(j, k));
      }
      u(i, j) = sum;
    }
  return u;
}

}  // namespace pulseforge
