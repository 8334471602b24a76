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

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <vector>

#include "pulseforge/dynamics.hpp"
#include "pulseforge/optimizer.hpp"

// Two-qubit gate analysis: Weyl-chamber coordinates of the local-equivalence
// class, CR Hamiltonian tomography from simulated Bloch trajectories, and
// coverage scans over randomly sampled pulse parameters.

namespace pulseforge {

struct TomographyError : std::runtime_error {
  explicit TomographyError(const std::string& what) : std::runtime_error(what) {}
};

/// Canonical local-equivalence class of a two-qubit gate, as the coordinates
/// of exp(-i (c1 XX + c2 YY + c3 ZZ)). Canonical domain: c1 >= c2 >= c3 >= 0,
/// c1 + c2 <= pi/2, and c1 <= pi/4 whenever c3 = 0 (base-face identification).
/// CNOT sits at (pi/4, 0, 0), iSWAP at (pi/4, pi/4, 0), SWAP at
/// (pi/4, pi/4, pi/4).
struct WeylPoint {
  double c1 = 0, c2 = 0, c3 = 0;
};

namespace detail {

// Magic (Bell) basis columns; conjugation maps SU(2)xSU(2) to SO(4) and
// diagonalizes the canonical gate family.
inline const CMatrix& magic_basis() {
  static const CMatrix b = [] {
    const double s = 1.0 / std::sqrt(2.0);
    CMatrix m(4, 4);
    m(0, 0) = s;
    m(3, 0) = s;
    m(0, 1) = Complex(0, s);
    m(3, 1) = Complex(0, -s);
    m(1, 2) = Complex(0, s);
    m(2, 2) = Complex(0, s);
    m(1, 3) = s;
    m(2, 3) = -s;
    return m;
  }();
  return b;
}

// Eigenphases of a symmetric unitary matrix m: its real and imaginary parts
// are commuting real-symmetric matrices, so diagonalize Re(m) and then the
// projection of Im(m) inside each degenerate eigenspace.
inline std::array<double, 4> symmetric_unitary_eigenphases(const CMatrix& m) {
  const std::size_t n = m.rows;
  CMatrix re(n, n), im(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      re(i, j) = 0.5 * (m(i, j).real() + m(j, i).real());
      im(i, j) = 0.5 * (m(i, j).imag() + m(j, i).imag());
    }
  const EigenSystem er = hermitian_eigensystem(re);

  std::array<double, 4> phases{};
  // Near-degenerate eigenvalues of Re(m) need a joint basis with Im(m); the
  // grouping tolerance escalates until the common basis actually
  // diagonalizes both parts.
  for (const double gtol : {1e-7, 1e-5, 1e-3, 1e-1}) {
    CMatrix v = er.vectors;
    std::array<double, 4> rvals{}, svals{};
    std::size_t start = 0;
    while (start < n) {
      std::size_t stop = start + 1;
      while (stop < n && std::abs(er.values[stop] - er.values[start]) < gtol) ++stop;
      const std::size_t g = stop - start;
      CMatrix p(n, g);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < g; ++j) p(i, j) = er.vectors(i, start + j);
      const CMatrix s_sub = adjoint(p) * (im * p);
      const EigenSystem es = hermitian_eigensystem(s_sub);
      const CMatrix rotated = p * es.vectors;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < g; ++j) v(i, start + j) = rotated(i, j);
      for (std::size_t j = 0; j < g; ++j) {
        rvals[start + j] = er.values[start + j];
        svals[start + j] = es.values[j];
      }
      start = stop;
    }
    // Verify the common basis: both quadratic forms must be diagonal.
    const CMatrix rr = adjoint(v) * (re * v);
    const CMatrix ss = adjoint(v) * (im * v);
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) off = std::max({off, std::abs(rr(i, j)), std::abs(ss(i, j))});
    for (std::size_t k = 0; k < n; ++k)
      phases[k] = std::atan2(ss(k, k).real(), rr(k, k).real());
    if (off <= 1e-6) break;
  }
  return phases;
}

// Reduction of candidate coordinates into the canonical Weyl chamber. Legal
// moves (all realized by single-qubit gates): shift any coordinate by pi/2,
// permute coordinates, flip the signs of any two coordinates, and on the
// c3 = 0 face identify c1 with pi/2 - c1.
inline WeylPoint canonicalize_weyl(std::array<double, 3> c) {
  const double half = M_PI / 2.0;
  auto fold = [&](double x) {
    x = std::fmod(x, half);
    if (x < 0) x += half;
    // The coordinate circle has circumference pi/2; snap round-off straddling
    // the wrap point onto 0 so sign flips of ~0 do not strand at ~pi/2.
    if (x < 1e-10 || half - x < 1e-10) x = 0.0;
    return x;
  };
  struct Key {
    long a, b, c;
    bool operator<(const Key& o) const { return std::tie(a, b, c) < std::tie(o.a, o.b, o.c); }
  };
  auto key_of = [](const std::array<double, 3>& p) {
    return Key{std::lround(p[0] * 1e9), std::lround(p[1] * 1e9), std::lround(p[2] * 1e9)};
  };

  std::array<double, 3> seed{fold(c[0]), fold(c[1]), fold(c[2])};
  std::set<Key> seen;
  std::vector<std::array<double, 3>> frontier{seed}, all{seed};
  seen.insert(key_of(seed));
  while (!frontier.empty()) {
    std::vector<std::array<double, 3>> next;
    for (const auto& p : frontier) {
      std::vector<std::array<double, 3>> moves;
      // Pairwise sign flips (then fold back into [0, pi/2)).
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
          auto q = p;
          q[i] = fold(-q[i]);
          q[j] = fold(-q[j]);
          moves.push_back(q);
        }
      // Permutations via all pair swaps.
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
          auto q = p;
          std::swap(q[i], q[j]);
          moves.push_back(q);
        }
      for (auto& q : moves)
        if (seen.insert(key_of(q)).second) {
          next.push_back(q);
          all.push_back(q);
        }
    }
    frontier = std::move(next);
  }

  const double tol = 1e-9;
  WeylPoint best;
  bool found = false;
  auto better = [&](const WeylPoint& a, const WeylPoint& b) {
    return std::tie(a.c1, a.c2, a.c3) < std::tie(b.c1, b.c2, b.c3);
  };
  for (auto p : all) {
    std::sort(p.begin(), p.end(), std::greater<double>());
    WeylPoint w{p[0], p[1], p[2]};
    if (w.c1 + w.c2 > half + tol) continue;
    if (w.c3 < tol && w.c1 > M_PI / 4.0 + tol) continue;
    if (!found || better(w, best)) {
      best = w;
      found = true;
    }
  }
  if (!found) throw ValidationError("weyl: canonicalization failed");
  // Snap tiny residue to the chamber boundary.
  if (best.c3 < tol) best.c3 = std::max(best.c3, 0.0);
  return best;
}

}  // namespace detail

/// Weyl-chamber coordinates of a 4x4 unitary: invariant under single-qubit
/// gates before or after the gate.
inline WeylPoint weyl_coordinates(const CMatrix& u_in) {
  if (u_in.rows != 4 || u_in.cols != 4) throw ValidationError("weyl: need a 4x4 matrix");
  if (unitarity_residual(u_in) > 1e-8) throw ValidationError("weyl: input not unitary");

  // Project onto SU(4).
  CMatrix u = u_in;
  const Complex det = determinant(u);
  const Complex scale = std::polar(1.0, -std::arg(det) / 4.0);
  u = scale * u;

  const CMatrix& b = detail::magic_basis();
  CMatrix m_big = adjoint(b) * (u * b);
  CMatrix m(4, 4);
  {
    // m = M^T M (complex symmetric unitary).
    CMatrix mt(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) mt(i, j) = m_big(j, i);
    m = mt * m_big;
  }
  const auto phases = detail::symmetric_unitary_eigenphases(m);

  // Spectrum of m is e^{-2 i phi_k} with phi = (c1-c2+c3, c1+c2-c3,
  // -c1+c2+c3, -c1-c2-c3); recover one candidate and canonicalize.
  std::array<double, 4> phi{};
  for (int k = 0; k < 4; ++k) phi[k] = -phases[k] / 2.0;
  const std::array<double, 3> candidate{(phi[0] + phi[1]) / 2.0, (phi[1] + phi[2]) / 2.0,
                                        (phi[0] + phi[2]) / 2.0};
  return detail::canonicalize_weyl(candidate);
}

/// True iff the canonical Weyl points coincide within `tol`.
inline bool locally_equivalent(const CMatrix& u, const CMatrix& v, double tol = 1e-6) {
  const WeylPoint a = weyl_coordinates(u);
  const WeylPoint b = weyl_coordinates(v);
  return std::abs(a.c1 - b.c1) <= tol && std::abs(a.c2 - b.c2) <= tol && std::abs(a.c3 - b.c3) <= tol;
}

// ---------------------------------------------------------------------------
// CR Hamiltonian tomography

struct TomographyOptions {
  SimModel model = SimModel::Effective;
  Frame frame = Frame::Rotating;
  std::uint64_t shots = 0;  // 0 = exact expectations
  std::uint64_t seed = 0;
  double fit_tol = 1e-6;  // max residual per Bloch component (exact mode)
};

namespace detail {

// Bloch vector of the target qubit after a CR pulse of `duration` dt with the
// control prepared in |z>.
inline std::array<double, 3> target_bloch(const DeviceConfig& device, int control, int target,
                                          double amp, std::int64_t duration, int z,
                                          const TomographyOptions& opt, std::uint64_t seed) {
  PulseSchedule s(device.n_qubits);
  s.merge_at(detail::cr_fixed(control, target, amp, duration, device), 0);
  const std::size_t dim =
      opt.model == SimModel::Effective ? device.qubit_dim() : device.full_dim();
  std::size_t index = 0;
  if (z == 1) index |= std::size_t{1} << (device.n_qubits - 1 - control);
  if (opt.model == SimModel::Full) index *= static_cast<std::size_t>(device.bus_cutoff);
  auto res = propagate(s, device, opt.model, opt.frame, StateVector::basis_state(dim, index));

  std::array<double, 3> r{};
  const char letters[3] = {'X', 'Y', 'Z'};
  for (int k = 0; k < 3; ++k) {
    std::string pauli(device.n_qubits, 'I');
    pauli[target] = letters[k];
    ObservableSum obs(device.n_qubits, {PauliTerm(1.0, pauli)});
    if (opt.shots == 0) {
      r[k] = expectation_with_leakage(res.final_state, obs).value;
    } else {
      // Ideal basis rotation, then sampled readout of the target bit.
      StateVector rotated = res.final_state;
      CMatrix rot = CMatrix::identity(2);
      if (letters[k] == 'X') rot = matexp_hermitian(pauli_y(), -M_PI / 4.0);  // X -> Z
      if (letters[k] == 'Y') rot = matexp_hermitian(pauli_x(), M_PI / 4.0);   // Y -> Z
      if (opt.model == SimModel::Full)
        throw ValidationError("tomography: shot mode supports the effective model only");
      detail::apply_unitary_subset(rotated.amplitudes, device.n_qubits, {target}, rot);
      auto counts = sample_counts(rotated, opt.shots, Rng::derive_seed(seed, 17 + k));
      double acc = 0.0;
      for (const auto& [bits, cnt] : counts)
        acc += (bits[target] == '0' ? 1.0 : -1.0) * static_cast<double>(cnt);
      r[k] = acc / static_cast<double>(opt.shots);
    }
  }
  return r;
}

// Rotation of the initial +z Bloch vector about field h for time t:
// r(t) = Rodrigues(n, 2|h|t) z.
inline std::array<double, 3> precessed_z(const std::array<double, 3>& h, double t) {
  const double w = std::sqrt(h[0] * h[0] + h[1] * h[1] + h[2] * h[2]);
  if (w < 1e-300) return {0.0, 0.0, 1.0};
  const double nx = h[0] / w, ny = h[1] / w, nz = h[2] / w;
  const double ang = 2.0 * w * t;
  const double c = std::cos(ang), s = std::sin(ang);
  // r = c z + s (n x z) + (1-c)(n.z) n, with z = (0,0,1).
  return {s * ny + (1 - c) * nz * nx, -s * nx + (1 - c) * nz * ny, c + (1 - c) * nz * nz};
}

inline double bloch_residual(const std::array<double, 3>& h,
                             const std::vector<double>& times,
                             const std::vector<std::array<double, 3>>& meas) {
  double acc = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto r = precessed_z(h, times[i]);
    for (int k = 0; k < 3; ++k) acc += (r[k] - meas[i][k]) * (r[k] - meas[i][k]);
  }
  return acc;
}

// Least-squares fit of the precession generator from Bloch trajectories:
// deterministic multi-start Nelder-Mead plus a finite-difference polish.
inline std::array<double, 3> fit_precession(const std::vector<double>& times,
                                            const std::vector<std::array<double, 3>>& meas) {
  // Derivative-based initial guess from the first sample: dr/dt = 2 h x z.
  const double t1 = times.front();
  const std::array<double, 3>& r1 = meas.front();
  const double hx0 = -r1[1] / (2.0 * t1);
  const double hy0 = r1[0] / (2.0 * t1);
  const double scale = std::max(1.0 / (2.0 * times.back()),
                                std::sqrt(hx0 * hx0 + hy0 * hy0));

  Objective obj = [&](const std::vector<double>& v) {
    return bloch_residual({v[0], v[1], v[2]}, times, meas);
  };
  Bounds free3 = Bounds::unbounded(3);
  std::vector<double> best{0, 0, 0};
  double best_res = bloch_residual({0, 0, 0}, times, meas);
  for (const double hz_try : {0.0, 0.5 * scale, -0.5 * scale, 1.5 * scale, -1.5 * scale}) {
    for (const double mult : {1.0, 0.5, 2.0}) {
      auto rep = minimize_neldermead(obj, {hx0 * mult, hy0 * mult, hz_try}, free3, 900);
      if (rep.best_f < best_res) {
        best_res = rep.best_f;
        best = rep.best_x;
      }
    }
  }
  // Gauss-Newton polish with finite differences.
  for (int it = 0; it < 60; ++it) {
    const double f0 = bloch_residual({best[0], best[1], best[2]}, times, meas);
    const double h = 1e-7 * std::max(1.0, std::abs(best[0]) + std::abs(best[1]) + std::abs(best[2]));
    std::array<double, 3> grad{};
    for (int k = 0; k < 3; ++k) {
      auto p = best;
      p[k] += h;
      grad[k] = (bloch_residual({p[0], p[1], p[2]}, times, meas) - f0) / h;
    }
    double step = 0.1 * std::max({std::abs(best[0]), std::abs(best[1]), std::abs(best[2]), 1e-9});
    bool improved = false;
    for (int ls = 0; ls < 30 && !improved; ++ls) {
      const double gn = std::sqrt(grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2]);
      if (gn == 0) break;
      std::vector<double> cand = best;
      for (int k = 0; k < 3; ++k) cand[k] -= step * grad[k] / gn;
      if (bloch_residual({cand[0], cand[1], cand[2]}, times, meas) < f0) {
        best = cand;
        improved = true;
      } else {
        step *= 0.5;
      }
    }
    if (!improved) break;
  }
  return {best[0], best[1], best[2]};
}

}  // namespace detail

/// Recovers the six effective CR coefficients by simulating target-qubit
/// Bloch trajectories for the control prepared in |0> and |1>, fitting the
/// two precession generators, and splitting them as half-sum/half-difference.
inline CRCoefficients cr_tomography(const DeviceConfig& device, int control, int target, double amp,
                                    const std::vector<std::int64_t>& durations_dt,
                                    const TomographyOptions& opt = {}) {
  if (!device.is_edge(control, target))
    throw TopologyError("cr_tomography: pair is not a configured edge");
  std::set<std::int64_t> distinct(durations_dt.begin(), durations_dt.end());
  if (distinct.size() < 6)
    throw ValidationError("cr_tomography: need at least 6 distinct durations");

  std::vector<double> times;
  for (std::int64_t d : durations_dt) times.push_back(static_cast<double>(d) * device.dt_s);

  std::array<std::array<double, 3>, 2> h{};
  double residual = 0.0;
  for (int z = 0; z < 2; ++z) {
    std::vector<std::array<double, 3>> meas;
    for (std::size_t i = 0; i < durations_dt.size(); ++i)
      meas.push_back(detail::target_bloch(device, control, target, amp, durations_dt[i], z, opt,
                                          Rng::derive_seed(opt.seed, 100 * z + i)));
    h[z] = detail::fit_precession(times, meas);
    residual = std::max(residual, detail::bloch_residual(h[z], times, meas));
  }
  if (opt.shots == 0 && residual > opt.fit_tol * opt.fit_tol * 3.0 * static_cast<double>(times.size()))
    throw TomographyError("cr_tomography: fit residual " + std::to_string(residual) +
                          " above tolerance");

  CRCoefficients out;
  out.a_x = 0.5 * (h[0][0] - h[1][0]);
  out.a_y = 0.5 * (h[0][1] - h[1][1]);
  out.a_z = 0.5 * (h[0][2] - h[1][2]);
  out.b_x = 0.5 * (h[0][0] + h[1][0]);
  out.b_y = 0.5 * (h[0][1] + h[1][1]);
  out.b_z = 0.5 * (h[0][2] + h[1][2]);
  return out;
}

// ---------------------------------------------------------------------------
// Weyl coverage scans

struct CoverageSummary {
  WeylPoint min;
  WeylPoint max;
  double span_c1() const { return max.c1 - min.c1; }
  double span_c2() const { return max.c2 - min.c2; }
  double span_c3() const { return max.c3 - min.c3; }
};

/// Parametric two-qubit block with one CR pulse: the single-CR reachable set.
inline PulseSchedule single_cr_template(const DeviceConfig& device, int control = 0, int target = 1) {
  PulseSchedule s(device.n_qubits);
  s.merge_at(cr(control, target, "cr_amp", "cr_det", device.cr_duration_dt, device), 0);
  return s;
}

/// Two CR blocks separated by a parametric single-qubit pulse layer.
inline PulseSchedule multi_cr_template(const DeviceConfig& device, int control = 0, int target = 1) {
  PulseSchedule s(device.n_qubits);
  s.append_sequential(cr(control, target, "cr1_amp", "cr1_det", device.cr_duration_dt, device));
  std::vector<PulseSchedule> layer;
  layer.push_back(snp(control, "s0_amp", "s0_det", device));
  layer.push_back(snp(target, "s1_amp", "s1_det", device));
  append_layer(s, layer);
  s.append_sequential(cr(control, target, "cr2_amp", "cr2_det", device.cr_duration_dt, device));
  return s;
}

/// Samples the template's parameters uniformly in their bounds, propagates
/// each bound schedule (EFFECTIVE model), and maps the unitaries to Weyl
/// points. Per-sample seeds are derived deterministically from `seed`.
inline std::vector<WeylPoint> coverage_scan(const PulseSchedule& block_template,
                                            const DeviceConfig& device, int n_samples,
                                            std::uint64_t seed, CoverageSummary* summary = nullptr) {
  if (n_samples < 1) throw ValidationError("coverage_scan: need n_samples >= 1");
  std::vector<WeylPoint> points;
  points.reserve(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    Rng rng(Rng::derive_seed(seed, static_cast<std::uint64_t>(i)));
    std::vector<double> values;
    values.reserve(block_template.params.size());
    for (const auto& spec : block_template.params.entries)
      values.push_back(rng.uniform(spec.lo, spec.hi));
    CMatrix u = propagate_unitary(pulseforge::bind(block_template, values), device);
    points.push_back(weyl_coordinates(u));
  }
  if (summary != nullptr) {
    summary->min = points.front();
    summary->max = points.front();
    for (const auto& p : points) {
      summary->min.c1 = std::min(summary->min.c1, p.c1);
      summary->min.c2 = std::min(summary->min.c2, p.c2);
      summary->min.c3 = std::min(summary->min.c3, p.c3);
      summary->max.c1 = std::max(summary->max.c1, p.c1);
      summary->max.c2 = std::max(summary->max.c2, p.c2);
      summary->max.c3 = std::max(summary->max.c3, p.c3);
    }
  }
  return points;
}

}  // namespace pulseforge
