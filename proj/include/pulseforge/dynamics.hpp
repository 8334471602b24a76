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
#include <vector>

#include "pulseforge/device_model.hpp"
#include "pulseforge/pulse_ir.hpp"
#include "pulseforge/qcore.hpp"

// Schroedinger propagation of bound pulse schedules. The integrator is the
// exact exponential of the piecewise-constant Hamiltonian per sample (per
// substep in the FULL model); envelope values are held constant over
// [k*dt, (k+1)*dt) while oscillating phases are evaluated at the sample
// midpoint.
//
// EFFECTIVE model: qubit register only. Single-qubit drives act in each
// qubit's rotating frame; a cross-resonance Play applies its block-diagonal
// effective Hamiltonian at constant amplitude-scaled rates for the whole
// block (the tomography-level abstraction of the pulse). Channel detuning
// rotates the drive axis (and the CR xy components) at -2*pi*delta.
//
// FULL model: drift + modulated drives on (C^2)^n (x) C^cutoff, integrated in
// the lab frame or the interaction picture at the diagonal drift; with RWA,
// matrix elements oscillating faster than the configured cutoff are dropped.

namespace pulseforge {

enum class Frame { Lab, Rotating };

struct PropagationResult {
  StateVector final_state;
  double leakage = 0.0;        // bus non-vacuum weight (0 for EFFECTIVE)
  std::int64_t wall_samples = 0;
};

namespace detail {

// Piecewise channel phase/detuning state: phi(t) = phase0 - 2*pi*delta*(t-t0).
struct ChannelEpochs {
  struct Epoch {
    std::int64_t t0 = 0;
    double phase0 = 0.0;
    double detuning_hz = 0.0;
  };
  std::vector<Epoch> epochs;  // time-ordered

  double phase_at(double t_dt, double dt_s) const {
    const Epoch* e = &epochs.front();
    for (const auto& cand : epochs) {
      if (static_cast<double>(cand.t0) <= t_dt) e = &cand;
      else break;
    }
    return e->phase0 - 2.0 * M_PI * e->detuning_hz * (t_dt - static_cast<double>(e->t0)) * dt_s;
  }
  double detuning_at(double t_dt) const {
    const Epoch* e = &epochs.front();
    for (const auto& cand : epochs) {
      if (static_cast<double>(cand.t0) <= t_dt) e = &cand;
      else break;
    }
    return e->detuning_hz;
  }
};

inline std::map<ChannelId, ChannelEpochs> build_channel_epochs(const PulseSchedule& s,
                                                               double dt_s) {
  std::map<ChannelId, ChannelEpochs> out;
  auto ensure = [&](const ChannelId& ch) -> ChannelEpochs& {
    auto [it, fresh] = out.try_emplace(ch);
    if (fresh) it->second.epochs.push_back({0, 0.0, 0.0});
    return it->second;
  };
  for (const auto& ins : s.instructions) {
    if (ins.op == Instruction::Op::ShiftPhase || ins.op == Instruction::Op::SetDetuning) {
      ChannelEpochs& ce = ensure(ins.channel);
      const auto& last = ce.epochs.back();
      const double t = static_cast<double>(ins.start_time);
      const double phase_now =
          last.phase0 - 2.0 * M_PI * last.detuning_hz * (t - static_cast<double>(last.t0)) * dt_s;
      ChannelEpochs::Epoch next{ins.start_time, phase_now, last.detuning_hz};
      if (ins.op == Instruction::Op::ShiftPhase) next.phase0 += ins.phase;
      else next.detuning_hz = param_value(ins.detuning);
      if (!ce.epochs.empty() && ce.epochs.back().t0 == ins.start_time) ce.epochs.back() = next;
      else ce.epochs.push_back(next);
    } else if (ins.op == Instruction::Op::Play) {
      ensure(ins.channel);
    }
  }
  return out;
}

// k-qubit Pauli product over a component, MSB-first in component order.
inline CMatrix component_pauli(const std::vector<char>& letters) {
  CMatrix m = pauli_by_letter(letters[0]);
  for (std::size_t i = 1; i < letters.size(); ++i) m = kron(m, pauli_by_letter(letters[i]));
  return m;
}

// Applies a 2^k unitary on the given (ascending) qubit subset of an n-qubit
// register; qubit 0 is the most significant bit.
inline void apply_unitary_subset(std::vector<Complex>& psi, int n_qubits,
                                 const std::vector<int>& qubits, const CMatrix& u) {
  const int k = static_cast<int>(qubits.size());
  const std::size_t sub_dim = std::size_t{1} << k;
  std::vector<std::size_t> bitpos(k);
  for (int j = 0; j < k; ++j) bitpos[j] = std::size_t{1} << (n_qubits - 1 - qubits[j]);
  std::size_t comp_mask = 0;
  for (auto b : bitpos) comp_mask |= b;

  std::vector<std::size_t> scatter(sub_dim, 0);
  for (std::size_t p = 0; p < sub_dim; ++p)
    for (int j = 0; j < k; ++j)
      if ((p >> (k - 1 - j)) & 1u) scatter[p] |= bitpos[j];

  const std::size_t dim = psi.size();
  std::vector<Complex> gathered(sub_dim), mixed(sub_dim);
  for (std::size_t base = 0; base < dim; ++base) {
    if ((base & comp_mask) != 0) continue;
    for (std::size_t p = 0; p < sub_dim; ++p) gathered[p] = psi[base | scatter[p]];
    for (std::size_t r = 0; r < sub_dim; ++r) {
      Complex acc{};
      for (std::size_t c = 0; c < sub_dim; ++c) acc += u(r, c) * gathered[c];
      mixed[r] = acc;
    }
    for (std::size_t p = 0; p < sub_dim; ++p) psi[base | scatter[p]] = mixed[p];
  }
}

// 2x2 Pauli rotation exp(-i (hx X + hy Y + hz Z + h0 I) t), closed form.
inline CMatrix two_level_exp(double hx, double hy, double hz, double h0, double t) {
  const double w = std::sqrt(hx * hx + hy * hy + hz * hz);
  CMatrix u(2, 2);
  const Complex global = std::polar(1.0, -h0 * t);
  if (w < 1e-300) {
    u(0, 0) = global;
    u(1, 1) = global;
    return u;
  }
  const double c = std::cos(w * t);
  const double s = std::sin(w * t);
  const double nx = hx / w, ny = hy / w, nz = hz / w;
  u(0, 0) = global * Complex(c, -s * nz);
  u(0, 1) = global * Complex(-s * ny, -s * nx);
  u(1, 0) = global * Complex(s * ny, -s * nx);
  u(1, 1) = global * Complex(c, s * nz);
  return u;
}

struct ActivePlay {
  const Instruction* ins = nullptr;
  const ChannelEpochs* epochs = nullptr;
};

}  // namespace detail

/// exp(-i H t) for the effective CR Hamiltonian (4x4, control on the left).
inline CMatrix evolve_effective(const CRCoefficients& c, double t) {
  CMatrix h(4, 4);
  auto add = [&](double coeff, char cz, char tz) {
    if (coeff == 0.0) return;
    h = h + coeff * detail::component_pauli({cz, tz});
  };
  add(c.a_x, 'Z', 'X');
  add(c.a_y, 'Z', 'Y');
  add(c.a_z, 'Z', 'Z');
  add(c.b_x, 'I', 'X');
  add(c.b_y, 'I', 'Y');
  add(c.b_z, 'I', 'Z');
  return matexp_hermitian(h, t);
}

/// Average gate fidelity (|tr(U†V)|² + d) / (d(d+1)); phase-invariant.
inline double fidelity(const CMatrix& u, const CMatrix& v) {
  if (u.rows != v.rows || u.cols != v.cols) throw ValidationError("fidelity: dimension mismatch");
  if (!is_unitary(u, 1e-6) || !is_unitary(v, 1e-6))
    throw ValidationError("fidelity: inputs must be unitary");
  const double d = static_cast<double>(u.rows);
  const Complex tr = trace(adjoint(u) * v);
  return (std::norm(tr) + d) / (d * (d + 1.0));
}

namespace detail {

inline PropagationResult effective_propagate(const PulseSchedule& schedule,
                                             const DeviceConfig& device, StateVector psi) {
  const int n = device.n_qubits;
  const std::size_t dim = std::size_t{1} << n;
  if (psi.dim != dim) throw ValidationError("propagate: initial state dimension mismatch");
  const std::int64_t total = schedule.duration_dt();
  auto epochs = build_channel_epochs(schedule, device.dt_s);

  std::vector<const Instruction*> plays;
  for (const auto& ins : schedule.instructions)
    if (ins.op == Instruction::Op::Play) plays.push_back(&ins);

  // Per-component step-unitary cache, keyed by the qubit subset; reused while
  // the component Hamiltonian stays numerically identical (constant-rate CR
  // stretches hit this on every sample).
  struct CacheEntry {
    std::vector<double> signature;
    CMatrix u;
  };
  std::map<std::vector<int>, CacheEntry> cache;

  for (std::int64_t t = 0; t < total; ++t) {
    const double t_mid = static_cast<double>(t) + 0.5;

    // Gather active terms and group qubits into connected components.
    struct Term {
      bool is_cr = false;
      int q0 = 0, q1 = 0;
      Complex drive = 0.0;  // (scale/2) * envelope * e^{i phi}
      CRCoefficients cr;
    };
    std::vector<Term> terms;
    for (const Instruction* p : plays) {
      if (t < p->start_time || t >= p->end_time()) continue;
      const auto& ce = epochs.at(p->channel);
      const double phi = ce.phase_at(t_mid, device.dt_s);
      Term term;
      if (p->channel.kind == ChannelId::Kind::Drive) {
        term.q0 = p->channel.qubit;
        term.q1 = term.q0;
        const Complex env = sample_envelope(p->envelope, t - p->start_time);
        term.drive = 0.5 * device.drive_scale * env * std::polar(1.0, phi);
      } else {
        term.is_cr = true;
        term.q0 = p->channel.qubit;
        term.q1 = p->channel.target;
        CRCoefficients c =
            effective_cr(device, term.q0, term.q1, param_value(p->envelope.amp));
        const Complex rot = std::polar(1.0, phi);
        const Complex a_xy = Complex(c.a_x, c.a_y) * rot;
        const Complex b_xy = Complex(c.b_x, c.b_y) * rot;
        c.a_x = a_xy.real();
        c.a_y = a_xy.imag();
        c.b_x = b_xy.real();
        c.b_y = b_xy.imag();
        term.cr = c;
      }
      terms.push_back(term);
    }
    if (terms.empty()) continue;

    // Union-find over qubits touched by the active terms.
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& term : terms) parent[find(term.q0)] = find(term.q1);

    std::map<int, std::vector<const Term*>> groups;
    for (const auto& term : terms) groups[find(term.q0)].push_back(&term);

    for (auto& [root, group] : groups) {
      std::vector<int> qubits;
      for (const Term* term : group) {
        qubits.push_back(term->q0);
        if (term->is_cr) qubits.push_back(term->q1);
      }
      std::sort(qubits.begin(), qubits.end());
      qubits.erase(std::unique(qubits.begin(), qubits.end()), qubits.end());
      const int k = static_cast<int>(qubits.size());
      auto local = [&](int q) {
        return static_cast<int>(std::lower_bound(qubits.begin(), qubits.end(), q) - qubits.begin());
      };

      // Signature doubles: flattened term coefficients, deterministic order.
      std::vector<double> sig;
      for (const Term* term : group) {
        if (term->is_cr)
          sig.insert(sig.end(), {1.0, static_cast<double>(term->q0), static_cast<double>(term->q1),
                                 term->cr.a_x, term->cr.a_y, term->cr.a_z, term->cr.b_x,
                                 term->cr.b_y, term->cr.b_z});
        else
          sig.insert(sig.end(), {0.0, static_cast<double>(term->q0), term->drive.real(),
                                 term->drive.imag()});
      }

      auto [it, fresh] = cache.try_emplace(qubits);
      if (fresh || it->second.signature != sig) {
        if (k == 1 && group.size() == 1 && !group.front()->is_cr) {
          const Complex d = group.front()->drive;
          it->second.u = two_level_exp(d.real(), d.imag(), 0.0, 0.0, device.dt_s);
        } else {
          const std::size_t sub_dim = std::size_t{1} << k;
          CMatrix h(sub_dim, sub_dim);
          for (const Term* term : group) {
            std::vector<char> letters(k, 'I');
            if (term->is_cr) {
              auto add = [&](double coeff, char cl, char tl) {
                if (coeff == 0.0) return;
                letters.assign(k, 'I');
                letters[local(term->q0)] = cl;
                letters[local(term->q1)] = tl;
                h = h + coeff * component_pauli(letters);
              };
              add(term->cr.a_x, 'Z', 'X');
              add(term->cr.a_y, 'Z', 'Y');
              add(term->cr.a_z, 'Z', 'Z');
              add(term->cr.b_x, 'I', 'X');
              add(term->cr.b_y, 'I', 'Y');
              add(term->cr.b_z, 'I', 'Z');
            } else {
              letters[local(term->q0)] = 'X';
              h = h + term->drive.real() * component_pauli(letters);
              letters[local(term->q0)] = 'Y';
              h = h + term->drive.imag() * component_pauli(letters);
            }
          }
          it->second.u = matexp_hermitian(h, device.dt_s);
        }
        it->second.signature = std::move(sig);
      }
      apply_unitary_subset(psi.amplitudes, n, qubits, it->second.u);
    }
  }

  PropagationResult res;
  res.final_state = std::move(psi);
  res.leakage = 0.0;
  res.wall_samples = total;
  return res;
}

inline PropagationResult full_propagate(const PulseSchedule& schedule, const DeviceConfig& device,
                                        Frame frame, StateVector psi) {
  const std::size_t dim = device.full_dim();
  if (dim > kMaxDenseDim) throw CapacityError("propagate: dimension exceeds max");
  if (psi.dim == device.qubit_dim() && device.bus_cutoff > 1) {
    // Convenience: tensor a qubit-register state with the bus vacuum.
    StateVector lifted(dim);
    for (std::size_t i = 0; i < psi.dim; ++i)
      lifted.amplitudes[i * device.bus_cutoff] = psi.amplitudes[i];
    psi = std::move(lifted);
  }
  if (psi.dim != dim) throw ValidationError("propagate: initial state dimension mismatch");

  const std::int64_t total = schedule.duration_dt();
  auto epochs = build_channel_epochs(schedule, device.dt_s);
  std::vector<const Instruction*> plays;
  for (const auto& ins : schedule.instructions)
    if (ins.op == Instruction::Op::Play) plays.push_back(&ins);

  const CMatrix h0 = static_hamiltonian(device);
  const FrameTransform ft = rotating_frame(device);
  const bool rotating = frame == Frame::Rotating;
  const bool rwa = rotating && device.rwa;
  const int substeps = rwa ? 1 : device.substeps;
  const double h_step = device.dt_s / static_cast<double>(substeps);
  const double cutoff_rad = 2.0 * M_PI * device.rwa_cutoff_hz;

  // Sparse element list of the X operator on each qubit within the full space.
  struct XElement {
    std::size_t a = 0, b = 0;
    double value = 0.0;
  };
  std::vector<std::vector<XElement>> x_elems(device.n_qubits);
  for (int q = 0; q < device.n_qubits; ++q) {
    CMatrix xq = detail::embed_qubit_op(device, q, pauli_x());
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = 0; b < dim; ++b)
        if (xq(a, b) != Complex{}) x_elems[q].push_back({a, b, xq(a, b).real()});
  }

  CMatrix h(dim, dim);
  CMatrix prev_h(dim, dim);
  CMatrix step_u;
  bool have_prev = false;

  for (std::int64_t t = 0; t < total; ++t) {
    for (int sub = 0; sub < substeps; ++sub) {
      const double t_mid_dt = static_cast<double>(t) + (static_cast<double>(sub) + 0.5) /
                                                           static_cast<double>(substeps);
      const double t_mid = t_mid_dt * device.dt_s;

      // Assemble the (frame-resolved) Hamiltonian at the substep midpoint.
      std::fill(h.data.begin(), h.data.end(), Complex{});
      if (!rotating) {
        h = h0;
      } else {
        for (std::size_t a = 0; a < dim; ++a)
          for (std::size_t b = 0; b < dim; ++b) {
            if (a == b) continue;  // frame removes the diagonal drift
            const double w = ft.frequency(a) - ft.frequency(b);
            if (rwa && std::abs(w) > cutoff_rad) continue;
            if (h0(a, b) == Complex{}) continue;
            h(a, b) = h0(a, b) * std::polar(1.0, w * t_mid);
          }
      }

      for (const Instruction* p : plays) {
        if (t < p->start_time || t >= p->end_time()) continue;
        const auto& ce = epochs.at(p->channel);
        const double phi = ce.phase_at(t_mid_dt, device.dt_s);
        const double w_lo = 2.0 * M_PI * channel_lo_hz(device, p->channel);
        const Complex env = sample_envelope(p->envelope, t - p->start_time) *
                            std::polar(1.0, phi) * device.drive_scale;
        const int q = p->channel.qubit;  // control channels drive the control qubit
        if (!rotating) {
          const double signal = (env * std::polar(1.0, w_lo * t_mid)).real();
          for (const auto& el : x_elems[q]) h(el.a, el.b) += signal * el.value;
        } else {
          for (const auto& el : x_elems[q]) {
            const double w_el = ft.frequency(el.a) - ft.frequency(el.b);
            const double w_plus = w_el + w_lo;
            const double w_minus = w_el - w_lo;
            Complex v{};
            if (!rwa || std::abs(w_plus) <= cutoff_rad)
              v += 0.5 * env * std::polar(1.0, w_plus * t_mid);
            if (!rwa || std::abs(w_minus) <= cutoff_rad)
              v += 0.5 * std::conj(env) * std::polar(1.0, w_minus * t_mid);
            h(el.a, el.b) += v * el.value;
          }
        }
      }

      // Exact Hermitian symmetrization guard against round-off.
      for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = a + 1; b < dim; ++b) {
          const Complex m = 0.5 * (h(a, b) + std::conj(h(b, a)));
          h(a, b) = m;
          h(b, a) = std::conj(m);
        }

      if (!have_prev || max_abs(h - prev_h) > 0.0) {
        step_u = matexp_hermitian(h, h_step);
        prev_h = h;
        have_prev = true;
      }
      std::vector<Complex> next(dim);
      for (std::size_t a = 0; a < dim; ++a) {
        Complex acc{};
        for (std::size_t b = 0; b < dim; ++b) acc += step_u(a, b) * psi.amplitudes[b];
        next[a] = acc;
      }
      psi.amplitudes = std::move(next);
    }
  }

  if (rotating) {
    const double big_t = static_cast<double>(total) * device.dt_s;
    for (std::size_t a = 0; a < dim; ++a)
      psi.amplitudes[a] *= std::polar(1.0, -ft.frequency(a) * big_t);
  }

  PropagationResult res;
  res.wall_samples = total;
  double vac = 0.0;
  for (std::size_t i = 0; i < dim; ++i)
    if (i % static_cast<std::size_t>(device.bus_cutoff) == 0) vac += std::norm(psi.amplitudes[i]);
  res.leakage = device.bus_cutoff > 1 ? std::max(0.0, 1.0 - vac) : 0.0;
  res.final_state = std::move(psi);
  return res;
}

}  // namespace detail

/// Propagates a fully bound schedule from `initial` under the chosen model.
inline PropagationResult propagate(const PulseSchedule& schedule, const DeviceConfig& device,
                                   SimModel model, Frame frame, const StateVector& initial) {
  if (!schedule.is_bound()) throw ValidationError("propagate: schedule has unbound parameters");
  if (model == SimModel::Effective) return detail::effective_propagate(schedule, device, initial);
  return detail::full_propagate(schedule, device, frame, initial);
}

inline PropagationResult propagate(const PulseSchedule& schedule, const DeviceConfig& device,
                                   SimModel model = SimModel::Effective,
                                   Frame frame = Frame::Rotating) {
  const std::size_t dim = model == SimModel::Effective ? device.qubit_dim() : device.full_dim();
  return propagate(schedule, device, model, frame, StateVector::basis_state(dim, 0));
}

/// Full unitary by columnwise propagation of basis states.
inline CMatrix propagate_unitary(const PulseSchedule& schedule, const DeviceConfig& device,
                                 SimModel model = SimModel::Effective,
                                 Frame frame = Frame::Rotating) {
  if (model == SimModel::Full && device.n_qubits > 3)
    throw CapacityError("propagate_unitary: FULL model limited to 3 qubits");
  const std::size_t dim = model == SimModel::Effective ? device.qubit_dim() : device.full_dim();
  CMatrix u(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) {
    auto res = propagate(schedule, device, model, frame, StateVector::basis_state(dim, col));
    for (std::size_t row = 0; row < dim; ++row) u(row, col) = res.final_state.amplitudes[row];
  }
  return u;
}

}  // namespace pulseforge
