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
#include "pulseforge/dynamics.hpp"

using namespace pulseforge;

namespace {

DeviceConfig effective_device(int n_qubits = 2) {
  DeviceConfig cfg;
  cfg.name = "dyn";
  cfg.n_qubits = n_qubits;
  for (int q = 0; q < n_qubits; ++q) cfg.qubit_freq_hz.push_back(5.0e9 + 0.2e9 * q);
  for (int q = 0; q + 1 < n_qubits; ++q) cfg.topology.push_back({q, q + 1});
  cfg.bus_cutoff = 1;
  finalize_device(cfg);
  return cfg;
}

// Scaled-down frequencies so lab-frame stepping resolves the oscillations.
DeviceConfig slow_full_device(int n_qubits, bool rwa) {
  DeviceConfig cfg;
  cfg.name = "slow";
  cfg.n_qubits = n_qubits;
  for (int q = 0; q < n_qubits; ++q) cfg.qubit_freq_hz.push_back(60e6 + 20e6 * q);
  for (int q = 0; q < n_qubits; ++q) cfg.coupling_hz.push_back(3e6);
  cfg.bus_freq_hz = 130e6;
  cfg.bus_cutoff = 3;
  for (int q = 0; q + 1 < n_qubits; ++q) cfg.topology.push_back({q, q + 1});
  cfg.rwa = rwa;
  cfg.substeps = 16;
  finalize_device(cfg);
  return cfg;
}

PulseSchedule constant_drive(const DeviceConfig& cfg, int qubit, double amp, double detuning_hz,
                             std::int64_t duration) {
  PulseSchedule s(cfg.n_qubits);
  Instruction det;
  det.op = Instruction::Op::SetDetuning;
  det.channel = drive_channel(qubit);
  det.detuning = detuning_hz;
  s.add(det);
  Instruction play;
  play.op = Instruction::Op::Play;
  play.channel = drive_channel(qubit);
  play.envelope.kind = EnvelopeKind::Gaussian;
  play.envelope.duration = duration;
  play.envelope.sigma = 1e12;  // effectively flat
  play.envelope.amp = amp;
  s.add(play);
  return s;
}

double p1_of(const PropagationResult& res) {
  return std::norm(res.final_state.amplitudes[1]);
}

}  // namespace

TEST_CASE("empty schedule returns the initial state") {
  DeviceConfig cfg = effective_device(1);
  StateVector init(2);
  init.amplitudes = {Complex(0.6), Complex(0.8)};
  auto res = propagate(PulseSchedule(1), cfg, SimModel::Effective, Frame::Rotating, init);
  REQUIRE(std::abs(res.final_state.amplitudes[0] - Complex(0.6)) < 1e-15);
  REQUIRE(res.leakage == 0.0);
  REQUIRE(res.wall_samples == 0);
}

TEST_CASE("resonant constant drive follows the Rabi formula") {
  DeviceConfig cfg = effective_device(1);
  const double amp = 0.05;
  const double omega = cfg.drive_scale * amp;
  for (std::int64_t steps : {50, 200, 500}) {
    auto res = propagate(constant_drive(cfg, 0, amp, 0.0, steps), cfg);
    const double t = static_cast<double>(steps) * cfg.dt_s;
    REQUIRE(p1_of(res) == Catch::Approx(oracles::rabi_p1(omega, 0.0, t)).margin(1e-9));
  }
}

TEST_CASE("detuned constant drive follows the generalized Rabi formula") {
  DeviceConfig cfg = effective_device(1);
  const double amp = 0.08;
  const double omega = cfg.drive_scale * amp;
  const double det = 1.5e6;
  auto res = propagate(constant_drive(cfg, 0, amp, det, 400), cfg);
  const double t = 400 * cfg.dt_s;
  REQUIRE(p1_of(res) ==
          Catch::Approx(oracles::rabi_p1(omega, 2 * M_PI * det, t)).margin(1e-6));
}

TEST_CASE("two-level detuning response is symmetric") {
  DeviceConfig cfg = effective_device(1);
  for (double det : {0.3e6, 0.9e6, 1.7e6}) {
    auto plus = propagate(constant_drive(cfg, 0, 0.06, det, 300), cfg);
    auto minus = propagate(constant_drive(cfg, 0, 0.06, -det, 300), cfg);
    REQUIRE(p1_of(plus) == Catch::Approx(p1_of(minus)).margin(1e-6));
  }
}

TEST_CASE("calibrated pi pulse excites the qubit") {
  DeviceConfig cfg = effective_device(1);
  // Calibration convention: snp at amp 0.2 is a pi/2 rotation, so 0.4 is pi.
  PulseSchedule s = pulseforge::bind(snp(0, "a", "f", cfg), {0.4, 0.0});
  auto res = propagate(s, cfg);
  REQUIRE(p1_of(res) >= 0.999);
}

TEST_CASE("snp at pi/2 amplitude matches exp(-i pi X / 4)") {
  DeviceConfig cfg = effective_device(1);
  PulseSchedule s = pulseforge::bind(snp(0, "a", "f", cfg), {0.2, 0.0});
  CMatrix u = propagate_unitary(s, cfg);
  CMatrix target = matexp_hermitian(pauli_x(), M_PI / 4.0);
  REQUIRE(fidelity(u, target) >= 0.999);
}

TEST_CASE("zero-amplitude binding propagates to the identity") {
  DeviceConfig cfg = effective_device(2);
  PulseSchedule s(2);
  s.append_sequential(snp(0, "a0", "f0", cfg));
  s.append_sequential(cr(0, 1, "ca", "cf", 736, cfg));
  s.append_sequential(snp(1, "a1", "f1", cfg));
  CMatrix u = propagate_unitary(pulseforge::bind(s, std::vector<double>(s.params.size(), 0.0)), cfg);
  REQUIRE(max_abs(u - CMatrix::identity(4)) < 1e-9);
}

TEST_CASE("effective CR block matches the analytic exponential") {
  DeviceConfig cfg = effective_device(2);
  cfg.cr_zy_rate_per_amp = 0.1 * cfg.cr_zx_rate_per_amp;
  cfg.cr_iz_rate_per_amp = -0.05 * cfg.cr_zx_rate_per_amp;
  const double amp = 0.17;
  PulseSchedule s = pulseforge::bind(cr(0, 1, "a", "f", 736, cfg), {amp, 0.0});
  CMatrix u = propagate_unitary(s, cfg);
  const double t = 736.0 * cfg.dt_s;
  CMatrix expect = evolve_effective(effective_cr(cfg, 0, 1, amp), t);
  REQUIRE(max_abs(u - expect) < 1e-9);
}

TEST_CASE("evolve_effective analytic cases and Taylor oracle") {
  CRCoefficients zero;
  REQUIRE(max_abs(evolve_effective(zero, 0.0) - CMatrix::identity(4)) < 1e-14);

  CRCoefficients bx;
  bx.b_x = 2.0e6;
  const double t = 100e-9;
  CMatrix u = evolve_effective(bx, t);
  CMatrix expect = kron(CMatrix::identity(2), matexp_hermitian(pauli_x(), bx.b_x * t));
  REQUIRE(max_abs(u - expect) < 1e-12);

  CRCoefficients c;
  c.a_x = 3.1e6;
  c.a_y = -1.2e6;
  c.a_z = 0.8e6;
  c.b_x = -2.2e6;
  c.b_y = 0.4e6;
  c.b_z = 1.9e6;
  const double ts = 1e-8;
  CMatrix h(4, 4);
  h = c.a_x * kron(pauli_z(), pauli_x()) + c.a_y * kron(pauli_z(), pauli_y()) +
      c.a_z * kron(pauli_z(), pauli_z()) + c.b_x * kron(CMatrix::identity(2), pauli_x()) +
      c.b_y * kron(CMatrix::identity(2), pauli_y()) + c.b_z * kron(CMatrix::identity(2), pauli_z());
  REQUIRE(max_abs(evolve_effective(c, ts) - oracles::taylor_matexp(h, ts, 30)) < 1e-9);
}

TEST_CASE("fidelity formula and invariances") {
  CMatrix x = pauli_x();
  REQUIRE(fidelity(x, x) == Catch::Approx(1.0));
  REQUIRE(fidelity(CMatrix::identity(2), x) == Catch::Approx(1.0 / 3.0));
  CMatrix phased = std::polar(1.0, 1.234) * x;
  REQUIRE(fidelity(phased, x) == Catch::Approx(1.0));
  REQUIRE_THROWS_AS(fidelity(CMatrix::identity(2), CMatrix::identity(4)), ValidationError);
}

TEST_CASE("barrier composition equals operator product") {
  DeviceConfig cfg = effective_device(2);
  PulseSchedule s1(2);
  s1.merge_at(snp(0, "a0", "f0", cfg), 0);
  s1.merge_at(snp(1, "a1", "f1", cfg), 0);
  PulseSchedule s2(2);
  s2.merge_at(cr(0, 1, "ca", "cf", 600, cfg), 0);

  PulseSchedule both(2);
  both.append_sequential(s1);
  both.append_sequential(s2);

  std::vector<double> v1 = {0.31, 1.1e6, 0.22, -0.4e6};
  std::vector<double> v2 = {0.18, 0.7e6};
  std::vector<double> vall = v1;
  vall.insert(vall.end(), v2.begin(), v2.end());

  CMatrix u1 = propagate_unitary(pulseforge::bind(s1, v1), cfg);
  CMatrix u2 = propagate_unitary(pulseforge::bind(s2, v2), cfg);
  CMatrix u = propagate_unitary(pulseforge::bind(both, vall), cfg);
  REQUIRE(max_abs(u - u2 * u1) < 1e-8);
}

TEST_CASE("norm is preserved across random bound schedules") {
  DeviceConfig cfg = effective_device(2);
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    PulseSchedule s(2);
    s.append_sequential(snp(0, "a0", "f0", cfg));
    s.append_sequential(cr(0, 1, "c", "g", 200 + 8 * (rng.next_u64() % 40), cfg));
    s.append_sequential(snp(1, "a1", "f1", cfg));
    std::vector<double> vals;
    for (const auto& spec : s.params.entries) vals.push_back(rng.uniform(spec.lo, spec.hi));
    auto res = propagate(pulseforge::bind(s, vals), cfg);
    REQUIRE(res.final_state.norm() == Catch::Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("unitarity of propagated schedules") {
  DeviceConfig cfg = effective_device(2);
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    PulseSchedule s(2);
    s.append_sequential(snp(0, "a0", "f0", cfg));
    s.append_sequential(snp(1, "a1", "f1", cfg));
    std::vector<double> vals;
    for (const auto& spec : s.params.entries) vals.push_back(rng.uniform(spec.lo, spec.hi));
    CMatrix u = propagate_unitary(pulseforge::bind(s, vals), cfg);
    REQUIRE(unitarity_residual(u) <= 1e-9);
  }
}

TEST_CASE("full model: lab frame equals rotating frame without RWA") {
  DeviceConfig cfg = slow_full_device(1, /*rwa=*/false);
  PulseSchedule s = pulseforge::bind(snp(0, "a", "f", cfg), {0.2, 0.0});
  auto lab = propagate(s, cfg, SimModel::Full, Frame::Lab);
  auto rot = propagate(s, cfg, SimModel::Full, Frame::Rotating);
  Complex overlap{};
  for (std::size_t i = 0; i < lab.final_state.dim; ++i)
    overlap += std::conj(lab.final_state.amplitudes[i]) * rot.final_state.amplitudes[i];
  REQUIRE(std::norm(overlap) >= 1.0 - 1e-4);
}

TEST_CASE("full model with RWA approximates the Rabi formula") {
  DeviceConfig cfg = slow_full_device(1, /*rwa=*/true);
  cfg.coupling_hz = {0.0};  // isolate the drive physics
  const double amp = 0.1;
  PulseSchedule s = constant_drive(cfg, 0, amp, 0.0, 160);
  auto res = propagate(s, cfg, SimModel::Full, Frame::Rotating);
  const double omega = cfg.drive_scale * amp;
  const double t = 160 * cfg.dt_s;
  auto p1 = [&](const PropagationResult& r) {
    double p = 0.0;
    for (int nb = 0; nb < cfg.bus_cutoff; ++nb)
      p += std::norm(r.final_state.amplitudes[static_cast<std::size_t>(cfg.bus_cutoff + nb)]);
    return p;
  };
  // Pinned convention: resonant Rabi rate is drive_scale * amplitude in both
  // the FULL (RWA) and EFFECTIVE models.
  REQUIRE(p1(res) == Catch::Approx(oracles::rabi_p1(omega, 0.0, t)).margin(1e-3));
}

TEST_CASE("doubling substeps changes the final state by <= 1e-6 fidelity") {
  DeviceConfig cfg16 = slow_full_device(2, /*rwa=*/false);
  DeviceConfig cfg32 = cfg16;
  cfg32.substeps = 32;
  PulseSchedule s(2);
  s.append_sequential(snp(0, "a0", "f0", cfg16));
  s.append_sequential(cr(0, 1, "c", "g", 120, cfg16));
  PulseSchedule b = pulseforge::bind(s, {0.2, 0.5e6, 0.15, -0.3e6});
  auto r16 = propagate(b, cfg16, SimModel::Full, Frame::Rotating);
  auto r32 = propagate(b, cfg32, SimModel::Full, Frame::Rotating);
  Complex overlap{};
  for (std::size_t i = 0; i < r16.final_state.dim; ++i)
    overlap += std::conj(r16.final_state.amplitudes[i]) * r32.final_state.amplitudes[i];
  REQUIRE(std::norm(overlap) >= 1.0 - 1e-6);
}

TEST_CASE("unbound schedule is rejected and FULL unitary capacity is guarded") {
  DeviceConfig cfg = effective_device(2);
  PulseSchedule s = snp(0, "a", "f", cfg);
  REQUIRE_THROWS_AS(propagate(s, cfg), ValidationError);

  DeviceConfig big = effective_device(4);
  big.bus_cutoff = 2;
  finalize_device(big);
  REQUIRE_THROWS_AS(propagate_unitary(PulseSchedule(4), big, SimModel::Full), CapacityError);
}
