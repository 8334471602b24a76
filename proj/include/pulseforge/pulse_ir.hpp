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
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "pulseforge/device_model.hpp"
#include "pulseforge/errors.hpp"

// Parametric pulse-schedule intermediate representation. A schedule is a
// time-ordered list of instructions on drive/control channels; amplitudes and
// channel detunings may be symbolic parameters bound later. Phase convention:
// ShiftPhase adds to a per-channel phase that applies to all subsequent
// pulses on that channel (virtual-Z); SetDetuning applies per channel epoch,
// until changed, with phase-continuous switching.

namespace pulseforge {

struct LoweringError : std::runtime_error {
  explicit LoweringError(const std::string& what) : std::runtime_error(what) {}
};

struct ParamRef {
  std::string name;
  friend bool operator==(const ParamRef&, const ParamRef&) = default;
};

/// A literal value or a named parameter to be bound.
using Param = std::variant<double, ParamRef>;

inline bool is_bound_param(const Param& p) { return std::holds_alternative<double>(p); }
inline double param_value(const Param& p) {
  if (!is_bound_param(p)) throw ValidationError("unbound parameter '" + std::get<ParamRef>(p).name + "'");
  return std::get<double>(p);
}

enum class ParamKind { Amplitude, Detuning, Phase };

struct ParamSpec {
  std::string name;
  ParamKind kind = ParamKind::Amplitude;
  double lo = 0.0;
  double hi = 0.0;
};

/// Ordered, named parameter declarations with bounds. Binding vectors match
/// this order.
struct ParamSpace {
  std::vector<ParamSpec> entries;

  std::size_t size() const { return entries.size(); }

  std::size_t index_of(const std::string& name) const {
    for (std::size_t i = 0; i < entries.size(); ++i)
      if (entries[i].name == name) return i;
    throw ValidationError("unknown parameter '" + name + "'");
  }

  void add(const ParamSpec& spec) {
    if (spec.lo > spec.hi) throw ValidationError("parameter '" + spec.name + "': lo > hi");
    for (const auto& e : entries)
      if (e.name == spec.name) throw ValidationError("duplicate parameter '" + spec.name + "'");
    entries.push_back(spec);
  }

  void merge(const ParamSpace& other) {
    for (const auto& e : other.entries) add(e);
  }
};

enum class EnvelopeKind { Gaussian, Drag, GaussianSquare };

/// Sampled pulse shape. Durations and sigma are in dt units; amp is a
/// dimensionless drive fraction (|amp| <= device amp_max once bound).
struct Envelope {
  EnvelopeKind kind = EnvelopeKind::Gaussian;
  std::int64_t duration = 0;
  double sigma = 0.0;
  Param amp = 0.0;
  double beta = 0.0;         // Drag only (dt)
  std::int64_t width = 0;    // GaussianSquare flat-top length (dt)

  void validate() const {
    if (duration <= 0) throw ValidationError("envelope: duration must be positive");
    if (!(sigma > 0)) throw ValidationError("envelope: sigma must be positive");
    if (kind == EnvelopeKind::GaussianSquare && (width < 0 || width >= duration))
      throw ValidationError("envelope: width must satisfy 0 <= width < duration");
  }
};

/// Complex envelope sample at index k (bound amplitude required).
inline Complex sample_envelope(const Envelope& e, std::int64_t k) {
  if (k < 0 || k >= e.duration) throw ValidationError("sample_envelope: index out of range");
  const double amp = param_value(e.amp);
  switch (e.kind) {
    case EnvelopeKind::Gaussian: {
      const double c = 0.5 * static_cast<double>(e.duration - 1);
      const double x = (static_cast<double>(k) - c) / e.sigma;
      return Complex(amp * std::exp(-0.5 * x * x), 0.0);
    }
    case EnvelopeKind::Drag: {
      const double c = 0.5 * static_cast<double>(e.duration - 1);
      const double x = (static_cast<double>(k) - c) / e.sigma;
      const double g = amp * std::exp(-0.5 * x * x);
      const double dg = -g * (static_cast<double>(k) - c) / (e.sigma * e.sigma);
      return Complex(g, e.beta * dg);
    }
    case EnvelopeKind::GaussianSquare: {
      const double rise = 0.5 * static_cast<double>(e.duration - e.width);
      const double kk = static_cast<double>(k);
      double x = 0.0;
      if (kk < rise) x = (kk - rise) / e.sigma;
      else if (kk >= rise + static_cast<double>(e.width)) x = (kk - rise - static_cast<double>(e.width)) / e.sigma;
      return Complex(amp * std::exp(-0.5 * x * x), 0.0);
    }
  }
  throw ValidationError("sample_envelope: unknown envelope kind");
}

struct Instruction {
  enum class Op { Play, ShiftPhase, SetDetuning, Delay, Barrier };
  Op op = Op::Play;
  ChannelId channel;
  std::int64_t start_time = 0;  // dt
  Envelope envelope;            // Play
  double phase = 0.0;           // ShiftPhase (radians)
  Param detuning = 0.0;         // SetDetuning (Hz)
  std::int64_t delay = 0;       // Delay (dt)

  std::int64_t end_time() const {
    switch (op) {
      case Op::Play: return start_time + envelope.duration;
      case Op::Delay: return start_time + delay;
      default: return start_time;
    }
  }
};

/// Timed sequence of parametric pulse instructions; the ansatz representation.
struct PulseSchedule {
  int n_qubits = 0;
  std::vector<Instruction> instructions;
  ParamSpace params;

  PulseSchedule() = default;
  explicit PulseSchedule(int n) : n_qubits(n) {
    if (n <= 0) throw ValidationError("schedule: n_qubits must be positive");
  }

  /// Critical-path duration in dt: max instruction end time over channels.
  std::int64_t duration_dt() const {
    std::int64_t end = 0;
    for (const auto& ins : instructions) end = std::max(end, ins.end_time());
    return end;
  }

  std::int64_t channel_end(const ChannelId& ch) const {
    std::int64_t end = 0;
    for (const auto& ins : instructions)
      if (ins.channel == ch) end = std::max(end, ins.end_time());
    return end;
  }

  bool is_bound() const {
    for (const auto& ins : instructions) {
      if (ins.op == Instruction::Op::Play && !is_bound_param(ins.envelope.amp)) return false;
      if (ins.op == Instruction::Op::SetDetuning && !is_bound_param(ins.detuning)) return false;
    }
    return true;
  }

  void add(Instruction ins) {
    if (ins.start_time < 0) throw ValidationError("schedule: negative start time");
    if (ins.op == Instruction::Op::Play) {
      ins.envelope.validate();
      for (const auto& other : instructions)
        if (other.op == Instruction::Op::Play && other.channel == ins.channel &&
            ins.start_time < other.end_time() && other.start_time < ins.end_time())
          throw ValidationError("schedule: overlapping Play instructions on channel " +
                                ins.channel.str());
    }
    instructions.push_back(std::move(ins));
    std::stable_sort(instructions.begin(), instructions.end(),
                     [](const Instruction& a, const Instruction& b) { return a.start_time < b.start_time; });
  }

  /// Appends `block` starting at `offset` dt, merging parameter spaces.
  void merge_at(const PulseSchedule& block, std::int64_t offset) {
    if (block.n_qubits > n_qubits) throw ValidationError("schedule: block exceeds qubit count");
    for (const auto& spec : block.params.entries) params.add(spec);
    for (Instruction ins : block.instructions) {
      ins.start_time += offset;
      add(std::move(ins));
    }
  }

  /// Appends `block` after everything currently scheduled (barrier semantics)
  /// and records the barrier.
  void append_sequential(const PulseSchedule& block) {
    const std::int64_t t = duration_dt();
    if (!instructions.empty()) {
      Instruction barrier;
      barrier.op = Instruction::Op::Barrier;
      barrier.start_time = t;
      instructions.push_back(barrier);
    }
    merge_at(block, t);
  }
};

/// Schedules each block in one layer so they finish together at the layer end
/// (as-late-as-possible alignment), appended after the current content.
inline void append_layer(PulseSchedule& target, const std::vector<PulseSchedule>& blocks) {
  const std::int64_t t0 = target.duration_dt();
  std::int64_t layer = 0;
  for (const auto& b : blocks) layer = std::max(layer, b.duration_dt());
  if (!target.instructions.empty()) {
    Instruction barrier;
    barrier.op = Instruction::Op::Barrier;
    barrier.start_time = t0;
    target.instructions.push_back(barrier);
  }
  for (const auto& b : blocks) target.merge_at(b, t0 + layer - b.duration_dt());
}

/// Critical-path duration as (dt samples, nanoseconds).
inline std::pair<std::int64_t, double> duration_of(const PulseSchedule& s, const DeviceConfig& device) {
  const std::int64_t dt = s.duration_dt();
  return {dt, static_cast<double>(dt) * device.dt_s * 1e9};
}

/// Replaces every ParamRef with the matching entry of `values` (ordered as
/// the schedule's ParamSpace), validating bounds.
inline PulseSchedule bind(const PulseSchedule& s, const std::vector<double>& values) {
  if (values.size() != s.params.size())
    throw ValidationError("bind: expected " + std::to_string(s.params.size()) + " values, got " +
                          std::to_string(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& spec = s.params.entries[i];
    if (values[i] < spec.lo - 1e-12 || values[i] > spec.hi + 1e-12)
      throw BoundsError("bind: parameter '" + spec.name + "' value " + std::to_string(values[i]) +
                        " outside [" + std::to_string(spec.lo) + ", " + std::to_string(spec.hi) + "]");
  }
  PulseSchedule out = s;
  auto resolve = [&](Param& p) {
    if (is_bound_param(p)) return;
    const std::size_t idx = s.params.index_of(std::get<ParamRef>(p).name);
    p = values[idx];
  };
  for (auto& ins : out.instructions) {
    if (ins.op == Instruction::Op::Play) resolve(ins.envelope.amp);
    if (ins.op == Instruction::Op::SetDetuning) resolve(ins.detuning);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Block builders

/// Single-qubit native pulse: one Drag Play on the qubit's drive channel,
/// duration snp_duration_dt, sigma = duration/4, beta from device config.
/// Amplitude and channel detuning are registered as trainable parameters.
inline PulseSchedule snp(int qubit, const std::string& amp_param, const std::string& detuning_param,
                         const DeviceConfig& device) {
  if (qubit < 0 || qubit >= device.n_qubits)
    throw ValidationError("snp: unknown qubit " + std::to_string(qubit));
  PulseSchedule s(device.n_qubits);
  s.params.add({amp_param, ParamKind::Amplitude, 0.0, device.amp_max});
  s.params.add({detuning_param, ParamKind::Detuning, -device.detuning_max_hz, device.detuning_max_hz});

  Instruction det;
  det.op = Instruction::Op::SetDetuning;
  det.channel = drive_channel(qubit);
  det.detuning = ParamRef{detuning_param};
  s.add(det);

  Instruction play;
  play.op = Instruction::Op::Play;
  play.channel = drive_channel(qubit);
  play.envelope.kind = EnvelopeKind::Drag;
  play.envelope.duration = device.snp_duration_dt;
  play.envelope.sigma = static_cast<double>(device.snp_duration_dt) / 4.0;
  play.envelope.amp = ParamRef{amp_param};
  play.envelope.beta = device.drag_beta_dt;
  s.add(play);
  return s;
}

/// Cross-resonance block: one GaussianSquare Play on Control(control, target)
/// (LO at the target qubit's frequency), with trainable amplitude/detuning.
inline PulseSchedule cr(int control, int target, const std::string& amp_param,
                        const std::string& detuning_param, std::int64_t duration_dt,
                        const DeviceConfig& device) {
  if (!device.is_edge(control, target))
    throw TopologyError("cr: (" + std::to_string(control) + "," + std::to_string(target) +
                        ") is not a topology edge");
  PulseSchedule s(device.n_qubits);
  s.params.add({amp_param, ParamKind::Amplitude, 0.0, device.amp_max});
  s.params.add({detuning_param, ParamKind::Detuning, -device.detuning_max_hz, device.detuning_max_hz});

  Instruction det;
  det.op = Instruction::Op::SetDetuning;
  det.channel = control_channel(control, target);
  det.detuning = ParamRef{detuning_param};
  s.add(det);

  const double sigma = std::min(64.0, static_cast<double>(duration_dt) / 8.0);
  Instruction play;
  play.op = Instruction::Op::Play;
  play.channel = control_channel(control, target);
  play.envelope.kind = EnvelopeKind::GaussianSquare;
  play.envelope.duration = duration_dt;
  play.envelope.sigma = sigma;
  play.envelope.width = duration_dt - static_cast<std::int64_t>(4.0 * sigma);
  play.envelope.amp = ParamRef{amp_param};
  s.add(play);
  return s;
}

// ---------------------------------------------------------------------------
// Gate lowering

enum class GateKind { RX, RY, RZ, H, X, CX, CZ };

struct GateOp {
  GateKind kind = GateKind::RX;
  double angle = 0.0;  // RX/RY/RZ only
  std::vector<int> qubits;
};

/// Amplitude performing a pi/2 rotation with a Drag envelope of the given
/// duration (sigma = duration/4) under the device calibration convention.
inline double pi_half_amplitude(const DeviceConfig& device, std::int64_t duration_dt) {
  const double area =
      detail::gaussian_sample_area(duration_dt, static_cast<double>(duration_dt) / 4.0);
  return (M_PI / 2.0) / (device.drive_scale * area * device.dt_s);
}

/// Amplitude of the echoed-CR halves inside a lowered CX: each half must
/// contribute a ZX angle of pi/8 over cx_cr_duration_dt.
inline double cx_cr_amplitude(const DeviceConfig& device) {
  return (M_PI / 8.0) /
         (device.cr_zx_rate_per_amp * static_cast<double>(device.cx_cr_duration_dt) * device.dt_s);
}

namespace detail {

inline void lower_check_amp(double amp, const DeviceConfig& device, const std::string& what) {
  if (std::abs(amp) > device.amp_max + 1e-12)
    throw LoweringError(what + ": required amplitude " + std::to_string(amp) +
                        " exceeds device amp_max");
}

// Rotation-gate pulse with the configured angle->amplitude map.
inline PulseSchedule rotation_pulse(int qubit, double angle, const DeviceConfig& device,
                                    bool arcsine_map = false) {
  const double a90 = pi_half_amplitude(device, device.rx_gate_duration_dt);
  double amp = a90 * angle / (M_PI / 2.0);
  if (arcsine_map) {
    // Optional nonlinearity model: invert angle(A) = pi*sin((pi/2)*(A/A_pi)).
    const double a_pi = 2.0 * a90;
    const double x = std::clamp(angle / M_PI, -1.0, 1.0);
    amp = a_pi * (2.0 / M_PI) * std::asin(x);
  }
  lower_check_amp(amp, device, "rotation_pulse");
  PulseSchedule s(device.n_qubits);
  Instruction play;
  play.op = Instruction::Op::Play;
  play.channel = drive_channel(qubit);
  play.envelope.kind = EnvelopeKind::Drag;
  play.envelope.duration = device.rx_gate_duration_dt;
  play.envelope.sigma = static_cast<double>(device.rx_gate_duration_dt) / 4.0;
  play.envelope.amp = amp;
  play.envelope.beta = device.drag_beta_dt;
  s.add(play);
  return s;
}

inline Instruction shift_phase_ins(const ChannelId& ch, double radians, std::int64_t t) {
  Instruction ins;
  ins.op = Instruction::Op::ShiftPhase;
  ins.channel = ch;
  ins.phase = radians;
  ins.start_time = t;
  return ins;
}

// Virtual-Z on a qubit: shifts the frame of the qubit's drive channel and of
// every control channel targeting it (CR axes rotate with the target frame).
inline void add_virtual_rz(PulseSchedule& s, int qubit, double angle, const DeviceConfig& device,
                           std::int64_t t) {
  s.add(shift_phase_ins(drive_channel(qubit), -angle, t));
  for (const Edge& e : device.topology)
    if (e.target == qubit) s.add(shift_phase_ins(control_channel(e.control, e.target), -angle, t));
}

inline PulseSchedule cr_fixed(int control, int target, double amp, std::int64_t duration,
                              const DeviceConfig& device) {
  lower_check_amp(amp, device, "cr_fixed");
  PulseSchedule s(device.n_qubits);
  const double sigma = std::min(64.0, static_cast<double>(duration) / 8.0);
  Instruction play;
  play.op = Instruction::Op::Play;
  play.channel = control_channel(control, target);
  play.envelope.kind = EnvelopeKind::GaussianSquare;
  play.envelope.duration = duration;
  play.envelope.sigma = sigma;
  play.envelope.width = duration - static_cast<std::int64_t>(4.0 * sigma);
  play.envelope.amp = amp;
  s.add(play);
  return s;
}

}  // namespace detail

/// Lowers one gate to pulses. Rotation angles map linearly onto pulse
/// amplitudes (A_theta = A_{pi/2} * theta / (pi/2)); RZ is a zero-duration
/// frame change; H is one X90 pulse between two virtual-Z quarter turns;
/// CX is an echoed cross-resonance sequence with the target correction pulse
/// parallel to the closing echo pulse; CZ conjugates CX with Hadamards.
inline PulseSchedule lower_gate(const GateOp& gate, const DeviceConfig& device,
                                bool arcsine_map = false) {
  auto need_qubits = [&](std::size_t n) {
    if (gate.qubits.size() != n) throw LoweringError("lower_gate: wrong qubit count");
    for (int q : gate.qubits)
      if (q < 0 || q >= device.n_qubits) throw LoweringError("lower_gate: invalid qubit");
  };
  switch (gate.kind) {
    case GateKind::RX: {
      need_qubits(1);
      return detail::rotation_pulse(gate.qubits[0], gate.angle, device, arcsine_map);
    }
    case GateKind::RY: {
      need_qubits(1);
      PulseSchedule s(device.n_qubits);
      const int q = gate.qubits[0];
      s.add(detail::shift_phase_ins(drive_channel(q), M_PI / 2.0, 0));
      s.merge_at(detail::rotation_pulse(q, gate.angle, device, arcsine_map), 0);
      s.add(detail::shift_phase_ins(drive_channel(q), -M_PI / 2.0, s.duration_dt()));
      return s;
    }
    case GateKind::X: {
      need_qubits(1);
      return detail::rotation_pulse(gate.qubits[0], M_PI, device, arcsine_map);
    }
    case GateKind::RZ: {
      need_qubits(1);
      PulseSchedule s(device.n_qubits);
      detail::add_virtual_rz(s, gate.qubits[0], gate.angle, device, 0);
      return s;
    }
    case GateKind::H: {
      need_qubits(1);
      const int q = gate.qubits[0];
      PulseSchedule s(device.n_qubits);
      detail::add_virtual_rz(s, q, M_PI / 2.0, device, 0);
      s.merge_at(detail::rotation_pulse(q, M_PI / 2.0, device, arcsine_map), 0);
      detail::add_virtual_rz(s, q, M_PI / 2.0, device, s.duration_dt());
      return s;
    }
    case GateKind::CX: {
      need_qubits(2);
      const int c = gate.qubits[0];
      const int t = gate.qubits[1];
      if (!device.is_edge(c, t))
        throw TopologyError("lower_gate: CX pair (" + std::to_string(c) + "," + std::to_string(t) +
                            ") is not a topology edge");
      const double amp = cx_cr_amplitude(device);
      PulseSchedule s(device.n_qubits);
      s.append_sequential(detail::cr_fixed(c, t, amp, device.cx_cr_duration_dt, device));
      s.append_sequential(detail::rotation_pulse(c, M_PI, device, arcsine_map));
      s.append_sequential(detail::cr_fixed(c, t, -amp, device.cx_cr_duration_dt, device));
      // Closing echo pulse on the control and the target correction in one
      // parallel slot, then the virtual-Z correction on the control.
      std::vector<PulseSchedule> closing;
      closing.push_back(detail::rotation_pulse(c, M_PI, device, arcsine_map));
      closing.push_back(detail::rotation_pulse(t, -M_PI / 2.0, device, arcsine_map));
      append_layer(s, closing);
      detail::add_virtual_rz(s, c, -M_PI / 2.0, device, s.duration_dt());
      return s;
    }
    case GateKind::CZ: {
      need_qubits(2);
      const int c = gate.qubits[0];
      const int t = gate.qubits[1];
      PulseSchedule s(device.n_qubits);
      s.append_sequential(lower_gate({GateKind::H, 0.0, {t}}, device, arcsine_map));
      s.append_sequential(lower_gate({GateKind::CX, 0.0, {c, t}}, device, arcsine_map));
      s.append_sequential(lower_gate({GateKind::H, 0.0, {t}}, device, arcsine_map));
      return s;
    }
  }
  throw LoweringError("lower_gate: unsupported gate");
}

// ---------------------------------------------------------------------------
// JSON serialization (documented wire format for the CLI)

inline nlohmann::json schedule_to_json(const PulseSchedule& s) {
  nlohmann::json j;
  j["n_qubits"] = s.n_qubits;
  j["params"] = nlohmann::json::array();
  for (const auto& p : s.params.entries) {
    const char* kind = p.kind == ParamKind::Amplitude ? "amplitude"
                       : p.kind == ParamKind::Detuning ? "detuning" : "phase";
    j["params"].push_back({{"name", p.name}, {"kind", kind}, {"bounds", {p.lo, p.hi}}});
  }
  auto param_json = [](const Param& p) -> nlohmann::json {
    if (is_bound_param(p)) return std::get<double>(p);
    return {{"ref", std::get<ParamRef>(p).name}};
  };
  j["instructions"] = nlohmann::json::array();
  for (const auto& ins : s.instructions) {
    nlohmann::json ij;
    ij["t0"] = ins.start_time;
    nlohmann::json ch;
    ch["kind"] = ins.channel.kind == ChannelId::Kind::Drive ? "drive" : "control";
    ch["qubit"] = ins.channel.qubit;
    if (ins.channel.kind == ChannelId::Kind::Control) ch["target"] = ins.channel.target;
    ij["channel"] = ch;
    switch (ins.op) {
      case Instruction::Op::Play: {
        ij["op"] = "play";
        nlohmann::json env;
        env["kind"] = ins.envelope.kind == EnvelopeKind::Gaussian ? "gaussian"
                      : ins.envelope.kind == EnvelopeKind::Drag ? "drag" : "gaussian_square";
        env["duration"] = ins.envelope.duration;
        env["sigma"] = ins.envelope.sigma;
        env["amp"] = param_json(ins.envelope.amp);
        if (ins.envelope.kind == EnvelopeKind::Drag) env["beta"] = ins.envelope.beta;
        if (ins.envelope.kind == EnvelopeKind::GaussianSquare) env["width"] = ins.envelope.width;
        ij["envelope"] = env;
        break;
      }
      case Instruction::Op::ShiftPhase:
        ij["op"] = "shift_phase";
        ij["phase"] = ins.phase;
        break;
      case Instruction::Op::SetDetuning:
        ij["op"] = "set_detuning";
        ij["detuning_hz"] = param_json(ins.detuning);
        break;
      case Instruction::Op::Delay:
        ij["op"] = "delay";
        ij["duration"] = ins.delay;
        break;
      case Instruction::Op::Barrier:
        ij["op"] = "barrier";
        break;
    }
    j["instructions"].push_back(ij);
  }
  return j;
}

inline PulseSchedule schedule_from_json(const nlohmann::json& j) {
  PulseSchedule s(j.at("n_qubits").get<int>());
  for (const auto& p : j.value("params", nlohmann::json::array())) {
    ParamSpec spec;
    spec.name = p.at("name").get<std::string>();
    const std::string kind = p.at("kind").get<std::string>();
    spec.kind = kind == "amplitude" ? ParamKind::Amplitude
                : kind == "detuning" ? ParamKind::Detuning : ParamKind::Phase;
    spec.lo = p.at("bounds").at(0).get<double>();
    spec.hi = p.at("bounds").at(1).get<double>();
    s.params.add(spec);
  }
  auto parse_param = [](const nlohmann::json& pj) -> Param {
    if (pj.is_number()) return pj.get<double>();
    return ParamRef{pj.at("ref").get<std::string>()};
  };
  for (const auto& ij : j.at("instructions")) {
    Instruction ins;
    ins.start_time = ij.at("t0").get<std::int64_t>();
    const auto& ch = ij.at("channel");
    ins.channel = ch.at("kind").get<std::string>() == "drive"
                      ? drive_channel(ch.at("qubit").get<int>())
                      : control_channel(ch.at("qubit").get<int>(), ch.at("target").get<int>());
    const std::string op = ij.at("op").get<std::string>();
    if (op == "play") {
      ins.op = Instruction::Op::Play;
      const auto& env = ij.at("envelope");
      const std::string ek = env.at("kind").get<std::string>();
      ins.envelope.kind = ek == "gaussian" ? EnvelopeKind::Gaussian
                          : ek == "drag" ? EnvelopeKind::Drag : EnvelopeKind::GaussianSquare;
      ins.envelope.duration = env.at("duration").get<std::int64_t>();
      ins.envelope.sigma = env.at("sigma").get<double>();
      ins.envelope.amp = parse_param(env.at("amp"));
      ins.envelope.beta = env.value("beta", 0.0);
      ins.envelope.width = env.value("width", std::int64_t{0});
    } else if (op == "shift_phase") {
      ins.op = Instruction::Op::ShiftPhase;
      ins.phase = ij.at("phase").get<double>();
    } else if (op == "set_detuning") {
      ins.op = Instruction::Op::SetDetuning;
      ins.detuning = parse_param(ij.at("detuning_hz"));
    } else if (op == "delay") {
      ins.op = Instruction::Op::Delay;
      ins.delay = ij.at("duration").get<std::int64_t>();
    } else if (op == "barrier") {
      ins.op = Instruction::Op::Barrier;
    } else {
      throw ParseError("schedule: unknown op '" + op + "'");
    }
    s.add(std::move(ins));
  }
  return s;
}

}  // namespace pulseforge
