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
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pulseforge/log.hpp"
#include "pulseforge/matrix.hpp"
#include "pulseforge/qcore.hpp"

// Transmon system model: a register of two-level qubits capacitively coupled
// to one shared bus mode, driven through per-qubit drive channels and
// per-edge control channels. Two simulation models are built from the same
// config:
//   FULL       - drift + drive Hamiltonian on (C^2)^n (x) C^cutoff,
//   EFFECTIVE  - per-edge block-diagonal cross-resonance Hamiltonian plus
//                rotating-frame single-qubit drives on (C^2)^n.
// All Hamiltonians are in angular frequency units (rad/s); config frequencies
// are plain Hz and multiplied by 2*pi on use.

namespace pulseforge {

enum class SimModel { Full, Effective };

struct Edge {
  int control = 0;
  int target = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Effective cross-resonance Hamiltonian coefficients (rad/s):
///   H = a_x ZX + a_y ZY + a_z ZZ + b_x IX + b_y IY + b_z IZ
/// with the control qubit on the left factor. a_x is the intended ZX rate;
/// the rest are spurious terms.
struct CRCoefficients {
  double a_x = 0, a_y = 0, a_z = 0;
  double b_x = 0, b_y = 0, b_z = 0;
};

struct DeviceConfig {
  std::string name = "device";
  int n_qubits = 0;
  std::vector<double> qubit_freq_hz;  // nu_i
  std::vector<double> coupling_hz;    // g_i, qubit-bus
  double bus_freq_hz = 6.8e9;         // omega_B
  int bus_cutoff = 3;
  double dt_s = 2.0e-9 / 9.0;         // waveform sample period
  double drive_scale = 0.0;           // rad/s per unit amplitude; 0 = derive default
  std::vector<Edge> topology;

  std::int64_t snp_duration_dt = 160;
  std::int64_t rx_gate_duration_dt = 320;
  std::int64_t cr_duration_dt = 736;
  std::int64_t cx_cr_duration_dt = 288;

  double amp_max = 0.4;
  double detuning_max_hz = 2.0e6;
  double drag_beta_dt = 0.5;

  // Effective CR rates per unit amplitude (rad/s). zx = 0 derives the default
  // calibration: amplitude 0.2 over cr_duration_dt gives a ZX angle of pi/4.
  double cr_zx_rate_per_amp = 0.0;
  double cr_zy_rate_per_amp = 0.0;
  double cr_zz_rate_per_amp = 0.0;
  double cr_ix_rate_per_amp = 0.0;
  double cr_iy_rate_per_amp = 0.0;
  double cr_iz_rate_per_amp = 0.0;

  bool rwa = true;
  int substeps = 16;          // substep factor for lab frame / RWA off
  double rwa_cutoff_hz = 0.0;  // 0 = derive default (max qubit frequency)

  bool is_edge(int c, int t) const {
    return std::any_of(topology.begin(), topology.end(),
                       [&](const Edge& e) { return e.control == c && e.target == t; });
  }
  bool touches_edge(int a, int b) const {
    return std::any_of(topology.begin(), topology.end(), [&](const Edge& e) {
      return (e.control == a && e.target == b) || (e.control == b && e.target == a);
    });
  }
  std::size_t qubit_dim() const { return std::size_t{1} << n_qubits; }
  std::size_t full_dim() const { return qubit_dim() * static_cast<std::size_t>(bus_cutoff); }
};

namespace detail {

// Discrete area of the sampled Gaussian envelope (center (d-1)/2, given
// sigma), used by the drive calibration convention.
inline double gaussian_sample_area(std::int64_t duration, double sigma) {
  const double c = 0.5 * static_cast<double>(duration - 1);
  double area = 0.0;
  for (std::int64_t k = 0; k < duration; ++k) {
    const double x = (static_cast<double>(k) - c) / sigma;
    area += std::exp(-0.5 * x * x);
  }
  return area;
}

}  // namespace detail

/// Fills derived defaults and validates invariants. drive_scale defaults to
/// the calibration convention: a Gaussian of snp_duration_dt samples (sigma =
/// duration/4) at amplitude 0.2 performs a pi/2 rotation.
inline void finalize_device(DeviceConfig& cfg) {
  if (cfg.n_qubits <= 0) throw ValidationError("device: n_qubits must be positive");
  if (static_cast<int>(cfg.qubit_freq_hz.size()) != cfg.n_qubits)
    throw ValidationError("device: qubit_freq_hz must list one frequency per qubit");
  for (double f : cfg.qubit_freq_hz)
    if (!(f > 0)) throw ValidationError("device: qubit frequencies must be positive");
  if (cfg.coupling_hz.empty()) cfg.coupling_hz.assign(cfg.n_qubits, 0.0);
  if (static_cast<int>(cfg.coupling_hz.size()) != cfg.n_qubits)
    throw ValidationError("device: coupling_hz must list one coupling per qubit");
  if (!(cfg.bus_freq_hz > 0)) throw ValidationError("device: bus_freq_hz must be positive");
  if (cfg.bus_cutoff < 1) throw ValidationError("device: bus_cutoff must be >= 1");
  if (!(cfg.dt_s > 0)) throw ValidationError("device: dt_s must be positive");
  for (const Edge& e : cfg.topology)
    if (e.control < 0 || e.control >= cfg.n_qubits || e.target < 0 || e.target >= cfg.n_qubits ||
        e.control == e.target)
      throw ValidationError("device: topology edge (" + std::to_string(e.control) + "," +
                            std::to_string(e.target) + ") references invalid qubits");
  if (cfg.snp_duration_dt <= 0 || cfg.rx_gate_duration_dt <= 0 || cfg.cr_duration_dt <= 0 ||
      cfg.cx_cr_duration_dt <= 0)
    throw ValidationError("device: pulse durations must be positive");
  if (!(cfg.amp_max > 0)) throw ValidationError("device: amp_max must be positive");
  if (cfg.full_dim() > kMaxDenseDim) throw CapacityError("device: dimension exceeds max");

  if (cfg.drive_scale == 0.0) {
    const double area = detail::gaussian_sample_area(cfg.snp_duration_dt,
                                                     static_cast<double>(cfg.snp_duration_dt) / 4.0);
    cfg.drive_scale = (M_PI / 2.0) / (0.2 * area * cfg.dt_s);
  }
  if (cfg.cr_zx_rate_per_amp == 0.0) {
    cfg.cr_zx_rate_per_amp =
        (M_PI / 4.0) / (0.2 * static_cast<double>(cfg.cr_duration_dt) * cfg.dt_s);
  }
  if (cfg.rwa_cutoff_hz == 0.0)
    cfg.rwa_cutoff_hz = *std::max_element(cfg.qubit_freq_hz.begin(), cfg.qubit_freq_hz.end());
  if (cfg.substeps < 1) throw ValidationError("device: substeps must be >= 1");

  std::ostringstream echo;
  echo << "device '" << cfg.name << "': n_qubits=" << cfg.n_qubits << " dt_s=" << cfg.dt_s
       << " drive_scale=" << cfg.drive_scale << " cr_zx_rate_per_amp=" << cfg.cr_zx_rate_per_amp
       << " snp=" << cfg.snp_duration_dt << "dt cr=" << cfg.cr_duration_dt << "dt";
  log_line(LogLevel::Info, echo.str());
}

/// Parses a device config from JSON. Strict mode: unknown keys are rejected
/// so typos cannot silently fall back to defaults.
inline DeviceConfig device_from_json(const nlohmann::json& j) {
  static const std::set<std::string> known = {
      "name",           "n_qubits",        "qubit_freq_hz",      "coupling_hz",
      "bus_freq_hz",    "bus_cutoff",      "dt_s",               "drive_scale",
      "topology",       "snp_duration_dt", "rx_gate_duration_dt", "cr_duration_dt",
      "cx_cr_duration_dt", "amp_max",      "detuning_max_hz",    "drag_beta_dt",
      "cr_zx_rate_per_amp", "cr_zy_rate_per_amp", "cr_zz_rate_per_amp",
      "cr_ix_rate_per_amp", "cr_iy_rate_per_amp", "cr_iz_rate_per_amp",
      "rwa",            "substeps",        "rwa_cutoff_hz"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (known.find(it.key()) == known.end())
      throw ValidationError("device: unknown key '" + it.key() + "'");

  DeviceConfig cfg;
  try {
    cfg.name = j.value("name", cfg.name);
    if (!j.contains("n_qubits")) throw ValidationError("device: missing 'n_qubits'");
    cfg.n_qubits = j.at("n_qubits").get<int>();
    if (!j.contains("qubit_freq_hz")) throw ValidationError("device: missing 'qubit_freq_hz'");
    cfg.qubit_freq_hz = j.at("qubit_freq_hz").get<std::vector<double>>();
    cfg.coupling_hz = j.value("coupling_hz", std::vector<double>{});
    cfg.bus_freq_hz = j.value("bus_freq_hz", cfg.bus_freq_hz);
    cfg.bus_cutoff = j.value("bus_cutoff", cfg.bus_cutoff);
    cfg.dt_s = j.value("dt_s", cfg.dt_s);
    cfg.drive_scale = j.value("drive_scale", cfg.drive_scale);
    if (j.contains("topology"))
      for (const auto& e : j.at("topology"))
        cfg.topology.push_back(Edge{e.at(0).get<int>(), e.at(1).get<int>()});
    cfg.snp_duration_dt = j.value("snp_duration_dt", cfg.snp_duration_dt);
    cfg.rx_gate_duration_dt = j.value("rx_gate_duration_dt", cfg.rx_gate_duration_dt);
    cfg.cr_duration_dt = j.value("cr_duration_dt", cfg.cr_duration_dt);
    cfg.cx_cr_duration_dt = j.value("cx_cr_duration_dt", cfg.cx_cr_duration_dt);
    cfg.amp_max = j.value("amp_max", cfg.amp_max);
    cfg.detuning_max_hz = j.value("detuning_max_hz", cfg.detuning_max_hz);
    cfg.drag_beta_dt = j.value("drag_beta_dt", cfg.drag_beta_dt);
    cfg.cr_zx_rate_per_amp = j.value("cr_zx_rate_per_amp", cfg.cr_zx_rate_per_amp);
    cfg.cr_zy_rate_per_amp = j.value("cr_zy_rate_per_amp", cfg.cr_zy_rate_per_amp);
    cfg.cr_zz_rate_per_amp = j.value("cr_zz_rate_per_amp", cfg.cr_zz_rate_per_amp);
    cfg.cr_ix_rate_per_amp = j.value("cr_ix_rate_per_amp", cfg.cr_ix_rate_per_amp);
    cfg.cr_iy_rate_per_amp = j.value("cr_iy_rate_per_amp", cfg.cr_iy_rate_per_amp);
    cfg.cr_iz_rate_per_amp = j.value("cr_iz_rate_per_amp", cfg.cr_iz_rate_per_amp);
    cfg.rwa = j.value("rwa", cfg.rwa);
    cfg.substeps = j.value("substeps", cfg.substeps);
    cfg.rwa_cutoff_hz = j.value("rwa_cutoff_hz", cfg.rwa_cutoff_hz);
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("device: malformed field: ") + ex.what());
  }
  finalize_device(cfg);
  return cfg;
}

inline DeviceConfig load_device(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("device: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError("device: invalid JSON in '" + path + "': " + ex.what());
  }
  return device_from_json(j);
}

namespace detail {

inline CMatrix bus_lowering(int cutoff) {
  CMatrix a(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

/// Embeds a single-qubit operator on qubit q (identity elsewhere, identity on
/// the bus factor).
inline CMatrix embed_qubit_op(const DeviceConfig& cfg, int q, const CMatrix& op) {
  CMatrix m = (q == 0) ? op : CMatrix::identity(2);
  for (int i = 1; i < cfg.n_qubits; ++i) m = kron(m, (i == q) ? op : CMatrix::identity(2));
  if (cfg.bus_cutoff > 1) m = kron(m, CMatrix::identity(cfg.bus_cutoff));
  return m;
}

inline CMatrix embed_bus_op(const DeviceConfig& cfg, const CMatrix& op) {
  return kron(CMatrix::identity(cfg.qubit_dim()), op);
}

}  // namespace detail

/// Drift Hamiltonian on (C^2)^n (x) C^cutoff (rad/s):
///   sum_i 2 pi nu_i (1 - Z_i)/2 + w_B a†a + sum_i g_i X_i (a + a†).
inline CMatrix static_hamiltonian(const DeviceConfig& cfg) {
  if (cfg.full_dim() > kMaxDenseDim) throw CapacityError("static_hamiltonian: dimension exceeds max");
  const std::size_t dim = cfg.full_dim();
  CMatrix h(dim, dim);
  for (int q = 0; q < cfg.n_qubits; ++q) {
    CMatrix number(2, 2);  // (1 - Z)/2
    number(1, 1) = 1.0;
    h = h + (2.0 * M_PI * cfg.qubit_freq_hz[q]) * detail::embed_qubit_op(cfg, q, number);
  }
  if (cfg.bus_cutoff > 1) {
    CMatrix a = detail::bus_lowering(cfg.bus_cutoff);
    CMatrix n_op = adjoint(a) * a;
    h = h + (2.0 * M_PI * cfg.bus_freq_hz) * detail::embed_bus_op(cfg, n_op);
    CMatrix x_bus = a + adjoint(a);
    for (int q = 0; q < cfg.n_qubits; ++q) {
      if (cfg.coupling_hz[q] == 0.0) continue;
      CMatrix xq = detail::embed_qubit_op(cfg, q, pauli_x());
      h = h + (2.0 * M_PI * cfg.coupling_hz[q]) * (xq * detail::embed_bus_op(cfg, x_bus));
    }
  }
  return h;
}

/// Channel identity within a schedule: a per-qubit drive line or a per-edge
/// control line. The control-channel local oscillator sits at the target
/// qubit's frequency.
struct ChannelId {
  enum class Kind { Drive, Control };
  Kind kind = Kind::Drive;
  int qubit = 0;   // drive qubit, or the control qubit of a CR pair
  int target = 0;  // CR target (Control only)

  friend bool operator==(const ChannelId&, const ChannelId&) = default;
  friend bool operator<(const ChannelId& a, const ChannelId& b) {
    return std::tie(a.kind, a.qubit, a.target) < std::tie(b.kind, b.qubit, b.target);
  }
  std::string str() const {
    return kind == Kind::Drive ? "d" + std::to_string(qubit)
                               : "u" + std::to_string(qubit) + "_" + std::to_string(target);
  }
};

inline ChannelId drive_channel(int qubit) { return ChannelId{ChannelId::Kind::Drive, qubit, qubit}; }
inline ChannelId control_channel(int control, int target) {
  return ChannelId{ChannelId::Kind::Control, control, target};
}

/// LO frequency (Hz) of a channel before detuning: the qubit frequency for a
/// drive line, the target qubit's frequency for a control line.
inline double channel_lo_hz(const DeviceConfig& cfg, const ChannelId& ch) {
  const int q = (ch.kind == ChannelId::Kind::Drive) ? ch.qubit : ch.target;
  if (q < 0 || q >= cfg.n_qubits) throw ValidationError("channel: invalid qubit index");
  return cfg.qubit_freq_hz[q];
}

/// Lab-frame drive term at absolute time t (seconds): the modulated signal
/// Re(env · e^{i w_d t}) scaled by drive_scale, multiplying X on the driven
/// qubit (the control qubit for a control channel).
inline CMatrix drive_hamiltonian(const DeviceConfig& cfg, const ChannelId& ch, Complex envelope_value,
                                 double t, double detuning_hz = 0.0) {
  const double w_d = 2.0 * M_PI * (channel_lo_hz(cfg, ch) + detuning_hz);
  const double signal = cfg.drive_scale * (envelope_value * std::polar(1.0, w_d * t)).real();
  const int q = ch.qubit;
  if (q < 0 || q >= cfg.n_qubits) throw ValidationError("drive_hamiltonian: invalid channel qubit");
  return signal * detail::embed_qubit_op(cfg, q, pauli_x());
}

/// Interaction-picture frame: one rotation frequency per basis level, the
/// diagonal part of the drift (qubit frequencies and the bus frequency).
struct FrameTransform {
  std::vector<double> level_freq_rad;  // frame phase rate per basis index

  /// Phase factor e^{+i f_a t} applied on the left and conjugated on the
  /// right when moving an operator into the frame.
  double frequency(std::size_t index) const { return level_freq_rad[index]; }
};

inline FrameTransform rotating_frame(const DeviceConfig& cfg) {
  FrameTransform f;
  const std::size_t dim = cfg.full_dim();
  f.level_freq_rad.resize(dim);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    const std::size_t bus_n = idx % static_cast<std::size_t>(cfg.bus_cutoff);
    std::size_t rest = idx / static_cast<std::size_t>(cfg.bus_cutoff);
    double freq = 2.0 * M_PI * cfg.bus_freq_hz * static_cast<double>(bus_n);
    for (int q = cfg.n_qubits - 1; q >= 0; --q) {
      if (rest & 1u) freq += 2.0 * M_PI * cfg.qubit_freq_hz[q];
      rest >>= 1u;
    }
    f.level_freq_rad[idx] = freq;
  }
  return f;
}

/// Effective CR coefficients for a configured edge at a given amplitude.
/// All six terms scale linearly with amplitude, so zero drive yields an
/// exactly vanishing Hamiltonian.
inline CRCoefficients effective_cr(const DeviceConfig& cfg, int control, int target, double amp) {
  if (!cfg.is_edge(control, target))
    throw TopologyError("effective_cr: (" + std::to_string(control) + "," + std::to_string(target) +
                        ") is not a configured edge");
  CRCoefficients c;
  c.a_x = cfg.cr_zx_rate_per_amp * amp;
  c.a_y = cfg.cr_zy_rate_per_amp * amp;
  c.a_z = cfg.cr_zz_rate_per_amp * amp;
  c.b_x = cfg.cr_ix_rate_per_amp * amp;
  c.b_y = cfg.cr_iy_rate_per_amp * amp;
  c.b_z = cfg.cr_iz_rate_per_amp * amp;
  return c;
}

}  // namespace pulseforge
