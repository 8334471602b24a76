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

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pulseforge/dynamics.hpp"
#include "pulseforge/pulse_ir.hpp"
#include "pulseforge/qcore.hpp"

// Problem Hamiltonians and objective evaluation: molecular Pauli-string files
// (produced by an external quantum-chemistry oracle and committed as data),
// MaxCut graphs mapped to Ising observables, and exact or shot-based
// expectation estimation on propagated pulse schedules.

namespace pulseforge {

/// A molecular ground-state task: ingested Pauli Hamiltonian plus the FCI
/// reference energy recorded in the file header.
struct MoleculeTask {
  std::string label;
  double bond_length_angstrom = 0.0;
  ObservableSum hamiltonian;
  double fci_reference = 0.0;
};

/// Simple unweighted graph; edges normalized to u < v.
struct Graph {
  int n_nodes = 0;
  std::vector<std::pair<int, int>> edges;

  void add_edge(int u, int v) {
    if (u == v) throw ValidationError("graph: self-loop");
    if (u < 0 || v < 0 || u >= n_nodes || v >= n_nodes)
      throw ValidationError("graph: edge endpoint out of range");
    if (u > v) std::swap(u, v);
    for (const auto& e : edges)
      if (e.first == u && e.second == v) return;  // simple graph
    edges.emplace_back(u, v);
  }
};

struct EstimatorConfig {
  enum class Mode { Exact, Shots };
  Mode mode = Mode::Exact;
  std::uint64_t shots = 1024;
  std::uint64_t seed = 0;
  bool qubitwise_grouping = false;  // default per-term; few terms shipped
  bool pulsed_basis_rotations = false;  // default: ideal matrix rotations
};

// ---------------------------------------------------------------------------
// File ingestion

/// Parses the text Hamiltonian format: `# key: value` headers, then one
/// `coefficient letters` term per line. Duplicate letter strings merge.
inline ObservableSum load_pauli_hamiltonian(const std::string& path,
                                            MoleculeTask* task_out = nullptr) {
  std::ifstream in(path);
  if (!in) throw ParseError("hamiltonian: cannot open '" + path + "'");
  std::vector<PauliTerm> terms;
  std::size_t n_qubits = 0;
  MoleculeTask task;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        std::string key = line.substr(1, colon - 1);
        std::string value = line.substr(colon + 1);
        auto trim = [](std::string s) {
          const auto a = s.find_first_not_of(" \t");
          const auto b = s.find_last_not_of(" \t\r");
          return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        key = trim(key);
        value = trim(value);
        if (key == "label") task.label = value;
        else if (key == "bond_length") task.bond_length_angstrom = std::atof(value.c_str());
        else if (key == "fci_reference") task.fci_reference = std::atof(value.c_str());
      }
      continue;
    }
    std::istringstream ls(line);
    double coefficient = 0.0;
    std::string letters;
    if (!(ls >> coefficient >> letters))
      throw ParseError("hamiltonian: line " + std::to_string(line_no) + " of '" + path +
                       "' is not 'coefficient letters'");
    if (!std::isfinite(coefficient))
      throw ParseError("hamiltonian: non-finite coefficient at line " + std::to_string(line_no));
    for (char ch : letters)
      if (ch != 'I' && ch != 'X' && ch != 'Y' && ch != 'Z')
        throw ParseError("hamiltonian: bad Pauli letter '" + std::string(1, ch) + "' at line " +
                         std::to_string(line_no));
    if (n_qubits == 0) n_qubits = letters.size();
    if (letters.size() != n_qubits)
      throw ParseError("hamiltonian: ragged term length at line " + std::to_string(line_no));
    terms.emplace_back(coefficient, letters);
  }
  if (terms.empty()) throw ParseError("hamiltonian: no terms in '" + path + "'");
  ObservableSum obs(n_qubits, terms);
  if (task_out != nullptr) {
    task.hamiltonian = obs;
    *task_out = task;
  }
  return obs;
}

/// Loads a molecule task and cross-checks the recorded fci_reference against
/// exact diagonalization (strict mode).
inline MoleculeTask load_molecule_task(const std::string& path, bool strict = true) {
  MoleculeTask task;
  load_pauli_hamiltonian(path, &task);
  if (strict) {
    const auto [e0, ignored] = ground_energy(task.hamiltonian);
    if (std::abs(e0 - task.fci_reference) > 1e-3)
      throw ValidationError("molecule '" + path + "': fci_reference " +
                            std::to_string(task.fci_reference) +
                            " disagrees with exact ground energy " + std::to_string(e0));
  }
  return task;
}

/// Graph file: `# nodes: N` header then one `u v` edge per line.
inline Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("graph: cannot open '" + path + "'");
  Graph g;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("nodes:");
      if (pos != std::string::npos) g.n_nodes = std::atoi(line.c_str() + pos + 6);
      continue;
    }
    std::istringstream ls(line);
    int u = 0, v = 0;
    if (!(ls >> u >> v))
      throw ParseError("graph: line " + std::to_string(line_no) + " is not 'u v'");
    if (g.n_nodes == 0) throw ParseError("graph: '# nodes: N' header must precede edges");
    g.add_edge(u, v);
  }
  if (g.n_nodes == 0) throw ParseError("graph: missing '# nodes: N' header");
  return g;
}

// ---------------------------------------------------------------------------
// MaxCut

/// Ising observable H = sum_(u,v) (Z_u Z_v - I)/2, whose negated expectation
/// on a computational basis state equals the cut value.
inline ObservableSum maxcut_to_ising(const Graph& g) {
  if (g.n_nodes <= 0) throw ValidationError("maxcut: empty graph");
  std::vector<PauliTerm> terms;
  terms.emplace_back(-0.5 * static_cast<double>(g.edges.size()),
                     std::string(static_cast<std::size_t>(g.n_nodes), 'I'));
  for (const auto& [u, v] : g.edges) {
    std::string letters(static_cast<std::size_t>(g.n_nodes), 'I');
    letters[static_cast<std::size_t>(u)] = 'Z';
    letters[static_cast<std::size_t>(v)] = 'Z';
    terms.emplace_back(0.5, letters);
  }
  if (g.edges.empty()) terms.clear(), terms.emplace_back(0.0, std::string(g.n_nodes, 'I'));
  return ObservableSum(static_cast<std::size_t>(g.n_nodes), terms);
}

inline int cut_value(const Graph& g, const std::string& bits) {
  if (static_cast<int>(bits.size()) != g.n_nodes)
    throw ValidationError("cut_value: bitstring length mismatch");
  int cut = 0;
  for (const auto& [u, v] : g.edges)
    if (bits[static_cast<std::size_t>(u)] != bits[static_cast<std::size_t>(v)]) ++cut;
  return cut;
}

/// Exhaustive maximum cut (n <= 20).
inline int maxcut_exhaustive(const Graph& g) {
  if (g.n_nodes > 20) throw CapacityError("maxcut: exhaustive search limited to 20 nodes");
  int best = 0;
  const std::uint32_t lim = 1u << g.n_nodes;
  for (std::uint32_t mask = 0; mask < lim; ++mask) {
    int cut = 0;
    for (const auto& [u, v] : g.edges) {
      const int bu = (mask >> u) & 1u;
      const int bv = (mask >> v) & 1u;
      cut += bu != bv;
    }
    best = std::max(best, cut);
  }
  return best;
}

/// cut(bitstring) / maxcut(graph), by exhaustive enumeration of the optimum.
inline double approximation_ratio(const Graph& g, const std::string& best_sampled_bitstring) {
  const int denom = maxcut_exhaustive(g);
  if (denom == 0) return 1.0;
  return static_cast<double>(cut_value(g, best_sampled_bitstring)) / static_cast<double>(denom);
}

// ---------------------------------------------------------------------------
// Objective estimation

namespace detail {

// Ideal single-qubit basis-change matrices mapping X/Y measurement onto Z.
inline const CMatrix& basis_rotation(char letter) {
  static const CMatrix for_x = matexp_hermitian(pauli_y(), -M_PI / 4.0);
  static const CMatrix for_y = matexp_hermitian(pauli_x(), M_PI / 4.0);
  static const CMatrix id = CMatrix::identity(2);
  switch (letter) {
    case 'X': return for_x;
    case 'Y': return for_y;
    default: return id;
  }
}

// Pulse sequence implementing the same basis change (H-equivalent for X,
// X90-like for Y), appended per measured qubit.
inline PulseSchedule pulsed_basis_rotation(char letter, int qubit, const DeviceConfig& device) {
  switch (letter) {
    case 'X': return lower_gate({GateKind::RY, -M_PI / 2.0, {qubit}}, device);
    case 'Y': return lower_gate({GateKind::RX, M_PI / 2.0, {qubit}}, device);
    default: return PulseSchedule(device.n_qubits);
  }
}

inline double estimate_term_from_counts(const std::map<std::string, std::uint64_t>& counts,
                                        const std::string& letters, std::uint64_t shots) {
  double acc = 0.0;
  for (const auto& [bits, count] : counts) {
    int parity = 0;
    for (std::size_t q = 0; q < letters.size(); ++q)
      if (letters[q] != 'I' && bits[q] == '1') parity ^= 1;
    acc += (parity ? -1.0 : 1.0) * static_cast<double>(count);
  }
  return acc / static_cast<double>(shots);
}

}  // namespace detail

/// VQE objective: propagates the bound ansatz schedule and evaluates the
/// observable either exactly or through per-term sampled measurement with
/// basis rotations. Deterministic for a fixed seed.
inline double estimate(const PulseSchedule& schedule, const DeviceConfig& device, SimModel model,
                       const ObservableSum& obs, const EstimatorConfig& est) {
  if (static_cast<std::size_t>(device.n_qubits) < obs.n_qubits)
    throw ValidationError("estimate: observable needs more qubits than the device has");
  const auto base = propagate(schedule, device, model, Frame::Rotating);

  if (est.mode == EstimatorConfig::Mode::Exact)
    return expectation_with_leakage(base.final_state, obs).value;

  if (model == SimModel::Full && est.pulsed_basis_rotations)
    throw ValidationError("estimate: pulsed rotations in shots mode require the effective model");

  double total = 0.0;
  std::size_t group_index = 0;
  for (const auto& term : obs.terms) {
    const bool identity =
        term.letters.find_first_not_of('I') == std::string::npos;
    if (identity) {
      total += term.coefficient;
      continue;
    }
    StateVector measured(1);
    if (est.pulsed_basis_rotations) {
      PulseSchedule with_rotations = schedule;
      std::vector<PulseSchedule> layer;
      for (std::size_t q = 0; q < term.letters.size(); ++q)
        if (term.letters[q] == 'X' || term.letters[q] == 'Y')
          layer.push_back(detail::pulsed_basis_rotation(term.letters[q], static_cast<int>(q), device));
      if (!layer.empty()) append_layer(with_rotations, layer);
      measured = propagate(with_rotations, device, model, Frame::Rotating).final_state;
    } else {
      measured = base.final_state;
      if (model == SimModel::Full) {
        // Project out the bus before sampling the qubit register.
        StateVector qreg(device.qubit_dim());
        for (std::size_t i = 0; i < qreg.dim; ++i)
          qreg.amplitudes[i] = measured.amplitudes[i * device.bus_cutoff];
        qreg.normalize();
        measured = std::move(qreg);
      }
      for (std::size_t q = 0; q < term.letters.size(); ++q)
        if (term.letters[q] == 'X' || term.letters[q] == 'Y')
          detail::apply_unitary_subset(measured.amplitudes, device.n_qubits,
                                       {static_cast<int>(q)},
                                       detail::basis_rotation(term.letters[q]));
    }
    const auto counts =
        sample_counts(measured, est.shots, Rng::derive_seed(est.seed, group_index));
    total += term.coefficient * detail::estimate_term_from_counts(counts, term.letters, est.shots);
    ++group_index;
  }
  return total;
}

}  // namespace pulseforge
