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

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pulseforge/optimizer.hpp"
#include "pulseforge/problems.hpp"

// Progressive native-pulse ansatz construction. The ansatz grows one layer
// per step, alternating single-qubit pulse layers (one SNP per qubit) with
// cross-resonance layers (one CR per topology edge, edge-colored so pulses
// sharing a qubit never overlap). Newly appended pulses start at zero
// amplitude and zero detuning so growth leaves the rendered unitary
// unchanged; the optimizer then trains only the new parameters (the partial
// list) while earlier ones stay frozen (the fixed list).

namespace pulseforge {

struct GrowthExhausted : std::runtime_error {
  explicit GrowthExhausted(const std::string& what) : std::runtime_error(what) {}
};

enum class LayerKind { SnpLayer, CrLayer };

struct AnsatzPulse {
  int q0 = 0;           // driven qubit (SNP) or control qubit (CR)
  int q1 = 0;           // CR target (unused for SNP)
  int color = 0;        // CR scheduling class within the layer
  std::string amp_name;
  std::string det_name;
};

struct AnsatzBlock {
  LayerKind kind = LayerKind::SnpLayer;
  std::vector<AnsatzPulse> pulses;
};

/// The progressive training state: ordered pulse blocks, the frozen and
/// trainable parameter names, and the full value assignment.
struct AnsatzGenome {
  int n_qubits = 0;
  std::vector<AnsatzBlock> blocks;
  std::vector<std::string> fixed_list;
  std::vector<std::string> partial_list;
  std::map<std::string, double> values;
  int step_count = 0;

  int snp_count() const {
    int n = 0;
    for (const auto& b : blocks)
      if (b.kind == LayerKind::SnpLayer) n += static_cast<int>(b.pulses.size());
    return n;
  }
  int cr_count() const {
    int n = 0;
    for (const auto& b : blocks)
      if (b.kind == LayerKind::CrLayer) n += static_cast<int>(b.pulses.size());
    return n;
  }
};

/// Deterministic layer sequence: odd steps add an SNP layer on every qubit,
/// even steps a CR layer over all topology edges.
struct GrowthPolicy {
  int max_steps = 2;
  double stop_epsilon = 1e-3;  // Hartree-scale improvement threshold

  LayerKind layer_for_step(int step_index) const {
    return step_index % 2 == 1 ? LayerKind::SnpLayer : LayerKind::CrLayer;
  }
};

namespace detail {

// Greedy edge coloring in lexicographic edge order; CR pulses within one
// color class share no qubit and may run in parallel.
inline std::vector<int> color_edges(const std::vector<Edge>& edges) {
  std::vector<int> colors(edges.size(), 0);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    std::set<int> used;
    for (std::size_t j = 0; j < i; ++j) {
      const bool adjacent = edges[i].control == edges[j].control ||
                            edges[i].control == edges[j].target ||
                            edges[i].target == edges[j].control ||
                            edges[i].target == edges[j].target;
      if (adjacent) used.insert(colors[j]);
    }
    int c = 0;
    while (used.count(c) != 0) ++c;
    colors[i] = c;
  }
  return colors;
}

}  // namespace detail

/// Renders the genome into its parametric schedule: blocks in order separated
/// by barriers; CR layers emit one barrier-separated slice per edge color.
inline PulseSchedule render_genome(const AnsatzGenome& g, const DeviceConfig& device) {
  PulseSchedule s(device.n_qubits);
  for (const auto& block : g.blocks) {
    if (block.kind == LayerKind::SnpLayer) {
      std::vector<PulseSchedule> layer;
      for (const auto& p : block.pulses) layer.push_back(snp(p.q0, p.amp_name, p.det_name, device));
      append_layer(s, layer);
    } else {
      int color = 0;
      while (true) {
        std::vector<PulseSchedule> slice;
        for (const auto& p : block.pulses)
          if (p.color == color)
            slice.push_back(cr(p.q0, p.q1, p.amp_name, p.det_name, device.cr_duration_dt, device));
        if (slice.empty()) break;
        append_layer(s, slice);
        ++color;
      }
    }
  }
  return s;
}

/// Binds the rendered schedule at the genome's current values.
inline PulseSchedule bind_genome(const AnsatzGenome& g, const DeviceConfig& device) {
  PulseSchedule s = render_genome(g, device);
  std::vector<double> values;
  values.reserve(s.params.size());
  for (const auto& spec : s.params.entries) values.push_back(g.values.at(spec.name));
  return pulseforge::bind(s, values);
}

/// Appends the next policy layer: the previous partial list freezes at its
/// current values and the new block's parameters (zero amplitude, zero
/// detuning) become the trainable set.
inline AnsatzGenome grow(const AnsatzGenome& g, const GrowthPolicy& policy,
                         const DeviceConfig& device) {
  if (g.step_count >= policy.max_steps)
    throw GrowthExhausted("grow: policy exhausted after " + std::to_string(g.step_count) + " steps");
  AnsatzGenome next = g;
  next.n_qubits = device.n_qubits;
  next.step_count = g.step_count + 1;
  for (const auto& name : next.partial_list) next.fixed_list.push_back(name);
  next.partial_list.clear();

  AnsatzBlock block;
  block.kind = policy.layer_for_step(next.step_count);
  const std::string prefix = "s" + std::to_string(next.step_count) + "_";
  if (block.kind == LayerKind::SnpLayer) {
    for (int q = 0; q < device.n_qubits; ++q) {
      AnsatzPulse p;
      p.q0 = q;
      p.amp_name = prefix + "q" + std::to_string(q) + "_amp";
      p.det_name = prefix + "q" + std::to_string(q) + "_det";
      block.pulses.push_back(p);
    }
  } else {
    std::vector<Edge> edges = device.topology;
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      return std::tie(a.control, a.target) < std::tie(b.control, b.target);
    });
    const std::vector<int> colors = detail::color_edges(edges);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      AnsatzPulse p;
      p.q0 = edges[i].control;
      p.q1 = edges[i].target;
      p.color = colors[i];
      p.amp_name = prefix + "e" + std::to_string(edges[i].control) + "_" +
                   std::to_string(edges[i].target) + "_amp";
      p.det_name = prefix + "e" + std::to_string(edges[i].control) + "_" +
                   std::to_string(edges[i].target) + "_det";
      block.pulses.push_back(p);
    }
  }
  for (const auto& p : block.pulses) {
    next.partial_list.push_back(p.amp_name);
    next.partial_list.push_back(p.det_name);
    next.values[p.amp_name] = 0.0;
    next.values[p.det_name] = 0.0;
  }
  next.blocks.push_back(std::move(block));
  return next;
}

// ---------------------------------------------------------------------------
// Training

/// One VQE-style task: observable + device + simulation/estimation choices.
struct VqeTask {
  std::string id;
  ObservableSum observable;
  DeviceConfig device;
  SimModel model = SimModel::Effective;
  EstimatorConfig estimator;
  double reference_energy = 0.0;  // 0 when no reference is known
};

struct TrainSettings {
  double rhobeg = 0.1;          // in normalized [0,1] parameter coordinates
  double rhoend_factor = 1e-4;  // rhoend = factor * rhobeg
  int max_evals_per_step = 50;
  bool train_detunings = true;  // ablation flag: freeze detunings at zero
};

struct StepRecord {
  int step_index = 0;
  std::vector<std::string> appended_params;
  std::vector<std::pair<std::vector<double>, double>> trace;  // natural units
  double best_energy = 0.0;
  double duration_ns = 0.0;
  int n_evals = 0;
};

struct RunRecord {
  std::string task_id;
  std::string device_id;
  std::uint64_t seed = 0;
  std::vector<StepRecord> steps;
  double final_energy = 0.0;
  double accuracy = 0.0;  // 1 - |E - E_ref| / |E_ref|, when a reference exists
  double total_duration_ns = 0.0;
  int snp_count = 0;
  int cr_count = 0;
};

namespace detail {

struct ParamWindow {
  std::vector<std::size_t> indices;        // into the schedule ParamSpace
  std::vector<double> lo, hi;              // natural bounds
  std::vector<double> frozen_full_values;  // full vector with fixed entries set
};

inline ParamWindow partial_window(const AnsatzGenome& g, const PulseSchedule& templ,
                                  const TrainSettings& settings) {
  ParamWindow w;
  std::set<std::string> partial(g.partial_list.begin(), g.partial_list.end());
  w.frozen_full_values.resize(templ.params.size());
  for (std::size_t i = 0; i < templ.params.size(); ++i) {
    const auto& spec = templ.params.entries[i];
    w.frozen_full_values[i] = g.values.at(spec.name);
    if (partial.count(spec.name) == 0) continue;
    if (!settings.train_detunings && spec.kind == ParamKind::Detuning) continue;
    w.indices.push_back(i);
    w.lo.push_back(spec.lo);
    w.hi.push_back(spec.hi);
  }
  return w;
}

inline double denormalize(double unit, double lo, double hi) { return lo + unit * (hi - lo); }
inline double normalize(double natural, double lo, double hi) {
  return hi > lo ? (natural - lo) / (hi - lo) : 0.0;
}

}  // namespace detail

/// Minimizes the task energy over the genome's partial list only; the fixed
/// list is held bitwise constant. Returns the updated genome (best-seen
/// values) and the step record.
inline std::pair<AnsatzGenome, StepRecord> train_step(const AnsatzGenome& g, const VqeTask& task,
                                                      const TrainSettings& settings,
                                                      std::uint64_t step_seed) {
  if (g.partial_list.empty()) throw ValidationError("train_step: empty partial list");
  PulseSchedule templ = render_genome(g, task.device);
  detail::ParamWindow w = detail::partial_window(g, templ, settings);
  if (w.indices.empty()) throw ValidationError("train_step: no trainable parameters");

  StepRecord record;
  record.step_index = g.step_count;
  record.appended_params = g.partial_list;

  int eval_counter = 0;
  Objective objective = [&](const std::vector<double>& unit) {
    std::vector<double> full = w.frozen_full_values;
    std::vector<double> natural(unit.size());
    for (std::size_t k = 0; k < unit.size(); ++k) {
      natural[k] = detail::denormalize(unit[k], w.lo[k], w.hi[k]);
      full[w.indices[k]] = natural[k];
    }
    EstimatorConfig est = task.estimator;
    est.seed = Rng::derive_seed(step_seed, static_cast<std::uint64_t>(eval_counter++));
    const double energy =
        estimate(pulseforge::bind(templ, full), task.device, task.model, task.observable, est);
    record.trace.emplace_back(natural, energy);
    return energy;
  };

  std::vector<double> x0(w.indices.size());
  for (std::size_t k = 0; k < w.indices.size(); ++k)
    x0[k] = detail::normalize(w.frozen_full_values[w.indices[k]], w.lo[k], w.hi[k]);
  Bounds unit_box = Bounds::box(std::vector<double>(x0.size(), 0.0),
                                std::vector<double>(x0.size(), 1.0));
  OptimizerReport rep =
      minimize_cobyla(objective, x0, unit_box, settings.rhobeg,
                      settings.rhoend_factor * settings.rhobeg, settings.max_evals_per_step);

  AnsatzGenome out = g;
  for (std::size_t k = 0; k < w.indices.size(); ++k) {
    const auto& name = templ.params.entries[w.indices[k]].name;
    out.values[name] = detail::denormalize(rep.best_x[k], w.lo[k], w.hi[k]);
  }
  record.best_energy = rep.best_f;
  record.n_evals = rep.n_evals;
  record.duration_ns = duration_of(templ, task.device).second;
  return {out, record};
}

/// Full progressive run: grow then train until the policy is exhausted or a
/// step improves the best energy by less than stop_epsilon.
inline RunRecord run_progressive(const VqeTask& task, const GrowthPolicy& policy,
                                 const TrainSettings& settings, std::uint64_t seed,
                                 AnsatzGenome* final_genome = nullptr) {
  RunRecord run;
  run.task_id = task.id;
  run.device_id = task.device.name;
  run.seed = seed;

  AnsatzGenome genome;
  genome.n_qubits = task.device.n_qubits;
  // The pre-growth baseline: the empty (zero-drive) ansatz energy. Step
  // improvements are measured against the running best from here on.
  EstimatorConfig base_est = task.estimator;
  base_est.seed = Rng::derive_seed(seed, 0);
  double best_energy = estimate(PulseSchedule(task.device.n_qubits), task.device, task.model,
                                task.observable, base_est);
  for (int step = 1; step <= policy.max_steps; ++step) {
    genome = grow(genome, policy, task.device);
    if (genome.partial_list.empty()) break;  // no connections to entangle
    auto [trained, record] = train_step(genome, task, settings,
                                        Rng::derive_seed(seed, static_cast<std::uint64_t>(step)));
    genome = trained;
    const double improvement = best_energy - record.best_energy;
    best_energy = std::min(best_energy, record.best_energy);
    run.steps.push_back(std::move(record));
    if (improvement < policy.stop_epsilon) break;
  }

  run.final_energy = best_energy;
  if (task.reference_energy != 0.0)
    run.accuracy = 1.0 - std::abs(best_energy - task.reference_energy) /
                             std::abs(task.reference_energy);
  run.total_duration_ns = duration_of(render_genome(genome, task.device), task.device).second;
  run.snp_count = genome.snp_count();
  run.cr_count = genome.cr_count();
  if (final_genome != nullptr) *final_genome = genome;
  return run;
}

/// Removes every pulse whose bound amplitude magnitude is <= eps, along with
/// its parameters; empty blocks disappear and the schedule re-lays out, so
/// the duration never grows.
inline AnsatzGenome prune(const AnsatzGenome& g, double eps) {
  if (eps < 0) throw ValidationError("prune: eps must be >= 0");
  AnsatzGenome out;
  out.n_qubits = g.n_qubits;
  out.step_count = g.step_count;
  std::set<std::string> kept_names;
  for (const auto& block : g.blocks) {
    AnsatzBlock nb;
    nb.kind = block.kind;
    for (const auto& p : block.pulses) {
      if (std::abs(g.values.at(p.amp_name)) <= eps) continue;
      nb.pulses.push_back(p);
      kept_names.insert(p.amp_name);
      kept_names.insert(p.det_name);
    }
    if (!nb.pulses.empty()) out.blocks.push_back(std::move(nb));
  }
  for (const auto& name : g.fixed_list)
    if (kept_names.count(name)) out.fixed_list.push_back(name);
  for (const auto& name : g.partial_list)
    if (kept_names.count(name)) out.partial_list.push_back(name);
  for (const auto& [name, value] : g.values)
    if (kept_names.count(name)) out.values[name] = value;
  return out;
}

// ---------------------------------------------------------------------------
// Gate-level baselines

enum class BaselineKind { RealAmplitude, TwoLocalRyCz, TwoGate };

/// Rotation-angle-parameterized gate circuit rendered through pulse lowering;
/// only the angles are trainable, the pulse shapes underneath stay fixed.
struct GateCircuit {
  struct Item {
    GateKind kind = GateKind::RY;
    std::vector<int> qubits;
    int param_index = -1;  // -1 = fixed angle
    double fixed_angle = 0.0;
  };
  int n_qubits = 0;
  int n_params = 0;
  std::vector<Item> items;

  PulseSchedule render(const std::vector<double>& angles, const DeviceConfig& device) const {
    if (static_cast<int>(angles.size()) != n_params)
      throw ValidationError("gate circuit: wrong angle count");
    PulseSchedule s(device.n_qubits);
    std::size_t i = 0;
    while (i < items.size()) {
      // Consecutive single-qubit rotations on distinct qubits form one layer.
      if (items[i].kind == GateKind::RY || items[i].kind == GateKind::RX) {
        std::vector<PulseSchedule> layer;
        std::set<int> seen;
        while (i < items.size() &&
               (items[i].kind == GateKind::RY || items[i].kind == GateKind::RX) &&
               seen.count(items[i].qubits[0]) == 0) {
          const double angle =
              items[i].param_index >= 0 ? angles[items[i].param_index] : items[i].fixed_angle;
          layer.push_back(lower_gate({items[i].kind, angle, items[i].qubits}, device));
          seen.insert(items[i].qubits[0]);
          ++i;
        }
        append_layer(s, layer);
      } else {
        const double angle =
            items[i].param_index >= 0 ? angles[items[i].param_index] : items[i].fixed_angle;
        s.append_sequential(lower_gate({items[i].kind, angle, items[i].qubits}, device));
        ++i;
      }
    }
    return s;
  }
};

/// Builds the named baseline ansatz on the device's line-ordered edges.
inline GateCircuit build_gate_baseline(BaselineKind kind, int n_qubits, int layers,
                                       const DeviceConfig& device) {
  if (n_qubits <= 0 || n_qubits > device.n_qubits)
    throw ValidationError("baseline: invalid qubit count");
  GateCircuit c;
  c.n_qubits = n_qubits;
  auto add_ry_layer = [&]() {
    for (int q = 0; q < n_qubits; ++q)
      c.items.push_back({GateKind::RY, {q}, c.n_params++, 0.0});
  };
  auto add_entangler = [&](GateKind two_qubit) {
    for (const Edge& e : device.topology)
      if (e.control < n_qubits && e.target < n_qubits)
        c.items.push_back({two_qubit, {e.control, e.target}, -1, 0.0});
  };
  switch (kind) {
    case BaselineKind::RealAmplitude:
      add_ry_layer();
      for (int l = 0; l < layers; ++l) {
        add_entangler(GateKind::CX);
        add_ry_layer();
      }
      break;
    case BaselineKind::TwoLocalRyCz:
      add_ry_layer();
      for (int l = 0; l < layers; ++l) {
        add_entangler(GateKind::CZ);
        add_ry_layer();
      }
      break;
    case BaselineKind::TwoGate:
      // One Ry layer plus a single CX: the minimal one-single-qubit-gate +
      // one-two-qubit-gate circuit the duration comparisons use.
      add_ry_layer();
      if (!device.topology.empty()) {
        const Edge& e = device.topology.front();
        c.items.push_back({GateKind::CX, {e.control, e.target}, -1, 0.0});
      }
      break;
  }
  return c;
}

/// Trains a gate baseline with the same optimizer and budget conventions as
/// the pulse ansatz (angles in [-pi, pi], zero start).
inline RunRecord train_gate_baseline(const GateCircuit& circuit, const VqeTask& task,
                                     const TrainSettings& settings, int total_evals,
                                     std::uint64_t seed,
                                     std::vector<double>* best_angles = nullptr) {
  RunRecord run;
  run.task_id = task.id + ":gate";
  run.device_id = task.device.name;
  run.seed = seed;

  int eval_counter = 0;
  StepRecord record;
  record.step_index = 1;
  Objective objective = [&](const std::vector<double>& unit) {
    std::vector<double> angles(unit.size());
    for (std::size_t k = 0; k < unit.size(); ++k) angles[k] = (unit[k] - 0.5) * 2.0 * M_PI;
    EstimatorConfig est = task.estimator;
    est.seed = Rng::derive_seed(seed, static_cast<std::uint64_t>(eval_counter++));
    const double energy = estimate(circuit.render(angles, task.device), task.device, task.model,
                                   task.observable, est);
    record.trace.emplace_back(angles, energy);
    return energy;
  };
  std::vector<double> x0(circuit.n_params, 0.5);
  Bounds unit_box = Bounds::box(std::vector<double>(x0.size(), 0.0),
                                std::vector<double>(x0.size(), 1.0));
  OptimizerReport rep = minimize_cobyla(objective, x0, unit_box, settings.rhobeg,
                                        settings.rhoend_factor * settings.rhobeg, total_evals);
  record.best_energy = rep.best_f;
  record.n_evals = rep.n_evals;

  std::vector<double> angles(rep.best_x.size());
  for (std::size_t k = 0; k < angles.size(); ++k) angles[k] = (rep.best_x[k] - 0.5) * 2.0 * M_PI;
  record.duration_ns = duration_of(circuit.render(angles, task.device), task.device).second;
  run.total_duration_ns = record.duration_ns;
  run.final_energy = rep.best_f;
  if (task.reference_energy != 0.0)
    run.accuracy = 1.0 - std::abs(rep.best_f - task.reference_energy) /
                             std::abs(task.reference_energy);
  run.steps.push_back(std::move(record));
  if (best_angles != nullptr) *best_angles = angles;
  return run;
}

}  // namespace pulseforge
