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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "pulseforge/analysis.hpp"
#include "pulseforge/trainer.hpp"

// Experiment orchestration behind the CLI: config loading with strict keys,
// run-log/summary persistence, CSV emission for every figure-style output,
// and the experiment subcommands themselves. Exit-code contract: 0 ok,
// 1 assertion failure, 2 input error. Diagnostics go to stderr; data goes to
// files or stdout. Every output embeds the config hash and seed, and exact
// runs with the same config and seed are byte-identical.

namespace pulseforge {

struct ExperimentConfig {
  std::string task_path;
  std::string device_path;
  SimModel model = SimModel::Effective;
  EstimatorConfig estimator;
  TrainSettings optimizer;
  GrowthPolicy policy;
  double prune_eps = -1.0;  // < 0 disables pruning
  std::string output_dir = "out";
  std::vector<std::uint64_t> seeds = {0};
  int jobs = 1;

  // Subcommand extras.
  int baseline_layers = 1;              // maxcut gate baseline depth
  double detuning_min_hz = -2.0e6;      // scan-detuning / verify sweep
  double detuning_max_hz = 2.0e6;
  int sweep_points = 21;
  std::vector<std::string> geometry_files;  // dissociation
  std::uint64_t sample_shots = 1024;        // maxcut readout sampling

  std::string config_hash;  // filled on load
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hash_hex(const std::string& text) {
  std::ostringstream out;
  out << std::hex << fnv1a(text);
  return out.str();
}

inline std::string resolve_path(const std::string& base_file, const std::string& path) {
  namespace fs = std::filesystem;
  if (path.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_file).parent_path() / path).lexically_normal().string();
}

}  // namespace detail

inline ExperimentConfig experiment_from_json(const nlohmann::json& j, const std::string& base_file) {
  static const std::set<std::string> known = {
      "task",        "device",          "model",         "estimator",     "optimizer",
      "policy",      "prune_eps",       "output_dir",    "seeds",         "jobs",
      "baseline_layers", "detuning_min_hz", "detuning_max_hz", "sweep_points",
      "geometry_files", "sample_shots"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (known.find(it.key()) == known.end())
      throw ValidationError("experiment: unknown key '" + it.key() + "'");

  ExperimentConfig cfg;
  try {
    if (j.contains("task")) cfg.task_path = detail::resolve_path(base_file, j.at("task"));
    if (j.contains("device")) cfg.device_path = detail::resolve_path(base_file, j.at("device"));
    if (j.contains("model")) {
      const std::string m = j.at("model").get<std::string>();
      if (m == "full") cfg.model = SimModel::Full;
      else if (m == "effective") cfg.model = SimModel::Effective;
      else throw ValidationError("experiment: model must be 'full' or 'effective'");
    }
    if (j.contains("estimator")) {
      const auto& e = j.at("estimator");
      const std::string mode = e.value("mode", "exact");
      if (mode == "exact") cfg.estimator.mode = EstimatorConfig::Mode::Exact;
      else if (mode == "shots") cfg.estimator.mode = EstimatorConfig::Mode::Shots;
      else throw ValidationError("experiment: estimator.mode must be 'exact' or 'shots'");
      cfg.estimator.shots = e.value("shots", cfg.estimator.shots);
      cfg.estimator.pulsed_basis_rotations =
          e.value("pulsed_basis_rotations", cfg.estimator.pulsed_basis_rotations);
    }
    if (j.contains("optimizer")) {
      const auto& o = j.at("optimizer");
      cfg.optimizer.rhobeg = o.value("rhobeg", cfg.optimizer.rhobeg);
      cfg.optimizer.max_evals_per_step = o.value("max_evals_per_step", cfg.optimizer.max_evals_per_step);
      cfg.optimizer.rhoend_factor = o.value("rhoend_factor", cfg.optimizer.rhoend_factor);
      cfg.optimizer.train_detunings = o.value("train_detunings", cfg.optimizer.train_detunings);
    }
    if (j.contains("policy")) {
      const auto& p = j.at("policy");
      cfg.policy.max_steps = p.value("max_steps", cfg.policy.max_steps);
      cfg.policy.stop_epsilon = p.value("stop_epsilon", cfg.policy.stop_epsilon);
    }
    cfg.prune_eps = j.value("prune_eps", cfg.prune_eps);
    if (j.contains("output_dir")) cfg.output_dir = detail::resolve_path(base_file, j.at("output_dir"));
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    cfg.jobs = j.value("jobs", cfg.jobs);
    cfg.baseline_layers = j.value("baseline_layers", cfg.baseline_layers);
    cfg.detuning_min_hz = j.value("detuning_min_hz", cfg.detuning_min_hz);
    cfg.detuning_max_hz = j.value("detuning_max_hz", cfg.detuning_max_hz);
    cfg.sweep_points = j.value("sweep_points", cfg.sweep_points);
    if (j.contains("geometry_files"))
      for (const auto& g : j.at("geometry_files"))
        cfg.geometry_files.push_back(detail::resolve_path(base_file, g.get<std::string>()));
    cfg.sample_shots = j.value("sample_shots", cfg.sample_shots);
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("experiment: malformed field: ") + ex.what());
  }
  cfg.config_hash = detail::hash_hex(j.dump());
  return cfg;
}

inline ExperimentConfig load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("experiment: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError("experiment: invalid JSON in '" + path + "': " + ex.what());
  }
  return experiment_from_json(j, path);
}

// ---------------------------------------------------------------------------
// Output writers

namespace detail {

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output dir '" + dir + "': " + ec.message());
}

inline std::string stem_of(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

inline nlohmann::json run_to_summary(const RunRecord& run, const ExperimentConfig& cfg,
                                     double reference_energy) {
  nlohmann::json s;
  s["task"] = run.task_id;
  s["device"] = run.device_id;
  s["seed"] = run.seed;
  s["config_hash"] = cfg.config_hash;
  s["final_energy"] = run.final_energy;
  s["reference_energy"] = reference_energy;
  s["accuracy"] = run.accuracy;
  s["total_duration_ns"] = run.total_duration_ns;
  s["snp_count"] = run.snp_count;
  s["cr_count"] = run.cr_count;
  s["steps"] = nlohmann::json::array();
  for (const auto& step : run.steps)
    s["steps"].push_back({{"step", step.step_index},
                          {"best_energy", step.best_energy},
                          {"n_evals", step.n_evals},
                          {"duration_ns", step.duration_ns}});
  return s;
}

inline void write_runlog(const std::string& path, const RunRecord& run,
                         const ExperimentConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  for (const auto& step : run.steps) {
    int eval_index = 0;
    for (const auto& [x, f] : step.trace) {
      nlohmann::json line;
      line["config_hash"] = cfg.config_hash;
      line["seed"] = run.seed;
      line["step"] = step.step_index;
      line["eval"] = eval_index++;
      line["x"] = x;
      line["f"] = f;
      out << line.dump() << "\n";
    }
  }
}

inline std::string csv_header(const ExperimentConfig& cfg, std::uint64_t seed) {
  std::ostringstream out;
  out << "# config_hash: " << cfg.config_hash << " seed: " << seed << "\n";
  return out.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Subcommand implementations. Each returns the process exit code.

/// Builds the VqeTask for a molecule experiment config.
inline VqeTask molecule_task_from(const ExperimentConfig& cfg, std::uint64_t seed) {
  MoleculeTask mol = load_molecule_task(cfg.task_path);
  VqeTask task;
  task.id = detail::stem_of(cfg.task_path);
  task.observable = mol.hamiltonian;
  task.device = load_device(cfg.device_path);
  task.model = cfg.model;
  task.estimator = cfg.estimator;
  task.estimator.seed = seed;
  task.reference_energy = mol.fci_reference;
  return task;
}

/// VQE experiment: progressive training per seed, run logs plus summaries,
/// optional pruning report.
inline int cmd_vqe(const ExperimentConfig& cfg) {
  try {
    detail::ensure_dir(cfg.output_dir);
    std::vector<nlohmann::json> summaries(cfg.seeds.size());
    std::mutex io;

    auto run_one = [&](std::size_t i) {
      const std::uint64_t seed = cfg.seeds[i];
      VqeTask task = molecule_task_from(cfg, seed);
      AnsatzGenome genome;
      RunRecord run = run_progressive(task, cfg.policy, cfg.optimizer, seed, &genome);
      nlohmann::json summary = detail::run_to_summary(run, cfg, task.reference_energy);
      if (cfg.prune_eps >= 0.0) {
        AnsatzGenome pruned = prune(genome, cfg.prune_eps);
        EstimatorConfig exact;
        const double e_pruned = estimate(bind_genome(pruned, task.device), task.device, task.model,
                                         task.observable, exact);
        summary["pruned"] = {
            {"eps", cfg.prune_eps},
            {"energy", e_pruned},
            {"duration_ns", duration_of(render_genome(pruned, task.device), task.device).second},
            {"snp_count", pruned.snp_count()},
            {"cr_count", pruned.cr_count()}};
      }
      const std::string base = cfg.output_dir + "/" + run.task_id + "_" + task.device.name + "_" +
                               std::to_string(seed);
      {
        std::lock_guard<std::mutex> lock(io);
        detail::write_runlog(base + ".runlog", run, cfg);
        std::ofstream out(base + ".summary.json");
        out << summary.dump(2) << "\n";
        summaries[i] = summary;
      }
    };

    if (cfg.jobs <= 1 || cfg.seeds.size() <= 1) {
      for (std::size_t i = 0; i < cfg.seeds.size(); ++i) run_one(i);
    } else {
      std::vector<std::thread> pool;
      std::size_t next = 0;
      std::mutex pick;
      for (int w = 0; w < std::min<int>(cfg.jobs, static_cast<int>(cfg.seeds.size())); ++w)
        pool.emplace_back([&]() {
          while (true) {
            std::size_t i;
            {
              std::lock_guard<std::mutex> lock(pick);
              if (next >= cfg.seeds.size()) return;
              i = next++;
            }
            run_one(i);
          }
        });
      for (auto& t : pool) t.join();
    }

    for (const auto& s : summaries) std::cout << s.dump() << "\n";
    return 0;
  } catch (const std::exception& ex) {
    std::cerr << "vqe: " << ex.what() << "\n";
    return 2;
  }
}

/// MaxCut experiment: trains the pulse ansatz and the Ry+CZ gate baseline on
/// the Ising observable, samples both final states, and reports approximation
/// ratios and their difference.
inline int cmd_maxcut(const ExperimentConfig& cfg) {
  try {
    detail::ensure_dir(cfg.output_dir);
    Graph graph = load_graph(cfg.task_path);
    ObservableSum ising = maxcut_to_ising(graph);
    DeviceConfig device = load_device(cfg.device_path);
    const std::uint64_t seed = cfg.seeds.front();

    VqeTask task;
    task.id = detail::stem_of(cfg.task_path);
    task.observable = ising;
    task.device = device;
    task.model = cfg.model;
    task.estimator = cfg.estimator;
    task.estimator.seed = seed;

    AnsatzGenome genome;
    RunRecord pulse_run = run_progressive(task, cfg.policy, cfg.optimizer, seed, &genome);

    auto best_sampled = [&](const PulseSchedule& bound, std::uint64_t sample_seed) {
      auto res = propagate(bound, device, task.model, Frame::Rotating);
      auto counts = sample_counts(res.final_state, cfg.sample_shots, sample_seed);
      std::string best_bits(graph.n_nodes, '0');
      int best_cut = -1;
      for (const auto& [bits, n] : counts) {
        const int cut = cut_value(graph, bits.substr(0, graph.n_nodes));
        if (cut > best_cut) {
          best_cut = cut;
          best_bits = bits.substr(0, graph.n_nodes);
        }
      }
      return best_bits;
    };

    const std::string pulse_bits = best_sampled(bind_genome(genome, device), Rng::derive_seed(seed, 91));
    const double pulse_ratio = approximation_ratio(graph, pulse_bits);

    GateCircuit baseline =
        build_gate_baseline(BaselineKind::TwoLocalRyCz, graph.n_nodes, cfg.baseline_layers, device);
    const int budget = cfg.policy.max_steps * cfg.optimizer.max_evals_per_step;
    std::vector<double> best_angles;
    RunRecord gate_run = train_gate_baseline(baseline, task, cfg.optimizer, budget, seed, &best_angles);
    const std::string gate_bits =
        best_sampled(baseline.render(best_angles, device), Rng::derive_seed(seed, 92));
    const double gate_ratio = approximation_ratio(graph, gate_bits);

    nlohmann::json summary;
    summary["task"] = task.id;
    summary["device"] = device.name;
    summary["seed"] = seed;
    summary["config_hash"] = cfg.config_hash;
    summary["maxcut"] = maxcut_exhaustive(graph);
    summary["pulse"] = {{"energy", pulse_run.final_energy},
                        {"bitstring", pulse_bits},
                        {"ratio", pulse_ratio},
                        {"duration_ns", pulse_run.total_duration_ns}};
    summary["gate"] = {{"energy", gate_run.final_energy},
                       {"bitstring", gate_bits},
                       {"ratio", gate_ratio},
                       {"duration_ns", gate_run.total_duration_ns}};
    summary["ratio_difference"] = pulse_ratio - gate_ratio;
    std::ofstream out(cfg.output_dir + "/" + task.id + "_" + device.name + "_" +
                      std::to_string(seed) + ".maxcut.json");
    out << summary.dump(2) << "\n";
    std::cout << summary.dump() << "\n";
    return 0;
  } catch (const std::exception& ex) {
    std::cerr << "maxcut: " << ex.what() << "\n";
    return 2;
  }
}

namespace detail {

// Applies a uniform LO detuning offset to every channel of a bound schedule
// by shifting each SetDetuning instruction and prepending one for channels
// that had none.
inline PulseSchedule with_global_detuning(const PulseSchedule& bound, double offset_hz) {
  PulseSchedule out = bound;
  std::set<ChannelId> touched;
  for (auto& ins : out.instructions) {
    if (ins.op == Instruction::Op::SetDetuning) {
      ins.detuning = param_value(ins.detuning) + offset_hz;
      touched.insert(ins.channel);
    }
  }
  std::set<ChannelId> playing;
  for (const auto& ins : out.instructions)
    if (ins.op == Instruction::Op::Play) playing.insert(ins.channel);
  for (const auto& ch : playing) {
    if (touched.count(ch)) continue;
    Instruction det;
    det.op = Instruction::Op::SetDetuning;
    det.channel = ch;
    det.start_time = 0;
    det.detuning = offset_hz;
    out.add(det);
  }
  return out;
}

}  // namespace detail

/// Detuning scan: trains (or keeps at zero drive, per policy) the ansatz,
/// then sweeps a global LO detuning offset and records the energy curve.
inline int cmd_scan_detuning(const ExperimentConfig& cfg) {
  try {
    detail::ensure_dir(cfg.output_dir);
    const std::uint64_t seed = cfg.seeds.front();
    VqeTask task = molecule_task_from(cfg, seed);
    AnsatzGenome genome;
    if (cfg.policy.max_steps > 0) {
      run_progressive(task, cfg.policy, cfg.optimizer, seed, &genome);
    } else {
      GrowthPolicy one;
      one.max_steps = 1;
      genome.n_qubits = task.device.n_qubits;
      genome = grow(genome, one, task.device);  // fresh zero-amplitude ansatz
    }
    PulseSchedule bound = bind_genome(genome, task.device);

    const std::string path = cfg.output_dir + "/" + task.id + "_" + task.device.name + "_" +
                             std::to_string(seed) + ".detuning.csv";
    std::ofstream out(path);
    out << detail::csv_header(cfg, seed) << "detuning_hz,energy\n";
    EstimatorConfig exact;
    for (int i = 0; i < cfg.sweep_points; ++i) {
      const double frac = cfg.sweep_points == 1
                              ? 0.0
                              : static_cast<double>(i) / static_cast<double>(cfg.sweep_points - 1);
      const double offset = cfg.detuning_min_hz + frac * (cfg.detuning_max_hz - cfg.detuning_min_hz);
      PulseSchedule shifted = detail::with_global_detuning(bound, offset);
      const double energy = estimate(shifted, task.device, task.model, task.observable, exact);
      out << offset << "," << energy << "\n";
    }
    std::cout << path << "\n";
    return 0;
  } catch (const std::exception& ex) {
    std::cerr << "scan-detuning: " << ex.what() << "\n";
    return 2;
  }
}

/// Verification circuit: the lowered CX,H,H,CX sequence swept over a global
/// detuning; asserts a near-unity |00> return at zero detuning.
inline int cmd_verify(const ExperimentConfig& cfg) {
  try {
    detail::ensure_dir(cfg.output_dir);
    DeviceConfig device = load_device(cfg.device_path);
    if (device.n_qubits != 2) {
      std::cerr << "verify: needs a 2-qubit device\n";
      return 2;
    }
    PulseSchedule circuit(2);
    circuit.append_sequential(lower_gate({GateKind::CX, 0.0, {0, 1}}, device));
    circuit.append_sequential(lower_gate({GateKind::H, 0.0, {0}}, device));
    circuit.append_sequential(lower_gate({GateKind::H, 0.0, {0}}, device));
    circuit.append_sequential(lower_gate({GateKind::CX, 0.0, {0, 1}}, device));

    const std::uint64_t seed = cfg.seeds.front();
    const std::string path = cfg.output_dir + "/verify_" + device.name + ".csv";
    std::ofstream out(path);
    out << detail::csv_header(cfg, seed) << "detuning_hz,p00,p01,p10,p11\n";
    double p00_zero = -1.0;
    for (int i = 0; i < cfg.sweep_points; ++i) {
      const double frac = cfg.sweep_points == 1
                              ? 0.0
                              : static_cast<double>(i) / static_cast<double>(cfg.sweep_points - 1);
      const double offset = cfg.detuning_min_hz + frac * (cfg.detuning_max_hz - cfg.detuning_min_hz);
      PulseSchedule shifted = detail::with_global_detuning(circuit, offset);
      auto res = propagate(shifted, device, cfg.model, Frame::Rotating);
      double p[4] = {0, 0, 0, 0};
      const std::size_t bus = cfg.model == SimModel::Full ? device.bus_cutoff : 1;
      for (std::size_t idx = 0; idx < res.final_state.dim; ++idx)
        p[idx / bus % 4] += std::norm(res.final_state.amplitudes[idx]);
      out << offset << "," << p[0] << "," << p[1] << "," << p[2] << "," << p[3] << "\n";
      if (std::abs(offset) < 1e-9) p00_zero = p[0];
    }
    std::cout << path << "\n";
    if (p00_zero >= 0.0 && p00_zero < 0.99) {
      std::cerr << "verify: P00 at zero detuning is " << p00_zero << " < 0.99\n";
      return 1;
    }
    return 0;
  } catch (const std::exception& ex) {
    std::cerr << "verify: " << ex.what() << "\n";
    return 2;
  }
}

/// Dissociation curve: one VQE run per geometry file, collected as CSV.
inline int cmd_dissociation(const ExperimentConfig& cfg) {
  try {
    detail::ensure_dir(cfg.output_dir);
    if (cfg.geometry_files.empty()) {
      std::cerr << "dissociation: no geometry files configured\n";
      return 2;
    }
    const std::uint64_t seed = cfg.seeds.front();
    struct Row {
      double bond = 0, vqe = 0, fci = 0;
    };
    std::vector<Row> rows(cfg.geometry_files.size());
    std::vector<char> ok(cfg.geometry_files.size(), 0);
    std::mutex pick;
    std::size_t next = 0;
    auto worker = [&] {
      while (true) {
        std::size_t i;
        {
          std::lock_guard<std::mutex> lock(pick);
          if (next >= cfg.geometry_files.size()) return;
          i = next++;
        }
        const auto& path = cfg.geometry_files[i];
        try {
          ExperimentConfig one = cfg;
          one.task_path = path;
          VqeTask task = molecule_task_from(one, seed);
          RunRecord run = run_progressive(task, cfg.policy, cfg.optimizer, seed);
          MoleculeTask mol = load_molecule_task(path);
          rows[i] = {mol.bond_length_angstrom, run.final_energy, mol.fci_reference};
          ok[i] = 1;
        } catch (const std::exception& ex) {
          std::cerr << "dissociation: skipping '" << path << "': " << ex.what() << "\n";
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < std::max(1, cfg.jobs); ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::size_t good = 0;
    const std::string path = cfg.output_dir + "/dissociation_" + std::to_string(seed) + ".csv";
    std::ofstream out(path);
    out << detail::csv_header(cfg, seed) << "bond_length_angstrom,vqe_energy,fci_energy\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!ok[i]) continue;
      ++good;
      out << rows[i].bond << "," << rows[i].vqe << "," << rows[i].fci << "\n";
    }
    std::cout << path << "\n";
    return good == 0 ? 2 : 0;
  } catch (const std::exception& ex) {
    std::cerr << "dissociation: " << ex.what() << "\n";
    return 2;
  }
}

/// Weyl coverage scan for the single-CR or multi-CR builder; emits CSV.
inline int cmd_weyl(const ExperimentConfig& cfg, const std::string& builder, int samples) {
  try {
    detail::ensure_dir(cfg.output_dir);
    DeviceConfig device = load_device(cfg.device_path);
    PulseSchedule templ = builder == "multi-cr" ? multi_cr_template(device)
                          : builder == "single-cr"
                              ? single_cr_template(device)
                              : throw ValidationError("weyl: builder must be single-cr or multi-cr");
    const std::uint64_t seed = cfg.seeds.front();
    CoverageSummary summary;
    auto points = coverage_scan(templ, device, samples, seed, &summary);
    const std::string path = cfg.output_dir + "/weyl_" + builder + ".csv";
    std::ofstream out(path);
    out << detail::csv_header(cfg, seed) << "sample,c1,c2,c3\n";
    for (std::size_t i = 0; i < points.size(); ++i)
      out << i << "," << points[i].c1 << "," << points[i].c2 << "," << points[i].c3 << "\n";
    nlohmann::json j;
    j["builder"] = builder;
    j["samples"] = samples;
    j["span"] = {{"c1", summary.span_c1()}, {"c2", summary.span_c2()}, {"c3", summary.span_c3()}};
    j["max"] = {{"c1", summary.max.c1}, {"c2", summary.max.c2}, {"c3", summary.max.c3}};
    std::cout << j.dump() << "\n" << path << "\n";
    return 0;
  } catch (const std::exception& ex) {
    std::cerr << "weyl: " << ex.what() << "\n";
    return 2;
  }
}

/// CR Hamiltonian tomography report (JSON).
inline int cmd_tomography(const ExperimentConfig& cfg, double amp) {
  try {
    detail::ensure_dir(cfg.output_dir);
    DeviceConfig device = load_device(cfg.device_path);
    if (device.topology.empty()) {
      std::cerr << "tomography: device has no edges\n";
      return 2;
    }
    const Edge edge = device.topology.front();
    std::vector<std::int64_t> durations{64, 128, 192, 288, 384, 512, 640};
    TomographyOptions opt;
    opt.model = cfg.model;
    opt.shots = cfg.estimator.mode == EstimatorConfig::Mode::Shots ? cfg.estimator.shots : 0;
    opt.seed = cfg.seeds.front();
    CRCoefficients fit = cr_tomography(device, edge.control, edge.target, amp, durations, opt);
    CRCoefficients cfg_rates = effective_cr(device, edge.control, edge.target, amp);
    nlohmann::json j;
    j["config_hash"] = cfg.config_hash;
    j["seed"] = opt.seed;
    j["amp"] = amp;
    j["edge"] = {edge.control, edge.target};
    j["fit_rad_per_s"] = {{"a_x", fit.a_x}, {"a_y", fit.a_y}, {"a_z", fit.a_z},
                          {"b_x", fit.b_x}, {"b_y", fit.b_y}, {"b_z", fit.b_z}};
    j["configured_rad_per_s"] = {{"a_x", cfg_rates.a_x}, {"a_y", cfg_rates.a_y},
                                 {"a_z", cfg_rates.a_z}, {"b_x", cfg_rates.b_x},
                                 {"b_y", cfg_rates.b_y}, {"b_z", cfg_rates.b_z}};
    const std::string path = cfg.output_dir + "/tomography_" + device.name + ".json";
    std::ofstream out(path);
    out << j.dump(2) << "\n";
    std::cout << j.dump() << "\n";
    return 0;
  } catch (const std::exception& ex) {
    std::cerr << "tomography: " << ex.what() << "\n";
    return 2;
  }
}

/// Lowers one gate and prints the schedule JSON plus its duration.
inline int cmd_lower(const std::string& gate_name, const std::vector<int>& qubits, double angle,
                     const std::string& device_path) {
  try {
    DeviceConfig device = load_device(device_path);
    GateKind kind;
    if (gate_name == "rx") kind = GateKind::RX;
    else if (gate_name == "ry") kind = GateKind::RY;
    else if (gate_name == "rz") kind = GateKind::RZ;
    else if (gate_name == "h") kind = GateKind::H;
    else if (gate_name == "x") kind = GateKind::X;
    else if (gate_name == "cx") kind = GateKind::CX;
    else if (gate_name == "cz") kind = GateKind::CZ;
    else {
      std::cerr << "lower: unknown gate '" << gate_name << "'\n";
      return 2;
    }
    PulseSchedule s = lower_gate({kind, angle, qubits}, device);
    nlohmann::json j = schedule_to_json(s);
    auto [dt, ns] = duration_of(s, device);
    j["duration_dt"] = dt;
    j["duration_ns"] = ns;
    std::cout << j.dump(2) << "\n";
    return 0;
  } catch (const std::exception& ex) {
    std::cerr << "lower: " << ex.what() << "\n";
    return 2;
  }
}

/// Aggregates summary files into one comparison table (CSV on stdout).
inline int cmd_report(const std::vector<std::string>& summary_paths) {
  try {
    std::cout << "task,device,seed,energy,reference,accuracy,duration_ns,snp_count,cr_count\n";
    int loaded = 0;
    for (const auto& path : summary_paths) {
      std::ifstream in(path);
      if (!in) {
        std::cerr << "report: cannot open '" << path << "'\n";
        continue;
      }
      nlohmann::json s;
      in >> s;
      std::cout << s.value("task", "?") << "," << s.value("device", "?") << ","
                << s.value("seed", 0) << "," << s.value("final_energy", 0.0) << ","
                << s.value("reference_energy", 0.0) << "," << s.value("accuracy", 0.0) << ","
                << s.value("total_duration_ns", 0.0) << "," << s.value("snp_count", 0) << ","
                << s.value("cr_count", 0) << "\n";
      ++loaded;
    }
    return loaded == 0 ? 2 : 0;
  } catch (const std::exception& ex) {
    std::cerr << "report: " << ex.what() << "\n";
    return 2;
  }
}

}  // namespace pulseforge
