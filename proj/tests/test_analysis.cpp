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
#include "pulseforge/analysis.hpp"

using namespace pulseforge;

namespace {

// Brute-force KAK construction oracle: a gate with a KNOWN canonical class,
// dressed in random single-qubit gates on both sides.
CMatrix canonical_gate(double c1, double c2, double c3) {
  CMatrix h = c1 * kron(pauli_x(), pauli_x()) + c2 * kron(pauli_y(), pauli_y()) +
              c3 * kron(pauli_z(), pauli_z());
  return matexp_hermitian(h, 1.0);
}

CMatrix dress(const CMatrix& u, Rng& rng) {
  CMatrix left = kron(oracles::random_su2(rng), oracles::random_su2(rng));
  CMatrix right = kron(oracles::random_su2(rng), oracles::random_su2(rng));
  return left * u * right;
}

CMatrix cnot() {
  CMatrix m(4, 4);
  m(0, 0) = 1;
  m(1, 1) = 1;
  m(2, 3) = 1;
  m(3, 2) = 1;
  return m;
}

CMatrix cz() {
  CMatrix m = CMatrix::identity(4);
  m(3, 3) = -1;
  return m;
}

CMatrix iswap() {
  CMatrix m(4, 4);
  m(0, 0) = 1;
  m(3, 3) = 1;
  m(1, 2) = Complex(0, 1);
  m(2, 1) = Complex(0, 1);
  return m;
}

CMatrix swap_gate() {
  CMatrix m(4, 4);
  m(0, 0) = 1;
  m(1, 2) = 1;
  m(2, 1) = 1;
  m(3, 3) = 1;
  return m;
}

DeviceConfig cr_device(bool pure_zx) {
  DeviceConfig cfg;
  cfg.name = "weyl2q";
  cfg.n_qubits = 2;
  cfg.qubit_freq_hz = {5.2e9, 5.0e9};
  cfg.topology.push_back({0, 1});
  cfg.bus_cutoff = 1;
  if (!pure_zx) {
    finalize_device(cfg);
    cfg.cr_zy_rate_per_amp = 0.05 * cfg.cr_zx_rate_per_amp;
    cfg.cr_zz_rate_per_amp = 0.04 * cfg.cr_zx_rate_per_amp;
    cfg.cr_ix_rate_per_amp = -0.25 * cfg.cr_zx_rate_per_amp;
    cfg.cr_iy_rate_per_amp = 0.02 * cfg.cr_zx_rate_per_amp;
    cfg.cr_iz_rate_per_amp = -0.05 * cfg.cr_zx_rate_per_amp;
    return cfg;
  }
  finalize_device(cfg);
  return cfg;
}

}  // namespace

TEST_CASE("weyl coordinates of named gates") {
  WeylPoint id = weyl_coordinates(CMatrix::identity(4));
  REQUIRE(id.c1 == Catch::Approx(0.0).margin(1e-9));
  REQUIRE(id.c3 == Catch::Approx(0.0).margin(1e-9));

  WeylPoint wc = weyl_coordinates(cnot());
  REQUIRE(wc.c1 == Catch::Approx(M_PI / 4).margin(1e-8));
  REQUIRE(wc.c2 == Catch::Approx(0.0).margin(1e-8));
  REQUIRE(wc.c3 == Catch::Approx(0.0).margin(1e-8));

  WeylPoint ws = weyl_coordinates(swap_gate());
  REQUIRE(ws.c1 == Catch::Approx(M_PI / 4).margin(1e-8));
  REQUIRE(ws.c2 == Catch::Approx(M_PI / 4).margin(1e-8));
  REQUIRE(ws.c3 == Catch::Approx(M_PI / 4).margin(1e-8));

  WeylPoint wi = weyl_coordinates(iswap());
  REQUIRE(wi.c1 == Catch::Approx(M_PI / 4).margin(1e-8));
  REQUIRE(wi.c2 == Catch::Approx(M_PI / 4).margin(1e-8));
  REQUIRE(wi.c3 == Catch::Approx(0.0).margin(1e-8));
}

TEST_CASE("weyl coordinates recover randomly dressed canonical gates") {
  Rng rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    // Random interior chamber point, kept away from identification faces.
    const double c2 = rng.uniform(0.05, M_PI / 4 - 0.05);
    const double c3 = rng.uniform(0.03, c2);
    const double c1 = rng.uniform(c2, M_PI / 2 - c2 - 0.03);
    CMatrix u = dress(canonical_gate(c1, c2, c3), rng);
    WeylPoint w = weyl_coordinates(u);
    REQUIRE(w.c1 == Catch::Approx(c1).margin(1e-7));
    REQUIRE(w.c2 == Catch::Approx(c2).margin(1e-7));
    REQUIRE(w.c3 == Catch::Approx(c3).margin(1e-7));
  }
}

TEST_CASE("weyl coordinates invariant under single-qubit dressing") {
  Rng rng(7);
  CMatrix base = canonical_gate(0.6, 0.3, 0.1);
  WeylPoint w0 = weyl_coordinates(base);
  for (int trial = 0; trial < 100; ++trial) {
    WeylPoint w = weyl_coordinates(dress(base, rng));
    REQUIRE(w.c1 == Catch::Approx(w0.c1).margin(1e-8));
    REQUIRE(w.c2 == Catch::Approx(w0.c2).margin(1e-8));
    REQUIRE(w.c3 == Catch::Approx(w0.c3).margin(1e-8));
  }
}

TEST_CASE("canonicalization is idempotent") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const double c2 = rng.uniform(0.05, M_PI / 4 - 0.05);
    const double c3 = rng.uniform(0.03, c2);
    const double c1 = rng.uniform(c2, M_PI / 2 - c2 - 0.03);
    WeylPoint w = weyl_coordinates(canonical_gate(c1, c2, c3));
    WeylPoint w2 = weyl_coordinates(canonical_gate(w.c1, w.c2, w.c3));
    REQUIRE(w2.c1 == Catch::Approx(w.c1).margin(1e-8));
    REQUIRE(w2.c2 == Catch::Approx(w.c2).margin(1e-8));
    REQUIRE(w2.c3 == Catch::Approx(w.c3).margin(1e-8));
  }
}

TEST_CASE("local equivalence of CX/CZ and non-equivalence of CX/iSWAP") {
  REQUIRE(locally_equivalent(cnot(), cz()));
  REQUIRE(!locally_equivalent(cnot(), iswap()));
  Rng rng(3);
  CMatrix u = dress(canonical_gate(0.5, 0.2, 0.1), rng);
  REQUIRE(locally_equivalent(u, canonical_gate(0.5, 0.2, 0.1)));
}

TEST_CASE("weyl rejects non-unitary input") {
  CMatrix bad = CMatrix::identity(4);
  bad(0, 0) = 2.0;
  REQUIRE_THROWS_AS(weyl_coordinates(bad), ValidationError);
}

TEST_CASE("cr tomography round-trips the effective coefficients") {
  DeviceConfig cfg = cr_device(/*pure_zx=*/false);
  const double amp = 0.2;
  std::vector<std::int64_t> durations{64, 128, 192, 288, 384, 512, 640};
  CRCoefficients fit = cr_tomography(cfg, 0, 1, amp, durations);
  CRCoefficients truth = effective_cr(cfg, 0, 1, amp);
  const double scale = std::abs(truth.a_x);
  REQUIRE(std::abs(fit.a_x - truth.a_x) <= 1e-6 * scale);
  REQUIRE(std::abs(fit.a_y - truth.a_y) <= 1e-6 * scale);
  REQUIRE(std::abs(fit.a_z - truth.a_z) <= 1e-6 * scale);
  REQUIRE(std::abs(fit.b_x - truth.b_x) <= 1e-6 * scale);
  REQUIRE(std::abs(fit.b_y - truth.b_y) <= 1e-6 * scale);
  REQUIRE(std::abs(fit.b_z - truth.b_z) <= 1e-6 * scale);
}

TEST_CASE("cr tomography of a silent drive returns zeros") {
  DeviceConfig cfg = cr_device(false);
  std::vector<std::int64_t> durations{64, 128, 192, 288, 384, 512};
  CRCoefficients fit = cr_tomography(cfg, 0, 1, 0.0, durations);
  const double scale = cfg.cr_zx_rate_per_amp * 0.2;
  REQUIRE(std::abs(fit.a_x) <= 1e-9 * scale);
  REQUIRE(std::abs(fit.b_x) <= 1e-9 * scale);
  REQUIRE(std::abs(fit.b_z) <= 1e-9 * scale);
}

TEST_CASE("cr tomography requires six distinct durations") {
  DeviceConfig cfg = cr_device(false);
  REQUIRE_THROWS_AS(cr_tomography(cfg, 0, 1, 0.1, {64, 64, 64, 64, 64, 64}), ValidationError);
}

TEST_CASE("shot-based tomography lands near the truth") {
  DeviceConfig cfg = cr_device(false);
  TomographyOptions opt;
  opt.shots = 1024;
  opt.seed = 5;
  std::vector<std::int64_t> durations{64, 128, 192, 288, 384, 512, 640};
  CRCoefficients fit = cr_tomography(cfg, 0, 1, 0.2, durations, opt);
  CRCoefficients truth = effective_cr(cfg, 0, 1, 0.2);
  // Loose sanity window; the acceptance suite runs the 3-sigma bootstrap.
  REQUIRE(std::abs(fit.a_x - truth.a_x) <= 0.15 * std::abs(truth.a_x));
}

TEST_CASE("single-CR coverage stays on the one-dimensional locus") {
  DeviceConfig cfg = cr_device(/*pure_zx=*/true);
  CoverageSummary summary;
  auto pts = coverage_scan(single_cr_template(cfg), cfg, 40, 12345, &summary);
  REQUIRE(pts.size() == 40);
  REQUIRE(summary.max.c2 <= 1e-6);
  REQUIRE(summary.max.c3 <= 1e-6);
  REQUIRE(summary.span_c1() > 0.1);
}

TEST_CASE("multi-CR coverage spreads over the chamber base") {
  DeviceConfig cfg = cr_device(true);
  CoverageSummary summary;
  auto pts = coverage_scan(multi_cr_template(cfg), cfg, 60, 99, &summary);
  REQUIRE(summary.max.c3 <= 1e-6);
  REQUIRE(summary.span_c1() >= 0.3);
  REQUIRE(summary.span_c2() >= 0.3);
}

TEST_CASE("zero-amplitude-only sampling maps to the origin") {
  DeviceConfig cfg = cr_device(true);
  PulseSchedule t = single_cr_template(cfg);
  // Collapse amplitude bounds to zero so every sample is the zero pulse.
  for (auto& spec : t.params.entries)
    if (spec.kind == ParamKind::Amplitude) spec.hi = 0.0;
  CoverageSummary summary;
  coverage_scan(t, cfg, 10, 1, &summary);
  REQUIRE(summary.max.c1 <= 1e-9);
  REQUIRE(summary.max.c2 <= 1e-9);
  REQUIRE(summary.max.c3 <= 1e-9);
}
