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

#include "pulseforge/optimizer.hpp"
#include "pulseforge/rng.hpp"

using namespace pulseforge;

namespace {

// Wraps an objective with a hard feasibility assertion.
Objective guarded(const Objective& f, const Bounds& b, bool& violated) {
  return [&f, &b, &violated](const std::vector<double>& x) {
    if (!b.contains(x)) violated = true;
    return f(x);
  };
}

}  // namespace

TEST_CASE("cobyla solves a bound-constrained quadratic to 1e-4 in 100 evals") {
  Bounds b = Bounds::box({0.0, 0.0}, {0.4, 0.4});
  bool violated = false;
  Objective f = guarded(
      [](const std::vector<double>& x) {
        double s = 0;
        for (double v : x) s += (v - 0.2) * (v - 0.2);
        return s;
      },
      b, violated);
  auto rep = minimize_cobyla(f, {0.0, 0.0}, b, 0.1, 1e-6, 100);
  REQUIRE(!violated);
  REQUIRE(rep.n_evals <= 100);
  REQUIRE(std::abs(rep.best_x[0] - 0.2) < 1e-4);
  REQUIRE(std::abs(rep.best_x[1] - 0.2) < 1e-4);
}

TEST_CASE("cobyla finds corner optima of linear objectives exactly") {
  Bounds b = Bounds::box({0.0, 0.0}, {0.4, 0.4});
  bool violated = false;
  Objective f = guarded(
      [](const std::vector<double>& x) { return -(x[0] + x[1]); }, b, violated);
  auto rep = minimize_cobyla(f, {0.05, 0.1}, b, 0.1, 1e-7, 200);
  REQUIRE(!violated);
  REQUIRE(std::abs(rep.best_x[0] - 0.4) < 1e-6);
  REQUIRE(std::abs(rep.best_x[1] - 0.4) < 1e-6);
}

TEST_CASE("cobyla on a constant objective terminates by radius convergence") {
  Bounds b = Bounds::box({-1.0}, {1.0});
  auto rep = minimize_cobyla([](const std::vector<double>&) { return 3.25; }, {0.2}, b, 0.1, 1e-5, 500);
  REQUIRE(rep.best_f == 3.25);
  REQUIRE((rep.termination == Termination::TrustRadiusConverged ||
           rep.termination == Termination::Stall));
  REQUIRE(rep.n_evals < 500);
}

TEST_CASE("cobyla rejects infeasible starts and bad radii") {
  Bounds b = Bounds::box({0.0}, {1.0});
  Objective f = [](const std::vector<double>& x) { return x[0]; };
  REQUIRE_THROWS_AS(minimize_cobyla(f, {2.0}, b, 0.1, 1e-5, 50), BoundsError);
  REQUIRE_THROWS_AS(minimize_cobyla(f, {0.5}, b, 1e-6, 1e-5, 50), ValidationError);
}

TEST_CASE("cobyla records non-finite evaluations without adopting them") {
  Bounds b = Bounds::box({-1.0, -1.0}, {1.0, 1.0});
  Objective f = [](const std::vector<double>& x) {
    if (x[0] > 0.5) return std::numeric_limits<double>::quiet_NaN();
    return (x[0] + 0.3) * (x[0] + 0.3) + x[1] * x[1];
  };
  auto rep = minimize_cobyla(f, {0.0, 0.5}, b, 0.1, 1e-6, 150);
  REQUIRE(std::isfinite(rep.best_f));
  REQUIRE(rep.best_x[0] <= 0.5);
}

TEST_CASE("cobyla is deterministic and within budget") {
  Bounds b = Bounds::box({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
  Objective f = [](const std::vector<double>& x) {
    return std::pow(x[0] - 0.33, 2) + 2.0 * std::pow(x[1] - 0.77, 2) + std::sin(3 * x[2]) * 0.1;
  };
  auto r1 = minimize_cobyla(f, {0.5, 0.5, 0.5}, b, 0.1, 1e-6, 80);
  auto r2 = minimize_cobyla(f, {0.5, 0.5, 0.5}, b, 0.1, 1e-6, 80);
  REQUIRE(r1.n_evals <= 80);
  REQUIRE(r1.trace == r2.trace);
}

TEST_CASE("best-so-far trace prefix is non-increasing by construction") {
  Bounds b = Bounds::box({0.0, 0.0}, {0.4, 0.4});
  Objective f = [](const std::vector<double>& x) {
    return std::cos(7 * x[0]) * 0.2 + (x[1] - 0.1) * (x[1] - 0.1);
  };
  auto rep = minimize_cobyla(f, {0.2, 0.3}, b, 0.1, 1e-6, 60);
  double best = std::numeric_limits<double>::infinity();
  double prev = best;
  for (const auto& [x, v] : rep.trace) {
    best = std::min(best, v);
    REQUIRE(best <= prev);  // prefix minima never increase
    prev = best;
  }
  REQUIRE(best == rep.best_f);
}

TEST_CASE("nelder-mead solves the 1-D parabola unbounded") {
  Bounds b = Bounds::unbounded(1);
  auto rep = minimize_neldermead(
      [](const std::vector<double>& x) { return (x[0] - 1.0) * (x[0] - 1.0); }, {0.0}, b, 400);
  REQUIRE(std::abs(rep.best_x[0] - 1.0) < 1e-6);
}

TEST_CASE("nelder-mead solves Rosenbrock from the classic start") {
  Bounds b = Bounds::unbounded(2);
  Objective rosen = [](const std::vector<double>& x) {
    const double a = 1.0 - x[0];
    const double b2 = x[1] - x[0] * x[0];
    return a * a + 100.0 * b2 * b2;
  };
  auto rep = minimize_neldermead(rosen, {-1.2, 1.0}, b, 2000);
  REQUIRE(rep.best_f <= 1e-4);
}

TEST_CASE("nelder-mead tolerates seeded noise near the optimum") {
  Bounds b = Bounds::box({-2.0, -2.0}, {2.0, 2.0});
  Rng rng(99);
  Objective noisy = [&rng](const std::vector<double>& x) {
    double s = 0;
    for (double v : x) s += v * v;
    return s + 1e-3 * (rng.uniform() - 0.5);
  };
  auto rep = minimize_neldermead(noisy, {1.0, -1.0}, b, 600);
  REQUIRE(rep.best_f <= 1e-2);
}

TEST_CASE("nelder-mead respects bounds via clipping") {
  Bounds b = Bounds::box({0.0, 0.0}, {0.4, 0.4});
  bool violated = false;
  Objective f = guarded(
      [](const std::vector<double>& x) { return -(x[0] + 0.5 * x[1]); }, b, violated);
  auto rep = minimize_neldermead(f, {0.2, 0.2}, b, 500);
  REQUIRE(!violated);
  REQUIRE(rep.best_x[0] == Catch::Approx(0.4).margin(1e-6));
}

TEST_CASE("budget is always respected") {
  Bounds b = Bounds::box({0.0}, {1.0});
  Objective f = [](const std::vector<double>& x) { return std::sin(20 * x[0]); };
  for (int budget : {3, 10, 37}) {
    auto r = minimize_cobyla(f, {0.4}, b, 0.1, 1e-8, budget);
    REQUIRE(r.n_evals <= budget);
    auto r2 = minimize_neldermead(f, {0.4}, b, budget);
    REQUIRE(r2.n_evals <= budget);
  }
}
