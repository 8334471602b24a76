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
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "pulseforge/errors.hpp"

// Derivative-free bound-constrained minimization. The primary method is a
// COBYLA-style scheme: a nondegenerate simplex of n+1 interpolation points
// supports a linear model of the objective, minimized over the intersection
// of the trust region and the (exactly linear) bound constraints; the trust
// radius shrinks as linear steps stop paying off. Every objective evaluation
// happens inside the bounds. Nelder-Mead is the fallback, with out-of-box
// proposals clipped and penalized by the violation distance. Both methods are
// deterministic: no internal randomness, ties break toward the lowest index.

namespace pulseforge {

struct Bounds {
  std::vector<double> lo;
  std::vector<double> hi;

  static Bounds unbounded(std::size_t n) {
    Bounds b;
    b.lo.assign(n, -std::numeric_limits<double>::infinity());
    b.hi.assign(n, std::numeric_limits<double>::infinity());
    return b;
  }
  static Bounds box(std::vector<double> lo_, std::vector<double> hi_) {
    Bounds b;
    b.lo = std::move(lo_);
    b.hi = std::move(hi_);
    return b;
  }
  void validate(std::size_t n) const {
    if (lo.size() != n || hi.size() != n) throw ValidationError("bounds: wrong dimension");
    for (std::size_t i = 0; i < n; ++i)
      if (!(lo[i] <= hi[i])) throw ValidationError("bounds: lo > hi at index " + std::to_string(i));
  }
  bool contains(const std::vector<double>& x, double tol = 1e-12) const {
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
    return true;
  }
  std::vector<double> clip(std::vector<double> x) const {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
    return x;
  }
};

enum class Termination { MaxEvals, TrustRadiusConverged, Stall };

struct OptimizerReport {
  std::vector<double> best_x;
  double best_f = std::numeric_limits<double>::infinity();
  int n_evals = 0;
  std::vector<std::pair<std::vector<double>, double>> trace;  // every evaluation, in order
  Termination termination = Termination::MaxEvals;
};

using Objective = std::function<double(const std::vector<double>&)>;

namespace detail {

// Bookkeeping shared by both methods: evaluates, traces, and tracks best.
struct EvalRecorder {
  const Objective& f;
  OptimizerReport& report;
  int max_evals;

  bool exhausted() const { return report.n_evals >= max_evals; }

  double operator()(const std::vector<double>& x) {
    const double v = f(x);
    report.n_evals++;
    report.trace.emplace_back(x, v);
    if (std::isfinite(v) && v < report.best_f) {
      report.best_f = v;
      report.best_x = x;
    }
    return v;
  }
};

// Exact minimizer of g.d over { lo <= x+d <= hi, ||d|| <= rho }: the path
// d(t) = clip(-t g, box) is monotone in ||d||, so bisect on t.
inline std::vector<double> box_ball_step(const std::vector<double>& g, const std::vector<double>& x,
                                         const Bounds& bounds, double rho) {
  const std::size_t n = g.size();
  auto d_of = [&](double t) {
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i)
      d[i] = std::clamp(-t * g[i], bounds.lo[i] - x[i], bounds.hi[i] - x[i]);
    return d;
  };
  auto norm = [](const std::vector<double>& d) {
    double s = 0;
    for (double v : d) s += v * v;
    return std::sqrt(s);
  };
  double gnorm = norm(g);
  if (gnorm == 0.0) return std::vector<double>(n, 0.0);
  double t_hi = rho / gnorm;
  // Grow until the ball is reached or the step saturates at the box.
  for (int i = 0; i < 60 && norm(d_of(t_hi)) < rho; ++i) {
    const double before = norm(d_of(t_hi));
    t_hi *= 2.0;
    if (norm(d_of(t_hi)) <= before + 1e-18) return d_of(t_hi);  // fully clamped
  }
  double t_lo = 0.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (t_lo + t_hi);
    if (norm(d_of(mid)) < rho) t_lo = mid;
    else t_hi = mid;
  }
  return d_of(t_hi);
}

// Solves S g = df (n x n, rows S) by Gaussian elimination with partial
// pivoting; returns false when the simplex is numerically degenerate.
inline bool solve_linear(std::vector<std::vector<double>> s, std::vector<double> rhs,
                         std::vector<double>& out) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(s[r][col]) > std::abs(s[piv][col])) piv = r;
    if (std::abs(s[piv][col]) < 1e-14) return false;
    std::swap(s[piv], s[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double factor = s[r][col] / s[col][col];
      for (std::size_t c = col; c < n; ++c) s[r][c] -= factor * s[col][c];
      rhs[r] -= factor * rhs[col];
    }
  }
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = rhs[i] / s[i][i];
  return true;
}

}  // namespace detail

/// Linear-approximation trust-region minimization over a simplex of
/// interpolation points, with bounds kept as exact linear constraints of the
/// trust-region subproblem. Returns the best point seen.
inline OptimizerReport minimize_cobyla(const Objective& objective, std::vector<double> x0,
                                       const Bounds& bounds, double rhobeg, double rhoend,
                                       int max_evals) {
  const std::size_t n = x0.size();
  if (n == 0) throw ValidationError("cobyla: empty parameter vector");
  bounds.validate(n);
  if (!bounds.contains(x0)) throw BoundsError("cobyla: x0 outside bounds");
  if (!(rhobeg > rhoend && rhoend > 0)) throw ValidationError("cobyla: need rhobeg > rhoend > 0");

  OptimizerReport report;
  detail::EvalRecorder eval{objective, report, max_evals};

  // Initial simplex: x0 plus steps of rhobeg along each axis, flipped or
  // shortened where the box leaves no room.
  std::vector<std::vector<double>> vx(n + 1, x0);
  std::vector<double> vf(n + 1, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < n; ++i) {
    double step = rhobeg;
    const double room_up = bounds.hi[i] - x0[i];
    const double room_dn = x0[i] - bounds.lo[i];
    if (room_up >= rhobeg) step = rhobeg;
    else if (room_dn >= rhobeg) step = -rhobeg;
    else step = room_up >= room_dn ? std::max(room_up, 1e-12) : -std::max(room_dn, 1e-12);
    vx[i + 1][i] += step;
  }
  for (std::size_t i = 0; i <= n && !eval.exhausted(); ++i) vf[i] = eval(vx[i]);
  if (report.n_evals <= static_cast<int>(n)) {
    report.termination = Termination::MaxEvals;
    return report;
  }

  double rho = rhobeg;
  int geometry_axis = 0;
  auto best_index = [&]() {
    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
      if (vf[i] < vf[best]) best = i;
    return best;
  };

  while (!eval.exhausted()) {
    const std::size_t b = best_index();
    std::swap(vx[0], vx[b]);
    std::swap(vf[0], vf[b]);

    // Linear interpolation model through the simplex.
    std::vector<std::vector<double>> s(n, std::vector<double>(n));
    std::vector<double> df(n);
    double max_edge = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double edge2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        s[i][j] = vx[i + 1][j] - vx[0][j];
        edge2 += s[i][j] * s[i][j];
      }
      max_edge = std::max(max_edge, std::sqrt(edge2));
      df[i] = vf[i + 1] - vf[0];
    }

    std::vector<double> grad;
    const bool model_ok = detail::solve_linear(s, df, grad);

    // Geometry repair: degenerate simplex or edges far off the current scale.
    if (!model_ok || max_edge > 4.0 * rho) {
      std::size_t worst = 1;
      double far = 0.0;
      for (std::size_t i = 1; i <= n; ++i) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) d2 += (vx[i][j] - vx[0][j]) * (vx[i][j] - vx[0][j]);
        if (d2 > far) {
          far = d2;
          worst = i;
        }
      }
      std::vector<double> fresh = vx[0];
      const std::size_t axis = static_cast<std::size_t>(geometry_axis++) % n;
      double step = rho;
      if (fresh[axis] + step > bounds.hi[axis]) step = -rho;
      if (fresh[axis] + step < bounds.lo[axis]) step = (bounds.hi[axis] - fresh[axis]) * 0.5;
      fresh[axis] = std::clamp(fresh[axis] + step, bounds.lo[axis], bounds.hi[axis]);
      vx[worst] = fresh;
      if (eval.exhausted()) break;
      vf[worst] = eval(vx[worst]);
      continue;
    }

    std::vector<double> d = detail::box_ball_step(grad, vx[0], bounds, rho);
    double dnorm = 0.0, predicted = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      dnorm += d[j] * d[j];
      predicted -= grad[j] * d[j];
    }
    dnorm = std::sqrt(dnorm);

    if (dnorm < 0.3 * rho || predicted <= 0.0) {
      // The linear model finds no useful step at this scale.
      rho *= 0.5;
      if (rho < rhoend) {
        report.termination = Termination::TrustRadiusConverged;
        return report;
      }
      // Rescale the simplex toward the best vertex so edges track rho.
      for (std::size_t i = 1; i <= n; ++i) {
        bool moved = false;
        for (std::size_t j = 0; j < n; ++j) {
          const double delta = vx[i][j] - vx[0][j];
          if (std::abs(delta) > 2.0 * rho) {
            vx[i][j] = std::clamp(vx[0][j] + (delta > 0 ? rho : -rho), bounds.lo[j], bounds.hi[j]);
            moved = true;
          }
        }
        if (moved) {
          if (eval.exhausted()) break;
          vf[i] = eval(vx[i]);
        }
      }
      continue;
    }

    std::vector<double> x_new = vx[0];
    for (std::size_t j = 0; j < n; ++j) x_new[j] += d[j];
    x_new = bounds.clip(std::move(x_new));  // guards round-off only
    if (eval.exhausted()) break;
    const double f_new = eval(x_new);
    const double actual = vf[0] - f_new;

    // Replace the worst vertex (or the farthest when the step flopped).
    std::size_t replace = 1;
    for (std::size_t i = 1; i <= n; ++i)
      if (vf[i] > vf[replace]) replace = i;
    if (f_new >= vf[replace]) {
      double far = -1.0;
      for (std::size_t i = 1; i <= n; ++i) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) d2 += (vx[i][j] - vx[0][j]) * (vx[i][j] - vx[0][j]);
        if (d2 > far) {
          far = d2;
          replace = i;
        }
      }
    }
    vx[replace] = std::move(x_new);
    vf[replace] = f_new;

    const double ratio = actual / std::max(predicted, 1e-300);
    if (ratio < 0.1) {
      rho *= 0.5;
      if (rho < rhoend) {
        report.termination = Termination::TrustRadiusConverged;
        return report;
      }
    } else if (ratio > 0.7 && dnorm > 0.9 * rho) {
      rho = std::min(rho * 2.0, rhobeg);
    }
  }
  report.termination = Termination::MaxEvals;
  return report;
}

/// Standard Nelder-Mead simplex with reflection/expansion/contraction/shrink.
/// Out-of-box proposals are clipped before evaluation and penalized by the
/// violation distance, so the simplex retreats into the feasible region.
inline OptimizerReport minimize_neldermead(const Objective& objective, std::vector<double> x0,
                                           const Bounds& bounds, int max_evals) {
  const std::size_t n = x0.size();
  if (n == 0) throw ValidationError("neldermead: empty parameter vector");
  bounds.validate(n);
  x0 = bounds.clip(std::move(x0));

  OptimizerReport report;
  detail::EvalRecorder eval{objective, report, max_evals};

  auto penalized = [&](const std::vector<double>& x) {
    const std::vector<double> c = bounds.clip(x);
    double dist = 0.0;
    for (std::size_t i = 0; i < n; ++i) dist += (x[i] - c[i]) * (x[i] - c[i]);
    return eval(c) + 1e3 * std::sqrt(dist);
  };

  std::vector<std::vector<double>> vx(n + 1, x0);
  std::vector<double> vf(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    double step = (std::abs(x0[i]) > 1e-8) ? 0.05 * std::abs(x0[i]) : 0.00025;
    if (std::isfinite(bounds.hi[i]) && x0[i] + step > bounds.hi[i]) step = -step;
    vx[i + 1][i] += step;
  }
  for (std::size_t i = 0; i <= n && !eval.exhausted(); ++i) vf[i] = penalized(vx[i]);
  if (report.n_evals <= static_cast<int>(n)) {
    report.termination = Termination::MaxEvals;
    return report;
  }

  auto order = [&]() {
    // Stable sort by value; ties keep lower index first.
    std::vector<std::size_t> idx(n + 1);
    for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vf[a] < vf[b]; });
    std::vector<std::vector<double>> nx(n + 1);
    std::vector<double> nf(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      nx[i] = vx[idx[i]];
      nf[i] = vf[idx[i]];
    }
    vx = std::move(nx);
    vf = std::move(nf);
  };

  while (!eval.exhausted()) {
    order();
    // Convergence: simplex collapsed in value and size.
    double spread = 0.0, size = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      spread = std::max(spread, std::abs(vf[i] - vf[0]));
      for (std::size_t j = 0; j < n; ++j) size = std::max(size, std::abs(vx[i][j] - vx[0][j]));
    }
    if (spread < 1e-12 && size < 1e-10) {
      report.termination = Termination::Stall;
      return report;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) centroid[j] += vx[i][j];
    }
    for (std::size_t j = 0; j < n; ++j) centroid[j] /= static_cast<double>(n);

    auto along = [&](double coeff) {
      std::vector<double> x(n);
      for (std::size_t j = 0; j < n; ++j) x[j] = centroid[j] + coeff * (vx[n][j] - centroid[j]);
      return x;
    };

    if (eval.exhausted()) break;
    std::vector<double> xr = along(-1.0);
    const double fr = penalized(xr);
    if (fr < vf[0]) {
      if (eval.exhausted()) {
        vx[n] = std::move(xr);
        vf[n] = fr;
        break;
      }
      std::vector<double> xe = along(-2.0);
      const double fe = penalized(xe);
      if (fe < fr) {
        vx[n] = std::move(xe);
        vf[n] = fe;
      } else {
        vx[n] = std::move(xr);
        vf[n] = fr;
      }
    } else if (fr < vf[n - 1]) {
      vx[n] = std::move(xr);
      vf[n] = fr;
    } else {
      const bool outside = fr < vf[n];
      if (eval.exhausted()) break;
      std::vector<double> xc = along(outside ? -0.5 : 0.5);
      const double fc = penalized(xc);
      if (fc < std::min(fr, vf[n])) {
        vx[n] = std::move(xc);
        vf[n] = fc;
      } else {
        // Shrink toward the best vertex.
        for (std::size_t i = 1; i <= n && !eval.exhausted(); ++i) {
          for (std::size_t j = 0; j < n; ++j) vx[i][j] = vx[0][j] + 0.5 * (vx[i][j] - vx[0][j]);
          vf[i] = penalized(vx[i]);
        }
      }
    }
  }
  report.termination = Termination::MaxEvals;
  return report;
}

}  // namespace pulseforge
