// Copyright 2026 The spdc-design Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Temporal compensator design: null the first-order wavelength dependence of
// the phase difference by choosing the compensator length.
//
// Convention: derivatives are taken with respect to the signal wavelength at
// fixed pump, the idler following by energy conservation.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "spdc/errors.hpp"
#include "spdc/optics.hpp"
#include "spdc/stack.hpp"

namespace spdc {

inline constexpr double kDefaultDerivativeStepNm = 0.1;
inline constexpr double kCompensatorToleranceMm = 1e-3;

/// Collinear phase difference as a function of signal wavelength, idler slaved to a fixed pump.
inline double phase_at_signal(const CrystalStack& stack, Wavelength pump, double signal_nm,
                              const MaterialCatalog& cat = default_catalog()) {
  const Wavelength s(signal_nm);
  return total_phase_difference(stack, s, idler_wavelength(pump, s), {}, cat).rad;
}

/// Central difference d(dphi)/d(lambda_s) in rad/nm.
inline double dphase_dlambda(const CrystalStack& stack, Wavelength pump, Wavelength center,
                             const MaterialCatalog& cat = default_catalog(),
                             double step_nm = kDefaultDerivativeStepNm) {
  const double c = center.nm();
  return (phase_at_signal(stack, pump, c + step_nm, cat) - phase_at_signal(stack, pump, c - step_nm, cat)) /
         (2.0 * step_nm);
}

/// Five-point stencil, used to validate the step size of the central difference.
inline double dphase_dlambda_5pt(const CrystalStack& stack, Wavelength pump, Wavelength center,
                                 const MaterialCatalog& cat = default_catalog(), double step_nm = 0.5) {
  const double c = center.nm(), h = step_nm;
  auto f = [&](double x) { return phase_at_signal(stack, pump, x, cat); };
  return (-f(c + 2 * h) + 8 * f(c + h) - 8 * f(c - h) + f(c - 2 * h)) / (12.0 * h);
}

/// Residual curvature in rad/nm^2. Not compensated; reported alongside solutions.
inline double d2phase_dlambda2(const CrystalStack& stack, Wavelength pump, Wavelength center,
                               const MaterialCatalog& cat = default_catalog(), double step_nm = 0.5) {
  const double c = center.nm(), h = step_nm;
  auto f = [&](double x) { return phase_at_signal(stack, pump, x, cat); };
  return (f(c + h) - 2.0 * f(c) + f(c - h)) / (h * h);
}

struct CompensatorSolution {
  double length_mm = 0.0;
  double residual_derivative = 0.0;  // rad/nm at the solution
  double center_wavelength_nm = 0.0;
  double second_derivative = 0.0;    // rad/nm^2 at the solution
};

/// Root of L -> d(dphi)/d(lambda) on the compensator length. The compensator
/// length already present in `stack` is ignored.
inline CompensatorSolution optimal_compensator_length(const CrystalStack& stack, Wavelength pump, Wavelength center,
                                                      std::pair<double, double> bracket_mm,
                                                      const MaterialCatalog& cat = default_catalog(),
                                                      double tolerance_mm = kCompensatorToleranceMm) {
  auto [lo, hi] = bracket_mm;
  if (!(lo < hi)) throw DomainError("compensator bracket must satisfy lo < hi");
  if (lo < 0.0) throw DomainError("compensator bracket must not include negative lengths");
  auto f = [&](double L) { return dphase_dlambda(stack.with_compensator_length(L), pump, center, cat); };
  const double f_lo = f(lo), f_hi = f(hi);

  double root = 0.0;
  if (f_lo == 0.0) {
    root = lo;
  } else if (f_hi == 0.0) {
    root = hi;
  } else if ((f_lo > 0.0) == (f_hi > 0.0)) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "no sign change of d(dphi)/d(lambda) over compensator bracket [%g, %g] mm: "
                  "f(lo) = %.6g rad/nm, f(hi) = %.6g rad/nm",
                  lo, hi, f_lo, f_hi);
    throw BracketError(buf, f_lo, f_hi);
  } else {
    std::uintmax_t max_iter = 100;
    auto within_tol = [tolerance_mm](double a, double b) { return std::abs(b - a) <= tolerance_mm; };
    auto r = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, within_tol, max_iter);
    root = 0.5 * (r.first + r.second);
  }
  const auto solved = stack.with_compensator_length(root);
  return {root, dphase_dlambda(solved, pump, center, cat), center.nm(),
          d2phase_dlambda2(solved, pump, center, cat)};
}

struct LinearLawFit {
  double slope = 0.0;
  double intercept_mm = 0.0;
  double r_squared = 0.0;
  std::vector<double> bbo_mm;
  std::vector<CompensatorSolution> solutions;
};

/// Least-squares line through (downconverter length, optimal compensator length).
inline LinearLawFit fit_linear_law(const CrystalStack& stack, std::span<const double> bbo_lengths_mm,
                                   Wavelength pump, Wavelength center, std::pair<double, double> bracket_mm,
                                   const MaterialCatalog& cat = default_catalog()) {
  std::vector<double> xs(bbo_lengths_mm.begin(), bbo_lengths_mm.end());
  {
    auto sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    if (std::unique(sorted.begin(), sorted.end()) - sorted.begin() < 3) {
      throw DomainError("linear-law fit needs at least 3 distinct downconverter lengths");
    }
  }
  LinearLawFit fit;
  fit.bbo_mm = xs;
  for (double L : xs) {
    fit.solutions.push_back(
        optimal_compensator_length(stack.with_downconverter_length(L), pump, center, bracket_mm, cat));
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += fit.solutions[i].length_mm;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = fit.solutions[i].length_mm - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  fit.slope = sxy / sxx;
  fit.intercept_mm = my - fit.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = fit.solutions[i].length_mm - (fit.intercept_mm + fit.slope * xs[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

/// Waveplate thicknesses whose own dispersion needs `offset_mm` of compensator
/// (the intercept of the linear law), with the MgF2 layer slaved so the plate
/// stays half-wave at `design`.
inline HwpModel calibrate_hwp(const CrystalStack& stack, double offset_mm, Wavelength pump, Wavelength center,
                              Wavelength design, std::pair<double, double> quartz_bracket_mm,
                              std::pair<double, double> compensator_bracket_mm,
                              const MaterialCatalog& cat = default_catalog()) {
  const auto bare = stack.with_downconverter_length(0.0);
  auto f = [&](double quartz_mm) {
    auto s = bare;
    s.hwp = HwpModel::half_wave(quartz_mm, design, cat);
    return optimal_compensator_length(s, pump, center, compensator_bracket_mm, cat, 1e-7).length_mm - offset_mm;
  };
  auto [lo, hi] = quartz_bracket_mm;
  const double f_lo = f(lo), f_hi = f(hi);
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw BracketError("waveplate calibration: target offset not reachable in quartz bracket", f_lo, f_hi);
  }
  std::uintmax_t max_iter = 100;
  auto r = boost::math::tools::toms748_solve(
      f, lo, hi, f_lo, f_hi, [](double a, double b) { return std::abs(b - a) <= 1e-7; }, max_iter);
  return HwpModel::half_wave(0.5 * (r.first + r.second), design, cat);
}

}  // namespace spdc
