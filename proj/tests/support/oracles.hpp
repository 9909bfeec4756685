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


// Independent reference computations used by the tests. Nothing here calls
// into the library's dispersion or phase code; coefficients are restated
// from the published sources.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "spdc/angle_map.hpp"

namespace oracle {

constexpr double kPi = std::numbers::pi;

/// n^2 = A + B/(L^2 - C) - D L^2, L in um.
struct Rational {
  double A, B, C, D;
  double n(double nm) const {
    const double x = (nm / 1e3) * (nm / 1e3);
    return std::sqrt(A + B / (x - C) - D * x);
  }
  double dn_dlambda(double nm) const {  // per nm
    const double um = nm / 1e3, x = um * um;
    const double dn2_dum = -2.0 * um * B / ((x - C) * (x - C)) - 2.0 * D * um;
    return dn2_dum / (2.0 * n(nm)) / 1e3;
  }
};

/// n^2 = A + sum B_k L^2/(L^2 - lambda_k^2), resonance wavelengths in um.
struct Sellmeier {
  double A;
  std::vector<std::pair<double, double>> terms;  // (B, resonance um)
  double n(double nm) const {
    const double x = (nm / 1e3) * (nm / 1e3);
    double n2 = A;
    for (auto [b, r] : terms) n2 += b * x / (x - r * r);
    return std::sqrt(n2);
  }
  double dn_dlambda(double nm) const {
    const double um = nm / 1e3, x = um * um;
    double d = 0.0;
    for (auto [b, r] : terms) d += -2.0 * um * b * r * r / ((x - r * r) * (x - r * r));
    return d / (2.0 * n(nm)) / 1e3;
  }
};

// Kato 1986.
inline const Rational bbo_o{2.7405, 0.0184, 0.0179, 0.0155};
inline const Rational bbo_e{2.3730, 0.0128, 0.0156, 0.0044};
// Lomheim and DeShazer 1978.
inline const Rational yvo_o{3.77834, 0.069736, 0.04724, 0.0108133};
inline const Rational yvo_e{4.59905, 0.110534, 0.04813, 0.0122676};
// Ghosh 1999; the second term's resonance is sqrt(100) um.
inline const Sellmeier quartz_o{1.28604141, {{1.07044083, std::sqrt(1.00585997e-2)}, {1.10202242, 10.0}}};
inline const Sellmeier quartz_e{1.28851804, {{1.09509924, std::sqrt(1.02101864e-2)}, {1.15662475, 10.0}}};
// Dodge 1984.
inline const Sellmeier mgf2_o{1.0, {{0.48755108, 0.04338408}, {0.39875031, 0.09461442}, {2.3120353, 23.793604}}};
inline const Sellmeier mgf2_e{1.0, {{0.41344023, 0.03684262}, {0.50497499, 0.09076162}, {2.4904862, 23.771995}}};

inline double index(spdc::MaterialId m, spdc::Axis a, double nm) {
  const bool o = a == spdc::Axis::ordinary;
  switch (m) {
    case spdc::MaterialId::BBO: return o ? bbo_o.n(nm) : bbo_e.n(nm);
    case spdc::MaterialId::YVO4: return o ? yvo_o.n(nm) : yvo_e.n(nm);
    case spdc::MaterialId::Quartz: return o ? quartz_o.n(nm) : quartz_e.n(nm);
    case spdc::MaterialId::MgF2: return o ? mgf2_o.n(nm) : mgf2_e.n(nm);
  }
  return 0.0;
}

/// Collinear d(dphi)/d(lambda_s) of the parallel source from group indices:
/// d(2 pi L n/lambda)/d lambda = -2 pi L n_g / lambda^2, idler slaved through
/// d lambda_i / d lambda_s = -(lambda_i / lambda_s)^2. The waveplate is a
/// 45-degree plate whose rotated output carries the mean of both eigen phases.
struct CollinearSource {
  double bbo_mm, yvo_mm, quartz_mm, mgf2_mm, cut_rad;

  template <class N>
  static double group(const N& n, double nm) { return n.n(nm) - nm * n.dn_dlambda(nm); }

  // d phi / d lambda for one photon, V branch minus H branch, in rad/nm.
  double photon(double nm) const {
    auto dphi = [nm](double L_mm, double ng) { return -2.0 * kPi * L_mm * 1e6 * ng / (nm * nm); };
    // Extraordinary BBO index at the cut: n(lambda) = (c^2/no^2 + s^2/ne^2)^-1/2.
    const double c2 = std::cos(cut_rad) * std::cos(cut_rad), s2 = 1.0 - c2;
    const double no = bbo_o.n(nm), ne = bbo_e.n(nm);
    const double n = 1.0 / std::sqrt(c2 / (no * no) + s2 / (ne * ne));
    const double dn = std::pow(n, 3) * (c2 * bbo_o.dn_dlambda(nm) / std::pow(no, 3) +
                                        s2 * bbo_e.dn_dlambda(nm) / std::pow(ne, 3));
    const double bbo_ng = n - nm * dn;
    const double hwp_ng_q = 0.5 * (group(quartz_o, nm) + group(quartz_e, nm));
    const double hwp_ng_m = 0.5 * (group(mgf2_o, nm) + group(mgf2_e, nm));
    return dphi(quartz_mm, hwp_ng_q) + dphi(mgf2_mm, hwp_ng_m) + dphi(bbo_mm, bbo_ng) +
           dphi(yvo_mm, group(yvo_o, nm)) - dphi(yvo_mm, group(yvo_e, nm));
  }

  double dphase_dlambda(double pump_nm, double signal_nm) const {
    const double idler_nm = 1.0 / (1.0 / pump_nm - 1.0 / signal_nm);
    const double slave = -(idler_nm / signal_nm) * (idler_nm / signal_nm);
    return photon(signal_nm) + slave * photon(idler_nm);
  }
};

/// Composite Simpson rule.
inline std::complex<double> simpson(const std::function<std::complex<double>(double)>& f, double a, double b,
                                    int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  std::complex<double> acc = f(a) + f(b);
  for (int k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return acc * h / 3.0;
}

/// Mean of e^{i phi} for phi uniform on [c - delta, c + delta].
inline std::complex<double> uniform_coherence(double c, double delta, int n = 20000) {
  return simpson([](double p) { return std::polar(1.0, p); }, c - delta, c + delta, n) / (2.0 * delta);
}

/// Visibility of the two-polarizer A/D correlation: both analyzers at 45
/// degrees versus one at 45 and one at -45 degrees.
inline double ad_visibility(const Eigen::Matrix4cd& rho) {
  const double r = std::sqrt(0.5);
  const Eigen::Vector2cd d(r, r), a(r, -r);
  auto rate = [&](const Eigen::Vector2cd& p, const Eigen::Vector2cd& q) {
    Eigen::Vector4cd v;
    v << p(0) * q(0), p(0) * q(1), p(1) * q(0), p(1) * q(1);
    return (v.adjoint() * rho * v)(0, 0).real();
  };
  const double same = rate(d, d), cross = rate(d, a);
  return (same - cross) / (same + cross);
}

/// Largest flat disc by exhaustive search: for every center, every radius
/// candidate (each center-to-sample distance) is tested against every sample.
inline double brute_force_flat_radius(const spdc::PhaseMap& map, double tol, int* best_i = nullptr,
                                      int* best_j = nullptr) {
  const auto& g = map.grid;
  double best = -1.0;
  for (int j = 0; j < g.samples; ++j) {
    for (int i = 0; i < g.samples; ++i) {
      const int n = g.samples - 1;
      const double edge = std::min(std::min(i, n - i) * g.azimuth_step(), std::min(j, n - j) * g.polar_step());
      // The disc stops at the nearest violating sample: its radius is the
      // largest sample distance strictly inside, or the edge distance when
      // no violator lies within the edge.
      double violator = INFINITY;
      for (int jj = 0; jj < g.samples; ++jj) {
        for (int ii = 0; ii < g.samples; ++ii) {
          if (std::abs(map.at(ii, jj) - map.at(i, j)) > tol) {
            violator = std::min(violator, std::hypot(g.azimuth(ii) - g.azimuth(i), g.polar(jj) - g.polar(j)));
          }
        }
      }
      double r = edge;
      if (violator <= edge) {
        r = 0.0;
        for (int jj = 0; jj < g.samples; ++jj) {
          for (int ii = 0; ii < g.samples; ++ii) {
            const double d = std::hypot(g.azimuth(ii) - g.azimuth(i), g.polar(jj) - g.polar(j));
            if (d < violator * (1 - 1e-12)) r = std::max(r, d);
          }
        }
      }
      if (r > best + 1e-15) {
        best = r;
        if (best_i) *best_i = i;
        if (best_j) *best_j = j;
      }
    }
  }
  return best;
}

}  // namespace oracle
