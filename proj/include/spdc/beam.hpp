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

// Relative SPDC brightness from the overlap of a walking-off pump with the
// collection mode, for circular or elliptical pump profiles.
//
// Beams are treated as collimated over the crystal. The pump centroid moves
// by z tan(rho) along the walk-off direction; transverse integrals are
// closed-form Gaussian products, only z is discretized.

#include <cmath>
#include <numbers>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "spdc/errors.hpp"

namespace spdc {

struct GaussianBeam {
  double waist_major_um = 100.0;
  double waist_minor_um = 100.0;
  double orientation_rad = 0.0;  // major axis relative to the walk-off direction
  double wavelength_nm = 405.0;
  double waist_position_mm = 0.0;  // unused while beams are collimated

  void validate() const {
    if (!(waist_minor_um > 0.0) || !(waist_major_um >= waist_minor_um)) {
      throw DomainError("pump waists must satisfy major >= minor > 0");
    }
  }

  static GaussianBeam elliptical(double aspect_ratio, double major_um, double orientation_rad) {
    if (!(aspect_ratio >= 1.0)) throw DomainError("aspect ratio must be >= 1");
    return {major_um, major_um / aspect_ratio, orientation_rad};
  }
};

struct CollectionMode {
  double waist_um = 45.0;
  double wavelength_nm = 810.0;

  void validate() const {
    if (!(waist_um > 0.0)) throw DomainError("collection waist must be positive");
  }
};

struct OverlapGeometry {
  double crystal_length_mm = 6.0;
  double walkoff_angle_rad = 0.0;
  double walkoff_direction_rad = 0.0;  // lab angle of the walk-off displacement

  void validate() const {
    if (!(crystal_length_mm > 0.0)) throw DomainError("crystal length must be positive");
  }
};

/// Which collection overlap defines brightness.
///   single_mode: |int dz  E_p . u|^2  (pump against one collection mode)
///   pair:        |int dz  E_p . u_s . u_i|^2  (identical co-centered signal/idler modes)
enum class CollectionOverlap { single_mode, pair };

inline std::string_view to_string(CollectionOverlap o) {
  return o == CollectionOverlap::single_mode ? "single_mode" : "pair";
}

struct OverlapOptions {
  CollectionOverlap overlap = CollectionOverlap::single_mode;
  int z_slices = 101;
  double max_relative_error = 1e-3;
};

/// Lateral pump displacement in um after z mm of walk-off rho.
inline double walkoff_displacement(double rho_rad, double z_mm) { return z_mm * 1e3 * std::tan(rho_rad); }

namespace detail {

/// Transverse overlap at one z slice with the pump centroid displaced by d (um).
inline double slice_overlap(const Eigen::Matrix2d& M, double pump_norm, double c, double coll_norm,
                            const Eigen::Vector2d& d) {
  const Eigen::Matrix2d A = M + c * Eigen::Matrix2d::Identity();
  const Eigen::Vector2d Md = M * d;
  const double exponent = d.dot(Md) - Md.dot(A.ldlt().solve(Md));
  return pump_norm * coll_norm * std::numbers::pi / std::sqrt(A.determinant()) * std::exp(-exponent);
}

inline double trapezoid(const std::vector<double>& f, double h, int stride) {
  double acc = 0.0;
  const int last = static_cast<int>(f.size()) - 1;
  for (int k = 0; k <= last; k += stride) acc += (k == 0 || k == last) ? 0.5 * f[k] : f[k];
  return acc * h * stride;
}

}  // namespace detail

/// Squared overlap amplitude in arbitrary units; compare configurations by ratio.
inline double relative_brightness(const GaussianBeam& pump, const CollectionMode& collection,
                                  const OverlapGeometry& geom, const OverlapOptions& opt = {}) {
  pump.validate();
  collection.validate();
  geom.validate();
  if (opt.z_slices < 3 || opt.z_slices % 2 == 0) throw DomainError("z_slices must be odd and >= 3");

  const double a = pump.waist_major_um, b = pump.waist_minor_um;
  const double angle = geom.walkoff_direction_rad + pump.orientation_rad;
  Eigen::Matrix2d R;
  R << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  const Eigen::Matrix2d M = R * Eigen::Vector2d(1.0 / (a * a), 1.0 / (b * b)).asDiagonal() * R.transpose();
  const double pump_norm = std::sqrt(2.0 / (std::numbers::pi * a * b));

  const double w = collection.waist_um;
  const int modes = opt.overlap == CollectionOverlap::single_mode ? 1 : 2;
  const double c = modes / (w * w);
  const double coll_norm = std::pow(std::sqrt(2.0 / std::numbers::pi) / w, modes);

  const Eigen::Vector2d dir(std::cos(geom.walkoff_direction_rad), std::sin(geom.walkoff_direction_rad));
  const int n = opt.z_slices;
  const double h = geom.crystal_length_mm / (n - 1);
  std::vector<double> f(n);
  for (int k = 0; k < n; ++k) {
    const Eigen::Vector2d d = walkoff_displacement(geom.walkoff_angle_rad, k * h) * dir;
    f[k] = detail::slice_overlap(M, pump_norm, c, coll_norm, d);
  }
  const double fine = detail::trapezoid(f, h, 1);
  const double coarse = detail::trapezoid(f, h, 2);
  // Richardson estimate of the fine-grid error.
  const double err = std::abs(fine - coarse) / 3.0;
  if (err > opt.max_relative_error * std::abs(fine)) {
    throw DiscretizationError("brightness z-integral not converged at " + std::to_string(n) +
                                  " slices; try " + std::to_string(2 * n - 1),
                              2 * n - 1);
  }
  return fine * fine;
}

/// Brightness per pump orientation, normalized to a circular pump of the major waist.
inline std::vector<std::pair<double, double>> orientation_scan(double aspect_ratio, double major_waist_um,
                                                               const std::vector<double>& orientations_rad,
                                                               const CollectionMode& collection,
                                                               const OverlapGeometry& geom,
                                                               const OverlapOptions& opt = {}) {
  const double ref = relative_brightness(GaussianBeam::elliptical(1.0, major_waist_um, 0.0), collection, geom, opt);
  std::vector<std::pair<double, double>> out;
  out.reserve(orientations_rad.size());
  for (double o : orientations_rad) {
    out.emplace_back(o, relative_brightness(GaussianBeam::elliptical(aspect_ratio, major_waist_um, o), collection,
                                            geom, opt) /
                            ref);
  }
  return out;
}

}  // namespace spdc
