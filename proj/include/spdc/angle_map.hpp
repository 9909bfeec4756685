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

// Angle-resolved phase difference over the signal's free-space emission
// direction, flat-phase region search, and angular acceptance filtering.

#include <algorithm>
#include <cmath>
#include <exception>
#include <execution>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "spdc/errors.hpp"
#include "spdc/stack.hpp"
#include "spdc/state.hpp"

namespace spdc {

/// Snell refraction from vacuum into a medium of index n.
inline double internal_angle(double n, double theta_external) {
  if (!(n > 1.0)) throw DomainError("internal_angle: index must exceed 1");
  if (!(std::abs(theta_external) < std::numbers::pi / 2)) {
    throw DomainError("internal_angle: |external angle| must be below pi/2");
  }
  return std::asin(std::sin(theta_external) / n);
}

/// Square grid of samples over [-extent, +extent] on both axes. An odd sample
/// count places a sample exactly on the collinear direction.
struct AngularGrid {
  double azimuth_extent_rad = 2.0 * std::numbers::pi / 180.0;
  double polar_extent_rad = 2.0 * std::numbers::pi / 180.0;
  int samples = 201;

  void validate() const {
    auto ok = [](double e) { return e > 0.0 && e < std::numbers::pi / 2; };
    if (!ok(azimuth_extent_rad) || !ok(polar_extent_rad)) {
      throw DomainError("angular grid extents must lie in (0, pi/2)");
    }
    if (samples < 2) throw DomainError("angular grid needs at least 2 samples per axis");
  }

  static double coordinate(double extent, int i, int n) {
    return extent * static_cast<double>(2 * i - (n - 1)) / static_cast<double>(n - 1);
  }
  double azimuth(int i) const { return coordinate(azimuth_extent_rad, i, samples); }
  double polar(int j) const { return coordinate(polar_extent_rad, j, samples); }
  double azimuth_step() const { return 2.0 * azimuth_extent_rad / (samples - 1); }
  double polar_step() const { return 2.0 * polar_extent_rad / (samples - 1); }
  std::size_t size() const { return static_cast<std::size_t>(samples) * samples; }
};

/// Row-major over (polar j, azimuth i): values[j * samples + i].
struct PhaseMap {
  AngularGrid grid;
  std::vector<double> values;
  double center_value = 0.0;  // collinear phase difference

  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * grid.samples + i]; }
};

inline PhaseMap phase_map(const CrystalStack& stack, Wavelength signal, Wavelength idler, const AngularGrid& grid,
                          const MaterialCatalog& cat = default_catalog()) {
  grid.validate();
  const PhaseEvaluator eval(stack, signal, idler, cat);
  PhaseMap map;
  map.grid = grid;
  map.values.resize(grid.size());
  map.center_value = eval().rad;

  std::vector<std::size_t> idx(grid.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<std::exception_ptr> errors(grid.size());
  std::for_each(std::execution::par, idx.begin(), idx.end(), [&](std::size_t k) {
    const int i = static_cast<int>(k % grid.samples), j = static_cast<int>(k / grid.samples);
    try {
      map.values[k] = eval(EmissionAngles{grid.azimuth(i), grid.polar(j)}).rad;
    } catch (...) {
      errors[k] = std::current_exception();
    }
  });
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return map;
}

struct FlatRegion {
  double center_azimuth_rad = 0.0;
  double center_polar_rad = 0.0;
  int center_i = 0;
  int center_j = 0;
  double radius_rad = 0.0;
  double tolerance_rad = 0.0;
};

namespace detail {

struct GridOffset {
  int di, dj;
  double distance;
};

inline std::vector<GridOffset> sorted_offsets(const AngularGrid& g) {
  std::vector<GridOffset> out;
  const int n = g.samples;
  out.reserve(static_cast<std::size_t>(2 * n - 1) * (2 * n - 1));
  for (int dj = -(n - 1); dj <= n - 1; ++dj) {
    for (int di = -(n - 1); di <= n - 1; ++di) {
      out.push_back({di, dj, std::hypot(di * g.azimuth_step(), dj * g.polar_step())});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.distance < b.distance; });
  return out;
}

// In whole steps so it compares exactly against offset distances.
inline double boundary_distance(const AngularGrid& g, int i, int j) {
  const int n = g.samples - 1;
  return std::min(std::min(i, n - i) * g.azimuth_step(), std::min(j, n - j) * g.polar_step());
}

/// Largest closed-disc radius about (i, j) inside which every grid sample is
/// within tolerance of the center sample, capped by the distance to the grid edge.
/// Offsets beyond `stop_at` are not scanned.
inline double flat_radius(const PhaseMap& map, int i, int j, double tol, const std::vector<GridOffset>& offsets) {
  const auto& g = map.grid;
  const double edge = boundary_distance(g, i, j);
  const double ref = map.at(i, j);
  double last_distinct = 0.0;  // largest distance strictly below the current one
  double current = 0.0;
  for (const auto& o : offsets) {
    if (o.distance > edge) return edge;
    if (o.distance > current) {
      last_distinct = current;
      current = o.distance;
    }
    const int ii = i + o.di, jj = j + o.dj;
    if (ii < 0 || jj < 0 || ii >= g.samples || jj >= g.samples) continue;
    if (std::abs(map.at(ii, jj) - ref) > tol) return std::min(edge, last_distinct);
  }
  return edge;
}

}  // namespace detail

/// Radius of the flat disc centered on grid sample (i, j).
inline double flat_radius_at(const PhaseMap& map, int i, int j, double tolerance) {
  if (!(tolerance > 0.0)) throw DomainError("flat-region tolerance must be positive");
  return detail::flat_radius(map, i, j, tolerance, detail::sorted_offsets(map.grid));
}

/// Largest flat disc over all grid-sample centers. Ties go to the center
/// farther from the grid edge, then to the lower row-major index.
inline FlatRegion find_flat_region(const PhaseMap& map, double tolerance) {
  if (!(tolerance > 0.0)) throw DomainError("flat-region tolerance must be positive");
  const auto& g = map.grid;
  const auto offsets = detail::sorted_offsets(g);
  std::vector<std::size_t> order(g.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> edge(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    edge[k] = detail::boundary_distance(g, static_cast<int>(k % g.samples), static_cast<int>(k / g.samples));
  }
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return edge[a] > edge[b]; });

  FlatRegion best;
  best.tolerance_rad = tolerance;
  best.radius_rad = -1.0;
  for (auto k : order) {
    if (edge[k] <= best.radius_rad) break;
    const int i = static_cast<int>(k % g.samples), j = static_cast<int>(k / g.samples);
    const double r = detail::flat_radius(map, i, j, tolerance, offsets);
    if (r > best.radius_rad) {
      best.radius_rad = r;
      best.center_i = i;
      best.center_j = j;
    }
  }
  best.radius_rad = std::max(best.radius_rad, 0.0);
  best.center_azimuth_rad = g.azimuth(best.center_i);
  best.center_polar_rad = g.polar(best.center_j);
  return best;
}

/// Angular acceptance of the collection optics.
struct AcceptanceSpec {
  enum class Kind { full, aperture, fiber };
  Kind kind = Kind::full;
  double aperture_radius_rad = 0.0;
  double fiber_core_diameter_um = 62.5;
  double fiber_na = 0.22;
  double fiber_focal_mm = 4.5;
  double center_azimuth_rad = 0.0;
  double center_polar_rad = 0.0;

  void validate() const {
    if (kind == Kind::aperture && !(aperture_radius_rad > 0.0)) {
      throw DomainError("aperture radius must be positive");
    }
    if (kind == Kind::fiber) {
      if (!(fiber_na > 0.0 && fiber_na < 1.0)) throw DomainError("fiber NA must lie in (0, 1)");
      if (!(fiber_core_diameter_um > 0.0) || !(fiber_focal_mm > 0.0)) {
        throw DomainError("fiber core diameter and focal length must be positive");
      }
    }
  }

  /// External angular radius accepted; the fiber is bounded by both its NA
  /// cone and the field its core subtends behind the coupling lens.
  double angular_radius() const {
    switch (kind) {
      case Kind::full: return std::numeric_limits<double>::infinity();
      case Kind::aperture: return aperture_radius_rad;
      case Kind::fiber:
        return std::min(std::asin(fiber_na), 0.5 * fiber_core_diameter_um * 1e-3 / fiber_focal_mm);
    }
    return 0.0;
  }
};

inline std::string_view to_string(AcceptanceSpec::Kind k) {
  switch (k) {
    case AcceptanceSpec::Kind::full: return "full";
    case AcceptanceSpec::Kind::aperture: return "aperture";
    case AcceptanceSpec::Kind::fiber: return "fiber";
  }
  return "?";
}

/// Uniform weight inside the accepted disc, zero outside. Emission intensity
/// across angles is not modeled.
inline PhasorEnsemble acceptance_weights(const PhaseMap& map, const AcceptanceSpec& spec) {
  spec.validate();
  const auto& g = map.grid;
  const double r = spec.angular_radius();
  std::vector<PhasorSample> samples;
  samples.reserve(g.size());
  for (int j = 0; j < g.samples; ++j) {
    for (int i = 0; i < g.samples; ++i) {
      const double d = std::hypot(g.azimuth(i) - spec.center_azimuth_rad, g.polar(j) - spec.center_polar_rad);
      samples.push_back({map.at(i, j), d <= r ? 1.0 : 0.0});
    }
  }
  return PhasorEnsemble(std::move(samples));
}

}  // namespace spdc
