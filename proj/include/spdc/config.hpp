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

// Source configuration: flat "key = value" text with dotted sections. Every
// key is optional; an empty file yields the documented defaults (the 6 mm
// parallel-crystal source at 405 -> 760 + 867.2 nm).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "spdc/angle_map.hpp"
#include "spdc/beam.hpp"
#include "spdc/compensator.hpp"
#include "spdc/keyvalue.hpp"
#include "spdc/quality.hpp"
#include "spdc/stack.hpp"

namespace spdc {

inline constexpr double kDeg = std::numbers::pi / 180.0;

// Waveplate layers: quartz calibrated so the plate alone needs 0.52 mm of
// YVO4 compensation, MgF2 then set for a half wave at 810 nm.
inline constexpr double kDefaultHwpQuartzMm = 1.181;
inline constexpr double kDefaultHwpMgf2Mm = 0.864;

struct CompensateSettings {
  std::vector<double> bbo_lengths_mm{4.0, 5.0, 6.0, 7.0};
  std::pair<double, double> bracket_mm{0.0, 10.0};
  std::optional<double> center_nm;  // default: the signal wavelength
  double curve_half_span_nm = 10.0;
  double curve_step_nm = 0.5;
};

struct BeamSettings {
  double pump_major_um = 100.0;
  double aspect_ratio = 2.0;
  std::vector<double> orientations_deg{0.0, 45.0, 90.0};
  double collection_waist_um = 45.0;
  std::optional<double> crystal_length_mm;  // default: first downconverter length
  std::optional<double> walkoff_rad;        // default: pump walk-off at the cut angle
  OverlapOptions options;
};

struct RateSettings {
  std::optional<double> coincidence_rate;  // pairs/s/mW
  double eta_signal = 1.0;
  double eta_idler = 1.0;
};

struct SourceConfig {
  double pump_nm = 405.0;
  double signal_nm = 760.0;
  CrystalStack stack;
  bool compensator_auto = false;
  std::optional<CompensatorSolution> compensator_solution;
  double hwp_design_nm = 810.0;
  double hwp_tolerance_waves = 0.1;
  AcceptanceSpec acceptance;
  bool aperture_auto = false;  // aperture = flat region, centered on it
  SpectralSpec spectral;
  AngularGrid grid;
  double flat_tolerance_rad = std::numbers::pi / 10.0;
  BellTarget target = BellTarget::phi_minus;
  double sweep_step_deg = 1.0;
  BeamSettings beam;
  CompensateSettings compensate;
  RateSettings rates;
  std::string origin = "<defaults>";

  Wavelength pump() const { return Wavelength(pump_nm); }
  Wavelength signal() const { return Wavelength(signal_nm); }
  Wavelength idler() const { return idler_wavelength(pump(), signal()); }
  Wavelength compensate_center() const { return Wavelength(compensate.center_nm.value_or(signal_nm)); }
};

namespace detail {

struct ElementDefaults {
  MaterialId material;
  AxisOrientation orientation;
};

inline Role parse_role(const KeyValueFile& kv, const std::string& key, const std::string& v) {
  if (v == "downconverter") return Role::downconverter;
  if (v == "waveplate") return Role::waveplate;
  if (v == "compensator") return Role::compensator;
  kv.fail(kv.line_of(key), "key '" + key + "': unknown role '" + v + "' (downconverter, waveplate, compensator)");
}

inline AxisOrientation parse_orientation(const KeyValueFile& kv, const std::string& key, const std::string& v) {
  if (v == "parallel") return AxisOrientation::parallel_to_bbo;
  if (v == "rotated_90") return AxisOrientation::rotated_90;
  kv.fail(kv.line_of(key), "key '" + key + "': unknown axis '" + v + "' (parallel, rotated_90)");
}

/// Reads a number or the literal "auto".
inline std::optional<double> number_or_auto(const KeyValueFile& kv, const std::string& key, bool& is_auto) {
  is_auto = false;
  auto s = kv.get_string(key);
  if (!s) return std::nullopt;
  if (*s == "auto") {
    is_auto = true;
    return std::nullopt;
  }
  return kv.get_double(key);
}

}  // namespace detail

/// Parses and validates a configuration. `auto` compensator lengths are
/// solved here so every consumer sees the resolved stack.
inline SourceConfig parse_config_file(const KeyValueFile& kv, const MaterialCatalog& cat = default_catalog()) {
  SourceConfig cfg;
  cfg.origin = kv.origin();
  std::set<std::string> known;
  auto key = [&](const std::string& k) -> const std::string& { return *known.insert(k).first; };
  auto positive = [&](const std::string& k, double v) {
    if (!(v > 0.0)) kv.fail(kv.line_of(k), "key '" + k + "' must be positive");
    return v;
  };

  if (auto v = kv.get_double(key("source.pump_nm"))) cfg.pump_nm = positive("source.pump_nm", *v);
  if (auto v = kv.get_double(key("source.signal_nm"))) cfg.signal_nm = positive("source.signal_nm", *v);
  if (!(cfg.signal_nm > cfg.pump_nm)) {
    kv.fail(kv.line_of("source.signal_nm"), "signal wavelength (" + std::to_string(cfg.signal_nm) +
                                                " nm) must exceed pump wavelength (" + std::to_string(cfg.pump_nm) +
                                                " nm)");
  }
  if (auto v = kv.get_string(key("source.target"))) {
    if (*v == "phi_minus") {
      cfg.target = BellTarget::phi_minus;
    } else if (*v == "phi_plus") {
      cfg.target = BellTarget::phi_plus;
    } else {
      kv.fail(kv.line_of("source.target"), "source.target must be phi_minus or phi_plus");
    }
  }

  // Stack.
  std::vector<std::string> names{"bbo1", "hwp", "bbo2", "yvo"};
  if (auto v = kv.get_strings(key("stack.elements"))) names = *v;
  const double pm_cut = [&] {
    try {
      return phase_matching_angle(MaterialId::BBO, cfg.pump(), cfg.signal(), cat);
    } catch (const Error& e) {
      kv.fail(kv.line_of("source.signal_nm"), e.what());
    }
  }();
  const std::vector<StackElement> fig_defaults = {
      {"bbo1", Role::downconverter, MaterialId::BBO, 6.0, AxisOrientation::parallel_to_bbo, pm_cut},
      {"hwp", Role::waveplate, MaterialId::Quartz, 0.0, AxisOrientation::parallel_to_bbo, 0.0},
      {"bbo2", Role::downconverter, MaterialId::BBO, 6.0, AxisOrientation::parallel_to_bbo, pm_cut},
      {"yvo", Role::compensator, MaterialId::YVO4, 3.6, AxisOrientation::rotated_90, std::numbers::pi / 2}};
  std::optional<std::size_t> auto_index;
  for (const auto& name : names) {
    const std::string base = "stack." + name;
    StackElement e{name};
    bool have_default = false;
    for (const auto& d : fig_defaults) {
      if (d.name == name) {
        e = d;
        have_default = true;
      }
    }
    if (auto v = kv.get_string(key(base + ".role"))) {
      e.role = detail::parse_role(kv, base + ".role", *v);
    } else if (!have_default) {
      kv.fail(kv.line_of("stack.elements"), "element '" + name + "' needs " + base + ".role");
    }
    if (!have_default || kv.has(base + ".role")) {
      // Role-dependent defaults for custom elements.
      e.material = e.role == Role::compensator ? MaterialId::YVO4 : MaterialId::BBO;
      e.orientation = e.role == Role::compensator ? AxisOrientation::rotated_90 : AxisOrientation::parallel_to_bbo;
      e.cut_angle_rad = e.role == Role::compensator ? std::numbers::pi / 2 : pm_cut;
      if (!have_default && e.role != Role::waveplate && !kv.has(base + ".length_mm")) {
        kv.fail(kv.line_of(base + ".role"), "element '" + name + "' needs " + base + ".length_mm");
      }
    }
    if (auto v = kv.get_string(key(base + ".material"))) {
      try {
        e.material = parse_material(*v);
      } catch (const DomainError& err) {
        kv.fail(kv.line_of(base + ".material"), "key '" + base + ".material': " + err.what());
      }
    }
    if (auto v = kv.get_string(key(base + ".axis"))) e.orientation = detail::parse_orientation(kv, base + ".axis", *v);
    bool is_auto = false;
    if (auto v = detail::number_or_auto(kv, key(base + ".cut_deg"), is_auto)) {
      if (!(*v >= 0.0 && *v <= 180.0)) kv.fail(kv.line_of(base + ".cut_deg"), "cut angle must lie in [0, 180] deg");
      e.cut_angle_rad = *v * kDeg;
    } else if (is_auto) {
      e.cut_angle_rad = pm_cut;
    }
    if (auto v = detail::number_or_auto(kv, key(base + ".length_mm"), is_auto)) {
      if (!(*v >= 0.0)) kv.fail(kv.line_of(base + ".length_mm"), "length must be >= 0");
      e.length_mm = *v;
    } else if (is_auto) {
      if (e.role != Role::compensator) {
        kv.fail(kv.line_of(base + ".length_mm"), "only the compensator length may be 'auto'");
      }
      auto_index = cfg.stack.elements.size();
    }
    cfg.stack.elements.push_back(e);
  }
  cfg.stack.hwp = {kDefaultHwpQuartzMm, kDefaultHwpMgf2Mm};
  if (auto v = kv.get_double(key("stack.hwp.quartz_mm"))) cfg.stack.hwp.quartz_mm = *v;
  if (auto v = kv.get_double(key("stack.hwp.mgf2_mm"))) cfg.stack.hwp.mgf2_mm = *v;
  if (auto v = kv.get_double(key("stack.hwp.design_nm"))) cfg.hwp_design_nm = positive("stack.hwp.design_nm", *v);
  if (auto v = kv.get_double(key("stack.hwp.tolerance_waves"))) {
    cfg.hwp_tolerance_waves = positive("stack.hwp.tolerance_waves", *v);
  }
  if (auto v = kv.get_bool(key("stack.include_pump_terms"))) cfg.stack.include_pump_terms = *v;
  try {
    cfg.stack.validate();
  } catch (const DomainError& e) {
    kv.fail(kv.line_of("stack.elements"), std::string("invalid stack: ") + e.what());
  }
  {
    const int hwp_line = std::max({kv.line_of("stack.hwp.quartz_mm"), kv.line_of("stack.hwp.mgf2_mm"),
                                   kv.line_of("stack.hwp.design_nm"), kv.line_of("stack.hwp.tolerance_waves")});
    try {
      // A quartz layer alone gets the MgF2 layer for a half wave at the design wavelength.
      if (kv.has("stack.hwp.quartz_mm") && !kv.has("stack.hwp.mgf2_mm")) {
        cfg.stack.hwp = HwpModel::half_wave(cfg.stack.hwp.quartz_mm, Wavelength(cfg.hwp_design_nm), cat);
      }
      cfg.stack.hwp.validate_half_wave({cfg.signal(), cfg.idler()}, cfg.hwp_tolerance_waves, cat);
    } catch (const Error& e) {
      kv.fail(hwp_line, e.what());
    }
  }

  // Compensator study.
  if (auto v = kv.get_doubles(key("compensate.bbo_lengths_mm"))) cfg.compensate.bbo_lengths_mm = *v;
  if (auto v = kv.get_doubles(key("compensate.bracket_mm"))) {
    if (v->size() != 2 || !((*v)[0] < (*v)[1])) kv.fail(kv.line_of("compensate.bracket_mm"), "bracket_mm = lo, hi");
    cfg.compensate.bracket_mm = {(*v)[0], (*v)[1]};
  }
  if (auto v = kv.get_double(key("compensate.center_nm"))) cfg.compensate.center_nm = positive("compensate.center_nm", *v);
  if (auto v = kv.get_double(key("compensate.curve_half_span_nm"))) {
    cfg.compensate.curve_half_span_nm = positive("compensate.curve_half_span_nm", *v);
  }
  if (auto v = kv.get_double(key("compensate.curve_step_nm"))) {
    cfg.compensate.curve_step_nm = positive("compensate.curve_step_nm", *v);
  }

  if (auto_index) {
    cfg.compensator_auto = true;
    cfg.compensator_solution = optimal_compensator_length(cfg.stack, cfg.pump(), cfg.compensate_center(),
                                                          cfg.compensate.bracket_mm, cat);
    cfg.stack.elements[*auto_index].length_mm = cfg.compensator_solution->length_mm;
  }

  // Angular grid and flat region.
  if (auto v = kv.get_double(key("grid.extent_deg"))) {
    cfg.grid.azimuth_extent_rad = cfg.grid.polar_extent_rad = positive("grid.extent_deg", *v) * kDeg;
  }
  if (auto v = kv.get_double(key("grid.azimuth_extent_deg"))) {
    cfg.grid.azimuth_extent_rad = positive("grid.azimuth_extent_deg", *v) * kDeg;
  }
  if (auto v = kv.get_double(key("grid.polar_extent_deg"))) {
    cfg.grid.polar_extent_rad = positive("grid.polar_extent_deg", *v) * kDeg;
  }
  if (auto v = kv.get_int(key("grid.samples"))) cfg.grid.samples = static_cast<int>(*v);
  try {
    cfg.grid.validate();
  } catch (const DomainError& e) {
    kv.fail(kv.line_of("grid.samples"), e.what());
  }
  if (auto v = kv.get_double(key("flat.tolerance_rad"))) cfg.flat_tolerance_rad = positive("flat.tolerance_rad", *v);

  // Acceptance.
  if (auto v = kv.get_string(key("acceptance.kind"))) {
    if (*v == "full") {
      cfg.acceptance.kind = AcceptanceSpec::Kind::full;
    } else if (*v == "aperture") {
      cfg.acceptance.kind = AcceptanceSpec::Kind::aperture;
    } else if (*v == "fiber") {
      cfg.acceptance.kind = AcceptanceSpec::Kind::fiber;
    } else {
      kv.fail(kv.line_of("acceptance.kind"), "acceptance.kind must be full, aperture or fiber");
    }
  } else {
    cfg.acceptance.kind = AcceptanceSpec::Kind::aperture;
  }
  {
    bool is_auto = false;
    if (auto v = detail::number_or_auto(kv, key("acceptance.aperture_deg"), is_auto)) {
      cfg.acceptance.aperture_radius_rad = positive("acceptance.aperture_deg", *v) * kDeg;
    } else {
      cfg.aperture_auto = cfg.acceptance.kind == AcceptanceSpec::Kind::aperture;
    }
  }
  if (auto v = kv.get_double(key("acceptance.fiber.core_um"))) {
    cfg.acceptance.fiber_core_diameter_um = positive("acceptance.fiber.core_um", *v);
  }
  if (auto v = kv.get_double(key("acceptance.fiber.na"))) cfg.acceptance.fiber_na = *v;
  if (auto v = kv.get_double(key("acceptance.fiber.focal_mm"))) {
    cfg.acceptance.fiber_focal_mm = positive("acceptance.fiber.focal_mm", *v);
  }
  if (!cfg.aperture_auto) {
    try {
      cfg.acceptance.validate();
    } catch (const DomainError& e) {
      kv.fail(kv.line_of("acceptance.kind"), e.what());
    }
  }

  // Spectrum and sweep.
  if (auto v = kv.get_double(key("spectrum.fwhm_nm"))) cfg.spectral.fwhm_nm = *v;
  if (auto v = kv.get_int(key("spectrum.samples"))) cfg.spectral.samples = static_cast<int>(*v);
  if (auto v = kv.get_double(key("spectrum.span_fwhm"))) cfg.spectral.span_fwhm = *v;
  try {
    cfg.spectral.validate();
  } catch (const DomainError& e) {
    kv.fail(kv.line_of("spectrum.fwhm_nm"), e.what());
  }
  if (auto v = kv.get_double(key("sweep.step_deg"))) cfg.sweep_step_deg = positive("sweep.step_deg", *v);

  // Beam overlap.
  if (auto v = kv.get_double(key("beam.pump_major_um"))) cfg.beam.pump_major_um = positive("beam.pump_major_um", *v);
  if (auto v = kv.get_double(key("beam.aspect_ratio"))) {
    if (!(*v >= 1.0)) kv.fail(kv.line_of("beam.aspect_ratio"), "beam.aspect_ratio must be >= 1");
    cfg.beam.aspect_ratio = *v;
  }
  if (auto v = kv.get_doubles(key("beam.orientations_deg"))) cfg.beam.orientations_deg = *v;
  if (auto v = kv.get_double(key("beam.collection_um"))) {
    cfg.beam.collection_waist_um = positive("beam.collection_um", *v);
  }
  if (auto v = kv.get_double(key("beam.crystal_length_mm"))) {
    cfg.beam.crystal_length_mm = positive("beam.crystal_length_mm", *v);
  }
  if (auto v = kv.get_double(key("beam.walkoff_mrad"))) cfg.beam.walkoff_rad = *v * 1e-3;
  if (auto v = kv.get_int(key("beam.z_slices"))) {
    if (*v < 3 || *v % 2 == 0) kv.fail(kv.line_of("beam.z_slices"), "beam.z_slices must be odd and >= 3");
    cfg.beam.options.z_slices = static_cast<int>(*v);
  }
  if (auto v = kv.get_string(key("beam.overlap"))) {
    if (*v == "single_mode") {
      cfg.beam.options.overlap = CollectionOverlap::single_mode;
    } else if (*v == "pair") {
      cfg.beam.options.overlap = CollectionOverlap::pair;
    } else {
      kv.fail(kv.line_of("beam.overlap"), "beam.overlap must be single_mode or pair");
    }
  }

  // Measured rates.
  if (auto v = kv.get_double(key("rates.coincidence_per_s_mw"))) cfg.rates.coincidence_rate = *v;
  if (auto v = kv.get_double(key("rates.eta_signal"))) cfg.rates.eta_signal = *v;
  if (auto v = kv.get_double(key("rates.eta_idler"))) cfg.rates.eta_idler = *v;

  // Per-element keys for names listed in stack.elements are registered above;
  // anything else is a schema violation.
  kv.reject_unknown(known);
  return cfg;
}

inline SourceConfig parse_config_text(std::string_view text, const std::string& origin = "<text>",
                                      const MaterialCatalog& cat = default_catalog()) {
  return parse_config_file(KeyValueFile::parse(text, origin), cat);
}

inline SourceConfig parse_config(const std::string& path, const MaterialCatalog& cat = default_catalog()) {
  return parse_config_file(KeyValueFile::load(path), cat);
}

}  // namespace spdc
