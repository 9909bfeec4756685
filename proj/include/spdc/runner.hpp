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

// Subcommand execution: each run writes its CSV artifacts and a plain-text
// report into the output directory. Output is a deterministic function of the
// configuration and the material data.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "spdc/angle_map.hpp"
#include "spdc/beam.hpp"
#include "spdc/compensator.hpp"
#include "spdc/config.hpp"
#include "spdc/quality.hpp"

#ifndef SPDC_VERSION
#define SPDC_VERSION "dev"
#endif

namespace spdc {

enum class Subcommand { index, compensate, phasemap, sweep, quality, brightness };

inline std::string_view to_string(Subcommand s) {
  switch (s) {
    case Subcommand::index: return "index";
    case Subcommand::compensate: return "compensate";
    case Subcommand::phasemap: return "phasemap";
    case Subcommand::sweep: return "sweep";
    case Subcommand::quality: return "quality";
    case Subcommand::brightness: return "brightness";
  }
  return "?";
}

struct RunReport {
  std::string text;
  std::vector<std::filesystem::path> artifacts;
};

/// Nine significant digits, shortest %g form.
inline std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

/// Comma-separated, one header row, LF line endings.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
      : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot write " + path.string());
    row_strings(header);
  }
  void row(std::initializer_list<double> values) {
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(fmt9(v));
    row_strings(cells);
  }
  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

namespace detail {

inline std::string deg(double rad) { return fmt9(rad / kDeg); }

inline void echo_inputs(std::ostream& os, const SourceConfig& cfg) {
  os << "config: " << cfg.origin << "\n";
  os << "wavelengths (assumed, not measured): pump " << fmt9(cfg.pump_nm) << " nm, signal " << fmt9(cfg.signal_nm)
     << " nm, idler " << fmt9(cfg.idler().nm()) << " nm\n";
  os << "stack:\n";
  for (const auto& e : cfg.stack.elements) {
    if (e.role == Role::waveplate) {
      os << "  " << e.name << "  waveplate  quartz " << fmt9(cfg.stack.hwp.quartz_mm) << " mm + MgF2 "
         << fmt9(cfg.stack.hwp.mgf2_mm) << " mm\n";
    } else {
      os << "  " << e.name << "  " << to_string(e.role) << "  " << to_string(e.material) << "  "
         << fmt9(e.length_mm) << " mm  axis " << to_string(e.orientation) << "  cut " << deg(e.cut_angle_rad)
         << " deg\n";
    }
  }
  if (cfg.compensator_solution) {
    os << "compensator: solved (auto) = " << fmt9(cfg.compensator_solution->length_mm) << " mm at signal "
       << fmt9(cfg.compensator_solution->center_wavelength_nm) << " nm\n";
  }
  os << "pump terms: " << (cfg.stack.include_pump_terms ? "included" : "neglected (narrowband pump)") << "\n";
}

inline void write_report(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

inline PhaseMap config_phase_map(const SourceConfig& cfg, const MaterialCatalog& cat) {
  return phase_map(cfg.stack, cfg.signal(), cfg.idler(), cfg.grid, cat);
}

/// Acceptance with `auto` aperture resolved to the flat region.
inline AcceptanceSpec resolved_acceptance(const SourceConfig& cfg, const FlatRegion& flat) {
  auto acc = cfg.acceptance;
  if (acc.kind == AcceptanceSpec::Kind::aperture) {
    if (cfg.aperture_auto) acc.aperture_radius_rad = flat.radius_rad;
    acc.center_azimuth_rad = flat.center_azimuth_rad;
    acc.center_polar_rad = flat.center_polar_rad;
  }
  if (acc.kind == AcceptanceSpec::Kind::aperture && !(acc.aperture_radius_rad > 0.0)) {
    throw DomainError("flat region has zero radius; no aperture can be placed");
  }
  return acc;
}

}  // namespace detail

inline RunReport run(Subcommand sub, const SourceConfig& cfg, const std::filesystem::path& out_dir,
                     const MaterialCatalog& cat = default_catalog()) {
  std::filesystem::create_directories(out_dir);
  RunReport report;
  std::ostringstream os;
  os << "spdc-design " << SPDC_VERSION << " / " << to_string(sub) << "\n";
  os << "materials: " << cat.version() << "\n";
  detail::echo_inputs(os, cfg);
  os << "\n";

  const auto pump = cfg.pump();
  const auto signal = cfg.signal();
  const auto idler = cfg.idler();

  switch (sub) {
    case Subcommand::index: {
      CsvWriter csv(out_dir / "index.csv", {"material", "axis", "wavelength_nm", "n"});
      for (auto m : kAllMaterials) {
        for (auto a : {Axis::ordinary, Axis::extraordinary}) {
          for (auto l : {pump, signal, idler}) {
            csv.row_strings({std::string(to_string(m)), std::string(to_string(a)), fmt9(l.nm()),
                             fmt9(refractive_index(m, a, l, cat))});
          }
        }
      }
      report.artifacts.push_back(csv.path());
      const double cut = phase_matching_angle(MaterialId::BBO, pump, signal, cat);
      os << "BBO type-I phase-matching angle: " << detail::deg(cut) << " deg\n";
      os << "BBO pump walk-off at that angle: " << fmt9(walkoff_angle(MaterialId::BBO, cut, pump, cat) * 1e3)
         << " mrad\n";
      os << "waveplate retardance: " << fmt9(cfg.stack.hwp.retardance_waves(signal, cat)) << " waves (signal), "
         << fmt9(cfg.stack.hwp.retardance_waves(idler, cat)) << " waves (idler)\n";
      for (auto m : kAllMaterials) {
        for (auto a : {Axis::ordinary, Axis::extraordinary}) {
          os << "  " << to_string(m) << " " << to_string(a) << ": " << cat.model(m, a).citation << "\n";
        }
      }
      break;
    }
    case Subcommand::compensate: {
      const auto center = cfg.compensate_center();
      const auto fit = fit_linear_law(cfg.stack, cfg.compensate.bbo_lengths_mm, pump, center,
                                      cfg.compensate.bracket_mm, cat);
      CsvWriter csv(out_dir / "compensate.csv",
                    {"bbo_mm", "yvo_mm", "residual_rad_per_nm", "curvature_rad_per_nm2"});
      for (std::size_t i = 0; i < fit.bbo_mm.size(); ++i) {
        csv.row({fit.bbo_mm[i], fit.solutions[i].length_mm, fit.solutions[i].residual_derivative,
                 fit.solutions[i].second_derivative});
      }
      report.artifacts.push_back(csv.path());

      // Phase difference vs signal wavelength with and without the configured compensator.
      const auto bare = cfg.stack.with_compensator_length(0.0);
      const double ref_bare = phase_at_signal(bare, pump, center.nm(), cat);
      const double ref_comp = phase_at_signal(cfg.stack, pump, center.nm(), cat);
      CsvWriter curve(out_dir / "compensate_curve.csv",
                      {"signal_nm", "dphi_uncompensated_rad", "dphi_compensated_rad"});
      const int n = static_cast<int>(std::floor(cfg.compensate.curve_half_span_nm / cfg.compensate.curve_step_nm));
      for (int k = -n; k <= n; ++k) {
        const double l = center.nm() + k * cfg.compensate.curve_step_nm;
        curve.row({l, phase_at_signal(bare, pump, l, cat) - ref_bare, phase_at_signal(cfg.stack, pump, l, cat) - ref_comp});
      }
      report.artifacts.push_back(curve.path());

      os << "derivative nulled at signal " << fmt9(center.nm()) << " nm"
         << (cfg.compensate.center_nm ? "" : " (default: configured signal wavelength)") << "\n";
      os << "bbo_mm  yvo_mm  residual_rad_per_nm\n";
      for (std::size_t i = 0; i < fit.bbo_mm.size(); ++i) {
        os << "  " << fmt9(fit.bbo_mm[i]) << "  " << fmt9(fit.solutions[i].length_mm) << "  "
           << fmt9(fit.solutions[i].residual_derivative) << "\n";
      }
      os << "linear law: yvo_mm = " << fmt9(fit.slope) << " * bbo_mm + " << fmt9(fit.intercept_mm)
         << "  (r^2 = " << fmt9(fit.r_squared) << ")\n";
      os << "slope " << fmt9(fit.slope) << "\n";
      os << "intercept_mm " << fmt9(fit.intercept_mm) << "\n";
      os << "configured stack: d(dphi)/d(lambda) = " << fmt9(dphase_dlambda(cfg.stack, pump, center, cat))
         << " rad/nm (uncompensated " << fmt9(dphase_dlambda(bare, pump, center, cat)) << " rad/nm)\n";
      break;
    }
    case Subcommand::phasemap: {
      const auto map = detail::config_phase_map(cfg, cat);
      const auto flat = find_flat_region(map, cfg.flat_tolerance_rad);
      CsvWriter csv(out_dir / "phasemap.csv", {"azimuth_deg", "polar_deg", "dphi_rad"});
      for (int j = 0; j < map.grid.samples; ++j) {
        for (int i = 0; i < map.grid.samples; ++i) {
          csv.row({map.grid.azimuth(i) / kDeg, map.grid.polar(j) / kDeg, map.at(i, j)});
        }
      }
      report.artifacts.push_back(csv.path());
      std::ostringstream side;
      side << "center_dphi_rad = " << fmt9(map.center_value) << "\n";
      side << "flat_center_azimuth_deg = " << detail::deg(flat.center_azimuth_rad) << "\n";
      side << "flat_center_polar_deg = " << detail::deg(flat.center_polar_rad) << "\n";
      side << "flat_radius_deg = " << detail::deg(flat.radius_rad) << "\n";
      side << "flat_tolerance_rad = " << fmt9(flat.tolerance_rad) << "\n";
      detail::write_report(out_dir / "phasemap_summary.txt", side.str());
      report.artifacts.push_back(out_dir / "phasemap_summary.txt");
      os << "grid: " << map.grid.samples << " x " << map.grid.samples << " over +/-"
         << detail::deg(map.grid.azimuth_extent_rad) << " deg azimuth, +/-" << detail::deg(map.grid.polar_extent_rad)
         << " deg polar\n";
      os << side.str();
      break;
    }
    case Subcommand::sweep:
    case Subcommand::quality: {
      const auto map = detail::config_phase_map(cfg, cat);
      const auto flat = find_flat_region(map, cfg.flat_tolerance_rad);
      const auto acc = detail::resolved_acceptance(cfg, flat);
      const auto spectral = spectral_ensemble(cfg.stack, pump, signal, cfg.spectral, cat);
      const auto q = evaluate_quality(map, acc, spectral, cfg.target, sweep_angles(cfg.sweep_step_deg));
      if (sub == Subcommand::sweep) {
        CsvWriter csv(out_dir / "sweep.csv", {"angle_deg", "rate"});
        for (std::size_t k = 0; k < q.sweep.rates.size(); ++k) {
          csv.row({q.sweep.angles_rad[k] / kDeg, q.sweep.rates[k]});
        }
        report.artifacts.push_back(csv.path());
      }
      os << "acceptance: " << to_string(acc.kind);
      if (acc.kind != AcceptanceSpec::Kind::full) os << ", radius " << detail::deg(acc.angular_radius()) << " deg";
      if (acc.kind == AcceptanceSpec::Kind::aperture) {
        os << " about (" << detail::deg(acc.center_azimuth_rad) << ", " << detail::deg(acc.center_polar_rad)
           << ") deg" << (cfg.aperture_auto ? " [flat region]" : "");
      }
      os << ", " << q.accepted_directions << " directions\n";
      os << "spectrum: FWHM " << fmt9(cfg.spectral.fwhm_nm) << " nm, " << spectral.size() << " samples\n";
      os << "target: " << to_string(cfg.target) << ", dialing offset " << fmt9(q.dialing_offset_rad) << " rad\n";
      os << "kappa = " << fmt9(std::abs(q.kappa)) << " (arg " << fmt9(std::arg(q.kappa)) << " rad)\n";
      os << "V = " << fmt9(q.visibility) << "\n";
      os << "fidelity = " << fmt9(q.fidelity) << "\n";
      if (sub == Subcommand::quality && cfg.rates.coincidence_rate) {
        os << "generation rate = "
           << fmt9(infer_generation_rate(*cfg.rates.coincidence_rate, cfg.rates.eta_signal, cfg.rates.eta_idler))
           << " pairs/s/mW\n";
      }
      break;
    }
    case Subcommand::brightness: {
      const auto& bbo = cfg.stack.elements[cfg.stack.birth_index(Birth::first)];
      OverlapGeometry geom;
      geom.crystal_length_mm = cfg.beam.crystal_length_mm.value_or(bbo.length_mm);
      geom.walkoff_angle_rad = cfg.beam.walkoff_rad.value_or(walkoff_angle(bbo.material, bbo.cut_angle_rad, pump, cat));
      const CollectionMode coll{cfg.beam.collection_waist_um, signal.nm()};
      std::vector<double> orient;
      for (double d : cfg.beam.orientations_deg) orient.push_back(d * kDeg);
      const auto scan = orientation_scan(cfg.beam.aspect_ratio, cfg.beam.pump_major_um, orient, coll, geom,
                                         cfg.beam.options);
      const double ref = relative_brightness(GaussianBeam::elliptical(1.0, cfg.beam.pump_major_um, 0.0), coll, geom,
                                             cfg.beam.options);
      CsvWriter csv(out_dir / "brightness.csv", {"orientation_deg", "relative_brightness"});
      for (const auto& [o, r] : scan) csv.row({o / kDeg, r});
      report.artifacts.push_back(csv.path());
      os << "overlap model: " << to_string(cfg.beam.options.overlap) << ", " << cfg.beam.options.z_slices
         << " z-slices\n";
      os << "crystal " << fmt9(geom.crystal_length_mm) << " mm, walk-off " << fmt9(geom.walkoff_angle_rad * 1e3)
         << " mrad (exit displacement " << fmt9(walkoff_displacement(geom.walkoff_angle_rad, geom.crystal_length_mm))
         << " um)\n";
      os << "pump: " << fmt9(cfg.beam.pump_major_um) << " um major, aspect " << fmt9(cfg.beam.aspect_ratio)
         << "; collection waist " << fmt9(cfg.beam.collection_waist_um) << " um\n";
      os << "circular reference brightness = " << fmt9(ref) << " (arbitrary units)\n";
      for (const auto& [o, r] : scan) os << "  orientation " << fmt9(o / kDeg) << " deg: " << fmt9(r) << "\n";
      break;
    }
  }
  report.text = os.str();
  const auto report_path = out_dir / (std::string(to_string(sub)) + "_report.txt");
  detail::write_report(report_path, report.text);
  report.artifacts.push_back(report_path);
  return report;
}

}  // namespace spdc
