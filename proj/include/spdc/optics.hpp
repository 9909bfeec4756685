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

// Uniaxial dispersion: principal indices from Sellmeier-type fits, the
// extraordinary index along an arbitrary direction, Poynting walk-off, and
// energy-conservation wavelength arithmetic. All wavelengths are vacuum
// wavelengths.

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "spdc/errors.hpp"
#include "spdc/keyvalue.hpp"
#include "spdc/materials_data.hpp"

namespace spdc {

enum class MaterialId { BBO, YVO4, Quartz, MgF2 };
enum class Axis { ordinary, extraordinary };

inline constexpr std::array<MaterialId, 4> kAllMaterials{MaterialId::BBO, MaterialId::YVO4,
                                                         MaterialId::Quartz, MaterialId::MgF2};

inline std::string_view to_string(MaterialId m) {
  switch (m) {
    case MaterialId::BBO: return "BBO";
    case MaterialId::YVO4: return "YVO4";
    case MaterialId::Quartz: return "Quartz";
    case MaterialId::MgF2: return "MgF2";
  }
  return "?";
}

inline std::string_view to_string(Axis a) {
  return a == Axis::ordinary ? "ordinary" : "extraordinary";
}

inline Axis other(Axis a) { return a == Axis::ordinary ? Axis::extraordinary : Axis::ordinary; }

/// Throws DomainError for names outside the registered set.
inline MaterialId parse_material(std::string_view name) {
  for (auto m : kAllMaterials) {
    if (to_string(m) == name) return m;
  }
  throw DomainError("unknown material '" + std::string(name) + "' (known: BBO, YVO4, Quartz, MgF2)");
}

/// Vacuum wavelength, stored in nanometres.
class Wavelength {
 public:
  explicit Wavelength(double nm) : nm_(nm) {
    if (!(nm > 0.0) || !std::isfinite(nm)) {
      throw DomainError("wavelength must be positive and finite, got " + std::to_string(nm) + " nm");
    }
  }
  double nm() const { return nm_; }
  double um() const { return nm_ * 1e-3; }
  friend bool operator==(Wavelength a, Wavelength b) { return a.nm_ == b.nm_; }
  friend auto operator<=>(Wavelength a, Wavelength b) { return a.nm_ <=> b.nm_; }

 private:
  double nm_;
};

enum class SellmeierForm {
  rational_ir,  // n^2 = A + B/(L^2 - C) - D L^2
  sellmeier,    // n^2 = A + sum B_k L^2/(L^2 - C_k)
};

struct SellmeierModel {
  SellmeierForm form = SellmeierForm::sellmeier;
  std::vector<double> coefficients;
  double range_min_nm = 0.0;
  double range_max_nm = 0.0;
  std::string citation;

  bool in_range(double nm) const { return nm >= range_min_nm && nm <= range_max_nm; }

  /// Squared index with no range check; L in micrometres.
  double index_squared_unchecked(double um) const {
    const double l2 = um * um;
    const auto& c = coefficients;
    switch (form) {
      case SellmeierForm::rational_ir:
        return c[0] + c[1] / (l2 - c[2]) - c[3] * l2;
      case SellmeierForm::sellmeier: {
        double n2 = c[0];
        for (std::size_t k = 1; k + 1 < c.size(); k += 2) n2 += c[k] * l2 / (l2 - c[k + 1]);
        return n2;
      }
    }
    return 0.0;
  }
};

/// Registered dispersion models for every (material, axis) pair.
class MaterialCatalog {
 public:
  static MaterialCatalog from_text(std::string_view text, std::string origin = "<materials>") {
    return from_file(KeyValueFile::parse(text, std::move(origin)));
  }

  static MaterialCatalog load(const std::string& path) {
    return from_file(KeyValueFile::load(path));
  }

  const std::string& version() const { return version_; }

  const SellmeierModel& model(MaterialId m, Axis a) const {
    return models_[static_cast<std::size_t>(m) * 2 + (a == Axis::ordinary ? 0 : 1)];
  }

  /// Principal index; throws RangeError outside the model's validity range.
  double index(MaterialId m, Axis a, Wavelength lambda) const {
    const auto& sm = model(m, a);
    if (!sm.in_range(lambda.nm())) {
      throw RangeError(std::string(to_string(m)) + " (" + std::string(to_string(a)) +
                       "): wavelength " + fmt_nm(lambda.nm()) + " nm outside validity range [" +
                       fmt_nm(sm.range_min_nm) + ", " + fmt_nm(sm.range_max_nm) + "] nm");
    }
    return std::sqrt(sm.index_squared_unchecked(lambda.um()));
  }

 private:
  static std::string fmt_nm(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
  }

  static MaterialCatalog from_file(const KeyValueFile& kv) {
    MaterialCatalog cat;
    cat.version_ = kv.get_string("version").value_or("unversioned");
    std::set<std::string> known{"version"};
    for (auto m : kAllMaterials) {
      for (auto a : {Axis::ordinary, Axis::extraordinary}) {
        const std::string base = std::string(to_string(m)) + "." + std::string(to_string(a));
        for (const char* field : {".form", ".coefficients", ".range_nm", ".citation"}) {
          known.insert(base + field);
        }
        auto& sm = cat.models_[static_cast<std::size_t>(m) * 2 + (a == Axis::ordinary ? 0 : 1)];
        auto form = kv.get_string(base + ".form");
        if (!form) kv.fail(0, "missing dispersion model '" + base + "'");
        if (*form == "rational_ir") {
          sm.form = SellmeierForm::rational_ir;
        } else if (*form == "sellmeier") {
          sm.form = SellmeierForm::sellmeier;
        } else {
          kv.fail(kv.line_of(base + ".form"), "unknown form '" + *form + "'");
        }
        auto coeffs = kv.get_doubles(base + ".coefficients");
        if (!coeffs) kv.fail(kv.line_of(base + ".form"), "'" + base + "' has no coefficients");
        const bool ok_count = sm.form == SellmeierForm::rational_ir
                                  ? coeffs->size() == 4
                                  : coeffs->size() >= 3 && coeffs->size() % 2 == 1;
        if (!ok_count) {
          kv.fail(kv.line_of(base + ".coefficients"), "wrong coefficient count for form '" + *form + "'");
        }
        sm.coefficients = *coeffs;
        auto range = kv.get_doubles(base + ".range_nm");
        if (!range || range->size() != 2 || !((*range)[0] > 0.0) || !((*range)[0] < (*range)[1])) {
          kv.fail(kv.line_of(base + ".range_nm"), "'" + base + "' needs range_nm = min, max");
        }
        sm.range_min_nm = (*range)[0];
        sm.range_max_nm = (*range)[1];
        sm.citation = kv.get_string(base + ".citation").value_or("");
        if (sm.citation.empty()) kv.fail(kv.line_of(base + ".form"), "'" + base + "' has no citation");
      }
    }
    kv.reject_unknown(known);
    return cat;
  }

  std::string version_;
  std::array<SellmeierModel, 8> models_;
};

inline const MaterialCatalog& default_catalog() {
  static const MaterialCatalog cat =
      MaterialCatalog::from_text(kDefaultMaterialsText, "<built-in materials>");
  return cat;
}

inline double refractive_index(MaterialId m, Axis a, Wavelength lambda,
                               const MaterialCatalog& cat = default_catalog()) {
  return cat.index(m, a, lambda);
}

/// Index ellipsoid for a wave whose direction makes angle acos(cos_theta) with the optic axis.
inline double index_from_cos(double n_o, double n_e, double cos_theta) {
  const double c2 = cos_theta * cos_theta;
  return 1.0 / std::sqrt(c2 / (n_o * n_o) + (1.0 - c2) / (n_e * n_e));
}

inline void check_polar_angle(double theta) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
    throw DomainError("angle to optic axis must lie in [0, pi], got " + std::to_string(theta));
  }
}

inline double extraordinary_index_at_angle(MaterialId m, double theta, Wavelength lambda,
                                           const MaterialCatalog& cat = default_catalog()) {
  check_polar_angle(theta);
  const double n_o = cat.index(m, Axis::ordinary, lambda);
  const double n_e = cat.index(m, Axis::extraordinary, lambda);
  if (theta == 0.0 || theta == std::numbers::pi) return n_o;
  if (theta == std::numbers::pi / 2) return n_e;
  return index_from_cos(n_o, n_e, std::cos(theta));
}

/// Poynting walk-off of the extraordinary wave:
///   tan rho = (n(theta)^2 / 2) (1/n_e^2 - 1/n_o^2) sin 2theta.
/// Positive for negative uniaxial crystals in 0 < theta < pi/2.
inline double walkoff_angle(MaterialId m, double theta_cut, Wavelength lambda,
                            const MaterialCatalog& cat = default_catalog()) {
  check_polar_angle(theta_cut);
  const double n_o = cat.index(m, Axis::ordinary, lambda);
  const double n_e = cat.index(m, Axis::extraordinary, lambda);
  const double n = index_from_cos(n_o, n_e, std::cos(theta_cut));
  return std::atan(0.5 * n * n * (1.0 / (n_e * n_e) - 1.0 / (n_o * n_o)) * std::sin(2.0 * theta_cut));
}

/// 1/lambda_p = 1/lambda_s + 1/lambda_i.
inline Wavelength idler_wavelength(Wavelength pump, Wavelength signal) {
  if (!(signal.nm() > pump.nm())) {
    throw DomainError("signal wavelength (" + std::to_string(signal.nm()) +
                      " nm) must exceed pump wavelength (" + std::to_string(pump.nm()) + " nm)");
  }
  return Wavelength(pump.nm() * signal.nm() / (signal.nm() - pump.nm()));
}

/// Collinear type-I (e -> o + o) phase-matching angle between pump wavevector and optic axis.
inline double phase_matching_angle(MaterialId m, Wavelength pump, Wavelength signal,
                                   const MaterialCatalog& cat = default_catalog()) {
  const Wavelength idler = idler_wavelength(pump, signal);
  const double n_target = pump.nm() * (cat.index(m, Axis::ordinary, signal) / signal.nm() +
                                       cat.index(m, Axis::ordinary, idler) / idler.nm());
  const double n_o = cat.index(m, Axis::ordinary, pump);
  const double n_e = cat.index(m, Axis::extraordinary, pump);
  const double s2 = (1.0 / (n_target * n_target) - 1.0 / (n_o * n_o)) /
                    (1.0 / (n_e * n_e) - 1.0 / (n_o * n_o));
  if (!(s2 >= 0.0 && s2 <= 1.0)) {
    throw DomainError(std::string(to_string(m)) + ": no collinear type-I phase matching for pump " +
                      std::to_string(pump.nm()) + " nm, signal " + std::to_string(signal.nm()) + " nm");
  }
  return std::asin(std::sqrt(s2));
}

}  // namespace spdc
