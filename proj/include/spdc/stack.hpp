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

// Ordered birefringent element stack and the interference phase between the
// two pair-generation amplitudes.
//
// Lab frame: z is the pump direction, y the polar (phase-matching) plane of
// the downconverters, x the azimuthal direction. A downconverter's optic axis
// lies in the y-z plane; an element rotated by 90 degrees has its axis in the
// x-z plane. The pump is V (y) polarized, extraordinary in the downconverters,
// and each crystal emits H-polarized (ordinary) pairs.
//
// Each pair is followed from its birth crystal to the exit of the stack:
// a waveplate swaps H and V, and in every other element the pair is
// extraordinary when its polarization lies in the element's principal plane.
// The phase difference is (phase of the branch that exits V) minus (phase of
// the branch that exits H). Propagation inside the birth crystal itself is
// common to both branches for equal crystal lengths and is not counted.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "spdc/errors.hpp"
#include "spdc/optics.hpp"

namespace spdc {

enum class Role { downconverter, waveplate, compensator };
enum class AxisOrientation { parallel_to_bbo, rotated_90 };
enum class Birth { first, second };
enum class Photon { signal, idler };
enum class Polarization { H, V };

/// How a photon of one branch crosses an element.
enum class Traversal { none, ordinary, extraordinary, waveplate };

inline std::string_view to_string(Role r) {
  switch (r) {
    case Role::downconverter: return "downconverter";
    case Role::waveplate: return "waveplate";
    case Role::compensator: return "compensator";
  }
  return "?";
}

inline std::string_view to_string(AxisOrientation o) {
  return o == AxisOrientation::parallel_to_bbo ? "parallel" : "rotated_90";
}

struct Vec3 {
  double x = 0.0, y = 0.0, z = 1.0;
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
};

/// Unit wavevector inside a plate whose entry face is normal to z, for an
/// external (vacuum) unit direction and refractive index n.
inline Vec3 refract_into(const Vec3& k_ext, double n) {
  const double s = std::hypot(k_ext.x, k_ext.y);
  if (s == 0.0) return {0.0, 0.0, 1.0};
  const double sin_int = s / n;
  return {k_ext.x / s * sin_int, k_ext.y / s * sin_int, std::sqrt(1.0 - sin_int * sin_int)};
}

/// Compound zero-order half-wave plate: crystalline quartz and MgF2 layers
/// with crossed fast axes. The plate sits at 45 degrees to H/V.
struct HwpModel {
  double quartz_mm = 0.0;
  double mgf2_mm = 0.0;

  void validate() const {
    if (!(quartz_mm >= 0.0) || !(mgf2_mm >= 0.0)) {
      throw DomainError("waveplate layer lengths must be >= 0");
    }
  }

  /// Net retardance in waves (quartz minus MgF2 birefringent path).
  double retardance_waves(Wavelength lambda, const MaterialCatalog& cat = default_catalog()) const {
    const double dq = cat.index(MaterialId::Quartz, Axis::extraordinary, lambda) -
                      cat.index(MaterialId::Quartz, Axis::ordinary, lambda);
    const double dm = cat.index(MaterialId::MgF2, Axis::extraordinary, lambda) -
                      cat.index(MaterialId::MgF2, Axis::ordinary, lambda);
    return (quartz_mm * dq - mgf2_mm * dm) * 1e6 / lambda.nm();
  }

  /// Throws DomainError unless |retardance| is within tol_waves of one half wave at each wavelength.
  void validate_half_wave(std::initializer_list<Wavelength> wavelengths, double tol_waves,
                          const MaterialCatalog& cat = default_catalog()) const {
    for (auto l : wavelengths) {
      const double r = std::abs(retardance_waves(l, cat));
      if (std::abs(r - 0.5) > tol_waves) {
        throw DomainError("waveplate retardance " + std::to_string(r) + " waves at " +
                          std::to_string(l.nm()) + " nm is not within " + std::to_string(tol_waves) +
                          " of a half wave");
      }
    }
  }

  /// MgF2 thickness that makes the plate exactly half-wave at `design` for a given quartz layer.
  static HwpModel half_wave(double quartz_mm, Wavelength design,
                            const MaterialCatalog& cat = default_catalog()) {
    const double dq = cat.index(MaterialId::Quartz, Axis::extraordinary, design) -
                      cat.index(MaterialId::Quartz, Axis::ordinary, design);
    const double dm = cat.index(MaterialId::MgF2, Axis::extraordinary, design) -
                      cat.index(MaterialId::MgF2, Axis::ordinary, design);
    const double mgf2 = (quartz_mm * dq * 1e6 - 0.5 * design.nm()) / dm * 1e-6;
    if (!(mgf2 >= 0.0)) throw DomainError("quartz layer too thin for a zero-order half-wave plate");
    return {quartz_mm, mgf2};
  }
};

struct StackElement {
  std::string name;
  Role role = Role::downconverter;
  MaterialId material = MaterialId::BBO;
  double length_mm = 0.0;
  AxisOrientation orientation = AxisOrientation::parallel_to_bbo;
  double cut_angle_rad = 0.0;

  /// Optic-axis unit vector in the lab frame.
  Vec3 optic_axis() const {
    const double s = std::sin(cut_angle_rad), c = std::cos(cut_angle_rad);
    return orientation == AxisOrientation::parallel_to_bbo ? Vec3{0.0, s, c} : Vec3{s, 0.0, c};
  }
};

struct PhaseDifference {
  double rad = 0.0;
  explicit PhaseDifference(double v = 0.0) : rad(v) {
    if (!std::isfinite(v)) throw DomainError("phase difference is not finite");
  }
};

/// Constant offset, e.g. from tilting a crystal; pi dials the Phi- Bell state.
inline PhaseDifference with_phase_offset(PhaseDifference d, double offset_rad) {
  return PhaseDifference(d.rad + offset_rad);
}

class CrystalStack {
 public:
  std::vector<StackElement> elements;
  HwpModel hwp;
  bool include_pump_terms = false;

  /// BBO -> HWP -> BBO -> YVO4 with the compensator axis perpendicular to the beam.
  static CrystalStack parallel_source(double bbo_mm, double cut_rad, HwpModel hwp, double yvo_mm) {
    CrystalStack s;
    s.hwp = hwp;
    s.elements = {
        {"bbo1", Role::downconverter, MaterialId::BBO, bbo_mm, AxisOrientation::parallel_to_bbo, cut_rad},
        {"hwp", Role::waveplate, MaterialId::Quartz, 0.0, AxisOrientation::parallel_to_bbo, 0.0},
        {"bbo2", Role::downconverter, MaterialId::BBO, bbo_mm, AxisOrientation::parallel_to_bbo, cut_rad},
        {"yvo", Role::compensator, MaterialId::YVO4, yvo_mm, AxisOrientation::rotated_90,
         std::numbers::pi / 2},
    };
    s.validate();
    return s;
  }

  void validate() const {
    hwp.validate();
    int downconverters = 0;
    for (const auto& e : elements) {
      if (!(e.length_mm >= 0.0)) throw DomainError("element '" + e.name + "' has negative length");
      if (e.role == Role::downconverter) ++downconverters;
      if (e.role == Role::compensator && e.orientation != AxisOrientation::rotated_90) {
        throw DomainError("compensator '" + e.name + "' must be rotated 90 degrees to the downconverters");
      }
      check_polar_angle(e.cut_angle_rad);
    }
    if (downconverters != 2) {
      throw DomainError("stack needs exactly two downconverters, found " + std::to_string(downconverters));
    }
    if (exit_polarization(Birth::first) == exit_polarization(Birth::second)) {
      throw DomainError("both branches exit with the same polarization; a waveplate must sit between the downconverters");
    }
  }

  std::size_t birth_index(Birth b) const {
    int seen = 0;
    for (std::size_t i = 0; i < elements.size(); ++i) {
      if (elements[i].role != Role::downconverter) continue;
      if ((b == Birth::first && seen == 0) || (b == Birth::second && seen == 1)) return i;
      ++seen;
    }
    throw DomainError("stack has no downconverter for the requested branch");
  }

  Polarization exit_polarization(Birth b) const {
    auto pol = Polarization::H;
    for (std::size_t i = birth_index(b) + 1; i < elements.size(); ++i) {
      if (elements[i].role == Role::waveplate) pol = pol == Polarization::H ? Polarization::V : Polarization::H;
    }
    return pol;
  }

  /// Branch whose pair leaves the stack V polarized (the e^{i dphi} amplitude).
  Birth v_branch() const {
    return exit_polarization(Birth::first) == Polarization::V ? Birth::first : Birth::second;
  }
  Birth h_branch() const { return v_branch() == Birth::first ? Birth::second : Birth::first; }

  /// Per-element traversal of one photon of a branch. Type-I pairs share
  /// polarization, so signal and idler have identical assignments.
  Traversal assignment(Birth b, Photon, std::size_t element) const {
    const auto start = birth_index(b);
    if (element <= start) return Traversal::none;
    auto pol = Polarization::H;
    for (std::size_t i = start + 1; i < element; ++i) {
      if (elements[i].role == Role::waveplate) pol = pol == Polarization::H ? Polarization::V : Polarization::H;
    }
    const auto& e = elements[element];
    if (e.role == Role::waveplate) return Traversal::waveplate;
    // The principal plane is y-z for parallel elements (V is extraordinary)
    // and x-z for rotated ones (H is extraordinary).
    const bool in_plane = (e.orientation == AxisOrientation::parallel_to_bbo) == (pol == Polarization::V);
    return in_plane ? Traversal::extraordinary : Traversal::ordinary;
  }

  std::optional<std::size_t> compensator_index() const {
    for (std::size_t i = 0; i < elements.size(); ++i) {
      if (elements[i].role == Role::compensator) return i;
    }
    return std::nullopt;
  }

  double compensator_length() const {
    auto i = compensator_index();
    return i ? elements[*i].length_mm : 0.0;
  }

  CrystalStack with_compensator_length(double mm) const {
    auto s = *this;
    auto i = s.compensator_index();
    if (!i) throw DomainError("stack has no compensator element");
    s.elements[*i].length_mm = mm;
    return s;
  }

  CrystalStack with_downconverter_length(double mm) const {
    auto s = *this;
    for (auto& e : s.elements) {
      if (e.role == Role::downconverter) e.length_mm = mm;
    }
    return s;
  }

  /// Every element and waveplate layer scaled by `factor`.
  CrystalStack scaled(double factor) const {
    auto s = *this;
    for (auto& e : s.elements) e.length_mm *= factor;
    s.hwp.quartz_mm *= factor;
    s.hwp.mgf2_mm *= factor;
    return s;
  }
};

/// External emission direction of the signal photon. The idler leaves at the
/// transverse-momentum-conjugate direction (collinear pump).
struct EmissionAngles {
  double azimuth_rad = 0.0;
  double polar_rad = 0.0;

  bool collinear() const { return azimuth_rad == 0.0 && polar_rad == 0.0; }

  Vec3 signal_direction() const {
    if (collinear()) return {};
    const double tx = std::tan(azimuth_rad), ty = std::tan(polar_rad);
    const double norm = std::sqrt(tx * tx + ty * ty + 1.0);
    return {tx / norm, ty / norm, 1.0 / norm};
  }

  Vec3 idler_direction(Wavelength signal, Wavelength idler) const {
    if (collinear()) return {};
    const auto ks = signal_direction();
    const double scale = -idler.nm() / signal.nm();
    const double x = ks.x * scale, y = ks.y * scale;
    const double t2 = x * x + y * y;
    if (!(t2 < 1.0)) throw DomainError("emission angle beyond the idler's free-space cutoff");
    return {x, y, std::sqrt(1.0 - t2)};
  }
};

/// 2 pi L n / (lambda cos theta_internal) with the ray tilted by internal_angle
/// inside the element's principal plane (the plane holding its optic axis).
inline double element_phase(const StackElement& element, Wavelength lambda, Axis axis,
                            double internal_angle, const MaterialCatalog& cat = default_catalog()) {
  if (element.role == Role::waveplate) {
    throw DomainError("element_phase: waveplate phases come from its HwpModel");
  }
  if (!(std::abs(internal_angle) < std::numbers::pi / 2)) {
    throw DomainError("internal angle must satisfy |angle| < pi/2");
  }
  if (element.length_mm == 0.0) return 0.0;
  const double n_o = cat.index(element.material, Axis::ordinary, lambda);
  double n = n_o;
  if (axis == Axis::extraordinary) {
    const double n_e = cat.index(element.material, Axis::extraordinary, lambda);
    n = index_from_cos(n_o, n_e, std::cos(element.cut_angle_rad - internal_angle));
  }
  return 2.0 * std::numbers::pi * element.length_mm * 1e6 * n / (lambda.nm() * std::cos(internal_angle));
}

namespace detail {

/// Refracted extraordinary ray: self-consistent index for the direction it refracts into.
inline double extraordinary_ray(double n_o, double n_e, const Vec3& axis, const Vec3& k_ext, Vec3& k_int) {
  double n = n_o;
  for (int it = 0; it < 100; ++it) {
    k_int = refract_into(k_ext, n);
    const double next = index_from_cos(n_o, n_e, k_int.dot(axis));
    const bool done = std::abs(next - n) <= 1e-15 * n;
    n = next;
    if (done) break;
  }
  k_int = refract_into(k_ext, n);
  return n;
}

inline double plate_phase(double length_mm, double n, const Vec3& k_int, double lambda_nm) {
  return 2.0 * std::numbers::pi * length_mm * 1e6 * n / (lambda_nm * k_int.z);
}

struct PrincipalIndices {
  double n_o = 1.0, n_e = 1.0;
};

inline PrincipalIndices principal(MaterialId m, Wavelength l, const MaterialCatalog& cat) {
  return {cat.index(m, Axis::ordinary, l), cat.index(m, Axis::extraordinary, l)};
}

}  // namespace detail

/// Signed contribution of one element to the phase difference.
struct ElementContribution {
  std::string name;
  double v_branch_rad = 0.0;  // added to dphi
  double h_branch_rad = 0.0;  // already negated
};

/// Phase difference evaluator for fixed wavelengths. Principal indices are
/// looked up once; evaluation over many emission directions is then cheap and
/// safe to run concurrently.
class PhaseEvaluator {
 public:
  PhaseEvaluator(const CrystalStack& stack, Wavelength signal, Wavelength idler,
                 const MaterialCatalog& cat = default_catalog())
      : stack_(stack), signal_(signal), idler_(idler) {
    stack_.validate();
    for (int p = 0; p < 2; ++p) {
      const Wavelength l = p == 0 ? signal : idler;
      auto& idx = indices_[p];
      idx.reserve(stack_.elements.size());
      for (const auto& e : stack_.elements) idx.push_back(detail::principal(e.material, l, cat));
      quartz_[p] = detail::principal(MaterialId::Quartz, l, cat);
      mgf2_[p] = detail::principal(MaterialId::MgF2, l, cat);
    }
    if (stack_.include_pump_terms) pump_phase_ = compute_pump_phase(cat);
  }

  const CrystalStack& stack() const { return stack_; }
  Wavelength signal() const { return signal_; }
  Wavelength idler() const { return idler_; }

  PhaseDifference operator()(const EmissionAngles& angles = {}) const {
    return PhaseDifference(branch_phase(stack_.v_branch(), angles) -
                           branch_phase(stack_.h_branch(), angles) - pump_phase_);
  }

  /// Total phase of one branch (signal + idler) over every element it crosses.
  double branch_phase(Birth b, const EmissionAngles& angles = {}) const {
    double total = 0.0;
    for (std::size_t i = 0; i < stack_.elements.size(); ++i) total += element_branch_phase(b, i, angles);
    return total;
  }

  std::vector<ElementContribution> breakdown(const EmissionAngles& angles = {}) const {
    std::vector<ElementContribution> out;
    for (std::size_t i = 0; i < stack_.elements.size(); ++i) {
      out.push_back({stack_.elements[i].name, element_branch_phase(stack_.v_branch(), i, angles),
                     -element_branch_phase(stack_.h_branch(), i, angles)});
    }
    return out;
  }

  double element_branch_phase(Birth b, std::size_t i, const EmissionAngles& angles) const {
    const Vec3 ks = angles.signal_direction();
    const Vec3 ki = angles.idler_direction(signal_, idler_);
    return photon_phase(b, i, 0, ks) + photon_phase(b, i, 1, ki);
  }

 private:
  double photon_phase(Birth b, std::size_t i, int p, const Vec3& k_ext) const {
    const auto& e = stack_.elements[i];
    const double lambda = p == 0 ? signal_.nm() : idler_.nm();
    switch (stack_.assignment(b, p == 0 ? Photon::signal : Photon::idler, i)) {
      case Traversal::none:
        return 0.0;
      case Traversal::ordinary: {
        if (e.length_mm == 0.0) return 0.0;
        const double n = indices_[p][i].n_o;
        return detail::plate_phase(e.length_mm, n, refract_into(k_ext, n), lambda);
      }
      case Traversal::extraordinary: {
        if (e.length_mm == 0.0) return 0.0;
        Vec3 k_int;
        const double n = detail::extraordinary_ray(indices_[p][i].n_o, indices_[p][i].n_e, e.optic_axis(), k_ext, k_int);
        return detail::plate_phase(e.length_mm, n, k_int, lambda);
      }
      case Traversal::waveplate:
        return waveplate_phase(p, k_ext);
    }
    return 0.0;
  }

  // A photon entering a 45-degree plate splits evenly between the two eigen-
  // polarizations; the rotated output carries the mean of the two phases.
  double waveplate_phase(int p, const Vec3& k_ext) const {
    const double lambda = p == 0 ? signal_.nm() : idler_.nm();
    constexpr double r = std::numbers::sqrt2 / 2;
    const Vec3 quartz_axis{r, r, 0.0}, mgf2_axis{r, -r, 0.0};
    auto layer = [&](double length, const detail::PrincipalIndices& idx, const Vec3& axis) {
      if (length == 0.0) return 0.0;
      const double po = detail::plate_phase(length, idx.n_o, refract_into(k_ext, idx.n_o), lambda);
      Vec3 k_int;
      const double ne = detail::extraordinary_ray(idx.n_o, idx.n_e, axis, k_ext, k_int);
      return 0.5 * (po + detail::plate_phase(length, ne, k_int, lambda));
    };
    return layer(stack_.hwp.quartz_mm, quartz_[p], quartz_axis) +
           layer(stack_.hwp.mgf2_mm, mgf2_[p], mgf2_axis);
  }

  // Pump (V, extraordinary) through the second downconverter and the plate,
  // whose eigen-axes it sees as the mean index. Collinear only.
  double compute_pump_phase(const MaterialCatalog& cat) const {
    const Wavelength pump(1.0 / (1.0 / signal_.nm() + 1.0 / idler_.nm()));
    const auto& bbo = stack_.elements[stack_.birth_index(Birth::second)];
    double phase = element_phase(bbo, pump, Axis::extraordinary, 0.0, cat);
    const auto q = detail::principal(MaterialId::Quartz, pump, cat);
    const auto m = detail::principal(MaterialId::MgF2, pump, cat);
    phase += 2.0 * std::numbers::pi * 1e6 / pump.nm() *
             (stack_.hwp.quartz_mm * 0.5 * (q.n_o + q.n_e) + stack_.hwp.mgf2_mm * 0.5 * (m.n_o + m.n_e));
    return phase;
  }

  CrystalStack stack_;
  Wavelength signal_;
  Wavelength idler_;
  std::array<std::vector<detail::PrincipalIndices>, 2> indices_;
  std::array<detail::PrincipalIndices, 2> quartz_{};
  std::array<detail::PrincipalIndices, 2> mgf2_{};
  double pump_phase_ = 0.0;
};

inline PhaseDifference total_phase_difference(const CrystalStack& stack, Wavelength signal, Wavelength idler,
                                              const EmissionAngles& angles = {},
                                              const MaterialCatalog& cat = default_catalog()) {
  return PhaseEvaluator(stack, signal, idler, cat)(angles);
}

}  // namespace spdc
