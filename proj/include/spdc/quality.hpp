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

// Entanglement-quality pipeline: spectral and angular phase spreads are
// combined into one phasor ensemble, the constant phase is dialed onto the
// target Bell state, and the state, polarizer sweep, visibility and fidelity
// follow.

#include <cmath>
#include <numbers>
#include <vector>

#include "spdc/angle_map.hpp"
#include "spdc/compensator.hpp"
#include "spdc/state.hpp"

namespace spdc {

struct SpectralSpec {
  double fwhm_nm = 5.0;
  int samples = 41;
  double span_fwhm = 2.0;  // samples cover center +/- span_fwhm * fwhm

  void validate() const {
    if (!(fwhm_nm >= 0.0)) throw DomainError("spectral FWHM must be >= 0");
    if (samples < 1) throw DomainError("spectral sample count must be >= 1");
    if (!(span_fwhm > 0.0)) throw DomainError("spectral span must be positive");
  }
};

/// Gaussian signal spectrum (idler slaved to the pump); each sample carries
/// the collinear phase relative to the center wavelength.
inline PhasorEnsemble spectral_ensemble(const CrystalStack& stack, Wavelength pump, Wavelength signal,
                                        const SpectralSpec& spec, const MaterialCatalog& cat = default_catalog()) {
  spec.validate();
  PhasorEnsemble e;
  if (spec.fwhm_nm == 0.0 || spec.samples == 1) {
    e.add(0.0, 1.0);
    return e;
  }
  const double c = signal.nm();
  const double ref = phase_at_signal(stack, pump, c, cat);
  const double half = spec.span_fwhm * spec.fwhm_nm;
  const double k = 4.0 * std::numbers::ln2 / (spec.fwhm_nm * spec.fwhm_nm);
  for (int s = 0; s < spec.samples; ++s) {
    const double offset = half * static_cast<double>(2 * s - (spec.samples - 1)) / (spec.samples - 1);
    e.add(phase_at_signal(stack, pump, c + offset, cat) - ref, std::exp(-k * offset * offset));
  }
  return e;
}

/// Polarizer angles 0..180 degrees inclusive.
inline std::vector<double> sweep_angles(double step_deg) {
  if (!(step_deg > 0.0)) throw DomainError("sweep step must be positive");
  std::vector<double> out;
  const int n = static_cast<int>(std::floor(180.0 / step_deg + 1e-9));
  for (int k = 0; k <= n; ++k) out.push_back(k * step_deg * std::numbers::pi / 180.0);
  return out;
}

struct QualityResult {
  Complex kappa{};           // coherence after dialing onto the target
  double dialing_offset_rad = 0.0;
  double visibility = 0.0;
  double fidelity = 0.0;
  double accepted_radius_rad = 0.0;
  std::size_t accepted_directions = 0;
  SweepResult sweep;
};

inline QualityResult evaluate_quality(const PhaseMap& map, const AcceptanceSpec& acceptance,
                                      const PhasorEnsemble& spectral, BellTarget target,
                                      const std::vector<double>& sweep_angles_rad) {
  const auto weighted = acceptance_weights(map, acceptance);
  PhasorEnsemble angular;
  for (const auto& s : weighted.samples()) {
    if (s.weight > 0.0) angular.add(s.phase_rad, s.weight);
  }
  if (angular.empty()) throw DomainError("acceptance region contains no grid directions");
  const auto combined = combine(angular, spectral);
  QualityResult q;
  q.dialing_offset_rad = dialing_offset(combined, target);
  const auto dialed = combined.shifted(q.dialing_offset_rad);
  const auto rho = mixed_state(dialed);
  q.kappa = rho.coherence();
  q.fidelity = fidelity(rho, target);
  q.sweep = polarizer_sweep(rho, sweep_angles_rad);
  q.visibility = visibility(q.sweep);
  q.accepted_radius_rad = acceptance.angular_radius();
  q.accepted_directions = angular.size();
  return q;
}

}  // namespace spdc
