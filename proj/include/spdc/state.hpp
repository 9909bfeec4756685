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

// Two-photon polarization state restricted to the |HH>, |VV> subspace, the
// single-polarizer sweep, and the derived quality figures.
//
// Basis order is {HH, HV, VH, VV}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spdc/errors.hpp"

namespace spdc {

using Complex = std::complex<double>;

struct PhasorSample {
  double phase_rad = 0.0;
  double weight = 0.0;
};

/// Weighted samples of the phase difference over spectrum and emission angle.
class PhasorEnsemble {
 public:
  PhasorEnsemble() = default;
  explicit PhasorEnsemble(std::vector<PhasorSample> samples) : samples_(std::move(samples)) {
    for (const auto& s : samples_) check(s);
  }

  void add(double phase_rad, double weight) {
    PhasorSample s{phase_rad, weight};
    check(s);
    samples_.push_back(s);
  }

  const std::vector<PhasorSample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

  double total_weight() const {
    double w = 0.0;
    for (const auto& s : samples_) w += s.weight;
    return w;
  }

  /// kappa = sum w e^{i phi} / sum w. Throws when the total weight is zero.
  Complex coherence() const {
    const double w = total_weight();
    if (!(w > 0.0)) throw DomainError("phasor ensemble has zero total weight");
    Complex acc{0.0, 0.0};
    for (const auto& s : samples_) acc += s.weight * std::polar(1.0, s.phase_rad);
    return acc / w;
  }

  PhasorEnsemble shifted(double offset_rad) const {
    auto out = *this;
    for (auto& s : out.samples_) s.phase_rad += offset_rad;
    return out;
  }

  /// Spread max(phi) - min(phi) over samples with nonzero weight.
  double phase_spread() const {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& s : samples_) {
      if (s.weight <= 0.0) continue;
      lo = std::min(lo, s.phase_rad);
      hi = std::max(hi, s.phase_rad);
    }
    return hi >= lo ? hi - lo : 0.0;
  }

 private:
  static void check(const PhasorSample& s) {
    if (!std::isfinite(s.phase_rad) || !(s.weight >= 0.0) || !std::isfinite(s.weight)) {
      throw DomainError("phasor samples need a finite phase and a finite nonnegative weight");
    }
  }

  std::vector<PhasorSample> samples_;
};

/// Outer product of two independent ensembles: phases add, weights multiply.
inline PhasorEnsemble combine(const PhasorEnsemble& a, const PhasorEnsemble& b) {
  std::vector<PhasorSample> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a.samples()) {
    for (const auto& y : b.samples()) out.push_back({x.phase_rad + y.phase_rad, x.weight * y.weight});
  }
  return PhasorEnsemble(std::move(out));
}

enum class BellTarget { phi_plus, phi_minus };

inline std::string_view to_string(BellTarget t) { return t == BellTarget::phi_plus ? "phi_plus" : "phi_minus"; }

/// Relative phase of the target state: 0 for Phi+, pi for Phi-.
inline double target_phase(BellTarget t) { return t == BellTarget::phi_plus ? 0.0 : std::numbers::pi; }

/// Constant offset that rotates the ensemble mean phase onto the target.
inline double dialing_offset(const PhasorEnsemble& e, BellTarget t) {
  return target_phase(t) - std::arg(e.coherence());
}

class TwoQubitState {
 public:
  using Matrix = Eigen::Matrix4cd;

  /// Validates hermiticity, unit trace and positivity.
  static TwoQubitState from_matrix(const Matrix& m) {
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw DomainError("density matrix is not Hermitian");
    if (std::abs(m.trace() - Complex{1.0, 0.0}) > 1e-12) throw DomainError("density matrix trace is not 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) throw DomainError("density matrix is not positive semidefinite");
    return TwoQubitState(m);
  }

  const Matrix& matrix() const { return rho_; }
  double purity() const { return (rho_ * rho_).trace().real(); }

  /// kappa = 2 <VV|rho|HH>.
  Complex coherence() const { return 2.0 * rho_(3, 0); }

  double expectation(const Eigen::Vector4cd& psi) const { return (psi.adjoint() * rho_ * psi)(0, 0).real(); }

 private:
  explicit TwoQubitState(const Matrix& m) : rho_(m) {}
  Matrix rho_;
};

inline Eigen::Vector4cd bell_vector(BellTarget t) {
  const double r = std::numbers::sqrt2 / 2;
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v(0) = r;
  v(3) = t == BellTarget::phi_plus ? r : -r;
  return v;
}

/// rho = 1/2 [ |HH><HH| + |VV><VV| + kappa |VV><HH| + conj(kappa) |HH><VV| ].
inline TwoQubitState state_from_coherence(Complex kappa) {
  TwoQubitState::Matrix m = TwoQubitState::Matrix::Zero();
  m(0, 0) = 0.5;
  m(3, 3) = 0.5;
  m(3, 0) = 0.5 * kappa;
  m(0, 3) = 0.5 * std::conj(kappa);
  return TwoQubitState::from_matrix(m);
}

/// (|HH> + e^{i dphi}|VV>)/sqrt(2).
inline TwoQubitState pure_state(double dphi) { return state_from_coherence(std::polar(1.0, dphi)); }

inline TwoQubitState mixed_state(const PhasorEnsemble& ensemble) {
  if (ensemble.empty()) throw DomainError("mixed_state: empty ensemble");
  return state_from_coherence(ensemble.coherence());
}

inline double fidelity(const TwoQubitState& rho, BellTarget target) {
  return std::clamp(rho.expectation(bell_vector(target)), 0.0, 1.0);
}

struct SweepResult {
  std::vector<double> angles_rad;
  std::vector<double> rates;
  double b_max = 0.0;
  double b_min = 0.0;
};

/// Coincidence rate behind one linear polarizer at alpha acting on both photons:
/// <aa|rho|aa>, |a> = cos a |H> + sin a |V>. Relative units (ideal Phi- peaks at 1/2).
inline double polarizer_rate(const TwoQubitState& rho, double alpha) {
  const double c = std::cos(alpha), s = std::sin(alpha);
  Eigen::Vector4cd v;
  v << c * c, c * s, s * c, s * s;
  return std::max(0.0, rho.expectation(v));
}

inline SweepResult polarizer_sweep(const TwoQubitState& rho, std::vector<double> angles_rad) {
  if (angles_rad.empty()) throw DomainError("polarizer sweep needs at least one angle");
  SweepResult r;
  r.rates.reserve(angles_rad.size());
  for (double a : angles_rad) r.rates.push_back(polarizer_rate(rho, a));
  r.angles_rad = std::move(angles_rad);
  auto [lo, hi] = std::minmax_element(r.rates.begin(), r.rates.end());
  r.b_min = *lo;
  r.b_max = *hi;
  return r;
}

/// (B_max - B_min) / (B_max + B_min).
inline double visibility(const SweepResult& sweep) {
  const double denom = sweep.b_max + sweep.b_min;
  if (!(denom > 0.0)) throw DomainError("visibility undefined: all sweep rates are zero");
  return (sweep.b_max - sweep.b_min) / denom;
}

/// Generated pair rate from a detected coincidence rate and the two heralding efficiencies.
inline double infer_generation_rate(double coincidence_rate, double eta_signal, double eta_idler) {
  auto ok = [](double eta) { return eta > 0.0 && eta <= 1.0; };
  if (!ok(eta_signal) || !ok(eta_idler)) throw DomainError("efficiencies must lie in (0, 1]");
  if (!(coincidence_rate >= 0.0)) throw DomainError("coincidence rate must be nonnegative");
  return coincidence_rate / (eta_signal * eta_idler);
}

}  // namespace spdc
