#pragma once

#include <cmath>
#include <sstream>

#include "sbwave/types.hpp"

namespace sbwave {

// Equation constants of the coupled Schroedinger-Boussinesq system
//
//   i e_t + e_xx - n e = gamma |e|^2 e,
//   n_tt - n_xx + alpha n_xxxx - beta (n^2)_xx = (|e|^2)_xx.
//
// gamma is kept unconstrained: the sech-profile family forces
// gamma * eta = 1 - beta/(3 alpha), which can make gamma <= 0.
template <typename Scalar>
struct PhysParams {
  Scalar alpha{1};
  Scalar beta{3};
  Scalar gamma{0};
};

/// Temporal frequency omega and wave speed v of a solitary wave.
template <typename Scalar>
struct WaveParams {
  Scalar omega{Scalar(-0.05)};
  Scalar v{0};
};

// Scales derived from (omega, v):
//   sigma = -omega - v^2/4       (inverse width squared, c2 = sqrt(sigma))
//   eta   = 1 - v^2 - 4 alpha sigma
//   q     = v/2                  (carrier wavenumber of e)
//   c1    = sqrt((6 alpha / beta) sigma eta)   (amplitude of e-hat)
template <typename Scalar>
struct DerivedScales {
  Scalar sigma{};
  Scalar eta{};
  Scalar q{};
  Scalar c1{};
  Scalar c2{};
};

/// Outcome of the two closed-form parameter window checks.
template <typename Scalar>
struct StabilityVerdict {
  bool exists{false};            // omega inside the existence window
  bool stable_certified{false};  // omega inside the certified-stability window
  Scalar lower_bound_existence{};
  Scalar lower_bound_stability{};
  Scalar upper_bound{};  // = -v^2/4 for both windows
};

template <typename Scalar>
DerivedScales<Scalar> derive_scales(const PhysParams<Scalar>& phys,
                                    const WaveParams<Scalar>& wave) {
  if (!(phys.alpha > Scalar(0)) || !(phys.beta > Scalar(0)))
    throw DomainError("derive_scales: alpha and beta must be positive");
  const Scalar sigma = -wave.omega - wave.v * wave.v / Scalar(4);
  if (!(sigma > Scalar(0))) {
    std::ostringstream os;
    os << "derive_scales: sigma = -omega - v^2/4 = " << double(sigma) << " <= 0";
    throw DomainError(os.str());
  }
  const Scalar eta = Scalar(1) - wave.v * wave.v - Scalar(4) * phys.alpha * sigma;
  if (!(eta > Scalar(0))) {
    std::ostringstream os;
    os << "derive_scales: eta = 1 - v^2 - 4*alpha*sigma = " << double(eta) << " <= 0";
    throw DomainError(os.str());
  }
  DerivedScales<Scalar> s;
  s.sigma = sigma;
  s.eta = eta;
  s.q = wave.v / Scalar(2);
  s.c2 = std::sqrt(sigma);
  s.c1 = std::sqrt(Scalar(6) * phys.alpha / phys.beta * sigma * eta);
  return s;
}

/// Solitary waves exist iff -v^2/4 - (1-v^2)/(4 alpha) < omega < -v^2/4 and 1 - v^2 > 0.
template <typename Scalar>
bool check_existence(const PhysParams<Scalar>& phys, const WaveParams<Scalar>& wave) {
  const Scalar upper = -wave.v * wave.v / Scalar(4);
  const Scalar lower = upper - (Scalar(1) - wave.v * wave.v) / (Scalar(4) * phys.alpha);
  return (Scalar(1) - wave.v * wave.v > Scalar(0)) && lower < wave.omega &&
         wave.omega < upper;
}

/// Certified-stable window: -v^2/4 - (1+5v^2)/(2 alpha (6+beta)) < omega < -v^2/4.
/// Both window flags are evaluated independently with strict comparisons.
template <typename Scalar>
StabilityVerdict<Scalar> check_stability_criterion(const PhysParams<Scalar>& phys,
                                                   const WaveParams<Scalar>& wave) {
  StabilityVerdict<Scalar> verdict;
  verdict.upper_bound = -wave.v * wave.v / Scalar(4);
  verdict.lower_bound_existence =
      verdict.upper_bound - (Scalar(1) - wave.v * wave.v) / (Scalar(4) * phys.alpha);
  verdict.lower_bound_stability =
      verdict.upper_bound - (Scalar(1) + Scalar(5) * wave.v * wave.v) /
                                (Scalar(2) * phys.alpha * (Scalar(6) + phys.beta));
  verdict.exists = check_existence(phys, wave);
  verdict.stable_certified =
      verdict.lower_bound_stability < wave.omega && wave.omega < verdict.upper_bound;
  return verdict;
}

/// The unique cubic coefficient for which the sech profiles solve all four
/// stationary equations at once: gamma* = (3 alpha - beta) / (3 alpha eta).
template <typename Scalar>
Scalar compatible_gamma(Scalar alpha, Scalar beta, Scalar eta) {
  return (Scalar(3) * alpha - beta) / (Scalar(3) * alpha * eta);
}

template <typename Scalar>
Scalar compatible_gamma(const PhysParams<Scalar>& phys, const DerivedScales<Scalar>& scales) {
  return compatible_gamma(phys.alpha, phys.beta, scales.eta);
}

}  // namespace sbwave
