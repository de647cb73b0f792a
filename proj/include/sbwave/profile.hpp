#pragma once

#include <cmath>

#include "sbwave/fourier.hpp"
#include "sbwave/grid.hpp"
#include "sbwave/params.hpp"

namespace sbwave {

// Closed-form solitary wave sampled on a grid:
//
//   e_hat = c1 sech(sqrt(sigma) x)          e = exp(i q x) e_hat
//   n     = -(6 alpha / beta) sigma sech^2(sqrt(sigma) x)
//   phi   = (6 alpha / beta) v sqrt(sigma) tanh(sqrt(sigma) x)
//   w     = phi_x = -v n
//
// phi is kept for display only; all analysis works with w, which decays.
template <typename Scalar>
struct Profile {
  Vec<Scalar> eps_hat;
  CVec<Scalar> eps;
  Vec<Scalar> n;
  Vec<Scalar> w;
  Vec<Scalar> phi;
};

/// How the cubic coefficient is chosen when building profiles.
enum class GammaMode { derive, force };

/// In derive mode gamma is replaced by the compatible value gamma*.
template <typename Scalar>
PhysParams<Scalar> effective_phys(PhysParams<Scalar> phys,
                                  const DerivedScales<Scalar>& scales, GammaMode mode) {
  if (mode == GammaMode::derive) phys.gamma = compatible_gamma(phys, scales);
  return phys;
}

template <typename Scalar>
Profile<Scalar> sample_profile(const PhysParams<Scalar>& phys,
                               const WaveParams<Scalar>& wave,
                               const DerivedScales<Scalar>& scales,
                               const Grid<Scalar>& grid) {
  const Scalar amp_n = Scalar(6) * phys.alpha / phys.beta * scales.sigma;
  const Vec<Scalar> x = coordinates(grid);
  Profile<Scalar> p;
  p.eps_hat.resize(grid.n_points);
  p.eps.resize(grid.n_points);
  p.n.resize(grid.n_points);
  p.w.resize(grid.n_points);
  p.phi.resize(grid.n_points);
  for (Index j = 0; j < grid.n_points; ++j) {
    const Scalar arg = scales.c2 * x[j];
    const Scalar sech = Scalar(1) / std::cosh(arg);
    p.eps_hat[j] = scales.c1 * sech;
    p.n[j] = -amp_n * sech * sech;
    p.phi[j] = Scalar(6) * phys.alpha / phys.beta * wave.v * scales.c2 * std::tanh(arg);
    p.w[j] = -wave.v * p.n[j];
    p.eps[j] = std::polar(p.eps_hat[j], scales.q * x[j]);
  }
  return p;
}

/// Discrete L2 norms of the stationary-equation residuals and of the
/// first-variation residual at the sampled profile.
template <typename Scalar>
struct ResidualReport {
  Scalar r_nls{};
  Scalar r_bsq{};
  Scalar r_grad{};
};

// Norm of E'(Phi) - v Q1'(Phi) - omega Q2'(Phi), assembled spectrally with the
// third component expressed through w.
template <typename Scalar>
Scalar gradient_residual(const Profile<Scalar>& profile, const PhysParams<Scalar>& phys,
                         const WaveParams<Scalar>& wave, const Grid<Scalar>& grid) {
  using C = std::complex<Scalar>;
  Fourier<Scalar> fft;
  const CVec<Scalar> eps_x = fft.derivative(profile.eps, grid, 1);
  const CVec<Scalar> eps_xx = fft.derivative(profile.eps, grid, 2);
  const Vec<Scalar> n_x = fft.derivative(profile.n, grid, 1);
  const Vec<Scalar> n_xx = fft.derivative(profile.n, grid, 2);
  const Vec<Scalar> w_x = fft.derivative(profile.w, grid, 1);

  Scalar sum = 0;
  for (Index j = 0; j < grid.n_points; ++j) {
    const C e = profile.eps[j];
    const Scalar e2 = std::norm(e);
    const C f1 = Scalar(-2) * eps_xx[j] + Scalar(2) * profile.n[j] * e +
                 Scalar(2) * phys.gamma * e2 * e + C(0, 2 * wave.v) * eps_x[j] -
                 Scalar(2) * wave.omega * e;
    const Scalar f2 = e2 + profile.n[j] - phys.alpha * n_xx[j] +
                      phys.beta * profile.n[j] * profile.n[j] + wave.v * profile.w[j];
    const Scalar f3 = -w_x[j] - wave.v * n_x[j];
    sum += std::norm(f1) + f2 * f2 + f3 * f3;
  }
  return std::sqrt(grid.spacing * sum);
}

template <typename Scalar>
ResidualReport<Scalar> stationary_residual(const Profile<Scalar>& profile,
                                           const PhysParams<Scalar>& phys,
                                           const WaveParams<Scalar>& wave,
                                           const Grid<Scalar>& grid) {
  Fourier<Scalar> fft;
  const Vec<Scalar> eh_xx = fft.derivative(profile.eps_hat, grid, 2);
  const Vec<Scalar> n_xx = fft.derivative(profile.n, grid, 2);
  const Scalar freq = wave.omega + wave.v * wave.v / Scalar(4);  // = -sigma

  ResidualReport<Scalar> report;
  Scalar nls = 0, bsq = 0;
  for (Index j = 0; j < grid.n_points; ++j) {
    const Scalar eh = profile.eps_hat[j];
    const Scalar nn = profile.n[j];
    const Scalar r1 = eh_xx[j] + (freq - nn - phys.gamma * eh * eh) * eh;
    const Scalar r2 = wave.v * wave.v * nn - nn + phys.alpha * n_xx[j] -
                      phys.beta * nn * nn - eh * eh;
    nls += r1 * r1;
    bsq += r2 * r2;
  }
  report.r_nls = std::sqrt(grid.spacing * nls);
  report.r_bsq = std::sqrt(grid.spacing * bsq);
  report.r_grad = gradient_residual(profile, phys, wave, grid);
  return report;
}

}  // namespace sbwave
