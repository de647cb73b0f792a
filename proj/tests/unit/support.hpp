#pragma once

#include <cmath>
#include <random>

#include "sbwave/fourier.hpp"
#include "sbwave/grid.hpp"
#include "sbwave/params.hpp"
#include "sbwave/profile.hpp"

// Shared fixtures: the canonical parameter sets and independent closed-form
// oracles obtained by integrating powers of sech by hand. The oracle values
// are derived here from the moment table alone, so they cross-check both the
// quadrature path and the library's own closed forms.
namespace testsupport {

using sbwave::CVec;
using sbwave::Grid;
using sbwave::Index;
using sbwave::Vec;

struct ParamSet {
  sbwave::PhysParams<double> phys;
  sbwave::WaveParams<double> wave;
};

inline ParamSet set_a() { return {{1.0, 3.0, 0.0}, {-0.05, 0.0}}; }
inline ParamSet set_b() { return {{1.0, 3.0, 0.0}, {-0.1, 0.0}}; }
inline ParamSet set_c() { return {{1.0, 2.0, 5.0 / 12.0}, {-0.05, 0.0}}; }
inline ParamSet set_d() { return {{1.0, 3.0, 0.0}, {-0.1625, 0.5}}; }

// integrals over the line, a = sqrt(sigma):
//   int sech^2(ax)       = 2/a          int sech^4(ax)       = 4/(3a)
//   int sech^6(ax)       = 16/(15a)     int sech^8(ax)       = 32/(35a)
//   int sech^2 tanh^2    = 2/(3a)       int sech^4 tanh^2    = 4/(15a)
struct SechMoments {
  double a;
  double s2() const { return 2.0 / a; }
  double s4() const { return 4.0 / (3.0 * a); }
  double s6() const { return 16.0 / (15.0 * a); }
  double s8() const { return 32.0 / (35.0 * a); }
  double s2t2() const { return 2.0 / (3.0 * a); }
  double s4t2() const { return 4.0 / (15.0 * a); }
};

struct ClosedFormOracle {
  double q1, q2, e;
  double norm_eps_hat_cubed;  // L2 norm of e_hat^3
};

inline ClosedFormOracle oracle_invariants(const sbwave::PhysParams<double>& phys,
                                          const sbwave::WaveParams<double>& wave) {
  const auto s = sbwave::derive_scales(phys, wave);
  const SechMoments m{s.c2};
  const double c1sq = s.c1 * s.c1;
  const double n0 = 6.0 * phys.alpha / phys.beta * s.sigma;  // n = -n0 sech^2
  ClosedFormOracle o;
  o.q2 = c1sq * m.s2();
  o.q1 = wave.v * n0 * n0 * m.s4() + s.q * c1sq * m.s2();
  o.e = c1sq * s.sigma * m.s2t2() + s.q * s.q * c1sq * m.s2()  // |eps_x|^2
        - n0 * c1sq * m.s4()                                   // n |eps|^2
        + phys.gamma / 2.0 * c1sq * c1sq * m.s4()              // (gamma/2)|eps|^4
        + n0 * n0 / 2.0 * m.s4()                               // n^2/2
        + phys.alpha / 2.0 * 4.0 * n0 * n0 * s.sigma * m.s4t2()  // (alpha/2) n_x^2
        - phys.beta / 3.0 * n0 * n0 * n0 * m.s6()              // (beta/3) n^3
        + wave.v * wave.v / 2.0 * n0 * n0 * m.s4();            // w^2/2
  o.norm_eps_hat_cubed = std::sqrt(c1sq * c1sq * c1sq * m.s6());
  return o;
}

/// Smooth decaying pseudo-random field: band-limited coefficients shaped by a
/// Gaussian envelope in x. Same rng stream -> same field.
inline Vec<double> random_decaying(const Grid<double>& grid, std::mt19937_64& rng,
                                   double k_cut, double envelope_width) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Vec<double> k = sbwave::wavenumbers(grid);
  CVec<double> spec = CVec<double>::Zero(grid.n_points);
  for (Index j = 0; j < grid.n_points; ++j)
    if (std::abs(k[j]) <= k_cut) spec[j] = std::complex<double>(gauss(rng), gauss(rng));
  sbwave::Fourier<double> fft;
  Vec<double> field = fft.inv_real(spec);
  const Vec<double> x = sbwave::coordinates(grid);
  for (Index j = 0; j < grid.n_points; ++j)
    field[j] *= std::exp(-x[j] * x[j] / (2.0 * envelope_width * envelope_width));
  const double norm = sbwave::l2_norm(grid, field);
  if (norm > 0) field /= norm;
  return field;
}

}  // namespace testsupport
