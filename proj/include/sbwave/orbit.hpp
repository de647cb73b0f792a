#pragma once

#include <cmath>
#include <random>
#include <tuple>
#include <vector>

#include "sbwave/evolve.hpp"
#include "sbwave/fourier.hpp"
#include "sbwave/functionals.hpp"
#include "sbwave/grid.hpp"
#include "sbwave/params.hpp"
#include "sbwave/profile.hpp"

namespace sbwave {

// Orbital distance in the working metric
//
//   dist^2(s1, s2) = || e - e^{-i s2} e_Phi(. - s1) ||_{H1}^2
//                    + || n - n_Phi(. - s1) ||_{H1}^2
//                    + || w - w_Phi(. - s1) ||_{L2}^2,
//
// minimized over the translation s1 and the phase s2. The third component of
// the state norm uses w = phi_x, which stays square integrable for v != 0.
//
// The whole computation lives in transform space: a correlation scan gives
// the metric at every grid shift at once, and the winner is polished by a
// safeguarded Newton iteration on d(dist^2)/d s1. The final value is
// assembled from mode-wise differences (never as a difference of large
// norms), so distances near the orbit come out at roundoff instead of at the
// cancellation floor.

template <typename Scalar>
struct OrbitalFit {
  Scalar distance{};
  Scalar s1{};
  Scalar s2{};  // in [0, 2 pi)
};

template <typename Scalar>
struct PhaseFit {
  Scalar s2{};
  bool degenerate{false};  // cross term below 1e-14: any phase optimal
};

/// Group action (s1, s2): translate all fields by s1 (spectral, exact for
/// band-limited data) and rotate the phase of e by e^{-i s2}.
template <typename Scalar>
State<Scalar> apply_symmetry(const State<Scalar>& state, Scalar s1, Scalar s2) {
  Fourier<Scalar> fft;
  State<Scalar> out = state;
  out.eps = fft.shift(state.eps, state.grid, s1);
  out.eps *= std::polar(Scalar(1), -s2);
  out.n = fft.shift(state.n, state.grid, s1);
  out.w = fft.shift(state.w, state.grid, s1);
  return out;
}

namespace detail {

template <typename Scalar>
Vec<Scalar> h1_weights(const Grid<Scalar>& g) {
  Vec<Scalar> w = wavenumbers(g);
  const Index nyq = g.n_points / 2;
  for (Index j = 0; j < g.n_points; ++j) {
    const Scalar kd = (j == nyq) ? Scalar(0) : w[j];
    w[j] = Scalar(1) + kd * kd;
  }
  return w;
}

template <typename Scalar>
std::complex<Scalar> h1_cross_term(const CVec<Scalar>& a_spec, const CVec<Scalar>& b_spec,
                                   const Grid<Scalar>& g) {
  const Vec<Scalar> w = h1_weights(g);
  std::complex<Scalar> z(0, 0);
  for (Index j = 0; j < g.n_points; ++j)
    z += w[j] * a_spec[j] * std::conj(b_spec[j]);
  return z * (g.spacing / Scalar(g.n_points));
}

}  // namespace detail

/// Phase aligning the state's e against the reference's in H1;
/// s2* = -arg <e_state, e_ref>_{H1}, reported in [0, 2 pi).
template <typename Scalar>
PhaseFit<Scalar> optimal_phase(const State<Scalar>& state, const State<Scalar>& reference) {
  Fourier<Scalar> fft;
  const std::complex<Scalar> z = detail::h1_cross_term(
      fft.fwd(state.eps), fft.fwd(reference.eps), state.grid);
  PhaseFit<Scalar> fit;
  if (std::abs(z) < Scalar(1e-14)) {
    fit.degenerate = true;
    fit.s2 = 0;
    return fit;
  }
  fit.s2 = -std::arg(z);
  if (fit.s2 < 0) fit.s2 += Scalar(2) * Scalar(EIGEN_PI);
  return fit;
}

template <typename Scalar>
OrbitalFit<Scalar> orbital_distance(const State<Scalar>& state,
                                    const Profile<Scalar>& profile) {
  using C = std::complex<Scalar>;
  const Grid<Scalar>& g = state.grid;
  const Index n = g.n_points;
  if (profile.eps.size() != n)
    throw DomainError("orbital_distance: state and profile grids differ");
  Fourier<Scalar> fft;
  const CVec<Scalar> es = fft.fwd(state.eps), ep = fft.fwd(profile.eps);
  const CVec<Scalar> ns = fft.fwd(state.n), np = fft.fwd(profile.n);
  const CVec<Scalar> ws = fft.fwd(state.w), wp = fft.fwd(profile.w);
  const Vec<Scalar> wh1 = detail::h1_weights(g);
  const Vec<Scalar> k = wavenumbers(g);
  const Scalar quad = g.spacing / Scalar(n);

  // weighted correlation spectra; e kept apart for the phase alignment
  CVec<Scalar> ae(n), anw(n);
  Scalar p_const = 0;
  for (Index j = 0; j < n; ++j) {
    ae[j] = wh1[j] * es[j] * std::conj(ep[j]);
    anw[j] = wh1[j] * ns[j] * std::conj(np[j]) + ws[j] * std::conj(wp[j]);
    p_const += wh1[j] * (std::norm(es[j]) + std::norm(ep[j])) +
               wh1[j] * (std::norm(ns[j]) + std::norm(np[j])) + std::norm(ws[j]) +
               std::norm(wp[j]);
  }
  p_const *= quad;

  Fourier<Scalar> corr_fft;
  const CVec<Scalar> ce = corr_fft.inv(ae);
  const CVec<Scalar> cnw = corr_fft.inv(anw);

  // coarse scan over every grid shift; ties go to the smaller s1
  auto shift_of = [&](Index j) {
    return (j <= n / 2) ? Scalar(j) * g.spacing : Scalar(j - n) * g.spacing;
  };
  Index best_j = 0;
  Scalar best_m = std::numeric_limits<Scalar>::max();
  for (Index j = 0; j < n; ++j) {
    const Scalar m =
        p_const - 2 * g.spacing * (std::abs(ce[j]) + cnw[j].real());
    if (m < best_m || (m == best_m && shift_of(j) < shift_of(best_j))) {
      best_m = m;
      best_j = j;
    }
  }
  const Scalar s1_coarse = shift_of(best_j);

  // metric^2 and aligned phase at an arbitrary shift, from mode differences
  auto evaluate = [&](Scalar s1) {
    C z(0, 0);
    for (Index j = 0; j < n; ++j) z += ae[j] * std::polar(Scalar(1), k[j] * s1);
    const Scalar s2 = (std::abs(z) < Scalar(1e-300)) ? Scalar(0) : -std::arg(z);
    const C phase = std::polar(Scalar(1), -s2);
    Scalar acc = 0;
    for (Index j = 0; j < n; ++j) {
      const C shift = std::polar(Scalar(1), -k[j] * s1);
      acc += wh1[j] * std::norm(es[j] - phase * shift * ep[j]) +
             wh1[j] * std::norm(ns[j] - shift * np[j]) +
             std::norm(ws[j] - shift * wp[j]);
    }
    return std::make_pair(quad * acc, s2);
  };

  // Newton on d(metric^2)/d s1; the function is smooth and locally quadratic
  auto derivative_pair = [&](Scalar s1) {
    C z(0, 0), z1(0, 0), z2(0, 0);  // C_e and its two s1 derivatives
    Scalar r1 = 0, r2 = 0;          // Re parts for the n and w terms
    for (Index j = 0; j < n; ++j) {
      const C ph = std::polar(Scalar(1), k[j] * s1);
      const C ik(0, k[j]);
      z += ae[j] * ph;
      z1 += ik * ae[j] * ph;
      z2 += ik * ik * ae[j] * ph;
      r1 += std::real(ik * anw[j] * ph);
      r2 += std::real(ik * ik * anw[j] * ph);
    }
    const Scalar az = std::abs(z);
    Scalar f = -2 * r1, fp = -2 * r2;
    if (az > Scalar(1e-300)) {
      const Scalar re_zz1 = std::real(std::conj(z) * z1);
      f += -2 * re_zz1 / az;
      fp += -2 * ((std::norm(z1) + std::real(std::conj(z) * z2)) / az -
                  re_zz1 * re_zz1 / (az * az * az));
    }
    return std::make_pair(f, fp);
  };

  const Scalar lo = s1_coarse - g.spacing, hi = s1_coarse + g.spacing;
  Scalar s1_ref = s1_coarse;
  // parabola through the three contiguous coarse values seeds the iteration
  {
    const Index jm = (best_j + n - 1) % n, jp = (best_j + 1) % n;
    auto coarse_at = [&](Index j) {
      return p_const - 2 * g.spacing * (std::abs(ce[j]) + cnw[j].real());
    };
    const Scalar mm = coarse_at(jm), m0 = coarse_at(best_j), mp = coarse_at(jp);
    const Scalar denom = mm - 2 * m0 + mp;
    if (denom > Scalar(0))
      s1_ref = s1_coarse + g.spacing / 2 * (mm - mp) / denom;
  }
  for (int it = 0; it < 60; ++it) {
    const auto [f, fp] = derivative_pair(s1_ref);
    if (!(fp > Scalar(0))) break;
    const Scalar delta = f / fp;
    s1_ref -= delta;
    if (s1_ref < lo) s1_ref = lo;
    if (s1_ref > hi) s1_ref = hi;
    if (std::abs(delta) < Scalar(1e-15) * std::max(Scalar(1), std::abs(s1_ref))) break;
  }

  // the refined fit is never allowed to report worse than the coarse best
  const auto [m_ref, s2_ref] = evaluate(s1_ref);
  const auto [m_coarse, s2_coarse] = evaluate(s1_coarse);
  OrbitalFit<Scalar> fit;
  if (m_ref <= m_coarse) {
    fit.distance = std::sqrt(std::max(Scalar(0), m_ref));
    fit.s1 = s1_ref;
    fit.s2 = s2_ref;
  } else {
    fit.distance = std::sqrt(std::max(Scalar(0), m_coarse));
    fit.s1 = s1_coarse;
    fit.s2 = s2_coarse;
  }
  if (fit.s2 < 0) fit.s2 += Scalar(2) * Scalar(EIGEN_PI);
  return fit;
}

/// Working-metric norm of a state (e in H1, n in H1, w in L2).
template <typename Scalar>
Scalar x_norm(const State<Scalar>& s) {
  Fourier<Scalar> fft;
  const Scalar he = fft.h1_norm(s.eps, s.grid);
  const Scalar hn = fft.h1_norm(s.n, s.grid);
  const Scalar lw = l2_norm(s.grid, s.w);
  return std::sqrt(he * he + hn * hn + lw * lw);
}

template <typename Scalar>
Scalar x_metric(const State<Scalar>& a, const State<Scalar>& b) {
  State<Scalar> d = a;
  d.eps -= b.eps;
  d.n -= b.n;
  d.w -= b.w;
  return x_norm(d);
}

enum class PerturbKind { amplitude, bump, noise };

// amplitude: e -> (1 + amount) e
// bump:      n -> n + amount * max|n| * exp(-(x-center)^2 / (2 width^2))
// noise:     e -> e + band-limited seeded noise scaled to
//            amount * ||e||_{H1}; modes with |k| <= 5 sqrt(sigma)
template <typename Scalar>
struct PerturbSpec {
  PerturbKind kind{PerturbKind::amplitude};
  Scalar amount{Scalar(0.01)};
  Scalar center{0};
  Scalar width{1};
  std::uint64_t seed{12345};
};

/// Applies the perturbation and returns the exact initial working-metric
/// distance to the unperturbed state.
template <typename Scalar>
Scalar perturb_state(State<Scalar>& state, const DerivedScales<Scalar>& scales,
                     const PerturbSpec<Scalar>& spec) {
  const State<Scalar> base = state;
  switch (spec.kind) {
    case PerturbKind::amplitude:
      state.eps *= (Scalar(1) + spec.amount);
      break;
    case PerturbKind::bump: {
      const Scalar height = spec.amount * state.n.cwiseAbs().maxCoeff();
      const Vec<Scalar> x = coordinates(state.grid);
      for (Index j = 0; j < state.grid.n_points; ++j) {
        const Scalar dx = x[j] - spec.center;
        state.n[j] += height * std::exp(-dx * dx / (2 * spec.width * spec.width));
      }
      break;
    }
    case PerturbKind::noise: {
      std::mt19937_64 rng(spec.seed);
      std::normal_distribution<Scalar> gauss(0, 1);
      const Vec<Scalar> k = wavenumbers(state.grid);
      const Scalar cutoff = Scalar(5) * scales.c2;
      CVec<Scalar> spec_noise = CVec<Scalar>::Zero(state.grid.n_points);
      for (Index j = 0; j < state.grid.n_points; ++j)
        if (std::abs(k[j]) <= cutoff)
          spec_noise[j] = std::complex<Scalar>(gauss(rng), gauss(rng));
      Fourier<Scalar> fft;
      CVec<Scalar> noise = fft.inv(spec_noise);
      const Scalar target = spec.amount * fft.h1_norm(state.eps, state.grid);
      const Scalar have = fft.h1_norm(noise, state.grid);
      if (have > Scalar(0)) state.eps += (target / have) * noise;
      break;
    }
  }
  return x_metric(state, base);
}

/// One sampled point of the orbital-distance time series.
template <typename Scalar>
struct OrbitSample {
  Scalar t{};
  Scalar distance{};
  Scalar s1{};
  Scalar s2{};
};

template <typename Scalar>
struct StabilityReport {
  Scalar perturbation_size{};
  Scalar max_distance{};
  Scalar t_end{};
  bool certified_region{false};
  std::array<Scalar, 3> conservation_drift{0, 0, 0};
  std::vector<OrbitSample<Scalar>> series;
};

// Perturb the wave, evolve, and track the distance to the group orbit of the
// unperturbed profile; the supremum over time is approximated by the max over
// the record cadence.
template <typename Scalar>
StabilityReport<Scalar> stability_experiment(const PhysParams<Scalar>& phys,
                                             const WaveParams<Scalar>& wave,
                                             const PerturbSpec<Scalar>& perturb,
                                             Scalar t_end,
                                             const IntegratorConfig<Scalar>& cfg,
                                             const Grid<Scalar>* grid_override = nullptr) {
  if (!(t_end >= cfg.dt))
    throw DomainError("stability_experiment: t_end must be >= dt");
  if (cfg.record_every < 1 || !(cfg.dt * Scalar(cfg.record_every) <= Scalar(1)))
    throw DomainError("stability_experiment: need 1 <= record_every with dt*record_every <= 1");
  const DerivedScales<Scalar> scales = derive_scales(phys, wave);
  const Grid<Scalar> grid =
      grid_override ? *grid_override : make_grid(scales.sigma);
  const Profile<Scalar> profile = sample_profile(phys, wave, scales, grid);

  State<Scalar> state = init_state(profile, grid);
  const State<Scalar> unperturbed = state;
  const Scalar delta0 = perturb_state(state, scales, perturb);
  if (delta0 > Scalar(0.05) * x_norm(unperturbed))
    throw DomainError("stability_experiment: perturbation exceeds 5% of the wave norm");

  StabilityReport<Scalar> report;
  report.perturbation_size = delta0;
  report.t_end = t_end;
  report.certified_region = check_stability_criterion(phys, wave).stable_certified;

  Integrator<Scalar> integ(grid, phys, cfg);
  ConservationLog<Scalar> log;
  log.initial = invariant_triple(state.eps, state.n, state.w, phys, grid);
  log.samples.emplace_back(state.t, log.initial);

  auto sample = [&](const State<Scalar>& s) {
    const OrbitalFit<Scalar> fit = orbital_distance(s, profile);
    report.series.push_back({s.t, fit.distance, fit.s1, fit.s2});
    report.max_distance = std::max(report.max_distance, fit.distance);
  };
  sample(state);

  const long n_steps = std::lround(double(t_end / cfg.dt));
  for (long i = 1; i <= n_steps; ++i) {
    integ.step(state);
    if (i % cfg.record_every == 0 || i == n_steps) {
      sample(state);
      log.samples.emplace_back(state.t,
                               invariant_triple(state.eps, state.n, state.w, phys, grid));
    }
  }
  report.conservation_drift = sbwave::conservation_drift(log);
  return report;
}

}  // namespace sbwave
