#pragma once

#include <cmath>

#include "sbwave/fourier.hpp"
#include "sbwave/grid.hpp"
#include "sbwave/operators.hpp"
#include "sbwave/params.hpp"
#include "sbwave/profile.hpp"

namespace sbwave {

// The second variation of E - v Q1 - omega Q2 at the wave is exercised only
// through its quadratic form, evaluated by two independent routes:
//
//   hform_direct     assembles <H psi, psi> from the block operator, with the
//                    third component passed via its derivative psi3_x;
//   hform_decomposed uses the phase-factored coordinates psi1 = e^{i v x/2}
//                    (y1 + i y2), psi2 = z2 and evaluates
//                    <L1 y1,y1> + <L2 y2,y2> + <L3 z2,z2>
//                    + int (v z2 + z3')^2 + int (2 e_hat y1/sqrt(eta)
//                                                 + sqrt(eta) z2)^2.
//
// The two agree identically in the continuum; numerically they match to
// roundoff for decaying fields, which is what the equality tests assert.

/// Test vector in the phase-factored coordinates (y1, y2, z2, z3').
template <typename Scalar>
struct DecomposedVector {
  Vec<Scalar> y1;
  Vec<Scalar> y2;
  Vec<Scalar> z2;
  Vec<Scalar> z3x;
};

template <typename Scalar>
struct DirectVector {
  CVec<Scalar> psi1;
  Vec<Scalar> psi2;
  Vec<Scalar> psi3x;
};

template <typename Scalar>
DirectVector<Scalar> to_direct(const DecomposedVector<Scalar>& d,
                               const DerivedScales<Scalar>& scales,
                               const Grid<Scalar>& grid) {
  const Vec<Scalar> x = coordinates(grid);
  DirectVector<Scalar> out;
  out.psi1.resize(grid.n_points);
  for (Index j = 0; j < grid.n_points; ++j)
    out.psi1[j] = std::polar(Scalar(1), scales.q * x[j]) *
                  std::complex<Scalar>(d.y1[j], d.y2[j]);
  out.psi2 = d.z2;
  out.psi3x = d.z3x;
  return out;
}

template <typename Scalar>
Scalar hform_direct(const CVec<Scalar>& psi1, const Vec<Scalar>& psi2,
                    const Vec<Scalar>& psi3x, const Profile<Scalar>& profile,
                    const PhysParams<Scalar>& phys, const WaveParams<Scalar>& wave,
                    const Grid<Scalar>& grid) {
  Fourier<Scalar> fft;
  const CVec<Scalar> psi1_x = fft.derivative(psi1, grid, 1);
  const Vec<Scalar> psi2_x = fft.derivative(psi2, grid, 1);
  Scalar sum = 0;
  for (Index j = 0; j < grid.n_points; ++j) {
    const std::complex<Scalar> e = profile.eps[j];
    const Scalar e2 = std::norm(e);
    const Scalar p1sq = std::norm(psi1[j]);
    sum += Scalar(2) * std::norm(psi1_x[j]) +
           (Scalar(2) * profile.n[j] - Scalar(2) * wave.omega) * p1sq +
           Scalar(2) * phys.gamma *
               (Scalar(2) * e2 * p1sq + std::real(e * e * std::conj(psi1[j] * psi1[j]))) -
           Scalar(2) * wave.v * std::imag(psi1_x[j] * std::conj(psi1[j])) +
           Scalar(4) * psi2[j] * std::real(std::conj(e) * psi1[j]) +
           phys.alpha * psi2_x[j] * psi2_x[j] +
           (Scalar(1) + Scalar(2) * phys.beta * profile.n[j]) * psi2[j] * psi2[j] +
           Scalar(2) * wave.v * psi2[j] * psi3x[j] + psi3x[j] * psi3x[j];
  }
  return grid.spacing * sum;
}

template <typename Scalar>
Scalar hform_direct(const DirectVector<Scalar>& psi, const Profile<Scalar>& profile,
                    const PhysParams<Scalar>& phys, const WaveParams<Scalar>& wave,
                    const Grid<Scalar>& grid) {
  return hform_direct(psi.psi1, psi.psi2, psi.psi3x, profile, phys, wave, grid);
}

/// The five summands of the decomposed form, kept apart so the exact-sum
/// property is assertable.
template <typename Scalar>
struct DecomposedParts {
  Scalar l1{};
  Scalar l2{};
  Scalar l3{};
  Scalar square_wave{};      // int (v z2 + z3')^2
  Scalar square_coupling{};  // int (2 e_hat y1 / sqrt(eta) + sqrt(eta) z2)^2
  Scalar total() const { return l1 + l2 + l3 + square_wave + square_coupling; }
};

template <typename Scalar>
DecomposedParts<Scalar> hform_decomposed_parts(const DecomposedVector<Scalar>& d,
                                               const Profile<Scalar>& profile,
                                               const PhysParams<Scalar>& phys,
                                               const DerivedScales<Scalar>& scales,
                                               const Grid<Scalar>& grid) {
  Fourier<Scalar> fft;
  const Scalar v = Scalar(2) * scales.q;
  const Scalar root_eta = std::sqrt(scales.eta);

  auto quad_form = [&](OperatorKind kind, const Vec<Scalar>& y) {
    const Scalar c = operator_diffusion(kind, phys);
    const Scalar shift = operator_shift(kind, phys, scales);
    const Vec<Scalar> pot = operator_potential(kind, profile, phys, scales);
    const Vec<Scalar> y_x = fft.derivative(y, grid, 1);
    Scalar acc = 0;
    for (Index j = 0; j < grid.n_points; ++j)
      acc += c * y_x[j] * y_x[j] + (shift + pot[j]) * y[j] * y[j];
    return grid.spacing * acc;
  };

  DecomposedParts<Scalar> parts;
  parts.l1 = quad_form(OperatorKind::L1, d.y1);
  parts.l2 = quad_form(OperatorKind::L2, d.y2);
  parts.l3 = quad_form(OperatorKind::L3, d.z2);
  Scalar sw = 0, sc = 0;
  for (Index j = 0; j < grid.n_points; ++j) {
    const Scalar a = v * d.z2[j] + d.z3x[j];
    const Scalar b = Scalar(2) * profile.eps_hat[j] * d.y1[j] / root_eta +
                     root_eta * d.z2[j];
    sw += a * a;
    sc += b * b;
  }
  parts.square_wave = grid.spacing * sw;
  parts.square_coupling = grid.spacing * sc;
  return parts;
}

template <typename Scalar>
Scalar hform_decomposed(const DecomposedVector<Scalar>& d, const Profile<Scalar>& profile,
                        const PhysParams<Scalar>& phys,
                        const DerivedScales<Scalar>& scales, const Grid<Scalar>& grid) {
  return hform_decomposed_parts(d, profile, phys, scales, grid).total();
}

/// The single negative direction used in the spectral argument:
/// y1 = e_hat^2, z2 = 2 n e_hat, z3' = -v z2.
template <typename Scalar>
DecomposedVector<Scalar> negative_direction(const Profile<Scalar>& profile,
                                            const DerivedScales<Scalar>& scales) {
  DecomposedVector<Scalar> d;
  d.y1 = profile.eps_hat.array().square().matrix();
  d.y2 = Vec<Scalar>::Zero(profile.eps_hat.size());
  d.z2 = (Scalar(2) * profile.n.array() * profile.eps_hat.array()).matrix();
  d.z3x = -Scalar(2) * scales.q * d.z2;
  return d;
}

}  // namespace sbwave
