#pragma once

#include <cmath>
#include <vector>

#include "sbwave/fourier.hpp"
#include "sbwave/grid.hpp"
#include "sbwave/params.hpp"

namespace sbwave {

/// The three conserved functionals of the flow.
template <typename Scalar>
struct InvariantTriple {
  Scalar e{};
  Scalar q1{};
  Scalar q2{};
};

// E = int |e_x|^2 + n |e|^2 + (gamma/2)|e|^4 + n^2/2 + (alpha/2) n_x^2
//       + (beta/3) n^3 + w^2/2 dx
template <typename Scalar>
Scalar energy(const CVec<Scalar>& eps, const Vec<Scalar>& n, const Vec<Scalar>& w,
              const PhysParams<Scalar>& phys, const Grid<Scalar>& grid) {
  Fourier<Scalar> fft;
  const CVec<Scalar> eps_x = fft.derivative(eps, grid, 1);
  const Vec<Scalar> n_x = fft.derivative(n, grid, 1);
  Scalar sum = 0;
  for (Index j = 0; j < grid.n_points; ++j) {
    const Scalar e2 = std::norm(eps[j]);
    sum += std::norm(eps_x[j]) + n[j] * e2 + phys.gamma / Scalar(2) * e2 * e2 +
           n[j] * n[j] / Scalar(2) + phys.alpha / Scalar(2) * n_x[j] * n_x[j] +
           phys.beta / Scalar(3) * n[j] * n[j] * n[j] + w[j] * w[j] / Scalar(2);
  }
  return grid.spacing * sum;
}

/// Q2 = int |e|^2 dx
template <typename Scalar>
Scalar charge_q2(const CVec<Scalar>& eps, const Grid<Scalar>& grid) {
  return grid.spacing * eps.squaredNorm();
}

/// Q1 = -int w n dx + Im int e_x conj(e) dx, with w standing for phi_x.
template <typename Scalar>
Scalar charge_q1(const CVec<Scalar>& eps, const Vec<Scalar>& n, const Vec<Scalar>& w,
                 const Grid<Scalar>& grid) {
  Fourier<Scalar> fft;
  const CVec<Scalar> eps_x = fft.derivative(eps, grid, 1);
  Scalar sum = 0;
  for (Index j = 0; j < grid.n_points; ++j)
    sum += -w[j] * n[j] + std::imag(eps_x[j] * std::conj(eps[j]));
  return grid.spacing * sum;
}

template <typename Scalar>
InvariantTriple<Scalar> invariant_triple(const CVec<Scalar>& eps, const Vec<Scalar>& n,
                                         const Vec<Scalar>& w,
                                         const PhysParams<Scalar>& phys,
                                         const Grid<Scalar>& grid) {
  InvariantTriple<Scalar> t;
  t.e = energy(eps, n, w, phys, grid);
  t.q1 = charge_q1(eps, n, w, grid);
  t.q2 = charge_q2(eps, grid);
  return t;
}

/// Gradient of d(omega, v) = (E - v Q1 - omega Q2) along the wave family.
template <typename Scalar>
struct DGradient {
  Scalar d_omega{};
  Scalar d_v{};
};

// Closed forms obtained by integrating the sech profiles:
//   d_omega = -Q2(Phi) = -(12 alpha / beta) sqrt(sigma) eta
//   d_v     = -Q1(Phi) = -(48 alpha^2/beta^2) v sigma^{3/2}
//                        - (6 alpha / beta) v sqrt(sigma) eta
template <typename Scalar>
DGradient<Scalar> d_gradient_closed(const PhysParams<Scalar>& phys,
                                    const WaveParams<Scalar>& wave) {
  const DerivedScales<Scalar> s = derive_scales(phys, wave);
  const Scalar u = phys.alpha / phys.beta;
  DGradient<Scalar> g;
  g.d_omega = -Scalar(12) * u * s.c2 * s.eta;
  g.d_v = -Scalar(48) * u * u * wave.v * s.sigma * s.c2 -
          Scalar(6) * u * wave.v * s.c2 * s.eta;
  return g;
}

enum class HessianMode { closed_form, finite_difference };

template <typename Scalar>
struct HessianReport {
  Scalar d_omega{};
  Scalar d_v{};
  Scalar d_oo{};
  Scalar d_ov{};
  Scalar d_vo{};
  Scalar d_vv{};
  Scalar det{};      // d_oo*d_vv - d_ov*d_vo from the stored entries
  int p_dpp{};       // positive eigenvalues of the symmetrized 2x2
  bool degenerate{false};
  HessianMode mode{HessianMode::closed_form};
};

/// Positive-eigenvalue count of the symmetrized matrix
/// [[d_oo, s], [s, d_vv]] with s = (d_ov + d_vo)/2.
template <typename Scalar>
int symmetrized_positive_count(Scalar d_oo, Scalar d_ov, Scalar d_vo, Scalar d_vv) {
  const Scalar s = (d_ov + d_vo) / Scalar(2);
  const Scalar tr = d_oo + d_vv;
  const Scalar det_sym = d_oo * d_vv - s * s;
  const Scalar disc = std::sqrt(std::max(Scalar(0), tr * tr - Scalar(4) * det_sym));
  const Scalar lam1 = (tr + disc) / Scalar(2);
  const Scalar lam2 = (tr - disc) / Scalar(2);
  return int(lam1 > Scalar(0)) + int(lam2 > Scalar(0));
}

namespace detail {

template <typename Scalar>
void finalize_hessian(HessianReport<Scalar>& r) {
  r.det = r.d_oo * r.d_vv - r.d_ov * r.d_vo;
  r.p_dpp = symmetrized_positive_count(r.d_oo, r.d_ov, r.d_vo, r.d_vv);
  const Scalar biggest = std::max(std::max(std::abs(r.d_oo), std::abs(r.d_vv)),
                                  std::max(std::abs(r.d_ov), std::abs(r.d_vo)));
  r.degenerate = std::abs(r.det) < Scalar(1e-10) * biggest * biggest;
}

}  // namespace detail

// Hessian of d. The closed-form entries come from differentiating the
// d-gradient expressions with sigma_omega = -1, sigma_v = -v/2,
// eta_omega = 4 alpha, eta_v = 2 v (alpha - 1). The transcription keeps the
// asymmetric d_ov != d_vo that appears whenever beta != 3 alpha; the
// positive-eigenvalue count uses the symmetrized matrix.
template <typename Scalar>
HessianReport<Scalar> d_hessian(const PhysParams<Scalar>& phys,
                                const WaveParams<Scalar>& wave,
                                HessianMode mode = HessianMode::closed_form,
                                bool richardson = false) {
  HessianReport<Scalar> r;
  r.mode = mode;
  const DGradient<Scalar> g0 = d_gradient_closed(phys, wave);
  r.d_omega = g0.d_omega;
  r.d_v = g0.d_v;

  if (mode == HessianMode::closed_form) {
    const DerivedScales<Scalar> s = derive_scales(phys, wave);
    const Scalar u = phys.alpha / phys.beta;
    const Scalar rs = s.c2;  // sqrt(sigma)
    const Scalar v = wave.v;
    r.d_oo = Scalar(6) * u * (s.eta - Scalar(8) * phys.alpha * s.sigma) / rs;
    r.d_ov = Scalar(3) * u * v * s.eta / rs -
             Scalar(24) * u * v * (phys.alpha - Scalar(1)) * rs;
    r.d_vo = Scalar(3) * u * v * s.eta / rs -
             Scalar(24) * u * v * (phys.alpha - Scalar(3) * u) * rs;
    r.d_vv = -Scalar(48) * u * u * s.sigma * rs + Scalar(36) * u * u * v * v * rs -
             Scalar(6) * u * rs * s.eta -
             Scalar(12) * u * v * v * (phys.alpha - Scalar(1)) * rs +
             Scalar(3) * u * v * v / Scalar(2) * s.eta / rs;
    detail::finalize_hessian(r);
    return r;
  }

  const Scalar h = Scalar(1e-5) * std::max(Scalar(1), std::max(std::abs(wave.omega),
                                                               std::abs(wave.v)));
  auto central = [&](Scalar step) {
    WaveParams<Scalar> wp = wave, wm = wave;
    wp.omega += step;
    wm.omega -= step;
    const DGradient<Scalar> go_p = d_gradient_closed(phys, wp);
    const DGradient<Scalar> go_m = d_gradient_closed(phys, wm);
    wp = wave;
    wm = wave;
    wp.v += step;
    wm.v -= step;
    const DGradient<Scalar> gv_p = d_gradient_closed(phys, wp);
    const DGradient<Scalar> gv_m = d_gradient_closed(phys, wm);
    return std::array<Scalar, 4>{
        (go_p.d_omega - go_m.d_omega) / (2 * step),  // d_oo
        (gv_p.d_omega - gv_m.d_omega) / (2 * step),  // d_ov
        (go_p.d_v - go_m.d_v) / (2 * step),          // d_vo
        (gv_p.d_v - gv_m.d_v) / (2 * step)};         // d_vv
  };
  std::array<Scalar, 4> d = central(h);
  if (richardson) {
    const std::array<Scalar, 4> dh = central(h / 2);
    for (int i = 0; i < 4; ++i) d[i] = (Scalar(4) * dh[i] - d[i]) / Scalar(3);
  }
  r.d_oo = d[0];
  r.d_ov = d[1];
  r.d_vo = d[2];
  r.d_vv = d[3];
  detail::finalize_hessian(r);
  return r;
}

/// det(d'') through the factored route
/// -36 (alpha/beta)^2 [ (eta - 4 alpha sigma)^2
///                      + 8 (alpha/beta) sigma (1 + 5v^2 - 12 alpha sigma
///                                              - 2 beta alpha sigma) ];
/// algebraically identical to the entry product, kept as a cross-check.
template <typename Scalar>
Scalar hessian_det_factored(const PhysParams<Scalar>& phys, const WaveParams<Scalar>& wave) {
  const DerivedScales<Scalar> s = derive_scales(phys, wave);
  const Scalar u = phys.alpha / phys.beta;
  const Scalar inner = (s.eta - Scalar(4) * phys.alpha * s.sigma) *
                           (s.eta - Scalar(4) * phys.alpha * s.sigma) +
                       Scalar(8) * u * s.sigma *
                           (Scalar(1) + Scalar(5) * wave.v * wave.v -
                            Scalar(12) * phys.alpha * s.sigma -
                            Scalar(2) * phys.beta * phys.alpha * s.sigma);
  return -Scalar(36) * u * u * inner;
}

/// Same determinant expanded in powers of sigma and eta; third route.
template <typename Scalar>
Scalar hessian_det_expanded(const PhysParams<Scalar>& phys, const WaveParams<Scalar>& wave) {
  const DerivedScales<Scalar> s = derive_scales(phys, wave);
  const Scalar u = phys.alpha / phys.beta;
  const Scalar u2 = u * u, u3 = u2 * u;
  return -Scalar(288) * u3 * s.eta * s.sigma - Scalar(36) * u2 * s.eta * s.eta +
         Scalar(2304) * u3 * phys.alpha * s.sigma * s.sigma +
         Scalar(288) * u2 * phys.alpha * s.sigma * s.eta -
         Scalar(1728) * u3 * wave.v * wave.v * s.sigma;
}

/// One lattice point of a parameter-region scan.
template <typename Scalar>
struct RegionRow {
  Scalar omega{};
  Scalar v{};
  bool exists{false};
  bool stable{false};
  bool has_hessian{false};
  Scalar det{};
  int p_dpp{};
  Scalar gamma_star{};
};

// Row-major scan over the (omega, v) lattice, endpoints included. An axis may
// degenerate to a single value; a genuine range needs at least two samples.
template <typename Scalar>
std::vector<RegionRow<Scalar>> region_scan(const PhysParams<Scalar>& phys,
                                           Scalar omega_min, Scalar omega_max,
                                           Scalar v_min, Scalar v_max, Index n_omega,
                                           Index n_v) {
  auto check_axis = [](Scalar lo, Scalar hi, Index n, const char* name) {
    if (n < 1 || (lo != hi && n < 2) || (lo == hi && n != 1))
      throw DomainError(std::string("region_scan: bad resolution for axis ") + name);
    if (lo > hi) throw DomainError(std::string("region_scan: empty range for axis ") + name);
  };
  check_axis(omega_min, omega_max, n_omega, "omega");
  check_axis(v_min, v_max, n_v, "v");

  std::vector<RegionRow<Scalar>> rows;
  rows.reserve(static_cast<size_t>(n_omega) * static_cast<size_t>(n_v));
  for (Index i = 0; i < n_omega; ++i) {
    const Scalar omega =
        (n_omega == 1) ? omega_min
                       : omega_min + (omega_max - omega_min) * Scalar(i) / Scalar(n_omega - 1);
    for (Index j = 0; j < n_v; ++j) {
      const Scalar v =
          (n_v == 1) ? v_min : v_min + (v_max - v_min) * Scalar(j) / Scalar(n_v - 1);
      RegionRow<Scalar> row;
      row.omega = omega;
      row.v = v;
      const WaveParams<Scalar> wave{omega, v};
      row.exists = check_existence(phys, wave);
      row.stable = check_stability_criterion(phys, wave).stable_certified;
      if (row.exists) {
        const HessianReport<Scalar> hess = d_hessian(phys, wave);
        const DerivedScales<Scalar> s = derive_scales(phys, wave);
        row.has_hessian = true;
        row.det = hess.det;
        row.p_dpp = hess.p_dpp;
        row.gamma_star = compatible_gamma(phys, s);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace sbwave
