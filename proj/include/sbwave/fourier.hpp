#pragma once

#include <unsupported/Eigen/FFT>

#include "sbwave/grid.hpp"
#include "sbwave/types.hpp"

namespace sbwave {

// Spectral transform helper bound to no particular grid; plans are cached per
// size inside the Eigen::FFT object, so reuse one instance on hot paths.
//
// Conventions: fwd is the plain DFT (no scaling), inv carries the 1/N factor.
template <typename Scalar>
class Fourier {
 public:
  using C = std::complex<Scalar>;

  CVec<Scalar> fwd(const CVec<Scalar>& u) {
    CVec<Scalar> out(u.size());
    fft_.fwd(out, u);
    return out;
  }

  CVec<Scalar> fwd(const Vec<Scalar>& u) {
    CVec<Scalar> out(u.size());
    fft_.fwd(out, u);
    return out;
  }

  CVec<Scalar> inv(const CVec<Scalar>& spec) {
    CVec<Scalar> out(spec.size());
    fft_.inv(out, spec);
    return out;
  }

  Vec<Scalar> inv_real(const CVec<Scalar>& spec) {
    CVec<Scalar> out(spec.size());
    fft_.inv(out, spec);
    return out.real();
  }

  /// d^order/dx^order by spectral multiplication. Odd orders zero the
  /// unmatched Nyquist mode.
  CVec<Scalar> derivative(const CVec<Scalar>& u, const Grid<Scalar>& g, int order = 1) {
    CVec<Scalar> spec = fwd(u);
    apply_derivative(spec, g, order);
    return inv(spec);
  }

  Vec<Scalar> derivative(const Vec<Scalar>& u, const Grid<Scalar>& g, int order = 1) {
    CVec<Scalar> spec = fwd(u);
    apply_derivative(spec, g, order);
    return inv_real(spec);
  }

  /// In-place derivative on an existing spectrum.
  static void apply_derivative(CVec<Scalar>& spec, const Grid<Scalar>& g, int order) {
    const Vec<Scalar> k = wavenumbers(g);
    const Index nyq = g.n_points / 2;
    for (Index j = 0; j < spec.size(); ++j) {
      C factor = std::pow(C(0, k[j]), order);
      if (order % 2 != 0 && j == nyq) factor = C(0, 0);
      spec[j] *= factor;
    }
  }

  /// Translation u(. - s) as a spectral phase; exact for band-limited fields.
  static void apply_shift(CVec<Scalar>& spec, const Grid<Scalar>& g, Scalar s) {
    const Vec<Scalar> k = wavenumbers(g);
    for (Index j = 0; j < spec.size(); ++j)
      spec[j] *= std::exp(C(0, -k[j] * s));
  }

  CVec<Scalar> shift(const CVec<Scalar>& u, const Grid<Scalar>& g, Scalar s) {
    CVec<Scalar> spec = fwd(u);
    apply_shift(spec, g, s);
    return inv(spec);
  }

  Vec<Scalar> shift(const Vec<Scalar>& u, const Grid<Scalar>& g, Scalar s) {
    CVec<Scalar> spec = fwd(u);
    apply_shift(spec, g, s);
    return inv_real(spec);
  }

  /// H1 norm with the derivative term evaluated spectrally.
  Scalar h1_norm(const CVec<Scalar>& u, const Grid<Scalar>& g) {
    const CVec<Scalar> ux = derivative(u, g, 1);
    return std::sqrt(g.spacing * (u.squaredNorm() + ux.squaredNorm()));
  }

  Scalar h1_norm(const Vec<Scalar>& u, const Grid<Scalar>& g) {
    const Vec<Scalar> ux = derivative(u, g, 1);
    return std::sqrt(g.spacing * (u.squaredNorm() + ux.squaredNorm()));
  }

 private:
  Eigen::FFT<Scalar> fft_;
};

}  // namespace sbwave
