#pragma once

#include <cmath>

#include "sbwave/types.hpp"

namespace sbwave {

/// Uniform periodic grid on [-L, L) with N a power of two.
template <typename Scalar>
struct Grid {
  Scalar half_width{};
  Index n_points{};
  Scalar spacing{};
};

namespace detail {
inline bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace detail

template <typename Scalar>
Grid<Scalar> make_grid_manual(Scalar half_width, Index n_points) {
  if (!(half_width > Scalar(0)))
    throw DomainError("make_grid_manual: half_width must be positive");
  if (!detail::is_power_of_two(n_points))
    throw DomainError("make_grid_manual: n_points must be a power of two");
  Grid<Scalar> g;
  g.half_width = half_width;
  g.n_points = n_points;
  g.spacing = Scalar(2) * half_width / Scalar(n_points);
  return g;
}

/// Grid sized for a wave of inverse width sqrt(sigma): integer half width
/// >= 40/sqrt(sigma) and spacing <= 0.05/sqrt(sigma), at least points_per_width
/// points.
template <typename Scalar>
Grid<Scalar> make_grid(Scalar sigma, Index points_per_width = 2048) {
  if (!(sigma > Scalar(0))) throw DomainError("make_grid: sigma must be positive");
  if (points_per_width <= 0)
    throw DomainError("make_grid: points_per_width must be positive");
  const Scalar root = std::sqrt(sigma);
  const Scalar half_width = std::ceil(Scalar(40) / root);
  Index n = 1;
  while (n < points_per_width) n *= 2;
  const Scalar max_spacing = Scalar(0.05) / root;
  while (Scalar(2) * half_width / Scalar(n) > max_spacing) n *= 2;
  return make_grid_manual(half_width, n);
}

template <typename Scalar>
Vec<Scalar> coordinates(const Grid<Scalar>& g) {
  Vec<Scalar> x(g.n_points);
  for (Index j = 0; j < g.n_points; ++j)
    x[j] = -g.half_width + Scalar(j) * g.spacing;
  return x;
}

/// Wavenumbers in FFT ordering: k_j = (pi/L) * j for j < N/2, (pi/L)*(j-N) after.
template <typename Scalar>
Vec<Scalar> wavenumbers(const Grid<Scalar>& g) {
  const Scalar dk = Scalar(EIGEN_PI) / g.half_width;
  Vec<Scalar> k(g.n_points);
  for (Index j = 0; j < g.n_points; ++j) {
    const Index m = (j < g.n_points / 2) ? j : j - g.n_points;
    k[j] = dk * Scalar(m);
  }
  return k;
}

/// Trapezoidal quadrature; exact spacing weight, periodic so no end corrections.
template <typename Scalar>
Scalar integrate(const Grid<Scalar>& g, const Vec<Scalar>& u) {
  return g.spacing * u.sum();
}

template <typename Scalar>
Scalar l2_norm(const Grid<Scalar>& g, const Vec<Scalar>& u) {
  return std::sqrt(g.spacing * u.squaredNorm());
}

template <typename Scalar>
Scalar l2_norm(const Grid<Scalar>& g, const CVec<Scalar>& u) {
  return std::sqrt(g.spacing * u.squaredNorm());
}

template <typename Scalar>
Scalar inner(const Grid<Scalar>& g, const Vec<Scalar>& a, const Vec<Scalar>& b) {
  return g.spacing * a.dot(b);
}

}  // namespace sbwave
