#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "sbwave/fourier.hpp"
#include "sbwave/grid.hpp"
#include "sbwave/params.hpp"
#include "sbwave/profile.hpp"

namespace sbwave {

// Linearized operators around the wave, after phase factorization:
//
//   L1 = -2 d^2/dx^2 + 2 sigma + 2 n + (6 gamma - 4/eta) e_hat^2
//   L2 = -2 d^2/dx^2 + 2 sigma + 2 n + 2 gamma e_hat^2
//   L3 = -alpha d^2/dx^2 + 4 alpha sigma + 2 beta n
//
// Discretized with the 3-point second difference and homogeneous Dirichlet
// ends, giving a symmetric tridiagonal matrix over the interior nodes. The
// potentials decay exponentially, so the Dirichlet truncation error is far
// below the discretization error for half_width >= 40/sqrt(sigma).
enum class OperatorKind { L1, L2, L3 };

inline const char* operator_name(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::L1: return "L1";
    case OperatorKind::L2: return "L2";
    default: return "L3";
  }
}

template <typename Scalar>
struct DiscretizedOperator {
  OperatorKind kind{OperatorKind::L1};
  Vec<Scalar> diag;     // interior nodes, length N-1
  Vec<Scalar> offdiag;  // length N-2
  Scalar spacing{};
  Scalar essential_edge{};  // 2 sigma for L1/L2, 4 alpha sigma for L3
};

template <typename Scalar>
Vec<Scalar> operator_potential(OperatorKind kind, const Profile<Scalar>& profile,
                               const PhysParams<Scalar>& phys,
                               const DerivedScales<Scalar>& scales) {
  switch (kind) {
    case OperatorKind::L1:
      return (Scalar(2) * profile.n.array() +
              (Scalar(6) * phys.gamma - Scalar(4) / scales.eta) *
                  profile.eps_hat.array().square())
          .matrix();
    case OperatorKind::L2:
      return (Scalar(2) * profile.n.array() +
              Scalar(2) * phys.gamma * profile.eps_hat.array().square())
          .matrix();
    default:
      return Scalar(2) * phys.beta * profile.n;
  }
}

template <typename Scalar>
Scalar operator_diffusion(OperatorKind kind, const PhysParams<Scalar>& phys) {
  return kind == OperatorKind::L3 ? phys.alpha : Scalar(2);
}

template <typename Scalar>
Scalar operator_shift(OperatorKind kind, const PhysParams<Scalar>& phys,
                      const DerivedScales<Scalar>& scales) {
  return kind == OperatorKind::L3 ? Scalar(4) * phys.alpha * scales.sigma
                                  : Scalar(2) * scales.sigma;
}

template <typename Scalar>
DiscretizedOperator<Scalar> assemble_operator(OperatorKind kind,
                                              const Profile<Scalar>& profile,
                                              const PhysParams<Scalar>& phys,
                                              const DerivedScales<Scalar>& scales,
                                              const Grid<Scalar>& grid) {
  const Index n_int = grid.n_points - 1;  // interior nodes x_1 .. x_{N-1}
  const Scalar c = operator_diffusion(kind, phys);
  const Scalar shift = operator_shift(kind, phys, scales);
  const Vec<Scalar> pot = operator_potential(kind, profile, phys, scales);
  const Scalar h2 = grid.spacing * grid.spacing;

  DiscretizedOperator<Scalar> op;
  op.kind = kind;
  op.spacing = grid.spacing;
  op.essential_edge = shift;
  op.diag.resize(n_int);
  op.offdiag = Vec<Scalar>::Constant(n_int - 1, -c / h2);
  for (Index i = 0; i < n_int; ++i)
    op.diag[i] = Scalar(2) * c / h2 + shift + pot[i + 1];
  return op;
}

template <typename Scalar>
Vec<Scalar> tridiag_apply(const DiscretizedOperator<Scalar>& op, const Vec<Scalar>& x) {
  const Index n = op.diag.size();
  Vec<Scalar> y(n);
  for (Index i = 0; i < n; ++i) {
    Scalar acc = op.diag[i] * x[i];
    if (i > 0) acc += op.offdiag[i - 1] * x[i - 1];
    if (i + 1 < n) acc += op.offdiag[i] * x[i + 1];
    y[i] = acc;
  }
  return y;
}

namespace detail {

/// Number of eigenvalues of the symmetric tridiagonal strictly below tau
/// (Sturm sign count of the LDL^T pivots, with the LAPACK pivmin safeguard).
template <typename Scalar>
int sturm_count_below(const Vec<Scalar>& diag, const Vec<Scalar>& off, Scalar tau) {
  const Index n = diag.size();
  Scalar max_off2 = 0;
  for (Index i = 0; i + 1 < n; ++i) max_off2 = std::max(max_off2, off[i] * off[i]);
  const Scalar pivmin =
      std::max(std::numeric_limits<Scalar>::min(),
               std::numeric_limits<Scalar>::epsilon() * max_off2);
  int count = 0;
  Scalar d = diag[0] - tau;
  if (std::abs(d) < pivmin) d = -pivmin;
  if (d < 0) ++count;
  for (Index i = 1; i < n; ++i) {
    d = (diag[i] - tau) - off[i - 1] * off[i - 1] / d;
    if (std::abs(d) < pivmin) d = -pivmin;
    if (d < 0) ++count;
  }
  return count;
}

template <typename Scalar>
std::pair<Scalar, Scalar> gershgorin_bounds(const Vec<Scalar>& diag,
                                            const Vec<Scalar>& off) {
  const Index n = diag.size();
  Scalar lo = diag[0], hi = diag[0];
  for (Index i = 0; i < n; ++i) {
    Scalar r = 0;
    if (i > 0) r += std::abs(off[i - 1]);
    if (i + 1 < n) r += std::abs(off[i]);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  return {lo, hi};
}

/// Bisection for the (index)-th smallest eigenvalue (0-based).
template <typename Scalar>
Scalar bisect_eigenvalue(const Vec<Scalar>& diag, const Vec<Scalar>& off, int index,
                         Scalar tol = Scalar(1e-12)) {
  auto [lo, hi] = gershgorin_bounds(diag, off);
  lo -= tol;
  hi += tol;
  while (hi - lo > tol) {
    const Scalar mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;  // interval at floating resolution
    if (sturm_count_below(diag, off, mid) > index)
      hi = mid;
    else
      lo = mid;
  }
  return lo + (hi - lo) / 2;
}

/// LU factorization with partial pivoting of (T - shift I) for a symmetric
/// tridiagonal T; pivoting introduces one extra superdiagonal.
template <typename Scalar>
struct TriFactor {
  Vec<Scalar> dl, d, du, du2;
  std::vector<int> swapped;
  bool singular{false};

  TriFactor(const Vec<Scalar>& diag, const Vec<Scalar>& off, Scalar shift) {
    const Index n = diag.size();
    d = diag.array() - shift;
    dl = off;
    du = off;
    du2 = Vec<Scalar>::Zero(std::max<Index>(n - 2, 0));
    swapped.assign(static_cast<size_t>(std::max<Index>(n - 1, 0)), 0);
    for (Index i = 0; i + 1 < n; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] == Scalar(0)) {
          singular = true;
          d[i] = std::numeric_limits<Scalar>::min();
        }
        const Scalar m = dl[i] / d[i];
        dl[i] = m;
        d[i + 1] -= m * du[i];
      } else {
        swapped[static_cast<size_t>(i)] = 1;
        const Scalar m = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = m;
        const Scalar tmp = d[i + 1];
        d[i + 1] = du[i] - m * tmp;
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -m * du[i + 1];
        }
        du[i] = tmp;
      }
    }
    if (d[n - 1] == Scalar(0)) {
      singular = true;
      d[n - 1] = std::numeric_limits<Scalar>::min();
    }
  }

  Vec<Scalar> solve(Vec<Scalar> b) const {
    const Index n = d.size();
    for (Index i = 0; i + 1 < n; ++i) {
      if (swapped[static_cast<size_t>(i)]) std::swap(b[i], b[i + 1]);
      b[i + 1] -= dl[i] * b[i];
    }
    b[n - 1] /= d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (Index i = n - 3; i >= 0; --i)
      b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    return b;
  }
};

}  // namespace detail

// Width of the numerically-zero band around 0. The 3-point stencil shifts a
// kernel eigenfunction u down by about (c h^2/12) ||u''||^2 / ||u||^2, which
// is O(h^2 sigma^2) and far above 1e-8 on default grids; the band scales with
// h^2 so the kernel modes stay inside it, and tightens to 1e-8 on refinement.
template <typename Scalar>
Scalar zero_band(const DiscretizedOperator<Scalar>& op) {
  return std::max(Scalar(1e-8),
                  op.essential_edge * op.spacing * op.spacing / Scalar(2));
}

/// Eigenvalues strictly below the zero band (kernel modes excluded).
template <typename Scalar>
int negative_eigenvalue_count(const DiscretizedOperator<Scalar>& op) {
  return detail::sturm_count_below(op.diag, op.offdiag, -zero_band(op));
}

/// Number of eigenvalues below tau; exposed for spectrum-emptiness checks.
template <typename Scalar>
int eigenvalue_count_below(const DiscretizedOperator<Scalar>& op, Scalar tau) {
  return detail::sturm_count_below(op.diag, op.offdiag, tau);
}

// k smallest eigenpairs: Sturm bisection for each eigenvalue, then inverse
// iteration with a pivoted tridiagonal solve. Vectors are unit in the
// h-weighted discrete L2 norm; near-degenerate pairs are re-orthogonalized.
template <typename Scalar>
std::vector<std::pair<Scalar, Vec<Scalar>>> eigen_lowest(
    const DiscretizedOperator<Scalar>& op, int k) {
  if (k < 1 || k > 10) throw DomainError("eigen_lowest: need 1 <= k <= 10");
  const Index n = op.diag.size();
  std::vector<std::pair<Scalar, Vec<Scalar>>> out;
  out.reserve(static_cast<size_t>(k));
  std::mt19937_64 rng(0x5b5b1dull);
  std::uniform_real_distribution<Scalar> unit(-1, 1);

  const Scalar scale = detail::gershgorin_bounds(op.diag, op.offdiag).second;
  for (int idx = 0; idx < k; ++idx) {
    const Scalar lambda = detail::bisect_eigenvalue(op.diag, op.offdiag, idx);
    // tiny relative offset keeps the shifted matrix comfortably nonsingular
    const Scalar shift =
        lambda + scale * std::numeric_limits<Scalar>::epsilon() * Scalar(8);
    detail::TriFactor<Scalar> lu(op.diag, op.offdiag, shift);
    Vec<Scalar> x(n);
    for (Index i = 0; i < n; ++i) x[i] = unit(rng);
    bool converged = false;
    for (int sweep = 0; sweep < 100; ++sweep) {
      x = lu.solve(std::move(x));
      // deflate against close earlier eigenvectors
      for (const auto& [mu, q] : out)
        if (std::abs(mu - lambda) < Scalar(1e-6) * std::max(Scalar(1), std::abs(lambda)))
          x -= (q.dot(x) / q.squaredNorm()) * q;
      x /= x.norm();
      const Vec<Scalar> res = tridiag_apply(op, x) - lambda * x;
      if (res.norm() <= Scalar(1e-10) * scale) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw ConvergenceError("eigen_lowest: inverse iteration failed in 100 sweeps");
    // fix sign and switch to the h-weighted normalization
    Index imax = 0;
    x.cwiseAbs().maxCoeff(&imax);
    if (x[imax] < 0) x = -x;
    x /= std::sqrt(op.spacing) * x.norm();
    out.emplace_back(lambda, std::move(x));
  }
  return out;
}

/// Relative norms of L1 e_hat_x, L2 e_hat, L3 n_x, evaluated spectrally on the
/// periodic grid (the continuum kernel identities, resolution-limited only).
template <typename Scalar>
std::array<Scalar, 3> kernel_residuals(const Profile<Scalar>& profile,
                                       const PhysParams<Scalar>& phys,
                                       const DerivedScales<Scalar>& scales,
                                       const Grid<Scalar>& grid) {
  Fourier<Scalar> fft;
  auto apply = [&](OperatorKind kind, const Vec<Scalar>& u) {
    const Scalar c = operator_diffusion(kind, phys);
    const Scalar shift = operator_shift(kind, phys, scales);
    const Vec<Scalar> pot = operator_potential(kind, profile, phys, scales);
    const Vec<Scalar> uxx = fft.derivative(u, grid, 2);
    const Vec<Scalar> img =
        (-c * uxx.array() + (shift + pot.array()) * u.array()).matrix();
    return l2_norm(grid, img) / l2_norm(grid, u);
  };
  const Vec<Scalar> eh_x = fft.derivative(profile.eps_hat, grid, 1);
  const Vec<Scalar> n_x = fft.derivative(profile.n, grid, 1);
  return {apply(OperatorKind::L1, eh_x), apply(OperatorKind::L2, profile.eps_hat),
          apply(OperatorKind::L3, n_x)};
}

namespace detail {

// Eigenvalue count of the constraint-restricted operator below tau, through
// the inertia of the bordered matrix [[A - tau, C], [C^T, 0]]:
//
//   n_-(P A P|ran P - tau) = n_-(A - tau) + n_-(-C^T (A - tau)^{-1} C) - m.
//
// Each evaluation is one Sturm count plus m tridiagonal solves. tau values
// that make A - tau (numerically) singular are jittered.
template <typename Scalar>
int constrained_count_below(const DiscretizedOperator<Scalar>& op,
                            const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& c,
                            Scalar tau, Scalar jitter) {
  const Index m = c.cols();
  for (int attempt = 0; attempt < 8; ++attempt) {
    const TriFactor<Scalar> lu(op.diag, op.offdiag, tau);
    if (lu.singular) {
      tau += jitter;
      continue;
    }
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> schur(m, m);
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> solved(c.rows(), m);
    for (Index j = 0; j < m; ++j) solved.col(j) = lu.solve(c.col(j));
    schur = -(c.transpose() * solved);
    schur = ((schur + schur.transpose()) / Scalar(2)).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>
        es(schur, Eigen::EigenvaluesOnly);
    int neg_schur = 0;
    bool ambiguous = false;
    const Scalar tol = std::numeric_limits<Scalar>::epsilon() *
                       std::max(Scalar(1), schur.cwiseAbs().maxCoeff()) * Scalar(64);
    for (Index j = 0; j < m; ++j) {
      if (es.eigenvalues()[j] < -tol)
        ++neg_schur;
      else if (es.eigenvalues()[j] < tol)
        ambiguous = true;  // tau essentially an eigenvalue of the pencil
    }
    if (ambiguous) {
      tau += jitter;
      continue;
    }
    return sturm_count_below(op.diag, op.offdiag, tau) + neg_schur - int(m);
  }
  throw ConvergenceError("constrained_count_below: could not desingularize shift");
}

}  // namespace detail

// Smallest eigenvalue of P A P restricted to the orthogonal complement of the
// constraint span (discrete L2 projector). Constraints are given on the full
// grid and restricted to the interior Dirichlet nodes.
template <typename Scalar>
Scalar constrained_lowest(const DiscretizedOperator<Scalar>& op,
                          const std::vector<Vec<Scalar>>& constraints) {
  const Index n = op.diag.size();
  const Index m = static_cast<Index>(constraints.size());
  if (m == 0 || m >= n)
    throw DegenerateConstraints("constrained_lowest: need 1 <= m < n constraints");

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> c(n, m);
  for (Index j = 0; j < m; ++j) {
    const Vec<Scalar>& full = constraints[static_cast<size_t>(j)];
    if (full.size() == n)
      c.col(j) = full;
    else if (full.size() == n + 1)
      c.col(j) = full.tail(n);  // drop the boundary node
    else
      throw DegenerateConstraints("constrained_lowest: constraint has wrong length");
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> gram =
      op.spacing * (c.transpose() * c);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>
      ges(gram, Eigen::EigenvaluesOnly);
  const Scalar gmin = ges.eigenvalues().minCoeff();
  const Scalar gmax = ges.eigenvalues().maxCoeff();
  if (!(gmin > Scalar(0)) || gmax / gmin > Scalar(1e12))
    throw DegenerateConstraints("constrained_lowest: constraint Gram condition > 1e12");

  // orthonormalize so the bordered inertia argument sees full column rank
  Eigen::HouseholderQR<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> qr(c);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> q =
      qr.householderQ() * Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Identity(n, m);

  auto [lo, hi] = detail::gershgorin_bounds(op.diag, op.offdiag);
  const Scalar jitter =
      (hi - lo) * std::numeric_limits<Scalar>::epsilon() * Scalar(1024);
  const Scalar tol = Scalar(1e-12) * std::max(Scalar(1), std::max(std::abs(lo), std::abs(hi)));
  lo -= 1;
  hi += 1;
  while (hi - lo > tol) {
    const Scalar mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    if (detail::constrained_count_below(op, q, mid, jitter) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  return lo + (hi - lo) / 2;
}

/// Summary record for one operator, as exported by the spectrum command.
template <typename Scalar>
struct SpectralReport {
  OperatorKind kind{OperatorKind::L1};
  std::vector<Scalar> lowest_eigenvalues;
  int negative_count{};
  Scalar kernel_residual{};
  Scalar essential_edge{};
};

template <typename Scalar>
std::array<SpectralReport<Scalar>, 3> spectral_reports(const Profile<Scalar>& profile,
                                                       const PhysParams<Scalar>& phys,
                                                       const DerivedScales<Scalar>& scales,
                                                       const Grid<Scalar>& grid,
                                                       int k = 3) {
  const std::array<Scalar, 3> kres = kernel_residuals(profile, phys, scales, grid);
  std::array<SpectralReport<Scalar>, 3> reports;
  const OperatorKind kinds[3] = {OperatorKind::L1, OperatorKind::L2, OperatorKind::L3};
  for (int i = 0; i < 3; ++i) {
    const auto op = assemble_operator(kinds[i], profile, phys, scales, grid);
    SpectralReport<Scalar>& r = reports[static_cast<size_t>(i)];
    r.kind = kinds[i];
    for (const auto& [lam, vec] : eigen_lowest(op, k)) r.lowest_eigenvalues.push_back(lam);
    r.negative_count = negative_eigenvalue_count(op);
    r.kernel_residual = kres[static_cast<size_t>(i)];
    r.essential_edge = op.essential_edge;
  }
  return reports;
}

}  // namespace sbwave
