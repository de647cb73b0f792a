#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "sbwave/fourier.hpp"
#include "sbwave/functionals.hpp"
#include "sbwave/grid.hpp"
#include "sbwave/params.hpp"
#include "sbwave/profile.hpp"

namespace sbwave {

// Time integration of the first-order system
//
//   i e_t + e_xx - n e = gamma |e|^2 e
//   n_t = w_x
//   w_t = (n + beta n^2 + |e|^2)_x - alpha n_xxx        (w = phi_x)
//
// on the periodic grid. The Strang scheme alternates the exact nonlinear flow
// (a pointwise phase rotation of e plus a w kick, both exact because n and
// |e| are frozen within the substep) with the exact linear flow in transform
// space. The (n, w) linear pair rotates per mode with frequency
// Omega = |k| sqrt(1 + alpha k^2), so the fourth-order term imposes no step
// restriction.
template <typename Scalar>
struct State {
  Grid<Scalar> grid;
  CVec<Scalar> eps;
  Vec<Scalar> n;
  Vec<Scalar> w;
  Scalar t{};
};

enum class Scheme { strang, rk4 };

template <typename Scalar>
struct IntegratorConfig {
  Scalar dt{Scalar(1e-3)};
  Scheme scheme{Scheme::strang};
  int record_every{100};
};

template <typename Scalar>
struct ConservationLog {
  InvariantTriple<Scalar> initial;
  std::vector<std::pair<Scalar, InvariantTriple<Scalar>>> samples;
};

template <typename Scalar>
State<Scalar> init_state(const Profile<Scalar>& profile, const Grid<Scalar>& grid) {
  State<Scalar> s;
  s.grid = grid;
  s.eps = profile.eps;
  s.n = profile.n;
  s.w = profile.w;
  s.t = 0;
  return s;
}

template <typename Scalar>
class Integrator {
 public:
  using C = std::complex<Scalar>;

  Integrator(const Grid<Scalar>& grid, const PhysParams<Scalar>& phys,
             const IntegratorConfig<Scalar>& cfg)
      : grid_(grid), phys_(phys), cfg_(cfg), k_(wavenumbers(grid)) {
    if (!(cfg.dt > Scalar(0))) throw DomainError("Integrator: dt must be positive");
    // 2/3-rule mask for the quadratic products
    mask_.resize(grid.n_points);
    const Scalar k_max = Scalar(EIGEN_PI) / grid.spacing;
    for (Index j = 0; j < grid.n_points; ++j)
      mask_[j] = std::abs(k_[j]) <= Scalar(2) / Scalar(3) * k_max ? Scalar(1) : Scalar(0);
    spec_.resize(grid.n_points);
    spec2_.resize(grid.n_points);
    real_.resize(grid.n_points);
  }

  void step(State<Scalar>& s) {
    if (cfg_.scheme == Scheme::strang) {
      nonlinear_step(s, cfg_.dt / 2);
      linear_step(s, cfg_.dt);
      nonlinear_step(s, cfg_.dt / 2);
    } else {
      rk4_step(s, cfg_.dt);
    }
    s.t += cfg_.dt;
    check_finite(s);
  }

  /// Exact flow of the nonlinear part over tau: n and |e| are invariant, so
  /// the phase rotation and the w kick are both closed-form.
  void nonlinear_step(State<Scalar>& s, Scalar tau) {
    for (Index j = 0; j < grid_.n_points; ++j)
      real_[j] = phys_.beta * s.n[j] * s.n[j] + std::norm(s.eps[j]);
    fft_.fwd(spec_, real_);
    multiply_masked_derivative(spec_);
    fft_.inv(spec2_, spec_);
    for (Index j = 0; j < grid_.n_points; ++j) {
      s.w[j] += tau * spec2_[j].real();
      const Scalar phase = (s.n[j] + phys_.gamma * std::norm(s.eps[j])) * tau;
      s.eps[j] *= C(std::cos(phase), -std::sin(phase));
    }
  }

  /// Exact flow of the linear part over tau, per transform mode.
  void linear_step(State<Scalar>& s, Scalar tau) {
    if (tau != cached_dt_) build_propagator(tau);
    fft_.fwd(spec_, s.eps);
    for (Index j = 0; j < grid_.n_points; ++j) spec_[j] *= eps_phase_[j];
    fft_.inv(s.eps, spec_);

    fft_.fwd(spec_, s.n);
    fft_.fwd(spec2_, s.w);
    for (Index j = 0; j < grid_.n_points; ++j) {
      const C nh = spec_[j];
      const C wh = spec2_[j];
      const C ik(0, k_[j]);
      spec_[j] = cos_[j] * nh + ik * sinc_[j] * wh;
      spec2_[j] = ik * (Scalar(1) + phys_.alpha * k_[j] * k_[j]) * sinc_[j] * nh +
                  cos_[j] * wh;
    }
    to_real(spec_, s.n);
    to_real(spec2_, s.w);
  }

  const Grid<Scalar>& grid() const { return grid_; }

 private:
  void build_propagator(Scalar tau) {
    eps_phase_.resize(grid_.n_points);
    cos_.resize(grid_.n_points);
    sinc_.resize(grid_.n_points);
    for (Index j = 0; j < grid_.n_points; ++j) {
      const Scalar k2 = k_[j] * k_[j];
      eps_phase_[j] = std::polar(Scalar(1), -k2 * tau);
      const Scalar omega = std::abs(k_[j]) * std::sqrt(Scalar(1) + phys_.alpha * k2);
      cos_[j] = std::cos(omega * tau);
      sinc_[j] = omega == Scalar(0) ? tau : std::sin(omega * tau) / omega;
    }
    cached_dt_ = tau;
  }

  void multiply_masked_derivative(CVec<Scalar>& spec) const {
    const Index nyq = grid_.n_points / 2;
    for (Index j = 0; j < grid_.n_points; ++j) {
      const Scalar kd = (j == nyq) ? Scalar(0) : k_[j];
      spec[j] *= C(0, kd) * mask_[j];
    }
  }

  void to_real(const CVec<Scalar>& spec, Vec<Scalar>& dst) {
    if (spec2b_.size() != spec.size()) spec2b_.resize(spec.size());
    fft_.inv(spec2b_, spec);
    dst = spec2b_.real();
  }

  void rhs(const State<Scalar>& s, State<Scalar>& out) {
    // e part: i e_xx - i (n + gamma |e|^2) e
    fft_.fwd(spec_, s.eps);
    for (Index j = 0; j < grid_.n_points; ++j)
      spec_[j] *= C(0, -k_[j] * k_[j]);
    fft_.inv(out.eps, spec_);
    for (Index j = 0; j < grid_.n_points; ++j)
      out.eps[j] -= C(0, 1) * (s.n[j] + phys_.gamma * std::norm(s.eps[j])) * s.eps[j];

    // n part: w_x
    fft_.fwd(spec_, s.w);
    const Index nyq = grid_.n_points / 2;
    for (Index j = 0; j < grid_.n_points; ++j)
      spec_[j] *= C(0, j == nyq ? Scalar(0) : k_[j]);
    to_real(spec_, out.n);

    // w part: (n - alpha n_xx)_x + masked (beta n^2 + |e|^2)_x
    fft_.fwd(spec_, s.n);
    for (Index j = 0; j < grid_.n_points; ++j) {
      const Scalar kd = (j == nyq) ? Scalar(0) : k_[j];
      spec_[j] *= C(0, kd) * (Scalar(1) + phys_.alpha * k_[j] * k_[j]);
    }
    for (Index j = 0; j < grid_.n_points; ++j)
      real_[j] = phys_.beta * s.n[j] * s.n[j] + std::norm(s.eps[j]);
    fft_.fwd(spec2_, real_);
    multiply_masked_derivative(spec2_);
    spec_ += spec2_;
    to_real(spec_, out.w);
  }

  void rk4_step(State<Scalar>& s, Scalar dt) {
    State<Scalar> k1 = s, k2 = s, k3 = s, k4 = s, tmp = s;
    rhs(s, k1);
    axpy(tmp, s, k1, dt / 2);
    rhs(tmp, k2);
    axpy(tmp, s, k2, dt / 2);
    rhs(tmp, k3);
    axpy(tmp, s, k3, dt);
    rhs(tmp, k4);
    const Scalar two(2), sixth = dt / Scalar(6);
    s.eps += sixth * (k1.eps + two * k2.eps + two * k3.eps + k4.eps);
    s.n += sixth * (k1.n + two * k2.n + two * k3.n + k4.n);
    s.w += sixth * (k1.w + two * k2.w + two * k3.w + k4.w);
  }

  static void axpy(State<Scalar>& dst, const State<Scalar>& base,
                   const State<Scalar>& slope, Scalar factor) {
    dst.eps = base.eps + factor * slope.eps;
    dst.n = base.n + factor * slope.n;
    dst.w = base.w + factor * slope.w;
  }

  void check_finite(const State<Scalar>& s) const {
    const Scalar big = Scalar(1e8);
    if (s.eps.cwiseAbs().maxCoeff() > big || s.n.cwiseAbs().maxCoeff() > big ||
        s.w.cwiseAbs().maxCoeff() > big)
      throw BlowupDetected("field norm exceeded 1e8", double(s.t));
  }

  Grid<Scalar> grid_;
  PhysParams<Scalar> phys_;
  IntegratorConfig<Scalar> cfg_;
  Vec<Scalar> k_, mask_, real_;
  Eigen::FFT<Scalar> fft_;
  CVec<Scalar> spec_, spec2_, spec2b_;
  CVec<Scalar> eps_phase_;
  Vec<Scalar> cos_, sinc_;
  Scalar cached_dt_{Scalar(-1)};
};

/// Single step with a fresh workspace; run() reuses one integrator instead.
template <typename Scalar>
State<Scalar> step(const State<Scalar>& state, const PhysParams<Scalar>& phys,
                   const IntegratorConfig<Scalar>& cfg) {
  Integrator<Scalar> integ(state.grid, phys, cfg);
  State<Scalar> out = state;
  integ.step(out);
  return out;
}

template <typename Scalar>
struct RunResult {
  State<Scalar> final_state;
  ConservationLog<Scalar> log;
};

template <typename Scalar>
RunResult<Scalar> run(const State<Scalar>& state0, const PhysParams<Scalar>& phys,
                      const IntegratorConfig<Scalar>& cfg, Scalar t_end) {
  if (!(t_end >= cfg.dt)) throw DomainError("run: t_end must be >= dt");
  if (cfg.record_every < 1) throw DomainError("run: record_every must be >= 1");
  if (!(cfg.dt * Scalar(cfg.record_every) <= Scalar(1)))
    throw DomainError("run: dt * record_every must be <= 1");

  Integrator<Scalar> integ(state0.grid, phys, cfg);
  RunResult<Scalar> result;
  result.final_state = state0;
  State<Scalar>& s = result.final_state;
  result.log.initial = invariant_triple(s.eps, s.n, s.w, phys, state0.grid);
  result.log.samples.emplace_back(s.t, result.log.initial);

  const long n_steps = std::lround(double(t_end / cfg.dt));
  for (long i = 1; i <= n_steps; ++i) {
    integ.step(s);
    if (i % cfg.record_every == 0 || i == n_steps)
      result.log.samples.emplace_back(
          s.t, invariant_triple(s.eps, s.n, s.w, phys, state0.grid));
  }
  return result;
}

/// Max relative drift of (E, Q1, Q2) over the log, normalized by max(1, |X0|).
template <typename Scalar>
std::array<Scalar, 3> conservation_drift(const ConservationLog<Scalar>& log) {
  if (log.samples.empty()) throw DomainError("conservation_drift: empty log");
  std::array<Scalar, 3> drift{0, 0, 0};
  const auto& x0 = log.initial;
  for (const auto& [t, x] : log.samples) {
    drift[0] = std::max(drift[0],
                        std::abs(x.e - x0.e) / std::max(Scalar(1), std::abs(x0.e)));
    drift[1] = std::max(drift[1],
                        std::abs(x.q1 - x0.q1) / std::max(Scalar(1), std::abs(x0.q1)));
    drift[2] = std::max(drift[2],
                        std::abs(x.q2 - x0.q2) / std::max(Scalar(1), std::abs(x0.q2)));
  }
  return drift;
}

}  // namespace sbwave
