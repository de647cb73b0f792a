#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace sbwave {

using Index = Eigen::Index;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using CVec = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

/// Parameter combination outside the admissible set (e.g. sigma <= 0).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative eigenvalue refinement failed to settle.
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// A field norm crossed the runaway threshold during time integration.
struct BlowupDetected : std::runtime_error {
  BlowupDetected(const std::string& what, double time)
      : std::runtime_error(what), t(time) {}
  double t;
};

/// Constraint set is numerically rank deficient.
struct DegenerateConstraints : std::runtime_error {
  explicit DegenerateConstraints(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sbwave
