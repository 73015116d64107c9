#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace swavg {

/// A point z = x + iy of the plane, stored as a column vector (x, y).
template <typename Scalar>
using Point = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;

using PlanarPoint = Point<double>;
using Matrix2 = Mat2<double>;

/// Malformed arguments: negative times, radii below a lemma's range, NaNs.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Arguments outside the validity domain of a closed-form estimate.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numerical integration failed (non-finite state, step underflow).
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A time-h map was requested on a point whose solution leaves every
/// bounded set before time h.
class MapUndefinedError : public IntegrationError {
 public:
  explicit MapUndefinedError(const std::string& what, double escape_time)
      : IntegrationError(what), escape_time_(escape_time) {}
  double escape_time() const noexcept { return escape_time_; }

 private:
  double escape_time_;
};

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

}  // namespace swavg
