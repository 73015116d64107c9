#pragma once

// The planar nonautonomous equation
//
//   z' = conj(z) (1 + |z|^2 exp(i kappa t)),
//
// written in real coordinates as
//
//   x' =  x (1 + c |z|^2) + s |z|^2 y,
//   y' = -y (1 + c |z|^2) + s |z|^2 x,     c = cos(kappa t), s = sin(kappa t).
//
// It splits as z' = f(z) + cos(kappa t) v1(z) + sin(kappa t) v2(z) with
// f(z) = conj(z), v1 = |z|^2 (x, -y), v2 = |z|^2 (y, x). Averaging drops the
// oscillatory terms, leaving z' = conj(z) with flow (e^t x, e^-t y).

#include <array>
#include <cmath>
#include <numbers>

#include "swavg/averaging_bounds.hpp"
#include "swavg/types.hpp"

namespace swavg {

/// ||Dv_k(z)|| <= kDvConstant * |z|^2.
inline constexpr double kDvConstant = 3.0;
/// ||D^2 v_k(z)|| <= kD2vConstant * |z|.
inline constexpr double kD2vConstant = 4.0 + 2.0 * std::numbers::sqrt2;

struct SWParams {
  double kappa = 1.0;
};

/// Throws InputError when kappa is zero or non-finite.
void validate(const SWParams& p);

/// A-priori enclosure: solutions starting in the closed ball of radius r0
/// exist on [0, h] and stay in the closed ball of radius `radius`.
struct Enclosure {
  double r0 = 1.0;
  double h = 0.125;
  double radius = std::numbers::sqrt2;
};

template <typename Scalar>
Point<Scalar> vector_field(Scalar t, const Point<Scalar>& z, Scalar kappa) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(kappa * t);
  const Scalar s = sin(kappa * t);
  const Scalar r2 = z.squaredNorm();
  const Scalar radial = Scalar(1) + c * r2;
  return Point<Scalar>(z.x() * radial + s * r2 * z.y(), -z.y() * radial + s * r2 * z.x());
}

inline PlanarPoint vector_field(double t, const PlanarPoint& z, const SWParams& p) {
  return vector_field<double>(t, z, p.kappa);
}

/// Dv1(z) for v1(z) = |z|^2 (x, -y).
template <typename Scalar>
Mat2<Scalar> dv1(const Point<Scalar>& z) {
  const Scalar x = z.x(), y = z.y();
  Mat2<Scalar> m;
  m << 3 * x * x + y * y, 2 * x * y, -2 * x * y, -x * x - 3 * y * y;
  return m;
}

/// Dv2(z) for v2(z) = |z|^2 (y, x).
template <typename Scalar>
Mat2<Scalar> dv2(const Point<Scalar>& z) {
  const Scalar x = z.x(), y = z.y();
  Mat2<Scalar> m;
  m << 2 * x * y, x * x + 3 * y * y, 3 * x * x + y * y, 2 * x * y;
  return m;
}

/// D_z of the vector field: diag(1, -1) + cos(kappa t) Dv1 + sin(kappa t) Dv2.
template <typename Scalar>
Mat2<Scalar> jacobian(Scalar t, const Point<Scalar>& z, Scalar kappa) {
  using std::cos;
  using std::sin;
  Mat2<Scalar> a;
  a << Scalar(1), Scalar(0), Scalar(0), Scalar(-1);
  return a + cos(kappa * t) * dv1(z) + sin(kappa * t) * dv2(z);
}

inline Matrix2 jacobian(double t, const PlanarPoint& z, const SWParams& p) {
  return jacobian<double>(t, z, p.kappa);
}

/// Hessians of the two components of v_k (k = 1, 2): D^2 v_k(z)(a, b) has
/// components a^T H[0] b and a^T H[1] b.
template <typename Scalar>
std::array<Mat2<Scalar>, 2> d2v(int k, const Point<Scalar>& z) {
  const Scalar x = z.x(), y = z.y();
  Mat2<Scalar> hx, hy;
  if (k == 1) {
    hx << 6 * x, 2 * y, 2 * y, 2 * x;
    hy << -2 * y, -2 * x, -2 * x, -6 * y;
  } else {
    hx << 2 * y, 2 * x, 2 * x, 6 * y;
    hy << 6 * x, 2 * y, 2 * y, 2 * x;
  }
  return {hx, hy};
}

template <typename Scalar>
Point<Scalar> d2v_apply(int k, const Point<Scalar>& z, const Point<Scalar>& a,
                        const Point<Scalar>& b) {
  const auto h = d2v(k, z);
  return Point<Scalar>(a.dot(h[0] * b), a.dot(h[1] * b));
}

/// Exact flow of the averaged equation z' = conj(z).
template <typename Scalar>
Point<Scalar> averaged_flow(Scalar t, const Point<Scalar>& z0) {
  using std::exp;
  return Point<Scalar>(exp(t) * z0.x(), exp(-t) * z0.y());
}

/// Derivative of the averaged flow: diag(e^t, e^-t).
inline Matrix2 averaged_flow_derivative(double t) {
  return Eigen::Vector2d(std::exp(t), std::exp(-t)).asDiagonal();
}

/// A-priori constants of the decomposition on the closed ball of radius R.
/// Both oscillatory terms carry frequency kappa.
ConstantsBundle decomposition_constants(double R, double kappa = 1.0);

/// ||Dv1(z)|| = ||Dv2(z)|| = 3 |z|^2.
double dv_norm_exact(const PlanarPoint& z);

/// (4 + 2 sqrt 2) |z|, an upper bound of the bilinear norm of D^2 v_k(z).
double d2v_norm_bound(const PlanarPoint& z);

/// Operator norms of the component Hessians of v1: (4|x| + 2r, 4|y| + 2r).
/// For v2 the pair is swapped.
std::array<double, 2> d2v_component_norms(const PlanarPoint& z);

/// Requires r0 >= 1; h = 1/(8 r0^2), radius = sqrt(2) r0.
Enclosure apriori_enclosure(double r0);

/// b~(t) on the enclosure of radius R, with M = 3:
/// 2 (R^3 ((2+M) e^t - M) + 2 M R^5 (e^t - 1)). Valid for 0 <= t <= 1/(4R^2).
double c0_bound_closed(double t, double R);

/// B~(t, R) = 2 M R^2 e^t (1 + e^{2MR^2 t})
///          + e^t (e^{2MR^2 t} - 1)(2 + N/M + 2R^2 (M + N/M)).
double c1_bound_closed(double t, double R);

/// b~(t) / |kappa|: bound on |phi(t0, t, z0) - (e^t x0, e^-t y0)| for
/// |z0| <= R / sqrt(2).
double c0_error_closed(double t, double R, double kappa);

/// B~(t, R) / |kappa|: bound on || d phi / d z0 - diag(e^t, e^-t) ||.
double c1_error_closed(double t, double R, double kappa);

}  // namespace swavg
