#pragma once

// Explicit C^0 and C^1 averaging error bounds for systems of the form
//
//   x' = F(t, x) + sum_k g_k(omega_k t) v_k(t, x),
//
// where each g_k has a bounded zero-mean primitive G_k. Given a bundle of
// a-priori constants valid on an enclosure W over a time step [0, h], the
// distance between the full and the averaged process is at most
// c0_bound(t) / omega, and the distance between their derivatives with
// respect to the initial condition is at most c1_bound(t) / omega.

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "swavg/types.hpp"

namespace swavg {

/// Constants attached to one oscillatory term g_k(omega_k t) v_k(t, x).
struct OscTermConstants {
  double c_g = 0.0;         // sup |g_k|
  double c_G = 0.0;         // sup |G_k|, G_k a primitive of g_k
  double c_v = 0.0;         // sup ||v_k||
  double c_DzF_v = 0.0;     // sup ||D_zF(s, z) v_k(s, z1)||
  double c_dv_dt = 0.0;     // sup ||dv_k/dt||
  double c_dv_dz = 0.0;     // sup ||dv_k/dz||
  double c_d2v_dtdz = 0.0;  // sup ||d^2 v_k/dt dz||
  double c_d2v_dz2 = 0.0;   // sup ||d^2 v_k/dz^2|| (bilinear operator norm)
  double omega_k = 1.0;     // frequency, |omega_k| > 0
};

struct ConstantsBundle {
  double l = 0.0;  // logarithmic-norm bound of D_xF on the enclosure
  double c_F = 0.0;
  double c_DzF = 0.0;
  double c_DzzF = 0.0;
  std::vector<OscTermConstants> terms;
  double omega = 1.0;  // inf_k |omega_k|
};

/// Throws InputError unless every constant is finite and nonnegative,
/// omega > 0 and |omega_k| >= omega for each term.
void validate(const ConstantsBundle& bundle);

/// Euclidean logarithmic norm: largest eigenvalue of (A + A^T) / 2.
double log_norm(const Matrix2& a);

/// Largest singular value of a 2x2 matrix.
double spectral_norm(const Matrix2& a);

/// l_2 = l + sum_k C(g_k) C(dv_k/dz), the growth rate of the variational
/// equation of the full system.
double l2_rate(const ConstantsBundle& bundle);

// Both bounds use max(l, 0) as the rate; a decaying linear part is not
// exploited, which keeps them nondecreasing in t.

/// b~(t) = sum_k b_k(t). The flow difference is at most b~(t) / omega.
double c0_bound(const ConstantsBundle& bundle, double t);

/// B(t). The flow-derivative difference is at most B(t) / omega.
///
/// The constant C(D_zF dv_k/dz) is not carried by the bundle; it is bounded
/// by the submultiplicative product C(D_zF) C(dv_k/dz).
double c1_bound(const ConstantsBundle& bundle, double t);

// (e^{lt} - 1) / l and (e^{l2 t} - e^{lt}) / (l2 - l), switching to the
// analytic limits t and t e^{lt} when the denominator is below 1e-12
// relative to max(|l|, |l2|, 1).
double growth_integral(double l, double t);
double growth_difference_quotient(double l, double l2, double t);

void to_json(nlohmann::json& j, const OscTermConstants& c);
void from_json(const nlohmann::json& j, OscTermConstants& c);
void to_json(nlohmann::json& j, const ConstantsBundle& b);
void from_json(const nlohmann::json& j, ConstantsBundle& b);

}  // namespace swavg
