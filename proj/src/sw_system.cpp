#include "swavg/sw_system.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace swavg {

namespace {

void require_radius(double R) {
  if (!std::isfinite(R) || R <= 0.0) throw InputError("enclosure radius R must be > 0");
}

void require_kappa(double kappa) {
  if (!std::isfinite(kappa) || kappa == 0.0) throw InputError("kappa must be finite and nonzero");
}

void require_short_time(double t, double R) {
  // The endpoint 1/(4R^2) must accept h = 1/(8 r0^2) when R = sqrt(2) r0 is
  // rounded, hence the relative slack.
  const double t_max = 1.0 / (4.0 * R * R);
  if (!std::isfinite(t) || t < 0.0 || t > t_max * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "t = " << t << " is outside [0, 1/(4R^2)] = [0, " << t_max
        << "]; the closed-form estimate only holds for 0 <= t <= 1/(4R^2)";
    throw DomainError(msg.str());
  }
}

}  // namespace

void validate(const SWParams& p) { require_kappa(p.kappa); }

ConstantsBundle decomposition_constants(double R, double kappa) {
  require_radius(R);
  require_kappa(kappa);
  const double R2 = R * R;
  const double R3 = R2 * R;

  OscTermConstants term;
  term.c_g = 1.0;
  term.c_G = 1.0;
  term.c_v = R3;
  term.c_DzF_v = R3;
  term.c_dv_dt = 0.0;
  term.c_dv_dz = kDvConstant * R2;
  term.c_d2v_dtdz = 0.0;
  term.c_d2v_dz2 = kD2vConstant * R;
  term.omega_k = kappa;

  ConstantsBundle b;
  b.l = 1.0;
  b.c_F = R;
  b.c_DzF = 1.0;
  b.c_DzzF = 0.0;
  b.terms = {term, term};
  b.omega = std::abs(kappa);
  return b;
}

double dv_norm_exact(const PlanarPoint& z) { return kDvConstant * z.squaredNorm(); }

double d2v_norm_bound(const PlanarPoint& z) { return kD2vConstant * z.norm(); }

std::array<double, 2> d2v_component_norms(const PlanarPoint& z) {
  const double r = z.norm();
  return {4.0 * std::abs(z.x()) + 2.0 * r, 4.0 * std::abs(z.y()) + 2.0 * r};
}

Enclosure apriori_enclosure(double r0) {
  if (!std::isfinite(r0) || r0 < 1.0) {
    throw InputError(
        "r0 must be >= 1: the enclosure uses |z|(1 + |z|^2) <= 2|z|^3, which needs |z| >= 1");
  }
  return Enclosure{r0, 1.0 / (8.0 * r0 * r0), std::numbers::sqrt2 * r0};
}

double c0_bound_closed(double t, double R) {
  require_radius(R);
  require_short_time(t, R);
  constexpr double M = kDvConstant;
  const double R3 = R * R * R;
  const double em1 = std::expm1(t);
  // (2+M) e^t - M = 2 + (2+M)(e^t - 1)
  return 2.0 * (R3 * (2.0 + (2.0 + M) * em1) + 2.0 * M * R3 * R * R * em1);
}

double c1_bound_closed(double t, double R) {
  require_radius(R);
  require_short_time(t, R);
  constexpr double M = kDvConstant;
  constexpr double N = kD2vConstant;
  const double R2 = R * R;
  const double et = std::exp(t);
  const double fast = 2.0 * M * R2 * t;
  return 2.0 * M * R2 * et * (1.0 + std::exp(fast)) +
         et * std::expm1(fast) * (2.0 + N / M + 2.0 * R2 * (M + N / M));
}

double c0_error_closed(double t, double R, double kappa) {
  require_kappa(kappa);
  return c0_bound_closed(t, R) / std::abs(kappa);
}

double c1_error_closed(double t, double R, double kappa) {
  require_kappa(kappa);
  return c1_bound_closed(t, R) / std::abs(kappa);
}

}  // namespace swavg
