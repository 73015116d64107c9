#include "swavg/averaging_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>
#include <nlohmann/json.hpp>

namespace swavg {

namespace {

constexpr double kDegenerateRelTol = 1e-12;

void require_nonnegative(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) {
    throw InputError(std::string("constant ") + name + " must be finite and >= 0");
  }
}

void require_time(double t) {
  if (!std::isfinite(t) || t < 0.0) {
    throw InputError("time must be finite and >= 0");
  }
}

// sum_i C(g_i) C(v_i)
double oscillation_amplitude(const ConstantsBundle& b) {
  double s = 0.0;
  for (const auto& k : b.terms) s += k.c_g * k.c_v;
  return s;
}

// sum_i C(g_i) C(dv_i/dz)
double oscillation_slope(const ConstantsBundle& b) {
  double s = 0.0;
  for (const auto& k : b.terms) s += k.c_g * k.c_dv_dz;
  return s;
}

}  // namespace

void validate(const ConstantsBundle& b) {
  if (!std::isfinite(b.l)) throw InputError("l must be finite");
  require_nonnegative(b.c_F, "c_F");
  require_nonnegative(b.c_DzF, "c_DzF");
  require_nonnegative(b.c_DzzF, "c_DzzF");
  if (!std::isfinite(b.omega) || b.omega <= 0.0) throw InputError("omega must be > 0");
  for (const auto& k : b.terms) {
    require_nonnegative(k.c_g, "c_g");
    require_nonnegative(k.c_G, "c_G");
    require_nonnegative(k.c_v, "c_v");
    require_nonnegative(k.c_DzF_v, "c_DzF_v");
    require_nonnegative(k.c_dv_dt, "c_dv_dt");
    require_nonnegative(k.c_dv_dz, "c_dv_dz");
    require_nonnegative(k.c_d2v_dtdz, "c_d2v_dtdz");
    require_nonnegative(k.c_d2v_dz2, "c_d2v_dz2");
    if (!std::isfinite(k.omega_k) || std::abs(k.omega_k) < b.omega) {
      throw InputError("|omega_k| must be >= omega");
    }
  }
}

double log_norm(const Matrix2& a) {
  if (!a.allFinite()) throw InputError("log_norm: non-finite matrix entry");
  const double p = a(0, 0);
  const double q = a(1, 1);
  const double off = 0.5 * (a(0, 1) + a(1, 0));
  return 0.5 * (p + q) + std::hypot(0.5 * (p - q), off);
}

double spectral_norm(const Matrix2& a) {
  if (!a.allFinite()) throw InputError("spectral_norm: non-finite matrix entry");
  Eigen::JacobiSVD<Matrix2> svd(a);
  return svd.singularValues()(0);
}

double growth_integral(double l, double t) {
  require_time(t);
  if (std::abs(l) < kDegenerateRelTol * std::max(std::abs(l), 1.0)) return t;
  return std::expm1(l * t) / l;
}

double growth_difference_quotient(double l, double l2, double t) {
  require_time(t);
  const double d = l2 - l;
  const double scale = std::max({std::abs(l), std::abs(l2), 1.0});
  if (std::abs(d) < kDegenerateRelTol * scale) return t * std::exp(l * t);
  return std::exp(l * t) * std::expm1(d * t) / d;
}

double l2_rate(const ConstantsBundle& b) { return b.l + oscillation_slope(b); }

namespace {

// Every term of both bounds increases with the rate, so a negative l may be
// replaced by 0: the bound stays valid and becomes nondecreasing in t.
double effective_rate(const ConstantsBundle& b) { return std::max(b.l, 0.0); }

}  // namespace

double c0_bound(const ConstantsBundle& b, double t) {
  require_time(t);
  validate(b);
  const double l = effective_rate(b);
  const double e_lt = std::exp(l * t);
  const double integral = growth_integral(l, t);
  const double drift = b.c_F + oscillation_amplitude(b);

  double total = 0.0;
  for (const auto& k : b.terms) {
    const double boundary = k.c_v * (1.0 + e_lt);
    const double interior = (k.c_DzF_v + k.c_dv_dt + k.c_dv_dz * drift) * integral;
    total += k.c_G * (boundary + interior);
  }
  return total;
}

double c1_bound(const ConstantsBundle& b, double t) {
  require_time(t);
  validate(b);
  const double l = effective_rate(b);
  const double l2 = l + oscillation_slope(b);
  const double e_lt = std::exp(l * t);
  const double e_l2t = std::exp(l2 * t);
  const double quotient = growth_difference_quotient(l, l2, t);
  const double drift = b.c_F + oscillation_amplitude(b);
  const double slope = b.c_DzF + oscillation_slope(b);

  double total = 0.0;
  if (b.c_DzzF != 0.0) total += b.c_DzzF * c0_bound(b, t) * quotient;
  for (const auto& k : b.terms) {
    const double c_DzF_dv = b.c_DzF * k.c_dv_dz;
    const double boundary = k.c_dv_dz * (e_lt + e_l2t);
    const double interior =
        c_DzF_dv + k.c_dv_dz * slope + k.c_d2v_dtdz + k.c_d2v_dz2 * drift;
    total += k.c_G * (boundary + quotient * interior);
  }
  return total;
}

void to_json(nlohmann::json& j, const OscTermConstants& c) {
  j = nlohmann::json{{"c_g", c.c_g},
                     {"c_G", c.c_G},
                     {"c_v", c.c_v},
                     {"c_DzF_v", c.c_DzF_v},
                     {"c_dv_dt", c.c_dv_dt},
                     {"c_dv_dz", c.c_dv_dz},
                     {"c_d2v_dtdz", c.c_d2v_dtdz},
                     {"c_d2v_dz2", c.c_d2v_dz2},
                     {"omega_k", c.omega_k}};
}

void from_json(const nlohmann::json& j, OscTermConstants& c) {
  try {
    j.at("c_g").get_to(c.c_g);
    j.at("c_G").get_to(c.c_G);
    j.at("c_v").get_to(c.c_v);
    j.at("c_DzF_v").get_to(c.c_DzF_v);
    j.at("c_dv_dt").get_to(c.c_dv_dt);
    j.at("c_dv_dz").get_to(c.c_dv_dz);
    j.at("c_d2v_dtdz").get_to(c.c_d2v_dtdz);
    j.at("c_d2v_dz2").get_to(c.c_d2v_dz2);
    j.at("omega_k").get_to(c.omega_k);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad oscillatory term: ") + e.what());
  }
}

void to_json(nlohmann::json& j, const ConstantsBundle& b) {
  j = nlohmann::json{{"l", b.l},         {"c_F", b.c_F},       {"c_DzF", b.c_DzF},
                     {"c_DzzF", b.c_DzzF}, {"omega", b.omega}, {"terms", b.terms}};
}

void from_json(const nlohmann::json& j, ConstantsBundle& b) {
  try {
    j.at("l").get_to(b.l);
    j.at("c_F").get_to(b.c_F);
    j.at("c_DzF").get_to(b.c_DzF);
    j.at("c_DzzF").get_to(b.c_DzzF);
    j.at("omega").get_to(b.omega);
    j.at("terms").get_to(b.terms);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad constants bundle: ") + e.what());
  }
  validate(b);
}

}  // namespace swavg
