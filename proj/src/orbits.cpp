#include "swavg/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include "swavg/hyperbolicity.hpp"

namespace swavg {

double blowup_time(double x0, double b) {
  if (!(x0 > 0.0) || !(b > 0.0) || !std::isfinite(x0) || !std::isfinite(b)) {
    throw InputError("blow-up envelope requires x0 > 0 and b > 0");
  }
  return 1.0 / (2.0 * b * x0 * x0);
}

double blowup_envelope(double x0, double b, double t) {
  const double t_blow = blowup_time(x0, b);
  if (!std::isfinite(t) || t < 0.0) throw InputError("blow-up envelope requires t >= 0");
  if (t >= t_blow) {
    std::ostringstream msg;
    msg << "t = " << t << " is at or past the blow-up time " << t_blow;
    throw PastBlowUpError(msg.str(), t_blow);
  }
  return x0 / std::sqrt(1.0 - 2.0 * b * x0 * x0 * t);
}

double optimal_escape_delta() {
  // g(d) = tan d - (pi/4 - d) is increasing on (0, pi/4) with g(0) < 0 < g(pi/4).
  double lo = 0.0, hi = std::numbers::pi / 4.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (std::tan(mid) - (std::numbers::pi / 4.0 - mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

EscapePrediction escape_threshold(double kappa, double delta) {
  if (!std::isfinite(kappa) || kappa <= 0.0) throw InputError("escape_threshold requires kappa > 0");
  if (!(delta > 0.0 && delta < std::numbers::pi / 4.0)) {
    throw InputError("escape_threshold requires delta in (0, pi/4)");
  }
  EscapePrediction e;
  e.delta = delta;
  e.t1 = (std::numbers::pi / 4.0 - delta) / kappa;
  e.epsilon = std::numbers::sqrt2 * std::sin(delta);
  e.norm_sq_threshold =
      kappa / (std::numbers::sqrt2 * (std::numbers::pi / 4.0 - delta) * std::sin(delta));
  return e;
}

EscapePrediction escape_threshold(double kappa) {
  return escape_threshold(kappa, optimal_escape_delta());
}

const char* to_string(EscapeKind k) {
  switch (k) {
    case EscapeKind::ForwardEscape: return "ForwardEscape";
    case EscapeKind::BackwardEscape: return "BackwardEscape";
    case EscapeKind::NoEscapeDetected: return "NoEscapeDetected";
  }
  return "?";
}

EscapeResult certify_escape(const PlanarPoint& z0, double t0, double kappa,
                            const IntegratorConfig& cfg) {
  EscapeResult out;
  out.prediction = escape_threshold(kappa);
  out.horizon = 2.0 * out.prediction.t1;
  IntegratorConfig c = cfg;
  c.max_samples = 2;
  const SWParams p{kappa};

  const auto fwd = integrate(t0, z0, out.horizon, p, c);
  if (fwd.outcome == Outcome::BlewUp) {
    out.kind = EscapeKind::ForwardEscape;
    out.time = *fwd.t_escape - t0;
    return out;
  }
  const auto bwd = integrate(t0, z0, -out.horizon, p, c);
  if (bwd.outcome == Outcome::BlewUp) {
    out.kind = EscapeKind::BackwardEscape;
    out.time = t0 - *bwd.t_escape;
    return out;
  }
  out.kind = EscapeKind::NoEscapeDetected;
  out.time = out.horizon;
  std::ostringstream diag;
  diag << "forward " << to_string(fwd.outcome) << " |z| = " << fwd.final_state.norm()
       << ", backward " << to_string(bwd.outcome) << " |z| = " << bwd.final_state.norm();
  out.diagnostics = diag.str();
  return out;
}

double segment_radius_bound(double kappa) {
  if (!std::isfinite(kappa) || kappa < 0.0) throw InputError("segment_radius_bound requires kappa >= 0");
  const double rhs = std::pow(0.5 + 0.25 * kappa, 2);
  return std::sqrt(0.5 * (1.0 + std::sqrt(1.0 + 4.0 * rhs)));
}

namespace {

struct ReturnMap {
  bool defined = false;
  PlanarPoint image = PlanarPoint::Zero();
  Matrix2 derivative = Matrix2::Identity();
};

ReturnMap period_map(double t0, const PlanarPoint& z, double period, const SWParams& p,
                     const IntegratorConfig& cfg) {
  ReturnMap m;
  IntegratorConfig c = cfg;
  c.max_samples = 2;
  const auto r = integrate_variational(t0, z, period, p, c);
  if (r.outcome != Outcome::Completed) return m;
  m.defined = true;
  m.image = r.final_state;
  m.derivative = *r.monodromy;
  return m;
}

void sample_norm_range(PeriodicOrbit& orbit, const SWParams& p, const IntegratorConfig& cfg) {
  const double dt = orbit.period / static_cast<double>(kPeriodicPhaseSamples);
  IntegratorConfig c = cfg;
  c.max_samples = 2;
  PlanarPoint z = orbit.z_init;
  orbit.min_norm = orbit.max_norm = z.norm();
  for (std::size_t i = 0; i < kPeriodicPhaseSamples; ++i) {
    z = advance(orbit.t0 + static_cast<double>(i) * dt, z, dt, p, c);
    orbit.min_norm = std::min(orbit.min_norm, z.norm());
    orbit.max_norm = std::max(orbit.max_norm, z.norm());
  }
}

}  // namespace

PeriodicSearch find_periodic_orbit(double kappa, const PlanarPoint& guess, double t0,
                                   const IntegratorConfig& cfg) {
  if (!guess.allFinite() || guess.norm() == 0.0) {
    throw InputError("find_periodic_orbit requires a nonzero initial guess");
  }
  const SWParams p{kappa};
  validate(p);
  validate(cfg);
  const double period = 2.0 * std::numbers::pi / std::abs(kappa);

  PeriodicSearch search;
  auto fail = [&](const std::string& why) {
    search.failure = why;
    return search;
  };

  PlanarPoint z = guess;
  ReturnMap m = period_map(t0, z, period, p, cfg);
  if (!m.defined) return fail("initial guess escapes within one period");
  double residual = (m.image - z).norm();

  for (std::size_t it = 1; it <= 50; ++it) {
    search.iterations = it;
    search.last_residual = residual;
    if (residual < kPeriodicAcceptResidual) break;

    const Matrix2 dg = m.derivative - Matrix2::Identity();
    const Eigen::JacobiSVD<Matrix2> svd(dg);
    const auto sv = svd.singularValues();
    if (!(sv(1) > 0.0) || sv(0) / sv(1) > 1e12) return fail("singular Newton matrix");
    const PlanarPoint step = -dg.partialPivLu().solve(m.image - z);

    // Backtracking: halve the step until the residual decreases.
    bool improved = false;
    double lambda = 1.0;
    for (int k = 0; k < 12; ++k, lambda *= 0.5) {
      const PlanarPoint trial = z + lambda * step;
      ReturnMap mt = period_map(t0, trial, period, p, cfg);
      if (!mt.defined) continue;
      const double rt = (mt.image - trial).norm();
      if (rt < residual * (1.0 - 1e-4 * lambda)) {
        z = trial;
        m = mt;
        residual = rt;
        improved = true;
        break;
      }
    }
    search.last_residual = residual;
    if (z.norm() < 1e-6) return fail("collapsed to trivial orbit");
    if (!improved) {
      // At the integration noise floor the residual stops decreasing.
      if (residual < kPeriodicStagnationResidual) break;
      return fail("line search failed");
    }
  }

  if (residual >= kPeriodicStagnationResidual) {
    return fail("Newton iteration did not converge in 50 steps");
  }
  if (z.norm() < 1e-6) return fail("collapsed to trivial orbit");

  PeriodicOrbit orbit;
  orbit.kappa = kappa;
  orbit.period = period;
  orbit.t0 = t0;
  orbit.z_init = z;
  orbit.residual = residual;
  orbit.newton_iterations = search.iterations;
  try {
    sample_norm_range(orbit, p, cfg);
  } catch (const IntegrationError& e) {
    return fail(std::string("orbit sampling failed: ") + e.what());
  }
  search.orbit = orbit;
  return search;
}

PeriodicSearch search_periodic_orbit(double kappa, double t0, std::size_t n_angles,
                                     const IntegratorConfig& cfg) {
  const double radius = segment_radius_bound(std::abs(kappa)) / std::numbers::sqrt2;
  PeriodicSearch last;
  std::ostringstream failures;
  for (std::size_t i = 0; i < n_angles; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n_angles);
    const PlanarPoint guess(radius * std::cos(a), radius * std::sin(a));
    last = find_periodic_orbit(kappa, guess, t0, cfg);
    if (last.orbit) return last;
    failures << (i ? "; " : "") << last.failure;
  }
  last.failure = "no guess converged: " + failures.str();
  return last;
}

std::optional<double> hyperbolic_radius(double kappa) {
  const double k = std::abs(kappa);
  if (!(kappa_threshold(1.0) < k)) return std::nullopt;
  double lo = 1.0, hi = 2.0;
  while (kappa_threshold(hi) < k) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (kappa_threshold(mid) < k) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

NormBoundsReport norm_bounds_check(const PeriodicOrbit& orbit) {
  NormBoundsReport r;
  const double k = std::abs(orbit.kappa);
  r.kappa = orbit.kappa;
  r.max_norm = orbit.max_norm;
  r.min_norm = orbit.min_norm;
  r.max_over_sqrt_kappa = orbit.max_norm / std::sqrt(k);
  r.max_over_quarter_kappa = orbit.max_norm / std::pow(k, 0.25);
  r.segment_radius = segment_radius_bound(k);
  r.within_segment_radius = orbit.max_norm <= r.segment_radius;
  r.hyperbolic_radius = hyperbolic_radius(k);
  if (r.hyperbolic_radius) r.lower_bound_consistent = orbit.max_norm >= *r.hyperbolic_radius;
  return r;
}

NormExponentFit fit_norm_exponent(const std::vector<PeriodicOrbit>& orbits) {
  NormExponentFit fit;
  std::vector<std::pair<double, double>> pts;
  for (const auto& o : orbits) {
    if (o.max_norm > 0.0) pts.emplace_back(std::log(std::abs(o.kappa)), std::log(o.max_norm));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pts.size());
  const double denom = n * sxx - sx * sx;
  if (pts.size() < 2 || !(std::abs(denom) > 1e-300)) {
    fit.note = "insufficient data";
    return fit;
  }
  fit.exponent = (n * sxy - sx * sy) / denom;
  fit.in_range = *fit.exponent >= 0.25 && *fit.exponent <= 0.5;
  return fit;
}

void to_json(nlohmann::json& j, const EscapePrediction& e) {
  j = nlohmann::json{{"delta", e.delta},
                     {"t1", e.t1},
                     {"epsilon", e.epsilon},
                     {"norm_sq_threshold", e.norm_sq_threshold}};
}

void to_json(nlohmann::json& j, const EscapeResult& e) {
  j = nlohmann::json{{"kind", to_string(e.kind)},
                     {"time", e.time},
                     {"horizon", e.horizon},
                     {"prediction", e.prediction},
                     {"diagnostics", e.diagnostics}};
}

void to_json(nlohmann::json& j, const PeriodicOrbit& o) {
  j = nlohmann::json{{"kappa", o.kappa},
                     {"period", o.period},
                     {"t0", o.t0},
                     {"z_init", {o.z_init.x(), o.z_init.y()}},
                     {"residual", o.residual},
                     {"min_norm", o.min_norm},
                     {"max_norm", o.max_norm},
                     {"newton_iterations", o.newton_iterations}};
}

void to_json(nlohmann::json& j, const NormBoundsReport& r) {
  j = nlohmann::json{{"kappa", r.kappa},
                     {"max_norm", r.max_norm},
                     {"min_norm", r.min_norm},
                     {"max_over_sqrt_kappa", r.max_over_sqrt_kappa},
                     {"max_over_quarter_kappa", r.max_over_quarter_kappa},
                     {"segment_radius", r.segment_radius},
                     {"within_segment_radius", r.within_segment_radius},
                     {"hyperbolic_radius", r.hyperbolic_radius ? nlohmann::json(*r.hyperbolic_radius)
                                                               : nlohmann::json(nullptr)},
                     {"lower_bound_consistent", r.lower_bound_consistent}};
}

}  // namespace swavg
