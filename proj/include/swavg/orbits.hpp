#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "swavg/integrator.hpp"
#include "swavg/types.hpp"

namespace swavg {

/// Raised when the comparison envelope is evaluated at or past its pole.
class PastBlowUpError : public DomainError {
 public:
  PastBlowUpError(const std::string& what, double blowup_time)
      : DomainError(what), blowup_time_(blowup_time) {}
  double blowup_time() const noexcept { return blowup_time_; }

 private:
  double blowup_time_;
};

/// Pole of y' = b y^3, y(0) = x0: 1 / (2 b x0^2).
double blowup_time(double x0, double b);

/// x0 / sqrt(1 - 2 b x0^2 t), the solution of y' = b y^3, y(0) = x0, which
/// bounds from below every solution of x' > b x^3 with x(0) = x0 > 0.
double blowup_envelope(double x0, double b, double t);

struct EscapePrediction {
  double delta = 0.0;
  double t1 = 0.0;       // (pi/4 - delta) / kappa
  double epsilon = 0.0;  // sqrt(2) sin(delta)
  double norm_sq_threshold = 0.0;  // kappa / (sqrt(2) (pi/4 - delta) sin(delta))
};

/// The delta in (0, pi/4) maximizing (pi/4 - delta) sin(delta), i.e. the
/// root of tan(delta) = pi/4 - delta.
double optimal_escape_delta();

/// Any |z0|^2 >= norm_sq_threshold escapes to infinity in finite time,
/// forward or backward. Requires kappa > 0 and delta in (0, pi/4).
EscapePrediction escape_threshold(double kappa, double delta);
EscapePrediction escape_threshold(double kappa);

enum class EscapeKind { ForwardEscape, BackwardEscape, NoEscapeDetected };

const char* to_string(EscapeKind k);

struct EscapeResult {
  EscapeKind kind = EscapeKind::NoEscapeDetected;
  double time = 0.0;     // elapsed time to the threshold crossing, or the horizon searched
  double horizon = 0.0;  // 2 t1
  EscapePrediction prediction;
  std::string diagnostics;
};

/// Integrates forward, then backward, over the horizon 2 t1 and reports the
/// first detected escape.
EscapeResult certify_escape(const PlanarPoint& z0, double t0, double kappa,
                            const IntegratorConfig& cfg = {});

/// Infimum of R with R^2 (R^2 - 1) > (1/2 + kappa/4)^2.
double segment_radius_bound(double kappa);

struct PeriodicOrbit {
  double kappa = 0.0;
  double period = 0.0;
  double t0 = 0.0;
  PlanarPoint z_init = PlanarPoint::Zero();
  double residual = 0.0;  // |P(z_init) - z_init|
  double min_norm = 0.0;
  double max_norm = 0.0;
  std::size_t newton_iterations = 0;
};

struct PeriodicSearch {
  std::optional<PeriodicOrbit> orbit;
  std::string failure;  // empty on success
  std::size_t iterations = 0;
  double last_residual = 0.0;
};

inline constexpr double kPeriodicAcceptResidual = 1e-10;
inline constexpr double kPeriodicStagnationResidual = 1e-8;
inline constexpr std::size_t kPeriodicPhaseSamples = 1000;

/// Newton iteration on G(z) = phi(t0, 2 pi / |kappa|, z) - z with the
/// monodromy supplying DG. Requires guess != 0.
PeriodicSearch find_periodic_orbit(double kappa, const PlanarPoint& guess, double t0 = 0.0,
                                   const IntegratorConfig& cfg = {});

/// Runs find_periodic_orbit from n_angles guesses on the circle of radius
/// segment_radius_bound(kappa) / sqrt(2) and returns the first success.
PeriodicSearch search_periodic_orbit(double kappa, double t0 = 0.0, std::size_t n_angles = 16,
                                     const IntegratorConfig& cfg = {});

/// Largest r0 >= 1 with kappa_threshold(r0) < |kappa|: the ball B(0, r0)
/// is hyperbolic and holds no nonzero bounded orbit.
std::optional<double> hyperbolic_radius(double kappa);

struct NormBoundsReport {
  double kappa = 0.0;
  double max_norm = 0.0;
  double min_norm = 0.0;
  double max_over_sqrt_kappa = 0.0;
  double max_over_quarter_kappa = 0.0;
  double segment_radius = 0.0;
  bool within_segment_radius = false;
  std::optional<double> hyperbolic_radius;
  bool lower_bound_consistent = true;  // max_norm >= hyperbolic_radius when defined
};

NormBoundsReport norm_bounds_check(const PeriodicOrbit& orbit);

struct NormExponentFit {
  std::optional<double> exponent;  // slope of log max_norm vs log kappa
  bool in_range = false;           // exponent in [0.25, 0.5]
  std::string note;                // "insufficient data" when < 2 orbits
};

NormExponentFit fit_norm_exponent(const std::vector<PeriodicOrbit>& orbits);

void to_json(nlohmann::json& j, const EscapePrediction& e);
void to_json(nlohmann::json& j, const EscapeResult& e);
void to_json(nlohmann::json& j, const PeriodicOrbit& o);
void to_json(nlohmann::json& j, const NormBoundsReport& r);

}  // namespace swavg
