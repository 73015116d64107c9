#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "swavg/sw_system.hpp"
#include "swavg/types.hpp"

namespace swavg {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  /// Steps never exceed this fraction of the forcing period 2 pi / |kappa|.
  double max_step_fraction_of_period = 0.05;
  double blowup_norm = 1e6;
  long max_steps = 10'000'000;
  std::size_t max_samples = 10'000;
};

void validate(const IntegratorConfig& cfg);

enum class Outcome { Completed, BlewUp, StepLimit };

const char* to_string(Outcome o);

struct TrajectorySample {
  double t = 0.0;
  PlanarPoint z = PlanarPoint::Zero();
  Matrix2 v = Matrix2::Identity();  // meaningful only for variational runs
};

struct TrajectoryResult {
  Outcome outcome = Outcome::Completed;
  std::optional<double> t_escape;   // set when outcome == BlewUp
  std::vector<TrajectorySample> samples;  // strictly increasing in t
  double final_time = 0.0;
  PlanarPoint final_state = PlanarPoint::Zero();
  std::optional<Matrix2> monodromy;  // dphi/dz0 at final_time, variational runs only
  long accepted_steps = 0;
  long rejected_steps = 0;
};

/// phi(t0, T, z0) on [t0, t0 + T] (T may be negative). Stops with BlewUp at
/// the first time |z| reaches cfg.blowup_norm.
TrajectoryResult integrate(double t0, const PlanarPoint& z0, double T, const SWParams& p,
                           const IntegratorConfig& cfg = {});

/// Same as integrate, co-integrating V' = D_z field(t, z(t)) V with V(t0) = I.
TrajectoryResult integrate_variational(double t0, const PlanarPoint& z0, double T,
                                       const SWParams& p, const IntegratorConfig& cfg = {});

/// z -> phi(t0, h, z). Throws MapUndefinedError on blow-up inside [0, h].
PlanarPoint advance(double t0, const PlanarPoint& z0, double h, const SWParams& p,
                    const IntegratorConfig& cfg = {});

/// (phi(t0, h, z0), dphi/dz0(t0, h, z0)). Throws MapUndefinedError on
/// blow-up inside [0, h].
std::pair<PlanarPoint, Matrix2> time_h_map(double t0, const PlanarPoint& z0, double h,
                                           const SWParams& p, const IntegratorConfig& cfg = {});

/// CSV with header "t,x,y" (plus "v00,v01,v10,v11" for variational runs).
std::string trajectory_csv(const TrajectoryResult& r);

void to_json(nlohmann::json& j, const TrajectoryResult& r);

}  // namespace swavg
