#include "swavg/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "swavg/dopri5.hpp"
#include "swavg/format.hpp"

namespace swavg {

namespace {

ode::Options make_options(const SWParams& p, const IntegratorConfig& cfg) {
  ode::Options o;
  o.rel_tol = cfg.rel_tol;
  o.abs_tol = cfg.abs_tol;
  o.max_step = cfg.max_step_fraction_of_period * 2.0 * std::numbers::pi / std::abs(p.kappa);
  o.max_steps = cfg.max_steps;
  o.threshold = cfg.blowup_norm;
  o.max_samples = cfg.max_samples;
  return o;
}

template <int N>
TrajectoryResult collect(ode::Solution<N>&& sol) {
  TrajectoryResult r;
  switch (sol.status) {
    case ode::Status::Completed: r.outcome = Outcome::Completed; break;
    case ode::Status::Crossed:
      r.outcome = Outcome::BlewUp;
      r.t_escape = sol.t;
      break;
    case ode::Status::StepLimit: r.outcome = Outcome::StepLimit; break;
  }
  r.accepted_steps = sol.accepted;
  r.rejected_steps = sol.rejected;
  r.final_time = sol.t;
  r.final_state = sol.y.template head<2>();

  r.samples.reserve(sol.ts.size());
  for (std::size_t i = 0; i < sol.ts.size(); ++i) {
    TrajectorySample s;
    s.t = sol.ts[i];
    s.z = sol.ys[i].template head<2>();
    if constexpr (N == 6) s.v = Eigen::Map<const Matrix2>(sol.ys[i].data() + 2);
    r.samples.push_back(s);
  }
  if (r.samples.size() > 1 && r.samples.front().t > r.samples.back().t) {
    std::reverse(r.samples.begin(), r.samples.end());
  }
  if constexpr (N == 6) r.monodromy = Eigen::Map<const Matrix2>(sol.y.data() + 2);
  return r;
}

}  // namespace

void validate(const IntegratorConfig& cfg) {
  if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0)) throw InputError("tolerances must be > 0");
  if (!(cfg.max_step_fraction_of_period > 0.0 && cfg.max_step_fraction_of_period < 1.0)) {
    throw InputError("max_step_fraction_of_period must lie in (0, 1)");
  }
  if (!(cfg.blowup_norm > 1.0)) throw InputError("blowup_norm must be > 1");
  if (cfg.max_steps <= 0) throw InputError("max_steps must be positive");
  if (cfg.max_samples < 2) throw InputError("max_samples must be >= 2");
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Completed: return "Completed";
    case Outcome::BlewUp: return "BlewUp";
    case Outcome::StepLimit: return "StepLimit";
  }
  return "?";
}

TrajectoryResult integrate(double t0, const PlanarPoint& z0, double T, const SWParams& p,
                           const IntegratorConfig& cfg) {
  validate(p);
  validate(cfg);
  if (!std::isfinite(t0) || !std::isfinite(T)) throw InputError("t0 and T must be finite");
  const double kappa = p.kappa;
  auto rhs = [kappa](double t, const ode::State<2>& z) -> ode::State<2> {
    return vector_field<double>(t, z, kappa);
  };
  auto norm = [](const ode::State<2>& z) { return z.norm(); };
  return collect(ode::solve<2>(rhs, norm, t0, z0, T, make_options(p, cfg)));
}

TrajectoryResult integrate_variational(double t0, const PlanarPoint& z0, double T,
                                       const SWParams& p, const IntegratorConfig& cfg) {
  validate(p);
  validate(cfg);
  if (!std::isfinite(t0) || !std::isfinite(T)) throw InputError("t0 and T must be finite");
  const double kappa = p.kappa;
  // State layout: (x, y, V column-major).
  auto rhs = [kappa](double t, const ode::State<6>& s) -> ode::State<6> {
    const PlanarPoint z = s.head<2>();
    const Eigen::Map<const Matrix2> v(s.data() + 2);
    ode::State<6> d;
    d.head<2>() = vector_field<double>(t, z, kappa);
    Eigen::Map<Matrix2>(d.data() + 2) = jacobian<double>(t, z, kappa) * v;
    return d;
  };
  auto norm = [](const ode::State<6>& s) { return s.head<2>().norm(); };
  ode::State<6> s0;
  s0 << z0, 1.0, 0.0, 0.0, 1.0;
  return collect(ode::solve<6>(rhs, norm, t0, s0, T, make_options(p, cfg)));
}

namespace {

void require_map_defined(const TrajectoryResult& r, double t0, double h) {
  if (r.outcome == Outcome::BlewUp) {
    std::ostringstream msg;
    msg << "time-h map undefined: solution from t0 = " << t0 << " escapes at t = "
        << *r.t_escape << " before t0 + h = " << t0 + h;
    throw MapUndefinedError(msg.str(), *r.t_escape);
  }
  if (r.outcome == Outcome::StepLimit) throw IntegrationError("time-h map: step limit exhausted");
}

}  // namespace

PlanarPoint advance(double t0, const PlanarPoint& z0, double h, const SWParams& p,
                    const IntegratorConfig& cfg) {
  IntegratorConfig c = cfg;
  c.max_samples = 2;
  const auto r = integrate(t0, z0, h, p, c);
  require_map_defined(r, t0, h);
  return r.final_state;
}

std::pair<PlanarPoint, Matrix2> time_h_map(double t0, const PlanarPoint& z0, double h,
                                           const SWParams& p, const IntegratorConfig& cfg) {
  if (!(h > 0.0)) throw InputError("time_h_map: h must be > 0");
  IntegratorConfig c = cfg;
  c.max_samples = 2;
  const auto r = integrate_variational(t0, z0, h, p, c);
  require_map_defined(r, t0, h);
  return {r.final_state, *r.monodromy};
}

std::string trajectory_csv(const TrajectoryResult& r) {
  std::ostringstream out;
  const bool var = r.monodromy.has_value();
  out << (var ? "t,x,y,v00,v01,v10,v11\n" : "t,x,y\n");
  for (const auto& s : r.samples) {
    out << fmt_real(s.t) << ',' << fmt_real(s.z.x()) << ',' << fmt_real(s.z.y());
    if (var) {
      out << ',' << fmt_real(s.v(0, 0)) << ',' << fmt_real(s.v(0, 1)) << ','
          << fmt_real(s.v(1, 0)) << ',' << fmt_real(s.v(1, 1));
    }
    out << '\n';
  }
  return out.str();
}

void to_json(nlohmann::json& j, const TrajectoryResult& r) {
  j = nlohmann::json::object();
  j["outcome"] = to_string(r.outcome);
  j["t_escape"] = r.t_escape ? nlohmann::json(*r.t_escape) : nlohmann::json(nullptr);
  j["final_time"] = r.final_time;
  j["final_state"] = {r.final_state.x(), r.final_state.y()};
  if (r.monodromy) {
    const Matrix2& m = *r.monodromy;
    j["monodromy"] = {m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
  } else {
    j["monodromy"] = nullptr;
  }
  auto& samples = j["samples"] = nlohmann::json::array();
  for (const auto& s : r.samples) samples.push_back({s.t, s.z.x(), s.z.y()});
  j["accepted_steps"] = r.accepted_steps;
  j["rejected_steps"] = r.rejected_steps;
}

}  // namespace swavg
