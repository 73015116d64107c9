#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/LU>
#include <nlohmann/json.hpp>

#include "swavg/integrator.hpp"
#include "swavg/orbits.hpp"
#include "swavg/sw_system.hpp"

using namespace swavg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

PlanarPoint random_in_ball(std::mt19937_64& rng, double r) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double rad = r * std::sqrt(u(rng));
  const double a = 2.0 * std::numbers::pi * u(rng);
  return {rad * std::cos(a), rad * std::sin(a)};
}

}  // namespace

TEST_CASE("config validation") {
  IntegratorConfig c;
  CHECK_NOTHROW(validate(c));
  c.rel_tol = 0.0;
  CHECK_THROWS_AS(validate(c), InputError);
  c = {};
  c.max_step_fraction_of_period = 1.0;
  CHECK_THROWS_AS(validate(c), InputError);
  c = {};
  c.blowup_norm = 1.0;
  CHECK_THROWS_AS(validate(c), InputError);
  CHECK_THROWS_AS(integrate(0, PlanarPoint(1, 0), 1, SWParams{0.0}), InputError);
}

TEST_CASE("the origin is an equilibrium") {
  for (double T : {1.0, -2.0}) {
    const auto r = integrate(0.3, PlanarPoint(0, 0), T, SWParams{17.0});
    CHECK(r.outcome == Outcome::Completed);
    CHECK(r.final_state.isZero());
    CHECK(r.final_time == 0.3 + T);
  }
}

TEST_CASE("C0 averaging bound contains the integrated flow at kappa = 1e6") {
  const PlanarPoint z0(0.5, 0.5);
  const auto r = integrate(0.0, z0, 0.125, SWParams{1e6});
  REQUIRE(r.outcome == Outcome::Completed);
  const double bound = c0_error_closed(0.125, kSqrt2, 1e6);
  CHECK_THAT(bound, WithinRel(2.411813217223978e-5, 1e-12));
  CHECK((r.final_state - averaged_flow(0.125, z0)).norm() <= bound);
}

TEST_CASE("C1 averaging bound contains the monodromy at kappa = 1e6") {
  const auto r = integrate_variational(0.0, PlanarPoint(0.5, 0.5), 0.125, SWParams{1e6});
  REQUIRE(r.monodromy);
  const double bound = c1_error_closed(0.125, kSqrt2, 1e6);
  CHECK_THAT(bound, WithinRel(1.746725858455854e-4, 1e-12));
  CHECK(spectral_norm(*r.monodromy - averaged_flow_derivative(0.125)) <= bound);
}

TEST_CASE("large initial data blows up before the analytic escape time") {
  const auto r = integrate(0.0, PlanarPoint(20, 0), 1.0, SWParams{50.0});
  REQUIRE(r.outcome == Outcome::BlewUp);
  REQUIRE(r.t_escape);
  const double bound = 1.0 / (2 * kSqrt2 * std::sin(std::numbers::pi / 8) * 400.0);
  CHECK(*r.t_escape < bound);
  CHECK(r.final_state.norm() >= IntegratorConfig{}.blowup_norm);
  CHECK(r.final_time == *r.t_escape);
}

TEST_CASE("variational run at the origin") {
  const double h = 0.125;
  const auto r = integrate_variational(0.0, PlanarPoint(0, 0), h, SWParams{3.0});
  REQUIRE(r.monodromy);
  CHECK((*r.monodromy - averaged_flow_derivative(h)).norm() < 1e-10);
  const auto [z, v] = time_h_map(1.0, PlanarPoint(0, 0), h, SWParams{3.0});
  CHECK(z.isZero());
  CHECK((v - averaged_flow_derivative(h)).norm() < 1e-10);
}

TEST_CASE("monodromy agrees with finite differences") {
  std::mt19937_64 rng(21);
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-13;
  cfg.abs_tol = 1e-15;
  for (int i = 0; i < 10; ++i) {
    const PlanarPoint z0 = random_in_ball(rng, 1.0);
    const double t0 = 0.1 * i, kappa = 20.0 + 5 * i;
    const auto [z, v] = time_h_map(t0, z0, 0.125, SWParams{kappa}, cfg);
    Matrix2 fd;
    constexpr double step = 1e-6;
    for (int c = 0; c < 2; ++c) {
      PlanarPoint e = PlanarPoint::Zero();
      e(c) = step;
      fd.col(c) = (advance(t0, z0 + e, 0.125, SWParams{kappa}, cfg) -
                   advance(t0, z0 - e, 0.125, SWParams{kappa}, cfg)) / (2 * step);
    }
    REQUIRE((fd - v).norm() / v.norm() < 1e-5);
  }
}

TEST_CASE("time-h maps compose into the 2h flow and preserve orientation") {
  std::mt19937_64 rng(22);
  const SWParams p{40.0};
  for (int i = 0; i < 20; ++i) {
    const PlanarPoint z0 = random_in_ball(rng, 1.0);
    const double t0 = 0.05 * i, h = 0.06;
    const auto [z1, v1] = time_h_map(t0, z0, h, p);
    const auto [z2, v2] = time_h_map(t0 + h, z1, h, p);
    const auto [zz, vv] = time_h_map(t0, z0, 2 * h, p);
    REQUIRE((z2 - zz).norm() < 1e-8);
    REQUIRE((v2 * v1 - vv).norm() < 1e-7);
    REQUIRE(v1.determinant() > 0.0);
    REQUIRE(vv.determinant() > 0.0);
  }
  CHECK_THROWS_AS(time_h_map(0.0, PlanarPoint(1, 0), 0.0, p), InputError);
  CHECK_THROWS_AS(time_h_map(0.0, PlanarPoint(1, 0), -0.1, p), InputError);
}

TEST_CASE("flow property on random samples") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 0.06);
  for (int i = 0; i < 100; ++i) {
    const PlanarPoint z0 = random_in_ball(rng, 1.0);
    const double t0 = 10 * u(rng), s = u(rng), w = u(rng);
    const SWParams p{30.0 + i};
    const auto whole = integrate(t0, z0, s + w, p);
    const auto first = integrate(t0, z0, s, p);
    const auto second = integrate(t0 + s, first.final_state, w, p);
    REQUIRE((whole.final_state - second.final_state).norm() < 1e-8);
  }
}

TEST_CASE("backward integration inverts forward integration") {
  std::mt19937_64 rng(24);
  for (int i = 0; i < 50; ++i) {
    const PlanarPoint z0 = random_in_ball(rng, 1.0);
    const SWParams p{10.0 + i};
    const auto f = integrate(0.2, z0, 0.1, p);
    const auto b = integrate(f.final_time, f.final_state, -0.1, p);
    REQUIRE(b.outcome == Outcome::Completed);
    REQUIRE((b.final_state - z0).norm() < 1e-8);
    REQUIRE(b.samples.front().t == Catch::Approx(0.2));
    for (std::size_t k = 1; k < b.samples.size(); ++k) REQUIRE(b.samples[k].t > b.samples[k - 1].t);
  }
}

TEST_CASE("halving tolerances moves the answer by less than the coarse tolerance") {
  std::mt19937_64 rng(25);
  IntegratorConfig coarse;
  coarse.rel_tol = 1e-8;
  coarse.abs_tol = 1e-10;
  IntegratorConfig fine = coarse;
  fine.rel_tol /= 2;
  fine.abs_tol /= 2;
  for (int i = 0; i < 20; ++i) {
    const PlanarPoint z0 = random_in_ball(rng, 1.0);
    const auto a = integrate(0.0, z0, 0.125, SWParams{100.0}, coarse);
    const auto b = integrate(0.0, z0, 0.125, SWParams{100.0}, fine);
    REQUIRE((a.final_state - b.final_state).norm() < coarse.rel_tol * (1 + z0.norm()));
  }
}

TEST_CASE("step cap resolves the forcing period") {
  const double kappa = 1e3;
  const auto r = integrate(0.0, PlanarPoint(0.1, 0.1), 0.1, SWParams{kappa});
  const double cap = 0.05 * 2 * std::numbers::pi / kappa;
  CHECK(r.accepted_steps >= static_cast<long>(0.1 / cap));
}

TEST_CASE("step limit outcome and map errors") {
  IntegratorConfig cfg;
  cfg.max_steps = 5;
  const auto r = integrate(0.0, PlanarPoint(0.5, 0), 1.0, SWParams{100.0}, cfg);
  CHECK(r.outcome == Outcome::StepLimit);
  CHECK_THROWS_AS(advance(0.0, PlanarPoint(0.5, 0), 1.0, SWParams{100.0}, cfg), IntegrationError);
  try {
    advance(0.0, PlanarPoint(20, 0), 1.0, SWParams{50.0});
    FAIL("expected MapUndefinedError");
  } catch (const MapUndefinedError& e) {
    CHECK(e.escape_time() > 0.0);
  }
}

TEST_CASE("cone Q+ stays forward invariant while cos(kappa t) > 0") {
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> ua(-std::numbers::pi / 4, std::numbers::pi / 4), ur(0.1, 5.0);
  const double kappa = 20.0;
  for (int i = 0; i < 200; ++i) {
    const double a = ua(rng), rad = ur(rng);
    const double sign = (i % 2) ? 1.0 : -1.0;
    const PlanarPoint z0(sign * rad * std::cos(a), rad * std::sin(a));
    const auto r = integrate(0.0, z0, std::numbers::pi / (2 * kappa) * 0.999, SWParams{kappa});
    for (const auto& s : r.samples) {
      REQUIRE(std::abs(s.z.x()) - std::abs(s.z.y()) >= -1e-9 * (1 + s.z.norm()));
    }
  }
}

TEST_CASE("d(x^2 - y^2)/dt equals |z|^2 (1 + cos(kappa t)|z|^2) along trajectories") {
  std::mt19937_64 rng(27);
  std::uniform_real_distribution<double> ut(0.0, 1.0);
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-13;
  cfg.abs_tol = 1e-15;
  for (int i = 0; i < 50; ++i) {
    const double kappa = 5.0 + i, t0 = ut(rng);
    const PlanarPoint z0 = random_in_ball(rng, 2.0);
    const double dt = 1e-5;
    const auto q = [](const PlanarPoint& z) { return z.x() * z.x() - z.y() * z.y(); };
    const PlanarPoint zp = advance(t0, z0, dt, SWParams{kappa}, cfg);
    const PlanarPoint zm = integrate(t0, z0, -dt, SWParams{kappa}, cfg).final_state;
    const double fd = (q(zp) - q(zm)) / (2 * dt);
    const double r2 = z0.squaredNorm();
    const double exact = 2 * r2 * (1 + std::cos(kappa * t0) * r2);
    REQUIRE(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
    REQUIRE(exact / 2 >= std::cos(kappa * t0) * r2 * r2 - 1e-12);
  }
}

TEST_CASE("trajectory CSV and JSON export") {
  const auto r = integrate_variational(0.0, PlanarPoint(0.2, 0.1), 0.05, SWParams{10.0});
  const std::string csv = trajectory_csv(r);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x,y,v00,v01,v10,v11");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == r.samples.size());

  const auto plain = integrate(0.0, PlanarPoint(0.2, 0.1), 0.05, SWParams{10.0});
  CHECK(trajectory_csv(plain).rfind("t,x,y\n", 0) == 0);

  const nlohmann::json j = r;
  CHECK(j["outcome"] == "Completed");
  CHECK(j["monodromy"].size() == 4);
}
