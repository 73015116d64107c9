#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "swavg/dopri5.hpp"
#include "swavg/orbits.hpp"

using namespace swavg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
auto no_monitor = [](const auto&) { return 0.0; };
}

TEST_CASE("exponential decay to tight tolerance") {
  auto rhs = [](double, const ode::State<1>& y) -> ode::State<1> { return -y; };
  ode::Options o;
  o.rel_tol = 1e-12;
  o.abs_tol = 1e-14;
  const auto s = ode::solve<1>(rhs, no_monitor, 0.0, ode::State<1>(1.0), 5.0, o);
  REQUIRE(s.status == ode::Status::Completed);
  CHECK(s.t == 5.0);
  CHECK_THAT(s.y(0), WithinRel(std::exp(-5.0), 1e-10));
  CHECK(s.ts.front() == 0.0);
  CHECK(s.ts.back() == 5.0);
}

TEST_CASE("harmonic oscillator forward and backward") {
  auto rhs = [](double, const ode::State<2>& y) -> ode::State<2> { return {y(1), -y(0)}; };
  ode::Options o;
  const auto f = ode::solve<2>(rhs, no_monitor, 0.0, ode::State<2>(1, 0), 10.0, o);
  CHECK_THAT(f.y(0), WithinAbs(std::cos(10.0), 1e-8));
  CHECK_THAT(f.y(1), WithinAbs(-std::sin(10.0), 1e-8));
  const auto b = ode::solve<2>(rhs, no_monitor, 10.0, f.y, -10.0, o);
  CHECK(b.t == 0.0);
  CHECK((b.y - ode::State<2>(1, 0)).norm() < 1e-8);
  for (std::size_t i = 1; i < b.ts.size(); ++i) REQUIRE(b.ts[i] < b.ts[i - 1]);
}

TEST_CASE("zero duration returns the initial state") {
  auto rhs = [](double, const ode::State<1>& y) -> ode::State<1> { return y; };
  const auto s = ode::solve<1>(rhs, no_monitor, 2.0, ode::State<1>(3.0), 0.0, {});
  CHECK(s.status == ode::Status::Completed);
  CHECK(s.y(0) == 3.0);
  CHECK(s.t == 2.0);
}

TEST_CASE("max_step caps every accepted step") {
  auto rhs = [](double, const ode::State<1>&) -> ode::State<1> { return ode::State<1>(1.0); };
  ode::Options o;
  o.max_step = 0.01;
  const auto s = ode::solve<1>(rhs, no_monitor, 0.0, ode::State<1>(0.0), 1.0, o);
  CHECK(s.accepted >= 100);
  CHECK_THAT(s.y(0), WithinAbs(1.0, 1e-13));
}

TEST_CASE("threshold crossing is located to the requested time tolerance") {
  // y' = y^3, y(0) = 1 blows up at t = 1/2; |y| = 100 at t = (1 - 1e-4) / 2
  auto rhs = [](double, const ode::State<1>& y) -> ode::State<1> { return ode::State<1>(y(0) * y(0) * y(0)); };
  auto mon = [](const ode::State<1>& y) { return std::abs(y(0)); };
  ode::Options o;
  o.threshold = 100.0;
  const auto s = ode::solve<1>(rhs, mon, 0.0, ode::State<1>(1.0), 1.0, o);
  REQUIRE(s.status == ode::Status::Crossed);
  CHECK_THAT(s.t, WithinAbs(0.5 * (1 - 1e-4), 1e-8));
  CHECK(s.y(0) >= 100.0);
}

TEST_CASE("step limit is reported") {
  auto rhs = [](double, const ode::State<1>& y) -> ode::State<1> { return y; };
  ode::Options o;
  o.max_step = 1e-3;
  o.max_steps = 10;
  const auto s = ode::solve<1>(rhs, no_monitor, 0.0, ode::State<1>(1.0), 1.0, o);
  CHECK(s.status == ode::Status::StepLimit);
  CHECK(s.accepted + s.rejected <= 10);
}

TEST_CASE("sample count is bounded") {
  auto rhs = [](double, const ode::State<1>& y) -> ode::State<1> { return -y; };
  ode::Options o;
  o.max_step = 1e-4;
  o.max_samples = 100;
  const auto s = ode::solve<1>(rhs, no_monitor, 0.0, ode::State<1>(1.0), 1.0, o);
  CHECK(s.ts.size() <= 101);
  CHECK(s.ts.back() == 1.0);
}

TEST_CASE("numerical solutions of x' = b x^3 + c dominate the envelope") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ub(0.1, 5.0), uc(0.01, 3.0), ux(0.1, 3.0);
  ode::Options o;
  o.rel_tol = 1e-12;
  o.abs_tol = 1e-14;
  for (int i = 0; i < 100; ++i) {
    const double b = ub(rng), c = uc(rng), x0 = ux(rng);
    auto rhs = [b, c](double, const ode::State<1>& y) -> ode::State<1> {
      return ode::State<1>(b * y(0) * y(0) * y(0) + c);
    };
    const double tb = blowup_time(x0, b);
    // the forced solution blows up first; stop at a large threshold
    o.threshold = 1e8;
    const auto s = ode::solve<1>(rhs, [](const ode::State<1>& y) { return std::abs(y(0)); }, 0.0,
                                 ode::State<1>(x0), 0.9 * tb, o);
    for (std::size_t k = 0; k < s.ts.size(); ++k) {
      REQUIRE(s.ys[k](0) >= blowup_envelope(x0, b, s.ts[k]) * (1 - 1e-9));
    }
  }
}
