#include "swavg/verification.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "swavg/averaging_bounds.hpp"
#include "swavg/dopri5.hpp"
#include "swavg/hyperbolicity.hpp"
#include "swavg/orbits.hpp"
#include "swavg/parallel.hpp"
#include "swavg/sw_system.hpp"

namespace swavg {

namespace {

PlanarPoint random_in_ball(std::mt19937_64& rng, double r) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double rad = r * std::sqrt(u(rng));
  const double a = 2.0 * std::numbers::pi * u(rng);
  return {rad * std::cos(a), rad * std::sin(a)};
}

PlanarPoint random_unit(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  const double a = u(rng);
  return {std::cos(a), std::sin(a)};
}

SuiteResult norm_formulas(const VerifyOptions& o) {
  std::mt19937_64 rng(stream_seed(o.seed, 1));
  double worst_dv = 0.0, worst_d2v = 0.0;
  for (std::size_t i = 0; i < o.samples * 20; ++i) {
    const PlanarPoint z = random_in_ball(rng, 100.0);
    const double exact = dv_norm_exact(z);
    const double scale = std::max(1.0, exact);
    worst_dv = std::max({worst_dv, std::abs(spectral_norm(dv1(z)) - exact) / scale,
                         std::abs(spectral_norm(dv2(z)) - exact) / scale});
  }
  for (std::size_t i = 0; i < o.samples; ++i) {
    const PlanarPoint z = random_in_ball(rng, 100.0);
    const double bound = d2v_norm_bound(z);
    if (bound == 0.0) continue;
    for (int j = 0; j < 200; ++j) {
      const PlanarPoint a = random_unit(rng), b = random_unit(rng);
      for (int k = 1; k <= 2; ++k) {
        worst_d2v = std::max(worst_d2v, d2v_apply(k, z, a, b).norm() / bound);
      }
    }
  }
  std::ostringstream d;
  d << "max rel | ||Dv|| - 3r^2 | = " << worst_dv << ", max ||D2v(a,b)|| / bound = " << worst_d2v;
  return {"norm_formulas", worst_dv < 1e-9 && worst_d2v <= 1.0 + 1e-9, d.str()};
}

SuiteResult jacobian_fd(const VerifyOptions& o) {
  std::mt19937_64 rng(stream_seed(o.seed, 2));
  std::uniform_real_distribution<double> ut(-10.0, 10.0), uk(-100.0, 100.0);
  double worst = 0.0;
  constexpr double step = 1e-5;
  for (std::size_t i = 0; i < o.samples * 10; ++i) {
    const double t = ut(rng), kappa = uk(rng);
    const PlanarPoint z = random_in_ball(rng, 10.0);
    const Matrix2 j = jacobian<double>(t, z, kappa);
    Matrix2 fd;
    for (int c = 0; c < 2; ++c) {
      PlanarPoint e = PlanarPoint::Zero();
      e(c) = step;
      fd.col(c) = (vector_field<double>(t, z + e, kappa) - vector_field<double>(t, z - e, kappa)) /
                  (2.0 * step);
    }
    worst = std::max(worst, (fd - j).norm() / std::max(1.0, j.norm()));
  }
  std::ostringstream d;
  d << "max relative deviation " << worst;
  return {"jacobian_finite_differences", worst < 1e-6, d.str()};
}

SuiteResult generic_vs_closed(const VerifyOptions& o) {
  std::mt19937_64 rng(stream_seed(o.seed, 3));
  std::uniform_real_distribution<double> ur(0.0, std::log(200.0)), uf(0.0, 1.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < o.samples * 20; ++i) {
    const double R = std::exp(ur(rng));
    const double t = uf(rng) / (4.0 * R * R);
    const auto b = decomposition_constants(R);
    worst = std::max(worst, std::abs(c0_bound(b, t) / c0_bound_closed(t, R) - 1.0));
    worst = std::max(worst, std::abs(c1_bound(b, t) / c1_bound_closed(t, R) - 1.0));
  }
  std::ostringstream d;
  d << "max relative difference " << worst;
  return {"generic_vs_closed_form", worst < 1e-12, d.str()};
}

SuiteResult containment(const VerifyOptions& o, bool derivative) {
  constexpr double t = 0.125;
  const double R = std::numbers::sqrt2;
  std::size_t violations = 0;
  double worst_ratio = 0.0;
  for (double kappa : {1e4, 1e5}) {
    const double bound = derivative ? c1_error_closed(t, R, kappa) : c0_error_closed(t, R, kappa);
    std::vector<double> ratio(o.samples);
    parallel_for(o.samples, [&](std::size_t i) {
      std::mt19937_64 rng(stream_seed(o.seed + static_cast<std::uint64_t>(kappa), i));
      const PlanarPoint z0 = random_in_ball(rng, 1.0);
      const double t0 = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
      const SWParams p{kappa};
      double err;
      if (derivative) {
        const auto [z, v] = time_h_map(t0, z0, t, p, o.integrator);
        err = spectral_norm(v - averaged_flow_derivative(t));
      } else {
        err = (advance(t0, z0, t, p, o.integrator) - averaged_flow(t, z0)).norm();
      }
      ratio[i] = err / bound;
    });
    for (double r : ratio) {
      if (r > 1.0) ++violations;
      worst_ratio = std::max(worst_ratio, r);
    }
  }
  std::ostringstream d;
  d << violations << " violations, max error/bound = " << worst_ratio;
  return {derivative ? "c1_bound_containment" : "c0_bound_containment", violations == 0, d.str()};
}

SuiteResult cone_conditions(const VerifyOptions& o) {
  const double kappa = 1.1 * kappa_threshold(1.0);
  const auto rep = empirical_hyperbolicity_check(1.0, kappa, o.samples * 2, 4, o.seed, o.integrator);
  std::ostringstream d;
  d << rep.total_violations() << " violations over " << rep.pairs << " pairs x " << rep.offsets
    << " offsets, min expansion " << rep.min_expansion_ratio << " (xi_lower "
    << rep.certificate.xi_lower << "), max contraction " << rep.max_contraction_ratio
    << " (mu_upper " << rep.certificate.mu_upper << ")";
  return {"cone_conditions", rep.total_violations() == 0 && rep.integration_failures == 0, d.str()};
}

SuiteResult escapes(const VerifyOptions& o) {
  constexpr double kappa = 50.0;
  const auto pred = escape_threshold(kappa);
  const double radius = std::sqrt(pred.norm_sq_threshold) * (1.0 + 1e-9);
  std::size_t missed = 0, late = 0;
  const std::size_t n = o.samples * 2;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    const PlanarPoint z0(radius * std::cos(a), radius * std::sin(a));
    const auto r = certify_escape(z0, 0.0, kappa, o.integrator);
    if (r.kind == EscapeKind::NoEscapeDetected) ++missed;
    if (r.kind == EscapeKind::ForwardEscape && z0.x() > 0.0 && std::abs(z0.x()) >= std::abs(z0.y()) &&
        r.time > pred.t1) {
      ++late;
    }
  }
  std::ostringstream d;
  d << missed << " undetected escapes, " << late << " forward escapes later than t1 = " << pred.t1;
  return {"escape", missed == 0 && late == 0, d.str()};
}

SuiteResult envelope(const VerifyOptions& o) {
  std::mt19937_64 rng(stream_seed(o.seed, 7));
  std::uniform_real_distribution<double> ub(0.1, 10.0), ux(0.1, 10.0);
  double worst = 0.0;
  ode::Options opts;
  opts.rel_tol = 1e-13;
  opts.abs_tol = 1e-15;
  for (std::size_t i = 0; i < o.samples; ++i) {
    const double b = ub(rng), x0 = ux(rng);
    const double t_end = 0.9 * blowup_time(x0, b);
    auto rhs = [b](double, const ode::State<1>& y) -> ode::State<1> {
      return ode::State<1>(b * y(0) * y(0) * y(0));
    };
    auto mon = [](const ode::State<1>&) { return 0.0; };
    const auto sol = ode::solve<1>(rhs, mon, 0.0, ode::State<1>(x0), t_end, opts);
    for (std::size_t k = 0; k < sol.ts.size(); ++k) {
      const double exact = blowup_envelope(x0, b, sol.ts[k]);
      worst = std::max(worst, std::abs(sol.ys[k](0) - exact) / exact);
    }
  }
  std::ostringstream d;
  d << "max relative deviation " << worst;
  return {"blowup_envelope", worst < 1e-9, d.str()};
}

SuiteResult table_and_scaling(const VerifyOptions&) {
  const double k10 = kappa_threshold(10.0), k100 = kappa_threshold(100.0);
  const double slope = scaling_exponent(10.0, 1000.0, 20);
  const bool ok = std::abs(k10 / 2.24e7 - 1.0) < 0.01 && std::abs(k100 / 2.23e11 - 1.0) < 0.01 &&
                  slope >= 3.9 && slope <= 4.1;
  std::ostringstream d;
  d << "kappa(10) = " << k10 << ", kappa(100) = " << k100 << ", slope = " << slope;
  return {"table1_and_scaling", ok, d.str()};
}

}  // namespace

std::vector<SuiteResult> run_verification(const VerifyOptions& o) {
  using Suite = SuiteResult (*)(const VerifyOptions&);
  const Suite suites[] = {
      norm_formulas,
      jacobian_fd,
      generic_vs_closed,
      [](const VerifyOptions& v) { return containment(v, false); },
      [](const VerifyOptions& v) { return containment(v, true); },
      cone_conditions,
      escapes,
      envelope,
      table_and_scaling,
  };
  std::vector<SuiteResult> out;
  for (Suite s : suites) {
    try {
      out.push_back(s(o));
    } catch (const std::exception& e) {
      out.push_back({"<suite error>", false, e.what()});
    }
  }
  return out;
}

}  // namespace swavg
