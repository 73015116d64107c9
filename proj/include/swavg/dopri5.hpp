#pragma once

// Dormand-Prince 5(4) embedded pair with PI step-size control, FSAL and the
// fourth-order continuous extension. Generic over the fixed state dimension;
// the caller supplies the right-hand side and a scalar monitor whose upward
// crossing of a threshold terminates the integration (used for blow-up).

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "swavg/types.hpp"

namespace swavg::ode {

template <int N>
using State = Eigen::Matrix<double, N, 1>;

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 10'000'000;
  double threshold = std::numeric_limits<double>::infinity();
  double crossing_time_tol = 1e-9;
  std::size_t max_samples = 10'000;
};

enum class Status { Completed, Crossed, StepLimit };

template <int N>
struct Solution {
  Status status = Status::Completed;
  double t = 0.0;
  State<N> y = State<N>::Zero();
  std::vector<double> ts;
  std::vector<State<N>> ys;
  long accepted = 0;
  long rejected = 0;
};

namespace detail {

struct Tableau {
  static constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
  static constexpr double a21 = 0.2;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                          a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                          a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                          a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
  static constexpr double d1 = -12715105075.0 / 11282082432.0,
                          d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0,
                          d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

template <int N>
struct DenseStep {
  State<N> r1, r2, r3, r4, r5;
  State<N> at(double theta) const {
    const double u = 1.0 - theta;
    return r1 + theta * (r2 + u * (r3 + theta * (r4 + u * r5)));
  }
};

template <int N>
double error_norm(const State<N>& err, const State<N>& y0, const State<N>& y1,
                  const Options& o) {
  const State<N> scale =
      (o.abs_tol + o.rel_tol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).matrix();
  return std::sqrt((err.array() / scale.array()).square().mean());
}

}  // namespace detail

/// Integrates y' = rhs(t, y) from (t0, y0) over the signed duration T.
/// Terminates early with Status::Crossed at the first time monitor(y)
/// reaches opts.threshold, located by bisection on the dense output.
template <int N, typename Rhs, typename Monitor>
Solution<N> solve(Rhs&& rhs, Monitor&& monitor, double t0, const State<N>& y0, double T,
                  const Options& opts) {
  using Tab = detail::Tableau;
  Solution<N> out;
  out.t = t0;
  out.y = y0;
  out.ts.push_back(t0);
  out.ys.push_back(y0);
  if (!y0.allFinite()) throw IntegrationError("non-finite initial state");
  if (T == 0.0) return out;
  if (monitor(y0) >= opts.threshold) {
    out.status = Status::Crossed;
    return out;
  }

  const double dir = T > 0.0 ? 1.0 : -1.0;
  const double t_end = t0 + T;
  const double h_max = std::min(opts.max_step, std::abs(T));

  constexpr double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
  constexpr double facc1 = 1.0 / 0.2, facc2 = 1.0 / 10.0;

  double t = t0;
  State<N> y = y0;
  State<N> k1 = rhs(t, y);

  // Initial step guess (Hairer, Norsett & Wanner, II.4).
  double h;
  {
    const State<N> sc = (opts.abs_tol + opts.rel_tol * y.cwiseAbs().array()).matrix();
    const double dnf = std::sqrt((k1.array() / sc.array()).square().mean());
    const double dny = std::sqrt((y.array() / sc.array()).square().mean());
    h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
    h = std::min(h, h_max);
    const State<N> y1 = y + dir * h * k1;
    const State<N> k2 = rhs(t + dir * h, y1);
    const double der2 = std::sqrt(((k2 - k1).array() / sc.array()).square().mean()) / h;
    const double der12 = std::max(std::abs(der2), dnf);
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3)
                                     : std::pow(0.01 / der12, 0.2);
    h = std::min({100.0 * h, h1, h_max});
    if (!(h > 0.0) || !std::isfinite(h)) h = std::min(1e-6, h_max);
  }

  double facold = 1e-4;
  bool last_rejected = false;
  std::size_t stride = 1;
  long since_sample = 0;
  long steps = 0;

  while (true) {
    if (steps >= opts.max_steps) {
      out.status = Status::StepLimit;
      break;
    }
    ++steps;

    bool last = false;
    if ((t + dir * h - t_end) * dir >= 0.0) {
      h = std::abs(t_end - t);
      last = true;
    }
    const double hs = dir * h;

    const State<N> k2 = rhs(t + Tab::c2 * hs, y + hs * (Tab::a21 * k1));
    const State<N> k3 = rhs(t + Tab::c3 * hs, y + hs * (Tab::a31 * k1 + Tab::a32 * k2));
    const State<N> k4 =
        rhs(t + Tab::c4 * hs, y + hs * (Tab::a41 * k1 + Tab::a42 * k2 + Tab::a43 * k3));
    const State<N> k5 = rhs(
        t + Tab::c5 * hs,
        y + hs * (Tab::a51 * k1 + Tab::a52 * k2 + Tab::a53 * k3 + Tab::a54 * k4));
    const State<N> k6 = rhs(t + hs, y + hs * (Tab::a61 * k1 + Tab::a62 * k2 + Tab::a63 * k3 +
                                              Tab::a64 * k4 + Tab::a65 * k5));
    const State<N> y1 = y + hs * (Tab::a71 * k1 + Tab::a73 * k3 + Tab::a74 * k4 +
                                  Tab::a75 * k5 + Tab::a76 * k6);
    const double t1 = last ? t_end : t + hs;
    const State<N> k7 = rhs(t1, y1);
    const State<N> err = hs * (Tab::e1 * k1 + Tab::e3 * k3 + Tab::e4 * k4 + Tab::e5 * k5 +
                               Tab::e6 * k6 + Tab::e7 * k7);
    double e = detail::error_norm<N>(err, y, y1, opts);
    if (!y1.allFinite() || !k7.allFinite() || !std::isfinite(e)) e = 1e10;

    const double fac11 = std::pow(e, expo1);
    if (e <= 1.0) {
      facold = std::max(e, 1e-4);
      ++out.accepted;

      if (monitor(y1) >= opts.threshold) {
        detail::DenseStep<N> d;
        d.r1 = y;
        d.r2 = y1 - y;
        d.r3 = hs * k1 - d.r2;
        d.r4 = d.r2 - hs * k7 - d.r3;
        d.r5 = hs * (Tab::d1 * k1 + Tab::d3 * k3 + Tab::d4 * k4 + Tab::d5 * k5 +
                     Tab::d6 * k6 + Tab::d7 * k7);
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 200 && (hi - lo) * h > opts.crossing_time_tol; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (monitor(d.at(mid)) >= opts.threshold) {
            hi = mid;
          } else {
            lo = mid;
          }
        }
        out.status = Status::Crossed;
        out.t = hi == 1.0 ? t1 : t + hi * hs;
        out.y = hi == 1.0 ? y1 : d.at(hi);
        out.ts.push_back(out.t);
        out.ys.push_back(out.y);
        return out;
      }

      t = t1;
      y = y1;
      k1 = k7;

      if (last) break;
      if (++since_sample >= static_cast<long>(stride)) {
        since_sample = 0;
        out.ts.push_back(t);
        out.ys.push_back(y);
        if (out.ts.size() > opts.max_samples) {
          std::size_t w = 1;
          for (std::size_t r = 2; r < out.ts.size(); r += 2, ++w) {
            out.ts[w] = out.ts[r];
            out.ys[w] = out.ys[r];
          }
          out.ts.resize(w);
          out.ys.resize(w);
          stride *= 2;
        }
      }

      double fac = fac11 / std::pow(facold, beta);
      fac = std::max(facc2, std::min(facc1, fac / safe));
      double h_new = h / fac;
      if (last_rejected) h_new = std::min(h_new, h);
      h = std::min(h_new, h_max);
      last_rejected = false;
    } else {
      ++out.rejected;
      h = h / std::min(facc1, fac11 / safe);
      last_rejected = true;
      if (h <= 1e-15 * std::max(1.0, std::abs(t))) {
        throw IntegrationError("step size underflow at t = " + std::to_string(t));
      }
    }
  }

  if (!y.allFinite()) throw IntegrationError("non-finite state");
  out.t = t;
  out.y = y;
  if (out.ts.back() != t) {
    out.ts.push_back(t);
    out.ys.push_back(y);
  }
  return out;
}

}  // namespace swavg::ode
