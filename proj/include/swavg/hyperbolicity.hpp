#pragma once

// Cone-condition hyperbolicity of the time-h maps F_j(z) = phi(t0 + j h, h, z).
//
// With the cone fields Q+(z) = {z + (a, b) : |a| >= |b|} and
// Q-(z) = {z + (a, b) : |a| <= |b|}, a family {F_j} is hyperbolic on a convex
// set N containing 0 when Q+ is forward invariant, x-differences of Q+ pairs
// expand by at least xi > 1, and y-differences of Q- pairs contract by at
// most mu < 1. Perturbing the averaged map diag(e^h, e^-h) by at most
// delta = B~(h, R) / |kappa| in operator norm gives xi >= e^h - 2 delta and
// mu <= e^-h + 2 delta, so hyperbolicity on B(0, r0) follows once
// |kappa| > 2 B~(h, R) / (1 - e^-h).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "swavg/integrator.hpp"
#include "swavg/types.hpp"

namespace swavg {

enum class ConeRelation { Positive, Negative, Boundary };

const char* to_string(ConeRelation c);

inline constexpr double kConeBoundaryTol = 1e-14;

/// Cone of z2 relative to z1: Positive iff |x2 - x1| > |y2 - y1|.
ConeRelation cone_relation(const PlanarPoint& z1, const PlanarPoint& z2);

/// Q(a, b) = a^2 - b^2.
inline double cone_form(const PlanarPoint& d) { return d.x() * d.x() - d.y() * d.y(); }

/// True when z2 lies in the closed cone Q+(z1).
bool in_positive_cone(const PlanarPoint& z1, const PlanarPoint& z2);

struct XiMu {
  double xi;
  double mu;
};

/// xi = inf |dFx/dx| - sup |dFx/dy|, mu = sup |dFy/dy| + sup |dFy/dx|.
XiMu xi_mu_from_jacobian_bounds(double inf_Fxx, double sup_Fxy, double sup_Fyy,
                                double sup_Fyx);

struct HyperbolicityCertificate {
  double r0 = 0.0;
  double R = 0.0;  // sqrt(2) r0
  double h = 0.0;  // 1 / (8 r0^2)
  double kappa = 0.0;
  double b_tilde_cap = 0.0;  // B~(h, R)
  double delta_bound = 0.0;  // B~(h, R) / |kappa|
  double xi_lower = 0.0;     // e^h - 2 delta
  double mu_upper = 0.0;     // e^-h + 2 delta
  bool valid = false;        // |kappa| > kappa_threshold(r0)
};

/// 2 B~(h, R) / (1 - e^-h) with R = sqrt(2) r0, h = 1 / (8 r0^2).
double kappa_threshold(double r0);

HyperbolicityCertificate certify(double r0, double kappa);

struct Table1Row {
  double r0 = 0.0;
  double kappa_min = 0.0;
  std::optional<double> reference;      // published value, when tabulated
  std::optional<double> relative_diff;  // |kappa_min - reference| / reference
  bool discrepancy = false;             // relative_diff > 1%
};

/// Published thresholds for r0 = 1, 10, 100.
std::optional<double> table1_reference(double r0);

std::vector<Table1Row> table1(const std::vector<double>& r0_list);

struct EmpiricalReport {
  std::size_t pairs = 0;
  std::size_t offsets = 0;
  std::size_t positive_pairs = 0;
  std::size_t negative_pairs = 0;
  std::size_t invariance_violations = 0;
  std::size_t expansion_violations = 0;
  std::size_t contraction_violations = 0;
  std::size_t integration_failures = 0;
  double min_expansion_ratio = 0.0;    // over Q+ pairs: |dFx| / |dx|
  double max_contraction_ratio = 0.0;  // over Q- pairs: |dFy| / |dy|
  HyperbolicityCertificate certificate;

  std::size_t total_violations() const {
    return invariance_violations + expansion_violations + contraction_violations;
  }
};

/// Absolute slack granted to the empirical inequalities for integration error.
inline constexpr double kEmpiricalSlack = 1e-9;

/// Samples n_pairs pairs in B(0, r0) (alternating Q+ and Q- relations) and
/// checks cone invariance, expansion by xi_lower and contraction by mu_upper
/// for the maps F_j = phi(j h, h, .), j = 0 .. n_offsets - 1.
EmpiricalReport empirical_hyperbolicity_check(double r0, double kappa, std::size_t n_pairs,
                                              std::size_t n_offsets, std::uint64_t seed,
                                              const IntegratorConfig& cfg = {});

enum class OrbitClass { ExitsInPositiveCone, CrossesToPositiveCone, ConvergesToZero, Undecided };

const char* to_string(OrbitClass c);

struct OrbitClassification {
  OrbitClass kind = OrbitClass::Undecided;
  std::size_t steps = 0;  // iterate index n at which the event happened
  bool escaped = false;   // the solution blew up inside a step
  PlanarPoint final_point = PlanarPoint::Zero();
};

inline constexpr double kConvergenceRadius = 1e-12;

/// Iterates the time-h maps from (t0, z0) and reports which alternative of
/// the hyperbolic trichotomy occurs. Requires 0 < |z0| <= r0.
OrbitClassification classify_orbit(const PlanarPoint& z0, double t0, double r0, double kappa,
                                   std::size_t max_iters = 10'000,
                                   const IntegratorConfig& cfg = {});

/// Least-squares slope of log kappa_threshold(r0) against log r0 on a
/// geometric grid of n_points radii in [r0_min, r0_max].
double scaling_exponent(double r0_min, double r0_max, std::size_t n_points);

void to_json(nlohmann::json& j, const HyperbolicityCertificate& c);
void to_json(nlohmann::json& j, const EmpiricalReport& r);

}  // namespace swavg
