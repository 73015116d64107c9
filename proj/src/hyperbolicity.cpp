#include "swavg/hyperbolicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "swavg/parallel.hpp"
#include "swavg/sw_system.hpp"

namespace swavg {

const char* to_string(ConeRelation c) {
  switch (c) {
    case ConeRelation::Positive: return "Positive";
    case ConeRelation::Negative: return "Negative";
    case ConeRelation::Boundary: return "Boundary";
  }
  return "?";
}

const char* to_string(OrbitClass c) {
  switch (c) {
    case OrbitClass::ExitsInPositiveCone: return "ExitsInPositiveCone";
    case OrbitClass::CrossesToPositiveCone: return "CrossesToPositiveCone";
    case OrbitClass::ConvergesToZero: return "ConvergesToZero";
    case OrbitClass::Undecided: return "Undecided";
  }
  return "?";
}

ConeRelation cone_relation(const PlanarPoint& z1, const PlanarPoint& z2) {
  const double a = std::abs(z2.x() - z1.x());
  const double b = std::abs(z2.y() - z1.y());
  if (std::abs(a - b) <= kConeBoundaryTol) return ConeRelation::Boundary;
  return a > b ? ConeRelation::Positive : ConeRelation::Negative;
}

bool in_positive_cone(const PlanarPoint& z1, const PlanarPoint& z2) {
  return cone_relation(z1, z2) != ConeRelation::Negative;
}

XiMu xi_mu_from_jacobian_bounds(double inf_Fxx, double sup_Fxy, double sup_Fyy,
                                double sup_Fyx) {
  return {inf_Fxx - sup_Fxy, sup_Fyy + sup_Fyx};
}

double kappa_threshold(double r0) {
  const Enclosure enc = apriori_enclosure(r0);
  return 2.0 * c1_bound_closed(enc.h, enc.radius) / -std::expm1(-enc.h);
}

HyperbolicityCertificate certify(double r0, double kappa) {
  if (!std::isfinite(kappa) || kappa == 0.0) throw InputError("kappa must be finite and nonzero");
  const Enclosure enc = apriori_enclosure(r0);
  HyperbolicityCertificate c;
  c.r0 = r0;
  c.R = enc.radius;
  c.h = enc.h;
  c.kappa = kappa;
  c.b_tilde_cap = c1_bound_closed(enc.h, enc.radius);
  c.delta_bound = c.b_tilde_cap / std::abs(kappa);
  c.xi_lower = std::exp(c.h) - 2.0 * c.delta_bound;
  c.mu_upper = std::exp(-c.h) + 2.0 * c.delta_bound;
  c.valid = std::abs(kappa) > kappa_threshold(r0);
  return c;
}

std::optional<double> table1_reference(double r0) {
  if (r0 == 1.0) return 3655.0;
  if (r0 == 10.0) return 2.24e7;
  if (r0 == 100.0) return 2.23e11;
  return std::nullopt;
}

std::vector<Table1Row> table1(const std::vector<double>& r0_list) {
  for (double r0 : r0_list) apriori_enclosure(r0);
  std::vector<Table1Row> rows;
  rows.reserve(r0_list.size());
  for (double r0 : r0_list) {
    Table1Row row;
    row.r0 = r0;
    row.kappa_min = kappa_threshold(r0);
    row.reference = table1_reference(r0);
    if (row.reference) {
      row.relative_diff = std::abs(row.kappa_min - *row.reference) / *row.reference;
      row.discrepancy = *row.relative_diff > 0.01;
    }
    rows.push_back(row);
  }
  return rows;
}

namespace {

struct PairOutcome {
  ConeRelation relation = ConeRelation::Positive;
  std::size_t invariance = 0, expansion = 0, contraction = 0, failures = 0;
  double min_expansion = std::numeric_limits<double>::infinity();
  double max_contraction = 0.0;
};

PlanarPoint sample_in_ball(std::mt19937_64& rng, double r0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = r0 * std::sqrt(u(rng));
  const double theta = 2.0 * std::numbers::pi * u(rng);
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace

EmpiricalReport empirical_hyperbolicity_check(double r0, double kappa, std::size_t n_pairs,
                                              std::size_t n_offsets, std::uint64_t seed,
                                              const IntegratorConfig& cfg) {
  EmpiricalReport report;
  report.certificate = certify(r0, kappa);
  validate(cfg);
  report.pairs = n_pairs;
  report.offsets = n_offsets;
  const double h = report.certificate.h;
  const double xi = report.certificate.xi_lower;
  const double mu = report.certificate.mu_upper;
  const SWParams p{kappa};

  std::vector<PairOutcome> outcomes(n_pairs);
  parallel_for(n_pairs, [&](std::size_t i) {
    std::mt19937_64 rng(stream_seed(seed, i));
    const ConeRelation want = i % 2 == 0 ? ConeRelation::Positive : ConeRelation::Negative;
    PlanarPoint z1, z2;
    while (true) {
      z1 = sample_in_ball(rng, r0);
      z2 = sample_in_ball(rng, r0);
      const double a = std::abs(z2.x() - z1.x());
      const double b = std::abs(z2.y() - z1.y());
      if (std::abs(a - b) > 1e-12 && cone_relation(z1, z2) == want) break;
    }
    PairOutcome& o = outcomes[i];
    o.relation = want;
    const PlanarPoint d = z1 - z2;
    for (std::size_t j = 0; j < n_offsets; ++j) {
      const double t0 = static_cast<double>(j) * h;
      PlanarPoint f1, f2;
      try {
        f1 = advance(t0, z1, h, p, cfg);
        f2 = advance(t0, z2, h, p, cfg);
      } catch (const IntegrationError&) {
        ++o.failures;
        continue;
      }
      const PlanarPoint fd = f1 - f2;
      if (want == ConeRelation::Positive) {
        if (std::abs(fd.x()) < std::abs(fd.y()) - kEmpiricalSlack) ++o.invariance;
        if (std::abs(fd.x()) < xi * std::abs(d.x()) - kEmpiricalSlack) ++o.expansion;
        o.min_expansion = std::min(o.min_expansion, std::abs(fd.x()) / std::abs(d.x()));
      } else {
        if (std::abs(fd.y()) > mu * std::abs(d.y()) + kEmpiricalSlack) ++o.contraction;
        o.max_contraction = std::max(o.max_contraction, std::abs(fd.y()) / std::abs(d.y()));
      }
    }
  });

  report.min_expansion_ratio = std::numeric_limits<double>::infinity();
  for (const auto& o : outcomes) {
    if (o.relation == ConeRelation::Positive) {
      ++report.positive_pairs;
    } else {
      ++report.negative_pairs;
    }
    report.invariance_violations += o.invariance;
    report.expansion_violations += o.expansion;
    report.contraction_violations += o.contraction;
    report.integration_failures += o.failures;
    report.min_expansion_ratio = std::min(report.min_expansion_ratio, o.min_expansion);
    report.max_contraction_ratio = std::max(report.max_contraction_ratio, o.max_contraction);
  }
  return report;
}

OrbitClassification classify_orbit(const PlanarPoint& z0, double t0, double r0, double kappa,
                                   std::size_t max_iters, const IntegratorConfig& cfg) {
  const Enclosure enc = apriori_enclosure(r0);
  const double n0 = z0.norm();
  if (!(n0 > 0.0) || n0 > r0) throw InputError("classify_orbit requires 0 < |z0| <= r0");
  const SWParams p{kappa};
  validate(p);

  const PlanarPoint origin = PlanarPoint::Zero();
  const bool started_positive = in_positive_cone(origin, z0);
  OrbitClassification out;
  PlanarPoint z = z0;
  for (std::size_t n = 1; n <= max_iters; ++n) {
    try {
      z = advance(t0 + static_cast<double>(n - 1) * enc.h, z, enc.h, p, cfg);
    } catch (const MapUndefinedError&) {
      out.kind = OrbitClass::ExitsInPositiveCone;
      out.steps = n;
      out.escaped = true;
      out.final_point = z;
      return out;
    }
    out.final_point = z;
    out.steps = n;
    const bool positive = in_positive_cone(origin, z);
    if (z.norm() >= r0) {
      out.kind = positive ? OrbitClass::ExitsInPositiveCone : OrbitClass::Undecided;
      return out;
    }
    if (!started_positive && positive) {
      out.kind = OrbitClass::CrossesToPositiveCone;
      return out;
    }
    if (!positive && z.norm() < kConvergenceRadius) {
      out.kind = OrbitClass::ConvergesToZero;
      return out;
    }
  }
  out.kind = OrbitClass::Undecided;
  return out;
}

double scaling_exponent(double r0_min, double r0_max, std::size_t n_points) {
  if (!(r0_min >= 1.0) || !(r0_max > r0_min) || !std::isfinite(r0_max)) {
    throw InputError("scaling_exponent requires 1 <= r0_min < r0_max");
  }
  if (n_points < 2) throw InputError("scaling_exponent requires n_points >= 2");
  const double ratio = std::log(r0_max / r0_min);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n_points; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(n_points - 1);
    const double r0 = i + 1 == n_points ? r0_max : r0_min * std::exp(f * ratio);
    const double x = std::log(r0);
    const double y = std::log(kappa_threshold(r0));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(n_points);
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void to_json(nlohmann::json& j, const HyperbolicityCertificate& c) {
  j = nlohmann::json{{"r0", c.r0},
                     {"R", c.R},
                     {"h", c.h},
                     {"kappa", c.kappa},
                     {"b_tilde_cap", c.b_tilde_cap},
                     {"delta_bound", c.delta_bound},
                     {"xi_lower", c.xi_lower},
                     {"mu_upper", c.mu_upper},
                     {"kappa_threshold", kappa_threshold(c.r0)},
                     {"valid", c.valid}};
}

void to_json(nlohmann::json& j, const EmpiricalReport& r) {
  j = nlohmann::json{
      {"pairs", r.pairs},
      {"offsets", r.offsets},
      {"positive_pairs", r.positive_pairs},
      {"negative_pairs", r.negative_pairs},
      {"violations",
       {{"invariance", r.invariance_violations},
        {"expansion", r.expansion_violations},
        {"contraction", r.contraction_violations}}},
      {"integration_failures", r.integration_failures},
      {"min_expansion_ratio", r.min_expansion_ratio},
      {"max_contraction_ratio", r.max_contraction_ratio},
      {"certificate", r.certificate}};
}

}  // namespace swavg
