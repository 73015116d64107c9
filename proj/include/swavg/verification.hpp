#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swavg/integrator.hpp"

namespace swavg {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  std::size_t samples = 50;  // random samples per suite
  IntegratorConfig integrator;
};

/// Checks every closed-form estimate against an independent computation:
/// norm formulas, Jacobian vs finite differences, generic vs closed-form
/// bounds, bound containment of simulated flows, cone conditions, escapes,
/// and the blow-up envelope.
std::vector<SuiteResult> run_verification(const VerifyOptions& opts);

}  // namespace swavg
