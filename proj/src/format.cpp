#include "swavg/format.hpp"

#include <cstdio>

namespace swavg {

std::string fmt_real(double v) {
  char buf[40];
  // %.17g is locale-dependent only through LC_NUMERIC, which the CLI never sets.
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace swavg
