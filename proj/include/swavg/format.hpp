#pragma once

#include <string>

namespace swavg {

/// 17 significant digits with '.' as separator; round-trips every double.
std::string fmt_real(double v);

}  // namespace swavg
