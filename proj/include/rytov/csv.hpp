#pragma once

#include <string>

namespace rytov {

/// Shortest-round-trip-safe decimal text with 17 significant digits, independent of locale.
std::string format_real(double v);

}  // namespace rytov
