#pragma once

#include <string>

namespace uforge {

/// Shortest decimal text that parses back to exactly `x`. Used for every
/// CSV cell so that reports are byte-stable.
std::string format_double(double x);

}  // namespace uforge
