#pragma once

#include <string>

namespace co2st {

/// Shortest decimal that parses back to the same double ("0.004685", "120", "1e-06").
std::string format_shortest(double value);

/// Display rounding: `digits` significant digits, ties to even on the exact
/// binary value. Magnitudes in [1e-3, 1e5) print in fixed notation with
/// trailing zeros kept ("2.020", "0.000"); others as "2.742e-4".
std::string format_sig(double value, int digits = 4);

} // namespace co2st
