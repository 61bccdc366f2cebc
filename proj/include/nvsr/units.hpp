#pragma once

#include <string>

namespace nvsr {

/// Parses a scalar with an optional "2pi*" prefix and unit suffix into SI
/// base units (1/s for rates, rad/s for angular frequencies, s for times).
///
/// Accepted forms: "0.74 GHz" -> 7.4e8, "2pi*1 GHz" -> 6.2832e9,
/// "172 ns" -> 1.72e-7, "1.08e9 rad/s", "5e6 1/s", bare numbers pass
/// through unchanged. Frequencies are converted with a plain power-of-ten
/// factor; the 2pi factor is applied only when written explicitly, so a
/// preset states its own convention for every value.
double parse_quantity(const std::string& text);

/// True if `text` parses cleanly.
bool is_quantity(const std::string& text);

}  // namespace nvsr
