#include "nvsr/units.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>

#include "nvsr/error.hpp"
#include "nvsr/types.hpp"

namespace nvsr {

namespace {

std::string strip(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

const std::map<std::string, double>& unit_table() {
  static const std::map<std::string, double> table = {
      {"Hz", 1.0},     {"kHz", 1e3},   {"MHz", 1e6},  {"GHz", 1e9},
      {"THz", 1e12},   {"1/s", 1.0},   {"rad/s", 1.0}, {"s", 1.0},
      {"ms", 1e-3},    {"us", 1e-6},   {"ns", 1e-9},  {"ps", 1e-12},
  };
  return table;
}

}  // namespace

double parse_quantity(const std::string& text) {
  std::string s = strip(text);
  if (s.empty()) throw ConfigError("empty quantity");

  double two_pi_factor = 1.0;
  if (s.rfind("2pi*", 0) == 0) {
    two_pi_factor = kTwoPi;
    s = strip(s.substr(4));
  }

  const char* begin = s.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin) throw ConfigError("cannot parse quantity '" + text + "'");

  std::string unit = strip(std::string(end));
  double scale = 1.0;
  if (!unit.empty()) {
    auto it = unit_table().find(unit);
    if (it == unit_table().end())
      throw ConfigError("unknown unit '" + unit + "' in '" + text + "'");
    scale = it->second;
  }
  return two_pi_factor * value * scale;
}

bool is_quantity(const std::string& text) {
  try {
    parse_quantity(text);
    return true;
  } catch (const ConfigError&) {
    return false;
  }
}

}  // namespace nvsr
