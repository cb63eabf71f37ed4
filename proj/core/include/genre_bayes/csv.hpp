#pragma once

// Minimal numeric formatting for the CSV outputs: '.' decimal point,
// locale-independent, deterministic bytes for identical inputs.

#include <cstdio>
#include <string>

namespace genre_bayes {

// %g with the given significant digits; "0.05" stays "0.05".
inline std::string csv_general(double value, int digits = 9) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
  return buf;
}

// Fixed six decimals for rates in [0,1].
inline std::string csv_rate(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

}  // namespace genre_bayes
