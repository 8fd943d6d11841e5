#pragma once

#include <string>

#include <boost/rational.hpp>

namespace wax {

// Exact arithmetic for trade-off thresholds; bounds never touch floating point
// until a caller asks for a double.
using Rat = boost::rational<long long>;

inline long long rat_floor(const Rat& r) {
  long long q = r.numerator() / r.denominator();
  if (r.numerator() % r.denominator() != 0 && r.numerator() < 0) --q;
  return q;
}

inline long long rat_ceil(const Rat& r) {
  long long q = r.numerator() / r.denominator();
  if (r.numerator() % r.denominator() != 0 && r.numerator() > 0) ++q;
  return q;
}

inline double rat_double(const Rat& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline std::string rat_str(const Rat& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace wax
