#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "wax/types.hpp"

namespace wax {

// Text matrix format: first line "rows cols", then one line per row with
// whitespace-separated entries written as re+imj (e.g. "1.5-0.25j").

void write_matrix(std::ostream& os, const Mat& m);
void write_matrix(const std::string& path, const Mat& m);
Mat read_matrix(std::istream& is);
Mat read_matrix(const std::string& path);

std::string format_complex(Cplx z);
Cplx parse_complex(const std::string& token);

// JSON run configuration with keys M, K, L, T_P and optional N0, seed.
struct DimsConfig {
  int M = 0;
  int K = 0;
  int L = 0;
  int T_P = 0;
  double N0 = 1.0;
  std::uint64_t seed = 0;
  bool has_seed = false;
};

DimsConfig read_dims_config(const std::string& path);

}  // namespace wax
