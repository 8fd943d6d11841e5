#pragma once

#include <cstdint>

#include "wax/dims.hpp"
#include "wax/types.hpp"

namespace wax {

// An M x K narrowband channel realization plus the panel split metadata.
// block(m) views rows [m*L, (m+1)*L) of H without copying.
struct Channel {
  Mat H;
  int L = 1;
  double N0 = 1.0;
  std::uint64_t seed = 0;

  int panels() const { return static_cast<int>(H.rows()) / L; }
  auto block(int m) const { return H.middleRows(static_cast<Eigen::Index>(m) * L, L); }
};

// IID CN(0,1) entries, reproducible for a given seed.
Channel random_channel(const SystemDims& dims, double N0, std::uint64_t seed);

// Wraps an existing H (e.g. read from file) with the panel split.
Channel wrap_channel(Mat H, int L, double N0 = 1.0, std::uint64_t seed = 0);

}  // namespace wax
