#include "wax/channel.hpp"

#include <string>
#include <utility>

#include "wax/errors.hpp"
#include "wax/rng.hpp"

namespace wax {

Channel random_channel(const SystemDims& dims, double N0, std::uint64_t seed) {
  Rng rng(seed);
  Channel ch;
  ch.H = rng.cgaussian_matrix(dims.M, dims.K);
  ch.L = dims.L;
  ch.N0 = N0;
  ch.seed = seed;
  return ch;
}

Channel wrap_channel(Mat H, int L, double N0, std::uint64_t seed) {
  if (L <= 0 || H.rows() % L != 0) {
    throw DivisibilityError("panel size L = " + std::to_string(L) +
                            " does not divide channel rows = " + std::to_string(H.rows()));
  }
  Channel ch;
  ch.H = std::move(H);
  ch.L = L;
  ch.N0 = N0;
  ch.seed = seed;
  return ch;
}

}  // namespace wax
