#include "wax/dims.hpp"

#include <string>

#include "wax/errors.hpp"

namespace wax {

SystemDims make_dims(int M, int K, int L, int T_P, bool enforce_regime) {
  if (M <= 0 || K <= 0 || L <= 0 || T_P <= 0) {
    throw DimError("all dimensions must be positive");
  }
  if (M % L != 0) {
    throw DivisibilityError("L = " + std::to_string(L) + " does not divide M = " +
                            std::to_string(M));
  }
  SystemDims d;
  d.M = M;
  d.K = K;
  d.L = L;
  d.M_P = M / L;
  d.T_P = T_P;
  d.T = L * T_P;
  d.Phi = d.M_P - T_P;
  if (d.Phi < 0) {
    throw DimError("T_P = " + std::to_string(T_P) + " exceeds panel count M_P = " +
                   std::to_string(d.M_P));
  }
  if (enforce_regime && !(M >= d.T && d.T >= K && K >= L)) {
    throw RegimeError("operating regime M >= T >= K >= L violated: M=" + std::to_string(M) +
                      " T=" + std::to_string(d.T) + " K=" + std::to_string(K) +
                      " L=" + std::to_string(L));
  }
  return d;
}

SystemDims make_panel_dims(int M_P, int T_P, int K, int L, bool enforce_regime) {
  if (M_P <= 0 || L <= 0) throw DimError("panel sizes must be positive");
  return make_dims(M_P * L, K, L, T_P, enforce_regime);
}

}  // namespace wax
