#pragma once

#include "wax/types.hpp"

namespace wax {

// Problem sizes for an M-antenna array split into M_P panels of L antennas,
// serving K users through T = L * T_P combining-module outputs.
struct SystemDims {
  int M = 0;    // total antennas
  int K = 0;    // users
  int L = 0;    // antennas (and multiply-and-sum terms) per panel
  int M_P = 0;  // panels, M / L
  int T_P = 0;  // panel-level module outputs
  int T = 0;    // module outputs after lifting, L * T_P
  int Phi = 0;  // M_P - T_P, number of block equations
};

// Validates divisibility (L | M) and, if enforce_regime, the operating regime
// M >= T >= K >= L.  Bound queries work from raw integers and may build dims
// outside the regime with enforce_regime = false.
SystemDims make_dims(int M, int K, int L, int T_P, bool enforce_regime = true);

// Dims from panel-level sizes: M = M_P * L.
SystemDims make_panel_dims(int M_P, int T_P, int K, int L, bool enforce_regime = true);

}  // namespace wax
