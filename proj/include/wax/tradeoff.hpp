#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wax/combiner.hpp"
#include "wax/rational.hpp"

namespace wax {

enum class BoundKind {
  NecessaryT,   // T > max(M(K-L)/K, K-1), any processing
  NecessaryL,   // same inequality solved for L
  Achievable,   // L >= K(M_P-T_P)/(M_P-1), block-diagonal W + lifted module
  Prop3,        // L >= K/(1+Q1)
  Prop4,        // L >= K/(1+1/Q2)
  Prop5,        // L >= K/(1+Q1+1/Q2)
  Conjecture,   // L >= K/(1+Q_tot), staircase structures
  MinTp,        // T_P >= M_P - (M-L)/K
};

std::string to_string(BoundKind k);

// Exact threshold plus the smallest admissible integer (clamped to >= 1 for
// the L and T_P shaped bounds).
struct BoundReport {
  BoundKind kind{};
  Rat threshold = Rat(0);
  bool strict = false;
  long long min_integer = 0;
};

BoundReport necessary_T(int M, int K, int L);
BoundReport necessary_L(int M, int K, int T);
BoundReport achievable_L(int K, int M_P, int T_P);

// Bound of the closed-form structures; Conjecture for General/Sum/Identity.
BoundReport structure_min_L(int K, int M_P, int T_P, Structure s);

struct MinTpReport {
  BoundKind kind = BoundKind::MinTp;
  Rat threshold = Rat(0);
  long long min_integer = 0;
  long long implied_T = 0;  // L * min_integer
};

MinTpReport min_Tp(int M, int K, int L);

// One decentralization/complexity trade-off point: for a panel size L, the
// smallest T_P at which the structure admits L (scanning upward from the
// achievable minimum).  confirmed: -1 unchecked, 0 Monte-Carlo failed, 1 ok.
struct SweepPoint {
  int L = 0;
  int M_P = 0;
  int T_P = -1;
  long long T = -1;
  Structure structure = Structure::General;
  BoundKind bound_kind = BoundKind::Conjecture;
  Rat threshold = Rat(0);
  bool admissible = false;
  int confirmed = -1;
};

struct SweepOptions {
  bool confirm_borderline = true;  // Monte-Carlo check points within 1 panel of min_Tp
  int confirm_seeds = 3;
  std::uint64_t seed_base = 1;
  NumericPolicy policy{};
  bool parallel = true;
};

std::vector<SweepPoint> sweep(int M, int K, Structure s, const std::vector<int>& L_grid,
                              const SweepOptions& options = {});

// Divisors of M that satisfy the regime cap L <= K (default sweep grid).
std::vector<int> default_L_grid(int M, int K);

}  // namespace wax
