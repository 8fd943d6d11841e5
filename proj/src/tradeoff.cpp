#include "wax/tradeoff.hpp"

#include <algorithm>

#include "wax/dims.hpp"
#include "wax/errors.hpp"
#include "wax/solver.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wax {

namespace {

long long min_integer_for(const Rat& threshold, bool strict, bool clamp_to_one) {
  long long v = strict ? rat_floor(threshold) + 1 : rat_ceil(threshold);
  if (clamp_to_one && v < 1) v = 1;
  return v;
}

}  // namespace

std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::NecessaryT: return "necessary_T";
    case BoundKind::NecessaryL: return "necessary_L";
    case BoundKind::Achievable: return "achievable";
    case BoundKind::Prop3: return "prop3";
    case BoundKind::Prop4: return "prop4";
    case BoundKind::Prop5: return "prop5";
    case BoundKind::Conjecture: return "conjecture";
    case BoundKind::MinTp: return "min_Tp";
  }
  return "?";
}

BoundReport necessary_T(int M, int K, int L) {
  if (M <= 0 || K <= 0 || L <= 0) throw DimError("sizes must be positive");
  BoundReport r;
  r.kind = BoundKind::NecessaryT;
  r.strict = true;
  r.threshold = std::max(Rat(static_cast<long long>(M) * (K - L), K), Rat(K - 1));
  r.min_integer = min_integer_for(r.threshold, true, true);
  return r;
}

BoundReport necessary_L(int M, int K, int T) {
  if (M <= 0 || K <= 0 || T <= 0) throw DimError("sizes must be positive");
  BoundReport r;
  r.kind = BoundKind::NecessaryL;
  r.strict = true;
  // From T > M(K-L)/K; when T > K-1 already holds, any L works (threshold 0).
  r.threshold = std::max(Rat(static_cast<long long>(K) * (M - T), M), Rat(0));
  r.min_integer = min_integer_for(r.threshold, true, true);
  return r;
}

BoundReport achievable_L(int K, int M_P, int T_P) {
  if (M_P == 1) throw DegenerateError("single panel is centralized, no trade-off");
  if (K <= 0 || M_P <= 0 || T_P <= 0 || T_P > M_P) throw DimError("bad achievable_L arguments");
  BoundReport r;
  r.kind = BoundKind::Achievable;
  r.strict = false;
  r.threshold = Rat(static_cast<long long>(K) * (M_P - T_P), M_P - 1);
  r.min_integer = min_integer_for(r.threshold, false, true);
  return r;
}

BoundReport structure_min_L(int K, int M_P, int T_P, Structure s) {
  if (K <= 0 || M_P <= 0 || T_P <= 0 || T_P > M_P) throw DimError("bad structure_min_L arguments");
  BoundReport r;
  r.strict = false;
  switch (s) {
    case Structure::Prop3: {
      const QValues q = q_values(M_P, T_P, s);
      r.kind = BoundKind::Prop3;
      r.threshold = Rat(K, 1 + q.Q1);
      break;
    }
    case Structure::Prop4: {
      const QValues q = q_values(M_P, T_P, s);
      r.kind = BoundKind::Prop4;
      r.threshold = Rat(K) / (Rat(1) + Rat(1, q.Q2));
      break;
    }
    case Structure::Prop5: {
      const QValues q = q_values(M_P, T_P, s);
      r.kind = BoundKind::Prop5;
      r.threshold = Rat(K) / (Rat(1) + Rat(q.Q1) + Rat(1, q.Q2));
      break;
    }
    case Structure::Identity: {
      if (T_P != M_P) throw StructureDomainError("identity structure needs T_P = M_P");
      r.kind = BoundKind::Conjecture;
      r.threshold = Rat(0);
      break;
    }
    case Structure::Sum:
      if (T_P != 1) throw StructureDomainError("sum structure needs T_P = 1");
      [[fallthrough]];
    case Structure::General: {
      r.kind = BoundKind::Conjecture;
      if (T_P == M_P) {
        r.threshold = Rat(0);
      } else {
        const CFExpansion cf = cf_expansion(T_P, M_P);
        r.threshold = Rat(K) / (Rat(1) + cf.value);
      }
      break;
    }
    case Structure::Custom:
      throw StructureDomainError("no closed-form bound for custom modules");
  }
  r.min_integer = min_integer_for(r.threshold, false, true);
  return r;
}

MinTpReport min_Tp(int M, int K, int L) {
  if (M <= 0 || K <= 0 || L <= 0) throw DimError("sizes must be positive");
  if (M % L != 0) throw DivisibilityError("L does not divide M");
  const int M_P = M / L;
  MinTpReport r;
  r.threshold = Rat(M_P) - Rat(M - L, K);
  r.min_integer = std::max<long long>(1, rat_ceil(r.threshold));
  r.implied_T = static_cast<long long>(L) * r.min_integer;
  return r;
}

std::vector<int> default_L_grid(int M, int K) {
  std::vector<int> grid;
  for (int L = 1; L <= std::min(M, K); ++L) {
    if (M % L == 0) grid.push_back(L);
  }
  return grid;
}

std::vector<SweepPoint> sweep(int M, int K, Structure s, const std::vector<int>& L_grid,
                              const SweepOptions& options) {
  if (s == Structure::Custom) throw StructureDomainError("cannot sweep custom modules");
  for (int L : L_grid) {
    if (L <= 0 || M % L != 0) {
      throw DivisibilityError("grid value L = " + std::to_string(L) + " does not divide M");
    }
    if (L > K) throw RegimeError("grid value L = " + std::to_string(L) + " exceeds K");
  }

  std::vector<SweepPoint> points(L_grid.size());
  const int n = static_cast<int>(L_grid.size());

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (options.parallel)
#endif
  for (int gi = 0; gi < n; ++gi) {
    const int L = L_grid[gi];
    const int M_P = M / L;
    SweepPoint pt;
    pt.L = L;
    pt.M_P = M_P;
    pt.structure = s;

    const long long tp_floor = min_Tp(M, K, L).min_integer;
    const int start = static_cast<int>(std::max<long long>(1, tp_floor));
    for (int tp = start; tp <= M_P; ++tp) {
      BoundReport br;
      try {
        br = structure_min_L(K, M_P, tp, s);
      } catch (const StructureDomainError&) {
        continue;  // structure undefined at this T_P
      }
      if (br.min_integer <= L) {
        pt.T_P = tp;
        pt.T = static_cast<long long>(L) * tp;
        pt.bound_kind = br.kind;
        pt.threshold = br.threshold;
        pt.admissible = true;
        break;
      }
    }

    if (pt.admissible && options.confirm_borderline && pt.T_P - start <= 1) {
      const SystemDims dims = make_panel_dims(M_P, pt.T_P, K, L);
      const CombiningModule cm = build_structure(dims, s);
      std::vector<std::uint64_t> seeds(options.confirm_seeds);
      for (int i = 0; i < options.confirm_seeds; ++i) {
        seeds[i] = derive_seed(options.seed_base, static_cast<std::uint64_t>(gi) * 1000 + i);
      }
      const ValidationReport vr = validate_A(cm, dims, seeds, options.policy, false);
      pt.confirmed = vr.valid ? 1 : 0;
    }
    points[gi] = pt;
  }
  return points;
}

}  // namespace wax
