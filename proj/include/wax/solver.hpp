#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wax/channel.hpp"
#include "wax/combiner.hpp"
#include "wax/dims.hpp"
#include "wax/rng.hpp"
#include "wax/types.hpp"

namespace wax {

// Result of a WAX factorization H = W A X with W = blockdiag(W_1..W_M_P).
struct WaxFactors {
  std::vector<Mat> W;           // M_P blocks, L x L each
  Mat X;                        // T x K (empty if recovery was impossible)
  double residual = 0.0;        // ||H - W A X||_F / ||H||_F
  std::vector<int> block_rank;  // numerical rank of each W block
  int reference = -1;           // panel pinned to W = I (-1 when unconstrained)
};

enum class SolveStatus { Feasible, Infeasible, Indeterminate };

struct SolveOutcome {
  SolveStatus status = SolveStatus::Infeasible;
  WaxFactors factors;        // best-effort blocks even when infeasible
  double ls_residual = 0.0;  // worst relative least-squares residual
  double cond = 0.0;         // worst subsystem conditioning
  int retries = 0;           // null-space completions consumed
  std::string detail;
};

// Stacked per-panel system [b_1^T (x) H_1; ... ; b_M_P^T (x) H_M_P]: the
// decomposition exists iff [W_1^{-1} .. W_M_P^{-1}] annihilates it with
// invertible blocks.
struct FaceSplitSystem {
  Mat mat;  // (M_P * L) x (Phi * K)
  int L = 0;
  int K = 0;
  int phi = 0;
  int panels = 0;
};

FaceSplitSystem face_split(const BTilde& bt, const Channel& ch);

// Equation layout read off B~: the pinned reference panel, unconstrained
// panels, and connected components of equations coupled by shared blocks.
struct EquationComponent {
  std::vector<int> equations;
  std::vector<int> panels;  // participants except the reference
};

struct EquationSystem {
  int reference = -1;
  std::vector<int> free;
  std::vector<EquationComponent> components;
};

EquationSystem equation_system(const BTilde& bt);

// Solves one component for the G = W^{-1} blocks of its panels (reference
// pinned to I).  Throws RankError if no completion with invertible blocks is
// found in max_retries draws despite a consistent system.
struct ComponentSolve {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<Mat> G;  // aligned with comp.panels
  double rel_residual = 0.0;
  double cond = 0.0;
  int retries = 0;
};

ComponentSolve solve_component(const BTilde& bt, const Channel& ch,
                               const EquationComponent& comp, int reference,
                               const NumericPolicy& policy, Rng& rng);

// Structured solve through the reduced block equations.
SolveOutcome try_solve_equivalent(const CombiningModule& cm, const Channel& ch,
                                  const NumericPolicy& policy = {},
                                  std::uint64_t null_seed = 0);
WaxFactors solve_equivalent(const CombiningModule& cm, const Channel& ch,
                            const NumericPolicy& policy = {}, std::uint64_t null_seed = 0);

// Structure-agnostic solve via the vectorized linear system
// [I_K (x) A , -(H^T (x) I_M) S] [vec X; vec G_1..G_M_P] = 0.
struct VectorizedSystem {
  Mat mat;       // (M K) x (K T + M L)
  Mat selector;  // M^2 x (M L) block-diagonal placement map S
  int M = 0;
  int K = 0;
  int T = 0;
  int L = 0;
};

VectorizedSystem build_vectorized(const Mat& A, const Channel& ch);
SolveOutcome try_solve_generic(const Mat& A, const Channel& ch,
                               const NumericPolicy& policy = {}, std::uint64_t null_seed = 0);
WaxFactors solve_generic(const Mat& A, const Channel& ch, const NumericPolicy& policy = {},
                         std::uint64_t null_seed = 0);

// X = (A_R (x) I_L)^{-1} diag(W_R)^{-1} [H_R] over the full-rank row frame R.
Mat recover_X(const CombiningModule& cm, const Channel& ch, const std::vector<Mat>& W,
              const NumericPolicy& policy = {});

double global_residual(const Mat& A, const Channel& ch, const std::vector<Mat>& W, const Mat& X);

// Monte-Carlo validity of a combining module (all seeds must be feasible).
struct SeedOutcome {
  std::uint64_t seed = 0;
  SolveStatus status = SolveStatus::Infeasible;
  double residual = 0.0;
  double ls_residual = 0.0;
  bool redrawn = false;
  std::string detail;
};

struct ValidationReport {
  bool valid = false;
  bool indeterminate = false;
  std::vector<SeedOutcome> seeds;
};

ValidationReport validate_A(const CombiningModule& cm, const SystemDims& dims,
                            const std::vector<std::uint64_t>& seeds,
                            const NumericPolicy& policy = {}, bool parallel = true);
ValidationReport validate_A(const Mat& A, const SystemDims& dims,
                            const std::vector<std::uint64_t>& seeds,
                            const NumericPolicy& policy = {}, bool parallel = true);

// log2 det(I + H^H H / N0), and the same after projecting onto col(W A).
double mutual_info(const Mat& H, double N0);
double mutual_info(const Mat& H, double N0, const std::vector<Mat>& W, const Mat& A,
                   const NumericPolicy& policy = {});

}  // namespace wax
