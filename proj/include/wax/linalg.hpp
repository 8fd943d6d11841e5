#pragma once

#include "wax/types.hpp"

namespace wax {

// Rank with the relative cutoff rank_rel_tol * max(rows, cols) * sigma_max.
int numerical_rank(const Mat& a, const NumericPolicy& policy = {});

// Orthonormal basis of the right null space (columns).  Empty matrix (cols=0)
// when the matrix has full column rank.
Mat null_space(const Mat& a, const NumericPolicy& policy = {});

// One SVD shared between the min-norm least-squares solution and the null
// basis, so feasibility checks and null completions agree on the rank.
struct LeastSquares {
  Mat solution;        // min-norm X with A X ~= B
  Mat null_basis;      // right null space of A, orthonormal columns
  int rank = 0;
  double residual = 0.0;      // ||A X - B||_F
  double rel_residual = 0.0;  // residual / ||B||_F (0 when B = 0)
  double cond = 0.0;          // sigma_max / sigma_rank
};

LeastSquares solve_least_squares(const Mat& a, const Mat& b, const NumericPolicy& policy = {});

bool is_full_rank(const Mat& a, const NumericPolicy& policy = {});

// sigma_min / sigma_max of a square block; 0 for a zero matrix.
double inverse_condition(const Mat& a);

Mat kron(const Mat& a, const Mat& b);

// Cutoff below which an entry counts as structurally zero (scaled to the
// matrix magnitude); used for sparsity-pattern decisions, not for rank.
double pattern_threshold(const Mat& m);

}  // namespace wax
