#pragma once

#include <complex>
#include <Eigen/Dense>

namespace wax {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using IMat = Eigen::MatrixXi;

// Relative-tolerance knobs shared by rank decisions and feasibility checks.
// numerical rank r = #{ singular values > rank_rel_tol * max(rows,cols) * sigma_max }
struct NumericPolicy {
  double rank_rel_tol = 1e-10;
  double residual_rel_tol = 1e-8;
  int max_retries = 10;
};

// Residual above which a least-squares fit is declared inconsistent.  Between
// residual_rel_tol and this threshold the outcome is indeterminate and the
// caller should retry with a fresh channel draw.
inline constexpr double kInfeasibleResidual = 1e-6;

}  // namespace wax
