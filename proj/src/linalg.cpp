#include "wax/linalg.hpp"

#include <Eigen/SVD>
#include <algorithm>

namespace wax {

namespace {

int rank_from_singvals(const Eigen::VectorXd& sv, Eigen::Index rows, Eigen::Index cols,
                       double rel_tol) {
  if (sv.size() == 0) return 0;
  const double cutoff = rel_tol * static_cast<double>(std::max(rows, cols)) * sv(0);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++r;
  }
  return r;
}

}  // namespace

int numerical_rank(const Mat& a, const NumericPolicy& policy) {
  if (a.size() == 0) return 0;
  Eigen::BDCSVD<Mat> svd(a);
  return rank_from_singvals(svd.singularValues(), a.rows(), a.cols(), policy.rank_rel_tol);
}

Mat null_space(const Mat& a, const NumericPolicy& policy) {
  if (a.cols() == 0) return Mat(0, 0);
  if (a.rows() == 0) return Mat::Identity(a.cols(), a.cols());
  Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeFullV);
  const int r = rank_from_singvals(svd.singularValues(), a.rows(), a.cols(), policy.rank_rel_tol);
  return svd.matrixV().rightCols(a.cols() - r);
}

LeastSquares solve_least_squares(const Mat& a, const Mat& b, const NumericPolicy& policy) {
  LeastSquares out;
  Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const int r = rank_from_singvals(sv, a.rows(), a.cols(), policy.rank_rel_tol);
  out.rank = r;
  out.cond = (r > 0) ? sv(0) / sv(r - 1) : 0.0;

  const Mat uhb = svd.matrixU().adjoint() * b;
  Mat y = Mat::Zero(a.cols(), b.cols());
  for (int i = 0; i < r; ++i) y.row(i) = uhb.row(i) / sv(i);
  out.solution = svd.matrixV() * y;
  out.null_basis = svd.matrixV().rightCols(a.cols() - r);

  out.residual = (a * out.solution - b).norm();
  const double bnorm = b.norm();
  out.rel_residual = (bnorm > 0.0) ? out.residual / bnorm : 0.0;
  return out;
}

bool is_full_rank(const Mat& a, const NumericPolicy& policy) {
  const int want = static_cast<int>(std::min(a.rows(), a.cols()));
  return numerical_rank(a, policy) == want;
}

double inverse_condition(const Mat& a) {
  Eigen::BDCSVD<Mat> svd(a);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0.0;
  return sv(sv.size() - 1) / sv(0);
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double pattern_threshold(const Mat& m) {
  if (m.size() == 0) return 0.0;
  return 1e-12 * m.cwiseAbs().maxCoeff();
}

}  // namespace wax
