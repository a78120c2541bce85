#include "magnomech/linalg.hpp"

#include <algorithm>

namespace magnomech {

namespace {

Index rank_from_singular_values(const Vec& sv, double rel_cutoff) {
  if (sv.size() == 0) return 0;
  const double largest = sv(0);
  if (!(largest > 0.0)) return 0;
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_cutoff * largest) ++rank;
  }
  return rank;
}

}  // namespace

Mat null_space(const Mat& m, double rel_cutoff) {
  const Index cols = m.cols();
  if (m.rows() == 0) return Mat::Identity(cols, cols);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const Index rank = rank_from_singular_values(svd.singularValues(), rel_cutoff);
  return svd.matrixV().rightCols(cols - rank);
}

Mat column_basis(const Mat& m, double rel_cutoff) {
  if (m.cols() == 0 || m.rows() == 0) return Mat(m.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU);
  const Index rank = rank_from_singular_values(svd.singularValues(), rel_cutoff);
  return svd.matrixU().leftCols(rank);
}

Index numerical_rank(const Mat& m, double rel_cutoff) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(m);
  return rank_from_singular_values(svd.singularValues(), rel_cutoff);
}

double smallest_singular_value(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  const Vec& sv = svd.singularValues();
  // A wide or tall matrix has implicit zero singular values beyond min(r, c).
  if (m.rows() != m.cols()) return 0.0;
  return sv(sv.size() - 1);
}

double max_abs(const Mat& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

bool all_finite(const Mat& m) { return m.allFinite(); }

}  // namespace magnomech
