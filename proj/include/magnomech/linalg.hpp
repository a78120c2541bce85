#pragma once

#include <Eigen/Dense>

namespace magnomech {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

// Singular values below this fraction of the largest one are treated as zero.
inline constexpr double kRankCutoff = 1e-10;

// Orthonormal basis (as columns) of ker(m). A matrix with zero rows has the
// whole space as kernel.
Mat null_space(const Mat& m, double rel_cutoff = kRankCutoff);

// Orthonormal basis (as columns) of the column space of m.
Mat column_basis(const Mat& m, double rel_cutoff = kRankCutoff);

Index numerical_rank(const Mat& m, double rel_cutoff = kRankCutoff);

// Smallest singular value; 0 for an empty matrix.
double smallest_singular_value(const Mat& m);

// Max-abs entry; 0 for an empty matrix.
double max_abs(const Mat& m);

bool all_finite(const Mat& m);

inline double distance(const Vec& a, const Vec& b) { return (a - b).norm(); }

}  // namespace magnomech
