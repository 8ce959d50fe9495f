#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace spinc {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using SpMat = Eigen::SparseMatrix<cplx>;

inline constexpr double kRankThreshold = 1e-10;

struct RankInfo {
  int rank = 0;
  double largest = 0.0;
  // Smallest singular value counted as nonzero, and largest counted as zero
  // (both relative to `largest`); 1 and 0 when there are none.
  double smallest_kept = 1.0;
  double largest_dropped = 0.0;
  std::vector<double> singular_values;
};

// Numerical rank: singular values below rel_threshold * sigma_max count as zero.
RankInfo numerical_rank(const Mat& m, double rel_threshold = kRankThreshold);

// Moore-Penrose pseudo-inverse with the same relative cutoff.
Mat pseudo_inverse(const Mat& m, double rel_threshold = kRankThreshold);

// Orthonormal basis (columns) of the column space of m.
Mat orthonormal_range(const Mat& m, double rel_threshold = kRankThreshold);

// Pseudo-inverse of a matrix that is block diagonal with respect to integer
// labels on rows and columns. Each label block is inverted densely.
// Throws InvalidArgument if m couples different labels.
SpMat blockwise_pseudo_inverse(const SpMat& m, const std::vector<int>& row_labels,
                               const std::vector<int>& col_labels,
                               double rel_threshold = kRankThreshold);

double max_abs(const Mat& m);
double max_abs(const SpMat& m);

SpMat kron(const SpMat& a, const SpMat& b);
SpMat sparse_identity(Eigen::Index n);

// Rows/columns selected by index lists.
SpMat compress(const SpMat& m, const std::vector<int>& rows, const std::vector<int>& cols);

double operator_norm(const Mat& m);

}  // namespace spinc
