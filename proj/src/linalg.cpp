#include "spinc/linalg.hpp"

#include <algorithm>
#include <map>

#include "spinc/errors.hpp"

namespace spinc {

// JacobiSVD throughout: BDCSVD in Eigen 3.4 returns NaN on some complex
// matrices with exactly repeated singular values, which projectors have.

RankInfo numerical_rank(const Mat& m, double rel_threshold) {
  RankInfo info;
  if (m.size() == 0) return info;
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& s = svd.singularValues();
  info.singular_values.assign(s.data(), s.data() + s.size());
  info.largest = s.size() > 0 ? s(0) : 0.0;
  if (info.largest <= 0.0) return info;
  const double cut = rel_threshold * info.largest;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cut) {
      ++info.rank;
      info.smallest_kept = s(i) / info.largest;
    } else {
      info.largest_dropped = std::max(info.largest_dropped, s(i) / info.largest);
    }
  }
  return info;
}

Mat pseudo_inverse(const Mat& m, double rel_threshold) {
  if (m.size() == 0) return Mat::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double largest = s.size() > 0 ? s(0) : 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  if (largest > 0.0) {
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > rel_threshold * largest) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

Mat orthonormal_range(const Mat& m, double rel_threshold) {
  if (m.size() == 0) return Mat(m.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double largest = s.size() > 0 ? s(0) : 0.0;
  Eigen::Index r = 0;
  if (largest > 0.0)
    while (r < s.size() && s(r) > rel_threshold * largest) ++r;
  return svd.matrixU().leftCols(r);
}

SpMat blockwise_pseudo_inverse(const SpMat& m, const std::vector<int>& row_labels,
                               const std::vector<int>& col_labels, double rel_threshold) {
  if (static_cast<Eigen::Index>(row_labels.size()) != m.rows() ||
      static_cast<Eigen::Index>(col_labels.size()) != m.cols())
    throw InvalidArgument("blockwise_pseudo_inverse: label count does not match shape");

  std::map<int, std::vector<int>> rows_of, cols_of;
  for (int i = 0; i < m.rows(); ++i) rows_of[row_labels[i]].push_back(i);
  for (int j = 0; j < m.cols(); ++j) cols_of[col_labels[j]].push_back(j);

  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      if (it.value() != cplx(0.0) && row_labels[it.row()] != col_labels[it.col()])
        throw InvalidArgument("blockwise_pseudo_inverse: matrix couples distinct blocks");

  std::vector<Eigen::Triplet<cplx>> trips;
  for (const auto& [label, cols] : cols_of) {
    auto rit = rows_of.find(label);
    if (rit == rows_of.end()) continue;
    const auto& rows = rit->second;
    Mat block(rows.size(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
      for (std::size_t i = 0; i < rows.size(); ++i) block(i, j) = m.coeff(rows[i], cols[j]);
    Mat inv = pseudo_inverse(block, rel_threshold);
    for (std::size_t i = 0; i < cols.size(); ++i)
      for (std::size_t j = 0; j < rows.size(); ++j)
        if (inv(i, j) != cplx(0.0)) trips.emplace_back(cols[i], rows[j], inv(i, j));
  }
  SpMat out(m.cols(), m.rows());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double max_abs(const SpMat& m) {
  double best = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) best = std::max(best, std::abs(it.value()));
  return best;
}

SpMat kron(const SpMat& a, const SpMat& b) {
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (int ka = 0; ka < a.outerSize(); ++ka)
    for (SpMat::InnerIterator ia(a, ka); ia; ++ia)
      for (int kb = 0; kb < b.outerSize(); ++kb)
        for (SpMat::InnerIterator ib(b, kb); ib; ++ib)
          trips.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                             ia.value() * ib.value());
  SpMat out(a.rows() * b.rows(), a.cols() * b.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

SpMat sparse_identity(Eigen::Index n) {
  SpMat id(n, n);
  id.setIdentity();
  return id;
}

SpMat compress(const SpMat& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  std::vector<int> row_pos(m.rows(), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) row_pos[rows[i]] = static_cast<int>(i);
  std::vector<Eigen::Triplet<cplx>> trips;
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (SpMat::InnerIterator it(m, cols[j]); it; ++it)
      if (row_pos[it.row()] >= 0) trips.emplace_back(row_pos[it.row()], j, it.value());
  SpMat out(rows.size(), cols.size());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

double operator_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

}  // namespace spinc
