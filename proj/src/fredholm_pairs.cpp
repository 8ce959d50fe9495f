#include "spinc/fredholm_pairs.hpp"

#include <cmath>
#include <string>

#include "spinc/errors.hpp"

namespace spinc {

Projector::Projector(Mat m, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw InvalidArgument("projector must be square");
  const double scale = std::max(1.0, max_abs(m_));
  const double defect = max_abs(Mat(m_ * m_ - m_));
  if (defect > tol * scale)
    throw InvalidArgument("matrix is not idempotent (|P^2 - P| = " + std::to_string(defect) + ")");
  self_adjoint_ = max_abs(Mat(m_ - m_.adjoint())) <= tol * scale;
  // Trace of an idempotent is its rank.
  rank_ = static_cast<int>(std::lround(m_.trace().real()));
}

Projector Projector::complement() const {
  return Projector(Mat(Mat::Identity(dim(), dim()) - m_), kIdempotencyTolerance * 10);
}

Projector Projector::adjoint() const { return Projector(Mat(m_.adjoint()), kIdempotencyTolerance * 10); }

namespace {

void require_same_dim(const Projector& a, const Projector& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("projectors act on spaces of different dimension");
}

struct Counted {
  int rank = 0;
  double smallest_kept = 1.0;
  double largest_dropped = 0.0;
};

// Rank of `m` measured against `scale`, with the ambiguity-gap diagnostic.
Counted counted_rank(const Mat& m, double scale, const char* what) {
  Counted c;
  if (m.size() == 0) return c;
  Eigen::JacobiSVD<Mat> svd(m);
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    const double s = svd.singularValues()(i) / scale;
    if (s >= kAmbiguityLow && s <= kAmbiguityHigh)
      throw NumericalDiagnostic(std::string(what) + ": singular value " + std::to_string(s) +
                                " lies in the ambiguity gap");
    if (s > kRankThreshold) {
      ++c.rank;
      c.smallest_kept = std::min(c.smallest_kept, s);
    } else {
      c.largest_dropped = std::max(c.largest_dropped, s);
    }
  }
  return c;
}

// Orthonormal basis of the range, sized by the trace rank so that rounding
// noise in a numerically zero projector never contributes directions.
Mat range_basis(const Mat& m, int rank) {
  if (rank == 0) return Mat(m.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(rank);
}

double projector_scale(const Projector& p) { return std::max(1.0, operator_norm(p.matrix())); }

KernelIndex kernel_index_of(const Mat& map_on_range, int source_rank, const Mat& adjoint_on_range, int target_rank,
                            double scale_fwd, double scale_adj) {
  const Counted fwd = counted_rank(map_on_range, scale_fwd, "relative index kernel");
  const Counted adj = counted_rank(adjoint_on_range, scale_adj, "relative index cokernel");
  KernelIndex k;
  k.kernel = source_rank - fwd.rank;
  k.cokernel = target_rank - adj.rank;
  k.index = k.kernel - k.cokernel;
  k.degenerate = k.kernel > 0 && k.cokernel > 0;
  k.smallest_kept = std::min(fwd.smallest_kept, adj.smallest_kept);
  k.largest_dropped = std::max(fwd.largest_dropped, adj.largest_dropped);
  return k;
}

}  // namespace

ProjectorPair comparison_operator(const Projector& p, const Projector& r, const std::optional<Mat>& smoothing) {
  require_same_dim(p, r);
  const Eigen::Index n = p.dim();
  const Mat id = Mat::Identity(n, n);
  Mat t = r.matrix() * p.matrix() + (id - r.matrix()) * (id - p.matrix());
  // Singular values are cut against max(1, |T|): for P close to I and R = 0
  // the matrix T is pure rounding noise and must count as zero.
  Eigen::JacobiSVD<Mat> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = kRankThreshold * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) inv(i) = 1.0 / sv(i);
  Mat u = svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
  if (smoothing) {
    if (smoothing->rows() != n || smoothing->cols() != n) throw InvalidArgument("smoothing term has the wrong shape");
    u += *smoothing;
  }
  Mat k1 = id - t * u;
  Mat k2 = id - u * t;
  return {p, r, std::move(t), std::move(u), std::move(k1), std::move(k2)};
}

namespace {

int gated_round(double raw, const char* what) {
  const double rounded = std::round(raw);
  if (std::abs(raw - rounded) > kIntegralityGate)
    throw NumericalDiagnostic(std::string(what) + ": trace " + std::to_string(raw) + " is not an integer");
  return static_cast<int>(rounded);
}

}  // namespace

int comparison_index(const ProjectorPair& pair) {
  return gated_round((pair.k2.trace() - pair.k1.trace()).real(), "comparison index");
}

KernelIndex relative_index_kernel(const Projector& p, const Projector& r) {
  require_same_dim(p, r);
  const Mat qp = range_basis(p.matrix(), p.rank());
  const Mat qr_star = range_basis(r.matrix().adjoint(), r.rank());
  return kernel_index_of(r.matrix() * qp, p.rank(), p.matrix().adjoint() * qr_star, r.rank(), projector_scale(r),
                         projector_scale(p));
}

TraceIndex relative_index_trace(const ProjectorPair& pair) {
  const Mat& p = pair.p.matrix();
  const Mat& r = pair.r.matrix();
  TraceIndex t;
  t.raw = ((p * pair.k2 * p).trace() - (r * pair.k1 * r).trace()).real();
  t.index = gated_round(t.raw, "relative index trace");
  return t;
}

KernelIndex chain_index(const Projector& p, const Projector& q, const Projector& r) {
  require_same_dim(p, q);
  require_same_dim(q, r);
  const Mat chain = r.matrix() * q.matrix() * p.matrix();
  const Mat qp = range_basis(p.matrix(), p.rank());
  const Mat qr_star = range_basis(r.matrix().adjoint(), r.rank());
  const double scale = std::max(1.0, operator_norm(chain));
  return kernel_index_of(chain * qp, p.rank(), chain.adjoint() * qr_star, r.rank(), scale, scale);
}

LogarithmicReport logarithmic_property(const Projector& p, const Projector& q, const Projector& r) {
  LogarithmicReport rep;
  rep.chain = chain_index(p, q, r).index;
  rep.rind_pq = relative_index_kernel(p, q).index;
  rep.rind_qr = relative_index_kernel(q, r).index;
  rep.holds = rep.chain == rep.rind_pq + rep.rind_qr;
  return rep;
}

NeumannResult neumann_continuation(const std::function<Mat(double)>& family, double tau0, double tau, double tol) {
  const Mat a0 = family(tau0);
  const Mat at = family(tau);
  if (a0.rows() != a0.cols() || at.rows() != a0.rows() || at.cols() != a0.cols())
    throw InvalidArgument("neumann continuation: family must be square of fixed size");
  Eigen::PartialPivLU<Mat> lu(a0);
  const Mat a0_inv = lu.inverse();
  if (!a0_inv.allFinite()) throw InvalidArgument("neumann continuation: A(tau0) is singular");
  const Mat e = a0_inv * (a0 - at);
  NeumannResult res;
  res.smallness = operator_norm(e);
  if (res.smallness >= 0.5) {
    const double step = std::abs(tau - tau0) * 0.45 / res.smallness;
    throw SmallnessViolation("neumann continuation: |A(tau0)^-1 (A(tau0) - A(tau))| = " +
                                 std::to_string(res.smallness) + " >= 1/2; try a step of about " +
                                 std::to_string(step),
                             res.smallness, step);
  }
  const double inv_norm = operator_norm(a0_inv);
  Mat term = a0_inv;
  res.inverse = a0_inv;
  double power = res.smallness;  // |E|^{K+1}
  res.tail_bound = power / (1.0 - res.smallness) * inv_norm;
  while (res.tail_bound >= tol) {
    term = e * term;
    res.inverse += term;
    ++res.terms;
    power *= res.smallness;
    res.tail_bound = power / (1.0 - res.smallness) * inv_norm;
    if (res.terms > 10000) throw NumericalDiagnostic("neumann continuation did not reach the tolerance");
  }
  return res;
}

ToeplitzReport toeplitz_winding(int window, int k) {
  if (window < 1) throw InvalidArgument("toeplitz window must be positive");
  if (2 * std::abs(k) > window) throw InvalidArgument("toeplitz: |k| must be at most window/2");
  const int dim = 2 * window + 1;
  Mat s = Mat::Zero(dim, dim), r = Mat::Zero(dim, dim);
  for (int f = -window; f <= window; ++f) {
    const int i = f + window;
    if (f >= 0) s(i, i) = 1.0;
    if (f >= k) r(i, i) = 1.0;
  }
  const Projector ps(s), pr(r);
  ToeplitzReport rep;
  rep.index = relative_index_kernel(ps, pr).index;
  rep.rank_s = ps.rank();
  rep.rank_r = pr.rank();
  return rep;
}

AgranovichDyninReport agranovich_dynin_shadow(const Projector& s1, const Projector& s2, int zero_block,
                                              int identity_block) {
  require_same_dim(s1, s2);
  if (zero_block < 0 || identity_block < 0) throw InvalidArgument("block sizes must be non-negative");
  const Eigen::Index d = s1.dim(), total = d + zero_block + identity_block;
  auto embed = [&](const Projector& s) {
    Mat m = Mat::Zero(total, total);
    m.topLeftCorner(d, d) = s.matrix();
    m.bottomRightCorner(identity_block, identity_block).setIdentity();
    return Projector(m);
  };
  // Fixed reference projector, independent of the inputs' randomness.
  Rng fixed(0x5a17e9a1ULL);
  const Projector p = random_orthogonal_projector(fixed, static_cast<int>(total), static_cast<int>(total / 2));
  AgranovichDyninReport rep;
  rep.lhs = relative_index_kernel(p, embed(s2)).index - relative_index_kernel(p, embed(s1)).index;
  rep.rhs = s1.rank() - s2.rank();
  rep.direct = relative_index_kernel(s1, s2).index;
  rep.holds = rep.lhs == rep.rhs && rep.rhs == rep.direct;
  return rep;
}

WeightedScale::WeightedScale(std::vector<double> weights) : w_(std::move(weights)) {
  for (double w : w_)
    if (!(w >= 1.0) || !std::isfinite(w)) throw InvalidArgument("weights of a scale must be finite and >= 1");
}

double WeightedScale::norm(const Vec& x, double s) const {
  if (x.size() != dim()) throw InvalidArgument("vector dimension does not match the scale");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) sum += std::pow(w_[i], 2.0 * s) * std::norm(x(i));
  return std::sqrt(sum);
}

cplx WeightedScale::weighted_trace(const Mat& x) const {
  if (x.rows() != dim() || x.cols() != dim()) throw InvalidArgument("matrix dimension does not match the scale");
  Eigen::VectorXd w(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) w(i) = w_[i];
  const Mat similar = w.asDiagonal() * x * w.cwiseInverse().asDiagonal();
  return similar.trace();
}

Projector random_orthogonal_projector(Rng& rng, int dim, int rank) {
  if (dim < 1 || rank < 0 || rank > dim) throw InvalidArgument("invalid projector dimension or rank");
  if (rank == 0) return Projector(Mat::Zero(dim, dim));
  Eigen::HouseholderQR<Mat> qr(rng.complex_gaussian(dim, rank));
  const Mat q = qr.householderQ() * Mat::Identity(dim, rank);
  return Projector(q * q.adjoint(), 1e-11);
}

Projector random_oblique_projector(Rng& rng, int dim, int rank) {
  if (dim < 1 || rank < 0 || rank > dim) throw InvalidArgument("invalid projector dimension or rank");
  const Mat g = rng.complex_gaussian(dim, dim);
  const Mat s = Mat::Identity(dim, dim) + (0.3 / std::sqrt(2.0 * dim)) * g;
  Mat diag = Mat::Zero(dim, dim);
  for (int i = 0; i < rank; ++i) diag(i, i) = 1.0;
  Eigen::PartialPivLU<Mat> lu(s);
  Mat p = s * diag * lu.inverse();
  return Projector(std::move(p), 1e-10);
}

Mat random_finite_rank(Rng& rng, int dim, int rank, double scale) {
  if (rank <= 0) return Mat::Zero(dim, dim);
  return scale / rank * rng.complex_gaussian(dim, rank) * rng.complex_gaussian(rank, dim) / std::sqrt(2.0 * dim);
}

}  // namespace spinc
