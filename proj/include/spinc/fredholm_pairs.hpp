#pragma once

// Relative index of projector pairs at finite dimension: kernel counting,
// the trace formula with an arbitrary parametrix, chains R Q P, Neumann
// continuation of inverses, and the Toeplitz / boundary-condition
// reductions.

#include <functional>
#include <optional>
#include <vector>

#include "spinc/linalg.hpp"
#include "spinc/rng.hpp"

namespace spinc {

inline constexpr double kIdempotencyTolerance = 1e-12;
inline constexpr double kAmbiguityLow = 1e-12;
inline constexpr double kAmbiguityHigh = 1e-8;
inline constexpr double kIntegralityGate = 1e-6;

class Projector {
 public:
  // Throws InvalidArgument unless m is square and |m^2 - m| <= tol * max(1, |m|).
  explicit Projector(Mat m, double tol = kIdempotencyTolerance);

  const Mat& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  bool self_adjoint() const { return self_adjoint_; }
  int rank() const { return rank_; }
  Projector complement() const;
  Projector adjoint() const;

 private:
  Mat m_;
  bool self_adjoint_ = false;
  int rank_ = 0;
};

// T = R P + (I - R)(I - P), U a parametrix, T U = I - K1, U T = I - K2.
struct ProjectorPair {
  Projector p;
  Projector r;
  Mat t;
  Mat u;
  Mat k1;
  Mat k2;
};

// U = pinv(T) + smoothing (when given).
ProjectorPair comparison_operator(const Projector& p, const Projector& r, const std::optional<Mat>& smoothing = {});
// Tr K2 - Tr K1, rounded; zero for every square T.
int comparison_index(const ProjectorPair& pair);

struct KernelIndex {
  int index = 0;
  int kernel = 0;    // dim ker(R P : range P -> range R)
  int cokernel = 0;  // dim ker(P* R* : range R* -> range P*)
  bool degenerate = false;  // both kernels nonzero
  double smallest_kept = 1.0;
  double largest_dropped = 0.0;
};

// Throws NumericalDiagnostic if a relative singular value falls in
// [kAmbiguityLow, kAmbiguityHigh].
KernelIndex relative_index_kernel(const Projector& p, const Projector& r);
inline KernelIndex relative_index_kernel(const ProjectorPair& pair) { return relative_index_kernel(pair.p, pair.r); }

struct TraceIndex {
  int index = 0;
  double raw = 0.0;  // Tr(P K2 P) - Tr(R K1 R)
};

// Throws NumericalDiagnostic if raw is farther than kIntegralityGate from an integer.
TraceIndex relative_index_trace(const ProjectorPair& pair);

// Index of R Q P : range P -> range R, by kernel counting.
KernelIndex chain_index(const Projector& p, const Projector& q, const Projector& r);

struct LogarithmicReport {
  int chain = 0;
  int rind_pq = 0;
  int rind_qr = 0;
  bool holds = false;
};

LogarithmicReport logarithmic_property(const Projector& p, const Projector& q, const Projector& r);

struct NeumannResult {
  Mat inverse;
  int terms = 0;  // highest power K of E in the partial sum
  double smallness = 0.0;
  double tail_bound = 0.0;
};

// Inverse of A(tau) from A(tau0) by the series sum_k E^k A(tau0)^-1 with
// E = A(tau0)^-1 (A(tau0) - A(tau)).  Throws SmallnessViolation when
// |E| >= 1/2, suggesting a step that would bring it near 0.45.
NeumannResult neumann_continuation(const std::function<Mat(double)>& family, double tau0, double tau,
                                   double tol = 1e-12);

struct ToeplitzReport {
  int index = 0;
  int rank_s = 0;
  int rank_r = 0;
};

// Frequencies -N..N.  S projects onto f >= 0, R onto f >= k, which is the
// conjugate of S by multiplication with e^{ik theta} with the window's upper
// edge treated as open (Hardy space behaviour).  Requires |k| <= N/2.
ToeplitzReport toeplitz_winding(int window, int k);

struct AgranovichDyninReport {
  int lhs = 0;     // Rind(P, R2) - Rind(P, R1)
  int rhs = 0;     // rank s1 - rank s2
  int direct = 0;  // Rind(s1, s2)
  bool holds = false;
};

// Embeds s_i as R_i = diag(s_i, 0_p, I_q) against a fixed reference P.
AgranovichDyninReport agranovich_dynin_shadow(const Projector& s1, const Projector& s2, int zero_block = 4,
                                              int identity_block = 4);

// Nested norms |x|_s = |w^s x| on C^dim with weights >= 1.
class WeightedScale {
 public:
  explicit WeightedScale(std::vector<double> weights);

  Eigen::Index dim() const { return static_cast<Eigen::Index>(w_.size()); }
  double norm(const Vec& x, double s) const;
  // Trace of X computed after the similarity x -> w x.
  cplx weighted_trace(const Mat& x) const;

 private:
  std::vector<double> w_;
};

// Generators.
Projector random_orthogonal_projector(Rng& rng, int dim, int rank);
// S diag(I_rank, 0) S^-1 with S = I + c G, |c G| well below 1.
Projector random_oblique_projector(Rng& rng, int dim, int rank);
// Random matrix of the given rank.
Mat random_finite_rank(Rng& rng, int dim, int rank, double scale = 1.0);

}  // namespace spinc
