#pragma once

// Model operators on the truncated Fock (x) forms space: the Heisenberg
// models of the Calderon projectors, the boundary projectors, their
// comparison operator T = R P + (I - R)(I - P), its explicit inverse and a
// certification report.
//
// A block operator maps (u, v) -> (a, b) with u, a in the even tangential
// sector and v, b in the odd one, for both chiralities.  Every block is
// stored as an operator on the whole graded space that vanishes off its
// source sector and takes values in its target sector; the block's
// Heisenberg order (nullopt for a zero block) drives the principal-symbol
// algebra used by `principal_sum` / `principal_product`.
//
// Model operators are evaluated at eta_0 = 1.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "spinc/spinor_model.hpp"
#include "spinc/rng.hpp"
#include "spinc/symbol_calculus.hpp"

namespace spinc {

struct ModelConfig {
  int n = 2;  // complex dimension; the oscillator has n - 1 variables
  double alpha = 1.0;
  std::optional<double> beta;  // defaults to n - 1
  int cutoff = 12;
  int guard = 2;
  double theta = 0.0;
  // Deformation direction for the Szego projector: a form-degree-0 state
  // other than the vacuum.  Defaults to the first excited oscillator state.
  std::optional<GradedBasisIndex> target;
  double tol = 1e-9;

  double beta_value() const { return beta.value_or(static_cast<double>(n - 1)); }
  FockSpaceConfig fock() const { return {n - 1, cutoff, guard}; }
  GradedBasisIndex target_value() const;
  // Throws InvalidArgument / PairingFloorViolation.
  void validate() const;
};

using HeisenbergOrders = std::array<std::array<std::optional<int>, 2>, 2>;

class BlockOperator {
 public:
  // All-zero block operator.
  explicit BlockOperator(const FockSpaceConfig& config);

  const FockSpaceConfig& config() const { return config_; }
  const TruncatedOperator& block(int i, int j) const { return blocks_[2 * i + j]; }
  std::optional<int> order(int i, int j) const { return orders_[i][j]; }
  const HeisenbergOrders& orders() const { return orders_; }
  // Restricts m to the (i, j) sector pair and stores it with the given order.
  void set_block(int i, int j, const TruncatedOperator& m, std::optional<int> order);

  // Assembled operator on the graded space.
  TruncatedOperator full() const;
  Vec apply(const Vec& x) const { return full().apply(x); }

 private:
  FockSpaceConfig config_;
  std::vector<TruncatedOperator> blocks_;
  HeisenbergOrders orders_;
};

// Blockwise: equal orders add, otherwise the higher order term survives.
BlockOperator principal_sum(const BlockOperator& a, const BlockOperator& b);
// Block matrix product; orders add and each entry is reduced with principal_sum rules.
BlockOperator principal_product(const BlockOperator& a, const BlockOperator& b);
BlockOperator block_identity(const FockSpaceConfig& config);
// Largest entry of the difference over all blocks (orders ignored).
double block_distance(const BlockOperator& a, const BlockOperator& b);

BlockOperator build_calderon_model(Chirality c, bool complement, const ModelConfig& cfg);
BlockOperator build_boundary_model(Chirality c, const ModelConfig& cfg);
BlockOperator build_comparison_model(Chirality c, const ModelConfig& cfg);
// R P + (I - R)(I - P) evaluated in the principal-symbol algebra.
BlockOperator assemble_comparison(Chirality c, const ModelConfig& cfg);

// Positions of graded basis states on which the model identities are exact:
// total (oscillator + form) degree <= cutoff - guard.
std::vector<int> model_guard_indices(const ModelConfig& cfg);

// Explicit inverse of the comparison model on the guard subspace.
class ModelInverse {
 public:
  ModelInverse(Chirality c, const ModelConfig& cfg);

  Chirality chirality() const { return chirality_; }
  const std::vector<int>& guard() const { return guard_; }
  // Inverse as an operator on the graded space, supported on the guard.
  const SpMat& matrix() const { return matrix_; }
  // rhs = a + b with a in the even and b in the odd sector; throws
  // InvalidArgument if rhs has weight outside the guard.
  Vec solve(const Vec& rhs) const;

 private:
  Chirality chirality_;
  std::vector<int> guard_;
  std::vector<char> in_guard_;
  SpMat matrix_;
};

struct RankCertificate {
  std::array<int, 3> ranks{};  // c1 (even <- even), c2 (even <- odd), c3 (odd <- even)
  double block22_max = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

// Rank structure of inverse(theta) - inverse(0).
RankCertificate deformation_rank_certificate(Chirality c, const ModelConfig& cfg);

struct CertificationReport {
  Chirality chirality = Chirality::even;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double sigma_floor = 0.0;
  double left_residual = 0.0;   // max |T^-1 T - I| on the guard
  double right_residual = 0.0;  // max |T T^-1 - I| on the guard
  double rhs_residual = 0.0;    // worst relative residual over random rhs
  int rhs_samples = 0;
  RankCertificate ranks;
  HeisenbergOrders parametrix_orders{};
  int index = 0;
  bool pass = false;
};

CertificationReport certify_invertibility(Chirality c, const ModelConfig& cfg, std::uint64_t seed = 0,
                                          int rhs_samples = 100);

// Random vector supported on the guard subspace.
Vec random_guarded_rhs(const ModelConfig& cfg, Rng& rng);

}  // namespace spinc
