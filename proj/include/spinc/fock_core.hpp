#pragma once

// Truncated harmonic-oscillator algebra on num_vars real variables.
//
// Basis: products of normalized Hermite functions h_k(w) = h_{k_1}(w_1)...,
// restricted to total degree |k| <= cutoff and enumerated in graded
// lexicographic order (by |k|, then levels descending lexicographically).
// In this basis
//   C_j  = w_j - d/dw_j   : |k> -> sqrt(2(k_j+1)) |k + e_j>
//   C_j* = w_j + d/dw_j   : |k> -> sqrt(2 k_j)    |k - e_j>
//   H0   = sum w_j^2 - d^2/dw_j^2 = diag(2|k| + num_vars)
// Matrix entries that would leave the truncation are dropped.

#include <compare>
#include <cstddef>
#include <optional>
#include <unordered_map>
#include <vector>

#include "spinc/linalg.hpp"

namespace spinc {

inline constexpr double kIdentityTolerance = 1e-12;

struct FockSpaceConfig {
  int num_vars = 1;
  int cutoff = 16;
  int guard = 2;

  // Throws InvalidArgument unless num_vars >= 1, guard >= 0, cutoff >= guard + 2.
  void validate() const;
  // Largest total oscillator degree on which identities are asserted exactly.
  int guarded_degree() const { return cutoff - guard; }
  bool operator==(const FockSpaceConfig&) const = default;
};

struct OscillatorMultiIndex {
  std::vector<int> levels;

  int degree() const;
  auto operator<=>(const OscillatorMultiIndex&) const = default;
};

class FockBasis {
 public:
  explicit FockBasis(const FockSpaceConfig& config);

  const FockSpaceConfig& config() const { return config_; }
  std::size_t size() const { return states_.size(); }
  const OscillatorMultiIndex& state(std::size_t i) const { return states_[i]; }
  const std::vector<OscillatorMultiIndex>& states() const { return states_; }
  std::optional<std::size_t> index_of(const OscillatorMultiIndex& k) const;
  std::size_t vacuum_index() const { return 0; }

  // Number of multi-indices of exactly the given total degree.
  static std::size_t count_of_degree(int num_vars, int degree);

 private:
  FockSpaceConfig config_;
  std::vector<OscillatorMultiIndex> states_;
  std::unordered_map<std::size_t, std::size_t> lookup_;
  std::size_t key(const OscillatorMultiIndex& k) const;
};

// Which truncated space an operator acts on: the bare oscillator space, or
// the oscillator space tensored with the tangential form sector
// (oscillator-major, form-minor).
enum class SpaceKind { oscillator, graded };

class TruncatedOperator {
 public:
  TruncatedOperator(SpaceKind kind, FockSpaceConfig config, SpMat matrix,
                    std::optional<int> degree_shift);

  SpaceKind kind() const { return kind_; }
  const FockSpaceConfig& config() const { return config_; }
  const SpMat& matrix() const { return matrix_; }
  Mat dense() const { return Mat(matrix_); }
  // Change of total (oscillator + form) degree; nullopt if inhomogeneous.
  std::optional<int> degree_shift() const { return degree_shift_; }
  Eigen::Index dim() const { return matrix_.rows(); }

  Vec apply(const Vec& x) const { return matrix_ * x; }

  TruncatedOperator operator+(const TruncatedOperator& other) const;
  TruncatedOperator operator-(const TruncatedOperator& other) const;
  TruncatedOperator operator*(cplx scale) const;

 private:
  SpaceKind kind_;
  FockSpaceConfig config_;
  SpMat matrix_;
  std::optional<int> degree_shift_;
};

TruncatedOperator creation(const FockSpaceConfig& config, int j);
TruncatedOperator annihilation(const FockSpaceConfig& config, int j);
TruncatedOperator harmonic_oscillator(const FockSpaceConfig& config);
TruncatedOperator identity(const FockSpaceConfig& config, SpaceKind kind = SpaceKind::oscillator);

TruncatedOperator compose(const TruncatedOperator& a, const TruncatedOperator& b);
TruncatedOperator adjoint(const TruncatedOperator& a);
TruncatedOperator commutator(const TruncatedOperator& a, const TruncatedOperator& b);

// Largest |entry| of (a - b) over the columns selected by `columns`.
double max_column_deviation(const TruncatedOperator& a, const TruncatedOperator& b,
                            const std::vector<int>& columns);

// Basis positions of oscillator states with |k| <= max_degree.
std::vector<int> oscillator_states_up_to(const FockBasis& basis, int max_degree);

}  // namespace spinc
