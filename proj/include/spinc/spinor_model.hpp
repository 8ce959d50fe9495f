#pragma once

// Antiholomorphic tangential forms on num_vars variables, the Clifford
// operators e_j / eps_j, the model Dirac operator D+ on Fock (x) forms and
// the vacuum Szego projector.
//
// Forms are labelled by subsets of {1..num_vars}; the basis is ordered by
// degree, then lexicographically.  eps_j = wedge with the j-th form, e_j its
// adjoint (contraction).  Sign convention: eps_j on w^I carries
// (-1)^#{i in I : i < j}.

#include <cstdint>
#include <vector>

#include "spinc/fock_core.hpp"

namespace spinc {

inline constexpr double kPairingFloor = 1e-3;

enum class Parity { even, odd };

struct FormMultiIndex {
  std::vector<int> subset;  // strictly increasing, entries in 1..num_vars

  int degree() const { return static_cast<int>(subset.size()); }
  bool operator==(const FormMultiIndex&) const = default;
};

class FormBasis {
 public:
  explicit FormBasis(int num_vars);

  int num_vars() const { return num_vars_; }
  std::size_t size() const { return masks_.size(); }
  std::uint32_t mask(std::size_t i) const { return masks_[i]; }
  int degree(std::size_t i) const;
  FormMultiIndex subset(std::size_t i) const;
  std::size_t index_of(const FormMultiIndex& f) const;  // throws on invalid subsets
  std::size_t index_of_mask(std::uint32_t mask) const { return position_[mask]; }

 private:
  int num_vars_;
  std::vector<std::uint32_t> masks_;
  std::vector<std::size_t> position_;
};

// Form-level matrices (dimension 2^num_vars, FormBasis order).
SpMat form_wedge_matrix(int num_vars, int j);
SpMat form_contract_matrix(int num_vars, int j);

struct GradedBasisIndex {
  OscillatorMultiIndex osc;
  FormMultiIndex form;
};

// Tensor-product basis, oscillator-major and form-minor:
// position = osc_position * 2^num_vars + form_position.
class GradedBasis {
 public:
  explicit GradedBasis(const FockSpaceConfig& config);

  const FockBasis& oscillators() const { return osc_; }
  const FormBasis& forms() const { return forms_; }
  std::size_t size() const { return osc_.size() * forms_.size(); }
  std::size_t index_of(const GradedBasisIndex& idx) const;  // throws if outside truncation
  GradedBasisIndex label(std::size_t i) const;
  int oscillator_degree(std::size_t i) const { return osc_.state(i / forms_.size()).degree(); }
  int form_degree(std::size_t i) const { return forms_.degree(i % forms_.size()); }
  int total_degree(std::size_t i) const { return oscillator_degree(i) + form_degree(i); }
  Parity parity(std::size_t i) const { return form_degree(i) % 2 == 0 ? Parity::even : Parity::odd; }

 private:
  FockBasis osc_;
  FormBasis forms_;
};

// Operators on the graded space.
TruncatedOperator wedge(const FockSpaceConfig& config, int j);
TruncatedOperator contract(const FockSpaceConfig& config, int j);
TruncatedOperator lift(const TruncatedOperator& oscillator_op);  // A (x) Id_forms

TruncatedOperator dirac_plus(const FockSpaceConfig& config);
// D+ restricted to the even (resp. odd) sector, as a square operator on the
// whole graded space that vanishes on the other sector.
TruncatedOperator dirac_plus_even(const FockSpaceConfig& config);
TruncatedOperator dirac_plus_odd(const FockSpaceConfig& config);

TruncatedOperator degree_projection(const FockSpaceConfig& config, int q);
TruncatedOperator parity_projection(const FockSpaceConfig& config, Parity parity);

// Positions of graded basis states in the given sector, in basis order.
std::vector<int> sector_indices(const GradedBasis& basis, Parity parity);
// Positions with oscillator degree <= max_degree.
std::vector<int> graded_states_up_to(const GradedBasis& basis, int max_oscillator_degree);

// z0 = vacuum (x) w^{}; vacuum_szego is the orthogonal projector onto it.
Vec vacuum_vector(const FockSpaceConfig& config);
TruncatedOperator vacuum_szego(const FockSpaceConfig& config);

// z0' = cos(theta) z0 + sin(theta) t for a basis vector t of even form
// degree other than z0.  Throws PairingFloorViolation if |cos theta| is
// below kPairingFloor and InvalidArgument for unusable targets.
Vec deformed_vacuum(const FockSpaceConfig& config, double theta, const GradedBasisIndex& target);
TruncatedOperator deformed_szego(const FockSpaceConfig& config, double theta,
                                 const GradedBasisIndex& target);

}  // namespace spinc
