#include "spinc/spinor_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "spinc/errors.hpp"

namespace spinc {

FormBasis::FormBasis(int num_vars) : num_vars_(num_vars) {
  if (num_vars < 1 || num_vars > 20) throw InvalidArgument("FormBasis: num_vars out of range");
  const std::uint32_t count = 1u << num_vars;
  masks_.resize(count);
  for (std::uint32_t m = 0; m < count; ++m) masks_[m] = m;
  // Lexicographic order on subsets of equal degree: compare the sorted
  // element lists.  With bit j-1 standing for j, a smaller lowest differing
  // element means a smaller subset.
  auto lex_less = [](std::uint32_t a, std::uint32_t b) {
    const std::uint32_t diff = a ^ b;
    if (diff == 0) return false;
    const std::uint32_t low = diff & (~diff + 1);
    return (a & low) != 0;
  };
  std::sort(masks_.begin(), masks_.end(), [&](std::uint32_t a, std::uint32_t b) {
    const int da = std::popcount(a), db = std::popcount(b);
    if (da != db) return da < db;
    return lex_less(a, b);
  });
  position_.resize(count);
  for (std::size_t i = 0; i < masks_.size(); ++i) position_[masks_[i]] = i;
}

int FormBasis::degree(std::size_t i) const { return std::popcount(masks_[i]); }

FormMultiIndex FormBasis::subset(std::size_t i) const {
  FormMultiIndex f;
  for (int j = 1; j <= num_vars_; ++j)
    if (masks_[i] & (1u << (j - 1))) f.subset.push_back(j);
  return f;
}

std::size_t FormBasis::index_of(const FormMultiIndex& f) const {
  std::uint32_t mask = 0;
  int prev = 0;
  for (int j : f.subset) {
    if (j <= prev || j > num_vars_) throw InvalidArgument("form multi-index must be strictly increasing in 1..num_vars");
    mask |= 1u << (j - 1);
    prev = j;
  }
  return position_[mask];
}

namespace {

void check_form_index(int num_vars, int j) {
  if (j < 1 || j > num_vars)
    throw InvalidArgument("form index " + std::to_string(j) + " outside 1.." + std::to_string(num_vars));
}

}  // namespace

SpMat form_wedge_matrix(int num_vars, int j) {
  check_form_index(num_vars, j);
  FormBasis forms(num_vars);
  const std::uint32_t bit = 1u << (j - 1);
  std::vector<Eigen::Triplet<cplx>> trips;
  for (std::size_t col = 0; col < forms.size(); ++col) {
    const std::uint32_t m = forms.mask(col);
    if (m & bit) continue;
    const int before = std::popcount(m & (bit - 1));
    const double sign = (before % 2 == 0) ? 1.0 : -1.0;
    trips.emplace_back(static_cast<int>(forms.index_of_mask(m | bit)), static_cast<int>(col), sign);
  }
  SpMat out(forms.size(), forms.size());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

SpMat form_contract_matrix(int num_vars, int j) { return SpMat(form_wedge_matrix(num_vars, j).adjoint()); }

GradedBasis::GradedBasis(const FockSpaceConfig& config) : osc_(config), forms_(config.num_vars) {}

std::size_t GradedBasis::index_of(const GradedBasisIndex& idx) const {
  auto o = osc_.index_of(idx.osc);
  if (!o) throw InvalidArgument("oscillator multi-index outside the truncated basis");
  return *o * forms_.size() + forms_.index_of(idx.form);
}

GradedBasisIndex GradedBasis::label(std::size_t i) const {
  return {osc_.state(i / forms_.size()), forms_.subset(i % forms_.size())};
}

namespace {

std::size_t graded_dim(const FockSpaceConfig& config) {
  return FockBasis(config).size() << config.num_vars;
}

SpMat form_identity(const FockSpaceConfig& config) {
  return sparse_identity(Eigen::Index(1) << config.num_vars);
}

// Diagonal operator with entry f(i) on graded basis state i.
template <class F>
SpMat graded_diagonal(const GradedBasis& basis, F f) {
  std::vector<Eigen::Triplet<cplx>> trips;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double v = f(i);
    if (v != 0.0) trips.emplace_back(static_cast<int>(i), static_cast<int>(i), v);
  }
  SpMat out(basis.size(), basis.size());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

}  // namespace

TruncatedOperator wedge(const FockSpaceConfig& config, int j) {
  config.validate();
  SpMat m = kron(sparse_identity(static_cast<Eigen::Index>(FockBasis(config).size())),
                 form_wedge_matrix(config.num_vars, j));
  return TruncatedOperator(SpaceKind::graded, config, std::move(m), +1);
}

TruncatedOperator contract(const FockSpaceConfig& config, int j) {
  config.validate();
  SpMat m = kron(sparse_identity(static_cast<Eigen::Index>(FockBasis(config).size())),
                 form_contract_matrix(config.num_vars, j));
  return TruncatedOperator(SpaceKind::graded, config, std::move(m), -1);
}

TruncatedOperator lift(const TruncatedOperator& a) {
  if (a.kind() != SpaceKind::oscillator) throw ConfigMismatch("lift expects an oscillator-space operator");
  return TruncatedOperator(SpaceKind::graded, a.config(), kron(a.matrix(), form_identity(a.config())),
                           a.degree_shift());
}

TruncatedOperator dirac_plus(const FockSpaceConfig& config) {
  config.validate();
  const cplx i(0.0, 1.0);
  SpMat sum(static_cast<Eigen::Index>(graded_dim(config)), static_cast<Eigen::Index>(graded_dim(config)));
  for (int j = 1; j <= config.num_vars; ++j) {
    sum += kron(creation(config, j).matrix(), form_contract_matrix(config.num_vars, j));
    sum -= kron(annihilation(config, j).matrix(), form_wedge_matrix(config.num_vars, j));
  }
  return TruncatedOperator(SpaceKind::graded, config, SpMat(i * sum), 0);
}

TruncatedOperator parity_projection(const FockSpaceConfig& config, Parity parity) {
  GradedBasis basis(config);
  SpMat m = graded_diagonal(basis, [&](std::size_t k) { return basis.parity(k) == parity ? 1.0 : 0.0; });
  return TruncatedOperator(SpaceKind::graded, config, std::move(m), 0);
}

TruncatedOperator dirac_plus_even(const FockSpaceConfig& config) {
  return compose(dirac_plus(config), parity_projection(config, Parity::even));
}

TruncatedOperator dirac_plus_odd(const FockSpaceConfig& config) {
  return compose(dirac_plus(config), parity_projection(config, Parity::odd));
}

TruncatedOperator degree_projection(const FockSpaceConfig& config, int q) {
  if (q < 0 || q > config.num_vars)
    throw InvalidArgument("degree_projection: q must lie in 0.." + std::to_string(config.num_vars));
  GradedBasis basis(config);
  SpMat m = graded_diagonal(basis, [&](std::size_t k) { return basis.form_degree(k) == q ? 1.0 : 0.0; });
  return TruncatedOperator(SpaceKind::graded, config, std::move(m), 0);
}

std::vector<int> sector_indices(const GradedBasis& basis, Parity parity) {
  std::vector<int> out;
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (basis.parity(i) == parity) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> graded_states_up_to(const GradedBasis& basis, int max_oscillator_degree) {
  std::vector<int> out;
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (basis.oscillator_degree(i) <= max_oscillator_degree) out.push_back(static_cast<int>(i));
  return out;
}

Vec vacuum_vector(const FockSpaceConfig& config) {
  config.validate();
  Vec z = Vec::Zero(static_cast<Eigen::Index>(graded_dim(config)));
  z(0) = 1.0;
  return z;
}

namespace {

TruncatedOperator rank_one_projector(const FockSpaceConfig& config, const Vec& z) {
  std::vector<Eigen::Triplet<cplx>> trips;
  for (Eigen::Index c = 0; c < z.size(); ++c) {
    if (z(c) == cplx(0.0)) continue;
    for (Eigen::Index r = 0; r < z.size(); ++r)
      if (z(r) != cplx(0.0)) trips.emplace_back(r, c, z(r) * std::conj(z(c)));
  }
  SpMat m(z.size(), z.size());
  m.setFromTriplets(trips.begin(), trips.end());
  // A deformed projector mixes total degrees, so it has no single shift.
  std::optional<int> shift;
  if (std::count_if(z.begin(), z.end(), [](cplx v) { return v != cplx(0.0); }) <= 1) shift = 0;
  return TruncatedOperator(SpaceKind::graded, config, std::move(m), shift);
}

}  // namespace

TruncatedOperator vacuum_szego(const FockSpaceConfig& config) {
  return rank_one_projector(config, vacuum_vector(config));
}

Vec deformed_vacuum(const FockSpaceConfig& config, double theta, const GradedBasisIndex& target) {
  const double pairing = std::cos(theta);
  if (!(std::abs(pairing) >= kPairingFloor))
    throw PairingFloorViolation("deformed vacuum: |<z0', z0>| = " + std::to_string(std::abs(pairing)) +
                                    " is below the pairing floor",
                                pairing);
  GradedBasis basis(config);
  const std::size_t t = basis.index_of(target);
  if (basis.form_degree(t) % 2 != 0) throw InvalidArgument("deformation target must have even form degree");
  if (t == 0) throw InvalidArgument("deformation target must differ from the vacuum");
  Vec z = vacuum_vector(config) * pairing;
  z(static_cast<Eigen::Index>(t)) = std::sin(theta);
  return z;
}

TruncatedOperator deformed_szego(const FockSpaceConfig& config, double theta,
                                 const GradedBasisIndex& target) {
  return rank_one_projector(config, deformed_vacuum(config, theta, target));
}

}  // namespace spinc
