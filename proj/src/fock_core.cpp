#include "spinc/fock_core.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "spinc/errors.hpp"

namespace spinc {

void FockSpaceConfig::validate() const {
  if (num_vars < 1) throw InvalidArgument("FockSpaceConfig: num_vars must be >= 1");
  if (guard < 0) throw InvalidArgument("FockSpaceConfig: guard must be >= 0");
  if (cutoff < guard + 2)
    throw InvalidArgument("FockSpaceConfig: cutoff must be >= guard + 2 (got cutoff " +
                          std::to_string(cutoff) + ", guard " + std::to_string(guard) + ")");
  if (num_vars * std::log2(static_cast<double>(cutoff) + 1.0) > 62.0)
    throw InvalidArgument("FockSpaceConfig: truncated space too large");
}

int OscillatorMultiIndex::degree() const { return std::accumulate(levels.begin(), levels.end(), 0); }

namespace {

// All compositions of `remaining` into levels[pos..], first coordinate largest first.
void enumerate_degree(std::vector<int>& levels, std::size_t pos, int remaining,
                      std::vector<OscillatorMultiIndex>& out) {
  if (pos + 1 == levels.size()) {
    levels[pos] = remaining;
    out.push_back({levels});
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    levels[pos] = v;
    enumerate_degree(levels, pos + 1, remaining - v, out);
  }
}

}  // namespace

FockBasis::FockBasis(const FockSpaceConfig& config) : config_(config) {
  config_.validate();
  std::vector<int> levels(config_.num_vars, 0);
  for (int d = 0; d <= config_.cutoff; ++d) enumerate_degree(levels, 0, d, states_);
  lookup_.reserve(states_.size());
  for (std::size_t i = 0; i < states_.size(); ++i) lookup_.emplace(key(states_[i]), i);
}

std::size_t FockBasis::key(const OscillatorMultiIndex& k) const {
  std::size_t h = 0;
  for (int v : k.levels) h = h * static_cast<std::size_t>(config_.cutoff + 1) + static_cast<std::size_t>(v);
  return h;
}

std::optional<std::size_t> FockBasis::index_of(const OscillatorMultiIndex& k) const {
  if (static_cast<int>(k.levels.size()) != config_.num_vars) return std::nullopt;
  for (int v : k.levels)
    if (v < 0) return std::nullopt;
  if (k.degree() > config_.cutoff) return std::nullopt;
  auto it = lookup_.find(key(k));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t FockBasis::count_of_degree(int num_vars, int degree) {
  // C(degree + num_vars - 1, num_vars - 1)
  std::size_t c = 1;
  for (int i = 1; i < num_vars; ++i) c = c * static_cast<std::size_t>(degree + i) / static_cast<std::size_t>(i);
  return c;
}

TruncatedOperator::TruncatedOperator(SpaceKind kind, FockSpaceConfig config, SpMat matrix,
                                     std::optional<int> degree_shift)
    : kind_(kind), config_(config), matrix_(std::move(matrix)), degree_shift_(degree_shift) {
  if (matrix_.rows() != matrix_.cols()) throw InvalidArgument("TruncatedOperator must be square");
  matrix_.makeCompressed();
}

namespace {

void require_same_space(const TruncatedOperator& a, const TruncatedOperator& b, const char* op) {
  if (a.kind() != b.kind() || !(a.config() == b.config()) || a.dim() != b.dim())
    throw ConfigMismatch(std::string(op) + ": operands act on different truncated spaces");
}

std::optional<int> common_shift(const TruncatedOperator& a, const TruncatedOperator& b) {
  if (a.degree_shift() && b.degree_shift() && *a.degree_shift() == *b.degree_shift())
    return a.degree_shift();
  if (a.matrix().nonZeros() == 0) return b.degree_shift();
  if (b.matrix().nonZeros() == 0) return a.degree_shift();
  return std::nullopt;
}

}  // namespace

TruncatedOperator TruncatedOperator::operator+(const TruncatedOperator& other) const {
  require_same_space(*this, other, "operator+");
  return TruncatedOperator(kind_, config_, SpMat(matrix_ + other.matrix_), common_shift(*this, other));
}

TruncatedOperator TruncatedOperator::operator-(const TruncatedOperator& other) const {
  require_same_space(*this, other, "operator-");
  return TruncatedOperator(kind_, config_, SpMat(matrix_ - other.matrix_), common_shift(*this, other));
}

TruncatedOperator TruncatedOperator::operator*(cplx scale) const {
  return TruncatedOperator(kind_, config_, SpMat(matrix_ * scale), degree_shift_);
}

namespace {

void check_variable(const FockSpaceConfig& config, int j) {
  if (j < 1 || j > config.num_vars)
    throw InvalidArgument("variable index " + std::to_string(j) + " outside 1.." +
                          std::to_string(config.num_vars));
}

}  // namespace

TruncatedOperator creation(const FockSpaceConfig& config, int j) {
  check_variable(config, j);
  FockBasis basis(config);
  std::vector<Eigen::Triplet<cplx>> trips;
  for (std::size_t col = 0; col < basis.size(); ++col) {
    OscillatorMultiIndex raised = basis.state(col);
    const int m = raised.levels[j - 1];
    raised.levels[j - 1] = m + 1;
    if (auto row = basis.index_of(raised))
      trips.emplace_back(static_cast<int>(*row), static_cast<int>(col), std::sqrt(2.0 * (m + 1)));
  }
  SpMat mat(basis.size(), basis.size());
  mat.setFromTriplets(trips.begin(), trips.end());
  return TruncatedOperator(SpaceKind::oscillator, config, std::move(mat), +1);
}

TruncatedOperator annihilation(const FockSpaceConfig& config, int j) {
  check_variable(config, j);
  FockBasis basis(config);
  std::vector<Eigen::Triplet<cplx>> trips;
  for (std::size_t col = 0; col < basis.size(); ++col) {
    OscillatorMultiIndex lowered = basis.state(col);
    const int m = lowered.levels[j - 1];
    if (m == 0) continue;
    lowered.levels[j - 1] = m - 1;
    if (auto row = basis.index_of(lowered))
      trips.emplace_back(static_cast<int>(*row), static_cast<int>(col), std::sqrt(2.0 * m));
  }
  SpMat mat(basis.size(), basis.size());
  mat.setFromTriplets(trips.begin(), trips.end());
  return TruncatedOperator(SpaceKind::oscillator, config, std::move(mat), -1);
}

TruncatedOperator harmonic_oscillator(const FockSpaceConfig& config) {
  FockBasis basis(config);
  std::vector<Eigen::Triplet<cplx>> trips;
  for (std::size_t i = 0; i < basis.size(); ++i)
    trips.emplace_back(static_cast<int>(i), static_cast<int>(i),
                       static_cast<double>(2 * basis.state(i).degree() + config.num_vars));
  SpMat mat(basis.size(), basis.size());
  mat.setFromTriplets(trips.begin(), trips.end());
  return TruncatedOperator(SpaceKind::oscillator, config, std::move(mat), 0);
}

TruncatedOperator identity(const FockSpaceConfig& config, SpaceKind kind) {
  FockBasis basis(config);
  Eigen::Index n = static_cast<Eigen::Index>(basis.size());
  if (kind == SpaceKind::graded) n <<= config.num_vars;
  return TruncatedOperator(kind, config, sparse_identity(n), 0);
}

TruncatedOperator compose(const TruncatedOperator& a, const TruncatedOperator& b) {
  require_same_space(a, b, "compose");
  std::optional<int> shift;
  if (a.degree_shift() && b.degree_shift()) shift = *a.degree_shift() + *b.degree_shift();
  return TruncatedOperator(a.kind(), a.config(), SpMat(a.matrix() * b.matrix()), shift);
}

TruncatedOperator adjoint(const TruncatedOperator& a) {
  std::optional<int> shift;
  if (a.degree_shift()) shift = -*a.degree_shift();
  return TruncatedOperator(a.kind(), a.config(), SpMat(a.matrix().adjoint()), shift);
}

TruncatedOperator commutator(const TruncatedOperator& a, const TruncatedOperator& b) {
  require_same_space(a, b, "commutator");
  std::optional<int> shift;
  if (a.degree_shift() && b.degree_shift()) shift = *a.degree_shift() + *b.degree_shift();
  SpMat m = a.matrix() * b.matrix() - b.matrix() * a.matrix();
  return TruncatedOperator(a.kind(), a.config(), std::move(m), shift);
}

double max_column_deviation(const TruncatedOperator& a, const TruncatedOperator& b,
                            const std::vector<int>& columns) {
  require_same_space(a, b, "max_column_deviation");
  const SpMat diff = a.matrix() - b.matrix();
  double best = 0.0;
  for (int c : columns)
    for (SpMat::InnerIterator it(diff, c); it; ++it) best = std::max(best, std::abs(it.value()));
  return best;
}

std::vector<int> oscillator_states_up_to(const FockBasis& basis, int max_degree) {
  std::vector<int> out;
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (basis.state(i).degree() <= max_degree) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace spinc
