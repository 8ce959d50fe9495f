#include "spinc/model_operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "spinc/errors.hpp"

namespace spinc {

GradedBasisIndex ModelConfig::target_value() const {
  if (target) return *target;
  OscillatorMultiIndex k{std::vector<int>(std::max(n - 1, 1), 0)};
  k.levels[0] = 1;
  return {k, FormMultiIndex{}};
}

void ModelConfig::validate() const {
  if (n < 2) throw InvalidArgument("model: n must be >= 2");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("model: alpha must be positive");
  if (!std::isfinite(beta_value())) throw InvalidArgument("model: beta must be finite");
  if (!(tol > 0.0)) throw InvalidArgument("model: tol must be positive");
  fock().validate();
  const GradedBasisIndex t = target_value();
  if (static_cast<int>(t.osc.levels.size()) != n - 1)
    throw InvalidArgument("model: deformation target has the wrong number of oscillator variables");
  if (t.form.degree() != 0) throw InvalidArgument("model: deformation target must have form degree 0");
  if (t.osc.degree() == 0) throw InvalidArgument("model: deformation target must differ from the vacuum");
  if (t.osc.degree() > cutoff - guard)
    throw InvalidArgument("model: deformation target lies outside the guard subspace");
  const double pairing = std::cos(theta);
  if (!(std::abs(pairing) >= kPairingFloor))
    throw PairingFloorViolation("model: |<z0', z0>| = " + std::to_string(std::abs(pairing)) +
                                    " is below the pairing floor",
                                pairing);
}

namespace {

// Sector 0 = even tangential forms, 1 = odd.
const TruncatedOperator& sector_projector(const FockSpaceConfig& c, int sector) {
  static thread_local std::map<std::tuple<int, int, int, int>, TruncatedOperator> store;
  const auto key = std::make_tuple(c.num_vars, c.cutoff, c.guard, sector);
  auto it = store.find(key);
  if (it == store.end())
    it = store.emplace(key, parity_projection(c, sector == 0 ? Parity::even : Parity::odd)).first;
  return it->second;
}

TruncatedOperator zero_operator(const FockSpaceConfig& c) {
  return identity(c, SpaceKind::graded) * cplx(0.0);
}

}  // namespace

BlockOperator::BlockOperator(const FockSpaceConfig& config) : config_(config) {
  const TruncatedOperator zero = zero_operator(config);
  blocks_.assign(4, zero);
  for (auto& row : orders_) row.fill(std::nullopt);
}

void BlockOperator::set_block(int i, int j, const TruncatedOperator& m, std::optional<int> order) {
  if (i < 0 || i > 1 || j < 0 || j > 1) throw InvalidArgument("block index out of range");
  if (m.kind() != SpaceKind::graded || !(m.config() == config_))
    throw ConfigMismatch("block operator entries must act on the same graded space");
  blocks_[2 * i + j] = compose(sector_projector(config_, i), compose(m, sector_projector(config_, j)));
  orders_[i][j] = order;
}

TruncatedOperator BlockOperator::full() const {
  return blocks_[0] + blocks_[1] + blocks_[2] + blocks_[3];
}

namespace {

struct Term {
  std::optional<TruncatedOperator> op;
  std::optional<int> order;
};

void accumulate(Term& acc, const TruncatedOperator& op, std::optional<int> order) {
  if (!order) return;
  if (!acc.order || *order > *acc.order) {
    acc.op = op;
    acc.order = order;
  } else if (*order == *acc.order) {
    acc.op = *acc.op + op;
  }
}

}  // namespace

BlockOperator principal_sum(const BlockOperator& a, const BlockOperator& b) {
  if (!(a.config() == b.config())) throw ConfigMismatch("principal_sum: different spaces");
  BlockOperator out(a.config());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Term t;
      accumulate(t, a.block(i, j), a.order(i, j));
      accumulate(t, b.block(i, j), b.order(i, j));
      // Two equal-order terms that cancel exactly leave a zero block.
      if (t.order && max_abs(t.op->matrix()) > 0.0) out.set_block(i, j, *t.op, t.order);
    }
  return out;
}

BlockOperator principal_product(const BlockOperator& a, const BlockOperator& b) {
  if (!(a.config() == b.config())) throw ConfigMismatch("principal_product: different spaces");
  BlockOperator out(a.config());
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      Term t;
      for (int j = 0; j < 2; ++j) {
        if (!a.order(i, j) || !b.order(j, k)) continue;
        accumulate(t, compose(a.block(i, j), b.block(j, k)), *a.order(i, j) + *b.order(j, k));
      }
      if (t.order) out.set_block(i, k, *t.op, t.order);
    }
  return out;
}

BlockOperator block_identity(const FockSpaceConfig& config) {
  BlockOperator out(config);
  const TruncatedOperator id = identity(config, SpaceKind::graded);
  out.set_block(0, 0, id, 0);
  out.set_block(1, 1, id, 0);
  return out;
}

double block_distance(const BlockOperator& a, const BlockOperator& b) {
  double d = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) d = std::max(d, max_abs((a.block(i, j) - b.block(i, j)).matrix()));
  return d;
}

namespace {

struct Ingredients {
  FockSpaceConfig fock;
  TruncatedOperator id;
  TruncatedOperator h0;
  TruncatedOperator d_even;
  TruncatedOperator d_odd;
  double alpha;
  double beta;
};

Ingredients ingredients(const ModelConfig& cfg) {
  cfg.validate();
  const FockSpaceConfig f = cfg.fock();
  return {f,
          identity(f, SpaceKind::graded),
          lift(harmonic_oscillator(f)),
          dirac_plus_even(f),
          dirac_plus_odd(f),
          cfg.alpha,
          cfg.beta_value()};
}

// alpha^2 (H0 + sign * beta)
TruncatedOperator shifted_oscillator(const Ingredients& g, double sign) {
  return (g.h0 + g.id * cplx(sign * g.beta)) * cplx(g.alpha * g.alpha);
}

TruncatedOperator szego_prime(const ModelConfig& cfg) {
  return deformed_szego(cfg.fock(), cfg.theta, cfg.target_value());
}

}  // namespace

BlockOperator build_calderon_model(Chirality c, bool complement, const ModelConfig& cfg) {
  const Ingredients g = ingredients(cfg);
  const cplx a(g.alpha);
  const double s = complement ? -1.0 : 1.0;
  BlockOperator out(g.fock);
  out.set_block(0, 1, g.d_odd * (s * a), -1);
  out.set_block(1, 0, g.d_even * (s * a), -1);
  // The oscillator term sits where the complementary identity is missing.
  const bool oscillator_bottom = (c == Chirality::even) != complement;
  const TruncatedOperator osc = shifted_oscillator(g, complement ? +1.0 : -1.0);
  if (oscillator_bottom) {
    out.set_block(0, 0, g.id, 0);
    out.set_block(1, 1, osc, -2);
  } else {
    out.set_block(0, 0, osc, -2);
    out.set_block(1, 1, g.id, 0);
  }
  return out;
}

BlockOperator build_boundary_model(Chirality c, const ModelConfig& cfg) {
  cfg.validate();
  const FockSpaceConfig f = cfg.fock();
  const TruncatedOperator pi = szego_prime(cfg);
  const TruncatedOperator id = identity(f, SpaceKind::graded);
  BlockOperator out(f);
  if (c == Chirality::even) {
    out.set_block(0, 0, pi, 0);
    out.set_block(1, 1, id, 0);
  } else {
    out.set_block(0, 0, id - pi, 0);
  }
  return out;
}

BlockOperator build_comparison_model(Chirality c, const ModelConfig& cfg) {
  const Ingredients g = ingredients(cfg);
  const TruncatedOperator pi = szego_prime(cfg);
  const cplx a(g.alpha);
  const double s = c == Chirality::even ? 1.0 : -1.0;
  BlockOperator out(g.fock);
  out.set_block(0, 0, pi, 0);
  out.set_block(0, 1, compose(g.id - pi * cplx(2.0), g.d_odd) * (-s * a), -1);
  out.set_block(1, 0, g.d_even * (s * a), -1);
  out.set_block(1, 1, shifted_oscillator(g, -s), -2);
  return out;
}

BlockOperator assemble_comparison(Chirality c, const ModelConfig& cfg) {
  const BlockOperator r = build_boundary_model(c, cfg);
  const BlockOperator p = build_calderon_model(c, false, cfg);
  const BlockOperator q = build_calderon_model(c, true, cfg);
  const BlockOperator id = block_identity(cfg.fock());
  // I - R with R's zero blocks written explicitly.
  BlockOperator complement_r(cfg.fock());
  for (int i = 0; i < 2; ++i) {
    TruncatedOperator block = id.block(i, i) - r.block(i, i);
    complement_r.set_block(i, i, block, max_abs(block.matrix()) > 0.0 ? std::optional<int>(0) : std::nullopt);
  }
  return principal_sum(principal_product(r, p), principal_product(complement_r, q));
}

std::vector<int> model_guard_indices(const ModelConfig& cfg) {
  cfg.validate();
  GradedBasis basis(cfg.fock());
  std::vector<int> out;
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (basis.total_degree(i) <= cfg.cutoff - cfg.guard) out.push_back(static_cast<int>(i));
  return out;
}

namespace {

// Embeds a matrix indexed by (rows, cols) into an n x n operator.
SpMat scatter(const SpMat& small, const std::vector<int>& rows, const std::vector<int>& cols, Eigen::Index n) {
  std::vector<Eigen::Triplet<cplx>> trips;
  for (int k = 0; k < small.outerSize(); ++k)
    for (SpMat::InnerIterator it(small, k); it; ++it) trips.emplace_back(rows[it.row()], cols[it.col()], it.value());
  SpMat out(n, n);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

SpMat diagonal_on(const std::vector<int>& idx, Eigen::Index n) {
  std::vector<Eigen::Triplet<cplx>> trips;
  for (int i : idx) trips.emplace_back(i, i, 1.0);
  SpMat out(n, n);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

SpMat column(const Vec& v) { return v.sparseView(); }

std::vector<int> intersect(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<int> labels_of(const GradedBasis& basis, const std::vector<int>& idx) {
  std::vector<int> out;
  for (int i : idx) out.push_back(basis.total_degree(i));
  return out;
}

// Pseudo-inverse of the guard compression of d (source -> target), embedded back.
SpMat partial_inverse(const TruncatedOperator& d, const GradedBasis& basis, const std::vector<int>& source,
                      const std::vector<int>& target) {
  const SpMat small = compress(d.matrix(), target, source);
  const SpMat inv = blockwise_pseudo_inverse(small, labels_of(basis, target), labels_of(basis, source));
  return scatter(inv, source, target, d.dim());
}

}  // namespace

ModelInverse::ModelInverse(Chirality c, const ModelConfig& cfg) : chirality_(c) {
  const Ingredients g = ingredients(cfg);
  GradedBasis basis(g.fock);
  const Eigen::Index n = g.id.dim();
  guard_ = model_guard_indices(cfg);
  in_guard_.assign(static_cast<std::size_t>(n), 0);
  for (int i : guard_) in_guard_[i] = 1;
  const std::vector<int> even_g = intersect(sector_indices(basis, Parity::even), guard_);
  const std::vector<int> odd_g = intersect(sector_indices(basis, Parity::odd), guard_);

  const SpMat d_even_inv = partial_inverse(g.d_even, basis, even_g, odd_g);
  const SpMat d_odd_inv = partial_inverse(g.d_odd, basis, odd_g, even_g);
  const SpMat proj_e = diagonal_on(even_g, n), proj_o = diagonal_on(odd_g, n);

  const Vec z0 = vacuum_vector(g.fock);
  const Vec z1 = deformed_vacuum(g.fock, cfg.theta, cfg.target_value());
  const cplx pairing = z0.dot(z1);
  const SpMat z0c = column(z0), z1c = column(z1);

  // a - A1 restricted to the check-part: (I - z0' z0^* / <z0, z0'>) a
  const SpMat k = proj_e - SpMat(z1c * z0c.adjoint()) / pairing;
  const double alpha = g.alpha, beta = g.beta;
  const SpMat h_minus = (g.h0.matrix() - beta * g.id.matrix()) * cplx(alpha * alpha);
  const SpMat h_plus = (g.h0.matrix() + beta * g.id.matrix()) * cplx(alpha * alpha);

  SpMat v, u_check, rest;
  if (c == Chirality::even) {
    v = -(1.0 / alpha) * SpMat(d_odd_inv * k);
    u_check = (1.0 / alpha) * SpMat(d_even_inv * SpMat(proj_o - SpMat(h_minus * v)));
    rest = proj_e - alpha * SpMat(g.d_odd.matrix() * v) - u_check;
  } else {
    v = (1.0 / alpha) * SpMat(d_odd_inv * k);
    u_check = (1.0 / alpha) * SpMat(d_even_inv * SpMat(SpMat(h_plus * v) - proj_o));
    rest = proj_e + alpha * SpMat(g.d_odd.matrix() * v) - u_check;
  }
  const SpMat u0 = SpMat(z0c * SpMat(z1c.adjoint() * rest)) / std::conj(pairing);
  matrix_ = u0 + u_check + v;
  matrix_.prune(cplx(0.0));
}

Vec ModelInverse::solve(const Vec& rhs) const {
  if (rhs.size() != matrix_.cols()) throw InvalidArgument("rhs has the wrong dimension");
  for (Eigen::Index i = 0; i < rhs.size(); ++i)
    if (!in_guard_[i] && rhs(i) != cplx(0.0))
      throw InvalidArgument("rhs has weight outside the guard subspace");
  return matrix_ * rhs;
}

namespace {

double block_operator_norm(const SpMat& m, const GradedBasis& basis, const std::vector<int>& idx) {
  std::map<int, std::vector<int>> groups;
  for (int i : idx) groups[basis.total_degree(i)].push_back(i);
  double best = 0.0;
  for (const auto& [label, members] : groups) {
    (void)label;
    best = std::max(best, operator_norm(Mat(compress(m, members, members))));
  }
  return best;
}

int rank_of_block(const SpMat& m, const std::vector<int>& rows, const std::vector<int>& cols, double threshold) {
  const SpMat sub = compress(m, rows, cols);
  std::vector<char> row_used(sub.rows(), 0);
  std::vector<int> used_cols;
  for (int k = 0; k < sub.outerSize(); ++k) {
    bool any = false;
    for (SpMat::InnerIterator it(sub, k); it; ++it)
      if (it.value() != cplx(0.0)) {
        row_used[it.row()] = 1;
        any = true;
      }
    if (any) used_cols.push_back(k);
  }
  std::vector<int> used_rows;
  for (int i = 0; i < sub.rows(); ++i)
    if (row_used[i]) used_rows.push_back(i);
  if (used_rows.empty()) return 0;
  const Mat dense(compress(sub, used_rows, used_cols));
  const RankInfo info = numerical_rank(dense, 0.0);
  int r = 0;
  for (double s : info.singular_values)
    if (s > threshold) ++r;
  return r;
}

}  // namespace

RankCertificate deformation_rank_certificate(Chirality c, const ModelConfig& cfg) {
  ModelConfig base = cfg;
  base.theta = 0.0;
  const ModelInverse deformed(c, cfg), plain(c, base);
  GradedBasis basis(cfg.fock());
  const SpMat diff = deformed.matrix() - plain.matrix();
  const std::vector<int>& g = plain.guard();
  const std::vector<int> even_g = intersect(sector_indices(basis, Parity::even), g);
  const std::vector<int> odd_g = intersect(sector_indices(basis, Parity::odd), g);

  RankCertificate cert;
  cert.threshold = 1e-8 * block_operator_norm(plain.matrix(), basis, g);
  cert.ranks[0] = rank_of_block(diff, even_g, even_g, cert.threshold);
  cert.ranks[1] = rank_of_block(diff, even_g, odd_g, cert.threshold);
  cert.ranks[2] = rank_of_block(diff, odd_g, even_g, cert.threshold);
  cert.block22_max = max_abs(compress(diff, odd_g, odd_g));
  cert.pass = std::all_of(cert.ranks.begin(), cert.ranks.end(), [](int r) { return r <= 4; }) &&
              cert.block22_max <= cert.threshold;
  return cert;
}

Vec random_guarded_rhs(const ModelConfig& cfg, Rng& rng) {
  const std::vector<int> g = model_guard_indices(cfg);
  Vec x = Vec::Zero(static_cast<Eigen::Index>(GradedBasis(cfg.fock()).size()));
  for (int i : g) x(i) = cplx(rng.normal(), rng.normal());
  return x;
}

CertificationReport certify_invertibility(Chirality c, const ModelConfig& cfg, std::uint64_t seed,
                                          int rhs_samples) {
  cfg.validate();
  CertificationReport rep;
  rep.chirality = c;
  GradedBasis basis(cfg.fock());
  const SpMat t = build_comparison_model(c, cfg).full().matrix();
  const ModelInverse inv(c, cfg);
  const std::vector<int>& g = inv.guard();

  // T preserves total degree except that the deformed projector couples the
  // vacuum to the target's degree; merge those two degrees.
  const int target_degree = cfg.target_value().osc.degree();
  std::map<int, std::vector<int>> groups;
  for (int i : g) {
    int label = basis.total_degree(i);
    if (cfg.theta != 0.0 && label == target_degree) label = 0;
    groups[label].push_back(i);
  }
  rep.sigma_min = std::numeric_limits<double>::infinity();
  for (const auto& [label, members] : groups) {
    (void)label;
    const RankInfo info = numerical_rank(Mat(compress(t, members, members)), 0.0);
    rep.sigma_max = std::max(rep.sigma_max, info.singular_values.front());
    rep.sigma_min = std::min(rep.sigma_min, info.singular_values.back());
  }
  rep.sigma_floor = 1e-8 * rep.sigma_max;

  const SpMat tg = compress(t, g, g), ig = compress(inv.matrix(), g, g);
  const SpMat id = sparse_identity(static_cast<Eigen::Index>(g.size()));
  rep.left_residual = max_abs(SpMat(ig * tg - id));
  rep.right_residual = max_abs(SpMat(tg * ig - id));

  Rng rng(seed);
  rep.rhs_samples = rhs_samples;
  for (int k = 0; k < rhs_samples; ++k) {
    const Vec rhs = random_guarded_rhs(cfg, rng);
    const Vec x = inv.solve(rhs);
    rep.rhs_residual = std::max(rep.rhs_residual, (t * x - rhs).norm() / rhs.norm());
  }

  rep.ranks = deformation_rank_certificate(c, cfg);
  rep.parametrix_orders = {{{0, 1}, {1, 1}}};
  rep.index = static_cast<int>(tg.cols()) - static_cast<int>(tg.rows());
  rep.pass = rep.sigma_min > rep.sigma_floor && rep.left_residual <= cfg.tol && rep.right_residual <= cfg.tol &&
             rep.rhs_residual <= cfg.tol && rep.ranks.pass && rep.index == 0;
  return rep;
}

}  // namespace spinc
