#include "spinc/cli_run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "spinc/errors.hpp"
#include "spinc/fock_core.hpp"
#include "spinc/fredholm_pairs.hpp"
#include "spinc/matrix_json.hpp"
#include "spinc/model_operators.hpp"
#include "spinc/rng.hpp"
#include "spinc/spinor_model.hpp"
#include "spinc/symbol_calculus.hpp"
#include "spinc/topo_index.hpp"

namespace spinc {

using nlohmann::json;

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"verify-algebra", "verify-symbols", "model-invert",
                                                 "relindex",       "toeplitz",       "topo"};
  return names;
}

namespace {

class UsageError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class Params {
 public:
  Params(const json& j, std::set<std::string> allowed) : j_(j) {
    if (!j_.is_object()) throw UsageError("params must be a JSON object");
    for (const auto& [key, value] : j_.items()) {
      (void)value;
      if (!allowed.count(key)) throw UsageError("unknown parameter '" + key + "'");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const json& raw(const std::string& key) const { return j_.at(key); }

  int get_int(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw UsageError("parameter '" + key + "' must be an integer");
    return v.get<int>();
  }

  double get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw UsageError("parameter '" + key + "' must be a number");
    return v.get<double>();
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw UsageError("parameter '" + key + "' must be a string");
    return v.get<std::string>();
  }

 private:
  const json& j_;
};

double fp(double x) { return fixed_precision(x); }

CheckRecord record(std::string name, std::string anchor, bool pass, double max_error, json details = json::object()) {
  return {std::move(name), std::move(anchor), pass ? "pass" : "fail", fp(max_error), std::move(details)};
}

// ---------------------------------------------------------------- algebra

std::vector<CheckRecord> verify_algebra(const Params& p, std::uint64_t seed) {
  const int n = p.get_int("n", 3);
  if (n < 2) throw UsageError("--n must be at least 2");
  FockSpaceConfig fc{n - 1, p.get_int("cutoff", 16), p.get_int("guard", 2)};
  fc.validate();
  const double tol = 1e-12;
  const int top = fc.guarded_degree();
  FockBasis basis(fc);
  const std::vector<int> cols = oscillator_states_up_to(basis, top);
  const TruncatedOperator id = identity(fc), zero = id * cplx(0.0);

  std::vector<TruncatedOperator> c, cs;
  for (int j = 1; j <= fc.num_vars; ++j) {
    c.push_back(creation(fc, j));
    cs.push_back(annihilation(fc, j));
  }
  std::vector<CheckRecord> out;

  double ccr = 0.0;
  for (int j = 0; j < fc.num_vars; ++j)
    for (int k = 0; k < fc.num_vars; ++k) {
      ccr = std::max(ccr, max_column_deviation(commutator(c[j], c[k]), zero, cols));
      ccr = std::max(ccr, max_column_deviation(commutator(cs[j], cs[k]), zero, cols));
      ccr = std::max(ccr, max_column_deviation(commutator(c[j], cs[k]), id * cplx(j == k ? -2.0 : 0.0), cols));
    }
  out.push_back(record("ccr", "canonical commutation relations [C_j, C_k*] = -2 delta_jk", ccr <= tol, ccr,
                       {{"guard_degree", top}, {"states_checked", cols.size()}}));

  bool adjoint_exact = true;
  for (int j = 0; j < fc.num_vars; ++j)
    adjoint_exact = adjoint_exact && max_abs((adjoint(c[j]) - cs[j]).matrix()) == 0.0;
  out.push_back(record("creation_adjoint", "C_j* is the conjugate transpose of C_j", adjoint_exact,
                       adjoint_exact ? 0.0 : 1.0));

  TruncatedOperator lower = zero, upper = zero;
  for (int j = 0; j < fc.num_vars; ++j) {
    lower = lower + compose(cs[j], c[j]);
    upper = upper + compose(c[j], cs[j]);
  }
  const TruncatedOperator h0 = harmonic_oscillator(fc);
  const double osc = std::max(max_column_deviation(lower - id * cplx(fc.num_vars), h0, cols),
                              max_column_deviation(upper + id * cplx(fc.num_vars), h0, cols));
  out.push_back(record("oscillator_identities", "sum C*C - (n-1) = H0 = sum C C* + (n-1)", osc <= tol, osc));

  std::map<int, std::size_t> multiplicity;
  double spectrum_error = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double value = h0.matrix().coeff(i, i).real();
    const int expected = 2 * basis.state(i).degree() + fc.num_vars;
    spectrum_error = std::max(spectrum_error, std::abs(value - expected));
    ++multiplicity[expected];
  }
  bool multiplicities_ok = static_cast<int>(multiplicity.size()) == fc.cutoff + 1;
  for (const auto& [value, count] : multiplicity)
    multiplicities_ok = multiplicities_ok &&
                        count == FockBasis::count_of_degree(fc.num_vars, (value - fc.num_vars) / 2);
  out.push_back(record("oscillator_spectrum", "spectrum of H0 is 2m + (n-1) with graded multiplicities",
                       spectrum_error == 0.0 && multiplicities_ok, spectrum_error,
                       {{"distinct_eigenvalues", multiplicity.size()}}));

  // Graded space.
  GradedBasis gb(fc);
  const std::vector<int> gcols = graded_states_up_to(gb, top);
  const TruncatedOperator d = dirac_plus(fc);
  TruncatedOperator expected_square = lift(upper);
  for (int q = 1; q <= fc.num_vars; ++q) expected_square = expected_square + degree_projection(fc, q) * cplx(2.0 * q);
  const double square = max_column_deviation(compose(d, d), expected_square, gcols);
  out.push_back(record("dirac_square", "D+^2 = sum C_j C_j* + sum_q 2q Pi_q", square <= tol, square,
                       {{"states_checked", gcols.size()}}));

  const TruncatedOperator de = dirac_plus_even(fc), dodd = dirac_plus_odd(fc);
  const double chiral = max_abs((adjoint(de) - dodd).matrix());
  out.push_back(record("chiral_adjoint", "(D+^even)* = D+^odd", chiral <= 1e-14, chiral));

  const double lemma = max_abs(compose(vacuum_szego(fc), dodd).matrix());
  out.push_back(record("szego_annihilates_odd_dirac", "pi_0 D+^odd = 0", lemma == 0.0, lemma));

  double clifford = 0.0;
  const Eigen::Index fdim = Eigen::Index(1) << fc.num_vars;
  const SpMat fid = sparse_identity(fdim);
  for (int j = 1; j <= fc.num_vars; ++j)
    for (int k = 1; k <= fc.num_vars; ++k) {
      const SpMat ej = form_contract_matrix(fc.num_vars, j), ek = form_contract_matrix(fc.num_vars, k);
      const SpMat wj = form_wedge_matrix(fc.num_vars, j), wk = form_wedge_matrix(fc.num_vars, k);
      clifford = std::max(clifford, max_abs(SpMat(ej * wk + wk * ej - (j == k ? 1.0 : 0.0) * fid)));
      clifford = std::max(clifford, max_abs(SpMat(ej * ek + ek * ej)));
      clifford = std::max(clifford, max_abs(SpMat(wj * wk + wk * wj)));
    }
  out.push_back(record("clifford_relations", "{e_j, eps_k} = delta_jk, {e_j, e_k} = {eps_j, eps_k} = 0",
                       clifford == 0.0, clifford));

  Rng rng(seed);
  double pairing = 0.0;
  const TruncatedOperator pe = parity_projection(fc, Parity::even), po = parity_projection(fc, Parity::odd);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec u = pe.apply(rng.complex_gaussian(pe.dim()));
    const Vec v = po.apply(rng.complex_gaussian(po.dim()));
    const cplx lhs = v.dot(de.apply(u)), rhs = dodd.apply(v).dot(u);
    pairing = std::max(pairing, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
  }
  out.push_back(record("chiral_pairing", "<D+^even u, v> = <u, D+^odd v>", pairing <= tol, pairing));

  // Kernel structure, one total-degree block at a time.
  std::map<int, std::pair<std::vector<int>, std::vector<int>>> blocks;
  for (std::size_t i = 0; i < gb.size(); ++i) {
    const int deg = gb.total_degree(i);
    if (deg > top) continue;
    (gb.parity(i) == Parity::even ? blocks[deg].first : blocks[deg].second).push_back(static_cast<int>(i));
  }
  int kernel_even = 0;
  bool odd_injective = true;
  bool kernel_is_vacuum = true;
  double margin = 1.0;
  for (const auto& [deg, sec] : blocks) {
    const auto& [ev, od] = sec;
    if (!ev.empty()) {
      const RankInfo r = numerical_rank(Mat(compress(de.matrix(), od, ev)));
      const int k = static_cast<int>(ev.size()) - r.rank;
      kernel_even += k;
      if (k > 0 && deg != 0) kernel_is_vacuum = false;
      if (r.rank > 0) margin = std::min(margin, r.smallest_kept);
    }
    if (!od.empty()) {
      const RankInfo r = numerical_rank(Mat(compress(dodd.matrix(), ev, od)));
      odd_injective = odd_injective && r.rank == static_cast<int>(od.size());
      if (r.rank > 0) margin = std::min(margin, r.smallest_kept);
    }
  }
  out.push_back(record("dirac_kernel_structure", "ker D+^even = span z0, D+^odd injective",
                       kernel_even == 1 && kernel_is_vacuum && odd_injective, 0.0,
                       {{"kernel_even", kernel_even},
                        {"odd_injective", odd_injective},
                        {"smallest_relative_singular_value", fp(margin)}}));
  return out;
}

// ---------------------------------------------------------------- symbols

double rel_err(const Mat& a, const Mat& b) { return max_abs(Mat(a - b)) / std::max(max_abs(b), 1e-300); }

BoundaryCovector random_boundary(Rng& rng, int n) {
  BoundaryCovector xp;
  xp.xi_contact = rng.normal();
  for (int i = 0; i < 2 * (n - 1); ++i) xp.xi_perp.push_back(rng.normal());
  return xp;
}

HessianData random_hessian(Rng& rng, int n, bool contact_adapted) {
  Mat g = rng.complex_gaussian(n, n);
  Mat a = 0.5 * (g + g.adjoint());
  if (contact_adapted)
    for (int j = 1; j < n; ++j) a(0, j) = a(j, 0) = 0.0;
  Mat h = rng.complex_gaussian(n, n);
  Mat b = 0.5 * (h + h.transpose());
  return HessianData::from_complex(rng.uniform(0.5, 2.0), a, b);
}

// Zeroes the blocks coupling the two parity halves.
Mat parity_diagonal_part(const Mat& m, int half) {
  Mat out = m;
  out.topRightCorner(half, half).setZero();
  out.bottomLeftCorner(half, half).setZero();
  return out;
}

std::vector<CheckRecord> verify_symbols(const Params& p, std::uint64_t seed) {
  const int n = p.get_int("n", 3);
  if (n < 2) throw UsageError("--n must be at least 2");
  const int samples = p.get_int("samples", 100);
  const int contour_samples = p.get_int("contour-samples", 20);
  if (samples < 1 || contour_samples < 1) throw UsageError("sample counts must be positive");
  Rng rng(seed);
  const int dim = tangential_dim(n), half = tangential_even_dim(n);
  const Mat id = Mat::Identity(dim, dim);
  const std::array<Chirality, 2> chis = {Chirality::even, Chirality::odd};

  double fact = 0, sd_adj = 0, sd_sq = 0, idem = 0, compl_ = 0, homog = 0, blocks = 0, cmp_sv = 0, cmp_formula = 0;
  double residue0 = 0;
  for (int s = 0; s < samples; ++s) {
    Covector xi{rng.normal(), random_boundary(rng, n)};
    const double r2 = xi.norm() * xi.norm();
    const Mat de = d1(Chirality::even, xi).matrix, dodd = d1(Chirality::odd, xi).matrix;
    fact = std::max({fact, max_abs(Mat(dodd * de - 0.5 * r2 * id)), max_abs(Mat(de * dodd - 0.5 * r2 * id))});
    const Mat s_mat = sd(xi.prime.xi_perp);
    double perp2 = 0;
    for (double v : xi.prime.xi_perp) perp2 += v * v;
    sd_adj = std::max(sd_adj, max_abs(Mat(s_mat - s_mat.adjoint())));
    sd_sq = std::max(sd_sq, max_abs(Mat(s_mat * s_mat - perp2 * id)));

    const BoundaryCovector& xp = xi.prime;
    const double r = xp.norm(), x = xp.xi_contact;
    for (Chirality c : chis) {
      const Mat pp = calderon_symbol0(c, Side::plus, xp).matrix;
      const Mat pm = calderon_symbol0(c, Side::minus, xp).matrix;
      idem = std::max({idem, max_abs(Mat(pp * pp - pp)), max_abs(Mat(pm * pm - pm))});
      compl_ = std::max(compl_, max_abs(Mat(pp + pm - id)));
      BoundaryCovector scaled = xp;
      const double lambda = 0.1 + 10.0 * rng.uniform();
      scaled.xi_contact *= lambda;
      for (double& v : scaled.xi_perp) v *= lambda;
      homog = std::max(homog, max_abs(Mat(calderon_symbol0(c, Side::plus, scaled).matrix - pp)));

      // Explicit block form of the plus projector.
      Mat expected(dim, dim);
      const double first = c == Chirality::even ? r - x : r + x, second = c == Chirality::even ? r + x : r - x;
      expected = s_mat;
      expected.topLeftCorner(half, half) += first * Mat::Identity(half, half);
      expected.bottomRightCorner(half, half) += second * Mat::Identity(half, half);
      expected /= 2.0 * r;
      blocks = std::max(blocks, max_abs(Mat(pp - expected)));

      const Mat t = comparison_symbol0(c, xp).matrix;
      Mat rc = Mat::Zero(dim, dim);
      if (c == Chirality::even)
        rc.bottomRightCorner(half, half).setIdentity();
      else
        rc.topLeftCorner(half, half).setIdentity();
      cmp_formula = std::max(cmp_formula, max_abs(Mat(rc * pp + (id - rc) * (id - pp) - t)));
      Eigen::JacobiSVD<Mat> svd(t);
      const double sv = std::sqrt((r + x) / (2.0 * r));
      for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        cmp_sv = std::max(cmp_sv, std::abs(svd.singularValues()(i) - sv));

      for (Side side : {Side::plus, Side::minus}) {
        const Mat q = contour_integral(
            [&](cplx z) { return q_symbol_at(SymbolOrder::minus1, opposite(c), z, xp, HessianData::kahler(n)); }, side,
            xp, {cplx(0, r), cplx(0, -r)});
        residue0 = std::max(residue0, max_abs(Mat(q * boundary_isomorphism(c, side, n).matrix -
                                                  calderon_symbol0(c, side, xp).matrix)));
      }
    }
  }

  // On and near the positive contact ray.
  BoundaryCovector ray{-1.0, std::vector<double>(2 * (n - 1), 0.0)};
  BoundaryCovector negative_ray{1.0, std::vector<double>(2 * (n - 1), 0.0)};
  double on_ray = 0, off_ray = 0;
  for (Chirality c : chis) {
    on_ray = std::max(on_ray, max_abs(comparison_symbol0(c, ray).matrix));
    off_ray = std::max(off_ray, max_abs(Mat(comparison_symbol0(c, negative_ray).matrix - id)));
  }

  const double tol = 1e-12;
  std::vector<CheckRecord> out;
  out.push_back(record("d1_factorization", "d1^odd d1^even = |xi|^2/2 Id", fact <= tol, fact, {{"samples", samples}}));
  out.push_back(record("sd_self_adjoint", "sd(xi'') is self adjoint", sd_adj <= tol, sd_adj));
  out.push_back(record("sd_square", "sd(xi'')^2 = |xi''|^2 Id", sd_sq <= tol, sd_sq));
  out.push_back(record("calderon0_idempotent", "order 0 Calderon symbols are projections", idem <= tol, idem));
  out.push_back(record("calderon0_complementary", "p0+ + p0- = Id", compl_ <= tol, compl_));
  out.push_back(record("calderon0_homogeneous", "order 0 homogeneity of p0+", homog <= tol, homog));
  out.push_back(record("calderon0_block_form", "p0+ block form through order 0", blocks <= tol, blocks));
  out.push_back(record("calderon0_residue", "residue of q_-1 composed with the boundary isomorphism", residue0 <= 1e-10,
                       residue0, {{"contour_points", kContourPoints}}));
  out.push_back(record("comparison_symbol_form", "R p0+ + (I - R)(I - p0+) with the classical R", cmp_formula <= tol,
                       cmp_formula));
  out.push_back(record("comparison_symbol_singular_values",
                       "singular values of the comparison symbol equal sqrt((|xi'| + xi_{n+1})/(2|xi'|))", cmp_sv <= tol,
                       cmp_sv));
  out.push_back(record("comparison_symbol_contact_ray", "comparison symbol vanishes on the positive contact ray",
                       on_ray <= tol && off_ray <= tol, std::max(on_ray, off_ray)));

  // Residue integrals of the order -2 correction.
  double trace_term = 0, contact_diag = 0, contact_full = 0, minus1 = 0;
  for (int s = 0; s < contour_samples; ++s) {
    const bool kahler = s == 0;
    const HessianData general = kahler ? HessianData::kahler(n) : random_hessian(rng, n, false);
    const HessianData adapted = kahler ? HessianData::kahler(n) : random_hessian(rng, n, true);
    const BoundaryCovector xp = random_boundary(rng, n);
    const double r = xp.norm();
    const std::vector<cplx> poles = {cplx(0, r), cplx(0, -r)};
    const double length = 0.2 + 3.0 * rng.uniform();
    for (Chirality c : chis)
      for (Side side : {Side::plus, Side::minus}) {
        const Mat q = contour_integral(
            [&](cplx z) {
              const cplx n2 = z * z + r * r;
              return Mat(2.0 * cplx(0, 1) * z * general.alpha * general.A.trace() * d1_at(c, z, xp) / (n2 * n2));
            },
            side, xp, poles);
        trace_term = std::max(trace_term, rel_err(q, contour_closed_form_trace_term(c, xp, general)));

        BoundaryCovector line{side == Side::plus ? -length : length, std::vector<double>(2 * (n - 1), 0.0)};
        const std::vector<cplx> line_poles = {cplx(0, length), cplx(0, -length)};
        auto contour_of = [&](const HessianData& h, Chirality chi) {
          return contour_integral([&](cplx z) { return q_symbol_at(SymbolOrder::minus2_contact, chi, z, line, h); },
                                  side, line, line_poles);
        };
        const Mat qg = contour_of(general, c);
        const Mat cg = contour_closed_form_contact(c, line, general);
        contact_diag = std::max(contact_diag, rel_err(parity_diagonal_part(qg, half), parity_diagonal_part(cg, half)));
        const Mat qa = contour_of(adapted, c);
        contact_full = std::max(contact_full, rel_err(qa, contour_closed_form_contact(c, line, adapted)));
        if (adapted.beta() != 0.0) {
          const Mat via_contour = contour_of(adapted, opposite(c)) * boundary_isomorphism(c, side, n).matrix;
          minus1 = std::max(minus1, rel_err(via_contour, calderon_symbol_minus1(c, side, line, adapted).matrix));
        }
      }
  }
  const double qtol = 1e-8;
  out.push_back(record("contour_trace_term", "residue integral of 2 i xi_1 alpha TrA d1/|xi|^4", trace_term <= qtol,
                       trace_term, {{"instances", contour_samples}}));
  out.push_back(record("contour_contact_line", "residue integral of q_-2^cA on the contact line (diagonal blocks)",
                       contact_diag <= qtol, contact_diag));
  out.push_back(record("contour_contact_line_adapted",
                       "residue integral of q_-2^cA on the contact line, contact-adapted Hessian", contact_full <= qtol,
                       contact_full));
  out.push_back(record("calderon_minus1", "order -1 Calderon symbol along the contact line", minus1 <= qtol, minus1));
  return out;
}

// ---------------------------------------------------------------- model operators

const char* chirality_name(Chirality c) { return c == Chirality::even ? "even" : "odd"; }

std::vector<CheckRecord> model_invert(const Params& p, std::uint64_t seed) {
  ModelConfig cfg;
  cfg.n = p.get_int("n", 2);
  cfg.alpha = p.get_double("alpha", 1.0);
  if (p.has("beta")) cfg.beta = p.get_double("beta", 0.0);
  cfg.cutoff = p.get_int("cutoff", 12);
  cfg.guard = p.get_int("guard", 2);
  cfg.theta = p.get_double("theta", 0.0);
  cfg.tol = p.get_double("tol", 1e-9);
  if (p.has("target")) {
    const json& t = p.raw("target");
    if (!t.is_array()) throw UsageError("target must be an array of oscillator levels");
    OscillatorMultiIndex k;
    for (const auto& v : t) {
      if (!v.is_number_integer() || v.get<int>() < 0) throw UsageError("target levels must be non-negative integers");
      k.levels.push_back(v.get<int>());
    }
    cfg.target = GradedBasisIndex{k, FormMultiIndex{}};
  }
  const int samples = p.get_int("samples", 100);
  if (samples < 1) throw UsageError("--samples must be positive");
  const std::string which = p.get_string("chirality", "both");
  std::vector<Chirality> chis;
  if (which == "both" || which == "even") chis.push_back(Chirality::even);
  if (which == "both" || which == "odd") chis.push_back(Chirality::odd);
  if (chis.empty()) throw UsageError("--chirality must be even, odd or both");
  cfg.validate();

  std::vector<CheckRecord> out;
  Rng rng(seed);
  const GradedBasis basis(cfg.fock());
  const std::vector<int> guard = model_guard_indices(cfg);
  for (Chirality c : chis) {
    const std::string prefix = std::string(chirality_name(c)) + ".";
    const CertificationReport rep = certify_invertibility(c, cfg, rng.next_u64(), samples);
    out.push_back(record(prefix + "invertibility", "the comparison model is invertible on the guard subspace",
                         rep.sigma_min > rep.sigma_floor, 0.0,
                         {{"sigma_min", fp(rep.sigma_min)},
                          {"sigma_max", fp(rep.sigma_max)},
                          {"sigma_floor", fp(rep.sigma_floor)},
                          {"index", rep.index}}));
    const double residual = std::max({rep.left_residual, rep.right_residual, rep.rhs_residual});
    out.push_back(record(prefix + "inverse_residual", "explicit inverse of the comparison model",
                         residual <= cfg.tol, residual,
                         {{"left", fp(rep.left_residual)},
                          {"right", fp(rep.right_residual)},
                          {"random_rhs", fp(rep.rhs_residual)},
                          {"samples", rep.rhs_samples}}));
    out.push_back(record(prefix + "deformation_rank",
                         "deformed minus undeformed inverse has finite-rank blocks and a zero (2,2) block",
                         rep.ranks.pass, rep.ranks.block22_max,
                         {{"ranks", rep.ranks.ranks}, {"threshold", fp(rep.ranks.threshold)}}));
    const ModelInverse inv(c, cfg);
    const double b22 = max_abs(compress(inv.matrix(), sector_indices(basis, Parity::odd), sector_indices(basis, Parity::odd)));
    out.push_back(record(prefix + "inverse_block22", "the (2,2) block of the inverse vanishes", b22 == 0.0, b22,
                         {{"parametrix_orders", json::array({json::array({0, 1}), json::array({1, 1})})}}));
    const double assembly = block_distance(build_comparison_model(c, cfg), assemble_comparison(c, cfg));
    out.push_back(record(prefix + "comparison_assembly", "T = R P + (I - R)(I - P) at principal level",
                         assembly <= 1e-12, assembly));
    const double sum = block_distance(principal_sum(build_calderon_model(c, false, cfg), build_calderon_model(c, true, cfg)),
                                      block_identity(cfg.fock()));
    out.push_back(record(prefix + "calderon_sum", "P + (I - P) = Id at principal level", sum <= 1e-12, sum));
  }

  ModelConfig flat = cfg;
  flat.theta = 0.0;
  ModelConfig flipped = flat;
  flipped.beta = -cfg.beta_value();
  const SpMat te = compress(build_comparison_model(Chirality::even, flat).full().matrix(), guard, guard);
  const SpMat to = compress(build_comparison_model(Chirality::odd, flipped).full().matrix(), guard, guard);
  const double adj = max_abs(SpMat(SpMat(te.adjoint()) - to));
  out.push_back(record("adjoint_relation", "T^even(alpha, beta)* = T^odd(alpha, -beta) for the vacuum projector",
                       adj <= 1e-12, adj));
  return out;
}

// ---------------------------------------------------------------- relative index

Projector random_projector(Rng& rng, int dim, int rank) {
  return rng.uniform() < 0.5 ? random_orthogonal_projector(rng, dim, rank) : random_oblique_projector(rng, dim, rank);
}

// P and R spanned by overlapping runs of columns of one random unitary, so
// that RP has both a kernel and a cokernel.
std::pair<Projector, Projector> aligned_pair(Rng& rng, int dim) {
  Eigen::HouseholderQR<Mat> qr(rng.complex_gaussian(dim, dim));
  const Mat q = qr.householderQ() * Mat::Identity(dim, dim);
  const int a = static_cast<int>(rng.uniform_int(1, dim));
  const int b = static_cast<int>(rng.uniform_int(1, dim));
  const int overlap = static_cast<int>(rng.uniform_int(std::max(0, a + b - dim), std::min(a, b)));
  const Mat qp = q.leftCols(a), qr_cols = q.middleCols(a - overlap, b);
  return {Projector(Mat(qp * qp.adjoint()), 1e-11), Projector(Mat(qr_cols * qr_cols.adjoint()), 1e-11)};
}

std::vector<CheckRecord> relindex(const Params& p, std::uint64_t seed) {
  std::vector<CheckRecord> out;
  if (p.has("p") || p.has("r")) {
    if (!p.has("p") || !p.has("r")) throw UsageError("relindex needs both p and r matrices");
    const Projector pp(matrix_from_json(p.raw("p")), 1e-10), rr(matrix_from_json(p.raw("r")), 1e-10);
    const KernelIndex k = relative_index_kernel(pp, rr);
    const TraceIndex t = relative_index_trace(comparison_operator(pp, rr));
    const int oracle = pp.rank() - rr.rank();
    out.push_back(record("relative_index", "Rind(P, R) by kernels, trace formula and ranks",
                         k.index == oracle && t.index == oracle, std::abs(t.raw - oracle),
                         {{"kernel", k.index},
                          {"trace", t.index},
                          {"trace_raw", fp(t.raw)},
                          {"rank_difference", oracle},
                          {"kernel_dim", k.kernel},
                          {"cokernel_dim", k.cokernel},
                          {"degenerate", k.degenerate}}));
    return out;
  }
  const int pairs = p.get_int("pairs", 200);
  const int max_dim = p.get_int("max-dim", 40);
  const int triples = p.get_int("triples", 50);
  if (pairs < 1 || triples < 0 || max_dim < 2) throw UsageError("invalid relindex sizes");
  Rng rng(seed);

  int mismatches = 0, antisym_fail = 0, perturb_fail = 0, zero_fail = 0, degenerate = 0, diagnostics = 0;
  double trace_dev = 0.0, weighted_dev = 0.0;
  for (int i = 0; i < pairs; ++i) {
    const int dim = static_cast<int>(rng.uniform_int(2, max_dim));
    const bool aligned = i % 4 == 3;
    const auto [pp, rr] = aligned ? aligned_pair(rng, dim)
                                  : std::pair{random_projector(rng, dim, static_cast<int>(rng.uniform_int(0, dim))),
                                              random_projector(rng, dim, static_cast<int>(rng.uniform_int(0, dim)))};
    try {
      const int oracle = pp.rank() - rr.rank();
      const KernelIndex k = relative_index_kernel(pp, rr);
      const ProjectorPair pair = comparison_operator(pp, rr);
      const TraceIndex t = relative_index_trace(pair);
      trace_dev = std::max(trace_dev, std::abs(t.raw - oracle));
      if (k.degenerate) ++degenerate;
      if (k.index != oracle || t.index != oracle) ++mismatches;
      if (relative_index_kernel(pp.complement(), rr.complement()).index != -k.index) ++antisym_fail;
      const int rank = static_cast<int>(rng.uniform_int(1, 3));
      const ProjectorPair perturbed = comparison_operator(pp, rr, random_finite_rank(rng, dim, rank));
      if (relative_index_trace(perturbed).index != t.index) ++perturb_fail;
      if (comparison_index(perturbed) != 0) ++zero_fail;
      std::vector<double> w;
      for (int j = 0; j < dim; ++j) w.push_back(1.0 + 4.0 * rng.uniform());
      const WeightedScale scale(w);
      const Mat pk2p = pp.matrix() * perturbed.k2 * pp.matrix();
      weighted_dev = std::max(weighted_dev, std::abs(scale.weighted_trace(pk2p) - pk2p.trace()) /
                                                (1.0 + std::abs(pk2p.trace())));
    } catch (const NumericalDiagnostic&) {
      ++diagnostics;
    }
  }
  out.push_back(record("triple_agreement", "kernel index = trace-formula index = rank P - rank R",
                       mismatches == 0 && diagnostics == 0, trace_dev,
                       {{"pairs", pairs}, {"mismatches", mismatches}, {"degenerate", degenerate},
                        {"diagnostics", diagnostics}}));
  out.push_back(record("antisymmetry", "Rind(P, R) = -Rind(I - P, I - R)", antisym_fail == 0, 0.0,
                       {{"failures", antisym_fail}}));
  out.push_back(record("parametrix_independence", "trace formula is independent of the parametrix",
                       perturb_fail == 0, 0.0, {{"failures", perturb_fail}}));
  out.push_back(record("comparison_index_zero", "Tr K2 - Tr K1 = 0 for the square comparison operator",
                       zero_fail == 0, 0.0, {{"failures", zero_fail}}));
  out.push_back(record("weighted_trace", "trace is unchanged by the weighted-scale similarity", weighted_dev <= 1e-9,
                       weighted_dev));

  int log_fail = 0, log_diag = 0;
  for (int i = 0; i < triples; ++i) {
    const int dim = static_cast<int>(rng.uniform_int(2, max_dim));
    const Projector a = random_projector(rng, dim, static_cast<int>(rng.uniform_int(0, dim)));
    const Projector b = random_projector(rng, dim, static_cast<int>(rng.uniform_int(0, dim)));
    const Projector c = random_projector(rng, dim, static_cast<int>(rng.uniform_int(0, dim)));
    try {
      const LogarithmicReport rep = logarithmic_property(a, b, c);
      if (!rep.holds || rep.chain != a.rank() - c.rank()) ++log_fail;
    } catch (const NumericalDiagnostic&) {
      ++log_diag;
    }
  }
  out.push_back(record("logarithmic_property", "Ind(R Q P) = Rind(P, Q) + Rind(Q, R)", log_fail == 0 && log_diag == 0,
                       0.0, {{"triples", triples}, {"failures", log_fail}, {"diagnostics", log_diag}}));
  return out;
}

std::vector<CheckRecord> toeplitz(const Params& p, std::uint64_t) {
  const int window = p.get_int("window", 64);
  std::vector<int> ks;
  if (p.has("ks")) {
    for (const auto& v : p.raw("ks")) {
      if (!v.is_number_integer()) throw UsageError("ks must be integers");
      ks.push_back(v.get<int>());
    }
  } else {
    ks.push_back(p.get_int("k", 3));
  }
  std::vector<CheckRecord> out;
  for (int k : ks) {
    const ToeplitzReport rep = toeplitz_winding(window, k);
    char name[64];
    std::snprintf(name, sizeof name, "winding_%+04d", k);
    out.push_back(record(name, "Toeplitz index equals the winding number", rep.index == k, std::abs(rep.index - k),
                         {{"window", window}, {"k", k}, {"value", rep.index}, {"rank_s", rep.rank_s},
                          {"rank_r", rep.rank_r}}));
  }
  return out;
}

// ---------------------------------------------------------------- topology

FillingDescriptor descriptor_from_json(const json& j, const char* what) {
  if (!j.is_object()) throw UsageError(std::string(what) + " must be a JSON object");
  static const std::set<std::string> allowed = {"signature", "euler", "h01", "h02", "stein", "chi_prime", "complex_dim"};
  FillingDescriptor d;
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw UsageError(std::string(what) + ": unknown field '" + key + "'");
    if (key == "stein") {
      if (!value.is_boolean()) throw UsageError(std::string(what) + ".stein must be boolean");
      d.stein = value.get<bool>();
      continue;
    }
    if (!value.is_number_integer()) throw UsageError(std::string(what) + "." + key + " must be an integer");
    const i64 v = value.get<i64>();
    if (key == "signature") d.signature = v;
    if (key == "euler") d.euler = v;
    if (key == "h01") d.h01 = v;
    if (key == "h02") d.h02 = v;
    if (key == "chi_prime") d.chi_prime = v;
    if (key == "complex_dim") d.complex_dim = static_cast<int>(v);
  }
  if (!j.contains("signature") || !j.contains("euler"))
    throw UsageError(std::string(what) + " needs signature and euler");
  d.validate();
  return d;
}

CheckRecord value_record(std::string name, std::string anchor, i64 value, json details = json::object()) {
  details["value"] = value;
  return {std::move(name), std::move(anchor), "pass", 0.0, std::move(details)};
}

void append_spinc(const Params& p, std::vector<CheckRecord>& out) {
  if (p.has("spinc")) {
    const json& s = p.raw("spinc");
    if (!s.is_object()) throw UsageError("spinc must be a JSON object");
    SpinCNumbers nums;
    for (const auto& [key, value] : s.items()) {
      if (!value.is_number_integer()) throw UsageError("spinc." + key + " must be an integer");
      if (key == "c1_squared") nums.c1_squared = value.get<i64>();
      else if (key == "c2") nums.c2 = value.get<i64>();
      else if (key == "signature") nums.signature = value.get<i64>();
      else if (key == "euler") nums.euler = value.get<i64>();
      else throw UsageError("spinc: unknown field '" + key + "'");
    }
    std::optional<i64> a, b;
    if (nums.c1_squared && nums.signature) {
      a = ind_from_c1(nums);
      out.push_back(value_record("ind_from_c1", "(c1^2 - sign)/8", *a));
    }
    if (nums.c2 && nums.signature && nums.euler) {
      b = ind_from_c2(nums);
      out.push_back(value_record("ind_from_c2", "(2 c2 + sign + chi)/4", *b));
    }
    if (a && b)
      out.push_back(record("ind_c1_c2_agree", "both characteristic-number formulas agree", *a == *b,
                           static_cast<double>(std::abs(*a - *b))));
  }
}

std::vector<CheckRecord> topo(const Params& p, std::uint64_t) {
  if (!p.has("x0")) throw UsageError("topo needs at least the descriptor x0");
  const FillingDescriptor x0 = descriptor_from_json(p.raw("x0"), "x0");
  std::vector<CheckRecord> out;
  out.push_back(value_record("chi_prime_x0", "holomorphic Euler characteristic of X0", x0.chi_prime_value()));
  if (!p.has("x1")) {
    out.push_back(value_record("seiberg_witten_dim_reversed", "d_SW of the reversed double equals -chi[X0]",
                               seiberg_witten_dim_reversed(x0.euler)));
    append_spinc(p, out);
    return out;
  }
  const FillingDescriptor x1 = descriptor_from_json(p.raw("x1"), "x1");
  out.push_back(value_record("chi_prime_x1", "holomorphic Euler characteristic of X1", x1.chi_prime_value()));
  const i64 glued = glued_double_index(x0, x1);
  out.push_back(value_record("glued_double_index", "(sign0 - sign1 + chi0 - chi1)/4", glued));
  out.push_back(value_record("rind_3d", "h01(X0) - h01(X1) + (sign0 - sign1 + chi0 - chi1)/4", rind_3d(x0, x1)));
  const i64 cdeg = p.has("cdeg") ? p.get_int("cdeg", 0) : 0;
  const i64 ind_glued = p.has("ind_glued") ? p.get_int("ind_glued", 0) : glued;
  out.push_back(value_record("rind_weinstein", "Ind(glued) - chi'(X0) + chi'(X1)",
                             rind_weinstein(ind_glued, x0, x1, cdeg),
                             {{"ind_glued", ind_glued}, {"cdeg", cdeg}}));
  const SpinCNumbers dbl = glued_double_numbers(x0, x1);
  const i64 sw = seiberg_witten_dim_from_numbers(dbl);
  out.push_back(record("seiberg_witten_dim", "d_SW of the glued double equals -chi[X1]", sw == seiberg_witten_dim(x1.euler),
                       static_cast<double>(std::abs(sw - seiberg_witten_dim(x1.euler))),
                       {{"value", seiberg_witten_dim(x1.euler)},
                        {"reversed", seiberg_witten_dim_reversed(x0.euler)},
                        {"from_characteristic_numbers", sw}}));
  append_spinc(p, out);
  return out;
}

using Suite = std::function<std::vector<CheckRecord>(const Params&, std::uint64_t)>;

struct SuiteSpec {
  Suite fn;
  std::set<std::string> params;
};

const std::map<std::string, SuiteSpec>& suites() {
  static const std::map<std::string, SuiteSpec> table = {
      {"verify-algebra", {verify_algebra, {"n", "cutoff", "guard"}}},
      {"verify-symbols", {verify_symbols, {"n", "samples", "contour-samples"}}},
      {"model-invert",
       {model_invert, {"n", "alpha", "beta", "cutoff", "guard", "theta", "tol", "samples", "chirality", "target"}}},
      {"relindex", {relindex, {"pairs", "max-dim", "triples", "p", "r"}}},
      {"toeplitz", {toeplitz, {"window", "k", "ks"}}},
      {"topo", {topo, {"x0", "x1", "spinc", "ind_glued", "cdeg"}}},
  };
  return table;
}

}  // namespace

Report run(const RunRequest& request) {
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  rep.request = request;
  auto finish = [&](int code, std::string message) {
    rep.exit_code = code;
    rep.error = std::move(message);
    rep.pass = code == kExitPass;
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
  };
  if (request.format != "json" && request.format != "text") return finish(kExitUsage, "format must be json or text");
  auto it = suites().find(request.subcommand);
  if (it == suites().end()) return finish(kExitUsage, "unknown subcommand '" + request.subcommand + "'");
  try {
    const Params params(request.params, it->second.params);
    rep.checks = it->second.fn(params, request.seed);
  } catch (const AdmissibilityError& e) {
    rep.checks.push_back({"admissibility", "input data must be admissible", "rejected", 0.0, {{"message", e.what()}}});
    if (const auto* iv = dynamic_cast<const IntegralityViolation*>(&e))
      rep.checks.back().details["residue"] = iv->residue(), rep.checks.back().details["modulus"] = iv->modulus();
    if (const auto* pf = dynamic_cast<const PairingFloorViolation*>(&e))
      rep.checks.back().details["pairing"] = fixed_precision(pf->pairing());
    return finish(kExitAdmissibility, e.what());
  } catch (const InvalidArgument& e) {
    return finish(kExitUsage, e.what());
  } catch (const json::exception& e) {
    return finish(kExitUsage, e.what());
  } catch (const NumericalDiagnostic& e) {
    rep.checks.push_back({"numerical_diagnostic", "numerical certification", "fail", 0.0, {{"message", e.what()}}});
    return finish(kExitCheckFailure, e.what());
  }
  std::sort(rep.checks.begin(), rep.checks.end(),
            [](const CheckRecord& a, const CheckRecord& b) { return a.name < b.name; });
  const bool all = std::all_of(rep.checks.begin(), rep.checks.end(),
                               [](const CheckRecord& c) { return c.status == "pass"; });
  return finish(all ? kExitPass : kExitCheckFailure, "");
}

json report_to_json(const Report& report) {
  json j;
  j["request"] = {{"subcommand", report.request.subcommand},
                  {"params", report.request.params},
                  {"seed", report.request.seed},
                  {"format", report.request.format}};
  json checks = json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name},
                      {"anchor", c.anchor},
                      {"status", c.status},
                      {"max_error", c.max_error},
                      {"details", c.details}});
  j["checks"] = checks;
  j["pass"] = report.pass;
  j["exit_code"] = report.exit_code;
  if (!report.error.empty()) j["error"] = report.error;
  if (report.request.timing) j["wall_time_s"] = fixed_precision(report.wall_seconds, 3);
  return j;
}

std::string render(const Report& report) {
  if (report.request.format == "json") return report_to_json(report).dump(2) + "\n";
  std::ostringstream os;
  os << report.request.subcommand << " (seed " << report.request.seed << ")\n";
  for (const auto& c : report.checks) {
    char err[32];
    std::snprintf(err, sizeof err, "%.3e", c.max_error);
    std::string status = c.status;
    std::transform(status.begin(), status.end(), status.begin(), ::toupper);
    os << "  " << status << "  " << c.name << "  max_error=" << err << "  [" << c.anchor << "]\n";
  }
  if (!report.error.empty()) os << "  error: " << report.error << "\n";
  char wall[32];
  std::snprintf(wall, sizeof wall, "%.3f", report.wall_seconds);
  os << (report.pass ? "PASS" : "FAIL") << " (exit " << report.exit_code << ", " << wall << " s)\n";
  return os.str();
}

}  // namespace spinc
