// Acceptance runner: one PASS/FAIL line per criterion, plus INFO lines.
// Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "spinc/cli_run.hpp"
#include "spinc/errors.hpp"
#include "spinc/fredholm_pairs.hpp"
#include "spinc/model_operators.hpp"
#include "spinc/spinor_model.hpp"
#include "spinc/symbol_calculus.hpp"
#include "spinc/topo_index.hpp"

using namespace spinc;

namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// ---- 1: operator identities

Outcome operator_identities() {
  double worst = 0.0, lemma = 0.0;
  for (int m : {1, 2, 3}) {
    FockSpaceConfig cfg{m, 16, 2};
    FockBasis b(cfg);
    const auto cols = oscillator_states_up_to(b, cfg.guarded_degree());
    const TruncatedOperator id = identity(cfg), h0 = harmonic_oscillator(cfg);
    TruncatedOperator lower = id * cplx(-m), upper = id * cplx(m);
    for (int j = 1; j <= m; ++j) {
      for (int k = 1; k <= m; ++k) {
        worst = std::max(worst, max_column_deviation(commutator(creation(cfg, j), annihilation(cfg, k)),
                                                     id * cplx(j == k ? -2.0 : 0.0), cols));
        worst = std::max(worst, max_column_deviation(commutator(creation(cfg, j), creation(cfg, k)), id * cplx(0.0), cols));
        worst = std::max(worst,
                         max_column_deviation(commutator(annihilation(cfg, j), annihilation(cfg, k)), id * cplx(0.0), cols));
      }
      lower = lower + compose(annihilation(cfg, j), creation(cfg, j));
      upper = upper + compose(creation(cfg, j), annihilation(cfg, j));
    }
    worst = std::max({worst, max_column_deviation(lower, h0, cols), max_column_deviation(upper, h0, cols)});

    GradedBasis gb(cfg);
    const auto gcols = graded_states_up_to(gb, cfg.guarded_degree());
    const TruncatedOperator d = dirac_plus(cfg);
    TruncatedOperator square = lift(upper - id * cplx(m));
    for (int q = 1; q <= m; ++q) square = square + degree_projection(cfg, q) * cplx(2.0 * q);
    worst = std::max(worst, max_column_deviation(compose(d, d), square, gcols));
    lemma = std::max(lemma, max_abs(compose(vacuum_szego(cfg), dirac_plus_odd(cfg)).matrix()));
  }
  return {worst <= 1e-12 && lemma == 0.0,
          "max identity error " + fmt("%.2e", worst) + ", Szego block on D+^odd " + fmt("%.1e", lemma)};
}

// ---- 2: model inverse formulas

Outcome model_inverse() {
  double residual = 0.0;
  int worst_rank = 0, runs = 0;
  bool ok = true;
  for (int m : {1, 2})
    for (auto [alpha, beta] : {std::pair{1.0, -1.0}, std::pair{0.7, 1.3}})
      for (double theta : {0.0, 0.3})
        for (Chirality c : {Chirality::even, Chirality::odd}) {
          ModelConfig cfg;
          cfg.n = m + 1;
          cfg.alpha = alpha;
          cfg.beta = beta < 0 ? m : beta;
          cfg.cutoff = 12;
          cfg.theta = theta;
          const CertificationReport rep = certify_invertibility(c, cfg, 1000 + runs, 100);
          ++runs;
          residual = std::max({residual, rep.rhs_residual, rep.left_residual, rep.right_residual});
          for (int k : rep.ranks.ranks) worst_rank = std::max(worst_rank, k);
          ok = ok && rep.pass && rep.ranks.block22_max == 0.0;
        }
  return {ok && residual <= 1e-9 && worst_rank <= 4,
          std::to_string(runs) + " configurations, max residual " + fmt("%.2e", residual) +
              ", max deformation rank " + std::to_string(worst_rank)};
}

// ---- 3: symbol identities

BoundaryCovector random_xp(Rng& rng, int n) {
  BoundaryCovector xp;
  xp.xi_contact = rng.normal();
  for (int i = 0; i < 2 * (n - 1); ++i) xp.xi_perp.push_back(rng.normal());
  return xp;
}

Outcome symbol_identities() {
  Rng rng(303);
  double worst = 0.0, min_ratio = 1.0;
  for (int n : {2, 3}) {
    const int dim = tangential_dim(n);
    const Mat id = Mat::Identity(dim, dim);
    for (int s = 0; s < 100; ++s) {
      Covector xi{rng.normal(), random_xp(rng, n)};
      const double r2 = xi.norm() * xi.norm();
      worst = std::max(worst, max_abs(Mat(d1(Chirality::odd, xi).matrix * d1(Chirality::even, xi).matrix - 0.5 * r2 * id)));
      const Mat s_mat = sd(xi.prime.xi_perp);
      worst = std::max(worst, max_abs(Mat(s_mat - s_mat.adjoint())));
      const BoundaryCovector& xp = xi.prime;
      for (Chirality c : {Chirality::even, Chirality::odd}) {
        const Mat p = calderon_symbol0(c, Side::plus, xp).matrix, q = calderon_symbol0(c, Side::minus, xp).matrix;
        worst = std::max({worst, max_abs(Mat(p * p - p)), max_abs(Mat(q * q - q)), max_abs(Mat(p + q - id))});
        Eigen::JacobiSVD<Mat> svd(comparison_symbol0(c, xp).matrix);
        const double expected = std::sqrt((xp.norm() + xp.xi_contact) / (2 * xp.norm()));
        worst = std::max(worst, std::abs(svd.singularValues().minCoeff() - expected));
        min_ratio = std::min(min_ratio, svd.singularValues().minCoeff() / expected);
      }
    }
    BoundaryCovector ray{-1.0, std::vector<double>(2 * (n - 1), 0.0)};
    for (Chirality c : {Chirality::even, Chirality::odd})
      worst = std::max(worst, max_abs(comparison_symbol0(c, ray).matrix));
  }
  return {worst <= 1e-12, "max error " + fmt("%.2e", worst) + " over 200 covectors, n in {2,3}"};
}

// ---- 4: contour lemmas

HessianData random_hessian(Rng& rng, int n, bool adapted) {
  Mat g = rng.complex_gaussian(n, n);
  Mat a = 0.5 * (g + g.adjoint());
  if (adapted)
    for (int j = 1; j < n; ++j) a(0, j) = a(j, 0) = 0.0;
  Mat h = rng.complex_gaussian(n, n);
  return HessianData::from_complex(rng.uniform(0.5, 2.0), a, 0.5 * (h + h.transpose()));
}

double rel(const Mat& a, const Mat& b) { return max_abs(Mat(a - b)) / std::max(1e-300, max_abs(b)); }

// Ratio z with a = z b, least squares.
cplx ratio(const Mat& a, const Mat& b) {
  const cplx num = (b.adjoint() * a).trace();
  return num / (b.adjoint() * b).trace();
}

Outcome contour_lemmas(std::vector<std::string>& info) {
  Rng rng(404);
  double trace_err = 0.0, contact_err = 0.0;
  cplx trace_factor = 0.0, contact_factor = 0.0;
  int instances = 0;
  for (int s = 0; s < 20; ++s) {
    const int n = 2 + s % 2;
    const bool kahler = s < 2;
    const HessianData h = kahler ? HessianData::kahler(n) : random_hessian(rng, n, true);
    const BoundaryCovector xp = random_xp(rng, n);
    const double r = xp.norm();
    const double length = rng.uniform(0.3, 3.0);
    ++instances;
    for (Chirality c : {Chirality::even, Chirality::odd})
      for (Side side : {Side::plus, Side::minus}) {
        auto trace_term = [&](cplx z) {
          const cplx d = z * z + r * r;
          return Mat(2.0 * cplx(0, 1) * z * h.alpha * h.A.trace() * d1_at(c, z, xp) / (d * d));
        };
        const Mat qt = contour_integral(trace_term, side, xp, {cplx(0, r), cplx(0, -r)});
        trace_err = std::max(trace_err, rel(qt, contour_closed_form_trace_term(c, xp, h)));
        const Mat printed_t = cplx(0, -1) * h.alpha * h.A.trace() * d1_xi1_derivative(c, n) / (2 * r);
        trace_factor = ratio(qt, printed_t);

        BoundaryCovector line{side == Side::plus ? -length : length, std::vector<double>(2 * (n - 1), 0.0)};
        const Mat qc = contour_integral(
            [&](cplx z) { return q_symbol_at(SymbolOrder::minus2_contact, c, z, line, h); }, side, line,
            {cplx(0, length), cplx(0, -length)});
        contact_err = std::max(contact_err, rel(qc, contour_closed_form_contact(c, line, h)));
        // Printed: -alpha (a0_11 - TrA/2) d1' / |xi'| = alpha beta d1' / |xi'|.
        if (h.beta() != 0.0) {
          const Mat printed_c = h.alpha * h.beta() * d1_xi1_derivative(c, n) / length;
          contact_factor = ratio(qc, printed_c);
        }
      }
  }
  info.push_back("INFO 4 trace-term quadrature / printed closed form = " + fmt("%+.6f", trace_factor.real()) +
                 fmt(" %+.6fi", trace_factor.imag()));
  info.push_back("INFO 4 contact-line quadrature / printed closed form = " + fmt("%+.6f", contact_factor.real()) +
                 fmt(" %+.6fi", contact_factor.imag()));
  return {trace_err <= 1e-8 && contact_err <= 1e-8,
          std::to_string(instances) + " instances (2 Kahler), trace-term rel err " + fmt("%.2e", trace_err) +
              ", contact-line rel err " + fmt("%.2e", contact_err)};
}

// ---- 5: relative index

Outcome relative_index() {
  Rng rng(505);
  int pairs = 0, failures = 0, diagnostics = 0;
  for (int i = 0; i < 240; ++i) {
    const int dim = static_cast<int>(rng.uniform_int(2, 40));
    auto gen = [&] {
      const int rank = static_cast<int>(rng.uniform_int(0, dim));
      return rng.uniform() < 0.5 ? random_orthogonal_projector(rng, dim, rank)
                                 : random_oblique_projector(rng, dim, rank);
    };
    const Projector p = gen(), r = gen(), q = gen();
    ++pairs;
    try {
      const int oracle = p.rank() - r.rank();
      const int kernel = relative_index_kernel(p, r).index;
      const int trace = relative_index_trace(comparison_operator(p, r)).index;
      const int perturbed =
          relative_index_trace(comparison_operator(p, r, random_finite_rank(rng, dim, 1 + i % 3))).index;
      const int anti = relative_index_kernel(p.complement(), r.complement()).index;
      const LogarithmicReport log = logarithmic_property(p, q, r);
      if (kernel != oracle || trace != oracle || perturbed != oracle || anti != -oracle || !log.holds ||
          log.chain != oracle)
        ++failures;
    } catch (const NumericalDiagnostic&) {
      ++diagnostics;
    }
  }
  return {failures == 0 && diagnostics == 0,
          std::to_string(pairs) + " pairs (dims <= 40), " + std::to_string(failures) + " disagreements, " +
              std::to_string(diagnostics) + " diagnostics"};
}

// ---- 6: Toeplitz

Outcome toeplitz() {
  int wrong = 0;
  for (int k = -5; k <= 5; ++k)
    if (toeplitz_winding(64, k).index != k) ++wrong;
  return {wrong == 0, "window 64, k in [-5,5], " + std::to_string(wrong) + " mismatches"};
}

// ---- 7: Agranovich-Dynin

Outcome agranovich_dynin() {
  Rng rng(707);
  int wrong = 0;
  for (int i = 0; i < 50; ++i) {
    const int dim = static_cast<int>(rng.uniform_int(2, 12));
    auto gen = [&] {
      const int rank = static_cast<int>(rng.uniform_int(0, dim));
      return rng.uniform() < 0.5 ? random_orthogonal_projector(rng, dim, rank)
                                 : random_oblique_projector(rng, dim, rank);
    };
    const Projector s1 = gen(), s2 = gen();
    const AgranovichDyninReport rep = agranovich_dynin_shadow(s1, s2);
    if (!rep.holds || rep.lhs != s1.rank() - s2.rank()) ++wrong;
  }
  return {wrong == 0, "50 pairs, " + std::to_string(wrong) + " mismatches"};
}

// ---- 8: topological calculator

Outcome topology() {
  int bad = 0;
  auto expect = [&](bool ok) { bad += ok ? 0 : 1; };
  auto throws = [&](const std::function<void()>& f) {
    try {
      f();
      ++bad;
    } catch (const AdmissibilityError&) {
    }
  };
  FillingDescriptor x;
  x.signature = 1;
  x.euler = 4;
  x.h01 = 1;
  expect(rind_3d(x, x) == 0);
  expect(seiberg_witten_dim(2) == -2 && seiberg_witten_dim(0) == 0 && seiberg_witten_dim_reversed(4) == -4);
  const std::array<std::pair<i64, i64>, 3> coball = {{{2, 1}, {0, 0}, {-2, -1}}};
  for (auto [e, s] : coball) {
    const FillingDescriptor d = coball_descriptor(e);
    expect(d.euler == e && d.signature == s && d.stein && d.h01 == 0 && d.chi_prime_value() == 0);
  }
  for (i64 e : {2, 0, -2, -4, -10}) expect(fio_index_surfaces(e, e) == 0);
  throws([] { fio_index_surfaces(2, 0); });
  Rng rng(808);
  for (int i = 0; i < 1000; ++i) {
    SpinCNumbers s;
    const i64 sign = rng.uniform_int(-40, 40);
    s.signature = sign;
    s.euler = 4 * rng.uniform_int(-20, 20) - sign;
    s.c1_squared = 8 * rng.uniform_int(-30, 30) + sign;
    s.c2 = (*s.c1_squared - 3 * sign - 2 * *s.euler) / 4;
    expect(s.consistent() == true && ind_from_c1(s) == ind_from_c2(s));
  }
  // Documented counterexamples for the integrality gates.
  FillingDescriptor a, b;
  a.signature = 1;
  a.euler = 2;
  throws([&] { rind_3d(a, b); });
  throws([] {
    SpinCNumbers s;
    s.c1_squared = 10;
    s.signature = 1;
    ind_from_c1(s);
  });
  throws([] {
    SpinCNumbers s;
    s.c2 = 1;
    s.signature = 0;
    s.euler = 1;
    ind_from_c2(s);
  });
  return {bad == 0, std::to_string(bad) + " failed expectations"};
}

// ---- 9: determinism

std::vector<RunRequest> cli_suite() {
  using nlohmann::json;
  const json x0 = {{"signature", 1}, {"euler", 4}, {"stein", true}};
  const json x1 = {{"signature", -1}, {"euler", 2}, {"stein", true}};
  return {
      {"verify-algebra", {{"n", 3}, {"cutoff", 16}}, 7, "json", false},
      {"verify-symbols", {{"n", 3}}, 7, "json", false},
      {"model-invert", {{"n", 2}, {"theta", 0.3}}, 7, "json", false},
      {"model-invert", {{"n", 3}, {"alpha", 0.7}, {"beta", 1.3}}, 7, "json", false},
      {"relindex", json::object(), 7, "json", false},
      {"toeplitz", {{"ks", {-5, -3, 0, 2, 5}}}, 7, "json", false},
      {"topo", {{"x0", x0}, {"x1", x1}}, 7, "json", false},
  };
}

Outcome determinism() {
  int differing = 0, failing = 0;
  for (const RunRequest& req : cli_suite()) {
    const Report first = run(req);
    const Report second = run(req);
    if (render(first) != render(second)) ++differing;
    if (!first.pass) ++failing;
  }
  return {differing == 0, std::to_string(cli_suite().size()) + " subcommand runs, " + std::to_string(differing) +
                              " differing reports, " + std::to_string(failing) + " failing reports"};
}

}  // namespace

int main() {
  std::vector<std::string> info;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"operator identities", operator_identities},
      {"model inverse formulas", model_inverse},
      {"symbol identities", symbol_identities},
      {"contour lemmas", [&] { return contour_lemmas(info); }},
      {"relative-index triple agreement", relative_index},
      {"Toeplitz winding", toeplitz},
      {"Agranovich-Dynin shadow", agranovich_dynin},
      {"topological calculator", topology},
      {"determinism", determinism},
  };
  // Runtime budgets in seconds; 0 means none.
  const double budgets[] = {10, 60, 0, 0, 30, 0, 0, 1, 0};
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = out.pass;
    if (budgets[i] > 0 && secs > budgets[i]) {
      pass = false;
      out.summary += ", over the " + fmt("%.0f", budgets[i]) + " s budget";
    }
    all = all && pass;
    std::printf("CRITERION %zu %s  %s: %s (%.2f s)\n", i + 1, pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                out.summary.c_str(), secs);
    std::fflush(stdout);
  }
  for (const auto& line : info) std::printf("%s\n", line.c_str());
  return all ? 0 : 1;
}
