#include <cmath>
#include <numbers>
#include <set>

#include "catch_amalgamated.hpp"
#include "spinc/errors.hpp"
#include "spinc/fock_core.hpp"

using namespace spinc;
using Catch::Matchers::WithinAbs;

namespace {

// Normalized Hermite functions by the three-term recursion.
std::vector<double> hermite_functions(int kmax, double w) {
  std::vector<double> h(kmax + 2);
  h[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * w * w);
  h[1] = std::sqrt(2.0) * w * h[0];
  for (int k = 1; k <= kmax; ++k)
    h[k + 1] = std::sqrt(2.0 / (k + 1)) * w * h[k] - std::sqrt(double(k) / (k + 1)) * h[k - 1];
  return h;
}

// Coefficient c with (w -/+ d/dw) h_k = c h_{k+/-1}, read off pointwise with a
// central difference for the derivative.
double ladder_coefficient(int k, bool raise) {
  const double step = 1e-5;
  double best = 0.0, weight = 0.0;
  for (double w : {-1.3, -0.4, 0.35, 0.9, 1.7}) {
    const auto h = hermite_functions(k + 1, w);
    const auto hp = hermite_functions(k + 1, w + step);
    const auto hm = hermite_functions(k + 1, w - step);
    const double dh = (hp[k] - hm[k]) / (2 * step);
    const double lhs = raise ? w * h[k] - dh : w * h[k] + dh;
    const double target = raise ? h[k + 1] : (k > 0 ? h[k - 1] : 0.0);
    if (std::abs(target) > 1e-3) {
      best += lhs / target * std::abs(target);
      weight += std::abs(target);
    } else if (!raise && k == 0) {
      CHECK(std::abs(lhs) < 1e-8);
    }
  }
  return weight > 0 ? best / weight : 0.0;
}

Vec basis_vector(const FockBasis& b, std::vector<int> levels) {
  Vec v = Vec::Zero(b.size());
  v(*b.index_of({std::move(levels)})) = 1.0;
  return v;
}

}  // namespace

TEST_CASE("ladder operators agree with the Hermite-function oracle", "[fock]") {
  FockSpaceConfig cfg{1, 12, 2};
  FockBasis b(cfg);
  const TruncatedOperator c = creation(cfg, 1), a = annihilation(cfg, 1);
  for (int k = 0; k < 11; ++k) {
    const double up = ladder_coefficient(k, true);
    CHECK_THAT(c.matrix().coeff(*b.index_of({{k + 1}}), *b.index_of({{k}})).real(), WithinAbs(up, 1e-6));
    if (k > 0) {
      const double down = ladder_coefficient(k, false);
      CHECK_THAT(a.matrix().coeff(*b.index_of({{k - 1}}), *b.index_of({{k}})).real(), WithinAbs(down, 1e-6));
    }
  }
}

TEST_CASE("creation on the vacuum and on the top shell", "[fock]") {
  FockSpaceConfig cfg{2, 6, 2};
  FockBasis b(cfg);
  const Vec out = creation(cfg, 1).apply(basis_vector(b, {0, 0}));
  CHECK_THAT(std::abs(out(*b.index_of({{1, 0}})) - std::sqrt(2.0)), WithinAbs(0.0, 1e-15));
  CHECK_THAT(out.norm(), WithinAbs(std::sqrt(2.0), 1e-15));
  CHECK(creation(cfg, 1).apply(basis_vector(b, {6, 0})).norm() == 0.0);
  CHECK(creation(cfg, 2).apply(basis_vector(b, {2, 4})).norm() == 0.0);
}

TEST_CASE("annihilation lowers with sqrt(2 k_j)", "[fock]") {
  FockSpaceConfig cfg{2, 8, 2};
  FockBasis b(cfg);
  CHECK(annihilation(cfg, 1).apply(basis_vector(b, {0, 0})).norm() == 0.0);
  const Vec out = annihilation(cfg, 2).apply(basis_vector(b, {1, 3}));
  CHECK_THAT(std::abs(out(*b.index_of({{1, 2}}))), WithinAbs(std::sqrt(6.0), 1e-15));
  CHECK_THAT(out.norm(), WithinAbs(std::sqrt(6.0), 1e-15));
}

TEST_CASE("canonical commutation relations below the top shell", "[fock]") {
  for (int m : {1, 2, 3}) {
    FockSpaceConfig cfg{m, 10, 2};
    FockBasis b(cfg);
    const auto below_top = oscillator_states_up_to(b, cfg.cutoff - 1);
    const TruncatedOperator id = identity(cfg);
    for (int j = 1; j <= m; ++j)
      for (int k = 1; k <= m; ++k) {
        const double expected = j == k ? -2.0 : 0.0;
        CHECK(max_column_deviation(commutator(creation(cfg, j), annihilation(cfg, k)), id * cplx(expected),
                                   below_top) <= 1e-12);
        // Both orders drop the same entries, so this holds on the whole space.
        CHECK(max_abs(commutator(creation(cfg, j), creation(cfg, k)).matrix()) == 0.0);
      }
  }
}

TEST_CASE("harmonic oscillator spectrum and the vacuum", "[fock]") {
  FockSpaceConfig cfg{3, 6, 2};
  FockBasis b(cfg);
  const TruncatedOperator h = harmonic_oscillator(cfg);
  CHECK(h.apply(basis_vector(b, {0, 0, 0}))(0) == cplx(3.0));
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(h.matrix().coeff(i, i).real() == 2 * b.state(i).degree() + 3);

  TruncatedOperator sum = identity(cfg) * cplx(-3.0);
  for (int j = 1; j <= 3; ++j) sum = sum + compose(annihilation(cfg, j), creation(cfg, j));
  CHECK(max_column_deviation(sum, h, oscillator_states_up_to(b, cfg.guarded_degree())) <= 1e-12);
}

TEST_CASE("basis is graded lexicographic and complete", "[fock]") {
  FockSpaceConfig cfg{3, 5, 1};
  FockBasis b(cfg);
  std::size_t expected = 0;
  for (int d = 0; d <= 5; ++d) expected += FockBasis::count_of_degree(3, d);
  // Brute-force count.
  std::size_t brute = 0;
  for (int i = 0; i <= 5; ++i)
    for (int j = 0; i + j <= 5; ++j)
      for (int k = 0; i + j + k <= 5; ++k) ++brute;
  CHECK(b.size() == brute);
  CHECK(expected == brute);
  for (std::size_t i = 1; i < b.size(); ++i) {
    const auto& prev = b.state(i - 1);
    const auto& cur = b.state(i);
    CHECK((prev.degree() < cur.degree() || (prev.degree() == cur.degree() && prev.levels > cur.levels)));
  }
  CHECK(b.state(b.vacuum_index()).degree() == 0);
  CHECK_FALSE(b.index_of({{6, 0, 0}}).has_value());
}

TEST_CASE("degree shifts compose", "[fock]") {
  FockSpaceConfig cfg{2, 6, 2};
  const auto c1 = creation(cfg, 1), a2 = annihilation(cfg, 2);
  CHECK(c1.degree_shift() == 1);
  CHECK(a2.degree_shift() == -1);
  CHECK(compose(c1, c1).degree_shift() == 2);
  CHECK(compose(c1, a2).degree_shift() == 0);
  CHECK(adjoint(c1).degree_shift() == -1);
  CHECK(commutator(c1, a2).degree_shift() == 0);
  CHECK_FALSE((c1 + a2).degree_shift().has_value());
  CHECK(harmonic_oscillator(cfg).degree_shift() == 0);
}

TEST_CASE("adjoint is an involution and identity is neutral", "[fock]") {
  FockSpaceConfig cfg{2, 6, 2};
  const auto op = compose(creation(cfg, 1), annihilation(cfg, 2)) + harmonic_oscillator(cfg) * cplx(0.0, 1.5);
  CHECK(max_abs((adjoint(adjoint(op)) - op).matrix()) == 0.0);
  CHECK(max_abs((compose(identity(cfg), op) - op).matrix()) == 0.0);
  CHECK(max_abs((adjoint(creation(cfg, 2)) - annihilation(cfg, 2)).matrix()) == 0.0);
}

TEST_CASE("configuration validation", "[fock]") {
  CHECK_THROWS_AS((FockSpaceConfig{0, 6, 2}.validate()), InvalidArgument);
  CHECK_THROWS_AS((FockSpaceConfig{2, 3, 2}.validate()), InvalidArgument);
  CHECK_THROWS_AS((FockSpaceConfig{2, 6, -1}.validate()), InvalidArgument);
  CHECK_NOTHROW((FockSpaceConfig{2, 4, 2}.validate()));
  CHECK_THROWS_AS(creation(FockSpaceConfig{2, 6, 2}, 3), InvalidArgument);
  FockSpaceConfig a{2, 6, 2}, b{2, 8, 2};
  CHECK_THROWS(compose(creation(a, 1), creation(b, 1)));
}
