#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>

#include "catch_amalgamated.hpp"
#include "spinc/errors.hpp"
#include "spinc/rng.hpp"
#include "spinc/symbol_calculus.hpp"

using namespace spinc;

namespace {

using Gauss = boost::math::quadrature::gauss<double, 30>;

// (1/2pi) * integral over the real xi_1 line, with xi_1 = r tan t.  For
// integrands decaying like |xi_1|^-2 this equals both contour integrals: the
// only pole above the line is i r, the only one below is -i r.
Mat real_line_integral(const std::function<Mat(cplx)>& f, double r, int panels = 24) {
  const auto& x = Gauss::abscissa();
  const auto& w = Gauss::weights();
  const double lo = -std::numbers::pi / 2, h = std::numbers::pi / panels;
  Mat sum;
  auto add = [&](double t, double weight) {
    const double c = std::cos(t);
    Mat v = f(cplx(r * std::tan(t), 0.0)) * (weight * r / (c * c));
    if (sum.size() == 0)
      sum = v;
    else
      sum += v;
  };
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * h, half = 0.5 * h;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0) {
        add(mid, w[i] * half);
        continue;
      }
      add(mid + half * x[i], w[i] * half);
      add(mid - half * x[i], w[i] * half);
    }
  }
  return sum / (2.0 * std::numbers::pi);
}

BoundaryCovector random_xp(Rng& rng, int n) {
  BoundaryCovector xp;
  xp.xi_contact = rng.normal();
  for (int i = 0; i < 2 * (n - 1); ++i) xp.xi_perp.push_back(rng.normal());
  return xp;
}

HessianData random_hessian(Rng& rng, int n, bool adapted) {
  Mat g = rng.complex_gaussian(n, n);
  Mat a = 0.5 * (g + g.adjoint());
  if (adapted)
    for (int j = 1; j < n; ++j) a(0, j) = a(j, 0) = 0.0;
  Mat h = rng.complex_gaussian(n, n);
  return HessianData::from_complex(rng.uniform(0.5, 2.0), a, 0.5 * (h + h.transpose()));
}

double rel(const Mat& a, const Mat& b) { return max_abs(Mat(a - b)) / std::max(1e-300, max_abs(b)); }

}  // namespace

TEST_CASE("d1 factorizes |xi|^2 / 2", "[symbol]") {
  Rng rng(11);
  for (int n : {2, 3, 4}) {
    const Mat id = Mat::Identity(tangential_dim(n), tangential_dim(n));
    for (int s = 0; s < 50; ++s) {
      Covector xi{rng.normal(), random_xp(rng, n)};
      const double r2 = xi.norm() * xi.norm();
      const Mat de = d1(Chirality::even, xi).matrix, dodd = d1(Chirality::odd, xi).matrix;
      CHECK(max_abs(Mat(dodd * de - 0.5 * r2 * id)) <= 1e-12);
      // The order -1 parametrix inverts d1.
      const Mat q = q_symbol(SymbolOrder::minus1, Chirality::odd, xi, HessianData::kahler(n)).matrix;
      CHECK(max_abs(Mat(de * q - id)) <= 1e-12);
      const Mat s_mat = sd(xi.prime.xi_perp);
      double perp2 = 0;
      for (double v : xi.prime.xi_perp) perp2 += v * v;
      CHECK(max_abs(Mat(s_mat - s_mat.adjoint())) == 0.0);
      CHECK(max_abs(Mat(s_mat * s_mat - perp2 * id)) <= 1e-12);
    }
  }
}

TEST_CASE("d1 is linear in xi_1 with the stated derivative", "[symbol]") {
  Rng rng(12);
  for (Chirality c : {Chirality::even, Chirality::odd}) {
    const BoundaryCovector xp = random_xp(rng, 3);
    const Mat slope = d1_at(c, cplx(1.0), xp) - d1_at(c, cplx(0.0), xp);
    CHECK(max_abs(Mat(slope - d1_xi1_derivative(c, 3))) <= 1e-15);
    const Mat complex_point = d1_at(c, cplx(0.3, 0.7), xp);
    CHECK(max_abs(Mat(complex_point - d1_at(c, 0.0, xp) - cplx(0.3, 0.7) * slope)) <= 1e-15);
  }
}

TEST_CASE("boundary isomorphism scalars", "[symbol]") {
  for (int n : {2, 3}) {
    const int half = tangential_even_dim(n), dim = tangential_dim(n);
    const Mat iso = boundary_isomorphism(Chirality::even, Side::plus, n).matrix;
    // Tangential (even half for even chirality) gets 1/sqrt 2, normal -1/sqrt 2.
    CHECK(std::abs(iso(0, 0) - cplx(1 / std::sqrt(2.0))) <= 1e-15);
    CHECK(std::abs(iso(half, half) - cplx(-1 / std::sqrt(2.0))) <= 1e-15);
    for (Chirality c : {Chirality::even, Chirality::odd}) {
      const Mat plus = boundary_isomorphism(c, Side::plus, n).matrix;
      const Mat minus = boundary_isomorphism(c, Side::minus, n).matrix;
      CHECK(max_abs(Mat(plus * minus + 0.5 * Mat::Identity(dim, dim))) <= 1e-15);
    }
  }
}

TEST_CASE("order 0 Calderon symbols are complementary projections", "[symbol]") {
  Rng rng(13);
  for (int n : {2, 3}) {
    const int dim = tangential_dim(n), half = tangential_even_dim(n);
    const Mat id = Mat::Identity(dim, dim);
    for (int s = 0; s < 100; ++s) {
      const BoundaryCovector xp = random_xp(rng, n);
      for (Chirality c : {Chirality::even, Chirality::odd}) {
        const Mat p = calderon_symbol0(c, Side::plus, xp).matrix;
        const Mat m = calderon_symbol0(c, Side::minus, xp).matrix;
        CHECK(max_abs(Mat(p * p - p)) <= 1e-12);
        CHECK(max_abs(Mat(p + m - id)) <= 1e-12);
      }
    }
    BoundaryCovector ray{-2.0, std::vector<double>(2 * (n - 1), 0.0)};
    Mat expected = Mat::Zero(dim, dim);
    expected.topLeftCorner(half, half).setIdentity();
    CHECK(max_abs(Mat(calderon_symbol0(Chirality::even, Side::plus, ray).matrix - expected)) <= 1e-15);
  }
}

TEST_CASE("comparison symbol degenerates exactly on the positive contact ray", "[symbol]") {
  Rng rng(14);
  for (int n : {2, 3}) {
    const int dim = tangential_dim(n);
    BoundaryCovector pos{-1.0, std::vector<double>(2 * (n - 1), 0.0)};
    BoundaryCovector neg{1.0, std::vector<double>(2 * (n - 1), 0.0)};
    for (Chirality c : {Chirality::even, Chirality::odd}) {
      CHECK(max_abs(comparison_symbol0(c, pos).matrix) == 0.0);
      CHECK(max_abs(Mat(comparison_symbol0(c, neg).matrix - Mat::Identity(dim, dim))) == 0.0);
      for (int s = 0; s < 20; ++s) {
        const BoundaryCovector xp = random_xp(rng, n);
        Eigen::JacobiSVD<Mat> svd(comparison_symbol0(c, xp).matrix);
        const double expected = std::sqrt((xp.norm() + xp.xi_contact) / (2 * xp.norm()));
        CHECK(std::abs(svd.singularValues().minCoeff() - expected) <= 1e-12);
        CHECK(svd.singularValues().minCoeff() > 0.0);
      }
    }
  }
}

TEST_CASE("order -2 correction is linear in A and homogeneous of degree -2", "[symbol]") {
  Rng rng(15);
  const int n = 3;
  HessianData zero = HessianData::kahler(n);
  zero.A.setZero();
  const HessianData h = random_hessian(rng, n, false);
  Covector xi{rng.normal(), random_xp(rng, n)};
  CHECK(max_abs(q_symbol(SymbolOrder::minus2_contact, Chirality::even, xi, zero).matrix) == 0.0);
  const double lambda = 2.7;
  Covector scaled = xi;
  scaled.xi1 *= lambda;
  scaled.prime.xi_contact *= lambda;
  for (double& v : scaled.prime.xi_perp) v *= lambda;
  const Mat q = q_symbol(SymbolOrder::minus2_contact, Chirality::odd, xi, h).matrix;
  const Mat qs = q_symbol(SymbolOrder::minus2_contact, Chirality::odd, scaled, h).matrix;
  CHECK(rel(Mat(qs * lambda * lambda), q) <= 1e-12);
}

TEST_CASE("Kahler Hessian has beta = n - 1", "[symbol]") {
  for (int n : {2, 3, 4}) {
    CHECK(HessianData::kahler(n).beta() == n - 1);
    CHECK_NOTHROW(HessianData::kahler(n).validate());
  }
  HessianData bad = HessianData::kahler(2);
  bad.A(0, 1) = 1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("scalar residue check", "[symbol][contour]") {
  // (1/2pi) of the contour of 2 i xi_1^2 / |xi|^4 around i r is +i/(2r).
  const double r = 1.7;
  BoundaryCovector xp{r, {0.0, 0.0}};
  auto f = [&](cplx z) {
    const cplx d = z * z + r * r;
    Mat m(1, 1);
    m(0, 0) = 2.0 * cplx(0, 1) * z * z / (d * d);
    return m;
  };
  const cplx expected(0.0, 1.0 / (2 * r));
  CHECK(std::abs(contour_integral(f, Side::plus, xp)(0, 0) - expected) <= 1e-13);
  CHECK(std::abs(contour_integral(f, Side::minus, xp)(0, 0) - expected) <= 1e-13);
  CHECK(std::abs(real_line_integral(f, r)(0, 0) - expected) <= 1e-12);
}

TEST_CASE("trace-term contour agrees with the real-line oracle and the closed form", "[symbol][contour]") {
  Rng rng(16);
  for (int n : {2, 3}) {
    for (int s = 0; s < 5; ++s) {
      const HessianData h = s == 0 ? HessianData::kahler(n) : random_hessian(rng, n, false);
      const BoundaryCovector xp = random_xp(rng, n);
      const double r = xp.norm();
      for (Chirality c : {Chirality::even, Chirality::odd}) {
        auto f = [&](cplx z) {
          const cplx d = z * z + r * r;
          return Mat(2.0 * cplx(0, 1) * z * h.alpha * h.A.trace() * d1_at(c, z, xp) / (d * d));
        };
        const Mat oracle = real_line_integral(f, r);
        const Mat closed = contour_closed_form_trace_term(c, xp, h);
        CHECK(rel(oracle, closed) <= 1e-10);
        for (Side side : {Side::plus, Side::minus})
          CHECK(rel(contour_integral(f, side, xp, {cplx(0, r), cplx(0, -r)}), closed) <= 1e-10);
      }
    }
  }
}

TEST_CASE("contact-line contour of the order -2 correction", "[symbol][contour]") {
  Rng rng(17);
  for (int n : {2, 3}) {
    const int half = tangential_even_dim(n);
    for (int s = 0; s < 5; ++s) {
      const HessianData adapted = s == 0 ? HessianData::kahler(n) : random_hessian(rng, n, true);
      const HessianData general = random_hessian(rng, n, false);
      const double length = rng.uniform(0.3, 3.0);
      for (Side side : {Side::plus, Side::minus}) {
        BoundaryCovector line{side == Side::plus ? -length : length, std::vector<double>(2 * (n - 1), 0.0)};
        for (Chirality c : {Chirality::even, Chirality::odd}) {
          auto q_of = [&](const HessianData& h) {
            return [&, h](cplx z) { return q_symbol_at(SymbolOrder::minus2_contact, c, z, line, h); };
          };
          const Mat oracle = real_line_integral(q_of(adapted), length);
          CHECK(rel(oracle, contour_closed_form_contact(c, line, adapted)) <= 1e-10);
          CHECK(rel(contour_integral(q_of(adapted), side, line), oracle) <= 1e-10);

          Mat og = real_line_integral(q_of(general), length);
          Mat cg = contour_closed_form_contact(c, line, general);
          og.topRightCorner(half, half).setZero();
          og.bottomLeftCorner(half, half).setZero();
          cg.topRightCorner(half, half).setZero();
          cg.bottomLeftCorner(half, half).setZero();
          CHECK(rel(og, cg) <= 1e-10);
        }
      }
    }
  }
}

TEST_CASE("residue of q_-1 reproduces the order 0 Calderon symbol", "[symbol][contour]") {
  Rng rng(18);
  for (int n : {2, 3}) {
    for (int s = 0; s < 10; ++s) {
      const BoundaryCovector xp = random_xp(rng, n);
      const double r = xp.norm();
      for (Chirality c : {Chirality::even, Chirality::odd})
        for (Side side : {Side::plus, Side::minus}) {
          const Mat q = contour_integral(
              [&](cplx z) { return q_symbol_at(SymbolOrder::minus1, opposite(c), z, xp, HessianData::kahler(n)); },
              side, xp, {cplx(0, r), cplx(0, -r)});
          CHECK(max_abs(Mat(q * boundary_isomorphism(c, side, n).matrix - calderon_symbol0(c, side, xp).matrix)) <=
                1e-12);
        }
    }
  }
}

TEST_CASE("order -1 Calderon symbol on the contact line", "[symbol]") {
  Rng rng(19);
  const int n = 3;
  const HessianData h = random_hessian(rng, n, true);
  BoundaryCovector plus_line{-1.3, std::vector<double>(4, 0.0)};
  for (Chirality c : {Chirality::even, Chirality::odd}) {
    const Mat q = contour_integral(
        [&](cplx z) { return q_symbol_at(SymbolOrder::minus2_contact, opposite(c), z, plus_line, h); }, Side::plus,
        plus_line);
    CHECK(rel(Mat(q * boundary_isomorphism(c, Side::plus, n).matrix),
              calderon_symbol_minus1(c, Side::plus, plus_line, h).matrix) <= 1e-10);
  }
  CHECK_THROWS_AS(calderon_symbol_minus1(Chirality::even, Side::minus, plus_line, h), InvalidArgument);
  BoundaryCovector off{-1.0, {0.5, 0.0, 0.0, 0.0}};
  CHECK_THROWS_AS(calderon_symbol_minus1(Chirality::even, Side::plus, off, h), InvalidArgument);
}

TEST_CASE("poles on the contour are rejected", "[symbol][contour]") {
  BoundaryCovector xp{1.0, {0.0, 0.0}};
  auto f = [](cplx z) { return Mat::Constant(1, 1, 1.0 / (z - cplx(0.0, 1.5))); };
  CHECK_THROWS_AS(contour_integral(f, Side::plus, xp, {cplx(0.0, 1.5)}), PoleOnContour);
  auto g = [](cplx) { return Mat::Constant(1, 1, std::numeric_limits<double>::quiet_NaN()); };
  CHECK_THROWS_AS(contour_integral(g, Side::plus, xp), PoleOnContour);
}
