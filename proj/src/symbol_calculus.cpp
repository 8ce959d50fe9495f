#include "spinc/symbol_calculus.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spinc/errors.hpp"
#include "spinc/spinor_model.hpp"

namespace spinc {

namespace {

constexpr cplx I(0.0, 1.0);
const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

void check_n(int n) {
  if (n < 2) throw InvalidArgument("symbol calculus needs complex dimension n >= 2");
}

void check_perp(const std::vector<double>& xi_perp) {
  if (xi_perp.empty() || xi_perp.size() % 2 != 0)
    throw InvalidArgument("xi'' must have even, positive length 2(n-1)");
}

double require_nonzero(const BoundaryCovector& xp) {
  check_perp(xp.xi_perp);
  const double r = xp.norm();
  if (!(r > 0.0)) throw InvalidArgument("boundary covector must be nonzero");
  return r;
}

// FormBasis positions, even-degree subsets first.
std::vector<int> parity_order(int m) {
  FormBasis forms(m);
  std::vector<int> order;
  for (int pass = 0; pass < 2; ++pass)
    for (std::size_t i = 0; i < forms.size(); ++i)
      if (forms.degree(i) % 2 == pass) order.push_back(static_cast<int>(i));
  return order;
}

Mat permuted(const SpMat& m, const std::vector<int>& order) {
  Mat dense(m);
  Mat out(dense.rows(), dense.cols());
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = 0; j < order.size(); ++j) out(i, j) = dense(order[i], order[j]);
  return out;
}

// diag(top * Id_even, bottom * Id_odd)
Mat parity_diagonal(int n, cplx top, cplx bottom) {
  const int dim = tangential_dim(n), half = tangential_even_dim(n);
  Mat out = Mat::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) out(i, i) = i < half ? top : bottom;
  return out;
}

}  // namespace

double BoundaryCovector::norm() const {
  double s = xi_contact * xi_contact;
  for (double v : xi_perp) s += v * v;
  return std::sqrt(s);
}

bool BoundaryCovector::on_contact_line() const {
  for (double v : xi_perp)
    if (v != 0.0) return false;
  return true;
}

double Covector::norm() const { return std::hypot(xi1, prime.norm()); }

Eigen::VectorXd Covector::full() const {
  check_perp(prime.xi_perp);
  const int n = prime.n(), m = n - 1;
  Eigen::VectorXd v(2 * n);
  v(0) = xi1;
  for (int k = 0; k < m; ++k) {
    v(1 + k) = prime.xi_perp[k];
    v(n + 1 + k) = prime.xi_perp[m + k];
  }
  v(n) = prime.xi_contact;
  return v;
}

void HessianData::validate() const {
  if (!(alpha > 0.0)) throw InvalidArgument("HessianData: alpha must be positive");
  if (A.rows() != A.cols() || A.rows() % 2 != 0 || A.rows() < 4)
    throw InvalidArgument("HessianData: A must be 2n x 2n with n >= 2");
  if (B.rows() != A.rows() || B.cols() != A.cols()) throw InvalidArgument("HessianData: B must match A");
  const int n = this->n();
  const double scale = std::max({1.0, A.cwiseAbs().maxCoeff(), B.cwiseAbs().maxCoeff()});
  const double tol = 1e-12 * scale;
  const Eigen::MatrixXd a0 = A.topLeftCorner(n, n), a1 = A.bottomLeftCorner(n, n);
  const Eigen::MatrixXd b0 = B.topLeftCorner(n, n), b1 = -B.bottomLeftCorner(n, n);
  bool ok = (A.bottomRightCorner(n, n) - a0).cwiseAbs().maxCoeff() <= tol &&
            (A.topRightCorner(n, n) + a1).cwiseAbs().maxCoeff() <= tol &&
            (a0 - a0.transpose()).cwiseAbs().maxCoeff() <= tol &&
            (a1 + a1.transpose()).cwiseAbs().maxCoeff() <= tol &&
            (B.topRightCorner(n, n) + b1).cwiseAbs().maxCoeff() <= tol &&
            (B.bottomRightCorner(n, n) + b0).cwiseAbs().maxCoeff() <= tol &&
            (b0 - b0.transpose()).cwiseAbs().maxCoeff() <= tol &&
            (b1 - b1.transpose()).cwiseAbs().maxCoeff() <= tol;
  if (!ok) throw InvalidArgument("HessianData: A or B lacks the required block symmetries");
}

HessianData HessianData::from_complex(double alpha, const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const auto n = a.rows();
  if (a.cols() != n || b.rows() != n || b.cols() != n) throw InvalidArgument("HessianData: a, b must be n x n");
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()))
    throw InvalidArgument("HessianData: a must be Hermitian");
  if ((b - b.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff()))
    throw InvalidArgument("HessianData: b must be symmetric");
  HessianData h;
  h.alpha = alpha;
  const Eigen::MatrixXd a0 = a.real(), a1 = a.imag(), b0 = b.real(), b1 = b.imag();
  h.A.resize(2 * n, 2 * n);
  h.A << a0, -a1, a1, a0;
  h.B.resize(2 * n, 2 * n);
  h.B << b0, -b1, -b1, -b0;
  h.validate();
  return h;
}

HessianData HessianData::kahler(int n) {
  check_n(n);
  return from_complex(1.0, Eigen::MatrixXcd::Identity(n, n), Eigen::MatrixXcd::Zero(n, n));
}

int tangential_dim(int n) {
  check_n(n);
  return 1 << (n - 1);
}

int tangential_even_dim(int n) { return tangential_dim(n) / 2; }

Mat tangential_wedge(int n, int j) {
  check_n(n);
  return permuted(form_wedge_matrix(n - 1, j), parity_order(n - 1));
}

Mat tangential_contract(int n, int j) { return tangential_wedge(n, j).adjoint(); }

Mat sd(const std::vector<double>& xi_perp) {
  check_perp(xi_perp);
  const int m = static_cast<int>(xi_perp.size()) / 2, n = m + 1;
  Mat out = Mat::Zero(tangential_dim(n), tangential_dim(n));
  for (int j = 1; j <= m; ++j) {
    const double x = xi_perp[j - 1], y = xi_perp[m + j - 1];
    const Mat eps = tangential_wedge(n, j);
    out += (I * x + y) * eps.adjoint() - (I * x - y) * eps;
  }
  return out;
}

Mat d1_at(Chirality c, cplx xi1, const BoundaryCovector& xp) {
  check_perp(xp.xi_perp);
  const int n = xp.n(), half = tangential_even_dim(n);
  const double x = xp.xi_contact;
  Mat s = sd(xp.xi_perp);
  Mat out;
  if (c == Chirality::even) {
    s.bottomLeftCorner(half, half) *= -1.0;
    out = parity_diagonal(n, I * xi1 - x, -(I * xi1 + x)) + s;
  } else {
    s.topRightCorner(half, half) *= -1.0;
    out = parity_diagonal(n, -(I * xi1 + x), I * xi1 - x) + s;
  }
  return kInvSqrt2 * out;
}

SymbolMatrix d1(Chirality c, const Covector& xi) { return {d1_at(c, xi.xi1, xi.prime), c}; }

Mat d1_xi1_derivative(Chirality c, int n) {
  return c == Chirality::even ? parity_diagonal(n, kInvSqrt2 * I, -kInvSqrt2 * I)
                              : parity_diagonal(n, -kInvSqrt2 * I, kInvSqrt2 * I);
}

SymbolMatrix boundary_isomorphism(Chirality c, Side s, int n) {
  // +1/sqrt2 on sigma^t, -1/sqrt2 on sigma^n for the plus side.
  const double t = s == Side::plus ? kInvSqrt2 : -kInvSqrt2;
  Mat m = c == Chirality::even ? parity_diagonal(n, t, -t) : parity_diagonal(n, -t, t);
  return {m, c};
}

SymbolMatrix calderon_symbol0(Chirality c, Side s, const BoundaryCovector& xp) {
  const double r = require_nonzero(xp);
  const cplx pole = s == Side::plus ? I * r : -I * r;
  Mat m = d1_at(opposite(c), pole, xp) / r * boundary_isomorphism(c, s, xp.n()).matrix;
  return {m, c};
}

SymbolMatrix comparison_symbol0(Chirality c, const BoundaryCovector& xp) {
  const double r = require_nonzero(xp);
  const int n = xp.n(), half = tangential_even_dim(n);
  const double diag = (r + xp.xi_contact) / (2.0 * r);
  Mat m = parity_diagonal(n, diag, diag);
  Mat s = sd(xp.xi_perp) / (2.0 * r);
  if (c == Chirality::even)
    s.topRightCorner(half, half) *= -1.0;
  else
    s.bottomLeftCorner(half, half) *= -1.0;
  return {m + s, c};
}

Mat q_symbol_at(SymbolOrder order, Chirality c, cplx xi1, const BoundaryCovector& xp, const HessianData& hess) {
  const double r = require_nonzero(xp);
  const cplx norm2 = xi1 * xi1 + r * r;
  const Mat d = d1_at(c, xi1, xp);
  if (order == SymbolOrder::minus1) return 2.0 * d / norm2;

  const int n = xp.n();
  if (hess.n() != n) throw InvalidArgument("HessianData dimension does not match the covector");
  Eigen::VectorXcd xi = Covector{0.0, xp}.full().cast<cplx>();
  xi(0) = xi1;
  const Eigen::VectorXcd a_xi = hess.A.cast<cplx>() * xi;
  const cplx a_xi_xi = (a_xi.array() * xi.array()).sum();

  // <A xi, d_xi d1>; d1 is linear, so its partial derivatives are d1 at the unit covectors.
  Mat pairing = a_xi(0) * d1_xi1_derivative(c, n);
  for (int j = 1; j < 2 * n; ++j) {
    if (a_xi(j) == cplx(0.0)) continue;
    Covector unit{0.0, BoundaryCovector{0.0, std::vector<double>(2 * (n - 1), 0.0)}};
    if (j == n)
      unit.prime.xi_contact = 1.0;
    else if (j < n)
      unit.prime.xi_perp[j - 1] = 1.0;
    else
      unit.prime.xi_perp[(n - 1) + (j - n - 1)] = 1.0;
    pairing += a_xi(j) * d1_at(c, 0.0, unit.prime);
  }
  const cplx n4 = norm2 * norm2, n6 = n4 * norm2;
  return 2.0 * I * xi1 * hess.alpha *
         (-hess.A.trace() * d / n4 + 4.0 * a_xi_xi * d / n6 - 2.0 * pairing / n4);
}

SymbolMatrix q_symbol(SymbolOrder order, Chirality c, const Covector& xi, const HessianData& hess) {
  return {q_symbol_at(order, c, xi.xi1, xi.prime, hess), c};
}

Mat contour_integral(const std::function<Mat(cplx)>& integrand, Side s, const BoundaryCovector& xp,
                     const std::vector<cplx>& poles) {
  const double r = require_nonzero(xp);
  const cplx center = s == Side::plus ? I * r : -I * r;
  const double rho = 0.5 * r;
  for (cplx p : poles) {
    const double rel = std::abs(std::abs(p - center) - rho) / rho;
    if (rel < kPoleTolerance)
      throw PoleOnContour("pole at distance " + std::to_string(rel) + " (relative) from the contour");
  }
  Mat sum;
  for (int k = 0; k < kContourPoints; ++k) {
    const double t = 2.0 * std::numbers::pi * k / kContourPoints;
    const cplx w = rho * std::exp(I * t);
    const Mat f = integrand(center + w);
    if (!f.allFinite()) throw PoleOnContour("integrand is singular on the contour");
    if (k == 0)
      sum = f * (I * w);
    else
      sum += f * (I * w);
  }
  sum /= static_cast<double>(kContourPoints);
  return s == Side::plus ? sum : Mat(-sum);
}

Mat contour_closed_form_trace_term(Chirality c, const BoundaryCovector& xp, const HessianData& hess) {
  const double r = require_nonzero(xp);
  return I * hess.alpha * hess.A.trace() * d1_xi1_derivative(c, xp.n()) / (2.0 * r);
}

Mat contour_closed_form_contact(Chirality c, const BoundaryCovector& xp, const HessianData& hess) {
  const double r = require_nonzero(xp);
  return -I * hess.alpha * hess.beta() * d1_xi1_derivative(c, xp.n()) / r;
}

SymbolMatrix calderon_symbol_minus1(Chirality c, Side s, const BoundaryCovector& xp, const HessianData& hess) {
  const double r = require_nonzero(xp);
  if (!xp.on_contact_line()) throw InvalidArgument("order -1 Calderon symbol is only evaluated on the contact line");
  if ((s == Side::plus) != (xp.xi_contact < 0.0))
    throw InvalidArgument("side plus lives on xi_{n+1} < 0, side minus on xi_{n+1} > 0");
  if (hess.n() != xp.n()) throw InvalidArgument("HessianData dimension does not match the covector");
  Mat m = -I * hess.alpha * hess.beta() * d1_xi1_derivative(opposite(c), xp.n()) / r *
          boundary_isomorphism(c, s, xp.n()).matrix;
  return {m, c};
}

}  // namespace spinc
