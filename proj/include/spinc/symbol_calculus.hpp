#pragma once

// Finite symbol matrices of the flat spin-c Dirac operator at a boundary
// point: d1 for both chiralities, the boundary isomorphisms, order 0 and
// order -1 Calderon symbols, the classical comparison symbol and the
// residue integrals over Gamma_+/-.
//
// Spinors are written on the tangential form space of m = n-1 variables,
// sorted by parity (even subsets first, then odd; each half in FormBasis
// order).  For even chirality the halves are (sigma^t, sigma^n); for odd
// chirality they are (sigma^n, sigma^t).
//
// Full covector indexing (0-based): 0 = xi_1, 1..n-1 = xi_2..xi_n,
// n = xi_{n+1} (contact), n+1..2n-1 = xi_{n+2}..xi_{2n}.

#include <functional>
#include <vector>

#include "spinc/linalg.hpp"

namespace spinc {

enum class Chirality { even, odd };
enum class Side { plus, minus };

inline Chirality opposite(Chirality c) { return c == Chirality::even ? Chirality::odd : Chirality::even; }

// Covector on the boundary: xi' = (xi_2..xi_{2n}).
struct BoundaryCovector {
  double xi_contact = 0.0;
  std::vector<double> xi_perp;  // xi'' = (xi_2..xi_n, xi_{n+2}..xi_{2n}), length 2(n-1)

  int n() const { return static_cast<int>(xi_perp.size()) / 2 + 1; }
  double norm() const;
  bool on_contact_line() const;
};

struct Covector {
  double xi1 = 0.0;
  BoundaryCovector prime;

  double norm() const;
  // Real 2n-vector in the full indexing above.
  Eigen::VectorXd full() const;
};

struct SymbolMatrix {
  Mat matrix;
  Chirality chirality;
};

// Real 2n x 2n matrices built from the Hermitian Hessian a = a0 + i a1 and
// the symmetric part b = b0 + i b1.
struct HessianData {
  double alpha = 1.0;
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;

  int n() const { return static_cast<int>(A.rows()) / 2; }
  double beta() const { return 0.5 * A.trace() - A(0, 0); }
  // Throws InvalidArgument unless alpha > 0 and A, B have the required block symmetries.
  void validate() const;

  static HessianData from_complex(double alpha, const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);
  // a = Id, b = 0, alpha = 1.
  static HessianData kahler(int n);
};

// Parity-sorted tangential Clifford data.
int tangential_dim(int n);  // 2^{n-1}
int tangential_even_dim(int n);  // 2^{n-2}
Mat tangential_wedge(int n, int j);     // eps_j, 1 <= j <= n-1
Mat tangential_contract(int n, int j);  // e_j
Mat sd(const std::vector<double>& xi_perp);

// d1 at a possibly complex xi_1 (bilinear in xi).
Mat d1_at(Chirality c, cplx xi1, const BoundaryCovector& xp);
SymbolMatrix d1(Chirality c, const Covector& xi);
// Constant matrix d/dxi_1 of d1.
Mat d1_xi1_derivative(Chirality c, int n);

SymbolMatrix boundary_isomorphism(Chirality c, Side s, int n);

SymbolMatrix calderon_symbol0(Chirality c, Side s, const BoundaryCovector& xp);
SymbolMatrix comparison_symbol0(Chirality c, const BoundaryCovector& xp);

enum class SymbolOrder { minus1, minus2_contact };

// q_{-1} = 2 d1/|xi|^2, or the A-part of the order -2 correction, using the
// d1 of chirality c.  Complex xi_1 is allowed.
Mat q_symbol_at(SymbolOrder order, Chirality c, cplx xi1, const BoundaryCovector& xp,
                const HessianData& hess);
SymbolMatrix q_symbol(SymbolOrder order, Chirality c, const Covector& xi, const HessianData& hess);

inline constexpr int kContourPoints = 512;
inline constexpr double kPoleTolerance = 1e-6;

// (1/2pi) times the integral of f over the circle |xi_1 -/+ i|xi'|| = |xi'|/2,
// positively oriented for Side::plus, negatively for Side::minus.  Known
// poles within kPoleTolerance (relative) of the circle, or non-finite
// samples, raise PoleOnContour.
Mat contour_integral(const std::function<Mat(cplx)>& integrand, Side s, const BoundaryCovector& xp,
                     const std::vector<cplx>& poles = {});

// Closed forms of the residue integrals.
// TrA term of q^{cA}:            +i alpha TrA d1'(c) / (2|xi'|)
// full q^{cA} on the contact line: -i alpha beta d1'(c) / |xi'|
Mat contour_closed_form_trace_term(Chirality c, const BoundaryCovector& xp, const HessianData& hess);
Mat contour_closed_form_contact(Chirality c, const BoundaryCovector& xp, const HessianData& hess);

// Order -1 Calderon symbol on the contact line: side plus needs xi_{n+1} < 0,
// side minus xi_{n+1} > 0.
SymbolMatrix calderon_symbol_minus1(Chirality c, Side s, const BoundaryCovector& xp, const HessianData& hess);

}  // namespace spinc
