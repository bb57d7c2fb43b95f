#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "wig/kernel.hpp"
#include "wig/modnorm.hpp"
#include "wig/symplectic.hpp"

namespace wig {

// Phi(x, eta) = 1/2 x.Px + eta.Qx - 1/2 eta.R eta. For a free symplectic S
// (A invertible): Q = A^-1, P = C A^-1, R = A^-1 B.
struct QuadraticPhase {
  RMat P, Q, R;

  static QuadraticPhase from_symplectic(const SymplecticMat& S);
  static QuadraticPhase kohn_nirenberg(int d);  // Phi = x . eta
  int d() const { return static_cast<int>(Q.rows()); }
  SymplecticMat symplectic() const;
  double operator()(double x, double eta) const;  // d = 1
};

// Symbol given pointwise; sampled on the rectangular (x, dual eta) lattice when
// an operator matrix is needed.
struct Symbol {
  std::function<cplx(double, double)> fn;

  PhaseField sample(const Grid& g) const;
  static Symbol constant(cplx c);
  // c * exp(-pi (a x^2 + b eta^2) - 2 pi i kappa x eta) + offset
  static Symbol gaussian(double a, double b, double kappa = 0.0, cplx c = 1.0, cplx offset = 0.0);
};

// Kohn-Nirenberg operator: k_T(x, y) = sum_eta sigma(x, eta) e^{2 pi i (x - y) eta} d eta,
// built from the inverse partial transform and a shear of the index.
OperatorKernel kn_op(const PhaseField& sigma);
// Type-I FIO: k_T(x, y) = sum_eta e^{2 pi i Phi(x, eta)} sigma(x, eta) e^{-2 pi i y eta} d eta.
OperatorKernel type1_fio(const PhaseField& sigma, const QuadraticPhase& phi);
// Adjoint of a type-I operator (a type-II FIO).
OperatorKernel type2_adjoint(const OperatorKernel& T);

// sigma(x + t/2, eta + r/2) conj(sigma(x - t/2, eta - r/2)) on the half-step
// pairing of both axes: rank 4, axes (s_x, s_eta, m_t, m_r), dims (2n, 2n, n/2, n/2).
Tensor sigma_I(const PhaseField& sigma);

struct Type1Options {
  int refine = 1;  // quadrature step h / (2 refine) in t and r
  int nodes = 0;   // nodes per axis; 0 covers +-L
  int images = 0;  // torus images summed on each side (odd rows flip sign)
};
// Closed-form Wigner kernel of a type-I FIO:
//   k((x, xi), (y, eta)) = F2 sigma_I(x, eta, xi - P x - Q^T eta, y - Q x + R eta),
// the transform of sigma_I evaluated by quadrature at the exact arguments.
WignerKernel wigner_kernel_type1(const Symbol& sigma, const QuadraticPhase& phi, const Grid& g,
                                 const Type1Options& opt = {});

struct MembershipOptions {
  std::vector<double> radii{1, 2, 3, 4, 6, 8};
  double tail_radius = 4;
  double tail_max = 1e-3;
  double q = 1;
  double s = 0;
  int stride = 4;  // decimation of the symbol STFT positions
  int max_n = 48;
};

struct MembershipReport {
  DecayCurve decay;
  double tail = 0;         // mass fraction beyond tail_radius
  double symbol_norm = 0;  // decimated M^{inf,q}_{1 (x) v_s} norm of h(z, z + v)
  double exponent = 0;     // fitted slope of -log tail against log R
  bool snapped = false;    // S^{-1} maps some lattice point off the lattice
  int stride = 4;
  bool pass = false;
};

MembershipReport fio_membership(const WignerKernel& k, const SymplecticMat& S, const MembershipOptions& opt = {});
MembershipReport fio_membership(const OperatorKernel& T, const SymplecticMat& S, const MembershipOptions& opt = {});
// One JSON object: decay_profile, symbol_norm, exponent, pass, ...
std::string membership_json(const MembershipReport& r);

}  // namespace wig
