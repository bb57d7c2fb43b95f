#pragma once

#include <string>

#include "wig/types.hpp"

namespace wig {

// Element of Sp(d,R), stored as a full 2d x 2d matrix.
class SymplecticMat {
 public:
  SymplecticMat() : SymplecticMat(RMat::Identity(2, 2)) {}
  // Throws NotSymplectic if the relation S^T J S = J fails beyond
  // 1e-12 * max(1, |S|_max^2) (or the given absolute tolerance if > 0).
  explicit SymplecticMat(const RMat& m, double tol = 0.0);

  int d() const { return d_; }
  const RMat& matrix() const { return m_; }
  RMat A() const { return m_.topLeftCorner(d_, d_); }
  RMat B() const { return m_.topRightCorner(d_, d_); }
  RMat C() const { return m_.bottomLeftCorner(d_, d_); }
  RMat D() const { return m_.bottomRightCorner(d_, d_); }

  SymplecticMat operator*(const SymplecticMat& o) const;
  SymplecticMat inverse() const;  // -J S^T J

 private:
  RMat m_;
  int d_;
};

// Element of sp(d,R): X J + J X^T = 0.
class HamiltonianMat {
 public:
  explicit HamiltonianMat(const RMat& m);
  // Blocks (A, B; C, -A^T) with B, C symmetric.
  static HamiltonianMat from_blocks(const RMat& A, const RMat& B, const RMat& C);
  int d() const { return d_; }
  const RMat& matrix() const { return m_; }

 private:
  RMat m_;
  int d_;
};

RMat make_J_matrix(int d);
SymplecticMat make_J(int d);
SymplecticMat make_VC(const RMat& C);  // (I 0; C I)
SymplecticMat make_DL(const RMat& L);  // (L^{-1} 0; 0 L^T)

double symplectic_residual(const RMat& M);
bool is_symplectic(const RMat& M, double tol = 1e-10);

// Normalization constant of the flow: S_t = exp(t X / omega). The default
// omega = 2 pi matches the 2 pi x' = grad_xi a form of Hamilton's equations.
inline constexpr double kDefaultOmega = 2.0 * kPi;

RMat expm(const RMat& X);  // scaling and squaring, degree-13 Pade
SymplecticMat hamiltonian_flow(const HamiltonianMat& H, double t, double omega = kDefaultOmega);

struct CausticOptions {
  double t_max = 100.0;
  double step = 1e-3;
  double refine_tol = 1e-10;
  double omega = kDefaultOmega;
};
double caustic_window(const HamiltonianMat& H, const CausticOptions& opt = {});

// 4d x 4d lift with S(f (x) g) = S1 f (x) S2 g.
SymplecticMat lift_tensor(const SymplecticMat& S1, const SymplecticMat& S2);

struct SpecialProjections {
  SymplecticMat A_FT2;
  SymplecticMat A_0;
  SymplecticMat A_half;
  // 8d x 8d matrix relating W(W k_T, Phi) to k_T (x) conj(k_T) (x) Phi.
  SymplecticMat A_kernel;
};
SpecialProjections special_projections(int d = 1);

// E block (A11 A13; A21 A23) of a 4m x 4m matrix cut into 16 m x m blocks.
RMat E_block(const RMat& big);
bool shift_invertible(const SymplecticMat& big);
bool admissible_quantization(const SymplecticMat& big);

RMat read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const RMat& m);
RMat parse_matrix_csv(const std::string& text);
std::string format_matrix_csv(const RMat& m);

}  // namespace wig
