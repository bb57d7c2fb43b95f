#pragma once

#include <functional>

#include "wig/signal.hpp"

namespace wig {

// Discrete Schwartz kernel of an operator on a d = 1 grid: Tf = h * matrix * f,
// so matrix[j][j'] samples k_T(x_j, y_j').
struct OperatorKernel {
  Grid grid;
  CMat matrix;

  OperatorKernel() = default;
  OperatorKernel(const Grid& g, CMat m);
  static OperatorKernel identity(const Grid& g);
  // Columns assembled from the action on one-hot inputs.
  static OperatorKernel from_action(const Grid& g, const std::function<Signal(const Signal&)>& op);

  Signal apply(const Signal& f) const;
  OperatorKernel operator*(const OperatorKernel& o) const;
  OperatorKernel adjoint() const;
  // k_T as a signal on the doubled grid (axes x, y).
  Signal as_signal() const;
  double op_norm() const;  // spectral norm of f -> Tf in L2
};

// Wigner kernel k(z, w) on the half-step lattice, stored as an N x N matrix with
// N = (2n)(n/2) and flattened phase index z = s * (n/2) + k. The contraction
// (K F)(z) = cell * sum_w k(z, w) F(w) reproduces K W(f, g) = W(Tf, Tg).
struct WignerKernel {
  Grid grid;
  PhaseField lattice;  // layout only, no values
  CMat k;
  double cell = 0.0;

  int dim() const { return static_cast<int>(k.rows()); }
  bool same_lattice(const WignerKernel& o) const;
};

struct KernelOptions {
  int max_n = 64;  // memory guard: the kernel holds n^4 complex entries
};

// k = T_p W k_T, built block by block: the (s_z, s_w) block equals
// F_{s_z} G F_{s_w}^*, with G gathered from the operator matrix and F_s the
// lag-to-frequency DFT of the row parity.
WignerKernel wigner_kernel(const OperatorKernel& T, const KernelOptions& opt = {});
// All-zero kernel on the Wigner lattice of g.
WignerKernel zero_kernel(const Grid& g);
WignerKernel identity_kernel(const Grid& g);
PhaseField apply_wigner_kernel(const WignerKernel& k, const PhaseField& F);
double intertwining_defect(const WignerKernel& k, const OperatorKernel& T, const Signal& f, const Signal& g);
double intertwining_defect(const OperatorKernel& T, const Signal& f, const Signal& g);
WignerKernel compose_kernels(const WignerKernel& a, const WignerKernel& b);
// Kernel of the adjoint operator (conjugate transpose of k).
WignerKernel adjoint_kernel(const WignerKernel& k);
WignerKernel inverse_kernel(const OperatorKernel& T, double max_cond = 1e8, const KernelOptions& opt = {});

// Rank-4 view with axes (x, xi, y, eta) and meta {h, x_step, freq_step, cell}.
Tensor kernel_to_tensor(const WignerKernel& k);
WignerKernel kernel_from_tensor(const Tensor& t);

struct NormEquivalence {
  double s = 1.0;
  // [0] m = 1, [1] m = v_s, [2] m = 1 (x) v_s
  double k_norm[3] = {0, 0, 0};
  double kT_norm[3] = {0, 0, 0};
  double ratio[3] = {0, 0, 0};  // k_norm / kT_norm^2
};
NormEquivalence norm_equivalence_experiment(const OperatorKernel& T, double s, const KernelOptions& opt = {48});

}  // namespace wig
