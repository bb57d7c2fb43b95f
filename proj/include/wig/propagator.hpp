#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wig/fio.hpp"
#include "wig/kernel.hpp"
#include "wig/metaplectic.hpp"
#include "wig/symplectic.hpp"

namespace wig {

// a(x, xi) = 1/2 xi.B xi + xi.A x - 1/2 x.C x with B, C symmetric.
struct QuadraticHamiltonian {
  RMat A, B, C;

  QuadraticHamiltonian();
  QuadraticHamiltonian(RMat A, RMat B, RMat C);  // validates symmetry
  int d() const { return static_cast<int>(A.rows()); }
  HamiltonianMat matrix() const { return HamiltonianMat::from_blocks(A, B, C); }
  double symbol(double x, double xi) const;  // d = 1

  static QuadraticHamiltonian harmonic_oscillator();  // 1/2 (x^2 + xi^2)
  static QuadraticHamiltonian free_particle();        // 1/2 xi^2
};

enum class PertKind { None, Multiplier, FourierMultiplier, KNSymbol };

struct PerturbedHamiltonian {
  QuadraticHamiltonian quad;
  PertKind kind = PertKind::None;
  // Multiplier: sigma(x); FourierMultiplier: sigma(xi). Samples on the grid
  // (x_j or the dual lattice) take precedence over the function when present.
  std::function<double(double)> profile;
  std::vector<double> samples;
  Symbol symbol;  // KNSymbol
  double omega = kDefaultOmega;
  // Perturbation substeps use exp(i pert_sign (2 pi / omega) dt sigma). The
  // quadratic step is exp(-i (2 pi / omega) t a(x, D)), so -1 splits a + sigma.
  int pert_sign = -1;

  // Perturbation values on the n-point lattice of g; throws if unbounded.
  std::vector<double> sampled(const Grid& g) const;
};

// Flow of 2 pi x' = grad_xi a, 2 pi xi' = -grad_x a (omega sets the 2 pi).
SymplecticMat classical_flow(const QuadraticHamiltonian& H, double t, double omega = kDefaultOmega);

// Word with projection S. For d = 1: J^k times three shears
// V_c1 V_b^T V_c2, k in 0..3 chosen to minimise the largest shear; quarter
// turns therefore reduce to exact DFTs. Other d: factor_symplectic.
MetaplecticWord propagation_word(const SymplecticMat& S);

Signal quad_propagate(const QuadraticHamiltonian& H, double t, const Signal& u0, double omega = kDefaultOmega);

// Strang splitting: half perturbation step, quadratic step, half perturbation step.
Signal split_step(const PerturbedHamiltonian& H, double t, int steps, const Signal& u0);

// Dense n x n matrix G of a(x, D) + sigma(x, D) acting on sample vectors
// (Weyl-symmetrised xi.A x term), d = 1.
CMat dense_generator(const PerturbedHamiltonian& H, const Grid& g);
// exp(i s (2 pi / omega) t G) u0 with s = H.pert_sign: an independent ODE oracle.
Signal ode_reference(const PerturbedHamiltonian& H, double t, const Signal& u0);

struct SignCalibration {
  double err_plus = 0, err_minus = 0;  // split_step vs ode_reference for each sign
  int matching = -1;
};
// Runs split_step with both perturbation signs against the ODE oracle.
SignCalibration calibrate_pert_sign(const PerturbedHamiltonian& H, double t, int steps, const Signal& u0);

struct PropagatorKernel {
  OperatorKernel op;
  WignerKernel kernel;
  SymplecticMat S;
};
// Matrix of the evolution at time t assembled column by column from split_step.
OperatorKernel propagator_matrix(const PerturbedHamiltonian& H, const Grid& g, double t, int steps);
PropagatorKernel propagator_kernel(const PerturbedHamiltonian& H, const Grid& g, double t, int steps,
                                   const KernelOptions& opt = {});

struct SemigroupReport {
  double t = 0, t1 = 0, t2 = 0;
  int tiles = 0;
  double matrix_defect = 0;  // |U(t1) U(t2)^tiles - U(t)| / |U(t)|
  double flow_defect = 0;    // |S_t1 S_t2^tiles - S_t|
  bool pass = false;         // matrix_defect <= 1e-5 and flow_defect <= 1e-9
  std::string json() const;
};
// Tiles [0, t] into one step of t1 and `tiles` steps of t2 <= T0 (T0 <= 0:
// nine tenths of the caustic window). All pieces share the step t / steps.
SemigroupReport semigroup_extension_check(const PerturbedHamiltonian& H, const Grid& g, double t, double T0,
                                          int steps);

}  // namespace wig
