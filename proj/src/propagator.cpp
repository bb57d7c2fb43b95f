#include "wig/propagator.hpp"

#include <cmath>
#include <json.hpp>
#include <limits>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "wig/parallel.hpp"
#include "wig/transforms.hpp"

namespace wig {

namespace {

RMat scalar(double v) { return RMat::Constant(1, 1, v); }

// exp(G) by a 4th-order Taylor series, halving the step until two successive
// refinements agree within tol.
CMat taylor_exp(const CMat& G, double tol = 1e-9) {
  auto series = [](const CMat& X, int squarings) {
    const Eigen::Index n = X.rows();
    CMat I = CMat::Identity(n, n);
    CMat X2 = X * X;
    CMat E = I + X + X2 / 2.0 + X2 * X / 6.0 + X2 * X2 / 24.0;
    for (int i = 0; i < squarings; ++i) E = E * E;
    return E;
  };
  int k = 0;
  CMat prev = series(G, 0);
  for (k = 1; k < 40; ++k) {
    CMat cur = series(G / std::pow(2.0, k), k);
    if ((cur - prev).norm() <= tol * std::max(1.0, cur.norm())) return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace

QuadraticHamiltonian::QuadraticHamiltonian() : A(RMat::Zero(1, 1)), B(RMat::Zero(1, 1)), C(RMat::Zero(1, 1)) {}

QuadraticHamiltonian::QuadraticHamiltonian(RMat a, RMat b, RMat c) : A(std::move(a)), B(std::move(b)), C(std::move(c)) {
  (void)HamiltonianMat::from_blocks(A, B, C);
}

double QuadraticHamiltonian::symbol(double x, double xi) const {
  return 0.5 * B(0, 0) * xi * xi + xi * A(0, 0) * x - 0.5 * C(0, 0) * x * x;
}

QuadraticHamiltonian QuadraticHamiltonian::harmonic_oscillator() { return {scalar(0), scalar(1), scalar(-1)}; }

QuadraticHamiltonian QuadraticHamiltonian::free_particle() { return {scalar(0), scalar(1), scalar(0)}; }

std::vector<double> PerturbedHamiltonian::sampled(const Grid& g) const {
  std::vector<double> v(g.n, 0.0);
  if (kind == PertKind::None || kind == PertKind::KNSymbol) return v;
  if (!samples.empty()) {
    if (static_cast<int>(samples.size()) != g.n)
      throw Error(ErrorCode::DimMismatch, "perturbation samples must have n entries");
    v = samples;
  } else if (profile) {
    const double step = kind == PertKind::Multiplier ? g.h : g.dual_step();
    for (int j = 0; j < g.n; ++j) v[j] = profile((j - g.n / 2) * step);
  } else {
    throw Error(ErrorCode::Usage, "perturbation has neither samples nor a profile");
  }
  for (double x : v)
    if (!std::isfinite(x)) throw Error(ErrorCode::Usage, "perturbation is unbounded on the lattice");
  return v;
}

SymplecticMat classical_flow(const QuadraticHamiltonian& H, double t, double omega) {
  return hamiltonian_flow(H.matrix(), t, omega);
}

MetaplecticWord propagation_word(const SymplecticMat& S) {
  if (S.d() != 1) return factor_symplectic(S);
  const RMat Jinv = make_J_matrix(1).inverse();
  RMat cur = S.matrix();
  int best_k = -1;
  double best = std::numeric_limits<double>::infinity(), c1 = 0, b = 0, c2 = 0;
  for (int k = 0; k < 4; ++k) {
    // S = J^k S'
    const double A = cur(0, 0), B = cur(0, 1), D = cur(1, 1);
    if (std::abs(B) > 1e-12) {
      double q1 = (D - 1) / B, q2 = (A - 1) / B;
      double size = std::max({std::abs(q1), std::abs(B), std::abs(q2)});
      if (size < best) {
        best = size;
        best_k = k;
        c1 = q1;
        b = B;
        c2 = q2;
      }
    } else if (std::abs(A - 1) < 1e-12 && std::abs(D - 1) < 1e-12) {
      // pure chirp multiplication
      double size = std::abs(cur(1, 0));
      if (size < best) {
        best = size;
        best_k = k;
        c1 = cur(1, 0);
        b = 0;
        c2 = 0;
      }
    }
    cur = Jinv * cur;
  }
  if (best_k < 0) return factor_symplectic(S);
  std::vector<Token> tokens(best_k, Token::ft());
  auto push = [&](Token t, double v) {
    if (std::abs(v) > 1e-14) tokens.push_back(std::move(t));
  };
  push(Token::chirp_mul(scalar(c1)), c1);
  push(Token::chirp_conv(scalar(b)), b);
  push(Token::chirp_mul(scalar(c2)), c2);
  MetaplecticWord w(1, tokens);
  if ((w.projection().matrix() - S.matrix()).norm() > 1e-9 * std::max(1.0, S.matrix().norm()))
    return factor_symplectic(S);
  w.target = S;
  return w;
}

Signal quad_propagate(const QuadraticHamiltonian& H, double t, const Signal& u0, double omega) {
  if (t == 0) return u0;
  return apply(propagation_word(classical_flow(H, t, omega)), u0);
}

Signal split_step(const PerturbedHamiltonian& H, double t, int steps, const Signal& u0) {
  if (steps < 1) throw Error(ErrorCode::Usage, "steps must be at least 1");
  const Grid& g = u0.grid;
  if (g.d != 1 && H.kind != PertKind::None) throw Error(ErrorCode::DimMismatch, "perturbations are supported for d = 1");
  const double dt = t / steps;
  const MetaplecticWord Q = propagation_word(classical_flow(H.quad, dt, H.omega));
  const double w = H.pert_sign * (2 * kPi / H.omega) * dt / 2;

  std::vector<cplx> half(g.n, 1.0);
  CMat kn_half;
  if (H.kind == PertKind::Multiplier || H.kind == PertKind::FourierMultiplier) {
    std::vector<double> s = H.sampled(g);
    for (int j = 0; j < g.n; ++j) half[j] = std::polar(1.0, w * s[j]);
  } else if (H.kind == PertKind::KNSymbol) {
    if (!H.symbol.fn) throw Error(ErrorCode::Usage, "KN perturbation without a symbol");
    OperatorKernel S = kn_op(H.symbol.sample(g));
    kn_half = taylor_exp(cplx(0, w) * g.h * S.matrix);
  }
  auto perturb = [&](Signal& u) {
    switch (H.kind) {
      case PertKind::None:
        return;
      case PertKind::Multiplier:
        for (int j = 0; j < g.n; ++j) u[j] *= half[j];
        return;
      case PertKind::FourierMultiplier: {
        Signal F = dft(u);
        for (int j = 0; j < g.n; ++j) F[j] *= half[j];
        u = idft(F);
        return;
      }
      case PertKind::KNSymbol:
        u.vec() = kn_half * u.vec();
        return;
    }
  };

  const double n0 = u0.norm();
  Signal u = u0;
  for (int s = 0; s < steps; ++s) {
    perturb(u);
    u = apply(Q, u);
    perturb(u);
    if (n0 > 0 && std::abs(u.norm() - n0) > 1e-3 * n0) {
      std::ostringstream os;
      os << "norm drift " << std::abs(u.norm() - n0) / n0 << " after step " << s + 1;
      throw Error(ErrorCode::UnstableStep, os.str());
    }
  }
  return u;
}

CMat dense_generator(const PerturbedHamiltonian& H, const Grid& g) {
  if (g.d != 1 || H.quad.d() != 1) throw Error(ErrorCode::DimMismatch, "the dense generator is built for d = 1");
  const int n = g.n;
  CMat F = g.h * OperatorKernel::from_action(g, [](const Signal& f) { return dft(f); }).matrix;
  CMat X = CMat::Zero(n, n), Xi = CMat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    X(j, j) = g.x(j);
    Xi(j, j) = (j - n / 2) * g.dual_step();
  }
  CMat D = F.adjoint() * Xi * F;
  const double A = H.quad.A(0, 0), B = H.quad.B(0, 0), C = H.quad.C(0, 0);
  CMat G = 0.5 * B * D * D + 0.5 * A * (D * X + X * D) - 0.5 * C * X * X;
  switch (H.kind) {
    case PertKind::None:
      break;
    case PertKind::Multiplier: {
      std::vector<double> s = H.sampled(g);
      for (int j = 0; j < n; ++j) G(j, j) += s[j];
      break;
    }
    case PertKind::FourierMultiplier: {
      std::vector<double> s = H.sampled(g);
      CMat S = CMat::Zero(n, n);
      for (int j = 0; j < n; ++j) S(j, j) = s[j];
      G += F.adjoint() * S * F;
      break;
    }
    case PertKind::KNSymbol:
      G += g.h * kn_op(H.symbol.sample(g)).matrix;
      break;
  }
  return G;
}

Signal ode_reference(const PerturbedHamiltonian& H, double t, const Signal& u0) {
  CMat G = dense_generator(H, u0.grid);
  CMat U = (cplx(0, H.pert_sign * (2 * kPi / H.omega) * t) * G).exp();
  Signal r(u0.grid);
  r.vec() = U * u0.vec();
  return r;
}

SignCalibration calibrate_pert_sign(const PerturbedHamiltonian& H, double t, int steps, const Signal& u0) {
  // the quadratic step fixes the generator sign; the oracle follows it
  PerturbedHamiltonian ref = H;
  ref.pert_sign = -1;
  Signal exact = ode_reference(ref, t, u0);
  SignCalibration c;
  for (int s : {+1, -1}) {
    PerturbedHamiltonian trial = H;
    trial.pert_sign = s;
    double e = (split_step(trial, t, steps, u0) - exact).norm() / u0.norm();
    (s > 0 ? c.err_plus : c.err_minus) = e;
  }
  c.matching = c.err_plus < c.err_minus ? +1 : -1;
  return c;
}

OperatorKernel propagator_matrix(const PerturbedHamiltonian& H, const Grid& g, double t, int steps) {
  return OperatorKernel::from_action(g, [&](const Signal& e) { return split_step(H, t, steps, e); });
}

PropagatorKernel propagator_kernel(const PerturbedHamiltonian& H, const Grid& g, double t, int steps,
                                   const KernelOptions& opt) {
  if (g.n > opt.max_n) {
    std::ostringstream os;
    os << "n = " << g.n << " exceeds the kernel limit " << opt.max_n;
    throw Error(ErrorCode::KernelTooLarge, os.str());
  }
  OperatorKernel U = propagator_matrix(H, g, t, steps);
  WignerKernel K = wigner_kernel(U, opt);
  return {U, std::move(K), classical_flow(H.quad, t, H.omega)};
}

std::string SemigroupReport::json() const {
  nlohmann::json j{{"t", t}, {"t1", t1}, {"t2", t2}, {"tiles", tiles}, {"matrix_defect", matrix_defect},
                   {"flow_defect", flow_defect}, {"pass", pass}};
  return j.dump();
}

SemigroupReport semigroup_extension_check(const PerturbedHamiltonian& H, const Grid& g, double t, double T0,
                                          int steps) {
  if (steps < 1) throw Error(ErrorCode::Usage, "steps must be at least 1");
  if (T0 <= 0) {
    double w = caustic_window(H.quad.matrix(), CausticOptions{std::max(2 * std::abs(t), 1.0), 1e-3, 1e-10, H.omega});
    T0 = std::isfinite(w) ? 0.9 * w : std::abs(t);
  }
  const double dt = t / steps;
  int n2 = std::max(1, static_cast<int>(std::floor(T0 / std::abs(dt))));
  n2 = std::min(n2, steps);
  const int tiles = steps / n2;
  const int n1 = steps - tiles * n2;

  SemigroupReport r;
  r.t = t;
  r.t1 = n1 * dt;
  r.t2 = n2 * dt;
  r.tiles = tiles;
  OperatorKernel direct = propagator_matrix(H, g, t, steps);
  OperatorKernel tile = propagator_matrix(H, g, r.t2, n2);
  OperatorKernel prod = n1 > 0 ? propagator_matrix(H, g, r.t1, n1) : OperatorKernel::identity(g);
  for (int i = 0; i < tiles; ++i) prod = prod * tile;
  r.matrix_defect = (prod.matrix - direct.matrix).norm() / direct.matrix.norm();

  SymplecticMat St2 = classical_flow(H.quad, r.t2, H.omega);
  RMat Sp = classical_flow(H.quad, r.t1, H.omega).matrix();
  for (int i = 0; i < tiles; ++i) Sp = Sp * St2.matrix();
  r.flow_defect = (Sp - classical_flow(H.quad, t, H.omega).matrix()).norm();
  r.pass = r.matrix_defect <= 1e-5 && r.flow_defect <= 1e-9;
  return r;
}

}  // namespace wig
