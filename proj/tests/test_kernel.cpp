#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "wig/kernel.hpp"
#include "wig/modnorm.hpp"
#include "wig/transforms.hpp"

using namespace wig;

namespace {

CMat random_matrix(int n, std::mt19937& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  CMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(N(rng), N(rng));
  return m;
}

Signal random_gaussian_packet(const Grid& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Signal f(g);
  double a = 0.7 + 0.6 * (U(rng) + 1) / 2, c = U(rng), w = U(rng);
  for (int j = 0; j < g.n; ++j) {
    double t = g.x(j);
    f[j] = std::exp(-kPi * a * (t - c) * (t - c)) * std::polar(1.0, 2 * kPi * w * t);
  }
  return f;
}

double rel(const CMat& a, const CMat& b) { return (a - b).norm() / b.norm(); }

CMat dft_matrix(const Grid& g) {
  // Tf = h M f must equal dft(f)
  return OperatorKernel::from_action(g, [](const Signal& f) { return dft(f); }).matrix;
}

}  // namespace

TEST_CASE("kernel equals T_p applied to the Wigner transform of k_T") {
  std::mt19937 rng(1);
  Grid g = Grid::selfdual(1, 8);
  OperatorKernel T(g, random_matrix(8, rng));
  WignerKernel K = wigner_kernel(T);
  Tensor P = perm_Tp(wigner(T.as_signal()));
  const int N = 64;
  double worst = 0, scale = 0;
  for (int z = 0; z < N; ++z)
    for (int w = 0; w < N; ++w) {
      worst = std::max(worst, std::abs(K.k(z, w) - P.v[static_cast<std::size_t>(z) * N + w]));
      scale = std::max(scale, std::abs(K.k(z, w)));
    }
  CHECK(worst <= 1e-12 * scale);
}

TEST_CASE("kernel equals the conjugation map in Wigner coordinates") {
  std::mt19937 rng(2);
  Grid g = Grid::selfdual(1, 12);
  OperatorKernel T(g, random_matrix(12, rng));
  WignerKernel K = wigner_kernel(T);
  const int N = 144;
  CMat ref(N, N);
  for (int w = 0; w < N; ++w) {
    PhaseField e = PhaseField::halfstep(g);
    e.v[w] = 1.0;
    CMat rho = pairs_from_wigner(e);
    CMat out = g.h * g.h * T.matrix * rho * T.matrix.adjoint();
    PhaseField col = wigner_pairs(out, g);
    for (int z = 0; z < N; ++z) ref(z, w) = col.v[z] / K.cell;
  }
  CHECK(rel(K.k, ref) <= 1e-12);
}

TEST_CASE("identity and zero kernels") {
  Grid g = Grid::selfdual(1, 16);
  WignerKernel K = wigner_kernel(OperatorKernel::identity(g));
  WignerKernel I = identity_kernel(g);
  CHECK(rel(K.k, I.k) <= 1e-12);
  std::mt19937 rng(3);
  Signal f = random_gaussian_packet(g, rng), h = random_gaussian_packet(g, rng);
  PhaseField W = wigner(f, h);
  PhaseField KW = apply_wigner_kernel(K, W);
  double worst = 0;
  for (std::size_t i = 0; i < W.size(); ++i) worst = std::max(worst, std::abs(KW.v[i] - W.v[i]));
  CHECK(worst <= 1e-10);
  WignerKernel Z = wigner_kernel(OperatorKernel(g, CMat::Zero(16, 16)));
  CHECK(Z.k.norm() == 0.0);
  CHECK(apply_wigner_kernel(Z, W).norm() == 0.0);
  // linearity in the field
  PhaseField W2 = wigner(h, f), sum = W;
  for (std::size_t i = 0; i < W.size(); ++i) sum.v[i] = 2.0 * W.v[i] - cplx(0, 3) * W2.v[i];
  PhaseField a = apply_wigner_kernel(K, W), b = apply_wigner_kernel(K, W2), c = apply_wigner_kernel(K, sum);
  worst = 0;
  for (std::size_t i = 0; i < W.size(); ++i)
    worst = std::max(worst, std::abs(c.v[i] - (2.0 * a.v[i] - cplx(0, 3) * b.v[i])));
  CHECK(worst <= 1e-10);
  PhaseField wrong = wigner(Signal(Grid::selfdual(1, 8)));
  CHECK_THROWS_AS(apply_wigner_kernel(K, wrong), Error);
}

TEST_CASE("intertwining") {
  std::mt19937 rng(4);
  Grid g = Grid::selfdual(1, 32);
  CHECK(intertwining_defect(OperatorKernel::identity(g), hermite(g, 1), hermite(g, 2)) <= 1e-10);
  OperatorKernel F(g, dft_matrix(g));
  CHECK(intertwining_defect(F, hermite(g, 0), hermite(g, 3)) <= 1e-10);
  for (int trial = 0; trial < 5; ++trial) {
    OperatorKernel T(g, random_matrix(32, rng));
    WignerKernel K = wigner_kernel(T);
    Signal f = random_gaussian_packet(g, rng), h = random_gaussian_packet(g, rng);
    CHECK(intertwining_defect(K, T, f, h) <= 1e-10);
  }
  // lattice shift: the kernel moves Wigner distributions rigidly
  OperatorKernel P = OperatorKernel::from_action(g, [&](const Signal& f) { return time_freq_shift(f, 2 * g.h, g.h); });
  Signal f = random_gaussian_packet(g, rng);
  PhaseField moved = apply_wigner_kernel(wigner_kernel(P), wigner(f));
  PhaseField direct = wigner(time_freq_shift(f, 2 * g.h, g.h));
  double worst = 0;
  for (std::size_t i = 0; i < moved.size(); ++i) worst = std::max(worst, std::abs(moved.v[i] - direct.v[i]));
  CHECK(worst <= 1e-10);
}

TEST_CASE("norm anchor: |k| = |k_T|^2") {
  std::mt19937 rng(5);
  Grid g = Grid::selfdual(1, 16);
  for (int trial = 0; trial < 3; ++trial) {
    OperatorKernel T(g, random_matrix(16, rng));
    WignerKernel K = wigner_kernel(T);
    double kn = K.cell * K.k.norm();
    double kt = g.h * T.matrix.norm();
    CHECK(std::abs(kn / (kt * kt) - 1.0) <= 1e-12);
    NormEquivalence r = norm_equivalence_experiment(T, 1.0);
    CHECK(std::abs(r.ratio[0] - 1.0) <= 1e-10);
    CHECK(r.ratio[1] > 0);
    CHECK(r.ratio[2] > 0);
  }
}

TEST_CASE("composition, adjoint and inverse") {
  std::mt19937 rng(6);
  Grid g = Grid::selfdual(1, 16);
  OperatorKernel A(g, random_matrix(16, rng)), B(g, random_matrix(16, rng)), C(g, random_matrix(16, rng));
  WignerKernel ka = wigner_kernel(A), kb = wigner_kernel(B), kc = wigner_kernel(C);
  CHECK(rel(compose_kernels(ka, kb).k, wigner_kernel(A * B).k) <= 1e-10);
  CHECK(rel(compose_kernels(ka, identity_kernel(g)).k, ka.k) <= 1e-12);
  CHECK(rel(compose_kernels(compose_kernels(ka, kb), kc).k, compose_kernels(ka, compose_kernels(kb, kc)).k) <= 1e-10);
  CHECK_THROWS_AS(compose_kernels(ka, identity_kernel(Grid::selfdual(1, 8))), Error);

  CHECK(rel(adjoint_kernel(ka).k, wigner_kernel(A.adjoint()).k) <= 1e-12);
  CHECK((adjoint_kernel(adjoint_kernel(ka)).k - ka.k).norm() == 0.0);
  CHECK(std::abs(adjoint_kernel(ka).k.norm() - ka.k.norm()) <= 1e-14 * ka.k.norm());
  CHECK(rel(adjoint_kernel(identity_kernel(g)).k, identity_kernel(g).k) == 0.0);

  WignerKernel inv = inverse_kernel(A);
  CHECK(rel(compose_kernels(inv, ka).k, identity_kernel(g).k) <= 1e-8);
  OperatorKernel F(g, dft_matrix(g));
  OperatorKernel Fi = OperatorKernel::from_action(g, [](const Signal& f) { return idft(f); });
  CHECK(rel(inverse_kernel(F).k, wigner_kernel(Fi).k) <= 1e-10);
  CHECK(rel(inverse_kernel(OperatorKernel::identity(g)).k, identity_kernel(g).k) <= 1e-12);
  CMat sing = CMat::Identity(16, 16);
  sing(3, 3) = 0;
  CHECK_THROWS_AS(inverse_kernel(OperatorKernel(g, sing)), Error);
}

TEST_CASE("Hermitian operators give nearly real kernels") {
  // Hermitian T gives real k up to the single unpaired lag of length L/2,
  // whose weight for Gaussian-type data is about exp(-pi n / 8).
  Grid g = Grid::selfdual(1, 32);
  CMat m = CMat::Zero(32, 32);
  for (int k = 0; k < 3; ++k) {
    Signal hk = hermite(g, k);
    m += (1.0 + k) * hk.vec() * hk.vec().adjoint();
  }
  WignerKernel K = wigner_kernel(OperatorKernel(g, m));
  double imag = 0, mag = 0;
  for (Eigen::Index i = 0; i < K.k.size(); ++i) {
    imag = std::max(imag, std::abs(K.k.data()[i].imag()));
    mag = std::max(mag, std::abs(K.k.data()[i]));
  }
  MESSAGE("max |Im k| / max |k| = " << imag / mag);
  CHECK(imag <= 1e-4 * mag);
}

TEST_CASE("tensor round trip and size guard") {
  std::mt19937 rng(8);
  Grid g = Grid::selfdual(1, 8);
  WignerKernel K = wigner_kernel(OperatorKernel(g, random_matrix(8, rng)));
  Tensor t = kernel_to_tensor(K);
  CHECK(t.dims == std::vector<int>{16, 4, 16, 4});
  WignerKernel back = kernel_from_tensor(t);
  CHECK((back.k - K.k).norm() == 0.0);
  CHECK(back.cell == K.cell);
  CHECK(back.grid == K.grid);
  Tensor bad = t;
  bad.dims = {16, 4, 16};
  CHECK_THROWS_AS(kernel_from_tensor(bad), Error);
  KernelOptions small{4};
  CHECK_THROWS_AS(wigner_kernel(OperatorKernel::identity(g), small), Error);
}

TEST_CASE("concentration profile") {
  Grid g = Grid::selfdual(1, 16);
  SymplecticMat I2(RMat::Identity(2, 2));
  DecayCurve id = concentration_profile(identity_kernel(g), I2, {0.25, 1, 4});
  CHECK(id.mass[0] <= 1e-10);
  std::mt19937 rng(9);
  WignerKernel R = wigner_kernel(OperatorKernel(g, random_matrix(16, rng)));
  DecayCurve rc = concentration_profile(R, I2, {0.5, 1, 2, 4, 8});
  CHECK(rc.mass[3] > 0.1);
  for (std::size_t i = 1; i < rc.mass.size(); ++i) CHECK(rc.mass[i] <= rc.mass[i - 1]);
  // a lattice shift concentrates on the shifted tube, not on the diagonal
  OperatorKernel P = OperatorKernel::from_action(g, [&](const Signal& f) { return time_freq_shift(f, 3 * g.h, 0.0); });
  WignerKernel KP = wigner_kernel(P);
  CHECK(concentration_profile(KP, I2, {1.0}).mass[0] > 0.9);
  CHECK(decay_csv(id).rfind("R,mass_fraction\n", 0) == 0);
}
