#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "wig/symplectic.hpp"

using namespace wig;

namespace {

RMat random_symmetric(std::mt19937& rng, int d) {
  std::normal_distribution<double> N(0.0, 1.0);
  RMat C(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j) C(i, j) = C(j, i) = N(rng);
  return C;
}

RMat random_generator_product(std::mt19937& rng, int d, int count) {
  std::uniform_int_distribution<int> pick(0, 2);
  std::normal_distribution<double> N(0.0, 1.0);
  RMat S = RMat::Identity(2 * d, 2 * d);
  for (int i = 0; i < count; ++i) {
    int k = pick(rng);
    if (k == 0) {
      S = S * make_VC(random_symmetric(rng, d) * 0.5).matrix();
    } else if (k == 1) {
      RMat L = RMat::Identity(d, d) + 0.3 * RMat::NullaryExpr(d, d, [&] { return N(rng); });
      S = S * make_DL(L).matrix();
    } else {
      S = S * make_J(d).matrix();
    }
  }
  return S;
}

double maxabs(const RMat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("J has the standard block layout and squares to -I") {
  RMat J = make_J(1).matrix();
  CHECK(J(0, 0) == 0);
  CHECK(J(0, 1) == 1);
  CHECK(J(1, 0) == -1);
  CHECK(J(1, 1) == 0);
  for (int d = 1; d <= 3; ++d) {
    RMat J2 = make_J(d).matrix() * make_J(d).matrix();
    CHECK(maxabs(J2 + RMat::Identity(2 * d, 2 * d)) == 0.0);
    CHECK(is_symplectic(make_J(d).matrix()));
  }
}

TEST_CASE("generators") {
  CHECK(maxabs(make_VC(RMat::Zero(2, 2)).matrix() - RMat::Identity(4, 4)) == 0.0);
  CHECK(maxabs(make_DL(RMat::Identity(2, 2)).matrix() - RMat::Identity(4, 4)) == 0.0);
  RMat v = make_VC(RMat::Constant(1, 1, 2.0)).matrix();
  RMat want(2, 2);
  want << 1, 0, 2, 1;
  CHECK(maxabs(v - want) == 0.0);
  RMat ns(2, 2);
  ns << 1, 2, 3, 4;
  CHECK_THROWS_AS(make_VC(ns), Error);
  CHECK_THROWS_AS(make_DL(RMat::Zero(2, 2)), Error);
}

TEST_CASE("is_symplectic rejects non-symplectic and odd matrices") {
  RMat m(2, 2);
  m << 1, 1, 1, 1;
  CHECK_FALSE(is_symplectic(m));
  CHECK_THROWS_AS(is_symplectic(RMat::Identity(3, 3)), Error);
  CHECK_THROWS_AS(SymplecticMat{m}, Error);
}

TEST_CASE("random generator products are symplectic with unit determinant") {
  std::mt19937 rng(7);
  for (int d = 1; d <= 2; ++d)
    for (int trial = 0; trial < 50; ++trial) {
      RMat S = random_generator_product(rng, d, 6);
      double scale = std::max(1.0, maxabs(S));
      CHECK(symplectic_residual(S) <= 1e-12 * scale * scale * 10);
      CHECK(std::abs(S.determinant() - 1.0) <= 1e-9 * scale * scale);
      SymplecticMat Sm(S, 1e-10 * scale * scale);
      CHECK(maxabs((Sm * Sm.inverse()).matrix() - RMat::Identity(2 * d, 2 * d)) <= 1e-9 * scale * scale);
    }
}

TEST_CASE("Hamiltonian flows match closed forms") {
  RMat I = RMat::Identity(1, 1), Z = RMat::Zero(1, 1);
  auto zero = HamiltonianMat::from_blocks(Z, Z, Z);
  CHECK(maxabs(hamiltonian_flow(zero, 3.7).matrix() - RMat::Identity(2, 2)) == 0.0);

  auto free = HamiltonianMat::from_blocks(Z, I, Z);
  for (double t : {0.5, 2.0, -7.0}) {
    RMat want(2, 2);
    want << 1, t / (2 * kPi), 0, 1;
    CHECK(maxabs(hamiltonian_flow(free, t).matrix() - want) <= 1e-13);
  }

  auto osc = HamiltonianMat::from_blocks(Z, I, -I);
  for (double t : {0.3, kPi * kPi / 2, kPi * kPi, 11.0}) {
    double a = t / (2 * kPi);
    RMat want(2, 2);
    want << std::cos(a), std::sin(a), -std::sin(a), std::cos(a);
    CHECK(maxabs(hamiltonian_flow(osc, t).matrix() - want) <= 1e-13);
  }
}

TEST_CASE("flow is a one-parameter group") {
  std::mt19937 rng(11);
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    RMat A = RMat::NullaryExpr(2, 2, [&] { return 0.3 * N(rng); });
    auto H = HamiltonianMat::from_blocks(A, random_symmetric(rng, 2) * 0.3, random_symmetric(rng, 2) * 0.3);
    double s = U(rng), t = U(rng);
    RMat lhs = hamiltonian_flow(H, s).matrix() * hamiltonian_flow(H, t).matrix();
    RMat rhs = hamiltonian_flow(H, s + t).matrix();
    CHECK(maxabs(lhs - rhs) <= 1e-9 * std::max(1.0, maxabs(rhs)));
  }
}

TEST_CASE("caustic window") {
  RMat I = RMat::Identity(1, 1), Z = RMat::Zero(1, 1);
  CHECK(caustic_window(HamiltonianMat::from_blocks(Z, I, Z)) == doctest::Approx(100.0));
  // independent root of cos(t / 2 pi) by plain bisection
  double lo = 9.0, hi = 10.5;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (std::cos(lo / (2 * kPi)) * std::cos(mid / (2 * kPi)) > 0 ? lo : hi) = mid;
  }
  CHECK(std::abs(caustic_window(HamiltonianMat::from_blocks(Z, I, -I)) - lo) <= 1e-9);
  RMat J2pi = 2 * kPi * make_J(1).matrix();
  CHECK(std::abs(caustic_window(HamiltonianMat(J2pi)) - kPi / 2) <= 1e-9);
}

TEST_CASE("lift_tensor") {
  RMat I4 = RMat::Identity(4, 4);
  SymplecticMat I2(RMat::Identity(2, 2));
  CHECK(maxabs(lift_tensor(I2, I2).matrix() - I4) == 0.0);
  RMat LJ = lift_tensor(make_J(1), make_J(1)).matrix();
  RMat want(4, 4);
  want << 0, 0, 1, 0,
          0, 0, 0, 1,
          -1, 0, 0, 0,
          0, -1, 0, 0;
  CHECK(maxabs(LJ - want) == 0.0);
  std::mt19937 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    SymplecticMat a(random_generator_product(rng, 1, 4), 1e-9), b(random_generator_product(rng, 1, 4), 1e-9);
    SymplecticMat c(random_generator_product(rng, 1, 4), 1e-9), e(random_generator_product(rng, 1, 4), 1e-9);
    RMat lhs = lift_tensor(a, b).matrix() * lift_tensor(c, e).matrix();
    RMat rhs = lift_tensor(SymplecticMat(RMat(a.matrix() * c.matrix()), 1e-8),
                           SymplecticMat(RMat(b.matrix() * e.matrix()), 1e-8)).matrix();
    CHECK(maxabs(lhs - rhs) <= 1e-10 * std::max(1.0, maxabs(rhs)));
    // E of the lift interleaves the A and B blocks
    RMat E = E_block(lift_tensor(a, a).matrix());
    CHECK(E(0, 0) == a.A()(0, 0));
    CHECK(E(0, 1) == a.B()(0, 0));
    CHECK(E(1, 0) == 0.0);
    CHECK(E(1, 1) == 0.0);
  }
}

TEST_CASE("special projections") {
  auto P = special_projections(1);
  RMat ah(4, 4);
  ah << 0.5, 0.5, 0, 0,
        0, 0, 0.5, -0.5,
        0, 0, 1, 1,
        -1, 1, 0, 0;
  CHECK(maxabs(P.A_half.matrix() - ah) == 0.0);
  RMat a0(4, 4);
  a0 << 1, 0, 0, 0,
        0, 0, 0, -1,
        0, 0, 1, 1,
        -1, 1, 0, 0;
  CHECK(maxabs(P.A_0.matrix() - a0) == 0.0);
  CHECK(shift_invertible(P.A_half));
  CHECK_FALSE(shift_invertible(P.A_0));
  CHECK_FALSE(shift_invertible(SymplecticMat(RMat::Identity(4, 4))));
  CHECK(admissible_quantization(P.A_half));
  CHECK(admissible_quantization(P.A_0));
  CHECK_FALSE(admissible_quantization(lift_tensor(make_J(1), make_J(1))));
  CHECK(maxabs(E_block(P.A_kernel.matrix()) - 0.5 * ah) == 0.0);
  CHECK(std::abs(E_block(P.A_half.matrix()).determinant()) > 1e-10);
}

TEST_CASE("matrix CSV round trip is exact") {
  std::mt19937 rng(5);
  RMat m = random_generator_product(rng, 2, 5);
  RMat back = parse_matrix_csv(format_matrix_csv(m));
  CHECK(maxabs(back - m) == 0.0);
  CHECK_THROWS_AS(parse_matrix_csv("1,2\n3\n"), Error);
}
