#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "wig/modnorm.hpp"
#include "wig/transforms.hpp"

using namespace wig;

namespace {

const double inf = std::numeric_limits<double>::infinity();

Signal packet(const Grid& g, double a, double c, double w) {
  Signal f(g);
  for (int j = 0; j < g.n; ++j) {
    double t = g.x(j);
    f[j] = std::exp(-kPi * a * (t - c) * (t - c)) * std::polar(1.0, 2 * kPi * w * t);
  }
  return f;
}

PhaseField random_field(const Grid& g, std::mt19937& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  PhaseField F = PhaseField::rect(g, g.dual_step());
  for (auto& z : F.v) z = cplx(N(rng), N(rng));
  return F;
}

// Weighted L2 norm of the STFT straight from the definition, any centered
// rectangular lattice with two axes.
double brute_l2(const std::vector<cplx>& F, int n0, int n1, double d0, double d1, const Weight& m) {
  auto gauss = [](int N, double step) {
    std::vector<double> g(N);
    double s = 0;
    for (int j = 0; j < N; ++j) {
      double t = (j - N / 2) * step;
      g[j] = std::exp(-kPi * t * t);
      s += g[j] * g[j] * step;
    }
    for (auto& v : g) v /= std::sqrt(s);
    return g;
  };
  auto g0 = gauss(n0, d0), g1 = gauss(n1, d1);
  double e0 = 1.0 / (n0 * d0), e1 = 1.0 / (n1 * d1);
  double total = 0;
  for (int x0 = 0; x0 < n0; ++x0)
    for (int x1 = 0; x1 < n1; ++x1)
      for (int k0 = 0; k0 < n0; ++k0)
        for (int k1 = 0; k1 < n1; ++k1) {
          double X0 = (x0 - n0 / 2) * d0, X1 = (x1 - n1 / 2) * d1;
          double K0 = (k0 - n0 / 2) * e0, K1 = (k1 - n1 / 2) * e1;
          cplx v = 0;
          for (int t0 = 0; t0 < n0; ++t0)
            for (int t1 = 0; t1 < n1; ++t1) {
              double w = g0[((t0 - x0 + n0 / 2) % n0 + n0) % n0] * g1[((t1 - x1 + n1 / 2) % n1 + n1) % n1];
              double T0 = (t0 - n0 / 2) * d0, T1 = (t1 - n1 / 2) * d1;
              v += F[t0 * n1 + t1] * w * std::polar(1.0, -2 * kPi * (K0 * T0 + K1 * T1));
            }
          v *= d0 * d1;
          double z[4] = {X0, X1, K0, K1};
          double wt = m(z, 4);
          total += std::norm(v) * wt * wt * d0 * d1 * e0 * e1;
        }
  return std::sqrt(total);
}

}  // namespace

TEST_CASE("weights") {
  double z[2] = {3.0, 4.0};
  CHECK(Weight::one()(z, 2) == 1.0);
  CHECK(Weight::vs(2)(z, 2) == doctest::Approx(26.0));
  CHECK(Weight::vs(1)(z, 2) == doctest::Approx(std::sqrt(26.0)));
  CHECK(Weight::one_tensor_vs(2)(z, 2) == doctest::Approx(17.0));
  CHECK(Weight::vs(0)(z, 2) == 1.0);
  CHECK_THROWS_AS(Weight::vs(-1), Error);
  std::mt19937 rng(1);
  std::normal_distribution<double> N(0.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    double a[4], b[4], c[4];
    for (int j = 0; j < 4; ++j) {
      a[j] = N(rng);
      b[j] = N(rng);
      c[j] = a[j] + b[j];
    }
    for (double s : {0.5, 1.0, 2.5}) CHECK(Weight::vs(s)(c, 4) <= Weight::vs(s)(a, 4) * Weight::vs(s)(b, 4) * (1 + 1e-12));
  }
}

TEST_CASE("mixed norm basics") {
  Grid g = Grid::selfdual(1, 16);
  PhaseField one = PhaseField::rect(g, g.dual_step());
  for (auto& z : one.v) z = 1.0;
  CHECK(mixed_norm(one, inf, inf, Weight::one()) == 1.0);
  std::mt19937 rng(2);
  PhaseField F = random_field(g, rng);
  CHECK(mixed_norm(F, 2, 2, Weight::one()) == doctest::Approx(F.norm()).epsilon(1e-13));
  PhaseField hot = PhaseField::rect(g, g.dual_step());
  hot.at(5, 11) = 1.0;
  double z[2] = {hot.x(5), hot.xi(5, 11)};
  CHECK(mixed_norm(hot, inf, 1, Weight::vs(1.5)) ==
        doctest::Approx(Weight::vs(1.5)(z, 2) * hot.freq_step).epsilon(1e-14));
  CHECK_THROWS_AS(mixed_norm(F, 0, 2, Weight::one()), Error);
  CHECK_THROWS_AS(mixed_norm(F, 2, -1, Weight::one()), Error);
}

TEST_CASE("homogeneity, triangle and quasi-triangle inequalities") {
  std::mt19937 rng(3);
  Grid g = Grid::selfdual(1, 16);
  for (int trial = 0; trial < 10; ++trial) {
    PhaseField F = random_field(g, rng), G = random_field(g, rng), S = F, L = F;
    for (std::size_t i = 0; i < F.size(); ++i) {
      S.v[i] = F.v[i] + G.v[i];
      L.v[i] = cplx(-2.5, 1.0) * F.v[i];
    }
    for (auto pq : std::vector<std::pair<double, double>>{{1, 1}, {2, 1}, {1, inf}, {inf, 2}, {3, 1.5}}) {
      Weight m = Weight::vs(1);
      double a = mixed_norm(F, pq.first, pq.second, m), b = mixed_norm(G, pq.first, pq.second, m);
      CHECK(mixed_norm(S, pq.first, pq.second, m) <= a + b + 1e-12);
      CHECK(mixed_norm(L, pq.first, pq.second, m) == doctest::Approx(std::abs(cplx(-2.5, 1.0)) * a).epsilon(1e-14));
    }
    for (double q : {0.5, 0.8}) {
      double a = mixed_norm(F, 1, q, Weight::one()), b = mixed_norm(G, 1, q, Weight::one());
      CHECK(std::pow(mixed_norm(S, 1, q, Weight::one()), q) <= std::pow(a, q) + std::pow(b, q) + 1e-12);
    }
  }
}

TEST_CASE("M2 equals L2 and window equivalence") {
  Grid g = Grid::selfdual(1, 64);
  for (int k = 0; k <= 4; ++k) {
    Signal h = hermite(g, k);
    CHECK(std::abs(mod_norm(h, 2, 2, Weight::one()) - h.norm()) <= 1e-8);
  }
  Signal f = packet(g, 1.3, 0.4, -0.3);
  CHECK(std::abs(mod_norm(f, 2, 2, Weight::one()) - f.norm()) <= 1e-8);
  Signal phi = gaussian(g);
  double a = mod_norm(phi, 1, 1, Weight::one(), default_window(g));
  double b = mod_norm(phi, 1, 1, Weight::one(), hermite(g, 2));
  MESSAGE("M^{1,1} of the Gaussian, phi window " << a << ", h_2 window " << b);
  CHECK(std::isfinite(a));
  CHECK(std::max(a, b) / std::min(a, b) <= 1.5);
  Signal moved = time_freq_shift(f, 5 * g.h, -3 * g.h);
  for (auto pq : std::vector<std::pair<double, double>>{{1, 1}, {2, 1}, {inf, 1}})
    CHECK(std::abs(mod_norm(moved, pq.first, pq.second, Weight::one()) - mod_norm(f, pq.first, pq.second, Weight::one())) <=
          1e-8);
  CHECK_THROWS_AS(mod_norm(f, 2, 2, Weight::one(), Signal(g)), Error);
}

TEST_CASE("inclusion monotonicity on the lattice") {
  Grid g = Grid::selfdual(1, 32);
  Signal f = packet(g, 0.9, -0.5, 0.75);
  PhaseField V = stft(f, default_window(g));
  std::vector<std::pair<double, double>> pq{{1, 1}, {1, 2}, {2, 2}, {2, inf}, {inf, inf}};
  for (std::size_t i = 0; i < pq.size(); ++i)
    for (std::size_t j = i; j < pq.size(); ++j) {
      auto [p1, q1] = pq[i];
      auto [p2, q2] = pq[j];
      if (p1 > p2 || q1 > q2) continue;
      // on a lattice with cell c, |a|_{p2} <= c^{1/p2 - 1/p1} |a|_{p1}
      double C = std::pow(V.x_step, 1 / p2 - 1 / p1) * std::pow(V.freq_step, 1 / q2 - 1 / q1);
      CHECK(mixed_norm(V, p2, q2, Weight::one()) <= C * mixed_norm(V, p1, q1, Weight::one()) * (1 + 1e-12));
    }
}

TEST_CASE("tensor norm identity") {
  Grid g = Grid::selfdual(1, 16);
  for (const Signal& f : {gaussian(g), hermite(g, 1)})
    for (auto pq : std::vector<std::pair<double, double>>{{2, 2}, {1, 1}, {1, 2}, {inf, 1}}) {
      auto [lhs, rhs] = tensor_norm_check(f, pq.first, pq.second);
      CHECK(std::abs(lhs - rhs) <= 1e-6 * rhs);
    }
  auto [lw, rw] = tensor_norm_check(hermite(g, 1), 1, 1, Weight::vs(1));
  CHECK(lw <= rw * (1 + 1e-9));
}

TEST_CASE("Shubin and Sobolev norms") {
  Grid g = Grid::selfdual(1, 32);
  Signal phi = gaussian(g);
  auto [q0, h0] = shubin_sobolev(phi, 0);
  CHECK(std::abs(q0 - phi.norm()) <= 1e-8);
  CHECK(std::abs(h0 - phi.norm()) <= 1e-8);
  auto [q1, h1] = shubin_sobolev(phi, 1);
  auto [q2, h2] = shubin_sobolev(phi, 2);
  CHECK(q0 < q1);
  CHECK(q1 < q2);
  CHECK(h1 < q1);
  // a high-frequency packet pays v_s at its frequency
  Signal hi = packet(g, 1.0, 0.0, 2.0), lo = packet(g, 1.0, 0.0, 0.0);
  double ratio = shubin_sobolev(hi, 2).second / shubin_sobolev(lo, 2).second;
  CHECK(ratio > 3.0);
  CHECK(ratio < 6.0);
}

TEST_CASE("closed-form weighted L2 norm matches the STFT") {
  Grid g = Grid::selfdual(1, 32);
  Signal f = packet(g, 1.4, 0.6, -0.8);
  for (Weight m : {Weight::one(), Weight::vs(1), Weight::one_tensor_vs(1), Weight::vs(0)}) {
    double direct = mod_norm(f, 2, 2, m);
    double closed = l2_mod_norm(f.v.data(), {32}, {g.h}, m);
    CHECK(std::abs(direct - closed) <= 1e-10 * direct);
  }
  Grid g2 = Grid::selfdual(2, 8);
  std::mt19937 rng(4);
  std::normal_distribution<double> N(0.0, 1.0);
  Signal F(g2);
  for (auto& z : F.v) z = cplx(N(rng), N(rng));
  for (Weight m : {Weight::vs(1), Weight::one_tensor_vs(1)}) {
    double direct = mod_norm(F, 2, 2, m);
    double closed = l2_mod_norm(F.v.data(), {8, 8}, {g2.h, g2.h}, m);
    CHECK(std::abs(direct - closed) <= 1e-10 * direct);
  }
  // unequal axes and steps against the definition
  std::vector<cplx> R(8 * 4);
  for (auto& z : R) z = cplx(N(rng), N(rng));
  for (Weight m : {Weight::one(), Weight::vs(1), Weight::one_tensor_vs(1)}) {
    double direct = brute_l2(R, 8, 4, 0.3, 0.7, m);
    double closed = l2_mod_norm(R.data(), {8, 4}, {0.3, 0.7}, m);
    CHECK(std::abs(direct - closed) <= 1e-10 * direct);
  }
  CHECK_THROWS_AS(l2_mod_norm(R.data(), {8, 4}, {0.3, 0.7}, Weight::vs(2)), Error);
}
