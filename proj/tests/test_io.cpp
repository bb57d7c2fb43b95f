#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "wig/io.hpp"
#include "wig/transforms.hpp"

using namespace wig;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  fs::path p = fs::temp_directory_path() / "wig_test_io";
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST_CASE("WKT byte layout") {
  Tensor t;
  t.dims = {2, 3};
  t.meta = {1.5};
  for (int i = 0; i < 6; ++i) t.v.emplace_back(i, -i);
  std::string b = encode_wkt(t);
  REQUIRE(b.size() == 4 + 4 + 8 + 4 + 8 + 6 * 16);
  CHECK(b.substr(0, 4) == "WGK1");
  // little-endian u32 rank, then dims, then the meta count
  CHECK(static_cast<unsigned char>(b[4]) == 2);
  CHECK(b[5] == 0);
  CHECK(static_cast<unsigned char>(b[8]) == 2);
  CHECK(static_cast<unsigned char>(b[12]) == 3);
  CHECK(static_cast<unsigned char>(b[16]) == 1);
  double m, re, im;
  std::memcpy(&m, b.data() + 20, 8);
  CHECK(m == 1.5);
  std::memcpy(&re, b.data() + 28 + 16 * 5, 8);
  std::memcpy(&im, b.data() + 36 + 16 * 5, 8);
  CHECK(re == 5.0);
  CHECK(im == -5.0);

  CHECK_THROWS_AS(decode_wkt("WGK2" + b.substr(4)), Error);
  CHECK_THROWS_AS(decode_wkt(b.substr(0, b.size() - 1)), Error);
  try {
    decode_wkt("XXXX");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FormatVersion);
  }
}

TEST_CASE("WKT round trips are bit-exact") {
  std::mt19937 rng(7);
  std::normal_distribution<double> N(0.0, 1.0);
  Grid g = Grid::selfdual(1, 16);
  Signal f(g);
  for (auto& z : f.v) z = cplx(N(rng), N(rng)) * 1e-300;  // subnormal-adjacent values survive too
  f[3] = cplx(-0.0, 5e-324);
  fs::path p = scratch() / "f.wkt";
  write_wkt(p.string(), signal_to_tensor(f));
  Tensor t = read_wkt(p.string());
  CHECK(wkt_kind(t) == WktKind::Signal);
  Signal f2 = signal_from_tensor(t);
  CHECK(f2.grid == g);
  CHECK(std::memcmp(f.v.data(), f2.v.data(), f.v.size() * sizeof(cplx)) == 0);

  PhaseField W = wigner(gaussian(g));
  PhaseField W2 = field_from_tensor(decode_wkt(encode_wkt(field_to_tensor(W))));
  CHECK(W2.same_lattice(W));
  CHECK(std::memcmp(W.v.data(), W2.v.data(), W.v.size() * sizeof(cplx)) == 0);

  CMat m(16, 16);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) m(i, j) = cplx(N(rng), N(rng));
  OperatorKernel T(g, m);
  Tensor tT = decode_wkt(encode_wkt(operator_to_tensor(T)));
  CHECK(wkt_kind(tT) == WktKind::Operator);
  CHECK(operator_from_tensor(tT).matrix == m);
  CHECK_THROWS_AS(field_from_tensor(tT), Error);

  Tensor tk = kernel_to_tensor(wigner_kernel(T));
  CHECK(wkt_kind(tk) == WktKind::Kernel);
  CHECK(encode_wkt(decode_wkt(encode_wkt(tk))) == encode_wkt(tk));
}

TEST_CASE("CSV signals and PGM heatmaps") {
  fs::path p = scratch() / "s.csv";
  write_text(p, "# comment\n1.0\n0.5, -0.25\n\n2\n-1,1\n");
  Signal f = read_signal_csv(p.string());
  REQUIRE(f.size() == 4);
  CHECK(f[1] == cplx(0.5, -0.25));
  CHECK(f.grid.h == doctest::Approx(0.5));
  write_signal_csv(p.string(), f);
  CHECK(read_signal_csv(p.string()).v == f.v);

  std::string pgm = encode_pgm({1.0, 1e-4, 1e-9, 0.0}, 2, 2, true);
  const std::string head = "P5\n2 2\n65535\n";
  REQUIRE(pgm.size() == head.size() + 8);
  auto px = [&](int i) {
    return (static_cast<unsigned char>(pgm[head.size() + 2 * i]) << 8) | static_cast<unsigned char>(pgm[head.size() + 2 * i + 1]);
  };
  CHECK(px(0) == 65535);
  CHECK(px(1) == std::lround(0.5 * 65535));  // log10(1e-4) + 8 = 4
  CHECK(px(2) == 0);
  CHECK(px(3) == 0);
  std::string lin = encode_pgm({2.0, 1.0}, 1, 2, false);
  CHECK(static_cast<unsigned char>(lin[lin.size() - 2]) == 0x80);

  // a Gaussian gives a single central blob
  Grid g = Grid::selfdual(1, 32);
  PhaseField W = wigner(gaussian(g));
  fs::path q = scratch() / "w.pgm";
  write_pgm(q.string(), W);
  CHECK(fs::file_size(q) > static_cast<std::uintmax_t>(2 * W.v.size()));
}

TEST_CASE("run and Hamiltonian configs") {
  RunConfig c = RunConfig::parse("n = 48\nh_mode = explicit\nh = 0.2  # comment\nomega=3\nstride=2\n");
  CHECK(c.n == 48);
  CHECK(c.grid().h == 0.2);
  CHECK(c.omega == 3);
  CHECK(RunConfig::parse("").grid() == Grid::selfdual(1, 32));
  CHECK_THROWS_AS(RunConfig::parse("bogus = 1"), Error);
  CHECK_THROWS_AS(RunConfig::parse("n = 30"), Error);
  CHECK_THROWS_AS(RunConfig::parse("n = 32\nn = 16"), Error);
  CHECK_THROWS_AS(RunConfig::parse("h_mode = explicit"), Error);
  CHECK_THROWS_AS(RunConfig::parse("tol = abc"), Error);
  CHECK_THROWS_AS(RunConfig::parse("no equals sign"), Error);

  fs::path dir = scratch();
  write_text(dir / "B.csv", "1\n");
  std::ofstream prof(dir / "p.csv");
  for (int j = 0; j < 16; ++j) prof << 0.1 * j << "\n";
  prof.close();
  write_text(dir / "ham.cfg", "A = 0\nB = B.csv\nC = -1\npert = multiplier\nprofile = p.csv\nn = 16\n");
  HamConfig h = HamConfig::load((dir / "ham.cfg").string());
  CHECK(h.n == 16);
  CHECK(h.H.kind == PertKind::Multiplier);
  CHECK(h.H.samples.size() == 16);
  CHECK(h.H.quad.C(0, 0) == -1);
  CHECK_THROWS_AS(HamConfig::parse("pert = multiplier"), Error);
  CHECK_THROWS_AS(HamConfig::parse("pert = quartic"), Error);
  CHECK_THROWS_AS(HamConfig::parse("D = 1"), Error);

  // KN symbol from a WKT field
  Grid g = Grid::selfdual(1, 16);
  PhaseField s = Symbol::gaussian(1, 1).sample(g);
  write_wkt((dir / "sym.wkt").string(), field_to_tensor(s));
  HamConfig k = HamConfig::parse("pert = kn\nprofile = sym.wkt\nn = 16", dir.string());
  CHECK(k.H.kind == PertKind::KNSymbol);
  CHECK(std::abs(k.H.symbol.fn(0.0, 0.0) - 1.0) <= 1e-14);
  CHECK(std::abs(k.H.symbol.fn(s.x(3), s.xi(3, 5)) - s.at(3, 5)) <= 1e-14);
}
