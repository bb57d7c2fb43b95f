#include "wig/signal.hpp"

#include <cmath>
#include <sstream>

namespace wig {

Grid::Grid(int d_, int n_, double h_) : d(d_), n(n_), h(h_) {
  if (d < 1 || d > 2) throw Error(ErrorCode::DimMismatch, "grid dimension must be 1 or 2");
  if (n < 2 || n % 2 != 0) throw Error(ErrorCode::GridMismatch, "n must be even and >= 2");
  if (!(h > 0)) throw Error(ErrorCode::GridMismatch, "h must be positive");
}

Grid Grid::selfdual(int d, int n) { return Grid(d, n, 1.0 / std::sqrt(static_cast<double>(n))); }

std::size_t Grid::size() const {
  std::size_t s = 1;
  for (int i = 0; i < d; ++i) s *= static_cast<std::size_t>(n);
  return s;
}

Signal::Signal(const Grid& g, std::vector<cplx> values) : grid(g), v(std::move(values)) {
  if (v.size() != g.size()) throw Error(ErrorCode::GridMismatch, "sample count does not match grid");
  for (const auto& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw Error(ErrorCode::GridMismatch, "non-finite sample");
}

double Signal::norm() const {
  double s = 0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s * std::pow(grid.h, grid.d));
}

Signal Signal::conj() const {
  Signal r(*this);
  for (auto& z : r.v) z = std::conj(z);
  return r;
}

Signal& Signal::operator*=(cplx c) {
  for (auto& z : v) z *= c;
  return *this;
}

Signal& Signal::operator+=(const Signal& o) {
  if (o.grid != grid) throw Error(ErrorCode::GridMismatch, "adding signals on different grids");
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
  return *this;
}

Signal& Signal::operator-=(const Signal& o) {
  if (o.grid != grid) throw Error(ErrorCode::GridMismatch, "subtracting signals on different grids");
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= o.v[i];
  return *this;
}

Signal operator+(Signal a, const Signal& b) { return a += b; }
Signal operator-(Signal a, const Signal& b) { return a -= b; }
Signal operator*(cplx c, Signal a) { return a *= c; }

PhaseField PhaseField::rect(const Grid& g, double freq_step) {
  PhaseField F;
  F.grid = g;
  F.kind = LatticeKind::Rect;
  F.nx = g.n;
  F.nxi = g.n;
  F.x_step = g.h;
  F.freq_step = freq_step;
  std::size_t sz = 1;
  for (int i = 0; i < g.d; ++i) sz *= static_cast<std::size_t>(g.n) * g.n;
  F.v.assign(sz, cplx(0.0));
  return F;
}

PhaseField PhaseField::halfstep(const Grid& g) {
  if (g.n % 4 != 0) throw Error(ErrorCode::GridMismatch, "the Wigner lattice needs n divisible by 4");
  PhaseField F;
  F.grid = g;
  F.kind = LatticeKind::HalfStep;
  F.nx = 2 * g.n;
  F.nxi = g.n / 2;
  F.x_step = g.h / 2;
  F.freq_step = g.h;
  std::size_t sz = 1;
  for (int i = 0; i < g.d; ++i) sz *= static_cast<std::size_t>(g.n) * g.n;
  F.v.assign(sz, cplx(0.0));
  return F;
}

double PhaseField::cell() const { return std::pow(x_step * freq_step, grid.d); }

bool PhaseField::same_lattice(const PhaseField& o) const {
  return grid == o.grid && kind == o.kind && nx == o.nx && nxi == o.nxi && x_step == o.x_step &&
         freq_step == o.freq_step && v.size() == o.v.size();
}

double PhaseField::norm() const {
  double s = 0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s * cell());
}

Signal gaussian(const Grid& g) {
  Signal f(g);
  if (g.d == 1) {
    for (int j = 0; j < g.n; ++j) f[j] = std::exp(-kPi * g.x(j) * g.x(j));
  } else {
    for (int a = 0; a < g.n; ++a)
      for (int b = 0; b < g.n; ++b)
        f[static_cast<std::size_t>(a) * g.n + b] = std::exp(-kPi * (g.x(a) * g.x(a) + g.x(b) * g.x(b)));
  }
  return f;
}

namespace {

std::vector<double> hermite_1d(const Grid& g, int k) {
  if (k < 0 || k > g.n / 4) {
    std::ostringstream os;
    os << "order " << k << " exceeds n/4 = " << g.n / 4;
    throw Error(ErrorCode::OrderTooHigh, os.str());
  }
  std::vector<double> out(g.n);
  const double c = std::sqrt(2.0 * kPi);
  for (int j = 0; j < g.n; ++j) {
    double x = g.x(j);
    double p0 = std::pow(2.0, 0.25) * std::exp(-kPi * x * x), p1 = 0.0;
    for (int m = 0; m < k; ++m) {
      double next = std::sqrt(2.0 / (m + 1)) * c * x * p0 - std::sqrt(static_cast<double>(m) / (m + 1)) * p1;
      p1 = p0;
      p0 = next;
    }
    out[j] = p0;
  }
  double s = 0;
  for (double y : out) s += y * y;
  s = std::sqrt(s * g.h);
  for (double& y : out) y /= s;
  return out;
}

}  // namespace

Signal hermite(const Grid& g, int k, int k2) {
  Signal f(g);
  auto a = hermite_1d(g, k);
  if (g.d == 1) {
    for (int j = 0; j < g.n; ++j) f[j] = a[j];
    return f;
  }
  auto b = hermite_1d(g, k2 < 0 ? k : k2);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) f[static_cast<std::size_t>(i) * g.n + j] = a[i] * b[j];
  return f;
}

cplx inner(const Signal& f, const Signal& g) {
  if (f.grid != g.grid) throw Error(ErrorCode::GridMismatch, "inner product on different grids");
  cplx s = 0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::conj(f[i]) * g[i];
  return s * std::pow(f.grid.h, f.grid.d);
}

Signal tensor(const Signal& f, const Signal& g) {
  if (f.grid != g.grid) throw Error(ErrorCode::GridMismatch, "tensor of signals on different grids");
  if (f.grid.d != 1) throw Error(ErrorCode::DimMismatch, "tensor products are formed from d = 1 signals");
  Grid g2(2, f.grid.n, f.grid.h);
  Signal r(g2);
  int n = f.grid.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r[static_cast<std::size_t>(i) * n + j] = f[i] * g[j];
  return r;
}

long lattice_index(double value, double step) {
  double q = value / step;
  double r = std::round(q);
  if (std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q))) {
    std::ostringstream os;
    os << value << " is not a multiple of " << step;
    throw Error(ErrorCode::OffLattice, os.str());
  }
  return static_cast<long>(r);
}

Signal time_freq_shift(const Signal& f, const std::vector<double>& x0, const std::vector<double>& xi0) {
  const Grid& g = f.grid;
  if (static_cast<int>(x0.size()) != g.d || static_cast<int>(xi0.size()) != g.d)
    throw Error(ErrorCode::DimMismatch, "shift vector has the wrong dimension");
  std::vector<long> sx(g.d);
  for (int i = 0; i < g.d; ++i) {
    sx[i] = lattice_index(x0[i], g.h);
    lattice_index(xi0[i], g.dual_step());
  }
  Signal r(g);
  int n = g.n;
  auto wrap = [n](long j) { return static_cast<int>(((j % n) + n) % n); };
  if (g.d == 1) {
    for (int j = 0; j < n; ++j)
      r[j] = std::polar(1.0, 2 * kPi * xi0[0] * g.x(j)) * f[wrap(j - sx[0])];
  } else {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double ph = 2 * kPi * (xi0[0] * g.x(a) + xi0[1] * g.x(b));
        r[static_cast<std::size_t>(a) * n + b] =
            std::polar(1.0, ph) * f[static_cast<std::size_t>(wrap(a - sx[0])) * n + wrap(b - sx[1])];
      }
  }
  return r;
}

Signal time_freq_shift(const Signal& f, double x0, double xi0) {
  return time_freq_shift(f, std::vector<double>{x0}, std::vector<double>{xi0});
}

}  // namespace wig
