#pragma once

#include <cstddef>
#include <vector>

#include "wig/types.hpp"

namespace wig {

// Centered lattice x_j = (j - n/2) h on each of d axes.
struct Grid {
  int d = 1;
  int n = 64;
  double h = 0.125;

  Grid() = default;
  Grid(int d, int n, double h);
  static Grid selfdual(int d, int n);

  double x(int j) const { return (j - n / 2) * h; }
  double dual_step() const { return 1.0 / (n * h); }
  double length() const { return n * h; }
  std::size_t size() const;
  bool operator==(const Grid& o) const { return d == o.d && n == o.n && h == o.h; }
  bool operator!=(const Grid& o) const { return !(*this == o); }
};

struct Signal {
  Grid grid;
  std::vector<cplx> v;  // row-major over axes

  Signal() = default;
  explicit Signal(const Grid& g) : grid(g), v(g.size(), cplx(0.0)) {}
  Signal(const Grid& g, std::vector<cplx> values);

  cplx& operator[](std::size_t i) { return v[i]; }
  const cplx& operator[](std::size_t i) const { return v[i]; }
  std::size_t size() const { return v.size(); }
  double norm() const;  // L2 with quadrature weight h^d
  Signal conj() const;
  Signal& operator*=(cplx c);
  Signal& operator+=(const Signal& o);
  Signal& operator-=(const Signal& o);
  Eigen::Map<const CVec> vec() const { return {v.data(), static_cast<Eigen::Index>(v.size())}; }
  Eigen::Map<CVec> vec() { return {v.data(), static_cast<Eigen::Index>(v.size())}; }
};

Signal operator+(Signal a, const Signal& b);
Signal operator-(Signal a, const Signal& b);
Signal operator*(cplx c, Signal a);

// Phase-space lattice layout.
//  Rect:     n points per x-axis at step h, n points per xi-axis at freq_step.
//  HalfStep: 2n points per x-axis at step h/2, n/2 points per xi-axis at step h;
//            rows with odd x index carry xi values shifted by half a step.
//            This is the lattice of the discrete Wigner distribution.
enum class LatticeKind { Rect = 0, HalfStep = 1 };

struct PhaseField {
  Grid grid;
  LatticeKind kind = LatticeKind::Rect;
  int nx = 0;   // points per x-axis
  int nxi = 0;  // points per xi-axis
  double x_step = 0.0;
  double freq_step = 0.0;
  std::vector<cplx> v;  // axes x_1..x_d, xi_1..xi_d, row-major

  static PhaseField rect(const Grid& g, double freq_step);
  static PhaseField halfstep(const Grid& g);

  int d() const { return grid.d; }
  std::size_t size() const { return v.size(); }
  double x(int s) const { return (s - nx / 2) * x_step; }
  double xi(int s, int k) const {
    double off = (kind == LatticeKind::HalfStep && (s & 1)) ? 0.5 : 0.0;
    return (k - nxi / 2 + off) * freq_step;
  }
  double x_period() const { return nx * x_step; }
  double xi_period() const { return nxi * freq_step; }
  // Measure of one lattice cell in R^{2d}.
  double cell() const;
  bool same_lattice(const PhaseField& o) const;
  double norm() const;  // L2 with cell measure

  // d = 1 accessors
  cplx& at(int s, int k) { return v[static_cast<std::size_t>(s) * nxi + k]; }
  const cplx& at(int s, int k) const { return v[static_cast<std::size_t>(s) * nxi + k]; }
};

// Plain rank-k complex array (row-major) with a free-form metadata block.
struct Tensor {
  std::vector<int> dims;
  std::vector<double> meta;
  std::vector<cplx> v;

  std::size_t count() const {
    std::size_t c = 1;
    for (int d : dims) c *= static_cast<std::size_t>(d);
    return c;
  }
};

Signal gaussian(const Grid& g);
// Hermite function h_k (L2-normalized by quadrature). For d = 2 the product
// h_k (x) h_k2 is returned (k2 < 0 means k2 = k).
Signal hermite(const Grid& g, int k, int k2 = -1);

cplx inner(const Signal& f, const Signal& g);  // h^d sum conj(f) g
Signal tensor(const Signal& f, const Signal& g);

// pi(x0, xi0) = M_xi0 T_x0; x0 on the grid lattice and xi0 on the dual lattice.
Signal time_freq_shift(const Signal& f, const std::vector<double>& x0, const std::vector<double>& xi0);
Signal time_freq_shift(const Signal& f, double x0, double xi0);

// Integer multiple of step, or OffLattice.
long lattice_index(double value, double step);

}  // namespace wig
