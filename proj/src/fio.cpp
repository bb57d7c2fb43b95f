#include "wig/fio.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "wig/fft.hpp"
#include "wig/parallel.hpp"
#include "wig/transforms.hpp"

namespace wig {

namespace {

void require_1d_phase(const QuadraticPhase& phi) {
  if (phi.d() != 1) throw Error(ErrorCode::DimMismatch, "operator matrices are built for d = 1 phases");
}

void require_symbol(const PhaseField& s) {
  if (s.d() != 1 || s.kind != LatticeKind::Rect || s.nx != s.grid.n || s.nxi != s.grid.n)
    throw Error(ErrorCode::LatticeMismatch, "symbol must be sampled on the n x n rectangular lattice");
}

double wrap(double v, double P) { return v - P * std::floor(v / P + 0.5); }

}  // namespace

QuadraticPhase QuadraticPhase::from_symplectic(const SymplecticMat& S) {
  RMat A = S.A();
  Eigen::FullPivLU<RMat> lu(A);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularL, "the upper-left block is singular");
  QuadraticPhase q;
  q.Q = lu.inverse();
  q.P = S.C() * q.Q;
  q.R = q.Q * S.B();
  // numerical symmetrisation; both are symmetric for symplectic S
  q.P = (q.P + q.P.transpose()) / 2;
  q.R = (q.R + q.R.transpose()) / 2;
  return q;
}

QuadraticPhase QuadraticPhase::kohn_nirenberg(int d) {
  return {RMat::Zero(d, d), RMat::Identity(d, d), RMat::Zero(d, d)};
}

SymplecticMat QuadraticPhase::symplectic() const {
  const int d = this->d();
  RMat A = Q.inverse();
  RMat m(2 * d, 2 * d);
  m.topLeftCorner(d, d) = A;
  m.topRightCorner(d, d) = A * R;
  m.bottomLeftCorner(d, d) = P * A;
  m.bottomRightCorner(d, d) = A.transpose().inverse() + P * A * R;
  return SymplecticMat(m, 1e-9);
}

double QuadraticPhase::operator()(double x, double eta) const {
  return 0.5 * P(0, 0) * x * x + eta * Q(0, 0) * x - 0.5 * R(0, 0) * eta * eta;
}

PhaseField Symbol::sample(const Grid& g) const {
  if (g.d != 1) throw Error(ErrorCode::DimMismatch, "symbols are sampled on d = 1 grids");
  PhaseField s = PhaseField::rect(g, g.dual_step());
  for (int j = 0; j < s.nx; ++j)
    for (int k = 0; k < s.nxi; ++k) s.at(j, k) = fn(s.x(j), s.xi(j, k));
  return s;
}

Symbol Symbol::constant(cplx c) {
  return {[c](double, double) { return c; }};
}

Symbol Symbol::gaussian(double a, double b, double kappa, cplx c, cplx offset) {
  return {[=](double x, double e) {
    return c * std::exp(cplx(-kPi * (a * x * x + b * e * e), -2 * kPi * kappa * x * e)) + offset;
  }};
}

OperatorKernel kn_op(const PhaseField& sigma) {
  require_symbol(sigma);
  const Grid& g = sigma.grid;
  const int n = g.n;
  CMat m(n, n);
  parallel_for(n, [&](std::size_t js) {
    const int j = static_cast<int>(js);
    std::vector<cplx> row(sigma.v.begin() + static_cast<std::ptrdiff_t>(j) * n,
                          sigma.v.begin() + static_cast<std::ptrdiff_t>(j + 1) * n);
    // row[K] is the lag (K - n/2) h kernel value
    centered_dft(row.data(), n, +1, sigma.freq_step);
    for (int jp = 0; jp < n; ++jp) m(j, jp) = row[((j - jp + n / 2) % n + n) % n];
  });
  return OperatorKernel(g, m);
}

OperatorKernel type1_fio(const PhaseField& sigma, const QuadraticPhase& phi) {
  require_symbol(sigma);
  require_1d_phase(phi);
  const Grid& g = sigma.grid;
  const int n = g.n;
  CMat m(n, n);
  parallel_for(n, [&](std::size_t js) {
    const int j = static_cast<int>(js);
    const double x = sigma.x(j);
    std::vector<cplx> row(n);
    for (int k = 0; k < n; ++k) row[k] = std::polar(1.0, 2 * kPi * phi(x, sigma.xi(j, k))) * sigma.at(j, k);
    centered_dft(row.data(), n, -1, sigma.freq_step);
    for (int jp = 0; jp < n; ++jp) m(j, jp) = row[jp];
  });
  return OperatorKernel(g, m);
}

OperatorKernel type2_adjoint(const OperatorKernel& T) { return T.adjoint(); }

Tensor sigma_I(const PhaseField& sigma) {
  require_symbol(sigma);
  const int n = sigma.grid.n, M = n / 2, nx = 2 * n;
  Tensor t;
  t.dims = {nx, nx, M, M};
  t.meta = {sigma.grid.h, sigma.x_step / 2, sigma.freq_step / 2};
  t.v.resize(t.count());
  std::size_t i = 0;
  for (int sx = 0; sx < nx; ++sx)
    for (int se = 0; se < nx; ++se)
      for (int mt = 0; mt < M; ++mt) {
        int ax, bx;
        halfstep::pair(n, sx, mt, ax, bx);
        for (int mr = 0; mr < M; ++mr) {
          int ae, be;
          halfstep::pair(n, se, mr, ae, be);
          t.v[i++] = sigma.at(ax, ae) * std::conj(sigma.at(bx, be));
        }
      }
  return t;
}

WignerKernel wigner_kernel_type1(const Symbol& sigma, const QuadraticPhase& phi, const Grid& g,
                                 const Type1Options& opt) {
  require_1d_phase(phi);
  if (g.d != 1 || g.n % 4 != 0) throw Error(ErrorCode::GridMismatch, "the Wigner lattice needs d = 1 and 4 | n");
  if (opt.refine < 1) throw Error(ErrorCode::Usage, "refine must be positive");
  const int n = g.n, M = n / 2, nx = 2 * n, r = opt.refine;
  const double h = g.h, step = h / (2 * r), q = step / 2;
  const int nodes = opt.nodes > 0 ? opt.nodes : 4 * n * r;
  // every argument x +- t/2 and eta +- r/2 sits on the fine lattice of step q
  const int half = 4 * n * r + nodes / 2 + 2;
  const int width = 2 * half + 1;
  std::vector<cplx> table(static_cast<std::size_t>(width) * width);
  parallel_for(width, [&](std::size_t a) {
    for (int b = 0; b < width; ++b)
      table[a * width + b] = sigma.fn((static_cast<int>(a) - half) * q, (b - half) * q);
  });
  auto at = [&](int ia, int ib) { return table[static_cast<std::size_t>(ia + half) * width + (ib + half)]; };

  WignerKernel K = zero_kernel(g);
  const PhaseField& L = K.lattice;
  const double Px = L.x_period(), Pxi = L.xi_period();

  const double P = phi.P(0, 0), Qc = phi.Q(0, 0), R = phi.R(0, 0);
  std::vector<double> tn(nodes);
  for (int a = 0; a < nodes; ++a) tn[a] = (a - nodes / 2) * step;
  const double w2 = step * step;

  parallel_for(nx, [&](std::size_t szs) {
    const int sz = static_cast<int>(szs);
    const double x = L.x(sz);
    const int ix = (sz - n) * 2 * r;  // x in units of q
    CMat G(nodes, nodes), Eu(M, nodes), Ev(nodes, n);
    for (int pw = 0; pw < 2; ++pw)
      for (int kw = 0; kw < M; ++kw) {
        const double eta = L.xi(pw, kw);
        const int ie = (4 * kw - n + 2 * pw) * r;  // eta in units of q
        for (int a = 0; a < nodes; ++a) {
          const int ta = a - nodes / 2;  // t / 2 = ta q
          for (int b = 0; b < nodes; ++b) {
            const int rb = b - nodes / 2;
            G(a, b) = at(ix + ta, ie + rb) * std::conj(at(ix - ta, ie - rb));
          }
        }
        for (int kz = 0; kz < M; ++kz) {
          const double u = L.xi(sz, kz) - P * x - Qc * eta;
          for (int a = 0; a < nodes; ++a) {
            cplx acc = 0;
            for (int j = -opt.images; j <= opt.images; ++j)
              acc += ((sz & 1) && (j & 1) ? -1.0 : 1.0) * std::polar(1.0, -2 * kPi * tn[a] * (u + j * Pxi));
            Eu(kz, a) = acc;
          }
        }
        // columns: rows s_w of parity pw
        for (int c = 0; c < n; ++c) {
          const int sw = 2 * c + pw;
          const double v = L.x(sw) - Qc * x + R * eta;
          for (int b = 0; b < nodes; ++b) {
            cplx acc = 0;
            for (int j = -opt.images; j <= opt.images; ++j)
              acc += ((pw & 1) && (j & 1) ? -1.0 : 1.0) * std::polar(1.0, -2 * kPi * tn[b] * (v + j * Px));
            Ev(b, c) = acc;
          }
        }
        CMat W = w2 * (Eu * G * Ev);
        for (int c = 0; c < n; ++c) {
          const int sw = 2 * c + pw;
          for (int kz = 0; kz < M; ++kz)
            K.k(static_cast<Eigen::Index>(sz) * M + kz, static_cast<Eigen::Index>(sw) * M + kw) = W(kz, c);
        }
      }
  });
  return K;
}

namespace {

// h(z, z + v) = k(z, S^{-1}(z + v)) laid out as (s_z, k_z, s_v, k_v).
std::vector<cplx> shifted_symbol(const WignerKernel& k, const SymplecticMat& S, bool& snapped) {
  const PhaseField& L = k.lattice;
  const int n = k.grid.n, M = L.nxi, nx = L.nx;
  const double h = k.grid.h, Px = L.x_period(), Pxi = L.xi_period();
  const Eigen::Index N = k.k.rows();
  const RMat Si = S.inverse().matrix();
  auto snap = [&](double x, double xi, bool& off) {
    x = wrap(x, Px);
    double fs = std::round(x / L.x_step);
    off = off || std::abs(fs * L.x_step - x) > 1e-9 * h;
    int s = ((static_cast<int>(fs) + n) % nx + nx) % nx;
    double o = (s & 1) ? 0.5 : 0.0;
    double rel = wrap(xi - o * L.freq_step, Pxi) / L.freq_step;
    double fk = std::round(rel);
    off = off || std::abs(fk - rel) > 1e-9;
    int kk = ((static_cast<int>(fk) + M / 2) % M + M) % M;
    return static_cast<Eigen::Index>(s) * M + kk;
  };
  std::vector<Eigen::Index> target(N);
  bool off = false;
  for (Eigen::Index u = 0; u < N; ++u) {
    int s = static_cast<int>(u / M), kk = static_cast<int>(u % M);
    double x = L.x(s), xi = L.xi(s, kk);
    target[u] = snap(Si(0, 0) * x + Si(0, 1) * xi, Si(1, 0) * x + Si(1, 1) * xi, off);
  }
  snapped = off;
  std::vector<cplx> b(static_cast<std::size_t>(N) * N);
  for (Eigen::Index z = 0; z < N; ++z) {
    int sz = static_cast<int>(z / M), kz = static_cast<int>(z % M);
    for (Eigen::Index u = 0; u < N; ++u) {
      int su = static_cast<int>(u / M), ku = static_cast<int>(u % M);
      bool dummy = false;
      Eigen::Index v = snap(L.x(su) - L.x(sz), L.xi(su, ku) - L.xi(sz, kz), dummy);
      b[static_cast<std::size_t>(z) * N + v] = k.k(z, target[u]);
    }
  }
  return b;
}

// sup over decimated positions, weighted l^q over frequencies, of a local
// Gaussian-window STFT of a 4-axis array.
double decimated_symbol_norm(const std::vector<cplx>& b, const std::vector<int>& dims,
                             const std::vector<double>& steps, double q, double s, int stride) {
  std::vector<int> box(4);
  int nb = 1;
  for (int i = 0; i < 4; ++i) {
    box[i] = std::min(dims[i], dims[i] >= 16 ? 8 : 4);
    nb *= box[i];
  }
  double cell = 1, fcell = 1;
  for (int i = 0; i < 4; ++i) {
    cell *= steps[i];
    fcell /= box[i] * steps[i];
  }
  std::vector<std::vector<double>> win(4);
  double wn = 0;
  for (int i = 0; i < 4; ++i) {
    win[i].resize(box[i]);
    for (int j = 0; j < box[i]; ++j) {
      double t = (j - box[i] / 2) / (box[i] / 4.0);
      win[i][j] = std::exp(-kPi * t * t / 2);
    }
  }
  {
    double a = 1;
    for (int i = 0; i < 4; ++i) {
      double si = 0;
      for (double v : win[i]) si += v * v;
      a *= si;
    }
    wn = 1.0 / std::sqrt(a * cell);
  }
  std::vector<int> pos[4];
  for (int i = 0; i < 4; ++i)
    for (int p = 0; p < dims[i]; p += std::max(1, stride)) pos[i].push_back(p);
  const std::size_t npos = pos[0].size() * pos[1].size() * pos[2].size() * pos[3].size();
  std::vector<std::vector<double>> best(npos);
  parallel_for(npos, [&](std::size_t P) {
    std::size_t r = P;
    int p[4];
    for (int i = 3; i >= 0; --i) {
      p[i] = pos[i][r % pos[i].size()];
      r /= pos[i].size();
    }
    std::vector<cplx> loc(nb);
    std::size_t li = 0;
    for (int a = 0; a < box[0]; ++a)
      for (int c = 0; c < box[1]; ++c)
        for (int e = 0; e < box[2]; ++e)
          for (int f = 0; f < box[3]; ++f) {
            int id[4] = {a, c, e, f}, g[4];
            double w = wn;
            for (int i = 0; i < 4; ++i) {
              g[i] = ((p[i] + id[i] - box[i] / 2) % dims[i] + dims[i]) % dims[i];
              w *= win[i][id[i]];
            }
            std::size_t gi = ((static_cast<std::size_t>(g[0]) * dims[1] + g[1]) * dims[2] + g[2]) * dims[3] + g[3];
            loc[li++] = b[gi] * w;
          }
    for (int i = 0; i < 4; ++i) centered_dft_axis(loc, box, i, -1, steps[i]);
    best[P].resize(nb);
    for (int j = 0; j < nb; ++j) best[P][j] = std::abs(loc[j]);
  });
  std::vector<double> sup(nb, 0.0);
  for (const auto& v : best)
    for (int j = 0; j < nb; ++j) sup[j] = std::max(sup[j], v[j]);
  double acc = 0;
  int id[4] = {0, 0, 0, 0};
  for (int j = 0; j < nb; ++j) {
    double r2 = 0;
    for (int i = 0; i < 4; ++i) {
      double F = (id[i] - box[i] / 2) / (box[i] * steps[i]);
      r2 += F * F;
    }
    double a = sup[j] * std::pow(1 + r2, s / 2);
    if (std::isinf(q)) acc = std::max(acc, a);
    else acc += std::pow(a, q) * fcell;
    for (int i = 3; i >= 0; --i) {
      if (++id[i] < box[i]) break;
      id[i] = 0;
    }
  }
  return std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
}

// Tail masses below this are roundoff in the kernel entries.
constexpr double kMassFloor = 1e-24;

double fitted_exponent(const DecayCurve& c) {
  std::vector<double> X, Y;
  for (std::size_t i = 0; i < c.radii.size(); ++i)
    if (c.radii[i] > 0 && c.mass[i] > kMassFloor) {
      X.push_back(std::log(c.radii[i]));
      Y.push_back(-std::log(c.mass[i]));
    }
  if (c.mass.empty() || c.mass.back() <= kMassFloor) return std::numeric_limits<double>::infinity();
  if (X.size() < 2) return 0.0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    mx += X[i];
    my += Y[i];
  }
  mx /= X.size();
  my /= X.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    sxy += (X[i] - mx) * (Y[i] - my);
    sxx += (X[i] - mx) * (X[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

}  // namespace

MembershipReport fio_membership(const WignerKernel& k, const SymplecticMat& S, const MembershipOptions& opt) {
  if (S.d() != 1) throw Error(ErrorCode::DimMismatch, "membership diagnostics use d = 1");
  const RMat& m = S.matrix();
  Eigen::JacobiSVD<RMat> svd(m);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 0) || sv(0) / sv(sv.size() - 1) > 1e8)
    throw Error(ErrorCode::IllConditionedS, "the canonical transformation is ill-conditioned");
  MembershipReport r;
  r.stride = opt.stride;
  std::vector<double> radii = opt.radii;
  bool has_tail = false;
  for (double R : radii) has_tail = has_tail || R == opt.tail_radius;
  if (!has_tail) radii.push_back(opt.tail_radius);
  std::sort(radii.begin(), radii.end());
  r.decay = concentration_profile(k, S, radii);
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (radii[i] == opt.tail_radius) r.tail = r.decay.mass[i];
  r.exponent = fitted_exponent(r.decay);

  const int n = k.grid.n;
  const double h = k.grid.h;
  std::vector<cplx> b = shifted_symbol(k, S, r.snapped);
  r.symbol_norm = decimated_symbol_norm(b, {2 * n, n / 2, 2 * n, n / 2}, {h / 2, h, h / 2, h}, opt.q, opt.s,
                                        opt.stride);
  r.pass = r.tail < opt.tail_max && r.exponent >= opt.s + 1;
  return r;
}

MembershipReport fio_membership(const OperatorKernel& T, const SymplecticMat& S, const MembershipOptions& opt) {
  KernelOptions ko;
  ko.max_n = opt.max_n;
  return fio_membership(wigner_kernel(T, ko), S, opt);
}

std::string membership_json(const MembershipReport& r) {
  nlohmann::json j;
  nlohmann::json prof = nlohmann::json::array();
  for (std::size_t i = 0; i < r.decay.radii.size(); ++i) prof.push_back({r.decay.radii[i], r.decay.mass[i]});
  j["decay_profile"] = prof;
  j["tail"] = r.tail;
  j["symbol_norm"] = r.symbol_norm;
  j["exponent"] = std::isinf(r.exponent) ? nlohmann::json("inf") : nlohmann::json(r.exponent);
  j["snapped"] = r.snapped;
  j["stride"] = r.stride;
  j["pass"] = r.pass;
  return j.dump();
}

}  // namespace wig
