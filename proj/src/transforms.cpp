#include "wig/transforms.hpp"

#include <cmath>
#include <functional>

#include "wig/fft.hpp"
#include "wig/metaplectic.hpp"
#include "wig/parallel.hpp"

namespace wig {

namespace {

std::vector<int> signal_dims(const Grid& g) { return std::vector<int>(g.d, g.n); }

void require_same(const Signal& f, const Signal& g) {
  if (f.grid != g.grid) throw Error(ErrorCode::GridMismatch, "signals live on different grids");
}

}  // namespace

Signal dft(const Signal& f) {
  Signal r(f);
  auto dims = signal_dims(f.grid);
  for (int a = 0; a < f.grid.d; ++a) centered_dft_axis(r.v, dims, a, -1, f.grid.h);
  return r;
}

Signal idft(const Signal& f) {
  Signal r(f);
  auto dims = signal_dims(f.grid);
  for (int a = 0; a < f.grid.d; ++a) centered_dft_axis(r.v, dims, a, +1, f.grid.dual_step());
  return r;
}

Signal partial_ft2(const Signal& F) {
  if (F.grid.d != 2) throw Error(ErrorCode::DimMismatch, "partial_ft2 needs a function of two variables");
  Signal r(F);
  centered_dft_axis(r.v, signal_dims(F.grid), 1, -1, F.grid.h);
  return r;
}

Signal partial_ift2(const Signal& F) {
  if (F.grid.d != 2) throw Error(ErrorCode::DimMismatch, "partial_ift2 needs a function of two variables");
  Signal r(F);
  centered_dft_axis(r.v, signal_dims(F.grid), 1, +1, F.grid.dual_step());
  return r;
}

PhaseField stft(const Signal& f, const Signal& g) {
  require_same(f, g);
  double gn = g.norm();
  if (!(gn > 0)) throw Error(ErrorCode::ZeroWindow, "window is identically zero");
  const Grid& G = f.grid;
  const int n = G.n;
  PhaseField V = PhaseField::rect(G, G.dual_step());
  auto wrap = [n](int j) { return ((j % n) + n) % n; };
  const double scale = std::pow(G.h, G.d);
  if (G.d == 1) {
    parallel_for(n, [&](std::size_t xs) {
      int x = static_cast<int>(xs);
      cplx* row = V.v.data() + static_cast<std::size_t>(x) * n;
      for (int t = 0; t < n; ++t) row[t] = f[t] * std::conj(g[wrap(t - x + n / 2)]);
      centered_dft(row, n, -1, scale);
    });
  } else {
    // axes (x1, x2, xi1, xi2)
    const std::size_t plane = static_cast<std::size_t>(n) * n;
    parallel_for(plane, [&](std::size_t xi) {
      int x1 = static_cast<int>(xi / n), x2 = static_cast<int>(xi % n);
      std::vector<cplx> buf(plane);
      for (int t1 = 0; t1 < n; ++t1)
        for (int t2 = 0; t2 < n; ++t2)
          buf[static_cast<std::size_t>(t1) * n + t2] =
              f[static_cast<std::size_t>(t1) * n + t2] *
              std::conj(g[static_cast<std::size_t>(wrap(t1 - x1 + n / 2)) * n + wrap(t2 - x2 + n / 2)]);
      std::vector<int> dims{n, n};
      centered_dft_axis(buf, dims, 0, -1, G.h);
      centered_dft_axis(buf, dims, 1, -1, G.h);
      std::copy(buf.begin(), buf.end(), V.v.begin() + xi * plane);
    });
  }
  return V;
}

namespace halfstep {

cplx pre(int n, int sigma, int mm) {
  if (!sigma) return 1.0;
  return std::polar(1.0, -2 * kPi * (mm - n / 4) / static_cast<double>(n));
}

cplx post(int n, int sigma, int k, double h) {
  if (!sigma) return 2 * h;
  return std::polar(2 * h, -2 * kPi * ((k - n / 4) + 0.5) / static_cast<double>(n));
}

}  // namespace halfstep

namespace {

// Wigner transform of rho[a][b] for d = 1.
PhaseField wigner_1d(const Grid& G, const std::function<cplx(int, int)>& rho) {
  PhaseField W = PhaseField::halfstep(G);
  const int n = G.n, M = n / 2;
  parallel_for(2 * n, [&](std::size_t ss) {
    int s = static_cast<int>(ss), sg = s & 1;
    cplx* row = W.v.data() + ss * M;
    for (int mm = 0; mm < M; ++mm) {
      int a, b;
      halfstep::pair(n, s, mm, a, b);
      row[mm] = halfstep::pre(n, sg, mm) * rho(a, b);
    }
    centered_dft(row, M, -1, 1.0);
    for (int k = 0; k < M; ++k) row[k] *= halfstep::post(n, sg, k, G.h);
  });
  return W;
}

}  // namespace

PhaseField wigner(const Signal& f, const Signal& g) {
  require_same(f, g);
  const Grid& G = f.grid;
  if (G.d == 1) return wigner_1d(G, [&](int a, int b) { return f[a] * std::conj(g[b]); });

  PhaseField W = PhaseField::halfstep(G);
  const int n = G.n, M = n / 2, nx = 2 * n;
  // axes (s1, s2, k1, k2); one s1 slab at a time
  const std::size_t slab = static_cast<std::size_t>(nx) * M * M;
  parallel_for(nx, [&](std::size_t s1s) {
    int s1 = static_cast<int>(s1s);
    std::vector<cplx> buf(slab);
    for (int s2 = 0; s2 < nx; ++s2)
      for (int m1 = 0; m1 < M; ++m1) {
        int a1, b1;
        halfstep::pair(n, s1, m1, a1, b1);
        cplx p1 = halfstep::pre(n, s1 & 1, m1);
        for (int m2 = 0; m2 < M; ++m2) {
          int a2, b2;
          halfstep::pair(n, s2, m2, a2, b2);
          buf[(static_cast<std::size_t>(s2) * M + m1) * M + m2] =
              p1 * halfstep::pre(n, s2 & 1, m2) * f[static_cast<std::size_t>(a1) * n + a2] *
              std::conj(g[static_cast<std::size_t>(b1) * n + b2]);
        }
      }
    std::vector<int> dims{nx, M, M};
    centered_dft_axis(buf, dims, 1, -1, 1.0);
    centered_dft_axis(buf, dims, 2, -1, 1.0);
    for (int s2 = 0; s2 < nx; ++s2)
      for (int k1 = 0; k1 < M; ++k1) {
        cplx q1 = halfstep::post(n, s1 & 1, k1, G.h);
        for (int k2 = 0; k2 < M; ++k2) {
          std::size_t src = (static_cast<std::size_t>(s2) * M + k1) * M + k2;
          std::size_t dst = ((s1s * nx + s2) * M + k1) * M + k2;
          W.v[dst] = buf[src] * q1 * halfstep::post(n, s2 & 1, k2, G.h);
        }
      }
  });
  return W;
}

PhaseField wigner(const Signal& f) { return wigner(f, f); }

PhaseField wigner_pairs(const CMat& rho, const Grid& g) {
  if (g.d != 1 || rho.rows() != g.n || rho.cols() != g.n)
    throw Error(ErrorCode::DimMismatch, "pair array must be n x n on a d = 1 grid");
  return wigner_1d(g, [&](int a, int b) { return rho(a, b); });
}

CMat pairs_from_wigner(const PhaseField& W) {
  if (W.kind != LatticeKind::HalfStep || W.d() != 1)
    throw Error(ErrorCode::LatticeMismatch, "expected a d = 1 Wigner field");
  const int n = W.grid.n, M = n / 2;
  CMat rho(n, n);
  std::vector<cplx> row(M);
  for (int s = 0; s < 2 * n; ++s) {
    int sg = s & 1;
    for (int k = 0; k < M; ++k) row[k] = W.at(s, k) / halfstep::post(n, sg, k, W.grid.h);
    centered_dft(row.data(), M, +1, 1.0 / M);
    for (int mm = 0; mm < M; ++mm) {
      int a, b;
      halfstep::pair(n, s, mm, a, b);
      rho(a, b) = row[mm] / halfstep::pre(n, sg, mm);
    }
  }
  return rho;
}

cplx moyal_pairing(const PhaseField& W1, const PhaseField& W2) {
  if (!W1.same_lattice(W2)) throw Error(ErrorCode::LatticeMismatch, "phase fields on different lattices");
  cplx s = 0;
  for (std::size_t i = 0; i < W1.size(); ++i) s += std::conj(W1.v[i]) * W2.v[i];
  return s * W1.cell();
}

PhaseField rihaczek(const Signal& f, const Signal& g) {
  require_same(f, g);
  if (f.grid.d != 1) throw Error(ErrorCode::DimMismatch, "rihaczek is implemented for d = 1");
  const Grid& G = f.grid;
  Signal gh = dft(g);
  PhaseField R = PhaseField::rect(G, G.dual_step());
  for (int j = 0; j < G.n; ++j)
    for (int k = 0; k < G.n; ++k) {
      double xi = (k - G.n / 2) * R.freq_step;
      R.at(j, k) = f[j] * std::conj(gh[k]) * std::polar(1.0, -2 * kPi * xi * G.x(j));
    }
  return R;
}

int flip_index(const PhaseField& F, int s, int k) {
  const int m = F.nxi;
  if (F.kind == LatticeKind::HalfStep && (s & 1)) return m - 1 - k;
  return (m - k) % m;
}

PhaseField flip2(const PhaseField& F) {
  PhaseField R(F);
  const std::size_t nx = F.nx, m = F.nxi;
  if (F.d() == 1) {
    for (int s = 0; s < F.nx; ++s)
      for (int k = 0; k < F.nxi; ++k) R.at(s, flip_index(F, s, k)) = F.at(s, k);
  } else {
    for (std::size_t s1 = 0; s1 < nx; ++s1)
      for (std::size_t s2 = 0; s2 < nx; ++s2)
        for (std::size_t k1 = 0; k1 < m; ++k1)
          for (std::size_t k2 = 0; k2 < m; ++k2) {
            std::size_t f1 = flip_index(F, static_cast<int>(s1), static_cast<int>(k1));
            std::size_t f2 = flip_index(F, static_cast<int>(s2), static_cast<int>(k2));
            R.v[((s1 * nx + s2) * m + f1) * m + f2] = F.v[((s1 * nx + s2) * m + k1) * m + k2];
          }
  }
  return R;
}

Tensor perm_Tp(const PhaseField& F) {
  if (F.d() != 2) throw Error(ErrorCode::RankMismatch, "perm_Tp needs a rank-4 field");
  const std::size_t nx = F.nx, m = F.nxi;
  Tensor T;
  T.dims = {F.nx, F.nxi, F.nx, F.nxi};
  T.meta = {F.x_step, F.freq_step, static_cast<double>(F.kind)};
  T.v.resize(F.size());
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < nx; ++y)
      for (std::size_t xi = 0; xi < m; ++xi)
        for (std::size_t eta = 0; eta < m; ++eta) {
          std::size_t fe = flip_index(F, static_cast<int>(y), static_cast<int>(eta));
          T.v[((x * m + xi) * nx + y) * m + eta] = F.v[((x * nx + y) * m + xi) * m + fe];
        }
  return T;
}

PhaseField perm_Tp_inverse(const Tensor& T, const PhaseField& like) {
  if (T.dims.size() != 4 || like.d() != 2 || T.count() != like.size())
    throw Error(ErrorCode::RankMismatch, "perm_Tp_inverse shape mismatch");
  PhaseField F(like);
  const std::size_t nx = like.nx, m = like.nxi;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < nx; ++y)
      for (std::size_t xi = 0; xi < m; ++xi)
        for (std::size_t eta = 0; eta < m; ++eta) {
          std::size_t fe = flip_index(like, static_cast<int>(y), static_cast<int>(eta));
          F.v[((x * nx + y) * m + xi) * m + fe] = T.v[((x * m + xi) * nx + y) * m + eta];
        }
  return F;
}

PhaseField metaplectic_wigner(const MetaplecticWord& word, const Signal& f, const Signal& g) {
  require_same(f, g);
  if (f.grid.d != 1 || word.d != 2)
    throw Error(ErrorCode::DimMismatch, "metaplectic Wigner takes d = 1 signals and a d = 2 word");
  Signal F = apply(word, tensor(f, g.conj()));
  PhaseField W = PhaseField::rect(f.grid, f.grid.dual_step());
  W.v = F.v;
  return W;
}

}  // namespace wig
