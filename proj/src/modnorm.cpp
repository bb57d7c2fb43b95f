#include "wig/modnorm.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "wig/fft.hpp"
#include "wig/kernel.hpp"
#include "wig/parallel.hpp"
#include "wig/transforms.hpp"

namespace wig {

namespace {

void check_exponent(double p) {
  if (!(p > 0)) throw Error(ErrorCode::BadExponent, "exponents must be positive (inf allowed)");
}

// Accumulates sum |a|^p * w, or the max for p = inf.
struct PowerSum {
  double p;
  double acc = 0.0;
  void add(double a, double cell) {
    if (std::isinf(p)) acc = std::max(acc, a);
    else acc += std::pow(a, p) * cell;
  }
  double value() const { return std::isinf(p) ? acc : std::pow(acc, 1.0 / p); }
};

// Squared L2-normalized Gaussian window on a centered axis.
std::vector<double> gauss_axis(int N, double step) {
  std::vector<double> g(N);
  double s = 0;
  for (int j = 0; j < N; ++j) {
    double t = (j - N / 2) * step;
    g[j] = std::exp(-2 * kPi * t * t);
    s += g[j] * step;
  }
  for (auto& v : g) v /= s;
  return g;
}

// w(t) = sum_X X^2 |phi(t - X)|^2 on a circular centered axis.
std::vector<double> moment_axis(const std::vector<double>& win2, double step) {
  const int N = static_cast<int>(win2.size());
  std::vector<double> w(N, 0.0);
  for (int t = 0; t < N; ++t)
    for (int x = 0; x < N; ++x) {
      double X = (x - N / 2) * step;
      w[t] += X * X * win2[((t - x + N / 2) % N + N) % N];
    }
  return w;
}

// (sum |F|^2 cell, sum |F(t)|^2 sum_i step_i w_i(t_i) cell)
std::pair<double, double> marginal_moments(const std::vector<double>& mag2, const std::vector<int>& dims,
                                           const std::vector<double>& steps,
                                           const std::vector<std::vector<double>>& win2) {
  const int r = static_cast<int>(dims.size());
  std::vector<std::vector<double>> w(r);
  double cell = 1.0;
  for (int i = 0; i < r; ++i) {
    w[i] = moment_axis(win2[i], steps[i]);
    for (auto& v : w[i]) v *= steps[i];
    cell *= steps[i];
  }
  std::vector<int> idx(r, 0);
  double plain = 0, mom = 0;
  for (std::size_t f = 0; f < mag2.size(); ++f) {
    double a = mag2[f];
    plain += a;
    double ws = 0;
    for (int i = 0; i < r; ++i) ws += w[i][idx[i]];
    mom += a * ws;
    for (int i = r - 1; i >= 0; --i) {
      if (++idx[i] < dims[i]) break;
      idx[i] = 0;
    }
  }
  return {plain * cell, mom * cell};
}

}  // namespace

Weight Weight::vs(double s) {
  if (!(s >= 0)) throw Error(ErrorCode::UnsupportedWeight, "weight exponent must be nonnegative");
  return {WeightKind::VS, s};
}

Weight Weight::one_tensor_vs(double s) {
  if (!(s >= 0)) throw Error(ErrorCode::UnsupportedWeight, "weight exponent must be nonnegative");
  return {WeightKind::OneTensorVS, s};
}

double Weight::operator()(const double* z, int dim) const {
  if (kind == WeightKind::One || s == 0) return 1.0;
  int from = kind == WeightKind::VS ? 0 : dim / 2;
  double r2 = 0;
  for (int i = from; i < dim; ++i) r2 += z[i] * z[i];
  return std::pow(1.0 + r2, s / 2);
}

double mixed_norm(const PhaseField& F, double p, double q, const Weight& m) {
  check_exponent(p);
  check_exponent(q);
  const int d = F.d();
  std::size_t nX = 1, nK = 1;
  for (int i = 0; i < d; ++i) {
    nX *= static_cast<std::size_t>(F.nx);
    nK *= static_cast<std::size_t>(F.nxi);
  }
  const double xcell = std::pow(F.x_step, d), kcell = std::pow(F.freq_step, d);
  std::vector<double> inner(nK);
  parallel_for(nK, [&](std::size_t K) {
    std::vector<int> kk(d);
    std::size_t rem = K;
    for (int i = d - 1; i >= 0; --i) {
      kk[i] = static_cast<int>(rem % F.nxi);
      rem /= F.nxi;
    }
    PowerSum ps{p};
    std::vector<double> z(2 * d);
    for (std::size_t X = 0; X < nX; ++X) {
      std::size_t r = X;
      for (int i = d - 1; i >= 0; --i) {
        int s = static_cast<int>(r % F.nx);
        r /= F.nx;
        z[i] = F.x(s);
        z[d + i] = F.xi(s, kk[i]);
      }
      ps.add(std::abs(F.v[X * nK + K]) * m(z.data(), 2 * d), xcell);
    }
    inner[K] = ps.value();
  });
  PowerSum outer{q};
  for (double v : inner) outer.add(v, kcell);
  return outer.value();
}

Signal default_window(const Grid& g) {
  Signal w = gaussian(g);
  w *= 1.0 / w.norm();
  return w;
}

double mod_norm(const Signal& f, double p, double q, const Weight& m, const Signal& window) {
  return mixed_norm(stft(f, window), p, q, m);
}

double mod_norm(const Signal& f, double p, double q, const Weight& m) {
  return mod_norm(f, p, q, m, default_window(f.grid));
}

double l2_mod_norm(const cplx* data, const std::vector<int>& dims, const std::vector<double>& steps, const Weight& m) {
  if (dims.size() != steps.size() || dims.empty()) throw Error(ErrorCode::DimMismatch, "one step per axis");
  const bool trivial = m.kind == WeightKind::One || m.s == 0;
  if (!trivial && m.s != 1)
    throw Error(ErrorCode::UnsupportedWeight, "the closed form covers s = 0 and s = 1 only");
  const int r = static_cast<int>(dims.size());
  std::size_t total = 1;
  for (int d : dims) {
    if (d % 2) throw Error(ErrorCode::OddDimension, "axes must have even length");
    total *= static_cast<std::size_t>(d);
  }
  std::vector<std::vector<double>> win2(r);
  for (int i = 0; i < r; ++i) win2[i] = gauss_axis(dims[i], steps[i]);
  std::vector<double> mag2(total);
  for (std::size_t i = 0; i < total; ++i) mag2[i] = std::norm(data[i]);
  auto [plain, pos] = trivial ? std::pair<double, double>{0.0, 0.0} : marginal_moments(mag2, dims, steps, win2);
  if (trivial) {
    double cell = 1.0;
    for (double s : steps) cell *= s;
    double sum = 0;
    for (double a : mag2) sum += a;
    return std::sqrt(sum * cell);
  }
  // frequency side: same identity for (Fhat, phihat) on the dual lattice
  std::vector<cplx> hat(data, data + total);
  std::vector<double> dual(r);
  std::vector<std::vector<double>> hat_win2(r);
  for (int i = 0; i < r; ++i) {
    centered_dft_axis(hat, dims, i, -1, steps[i]);
    dual[i] = 1.0 / (dims[i] * steps[i]);
    std::vector<cplx> phi(dims[i]);
    for (int j = 0; j < dims[i]; ++j) phi[j] = std::sqrt(win2[i][j]);
    centered_dft(phi.data(), dims[i], -1, steps[i]);
    hat_win2[i].resize(dims[i]);
    for (int j = 0; j < dims[i]; ++j) hat_win2[i][j] = std::norm(phi[j]);
  }
  for (std::size_t i = 0; i < total; ++i) mag2[i] = std::norm(hat[i]);
  double freq = marginal_moments(mag2, dims, dual, hat_win2).second;
  double sq = plain + freq + (m.kind == WeightKind::VS ? pos : 0.0);
  return std::sqrt(sq);
}

std::pair<double, double> tensor_norm_check(const Signal& f, double p, double q, const Weight& m) {
  if (f.grid.d != 1) throw Error(ErrorCode::DimMismatch, "tensor check takes a d = 1 signal");
  Signal F = tensor(f, f.conj());
  double one = mod_norm(f, p, q, m);
  return {mod_norm(F, p, q, m), one * one};
}

std::pair<double, double> shubin_sobolev(const Signal& f, double s) {
  return {mod_norm(f, 2, 2, Weight::vs(s)), mod_norm(f, 2, 2, Weight::one_tensor_vs(s))};
}

DecayCurve concentration_profile(const WignerKernel& k, const SymplecticMat& S, const std::vector<double>& radii) {
  if (S.d() != 1) throw Error(ErrorCode::DimMismatch, "kernel diagnostics use d = 1");
  const PhaseField& L = k.lattice;
  const int M = L.nxi;
  const Eigen::Index N = k.k.rows();
  const double h = k.grid.h, Px = L.x_period(), Pxi = L.xi_period();
  const RMat& Sm = S.matrix();
  auto wrap = [](double v, double P) { return v - P * std::floor(v / P + 0.5); };
  std::vector<double> zx(N), zxi(N);
  for (Eigen::Index z = 0; z < N; ++z) {
    int s = static_cast<int>(z / M), kk = static_cast<int>(z % M);
    zx[z] = L.x(s);
    zxi[z] = L.xi(s, kk);
  }
  const std::size_t R = radii.size();
  std::vector<double> beyond(static_cast<std::size_t>(N) * R, 0.0), colmass(N, 0.0);
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t w) {
    double sx = Sm(0, 0) * zx[w] + Sm(0, 1) * zxi[w];
    double sxi = Sm(1, 0) * zx[w] + Sm(1, 1) * zxi[w];
    double* b = beyond.data() + w * R;
    double tot = 0;
    for (Eigen::Index z = 0; z < N; ++z) {
      double a = std::norm(k.k(z, static_cast<Eigen::Index>(w)));
      if (a == 0) continue;
      tot += a;
      double dx = wrap(zx[z] - sx, Px) / h, dxi = wrap(zxi[z] - sxi, Pxi) / L.freq_step;
      double dist = std::sqrt(dx * dx + dxi * dxi);
      for (std::size_t i = 0; i < R; ++i)
        if (dist > radii[i]) b[i] += a;
    }
    colmass[w] = tot;
  });
  DecayCurve c;
  c.radii = radii;
  c.mass.assign(R, 0.0);
  double tot = 0;
  for (Eigen::Index w = 0; w < N; ++w) {
    tot += colmass[w];
    for (std::size_t i = 0; i < R; ++i) c.mass[i] += beyond[static_cast<std::size_t>(w) * R + i];
  }
  for (auto& v : c.mass) v = tot > 0 ? v / tot : 0.0;
  return c;
}

std::string decay_csv(const DecayCurve& c) {
  std::ostringstream os;
  os.precision(17);
  os << "R,mass_fraction\n";
  for (std::size_t i = 0; i < c.radii.size(); ++i) os << c.radii[i] << "," << c.mass[i] << "\n";
  return os.str();
}

}  // namespace wig
