#include "wig/kernel.hpp"

#include <cmath>
#include <sstream>

#include "wig/modnorm.hpp"
#include "wig/parallel.hpp"
#include "wig/transforms.hpp"

namespace wig {

namespace {

void require_1d(const Grid& g) {
  if (g.d != 1) throw Error(ErrorCode::DimMismatch, "kernels are built for d = 1 grids");
}

void guard_size(const Grid& g, const KernelOptions& opt) {
  if (g.n > opt.max_n) {
    std::ostringstream os;
    os << "n = " << g.n << " exceeds the kernel limit " << opt.max_n;
    throw Error(ErrorCode::KernelTooLarge, os.str());
  }
}

// Lag-to-frequency matrix of the Wigner transform for rows of parity sg:
// W(s, k) = sum_mm F[k][mm] rho(pair(s, mm)).
CMat lag_matrix(int n, int sg, double h) {
  const int M = n / 2;
  CMat F(M, M);
  for (int k = 0; k < M; ++k)
    for (int mm = 0; mm < M; ++mm)
      F(k, mm) = halfstep::post(n, sg, k, h) * halfstep::pre(n, sg, mm) *
                 std::polar(1.0, -2 * kPi * (k - M / 2) * (mm - M / 2) / static_cast<double>(M));
  return F;
}

}  // namespace

WignerKernel zero_kernel(const Grid& g) {
  WignerKernel K;
  K.grid = g;
  K.lattice = PhaseField::halfstep(g);
  K.lattice.v.clear();
  K.lattice.v.shrink_to_fit();
  K.cell = g.h * g.h / 2;
  K.k.setZero(static_cast<Eigen::Index>(g.n) * g.n, static_cast<Eigen::Index>(g.n) * g.n);
  return K;
}

OperatorKernel::OperatorKernel(const Grid& g, CMat m) : grid(g), matrix(std::move(m)) {
  require_1d(g);
  if (matrix.rows() != g.n || matrix.cols() != g.n)
    throw Error(ErrorCode::DimMismatch, "operator matrix must be n x n");
}

OperatorKernel OperatorKernel::identity(const Grid& g) {
  return OperatorKernel(g, CMat::Identity(g.n, g.n) / g.h);
}

OperatorKernel OperatorKernel::from_action(const Grid& g, const std::function<Signal(const Signal&)>& op) {
  require_1d(g);
  CMat m(g.n, g.n);
  parallel_for(g.n, [&](std::size_t j) {
    Signal e(g);
    e[j] = 1.0 / g.h;
    m.col(static_cast<Eigen::Index>(j)) = op(e).vec();
  });
  return OperatorKernel(g, m);
}

Signal OperatorKernel::apply(const Signal& f) const {
  if (f.grid != grid) throw Error(ErrorCode::GridMismatch, "signal grid differs from the operator grid");
  Signal r(grid);
  r.vec() = grid.h * (matrix * f.vec());
  return r;
}

OperatorKernel OperatorKernel::operator*(const OperatorKernel& o) const {
  if (o.grid != grid) throw Error(ErrorCode::GridMismatch, "composing operators on different grids");
  return OperatorKernel(grid, grid.h * matrix * o.matrix);
}

OperatorKernel OperatorKernel::adjoint() const { return OperatorKernel(grid, matrix.adjoint()); }

Signal OperatorKernel::as_signal() const {
  Signal s(Grid(2, grid.n, grid.h));
  for (int a = 0; a < grid.n; ++a)
    for (int b = 0; b < grid.n; ++b) s[static_cast<std::size_t>(a) * grid.n + b] = matrix(a, b);
  return s;
}

double OperatorKernel::op_norm() const {
  Eigen::JacobiSVD<CMat> svd(matrix);
  return grid.h * svd.singularValues()(0);
}

bool WignerKernel::same_lattice(const WignerKernel& o) const { return grid == o.grid && k.rows() == o.k.rows(); }

WignerKernel wigner_kernel(const OperatorKernel& T, const KernelOptions& opt) {
  const Grid& g = T.grid;
  require_1d(g);
  guard_size(g, opt);
  if (g.n % 4 != 0) throw Error(ErrorCode::GridMismatch, "the Wigner lattice needs n divisible by 4");
  const int n = g.n, M = n / 2, nx = 2 * n;
  const CMat F[2] = {lag_matrix(n, 0, g.h), lag_matrix(n, 1, g.h)};
  const CMat Fa[2] = {F[0].adjoint(), F[1].adjoint()};
  // pair tables per row
  std::vector<int> A(static_cast<std::size_t>(nx) * M), B(A.size());
  for (int s = 0; s < nx; ++s)
    for (int mm = 0; mm < M; ++mm) halfstep::pair(n, s, mm, A[s * M + mm], B[s * M + mm]);

  WignerKernel K = zero_kernel(g);
  const Eigen::Index N = static_cast<Eigen::Index>(nx) * M;
  K.k.resize(N, N);
  const CMat& Mt = T.matrix;
  parallel_for(nx, [&](std::size_t szs) {
    const int sz = static_cast<int>(szs);
    // rows of the operator matrix picked by the first and second pair members
    CMat RA(M, n), RB(M, n);
    for (int mm = 0; mm < M; ++mm) {
      RA.row(mm) = Mt.row(A[sz * M + mm]);
      RB.row(mm) = Mt.row(B[sz * M + mm]).conjugate();
    }
    CMat G(M, M), X(M, M);
    for (int sw = 0; sw < nx; ++sw) {
      for (int mw = 0; mw < M; ++mw) {
        const int aw = A[sw * M + mw], bw = B[sw * M + mw];
        G.col(mw) = RA.col(aw).cwiseProduct(RB.col(bw));
      }
      X.noalias() = F[sz & 1] * G;
      K.k.block(static_cast<Eigen::Index>(sz) * M, static_cast<Eigen::Index>(sw) * M, M, M).noalias() =
          X * Fa[sw & 1];
    }
  });
  return K;
}

WignerKernel identity_kernel(const Grid& g) {
  require_1d(g);
  WignerKernel K = zero_kernel(g);
  const Eigen::Index N = static_cast<Eigen::Index>(g.n) * g.n;
  K.k = CMat::Identity(N, N) / K.cell;
  return K;
}

PhaseField apply_wigner_kernel(const WignerKernel& k, const PhaseField& F) {
  if (F.grid != k.grid || F.kind != LatticeKind::HalfStep || static_cast<Eigen::Index>(F.size()) != k.k.cols())
    throw Error(ErrorCode::LatticeMismatch, "field is not on the kernel lattice");
  PhaseField out = F;
  Eigen::Map<const CVec> in(F.v.data(), static_cast<Eigen::Index>(F.size()));
  Eigen::Map<CVec> o(out.v.data(), static_cast<Eigen::Index>(out.size()));
  o.noalias() = k.cell * (k.k * in);
  return out;
}

double intertwining_defect(const WignerKernel& k, const OperatorKernel& T, const Signal& f, const Signal& g) {
  Signal Tf = T.apply(f), Tg = T.apply(g);
  PhaseField lhs = apply_wigner_kernel(k, wigner(f, g));
  PhaseField rhs = wigner(Tf, Tg);
  double s = 0;
  for (std::size_t i = 0; i < lhs.size(); ++i) s += std::norm(lhs.v[i] - rhs.v[i]);
  return std::sqrt(s * lhs.cell()) / (Tf.norm() * Tg.norm() + 1e-300);
}

double intertwining_defect(const OperatorKernel& T, const Signal& f, const Signal& g) {
  return intertwining_defect(wigner_kernel(T), T, f, g);
}

WignerKernel compose_kernels(const WignerKernel& a, const WignerKernel& b) {
  if (!a.same_lattice(b)) throw Error(ErrorCode::LatticeMismatch, "composing kernels on different lattices");
  WignerKernel r = a;
  r.k.noalias() = a.cell * (a.k * b.k);
  return r;
}

WignerKernel adjoint_kernel(const WignerKernel& k) {
  WignerKernel r = k;
  r.k = k.k.adjoint();
  return r;
}

WignerKernel inverse_kernel(const OperatorKernel& T, double max_cond, const KernelOptions& opt) {
  guard_size(T.grid, opt);
  Eigen::JacobiSVD<CMat> svd(T.matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double cond = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  if (!(cond <= max_cond)) {
    std::ostringstream os;
    os << "condition number " << cond << " exceeds " << max_cond;
    throw Error(ErrorCode::IllConditioned, os.str());
  }
  // T^{-1} f = h M' f with M' = M^{-1} / h^2
  const double h = T.grid.h;
  CMat inv = svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
  return wigner_kernel(OperatorKernel(T.grid, inv / (h * h)), opt);
}

Tensor kernel_to_tensor(const WignerKernel& k) {
  const int n = k.grid.n;
  Tensor t;
  t.dims = {2 * n, n / 2, 2 * n, n / 2};
  t.meta = {k.grid.h, k.lattice.x_step, k.lattice.freq_step, k.cell};
  const Eigen::Index N = k.k.rows();
  t.v.resize(static_cast<std::size_t>(N) * N);
  for (Eigen::Index z = 0; z < N; ++z)
    for (Eigen::Index w = 0; w < N; ++w) t.v[static_cast<std::size_t>(z) * N + w] = k.k(z, w);
  return t;
}

WignerKernel kernel_from_tensor(const Tensor& t) {
  if (t.dims.size() != 4) throw Error(ErrorCode::RankMismatch, "a Wigner kernel is a rank-4 tensor");
  const int n = t.dims[0] / 2;
  if (t.dims[0] != 2 * n || t.dims[1] != n / 2 || t.dims[2] != 2 * n || t.dims[3] != n / 2 || n % 4 != 0)
    throw Error(ErrorCode::LatticeMismatch, "tensor shape is not (2n, n/2, 2n, n/2)");
  if (t.meta.empty() || !(t.meta[0] > 0)) throw Error(ErrorCode::FormatVersion, "kernel tensor lacks the grid step");
  WignerKernel K = zero_kernel(Grid(1, n, t.meta[0]));
  const Eigen::Index N = static_cast<Eigen::Index>(n) * n;
  K.k.resize(N, N);
  for (Eigen::Index z = 0; z < N; ++z)
    for (Eigen::Index w = 0; w < N; ++w) K.k(z, w) = t.v[static_cast<std::size_t>(z) * N + w];
  return K;
}

NormEquivalence norm_equivalence_experiment(const OperatorKernel& T, double s, const KernelOptions& opt) {
  WignerKernel K = wigner_kernel(T, opt);
  const int n = T.grid.n;
  const double h = T.grid.h;
  NormEquivalence r;
  r.s = s;
  const Weight ws[3] = {Weight::one(), Weight::vs(s), Weight::one_tensor_vs(s)};
  const std::vector<int> kd{2 * n, n / 2, 2 * n, n / 2};
  const std::vector<double> ks{h / 2, h, h / 2, h};
  // column-major storage lists (w, z); the axis layout is symmetric in z and w
  Signal kT = T.as_signal();
  for (int i = 0; i < 3; ++i) {
    r.k_norm[i] = l2_mod_norm(K.k.data(), kd, ks, ws[i]);
    r.kT_norm[i] = l2_mod_norm(kT.v.data(), {n, n}, {h, h}, ws[i]);
    r.ratio[i] = r.k_norm[i] / (r.kT_norm[i] * r.kT_norm[i]);
  }
  return r;
}

}  // namespace wig
