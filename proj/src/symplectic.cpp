#include "wig/symplectic.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace wig {

namespace {

int half_dim(const RMat& m) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0 || m.rows() == 0)
    throw Error(ErrorCode::OddDimension, "expected a square matrix of even size");
  return static_cast<int>(m.rows() / 2);
}

void require_symmetric(const RMat& C) {
  if (C.rows() != C.cols()) throw Error(ErrorCode::NonSymmetric, "matrix is not square");
  if ((C - C.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, C.cwiseAbs().maxCoeff()))
    throw Error(ErrorCode::NonSymmetric, "matrix is not symmetric");
}

}  // namespace

RMat make_J_matrix(int d) {
  RMat J = RMat::Zero(2 * d, 2 * d);
  J.topRightCorner(d, d).setIdentity();
  J.bottomLeftCorner(d, d) = -RMat::Identity(d, d);
  return J;
}

double symplectic_residual(const RMat& M) {
  int d = half_dim(M);
  RMat J = make_J_matrix(d);
  return (M.transpose() * J * M - J).cwiseAbs().maxCoeff();
}

bool is_symplectic(const RMat& M, double tol) {
  return symplectic_residual(M) <= tol;
}

SymplecticMat::SymplecticMat(const RMat& m, double tol) : m_(m), d_(half_dim(m)) {
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  double lim = tol > 0 ? tol : 1e-12 * scale * scale;
  double r = symplectic_residual(m);
  if (!(r <= lim)) {
    std::ostringstream os;
    os << "residual " << r << " exceeds " << lim;
    throw Error(ErrorCode::NotSymplectic, os.str());
  }
}

SymplecticMat SymplecticMat::operator*(const SymplecticMat& o) const {
  if (o.d_ != d_) throw Error(ErrorCode::DimMismatch, "symplectic product of different sizes");
  RMat p = m_ * o.m_;
  double s = std::max(1.0, m_.cwiseAbs().maxCoeff() * o.m_.cwiseAbs().maxCoeff());
  return SymplecticMat(p, 1e-12 * s * s * 4 * d_);
}

SymplecticMat SymplecticMat::inverse() const {
  RMat J = make_J_matrix(d_);
  RMat inv = -J * m_.transpose() * J;
  double s = std::max(1.0, m_.cwiseAbs().maxCoeff());
  return SymplecticMat(inv, 1e-12 * s * s * 4 * d_);
}

HamiltonianMat::HamiltonianMat(const RMat& m) : m_(m), d_(half_dim(m)) {
  RMat J = make_J_matrix(d_);
  double r = (m * J + J * m.transpose()).cwiseAbs().maxCoeff();
  if (r > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()))
    throw Error(ErrorCode::NotHamiltonian, "X J + J X^T != 0");
}

HamiltonianMat HamiltonianMat::from_blocks(const RMat& A, const RMat& B, const RMat& C) {
  require_symmetric(B);
  require_symmetric(C);
  int d = static_cast<int>(A.rows());
  if (A.cols() != d || B.rows() != d || C.rows() != d)
    throw Error(ErrorCode::DimMismatch, "Hamiltonian blocks of different sizes");
  RMat m(2 * d, 2 * d);
  m << A, B, C, -A.transpose();
  return HamiltonianMat(m);
}

SymplecticMat make_J(int d) {
  if (d < 1) throw Error(ErrorCode::DimMismatch, "d must be positive");
  return SymplecticMat(make_J_matrix(d));
}

SymplecticMat make_VC(const RMat& C) {
  require_symmetric(C);
  int d = static_cast<int>(C.rows());
  RMat m = RMat::Identity(2 * d, 2 * d);
  m.bottomLeftCorner(d, d) = C;
  return SymplecticMat(m);
}

SymplecticMat make_DL(const RMat& L) {
  int d = static_cast<int>(L.rows());
  if (L.cols() != d) throw Error(ErrorCode::SingularL, "L is not square");
  Eigen::FullPivLU<RMat> lu(L);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularL, "det L = 0");
  RMat m = RMat::Zero(2 * d, 2 * d);
  m.topLeftCorner(d, d) = lu.inverse();
  m.bottomRightCorner(d, d) = L.transpose();
  return SymplecticMat(m);
}

RMat expm(const RMat& X) { return X.exp(); }

SymplecticMat hamiltonian_flow(const HamiltonianMat& H, double t, double omega) {
  RMat X = H.matrix() * (t / omega);
  RMat S = expm(X);
  double growth = std::exp(std::abs(t) * H.matrix().norm() / omega);
  return SymplecticMat(S, 1e-10 * growth);
}

double caustic_window(const HamiltonianMat& H, const CausticOptions& opt) {
  int d = H.d();
  auto detA = [&](double t) {
    RMat S = expm(H.matrix() * (t / opt.omega));
    return S.topLeftCorner(d, d).determinant();
  };
  auto first_zero = [&](double dir) {
    // Step the flow incrementally, recomputing from scratch every 256 steps
    // to keep drift below the sampling resolution.
    RMat step = expm(H.matrix() * (dir * opt.step / opt.omega));
    RMat S = RMat::Identity(2 * d, 2 * d);
    double prev = 1.0;
    long nsteps = static_cast<long>(std::ceil(opt.t_max / opt.step));
    for (long k = 1; k <= nsteps; ++k) {
      double t = std::min(opt.t_max, k * opt.step);
      if (k % 256 == 0)
        S = expm(H.matrix() * (dir * t / opt.omega));
      else
        S = S * step;
      double cur = S.topLeftCorner(d, d).determinant();
      if (cur == 0.0) return t;
      if ((cur > 0) != (prev > 0)) {
        double lo = t - opt.step, hi = t;
        double flo = prev;
        while (hi - lo > opt.refine_tol) {
          double mid = 0.5 * (lo + hi);
          double fm = detA(dir * mid);
          if (fm == 0.0) return mid;
          if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        return 0.5 * (lo + hi);
      }
      prev = cur;
    }
    return opt.t_max;
  };
  return std::min(first_zero(1.0), first_zero(-1.0));
}

SymplecticMat lift_tensor(const SymplecticMat& S1, const SymplecticMat& S2) {
  if (S1.d() != S2.d()) throw Error(ErrorCode::DimMismatch, "lift of different dimensions");
  int d = S1.d();
  RMat m = RMat::Zero(4 * d, 4 * d);
  auto put = [&](int bi, int bj, const RMat& blk) { m.block(bi * d, bj * d, d, d) = blk; };
  put(0, 0, S1.A());
  put(0, 2, S1.B());
  put(1, 1, S2.A());
  put(1, 3, S2.B());
  put(2, 0, S1.C());
  put(2, 2, S1.D());
  put(3, 1, S2.C());
  put(3, 3, S2.D());
  return SymplecticMat(m);
}

namespace {

RMat from_blocks(int d, int nb, const std::vector<double>& coef) {
  RMat m = RMat::Zero(nb * d, nb * d);
  RMat I = RMat::Identity(d, d);
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) m.block(i * d, j * d, d, d) = coef[i * nb + j] * I;
  return m;
}

}  // namespace

SpecialProjections special_projections(int d) {
  RMat ft2 = from_blocks(d, 4, {1, 0, 0, 0,
                                0, 0, 0, 1,
                                0, 0, 1, 0,
                                0, -1, 0, 0});
  RMat a0 = from_blocks(d, 4, {1, 0, 0, 0,
                               0, 0, 0, -1,
                               0, 0, 1, 1,
                               -1, 1, 0, 0});
  RMat ah = from_blocks(d, 4, {0.5, 0.5, 0, 0,
                               0, 0, 0.5, -0.5,
                               0, 0, 1, 1,
                               -1, 1, 0, 0});
  const double q = 0.25, h = 0.5;
  RMat ak = from_blocks(d, 8, {q, q, h, 0, 0, 0, 0, 0,
                               0, 0, 0, h, q, -q, 0, 0,
                               0, 0, 0, 0, h, h, -h, 0,
                               -h, h, 0, 0, 0, 0, 0, -h,
                               0, 0, 0, 0, 1, 1, 1, 0,
                               -1, 1, 0, 0, 0, 0, 0, 1,
                               -h, -h, 1, 0, 0, 0, 0, 0,
                               0, 0, 0, 1, -h, h, 0, 0});
  return {SymplecticMat(ft2), SymplecticMat(a0), SymplecticMat(ah), SymplecticMat(ak)};
}

RMat E_block(const RMat& big) {
  if (big.rows() % 4 != 0 || big.rows() != big.cols())
    throw Error(ErrorCode::DimMismatch, "E block needs a 4m x 4m matrix");
  int m = static_cast<int>(big.rows() / 4);
  RMat E(2 * m, 2 * m);
  E.topLeftCorner(m, m) = big.block(0, 0, m, m);
  E.topRightCorner(m, m) = big.block(0, 2 * m, m, m);
  E.bottomLeftCorner(m, m) = big.block(m, 0, m, m);
  E.bottomRightCorner(m, m) = big.block(m, 2 * m, m, m);
  return E;
}

bool shift_invertible(const SymplecticMat& big) {
  return std::abs(E_block(big.matrix()).determinant()) > 1e-10;
}

bool admissible_quantization(const SymplecticMat& big) {
  const RMat& a = big.matrix();
  if (a.rows() % 4 != 0) throw Error(ErrorCode::DimMismatch, "need a 4d x 4d matrix");
  int d = static_cast<int>(a.rows() / 4);
  auto blk = [&](int i, int j) { return RMat(a.block((i - 1) * d, (j - 1) * d, d, d)); };
  const double tol = 1e-12;
  auto same = [&](const RMat& x, const RMat& y) { return (x - y).cwiseAbs().maxCoeff() <= tol; };
  return same(blk(3, 2), -blk(3, 1)) && same(blk(4, 2), -blk(4, 1)) &&
         same(blk(3, 4), blk(3, 3)) && same(blk(4, 4), blk(4, 3));
}

RMat parse_matrix_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::vector<double> row;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) {
      size_t a = cell.find_first_not_of(" \t\r");
      if (a == std::string::npos) continue;
      try {
        row.push_back(std::stod(cell.substr(a)));
      } catch (const std::exception&) {
        throw Error(ErrorCode::FormatVersion, "bad matrix entry '" + cell + "'");
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::FormatVersion, "empty matrix");
  RMat m(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw Error(ErrorCode::FormatVersion, "ragged matrix rows");
    for (size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::string format_matrix_csv(const RMat& m) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << m(i, j);
    }
    os << '\n';
  }
  return os.str();
}

RMat read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IO, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_matrix_csv(ss.str());
}

void write_matrix_csv(const std::string& path, const RMat& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IO, "cannot write " + path);
  out << format_matrix_csv(m);
}

}  // namespace wig
