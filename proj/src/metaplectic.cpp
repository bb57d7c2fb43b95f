#include "wig/metaplectic.hpp"

#include <cmath>
#include <sstream>

#include "wig/parallel.hpp"
#include "wig/transforms.hpp"

namespace wig {

namespace {

bool is_integer_matrix(const RMat& L, double tol, Eigen::MatrixXi& out) {
  out.resize(L.rows(), L.cols());
  for (Eigen::Index i = 0; i < L.rows(); ++i)
    for (Eigen::Index j = 0; j < L.cols(); ++j) {
      double r = std::round(L(i, j));
      if (std::abs(L(i, j) - r) > tol) return false;
      out(i, j) = static_cast<int>(r);
    }
  return true;
}

RMat symmetrize(const RMat& C) { return 0.5 * (C + C.transpose()); }

void check_token_dim(const Token& t, int d) {
  if (t.kind == TokenKind::FT || t.kind == TokenKind::FT2) return;
  int want = t.kind == TokenKind::FreeBlock ? 2 * d : d;
  if (t.M.rows() != want || t.M.cols() != want)
    throw Error(ErrorCode::DimMismatch, "token matrix has the wrong size");
}

// Trig-interpolation weights exp(2 pi i eta_k y), with the Nyquist term split
// symmetrically so that real signals interpolate to real values.
void trig_weights(const Grid& g, double y, std::vector<cplx>& w) {
  const int n = g.n;
  const double du = g.dual_step();
  w.resize(n);
  for (int k = 0; k < n; ++k) {
    double eta = (k - n / 2) * du;
    w[k] = k == 0 ? cplx(std::cos(2 * kPi * eta * y), 0.0) : std::polar(1.0, 2 * kPi * eta * y);
  }
}

bool in_box(const Grid& g, double y) {
  double half = 0.5 * g.length();
  return y >= -half - 1e-12 * half && y < half - 1e-12 * half;
}

}  // namespace

SymplecticMat token_projection(const Token& t, int d) {
  check_token_dim(t, d);
  switch (t.kind) {
    case TokenKind::FT:
      return make_J(d);
    case TokenKind::FT2: {
      if (d != 2) throw Error(ErrorCode::DimMismatch, "FT2 acts on functions of two variables");
      return special_projections(1).A_FT2;
    }
    case TokenKind::Dilate:
      return make_DL(t.M);
    case TokenKind::ChirpMul:
      return make_VC(t.M);
    case TokenKind::ChirpConv: {
      SymplecticMat v = make_VC(t.M);
      return SymplecticMat(RMat(v.matrix().transpose()));
    }
    case TokenKind::FreeBlock:
      return SymplecticMat(t.M, 1e-9 * std::max(1.0, t.M.cwiseAbs().maxCoeff() * t.M.cwiseAbs().maxCoeff()));
  }
  throw Error(ErrorCode::Usage, "unknown token");
}

MetaplecticWord::MetaplecticWord() : MetaplecticWord(1) {}

MetaplecticWord::MetaplecticWord(int d_) : d(d_), target(RMat::Identity(2 * d_, 2 * d_)) {}

MetaplecticWord::MetaplecticWord(int d_, std::vector<Token> toks)
    : d(d_), tokens(std::move(toks)), target(RMat::Identity(2 * d_, 2 * d_)) {
  target = projection();
}

SymplecticMat MetaplecticWord::projection() const {
  RMat p = RMat::Identity(2 * d, 2 * d);
  for (const auto& t : tokens) p = p * token_projection(t, d).matrix();
  double s = std::max(1.0, p.cwiseAbs().maxCoeff());
  return SymplecticMat(p, 1e-9 * s * s);
}

void MetaplecticWord::validate() const {
  RMat diff = projection().matrix() - target.matrix();
  if (diff.cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, target.matrix().cwiseAbs().maxCoeff()))
    throw Error(ErrorCode::NotSymplectic, "token product differs from the target matrix");
}

MetaplecticWord MetaplecticWord::operator*(const MetaplecticWord& o) const {
  if (o.d != d) throw Error(ErrorCode::DimMismatch, "composing words of different dimension");
  MetaplecticWord w(d);
  w.tokens = tokens;
  w.tokens.insert(w.tokens.end(), o.tokens.begin(), o.tokens.end());
  w.target = SymplecticMat(RMat(target.matrix() * o.target.matrix()), 1e-9 * std::max(1.0, std::pow(target.matrix().cwiseAbs().maxCoeff() * o.target.matrix().cwiseAbs().maxCoeff(), 2)));
  return w;
}

MetaplecticWord MetaplecticWord::inverse() const {
  MetaplecticWord w(d);
  for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
    switch (it->kind) {
      case TokenKind::FT:
      case TokenKind::FT2:
        // F^4 = I exactly for the centered unitary DFT
        for (int i = 0; i < 3; ++i) w.tokens.push_back(*it);
        break;
      case TokenKind::Dilate:
        w.tokens.push_back(Token::dilate(it->M.inverse()));
        break;
      case TokenKind::ChirpMul:
        w.tokens.push_back(Token::chirp_mul(-it->M));
        break;
      case TokenKind::ChirpConv:
        w.tokens.push_back(Token::chirp_conv(-it->M));
        break;
      case TokenKind::FreeBlock:
        w.tokens.push_back(Token::free_block(SymplecticMat(it->M, 1e-8).inverse().matrix()));
        break;
    }
  }
  w.target = target.inverse();
  return w;
}

Signal chirp_mul(const Signal& f, const RMat& C) {
  const Grid& g = f.grid;
  if (C.rows() != g.d || C.cols() != g.d) throw Error(ErrorCode::DimMismatch, "chirp matrix size");
  if ((C - C.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, C.cwiseAbs().maxCoeff()))
    throw Error(ErrorCode::NonSymmetric, "chirp matrix is not symmetric");
  Signal r(f);
  if (g.d == 1) {
    for (int j = 0; j < g.n; ++j) r[j] *= std::polar(1.0, kPi * C(0, 0) * g.x(j) * g.x(j));
  } else {
    for (int a = 0; a < g.n; ++a)
      for (int b = 0; b < g.n; ++b) {
        double x = g.x(a), y = g.x(b);
        double q = C(0, 0) * x * x + 2 * C(0, 1) * x * y + C(1, 1) * y * y;
        r[static_cast<std::size_t>(a) * g.n + b] *= std::polar(1.0, kPi * q);
      }
  }
  return r;
}

Signal chirp_conv(const Signal& f, const RMat& C) {
  const Grid& g = f.grid;
  Signal F = dft(f);
  // the DFT output lives on the dual lattice; reinterpret it there for the chirp
  Grid dual(g.d, g.n, g.dual_step());
  Signal Fd(dual, F.v);
  Signal Fc = chirp_mul(Fd, -C);
  return idft(Signal(g, Fc.v));
}

Signal dilate(const Signal& f, const RMat& L) {
  const Grid& g = f.grid;
  const int n = g.n, d = g.d;
  if (L.rows() != d || L.cols() != d) throw Error(ErrorCode::DimMismatch, "dilation matrix size");
  double det = L.determinant();
  if (std::abs(det) < 1e-14) throw Error(ErrorCode::SingularL, "det L = 0");
  const double amp = std::sqrt(std::abs(det));
  Signal r(g);
  Eigen::MatrixXi Li;
  if (is_integer_matrix(L, 1e-12, Li)) {
    bool periodic = std::abs(std::abs(det) - 1.0) < 1e-9;
    auto map = [&](long j) -> long {
      // index of L x_j
      if (periodic) return ((j % n) + n) % n;
      return (j >= 0 && j < n) ? j : -1;
    };
    if (d == 1) {
      for (int j = 0; j < n; ++j) {
        long src = map(static_cast<long>(Li(0, 0)) * (j - n / 2) + n / 2);
        r[j] = src < 0 ? cplx(0.0) : amp * f[src];
      }
    } else {
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          long u = map(static_cast<long>(Li(0, 0)) * (a - n / 2) + static_cast<long>(Li(0, 1)) * (b - n / 2) + n / 2);
          long v = map(static_cast<long>(Li(1, 0)) * (a - n / 2) + static_cast<long>(Li(1, 1)) * (b - n / 2) + n / 2);
          r[static_cast<std::size_t>(a) * n + b] =
              (u < 0 || v < 0) ? cplx(0.0) : amp * f[static_cast<std::size_t>(u) * n + v];
        }
    }
    return r;
  }
  Signal F = dft(f);
  const double du = g.dual_step();
  if (d == 1) {
    parallel_for(n, [&](std::size_t j) {
      double y = L(0, 0) * g.x(static_cast<int>(j));
      if (!in_box(g, y)) return;
      std::vector<cplx> w;
      trig_weights(g, y, w);
      cplx s = 0;
      for (int k = 0; k < n; ++k) s += F[k] * w[k];
      r[j] = amp * du * s;
    });
  } else {
    Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> Fm(F.v.data(), n, n);
    parallel_for(static_cast<std::size_t>(n) * n, [&](std::size_t idx) {
      int a = static_cast<int>(idx / n), b = static_cast<int>(idx % n);
      double x = g.x(a), y = g.x(b);
      double y1 = L(0, 0) * x + L(0, 1) * y, y2 = L(1, 0) * x + L(1, 1) * y;
      if (!in_box(g, y1) || !in_box(g, y2)) return;
      std::vector<cplx> w1, w2;
      trig_weights(g, y1, w1);
      trig_weights(g, y2, w2);
      Eigen::Map<const CVec> v1(w1.data(), n), v2(w2.data(), n);
      r[idx] = amp * du * du * (v1.transpose() * Fm * v2)(0, 0);
    });
  }
  return r;
}

Signal apply_token(const Token& t, const Signal& f) {
  switch (t.kind) {
    case TokenKind::FT:
      return dft(f);
    case TokenKind::FT2:
      return partial_ft2(f);
    case TokenKind::Dilate:
      return dilate(f, t.M);
    case TokenKind::ChirpMul:
      return chirp_mul(f, t.M);
    case TokenKind::ChirpConv:
      return chirp_conv(f, t.M);
    case TokenKind::FreeBlock: {
      MetaplecticWord w = factor_symplectic(SymplecticMat(t.M, 1e-8));
      return apply(w, f);
    }
  }
  throw Error(ErrorCode::Usage, "unknown token");
}

Signal apply(const MetaplecticWord& word, const Signal& f) {
  if (f.grid.d != word.d) throw Error(ErrorCode::DimMismatch, "word and signal dimensions differ");
  Signal r(f);
  for (auto it = word.tokens.rbegin(); it != word.tokens.rend(); ++it) r = apply_token(*it, r);
  return r;
}

MetaplecticWord factor_symplectic(const SymplecticMat& S, const FactorOptions& opt) {
  const int d = S.d();
  const RMat I = RMat::Identity(d, d);
  const double scale = std::pow(std::max(1.0, S.matrix().cwiseAbs().maxCoeff()), d);
  RMat A = S.A(), B = S.B();
  int tau = -1;
  for (int t = 0; t <= d; ++t) {
    if (std::abs((A + t * B).determinant()) > opt.singular_tol * scale) {
      tau = t;
      break;
    }
  }
  if (tau < 0) throw Error(ErrorCode::FactorizationFailed, "no tau in 0..d gives an invertible A block");
  RMat Sf = S.matrix();
  if (tau > 0) Sf = Sf * make_VC(tau * I).matrix();
  RMat Af = Sf.topLeftCorner(d, d), Bf = Sf.topRightCorner(d, d), Cf = Sf.bottomLeftCorner(d, d);
  RMat Ainv = Af.inverse();
  RMat P = symmetrize(Cf * Ainv);
  RMat R = symmetrize(Ainv * Bf);
  auto small = [&](const RMat& X) { return X.cwiseAbs().maxCoeff() <= opt.snap_tol; };
  auto snap = [&](RMat X) {
    for (Eigen::Index i = 0; i < X.size(); ++i) {
      double r = std::round(X.data()[i]);
      if (std::abs(X.data()[i] - r) <= opt.snap_tol) X.data()[i] = r;
    }
    return X;
  };
  P = snap(P);
  R = snap(R);
  RMat Lm = snap(Ainv);
  MetaplecticWord w(d);
  if (!small(P)) w.tokens.push_back(Token::chirp_mul(P));
  if (!small(Lm - I)) w.tokens.push_back(Token::dilate(Lm));
  if (!small(R)) w.tokens.push_back(Token::chirp_conv(R));
  if (tau > 0) w.tokens.push_back(Token::chirp_mul(-tau * I));
  w.target = S;
  w.validate();
  return w;
}

std::vector<Signal> hermite_battery(const Grid& g) {
  std::vector<Signal> out;
  int kmax = std::min(4, g.n / 4);
  if (g.d == 1) {
    for (int k = 0; k <= kmax; ++k) out.push_back(hermite(g, k));
  } else {
    for (int a = 0; a <= kmax; ++a)
      for (int b = 0; a + b <= kmax; ++b) out.push_back(hermite(g, a, b));
  }
  return out;
}

PhaseFit fit_phase(const Signal& u, const Signal& v) {
  cplx ip = inner(v, u);
  cplx c = std::abs(ip) > 0 ? ip / std::abs(ip) : cplx(1.0);
  Signal diff = u - c * v;
  double nv = v.norm();
  return {c, nv > 0 ? diff.norm() / nv : diff.norm()};
}

double covariance_defect(const MetaplecticWord& word, const Grid& g, const std::vector<double>& z) {
  const int d = word.d;
  if (g.d != d || static_cast<int>(z.size()) != 2 * d)
    throw Error(ErrorCode::DimMismatch, "phase-space point has the wrong dimension");
  Eigen::Map<const RVec> zv(z.data(), 2 * d);
  RVec sz = word.target.matrix() * zv;
  std::vector<double> x0(z.begin(), z.begin() + d), xi0(z.begin() + d, z.end());
  std::vector<double> sx(sz.data(), sz.data() + d), sxi(sz.data() + d, sz.data() + 2 * d);
  double worst = 0;
  for (const auto& f : hermite_battery(g)) {
    Signal u = apply(word, time_freq_shift(f, x0, xi0));
    Signal v = time_freq_shift(apply(word, f), sx, sxi);
    cplx ip = inner(v, u);
    cplx c = std::abs(ip) > 0 ? ip / std::abs(ip) : cplx(1.0);
    worst = std::max(worst, (u - c * v).norm() / f.norm());
  }
  return worst;
}

Signal apply_tensor(const MetaplecticWord& w1, const MetaplecticWord& w2, const Signal& F) {
  if (F.grid.d != 2 || w1.d != 1 || w2.d != 1)
    throw Error(ErrorCode::DimMismatch, "apply_tensor takes two d = 1 words and a d = 2 signal");
  const int n = F.grid.n;
  Grid g1(1, n, F.grid.h);
  Signal r(F);
  for (int j = 0; j < n; ++j) {
    Signal col(g1);
    for (int i = 0; i < n; ++i) col[i] = r[static_cast<std::size_t>(i) * n + j];
    col = apply(w1, col);
    for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i) * n + j] = col[i];
  }
  for (int i = 0; i < n; ++i) {
    Signal row(g1, std::vector<cplx>(r.v.begin() + static_cast<long>(i) * n, r.v.begin() + static_cast<long>(i + 1) * n));
    row = apply(w2, row);
    std::copy(row.v.begin(), row.v.end(), r.v.begin() + static_cast<long>(i) * n);
  }
  return r;
}

namespace {

std::string inline_matrix(const RMat& m) {
  std::string csv = format_matrix_csv(m);
  std::string out;
  for (char c : csv) out += (c == '\n') ? ';' : c;
  while (!out.empty() && out.back() == ';') out.pop_back();
  return out;
}

RMat parse_inline(const std::string& s) {
  std::string t;
  for (char c : s) t += (c == ';') ? '\n' : c;
  return parse_matrix_csv(t);
}

void emit(std::ostringstream& os, const Token& t, int d) {
  switch (t.kind) {
    case TokenKind::FT: os << "FT\n"; break;
    case TokenKind::FT2: os << "FT2\n"; break;
    case TokenKind::Dilate: os << "DIL " << inline_matrix(t.M) << '\n'; break;
    case TokenKind::ChirpMul: os << "CHM " << inline_matrix(t.M) << '\n'; break;
    case TokenKind::ChirpConv: os << "CHC " << inline_matrix(t.M) << '\n'; break;
    case TokenKind::FreeBlock:
      for (const auto& s : factor_symplectic(SymplecticMat(t.M, 1e-8)).tokens) emit(os, s, d);
      break;
  }
}

}  // namespace

std::string format_word(const MetaplecticWord& w) {
  std::ostringstream os;
  for (const auto& t : w.tokens) emit(os, t, w.d);
  return os.str();
}

MetaplecticWord parse_word(const std::string& text, int d_hint) {
  std::vector<Token> toks;
  std::istringstream in(text);
  std::string line;
  int d = d_hint;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto p = line.find('#'); p != std::string::npos) line.erase(p);
    std::istringstream ls(line);
    std::string op, arg;
    if (!(ls >> op)) continue;
    std::getline(ls, arg);
    auto bad = [&](const std::string& why) {
      std::ostringstream os;
      os << "line " << lineno << ": " << why;
      return Error(ErrorCode::FormatVersion, os.str());
    };
    if (op == "FT") {
      toks.push_back(Token::ft());
    } else if (op == "FT2") {
      toks.push_back(Token::ft2());
      if (d == 0) d = 2;
    } else if (op == "DIL" || op == "CHM" || op == "CHC") {
      if (arg.find_first_not_of(" \t\r") == std::string::npos) throw bad(op + " needs a matrix");
      RMat m = parse_inline(arg);
      if (m.rows() != m.cols()) throw bad("matrix is not square");
      int md = static_cast<int>(m.rows());
      if (d == 0) d = md;
      if (md != d) throw bad("matrix size does not match the word dimension");
      if (op == "DIL") toks.push_back(Token::dilate(m));
      else if (op == "CHM") toks.push_back(Token::chirp_mul(m));
      else toks.push_back(Token::chirp_conv(m));
    } else {
      throw bad("unknown token '" + op + "'");
    }
  }
  if (d == 0) d = 1;
  return MetaplecticWord(d, std::move(toks));
}

}  // namespace wig
