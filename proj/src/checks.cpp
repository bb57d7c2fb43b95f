#include "wig/checks.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "wig/metaplectic.hpp"
#include "wig/parallel.hpp"
#include "wig/transforms.hpp"

namespace wig {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kInf = std::numeric_limits<double>::infinity();

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

CheckRow upper(std::string name, double v, double thr, std::string note = {}) {
  return {std::move(name), v, thr, true, v <= thr, std::move(note)};
}
CheckRow lower(std::string name, double v, double thr, std::string note = {}) {
  return {std::move(name), v, thr, false, v >= thr, std::move(note)};
}
CheckRow info(std::string name, double v, std::string note = {}) {
  return {std::move(name), v, kInf, true, true, std::move(note)};
}

RMat m1(double v) { return RMat::Constant(1, 1, v); }

CMat random_matrix(int n, std::mt19937& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  CMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(N(rng), N(rng));
  return m;
}

Signal random_packet(const Grid& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Signal f(g);
  double a = 0.7 + 0.3 * (U(rng) + 1), c = U(rng), w = U(rng);
  for (int j = 0; j < g.n; ++j) {
    double t = g.x(j);
    f[j] = std::exp(-kPi * a * (t - c) * (t - c)) * std::polar(1.0, 2 * kPi * w * t);
  }
  return f;
}

RMat random_symmetric(std::mt19937& rng, int d, double s) {
  std::normal_distribution<double> N(0.0, s);
  RMat C(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j) C(i, j) = C(j, i) = N(rng);
  return C;
}

QuadraticPhase phase(double P, double Q, double R) { return {m1(P), m1(Q), m1(R)}; }

// Gaussian amplitude that cancels the phase, so k_T stays a real Gaussian
// resolved by the lattice whatever Phi is
Symbol compensated_gaussian(const QuadraticPhase& phi, double a = 1, double b = 1) {
  return {[=](double x, double e) { return std::polar(std::exp(-kPi * (a * x * x + b * e * e)), -2 * kPi * phi(x, e)); }};
}

OperatorKernel inverse_op(const OperatorKernel& T) {
  const double h = T.grid.h;
  return OperatorKernel(T.grid, T.matrix.inverse() / (h * h));  // T f = h M f
}

OperatorKernel chirp_op(const Grid& g, double c) {
  return OperatorKernel::from_action(g, [c](const Signal& f) { return chirp_mul(f, m1(c)); });
}

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(4);
  o << v;
  return o.str();
}

}  // namespace

bool SuiteResult::pass() const {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

std::string SuiteResult::csv() const {
  std::ostringstream o;
  o.precision(6);
  o << "suite,check,value,bound,pass,note\n";
  for (const auto& r : rows) {
    o << suite << ',' << r.name << ',' << r.value << ',';
    if (std::isinf(r.threshold)) o << "-";
    else o << (r.upper ? "<=" : ">=") << r.threshold;
    o << ',' << (r.pass ? "pass" : "FAIL") << ',' << r.note << '\n';
  }
  return o.str();
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"moyal", "symplectic", "intertwine", "fio", "propagator", "normequiv", "perf"};
  return names;
}

SuiteResult run_suite(const std::string& name, const RunConfig& cfg) {
  if (cfg.threads > 0) set_threads(cfg.threads);
  auto t0 = Clock::now();
  SuiteResult r;
  if (name == "moyal") r = suite_moyal(cfg);
  else if (name == "symplectic") r = suite_symplectic(cfg);
  else if (name == "intertwine") r = suite_intertwine(cfg);
  else if (name == "fio") r = suite_fio(cfg);
  else if (name == "propagator") r = suite_propagator(cfg);
  else if (name == "normequiv") r = suite_normequiv(cfg);
  else if (name == "perf") r = suite_perf(cfg);
  else throw Error(ErrorCode::UnknownSuite, "no suite named '" + name + "'");
  r.suite = name;
  r.seconds = since(t0);
  return r;
}

SuiteResult suite_moyal(const RunConfig&) {
  auto t0 = Clock::now();
  Grid g = Grid::selfdual(1, 256);
  std::vector<Signal> B;
  for (int k = 0; k <= 4; ++k) B.push_back(hermite(g, k));
  // a complex member so conjugation errors cannot hide behind real data
  B.push_back(time_freq_shift(B[1], 3 * g.h, -2 * g.h) + cplx(0, 0.5) * B[2]);
  const std::size_t m = B.size();
  std::vector<PhaseField> W(m * m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) W[a * m + b] = wigner(B[a], B[b]);
  double worst = 0;
  for (std::size_t f = 0; f < m; ++f)
    for (std::size_t gg = 0; gg < m; ++gg)
      for (std::size_t u = 0; u < m; ++u)
        for (std::size_t v = 0; v < m; ++v) {
          cplx lhs = moyal_pairing(W[f * m + gg], W[u * m + v]);
          cplx rhs = inner(B[f], B[u]) * std::conj(inner(B[gg], B[v]));
          double scale = B[f].norm() * B[gg].norm() * B[u].norm() * B[v].norm();
          worst = std::max(worst, std::abs(lhs - rhs) / scale);
        }
  double norm_err = 0;
  for (std::size_t f = 0; f < m; ++f) {
    double nf = B[f].norm();
    norm_err = std::max(norm_err, std::abs(W[f * m + f].norm() - nf * nf) / (nf * nf));
  }
  SuiteResult r;
  r.rows.push_back(upper("moyal_identity_n256", worst, 1e-8, std::to_string(m * m * m * m) + " quadruples"));
  r.rows.push_back(upper("wigner_norm_n256", norm_err, 1e-8));
  r.rows.push_back(upper("runtime_s", since(t0), 5.0));
  return r;
}

SuiteResult suite_symplectic(const RunConfig& cfg) {
  std::mt19937 rng(cfg.seed);
  std::uniform_int_distribution<int> pick(0, 2);
  std::normal_distribution<double> N(0.0, 1.0);
  double worst_res = 0;
  int ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 2;
    RMat S = RMat::Identity(2 * d, 2 * d);
    for (int i = 0; i < 6; ++i) {
      int k = pick(rng);
      if (k == 0) S = S * make_VC(random_symmetric(rng, d, 0.5)).matrix();
      else if (k == 1) S = S * make_DL(RMat::Identity(d, d) + 0.3 * RMat::NullaryExpr(d, d, [&] { return N(rng); })).matrix();
      else S = S * make_J(d).matrix();
    }
    worst_res = std::max(worst_res, symplectic_residual(S));
    ok += is_symplectic(S, 1e-10);
  }
  SuiteResult r;
  r.rows.push_back(lower("random_products_symplectic", ok, 100, "max residual " + fmt(worst_res)));

  Grid g = Grid::selfdual(1, 64);
  const double h = g.h;
  const std::vector<std::vector<double>> shifts{{h, 0}, {0, h}, {2 * h, -3 * h}, {-4 * h, 2 * h}};
  auto cov = [&](const MetaplecticWord& w, double scale) {
    double worst = 0;
    for (const auto& z : shifts) worst = std::max(worst, covariance_defect(w, g, {scale * z[0], scale * z[1]}));
    return worst;
  };
  r.rows.push_back(upper("covariance_ft", cov(MetaplecticWord(1, {Token::ft()}), 1), 1e-8));
  r.rows.push_back(upper("covariance_chirp", cov(MetaplecticWord(1, {Token::chirp_mul(m1(2.0))}), 1), 1e-8));
  r.rows.push_back(upper("covariance_chirp_conv", cov(MetaplecticWord(1, {Token::chirp_conv(m1(1.0))}), 1), 1e-8));
  // dyadic dilation maps the doubled lattice onto the lattice
  r.rows.push_back(upper("covariance_dyadic_dilation", cov(MetaplecticWord(1, {Token::dilate(m1(2.0))}), 2), 1e-8));

  // composition: A(B f) = c mu(S_A S_B) f with |c| = 1 and one c for the whole
  // battery, where mu(S_A S_B) is factored afresh from the product matrix
  // pairs whose products factor into lattice-exact tokens
  const MetaplecticWord pairs[][2] = {
      {MetaplecticWord(1, {Token::ft(), Token::chirp_mul(m1(2.0))}), MetaplecticWord(1, {Token::chirp_mul(m1(-2.0)), Token::ft()})},
      {MetaplecticWord(1, {Token::chirp_mul(m1(1.0))}), MetaplecticWord(1, {Token::chirp_mul(m1(2.0))})},
      {MetaplecticWord(1, {Token::dilate(m1(2.0))}), MetaplecticWord(1, {Token::ft(), Token::ft()})},
      {MetaplecticWord(1, {Token::ft()}), MetaplecticWord(1, {Token::ft(), Token::ft(), Token::ft()})}};
  double modulus = 0, spread = 0, resid = 0;
  for (const auto& p : pairs) {
    MetaplecticWord ab = factor_symplectic(p[0].projection() * p[1].projection());
    cplx c0 = 0;
    for (const auto& f : hermite_battery(g)) {
      Signal u = apply(p[0], apply(p[1], f)), v = apply(ab, f);
      cplx c = inner(v, u) / inner(v, v);
      resid = std::max(resid, (u - c * v).norm() / f.norm());
      modulus = std::max(modulus, std::abs(std::abs(c) - 1.0));
      if (c0 == cplx(0.0)) c0 = c;
      spread = std::max(spread, std::abs(c - c0));
    }
  }
  r.rows.push_back(upper("composition_phase_modulus", modulus, 1e-9));
  r.rows.push_back(upper("composition_phase_spread", spread, 1e-9));
  r.rows.push_back(upper("composition_residual", resid, 1e-8));
  return r;
}

SuiteResult suite_intertwine(const RunConfig& cfg) {
  auto t0 = Clock::now();
  std::mt19937 rng(cfg.seed);
  Grid g = Grid::selfdual(1, 32);
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    OperatorKernel T(g, random_matrix(g.n, rng));
    Signal f = random_packet(g, rng), u = random_packet(g, rng);
    worst = std::max(worst, intertwining_defect(T, f, u));
  }
  SuiteResult r;
  r.rows.push_back(upper("intertwining_defect_n32", worst, 1e-5, "50 random triples"));
  r.rows.push_back(upper("runtime_s", since(t0), 60.0));
  return r;
}

SuiteResult suite_fio(const RunConfig& cfg) {
  SuiteResult r;
  Grid g = Grid::selfdual(1, 32);
  auto t0 = Clock::now();
  Type1Options opt;
  opt.refine = 2;
  // P, Q, R and the Gaussian widths in x and eta
  const double phases[][5] = {{0, 1, 0, 1, 1}, {2, 1, 0, 1.2, 1}, {-2, 1, 0, 1, 1.25}, {0, 1, 2, 1.3, 1.1}, {2, 1, -2, 1.1, 1.3}};
  for (const auto& p : phases) {
    QuadraticPhase phi = phase(p[0], p[1], p[2]);
    Symbol s = compensated_gaussian(phi, p[3], p[4]);
    WignerKernel a = wigner_kernel(type1_fio(s.sample(g), phi));
    WignerKernel b = wigner_kernel_type1(s, phi, g, opt);
    std::ostringstream name;
    name << "two_path_P" << p[0] << "_Q" << p[1] << "_R" << p[2];
    r.rows.push_back(upper(name.str(), (a.k - b.k).norm() / a.k.norm(), 1e-4));
  }
  r.rows.push_back(upper("two_path_runtime_s", since(t0), 120.0));

  // class diagnostics on a fixed battery; a row passes when the verdict matches
  MembershipOptions mo;
  mo.tail_max = cfg.membership_tail;
  mo.stride = cfg.stride;
  SymplecticMat I2(RMat::Identity(2, 2));
  int wrong = 0;
  auto member = [&](const std::string& name, const OperatorKernel& T, const SymplecticMat& S, bool expect) {
    MembershipReport m = fio_membership(T, S, mo);
    CheckRow row{"membership_" + name, m.tail, mo.tail_max, true, m.pass == expect,
                 std::string(expect ? "expect pass" : "control, expect fail") + "; verdict " + (m.pass ? "pass" : "fail") +
                     "; exponent " + fmt(m.exponent)};
    wrong += m.pass != expect;
    r.rows.push_back(row);
  };
  Symbol ell = Symbol::gaussian(1, 1, 1, 0.25, 1.0);  // identity plus a smoothing part
  PhaseField ells = ell.sample(g);
  OperatorKernel kn = kn_op(ells);
  member("identity", OperatorKernel::identity(g), I2, true);
  for (double c : {2.0, -2.0, 4.0}) member("chirp_" + fmt(c), chirp_op(g, c), make_VC(m1(c)), true);
  member("lattice_shift",
         OperatorKernel::from_action(g, [&](const Signal& f) { return time_freq_shift(f, 2 * g.h, g.h); }), I2, true);
  member("kn_elliptic", kn, I2, true);
  for (double P : {2.0, -2.0}) {
    QuadraticPhase q = phase(P, 1, 0);
    OperatorKernel T = type1_fio(ells, q);
    member("type1_P" + fmt(P), T, q.symplectic(), true);
    member("type1_P" + fmt(P) + "_adjoint", type2_adjoint(T), q.symplectic().inverse(), true);
    member("type1_P" + fmt(P) + "_inverse", inverse_op(T), q.symplectic().inverse(), true);
  }
  QuadraticPhase q2 = phase(2, 1, 0), qm = phase(-2, 1, 0);
  OperatorKernel c2 = chirp_op(g, 2);
  member("product_chirp2_type1_P2", c2 * type1_fio(ells, q2), make_VC(m1(2)) * q2.symplectic(), true);
  member("product_chirp2_chirp2", c2 * c2, make_VC(m1(2)) * make_VC(m1(2)), true);
  member("product_kn_type1_P-2", kn * type1_fio(ells, qm), qm.symplectic(), true);
  member("chirp2_inverse", inverse_op(c2), make_VC(m1(2)).inverse(), true);
  member("chirp2_adjoint", c2.adjoint(), make_VC(m1(2)).inverse(), true);
  member("kn_inverse", inverse_op(kn), I2, true);
  member("chirp2_wrong_map", c2, I2, false);
  std::mt19937 rng(cfg.seed + 100);
  for (int t = 0; t < 3; ++t) member("random_dense_" + std::to_string(t), OperatorKernel(g, random_matrix(g.n, rng)), I2, false);
  r.rows.push_back(upper("membership_false_verdicts", wrong, 0));
  return r;
}

SuiteResult suite_propagator(const RunConfig& cfg) {
  SuiteResult r;
  Grid g = Grid::selfdual(1, 32);
  PerturbedHamiltonian H0;
  H0.quad = QuadraticHamiltonian::harmonic_oscillator();
  H0.omega = cfg.omega;
  const double quarter = kPi * kPi * cfg.omega / kDefaultOmega;  // t at which S_t = J

  MembershipOptions mo;
  mo.tail_max = cfg.membership_tail;
  mo.stride = cfg.stride;
  for (auto [t, label] : {std::pair{quarter / 2, "regular"}, std::pair{quarter, "caustic"}}) {
    PropagatorKernel P = propagator_kernel(H0, g, t, 64);
    MembershipReport m = fio_membership(P.kernel, P.S, mo);
    r.rows.push_back({std::string("membership_t_") + label, m.tail, mo.tail_max, true, m.pass,
                      "t = " + fmt(t) + "; exponent " + fmt(m.exponent) + (m.snapped ? "; S_t snapped" : "")});
  }

  std::mt19937 rng(cfg.seed);
  Signal u0 = random_packet(g, rng);
  r.rows.push_back(upper("quarter_period_vs_dft", fit_phase(quad_propagate(H0.quad, quarter, u0, cfg.omega), dft(u0)).residual, 1e-7));

  PerturbedHamiltonian H = H0;
  H.kind = PertKind::Multiplier;
  H.profile = [](double x) { return 0.5 * std::exp(-kPi * x * x); };
  Signal ref = split_step(H, 1.0, 4096, u0);
  double e1 = (split_step(H, 1.0, 64, u0) - ref).norm(), e2 = (split_step(H, 1.0, 128, u0) - ref).norm();
  r.rows.push_back(lower("richardson_ratio_min", e1 / e2, 3.6, "steps 64 / 128 against 4096"));
  r.rows.push_back(upper("richardson_ratio_max", e1 / e2, 4.4));

  SemigroupReport s = semigroup_extension_check(H, g, 1.5 * quarter, 0, 600);
  r.rows.push_back(upper("semigroup_tiling", s.matrix_defect, 1e-5, std::to_string(s.tiles) + " tiles"));
  r.rows.push_back(upper("semigroup_flow", s.flow_defect, 1e-9));

  SignCalibration cal = calibrate_pert_sign(H, 1.0, 256, u0);
  r.rows.push_back(upper("perturbation_sign_oracle", std::min(cal.err_minus, cal.err_plus), 1e-4,
                         "matching sign " + std::to_string(cal.matching) + "; other sign error " +
                             fmt(std::max(cal.err_minus, cal.err_plus))));
  return r;
}

SuiteResult suite_normequiv(const RunConfig& cfg) {
  SuiteResult r;
  std::mt19937 rng(cfg.seed);
  double anchor = 0;
  std::vector<double> logs;
  for (int n : {24, 32, 48}) {
    Grid g = Grid::selfdual(1, n);
    double acc = 0;
    for (int trial = 0; trial < 20; ++trial) {
      NormEquivalence e = norm_equivalence_experiment(OperatorKernel(g, random_matrix(n, rng)), 1.0);
      if (n == 32) anchor = std::max(anchor, std::abs(e.ratio[0] - 1.0));
      acc += std::log(e.ratio[1]);
    }
    logs.push_back(acc / 20);
    r.rows.push_back(info("log_ratio_vs_n" + std::to_string(n), logs.back(), "mean over 20 random T"));
  }
  r.rows.push_back(upper("anchor_ratio_m1_n32", anchor, 1e-4, "max |ratio - 1| over 20 random T"));
  double spread = std::max(std::abs(logs[0] - logs[1]), std::abs(logs[2] - logs[1])) / std::abs(logs[1]);
  double ratio_drift = std::exp(std::max(std::abs(logs[0] - logs[1]), std::abs(logs[2] - logs[1]))) - 1;
  r.rows.push_back(upper("log_ratio_vs_spread", spread, 0.2,
                         "relative to n = 32; the ratio itself drifts by " + fmt(100 * ratio_drift) + "%"));
  return r;
}

std::size_t peak_rss_bytes() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("VmHWM:", 0) == 0) return static_cast<std::size_t>(std::stoull(line.substr(6))) * 1024;
  return 0;
}

bool reset_peak_rss() {
  std::ofstream out("/proc/self/clear_refs");
  if (!out) return false;
  out << "5";
  return static_cast<bool>(out.flush());
}

SuiteResult suite_perf(const RunConfig& cfg) {
  SuiteResult r;
  std::mt19937 rng(cfg.seed);
  double t32 = 0, t48 = 0;
  std::size_t peak48 = 0;
  for (int n : {16, 32, 48}) {
    Grid g = Grid::selfdual(1, n);
    OperatorKernel T(g, random_matrix(n, rng));
    bool reset = reset_peak_rss();
    auto t0 = Clock::now();
    double secs;
    {
      WignerKernel K = wigner_kernel(T);
      secs = since(t0);
    }
    std::size_t peak = peak_rss_bytes();
    r.rows.push_back(info("kernel_build_s_n" + std::to_string(n), secs,
                          "peak " + fmt(peak / 1048576.0) + " MiB" + (reset ? "" : " (process lifetime)")));
    if (n == 32) t32 = secs;
    if (n == 48) t48 = secs, peak48 = peak;
  }
  r.rows.push_back(upper("scaling_n48_over_n32", t48 / t32, 10.0, "n^4 predicts " + fmt(std::pow(1.5, 4))));
  r.rows.push_back(upper("peak_memory_gib_n48", peak48 / 1073741824.0, cfg.memory_cap_gib));
  return r;
}

}  // namespace wig
