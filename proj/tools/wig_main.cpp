#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "wig/checks.hpp"
#include "wig/io.hpp"
#include "wig/metaplectic.hpp"
#include "wig/modnorm.hpp"
#include "wig/parallel.hpp"
#include "wig/transforms.hpp"

using namespace wig;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kPass = 0, kCheckFail = 1, kUsage = 2;

bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

Signal load_signal(const std::string& path, const RunConfig& cfg) {
  if (ends_with(path, ".csv")) return read_signal_csv(path, cfg.h_mode == "explicit" ? cfg.h : 0.0);
  return signal_from_tensor(read_wkt(path));
}

OperatorKernel load_operator(const std::string& path, const RunConfig& cfg) {
  if (ends_with(path, ".wkt")) return operator_from_tensor(read_wkt(path));
  // anything else is read as a metaplectic word in text form
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IO, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  MetaplecticWord w = parse_word(ss.str(), 1);
  return OperatorKernel::from_action(cfg.grid(), [&](const Signal& f) { return apply(w, f); });
}

// phase.csv holds P, Q, R for d = 1 on one line (or one per line)
QuadraticPhase load_phase(const std::string& path) {
  RMat m = read_matrix_csv(path);
  if (m.size() != 3) throw Error(ErrorCode::FormatVersion, path + ": expected the three entries P, Q, R");
  RMat v = m.reshaped(3, 1);
  if (m.rows() == 1) v = m.transpose();
  return {RMat::Constant(1, 1, v(0)), RMat::Constant(1, 1, v(1)), RMat::Constant(1, 1, v(2))};
}

void emit(std::ostream& out, const json& j) { out << j.dump() << '\n'; }

json membership_record(const MembershipReport& m) { return json::parse(membership_json(m)); }

struct Common {
  std::string config;
  int threads = 0;
  RunConfig cfg;
  void load() {
    if (!config.empty()) cfg = RunConfig::load(config);
    if (threads > 0) cfg.threads = threads;
    if (cfg.threads > 0) set_threads(cfg.threads);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wig: discrete Wigner kernels, metaplectic operators and FIO diagnostics"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config, "key=value run configuration")->check(CLI::ExistingFile);
  app.add_option("--threads", common.threads, "worker cap (0: hardware)")
      ->envname("WIG_THREADS")
      ->check(CLI::NonNegativeNumber)
      ->default_val(0);

  // wigner
  auto* cw = app.add_subcommand("wigner", "Wigner distribution or STFT of a signal");
  std::string w_in, w_out, w_pgm, w_window, w_transform = "wigner";
  bool w_linear = false;
  cw->add_option("--in", w_in, "input signal (.wkt or .csv)")->required();
  cw->add_option("--out", w_out, "output field (.wkt)")->required();
  cw->add_option("--pgm", w_pgm, "optional 16-bit heatmap");
  cw->add_flag("--linear", w_linear, "linear heatmap scaling (default log)");
  cw->add_option("--transform", w_transform, "wigner or stft")->check(CLI::IsMember({"wigner", "stft"}))->default_val("wigner");
  cw->add_option("--window", w_window, "STFT window (default: normalized Gaussian)");

  // kernel
  auto* ck = app.add_subcommand("kernel", "Wigner kernel of an operator and class diagnostics");
  std::string k_op, k_out, k_compose, k_membership, k_report;
  bool k_adjoint = false, k_invert = false;
  ck->add_option("--op", k_op, "operator (.wkt operator tensor or a word text file)")->required();
  ck->add_option("--out", k_out, "kernel output (.wkt)");
  ck->add_option("--compose", k_compose, "second operator; the kernel of op * second is formed");
  ck->add_flag("--adjoint", k_adjoint, "kernel of the adjoint");
  ck->add_flag("--invert", k_invert, "kernel of the inverse");
  ck->add_option("--membership", k_membership, "canonical map S (CSV) to test membership against");
  ck->add_option("--report", k_report, "JSON-lines report path (default stdout)");

  // fio
  auto* cf = app.add_subcommand("fio", "Type-I FIO from a symbol and a quadratic phase");
  std::string f_symbol, f_phase, f_S, f_out, f_report;
  bool f_check = false, f_two_path = false;
  int f_refine = 2;
  cf->add_option("--symbol", f_symbol, "symbol on the rectangular lattice (.wkt field)")->required();
  cf->add_option("--phase", f_phase, "CSV with P, Q, R")->required();
  cf->add_flag("--check-membership", f_check, "run the membership diagnostic");
  cf->add_option("--S", f_S, "canonical map (CSV); default: the map generated by the phase");
  cf->add_flag("--two-path", f_two_path, "compare with the closed-form kernel");
  cf->add_option("--refine", f_refine, "closed-form quadrature refinement")->check(CLI::Range(1, 8))->default_val(2);
  cf->add_option("--out", f_out, "operator output (.wkt)");
  cf->add_option("--report", f_report, "JSON-lines report path (default stdout)");

  // propagate
  auto* cp = app.add_subcommand("propagate", "Split-step propagation of a perturbed quadratic Hamiltonian");
  std::string p_ham, p_out, p_in, p_report;
  double p_t = 1.5;
  int p_steps = 2048;
  bool p_kernel = false;
  cp->add_option("--ham", p_ham, "ham.cfg")->required();
  cp->add_option("--t", p_t, "final time")->default_val(1.5);
  cp->add_option("--steps", p_steps, "split steps")->check(CLI::PositiveNumber)->default_val(2048);
  cp->add_option("--in", p_in, "initial state (.wkt or .csv; default: Gaussian)");
  cp->add_option("--out", p_out, "final state (.wkt)")->required();
  cp->add_flag("--kernel", p_kernel, "also write the propagator kernel and its membership report");
  cp->add_option("--report", p_report, "JSON-lines report path (default stdout)");

  // checks
  auto* cc = app.add_subcommand("checks", "Run a validation suite and print a CSV summary");
  std::string c_suite, c_out;
  cc->add_option("suite", c_suite, "moyal | symplectic | intertwine | fio | propagator | normequiv | perf")->required();
  cc->add_option("--out", c_out, "also write the CSV here");

  // info
  auto* ci = app.add_subcommand("info", "Describe a WKT file or the build");
  std::string i_file;
  ci->add_option("file", i_file, "WKT file to describe");

  // CLI11 skips environment values that fail validation; be strict instead
  if (const char* env = std::getenv("WIG_THREADS")) {
    std::string v = env;
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
      std::cerr << "wig: Usage: WIG_THREADS must be a non-negative integer\n";
      return kUsage;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }

  try {
    common.load();
    const RunConfig& cfg = common.cfg;
    auto report_stream = [](const std::string& path) -> std::unique_ptr<std::ostream> {
      if (path.empty()) return nullptr;
      auto f = std::make_unique<std::ofstream>(path);
      if (!*f) throw Error(ErrorCode::IO, "cannot write " + path);
      return f;
    };

    if (*cw) {
      Signal f = load_signal(w_in, cfg);
      PhaseField F;
      if (w_transform == "stft") F = stft(f, w_window.empty() ? default_window(f.grid) : load_signal(w_window, cfg));
      else F = wigner(f);
      write_wkt(w_out, field_to_tensor(F));
      if (!w_pgm.empty()) write_pgm(w_pgm, F, !w_linear);
      emit(std::cout, {{"command", "wigner"}, {"transform", w_transform}, {"n", f.grid.n}, {"x_step", F.x_step},
                       {"freq_step", F.freq_step}, {"out", w_out}});
      return kPass;
    }

    if (*ck) {
      OperatorKernel T = load_operator(k_op, cfg);
      if (!k_compose.empty()) {
        OperatorKernel U = load_operator(k_compose, cfg);
        if (U.grid != T.grid) throw Error(ErrorCode::LatticeMismatch, "operators live on different grids");
        T = T * U;
      }
      if (k_adjoint) T = T.adjoint();
      WignerKernel K;
      if (k_invert) {
        K = inverse_kernel(T);
        T = OperatorKernel(T.grid, T.matrix.inverse() / (T.grid.h * T.grid.h));
      } else {
        K = wigner_kernel(T);
      }
      if (!k_out.empty()) write_wkt(k_out, kernel_to_tensor(K));
      auto rep = report_stream(k_report);
      std::ostream& out = rep ? *rep : std::cout;
      json j{{"command", "kernel"}, {"n", T.grid.n}, {"dim", K.dim()}, {"cell", K.cell}};
      int rc = kPass;
      if (!k_membership.empty()) {
        SymplecticMat S(read_matrix_csv(k_membership));
        MembershipOptions mo;
        mo.tail_max = cfg.membership_tail;
        mo.stride = cfg.stride;
        MembershipReport m = fio_membership(K, S, mo);
        j["membership"] = membership_record(m);
        rc = m.pass ? kPass : kCheckFail;
      }
      emit(out, j);
      return rc;
    }

    if (*cf) {
      PhaseField sym = field_from_tensor(read_wkt(f_symbol));
      QuadraticPhase phi = load_phase(f_phase);
      OperatorKernel T = type1_fio(sym, phi);
      if (!f_out.empty()) write_wkt(f_out, operator_to_tensor(T));
      auto rep = report_stream(f_report);
      std::ostream& out = rep ? *rep : std::cout;
      int rc = kPass;
      if (f_two_path) {
        Type1Options opt;
        opt.refine = f_refine;
        WignerKernel a = wigner_kernel(T);
        WignerKernel b = wigner_kernel_type1(symbol_from_field(sym), phi, sym.grid, opt);
        double rel = (a.k - b.k).norm() / a.k.norm();
        emit(out, {{"command", "fio"}, {"check", "two_path"}, {"discrepancy", rel}, {"pass", rel <= 1e-4}});
        if (rel > 1e-4) rc = kCheckFail;
      }
      if (f_check) {
        SymplecticMat S = f_S.empty() ? phi.symplectic() : SymplecticMat(read_matrix_csv(f_S));
        MembershipOptions mo;
        mo.tail_max = cfg.membership_tail;
        mo.stride = cfg.stride;
        MembershipReport m = fio_membership(T, S, mo);
        emit(out, membership_record(m));
        if (!m.pass) rc = kCheckFail;
      }
      if (!f_two_path && !f_check) emit(out, {{"command", "fio"}, {"n", T.grid.n}, {"op_norm", T.op_norm()}});
      return rc;
    }

    if (*cp) {
      HamConfig hc = HamConfig::load(p_ham);
      Grid g = Grid::selfdual(1, hc.n);
      Signal u0 = p_in.empty() ? gaussian(g) : load_signal(p_in, cfg);
      if (u0.grid.n != hc.n) throw Error(ErrorCode::DimMismatch, "initial state and ham.cfg disagree on n");
      g = u0.grid;
      Signal u = split_step(hc.H, p_t, p_steps, u0);
      write_wkt(p_out, signal_to_tensor(u));
      auto rep = report_stream(p_report);
      std::ostream& out = rep ? *rep : std::cout;
      json j{{"command", "propagate"}, {"t", p_t}, {"steps", p_steps}, {"n", g.n}, {"norm_drift", std::abs(u.norm() - u0.norm())},
             {"out", p_out}, {"pert_sign", hc.H.pert_sign}};
      if (hc.H.kind != PertKind::None) {
        SignCalibration c = calibrate_pert_sign(hc.H, p_t, std::min(p_steps, 512), u0);
        j["sign_calibration"] = {{"err_plus", c.err_plus}, {"err_minus", c.err_minus}, {"matching", c.matching}};
      }
      int rc = kPass;
      if (p_kernel) {
        PropagatorKernel P = propagator_kernel(hc.H, g, p_t, p_steps);
        fs::path kp = fs::path(p_out).replace_extension(".kernel.wkt");
        write_wkt(kp.string(), kernel_to_tensor(P.kernel));
        MembershipOptions mo;
        mo.tail_max = cfg.membership_tail;
        mo.stride = cfg.stride;
        MembershipReport m = fio_membership(P.kernel, P.S, mo);
        j["kernel"] = kp.string();
        j["membership"] = membership_record(m);
        if (!m.pass) rc = kCheckFail;
      }
      emit(out, j);
      return rc;
    }

    if (*cc) {
      SuiteResult r = run_suite(c_suite, cfg);
      std::string csv = r.csv();
      std::cout << csv;
      if (!c_out.empty()) {
        std::ofstream o(c_out);
        if (!o) throw Error(ErrorCode::IO, "cannot write " + c_out);
        o << csv;
      }
      std::cerr << c_suite << ": " << (r.pass() ? "pass" : "FAIL") << " in " << r.seconds << " s\n";
      return r.pass() ? kPass : kCheckFail;
    }

    if (*ci) {
      if (i_file.empty()) {
        json suites = suite_names();
        emit(std::cout, {{"program", "wig"}, {"threads", threads()}, {"suites", suites}, {"wkt_magic", "WGK1"}});
        return kPass;
      }
      Tensor t = read_wkt(i_file);
      static const char* kinds[] = {"", "signal", "field", "operator", "kernel"};
      emit(std::cout, {{"file", i_file}, {"kind", kinds[static_cast<int>(wkt_kind(t))]}, {"dims", t.dims}, {"meta", t.meta}});
      return kPass;
    }
  } catch (const Error& e) {
    std::cerr << "wig: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "wig: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
