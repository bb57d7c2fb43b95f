#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wig/fio.hpp"
#include "wig/kernel.hpp"
#include "wig/propagator.hpp"
#include "wig/signal.hpp"

namespace wig {

// WKT: "WGK1", u32 rank, u32 dims[rank], u32 meta count, f64 meta[count],
// then interleaved re/im f64, all little-endian, row-major.
std::string encode_wkt(const Tensor& t);
Tensor decode_wkt(const std::string& bytes);
void write_wkt(const std::string& path, const Tensor& t);
Tensor read_wkt(const std::string& path);

// The first meta entry tags what a tensor holds.
enum class WktKind { Signal = 1, Field = 2, Operator = 3, Kernel = 4 };
WktKind wkt_kind(const Tensor& t);  // rank-4 tensors are kernels

Tensor signal_to_tensor(const Signal& f);  // meta {tag, h}
Signal signal_from_tensor(const Tensor& t);
Tensor field_to_tensor(const PhaseField& F);  // meta {tag, layout, h, x_step, freq_step}
PhaseField field_from_tensor(const Tensor& t);
Tensor operator_to_tensor(const OperatorKernel& T);  // meta {tag, h}
OperatorKernel operator_from_tensor(const Tensor& t);

// d = 1 signals: one sample per line, "re" or "re,im".
Signal read_signal_csv(const std::string& path, double h = 0.0);  // h <= 0: self-dual
void write_signal_csv(const std::string& path, const Signal& f);
std::vector<double> read_column_csv(const std::string& path);

// 16-bit P5 PGM of |v| on a rows x cols grid. Log mode maps
// clamp(log10(|v| / max) + 8, 0, 8) / 8 to [0, 65535]; linear mode |v| / max.
std::string encode_pgm(const std::vector<double>& mag, int rows, int cols, bool log_scale);
void write_pgm(const std::string& path, const PhaseField& F, bool log_scale = true);

// key = value lines; '#' starts a comment. Duplicate keys are an error.
std::map<std::string, std::string> parse_key_values(const std::string& text);

struct RunConfig {
  int n = 32;
  std::string h_mode = "selfdual";  // selfdual | explicit
  double h = 0.0;                   // used when h_mode = explicit
  double tol = 1e-8;
  double membership_tail = 1e-3;
  double memory_cap_gib = 2.0;
  int stride = 4;
  double omega = kDefaultOmega;
  std::string out_dir = ".";
  int threads = 0;  // 0: library default
  unsigned seed = 1;

  Grid grid() const;
  static RunConfig parse(const std::string& text);  // rejects unknown keys and out-of-range values
  static RunConfig load(const std::string& path);
};

// ham.cfg: A, B, C (CSV paths or a single number), pert = none | multiplier |
// fourier | kn, profile (CSV samples, or a WKT symbol for kn), omega, n.
// Relative paths resolve against the directory of the file.
struct HamConfig {
  PerturbedHamiltonian H;
  int n = 32;
  static HamConfig parse(const std::string& text, const std::string& base_dir = ".");
  static HamConfig load(const std::string& path);
};

// Nearest-sample lookup of a rectangular field, periodic in both axes.
Symbol symbol_from_field(const PhaseField& F);

}  // namespace wig
