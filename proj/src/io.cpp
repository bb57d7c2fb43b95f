#include "wig/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wig/symplectic.hpp"

namespace wig {

namespace {

static_assert(std::endian::native == std::endian::little, "WKT I/O assumes a little-endian host");

constexpr char kMagic[4] = {'W', 'G', 'K', '1'};

template <class T>
void put(std::string& out, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.append(b, sizeof(T));
}

struct Reader {
  const std::string& s;
  std::size_t pos = 0;
  template <class T>
  T get() {
    if (pos + sizeof(T) > s.size()) throw Error(ErrorCode::FormatVersion, "truncated WKT stream");
    T v;
    std::memcpy(&v, s.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IO, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IO, "cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IO, "short write to " + path);
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw Error(ErrorCode::Usage, key + ": not a number: " + v);
  }
}

int to_int(const std::string& key, const std::string& v) {
  double d = to_double(key, v);
  if (d != std::floor(d) || std::abs(d) > 1e9) throw Error(ErrorCode::Usage, key + ": not an integer: " + v);
  return static_cast<int>(d);
}

void require(bool ok, const std::string& key, const std::string& why) {
  if (!ok) throw Error(ErrorCode::Usage, key + " " + why);
}

void check_tag(const Tensor& t, WktKind k, const char* what) {
  if (t.meta.empty() || t.meta[0] != static_cast<double>(k))
    throw Error(ErrorCode::FormatVersion, std::string("tensor does not hold ") + what);
}

}  // namespace

std::string encode_wkt(const Tensor& t) {
  if (t.v.size() != t.count()) throw Error(ErrorCode::DimMismatch, "tensor data does not match its dims");
  std::string out;
  out.reserve(16 + 4 * t.dims.size() + 8 * t.meta.size() + 16 * t.v.size());
  out.append(kMagic, 4);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(t.dims.size()));
  for (int d : t.dims) put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(t.meta.size()));
  for (double m : t.meta) put<double>(out, m);
  const std::size_t body = t.v.size() * sizeof(cplx);
  const std::size_t at = out.size();
  out.resize(at + body);
  std::memcpy(out.data() + at, t.v.data(), body);  // complex<double> is re, im
  return out;
}

Tensor decode_wkt(const std::string& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw Error(ErrorCode::FormatVersion, "bad magic, expected WGK1");
  Reader r{bytes, 4};
  Tensor t;
  const auto rank = r.get<std::uint32_t>();
  if (rank > 16) throw Error(ErrorCode::FormatVersion, "implausible rank " + std::to_string(rank));
  for (std::uint32_t i = 0; i < rank; ++i) {
    auto d = r.get<std::uint32_t>();
    if (d == 0 || d > (1u << 30)) throw Error(ErrorCode::FormatVersion, "bad dimension");
    t.dims.push_back(static_cast<int>(d));
  }
  const auto nm = r.get<std::uint32_t>();
  if (nm > (1u << 20)) throw Error(ErrorCode::FormatVersion, "implausible metadata count");
  for (std::uint32_t i = 0; i < nm; ++i) t.meta.push_back(r.get<double>());
  const std::size_t body = t.count() * sizeof(cplx);
  if (bytes.size() - r.pos != body) throw Error(ErrorCode::FormatVersion, "payload size does not match dims");
  t.v.resize(t.count());
  std::memcpy(t.v.data(), bytes.data() + r.pos, body);
  return t;
}

void write_wkt(const std::string& path, const Tensor& t) { spit(path, encode_wkt(t)); }
Tensor read_wkt(const std::string& path) { return decode_wkt(slurp(path)); }

WktKind wkt_kind(const Tensor& t) {
  if (t.dims.size() == 4 && (t.meta.empty() || t.meta[0] != static_cast<double>(WktKind::Field)))
    return WktKind::Kernel;
  if (t.meta.empty()) throw Error(ErrorCode::FormatVersion, "tensor has no kind tag");
  const int tag = static_cast<int>(t.meta[0]);
  if (tag < 1 || tag > 3 || t.meta[0] != tag) throw Error(ErrorCode::FormatVersion, "unknown kind tag");
  return static_cast<WktKind>(tag);
}

Tensor signal_to_tensor(const Signal& f) {
  Tensor t;
  t.dims.assign(f.grid.d, f.grid.n);
  t.meta = {static_cast<double>(WktKind::Signal), f.grid.h};
  t.v = f.v;
  return t;
}

Signal signal_from_tensor(const Tensor& t) {
  check_tag(t, WktKind::Signal, "a signal");
  if (t.dims.empty() || t.meta.size() < 2) throw Error(ErrorCode::FormatVersion, "malformed signal tensor");
  for (int d : t.dims)
    if (d != t.dims[0]) throw Error(ErrorCode::DimMismatch, "signal axes differ in length");
  return Signal(Grid(static_cast<int>(t.dims.size()), t.dims[0], t.meta[1]), t.v);
}

Tensor field_to_tensor(const PhaseField& F) {
  Tensor t;
  t.dims.assign(F.d(), F.nx);
  t.dims.insert(t.dims.end(), F.d(), F.nxi);
  t.meta = {static_cast<double>(WktKind::Field), static_cast<double>(F.kind), F.grid.h, F.x_step, F.freq_step};
  t.v = F.v;
  return t;
}

PhaseField field_from_tensor(const Tensor& t) {
  check_tag(t, WktKind::Field, "a phase-space field");
  if (t.meta.size() < 5 || t.dims.size() % 2 != 0 || t.dims.empty())
    throw Error(ErrorCode::FormatVersion, "malformed field tensor");
  const int d = static_cast<int>(t.dims.size()) / 2;
  PhaseField F;
  F.kind = t.meta[1] == 1.0 ? LatticeKind::HalfStep : LatticeKind::Rect;
  F.nx = t.dims[0];
  F.nxi = t.dims[d];
  const int n = F.kind == LatticeKind::HalfStep ? F.nx / 2 : F.nx;
  F.grid = Grid(d, n, t.meta[2]);
  F.x_step = t.meta[3];
  F.freq_step = t.meta[4];
  F.v = t.v;
  return F;
}

Tensor operator_to_tensor(const OperatorKernel& T) {
  Tensor t;
  const int n = T.grid.n;
  t.dims = {n, n};
  t.meta = {static_cast<double>(WktKind::Operator), T.grid.h};
  t.v.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t.v[static_cast<std::size_t>(i) * n + j] = T.matrix(i, j);
  return t;
}

OperatorKernel operator_from_tensor(const Tensor& t) {
  check_tag(t, WktKind::Operator, "an operator");
  if (t.dims.size() != 2 || t.dims[0] != t.dims[1] || t.meta.size() < 2)
    throw Error(ErrorCode::FormatVersion, "malformed operator tensor");
  const int n = t.dims[0];
  CMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = t.v[static_cast<std::size_t>(i) * n + j];
  return OperatorKernel(Grid(1, n, t.meta[1]), m);
}

Signal read_signal_csv(const std::string& path, double h) {
  std::istringstream in(slurp(path));
  std::vector<cplx> v;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto comma = line.find(',');
    double re = to_double(path, trim(line.substr(0, comma)));
    double im = comma == std::string::npos ? 0.0 : to_double(path, trim(line.substr(comma + 1)));
    v.emplace_back(re, im);
  }
  if (v.empty()) throw Error(ErrorCode::FormatVersion, path + " holds no samples");
  const int n = static_cast<int>(v.size());
  Grid g = h > 0 ? Grid(1, n, h) : Grid::selfdual(1, n);
  return Signal(g, std::move(v));
}

void write_signal_csv(const std::string& path, const Signal& f) {
  std::ostringstream out;
  out.precision(17);
  out << std::scientific;
  for (const auto& z : f.v) out << z.real() << ',' << z.imag() << '\n';
  spit(path, out.str());
}

std::vector<double> read_column_csv(const std::string& path) {
  std::istringstream in(slurp(path));
  std::vector<double> v;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    v.push_back(to_double(path, trim(line.substr(0, line.find(',')))));
  }
  return v;
}

std::string encode_pgm(const std::vector<double>& mag, int rows, int cols, bool log_scale) {
  if (static_cast<std::size_t>(rows) * cols != mag.size()) throw Error(ErrorCode::DimMismatch, "heatmap shape");
  double mx = 0;
  for (double m : mag) mx = std::max(mx, m);
  std::string out = "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n65535\n";
  for (double m : mag) {
    double u = 0;
    if (mx > 0 && m > 0) u = log_scale ? std::clamp(std::log10(m / mx) + 8, 0.0, 8.0) / 8 : m / mx;
    auto q = static_cast<std::uint16_t>(std::lround(u * 65535));
    out.push_back(static_cast<char>(q >> 8));  // PGM samples are big-endian
    out.push_back(static_cast<char>(q & 0xff));
  }
  return out;
}

void write_pgm(const std::string& path, const PhaseField& F, bool log_scale) {
  if (F.d() != 1) throw Error(ErrorCode::DimMismatch, "heatmaps are drawn for d = 1");
  // rows are frequency, top = highest
  std::vector<double> mag(F.v.size());
  for (int k = 0; k < F.nxi; ++k)
    for (int s = 0; s < F.nx; ++s) mag[static_cast<std::size_t>(F.nxi - 1 - k) * F.nx + s] = std::abs(F.at(s, k));
  spit(path, encode_pgm(mag, F.nxi, F.nx, log_scale));
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::Usage, "line " + std::to_string(no) + ": expected key=value");
    std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
    if (k.empty()) throw Error(ErrorCode::Usage, "line " + std::to_string(no) + ": empty key");
    if (!kv.emplace(k, v).second) throw Error(ErrorCode::Usage, "duplicate key " + k);
  }
  return kv;
}

Grid RunConfig::grid() const { return h_mode == "explicit" ? Grid(1, n, h) : Grid::selfdual(1, n); }

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig c;
  for (const auto& [k, v] : parse_key_values(text)) {
    if (k == "n") {
      c.n = to_int(k, v);
      require(c.n >= 4 && c.n <= 4096 && c.n % 4 == 0, k, "must be a multiple of 4 in [4, 4096]");
    } else if (k == "h_mode") {
      require(v == "selfdual" || v == "explicit", k, "must be selfdual or explicit");
      c.h_mode = v;
    } else if (k == "h") {
      c.h = to_double(k, v);
      require(c.h > 0 && c.h < 10, k, "must lie in (0, 10)");
    } else if (k == "tol") {
      c.tol = to_double(k, v);
      require(c.tol > 0 && c.tol < 1, k, "must lie in (0, 1)");
    } else if (k == "membership_tail") {
      c.membership_tail = to_double(k, v);
      require(c.membership_tail > 0 && c.membership_tail < 1, k, "must lie in (0, 1)");
    } else if (k == "memory_cap_gib") {
      c.memory_cap_gib = to_double(k, v);
      require(c.memory_cap_gib > 0 && c.memory_cap_gib <= 1024, k, "must lie in (0, 1024]");
    } else if (k == "stride") {
      c.stride = to_int(k, v);
      require(c.stride >= 1 && c.stride <= 64, k, "must lie in [1, 64]");
    } else if (k == "omega") {
      c.omega = to_double(k, v);
      require(c.omega > 0 && std::isfinite(c.omega), k, "must be positive");
    } else if (k == "out_dir") {
      require(!v.empty(), k, "must not be empty");
      c.out_dir = v;
    } else if (k == "threads") {
      c.threads = to_int(k, v);
      require(c.threads >= 0 && c.threads <= 1024, k, "must lie in [0, 1024]");
    } else if (k == "seed") {
      int s = to_int(k, v);
      require(s >= 0, k, "must be non-negative");
      c.seed = static_cast<unsigned>(s);
    } else {
      throw Error(ErrorCode::Usage, "unknown config key " + k);
    }
  }
  if (c.h_mode == "explicit") require(c.h > 0, "h", "is required when h_mode = explicit");
  return c;
}

RunConfig RunConfig::load(const std::string& path) { return parse(slurp(path)); }

Symbol symbol_from_field(const PhaseField& F) {
  if (F.kind != LatticeKind::Rect || F.d() != 1) throw Error(ErrorCode::LatticeMismatch, "expected a d = 1 rect field");
  auto wrap = [](long i, int m) { return static_cast<int>(((i % m) + m) % m); };
  return {[F, wrap](double x, double e) {
    int s = wrap(std::lround(x / F.x_step) + F.nx / 2, F.nx);
    int k = wrap(std::lround(e / F.freq_step) + F.nxi / 2, F.nxi);
    return F.at(s, k);
  }};
}

HamConfig HamConfig::parse(const std::string& text, const std::string& base_dir) {
  namespace fs = std::filesystem;
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? p : (fs::path(base_dir) / p).string(); };
  auto matrix = [&](const std::string& v) {  // a number or a CSV path
    try {
      std::size_t used = 0;
      double d = std::stod(v, &used);
      if (used == v.size()) return RMat::Constant(1, 1, d).eval();
    } catch (const std::exception&) {
    }
    return read_matrix_csv(resolve(v));
  };
  HamConfig c;
  RMat A = RMat::Zero(1, 1), B = RMat::Identity(1, 1), C = -RMat::Identity(1, 1);
  std::string pert = "none", profile;
  for (const auto& [k, v] : parse_key_values(text)) {
    if (k == "A") A = matrix(v);
    else if (k == "B") B = matrix(v);
    else if (k == "C") C = matrix(v);
    else if (k == "pert") pert = v;
    else if (k == "profile") profile = v;
    else if (k == "omega") {
      c.H.omega = to_double(k, v);
      require(c.H.omega > 0, k, "must be positive");
    } else if (k == "n") {
      c.n = to_int(k, v);
      require(c.n >= 4 && c.n <= 4096 && c.n % 4 == 0, k, "must be a multiple of 4 in [4, 4096]");
    } else
      throw Error(ErrorCode::Usage, "unknown ham.cfg key " + k);
  }
  c.H.quad = QuadraticHamiltonian(A, B, C);
  if (pert == "none") {
    c.H.kind = PertKind::None;
  } else if (pert == "multiplier" || pert == "fourier") {
    c.H.kind = pert == "multiplier" ? PertKind::Multiplier : PertKind::FourierMultiplier;
    require(!profile.empty(), "profile", "is required for pert = " + pert);
    c.H.samples = read_column_csv(resolve(profile));
    require(static_cast<int>(c.H.samples.size()) == c.n, "profile", "must hold n samples");
  } else if (pert == "kn") {
    c.H.kind = PertKind::KNSymbol;
    require(!profile.empty(), "profile", "is required for pert = kn");
    c.H.symbol = symbol_from_field(field_from_tensor(read_wkt(resolve(profile))));
  } else {
    throw Error(ErrorCode::Usage, "pert must be none, multiplier, fourier or kn");
  }
  return c;
}

HamConfig HamConfig::load(const std::string& path) {
  return parse(slurp(path), std::filesystem::path(path).parent_path().string().empty()
                                ? "."
                                : std::filesystem::path(path).parent_path().string());
}

}  // namespace wig
