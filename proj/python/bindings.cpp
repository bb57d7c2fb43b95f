#include <optional>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wig/checks.hpp"
#include "wig/io.hpp"
#include "wig/metaplectic.hpp"
#include "wig/modnorm.hpp"
#include "wig/transforms.hpp"

namespace py = pybind11;
using namespace wig;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

Signal to_signal(const CArray& a, double h) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-d array");
  const int n = static_cast<int>(a.shape(0));
  Grid g = h > 0 ? Grid(1, n, h) : Grid::selfdual(1, n);
  return Signal(g, std::vector<cplx>(a.data(), a.data() + n));
}

CArray from_signal(const Signal& f) {
  CArray out(static_cast<py::ssize_t>(f.size()));
  std::copy(f.v.begin(), f.v.end(), out.mutable_data());
  return out;
}

CArray from_field(const PhaseField& F) {
  CArray out({static_cast<py::ssize_t>(F.nx), static_cast<py::ssize_t>(F.nxi)});
  std::copy(F.v.begin(), F.v.end(), out.mutable_data());
  return out;
}

py::dict field_dict(const PhaseField& F) {
  py::dict d;
  d["values"] = from_field(F);
  d["x_step"] = F.x_step;
  d["freq_step"] = F.freq_step;
  d["halfstep"] = F.kind == LatticeKind::HalfStep;
  return d;
}

OperatorKernel to_operator(const CMat& m, double h) {
  if (m.rows() != m.cols()) throw py::value_error("operator matrix must be square");
  const int n = static_cast<int>(m.rows());
  return OperatorKernel(h > 0 ? Grid(1, n, h) : Grid::selfdual(1, n), m);
}

QuadraticPhase phase(double P, double Q, double R) {
  return {RMat::Constant(1, 1, P), RMat::Constant(1, 1, Q), RMat::Constant(1, 1, R)};
}

py::dict membership_dict(const MembershipReport& r) {
  py::dict d;
  d["tail"] = r.tail;
  d["symbol_norm"] = r.symbol_norm;
  d["exponent"] = r.exponent;
  d["snapped"] = r.snapped;
  d["pass"] = r.pass;
  d["radii"] = r.decay.radii;
  d["mass"] = r.decay.mass;
  return d;
}

}  // namespace

PYBIND11_MODULE(_wig, m) {
  m.doc() = "Discrete Wigner kernels, metaplectic operators and FIO diagnostics (d = 1 grids).";

  py::register_exception<Error>(m, "WigError", PyExc_ValueError);

  m.def("selfdual_step", [](int n) { return Grid::selfdual(1, n).h; }, py::arg("n"));
  m.def("gaussian", [](int n) { return from_signal(gaussian(Grid::selfdual(1, n))); }, py::arg("n"));
  m.def("hermite", [](int n, int k) { return from_signal(hermite(Grid::selfdual(1, n), k)); }, py::arg("n"), py::arg("k"));
  m.def("dft", [](const CArray& f, double h) { return from_signal(dft(to_signal(f, h))); }, py::arg("f"), py::arg("h") = 0.0);
  m.def("idft", [](const CArray& f, double h) { return from_signal(idft(to_signal(f, h))); }, py::arg("f"), py::arg("h") = 0.0);

  m.def(
      "wigner",
      [](const CArray& f, std::optional<CArray> g, double h) {
        Signal a = to_signal(f, h);
        return field_dict(g ? wigner(a, to_signal(*g, h)) : wigner(a));
      },
      py::arg("f"), py::arg("g") = py::none(), py::arg("h") = 0.0,
      "Cross-Wigner distribution on the half-step lattice (2n x n/2).");
  m.def(
      "stft",
      [](const CArray& f, std::optional<CArray> w, double h) {
        Signal a = to_signal(f, h);
        return field_dict(stft(a, w ? to_signal(*w, h) : default_window(a.grid)));
      },
      py::arg("f"), py::arg("window") = py::none(), py::arg("h") = 0.0);

  m.def(
      "apply_word",
      [](const std::string& text, const CArray& f, double h) {
        return from_signal(apply(parse_word(text, 1), to_signal(f, h)));
      },
      py::arg("word"), py::arg("f"), py::arg("h") = 0.0, "Apply a word given in the FT/FT2/DIL/CHM/CHC text format.");
  m.def("word_projection", [](const std::string& text) { return parse_word(text, 1).projection().matrix(); });
  m.def("is_symplectic", [](const RMat& M, double tol) { return is_symplectic(M, tol); }, py::arg("M"),
        py::arg("tol") = 1e-10);

  m.def(
      "wigner_kernel", [](const CMat& M, double h) { return wigner_kernel(to_operator(M, h)).k; }, py::arg("matrix"),
      py::arg("h") = 0.0, "Kernel of the operator f -> h * matrix @ f, as an (n^2 x n^2) matrix.");
  m.def(
      "intertwining_defect",
      [](const CMat& M, const CArray& f, const CArray& g, double h) {
        return intertwining_defect(to_operator(M, h), to_signal(f, h), to_signal(g, h));
      },
      py::arg("matrix"), py::arg("f"), py::arg("g"), py::arg("h") = 0.0);
  m.def(
      "fio_membership",
      [](const CMat& M, const RMat& S, double h) { return membership_dict(fio_membership(to_operator(M, h), SymplecticMat(S))); },
      py::arg("matrix"), py::arg("S"), py::arg("h") = 0.0);
  m.def(
      "type1_fio",
      [](const CArray& sigma, double P, double Q, double R, double h) {
        if (sigma.ndim() != 2 || sigma.shape(0) != sigma.shape(1)) throw py::value_error("symbol must be n x n");
        const int n = static_cast<int>(sigma.shape(0));
        Grid g = h > 0 ? Grid(1, n, h) : Grid::selfdual(1, n);
        PhaseField s = PhaseField::rect(g, g.dual_step());
        std::copy(sigma.data(), sigma.data() + s.v.size(), s.v.begin());
        return type1_fio(s, phase(P, Q, R)).matrix;
      },
      py::arg("sigma"), py::arg("P"), py::arg("Q"), py::arg("R"), py::arg("h") = 0.0,
      "Operator matrix of a type-I FIO from symbol samples on the (x, dual eta) lattice.");

  m.def(
      "propagate",
      [](const CArray& u0, double t, int steps, double A, double B, double C, std::optional<std::vector<double>> potential) {
        PerturbedHamiltonian H;
        H.quad = QuadraticHamiltonian(RMat::Constant(1, 1, A), RMat::Constant(1, 1, B), RMat::Constant(1, 1, C));
        if (potential) {
          H.kind = PertKind::Multiplier;
          H.samples = *potential;
        }
        return from_signal(split_step(H, t, steps, to_signal(u0, 0.0)));
      },
      py::arg("u0"), py::arg("t"), py::arg("steps"), py::arg("A") = 0.0, py::arg("B") = 1.0, py::arg("C") = -1.0,
      py::arg("potential") = py::none(), "Split-step propagation; the default Hamiltonian is the harmonic oscillator.");

  m.def(
      "write_wkt",
      [](const std::string& path, const CArray& a, const std::vector<double>& meta) {
        Tensor t;
        for (py::ssize_t i = 0; i < a.ndim(); ++i) t.dims.push_back(static_cast<int>(a.shape(i)));
        t.meta = meta;
        t.v.assign(a.data(), a.data() + a.size());
        write_wkt(path, t);
      },
      py::arg("path"), py::arg("array"), py::arg("meta") = std::vector<double>{});
  m.def("read_wkt", [](const std::string& path) {
    Tensor t = read_wkt(path);
    std::vector<py::ssize_t> shape(t.dims.begin(), t.dims.end());
    CArray a(shape);
    std::copy(t.v.begin(), t.v.end(), a.mutable_data());
    return py::make_tuple(a, t.meta);
  });

  m.def("suite_names", &suite_names);
  m.def(
      "run_suite",
      [](const std::string& name) {
        SuiteResult r = run_suite(name);
        py::list rows;
        for (const auto& c : r.rows) {
          py::dict d;
          d["name"] = c.name;
          d["value"] = c.value;
          d["bound"] = c.threshold;
          d["pass"] = c.pass;
          d["note"] = c.note;
          rows.append(d);
        }
        return rows;
      },
      py::arg("name"));
}
