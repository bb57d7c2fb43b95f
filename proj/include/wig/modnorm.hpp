#pragma once

#include <utility>
#include <vector>

#include "wig/signal.hpp"
#include "wig/symplectic.hpp"

namespace wig {

struct WignerKernel;

enum class WeightKind { One, VS, OneTensorVS };

// v_s(z) = (1 + |z|^2)^{s/2}. OneTensorVS applies v_s to the frequency block only.
struct Weight {
  WeightKind kind = WeightKind::One;
  double s = 0.0;

  static Weight one() { return {}; }
  static Weight vs(double s);
  static Weight one_tensor_vs(double s);
  // z = (x block, xi block), each of length dim / 2
  double operator()(const double* z, int dim) const;
};

// Mixed L^{p,q}_m norm: l^p over the x axes (cell x_step^d), weight applied
// pointwise, then l^q over the xi axes (cell freq_step^d). Infinite exponents
// mean sup; exponents below 1 give the quasi-norm by the same formula.
double mixed_norm(const PhaseField& F, double p, double q, const Weight& m);

// L2-normalized Gaussian window on g.
Signal default_window(const Grid& g);
double mod_norm(const Signal& f, double p, double q, const Weight& m, const Signal& window);
double mod_norm(const Signal& f, double p, double q, const Weight& m);

// Weighted L2 norm of the STFT of a field on a centered rectangular lattice
// with per-axis steps, window the L2-normalized product Gaussian. Uses the
// exact marginal identities of the discrete STFT, so no full STFT is formed.
// Supports m = 1 and v_s / 1 (x) v_s with s in {0, 1}.
double l2_mod_norm(const cplx* data, const std::vector<int>& dims, const std::vector<double>& steps, const Weight& m);

// (|f (x) conj f|_{M^{p,q}_m}, |f|^2_{M^{p,q}_m}) with Gaussian windows.
std::pair<double, double> tensor_norm_check(const Signal& f, double p, double q, const Weight& m = Weight::one());

// (Shubin Q_s norm, Sobolev H^s norm) of a d = 1 or d = 2 signal.
std::pair<double, double> shubin_sobolev(const Signal& f, double s);

// Fraction of |k|^2 on pairs (z, w) with |z - S w| > R. Distances are measured
// with x in units of h and xi in units of freq_step, using the nearest periodic
// image on the lattice torus.
struct DecayCurve {
  std::vector<double> radii;
  std::vector<double> mass;
};
DecayCurve concentration_profile(const WignerKernel& k, const SymplecticMat& S, const std::vector<double>& radii);
std::string decay_csv(const DecayCurve& c);

}  // namespace wig
