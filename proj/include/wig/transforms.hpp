#pragma once

#include "wig/signal.hpp"

namespace wig {

struct MetaplecticWord;

// Centered unitary DFT: fhat(xi_k) = h^d sum_j f(x_j) exp(-2 pi i xi_k . x_j), xi_k on
// the dual lattice. With the self-dual step the output lives on the same grid.
Signal dft(const Signal& f);
Signal idft(const Signal& f);
// DFT on the second variable of a function on R^2 (d = 2 signal).
Signal partial_ft2(const Signal& F);
Signal partial_ift2(const Signal& F);

// V_g f(x, xi) = h^d sum_t f(t) conj(g(t - x)) exp(-2 pi i xi . t), circular in t.
PhaseField stft(const Signal& f, const Signal& g);

// Pairing of index pairs with the half-step Wigner lattice. A pair (a, b) of
// sample indices is assigned the midpoint s = a + b' (mod 2n) and the lag
// r = a - b' in [-n/2, n/2), where b' is the periodic image of b closest to a.
// For fixed s the lags share the parity of s; they are enumerated by
// mm in [0, n/2) via r = 2 (mm - n/4) + (s & 1).
namespace halfstep {
inline void pair(int n, int s, int mm, int& a, int& b) {
  int r = 2 * (mm - n / 4) + (s & 1);
  a = (((s + r) / 2) % n + n) % n;
  b = (((s - r) / 2) % n + n) % n;
}
// exp(-2 pi i sigma m / n) with m = mm - n/4
cplx pre(int n, int sigma, int mm);
// 2h exp(-2 pi i sigma ((k - n/4) / n + 1 / (2n)))
cplx post(int n, int sigma, int k, double h);
}  // namespace halfstep

// Cross-Wigner distribution on the half-step lattice (d = 1 or 2):
//   W(f,g)(x_s, xi) = 2h sum_r f[a] conj(g[b]) exp(-2 pi i xi r h)
// over the pairs (a, b) with midpoint s. The map (f, g) -> W(f, g) is an
// isometry onto the lattice (cell measure (h^2/2)^d), so Moyal's identity and
// the marginals hold to rounding error.
PhaseField wigner(const Signal& f, const Signal& g);
PhaseField wigner(const Signal& f);
// Wigner transform of an arbitrary pair array rho[a][b] (d = 1), so that
// wigner(f, g) = wigner_pairs(f conj(g)^T).
PhaseField wigner_pairs(const CMat& rho, const Grid& g);
// Exact inverse of wigner_pairs.
CMat pairs_from_wigner(const PhaseField& W);

// Phase-space inner product sum conj(W1) W2 * cell.
cplx moyal_pairing(const PhaseField& W1, const PhaseField& W2);

// Rihaczek distribution f(x) conj(ghat(xi)) exp(-2 pi i xi . x) on the rectangular lattice.
PhaseField rihaczek(const Signal& f, const Signal& g);

// F(x, xi) -> F(x, -xi), periodic on the xi axes.
PhaseField flip2(const PhaseField& F);
// Index of -xi on the xi axis for a row with x index s.
int flip_index(const PhaseField& F, int s, int k);

// T_p F(x, xi, y, eta) = F(x, y, xi, -eta) for a d = 2 phase field with axes (x1, x2, xi1, xi2).
// Returns a rank-4 tensor with axes (x, xi, y, eta).
Tensor perm_Tp(const PhaseField& F);
// Inverse map back to a d = 2 phase field on the lattice of `like`.
PhaseField perm_Tp_inverse(const Tensor& T, const PhaseField& like);

// Metaplectic Wigner distribution A(f (x) conj g) for a word acting on d = 2
// signals; the second variable is returned as frequency on the dual lattice.
PhaseField metaplectic_wigner(const MetaplecticWord& word, const Signal& f, const Signal& g);

}  // namespace wig
