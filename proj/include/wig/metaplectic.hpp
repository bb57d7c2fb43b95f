#pragma once

#include <string>
#include <vector>

#include "wig/signal.hpp"
#include "wig/symplectic.hpp"

namespace wig {

enum class TokenKind { FT, FT2, Dilate, ChirpMul, ChirpConv, FreeBlock };

struct Token {
  TokenKind kind;
  RMat M;  // L, C, or S depending on kind; empty for FT / FT2

  static Token ft() { return {TokenKind::FT, RMat()}; }
  static Token ft2() { return {TokenKind::FT2, RMat()}; }
  static Token dilate(const RMat& L) { return {TokenKind::Dilate, L}; }
  static Token chirp_mul(const RMat& C) { return {TokenKind::ChirpMul, C}; }
  static Token chirp_conv(const RMat& C) { return {TokenKind::ChirpConv, C}; }
  static Token free_block(const RMat& S) { return {TokenKind::FreeBlock, S}; }
};

// Symplectic projection of a single token:
//   FT -> J, FT2 -> A_FT2, Dilate(L) -> D_L, ChirpMul(C) -> V_C, ChirpConv(C) -> V_C^T.
SymplecticMat token_projection(const Token& t, int d);

// Ordered token list. The projection is the product of the token projections
// in list order; application runs from the last token to the first.
struct MetaplecticWord {
  int d = 1;
  std::vector<Token> tokens;
  SymplecticMat target;

  MetaplecticWord();
  explicit MetaplecticWord(int d);
  MetaplecticWord(int d, std::vector<Token> tokens);  // target = product of projections

  SymplecticMat projection() const;
  // Throws NotSymplectic if the token product differs from target beyond 1e-9.
  void validate() const;
  MetaplecticWord operator*(const MetaplecticWord& o) const;
  MetaplecticWord inverse() const;
};

Signal apply(const MetaplecticWord& word, const Signal& f);
Signal apply_token(const Token& t, const Signal& f);

// |det L|^{1/2} f(L t). Exact index mapping when L is an integer matrix
// (periodic when |det L| = 1, zero outside the box otherwise), band-limited
// trigonometric interpolation otherwise (zero outside the box).
Signal dilate(const Signal& f, const RMat& L);
Signal chirp_mul(const Signal& f, const RMat& C);
Signal chirp_conv(const Signal& f, const RMat& C);

struct FactorOptions {
  double singular_tol = 1e-10;  // |det A| below tol * max(1, |S|_max)^d counts as singular
  double snap_tol = 1e-12;      // tokens this close to identity / zero are dropped
};
// Word with projection S. Free case (det A != 0):
//   S = V_{C A^-1} D_{A^-1} V_{A^-1 B}^T -> [ChirpMul(CA^-1), Dilate(A^-1), ChirpConv(A^-1 B)]
// otherwise the first tau in 0..d with det(A + tau B) != 0 gives
//   free(S V_tau) followed by ChirpMul(-tau I).
MetaplecticWord factor_symplectic(const SymplecticMat& S, const FactorOptions& opt = {});

// Hermite battery used by covariance checks (orders <= 4 per axis).
std::vector<Signal> hermite_battery(const Grid& g);

// max over the battery of min_{|c|=1} |S(pi(z) f) - c pi(Sz) S f| / |f|.
double covariance_defect(const MetaplecticWord& word, const Grid& g, const std::vector<double>& z);

// Optimal unimodular c and the residual |u - c v| / |v| for u ~ c v.
struct PhaseFit {
  cplx c;
  double residual;
};
PhaseFit fit_phase(const Signal& u, const Signal& v);

// word1 on the first variable, word2 on the second (d = 1 words, d = 2 signal).
Signal apply_tensor(const MetaplecticWord& w1, const MetaplecticWord& w2, const Signal& F);

// Line-based text format: FT, FT2, DIL <m>, CHM <m>, CHC <m>, where <m> is a
// CSV matrix with rows separated by ';'. FreeBlock tokens are written expanded.
std::string format_word(const MetaplecticWord& w);
MetaplecticWord parse_word(const std::string& text, int d_hint = 0);

}  // namespace wig
