#pragma once

// Soft demapping, BCJR decoding and the symbol posteriors fed back to the
// channel estimator.

#include "uwbem/phy.hpp"
#include "uwbem/types.hpp"

#include <array>
#include <span>
#include <vector>

namespace uwbem {

// LLR convention: log P(c = 1) - log P(c = 0).
std::array<double, 2> soft_demap(Complex y, Complex h, double noise_var);

struct BitPosteriors {
  std::vector<double> p1;       // coded bits, encoder order
  std::vector<double> info_p1;  // information bits, tail excluded
};

// Exact a posteriori probabilities (not extrinsic) on the zero-terminated
// trellis, computed with log-sum-exp forward/backward recursions.
BitPosteriors bcjr_decode(std::span<const double> coded_llrs, const Trellis& trellis);
BitPosteriors bcjr_decode(std::span<const double> coded_llrs, const CodeConfig& code);

// Probabilities of the four QPSK points indexed by (b0 << 1) | b1 given the
// per-bit probabilities of a one.
std::array<double, 4> symbol_distribution(double p_b0, double p_b1);

struct SymbolPosteriors {
  CMat mean;  // M x M_sym posterior mean symbol; known positions hold the known symbol
};

// Posterior means from interleaved-order coded-bit probabilities.
SymbolPosteriors symbol_posteriors(std::span<const double> interleaved_p1, const FrameLayout& layout,
                                   const FrameObservation& frame);
SymbolPosteriors symbol_posteriors(const BitPosteriors& bits, const FrameLayout& layout,
                                   const FrameObservation& frame);

// Data positions at zero, known positions at their symbol: the state before
// any decoder output is available.
SymbolPosteriors uninformed_posteriors(const FrameLayout& layout, const FrameObservation& frame);

Bits hard_decision(std::span<const double> p1);

struct DecodeResult {
  BitPosteriors bits;
  SymbolPosteriors symbols;
  Bits decoded;
};

// Demap every data symbol with the stacked channel estimate, decode, and map
// the coded-bit posteriors back to per-position symbol means.
DecodeResult decode_frame(const FrameObservation& frame, const CVec& H_hat, const FrameLayout& layout,
                          const Trellis& trellis, double noise_var);

}  // namespace uwbem
