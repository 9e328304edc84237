#pragma once

// Frequency-domain equivalent of the MB-OFDM transmit chain: convolutional
// coding, random bit interleaving, Gray QPSK, pilot insertion, three-subband
// stacking under a time-frequency code, channel and AWGN.

#include "uwbem/error.hpp"
#include "uwbem/rng.hpp"
#include "uwbem/types.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace uwbem {

inline constexpr int kBitsPerSymbol = 2;
inline constexpr int kSubbands = 3;

struct CodeConfig {
  int constraint_length = 3;
  std::array<unsigned, 2> generators = {07, 05};  // octal taps, MSB = current input
};

void validate(const CodeConfig& code);

// State-transition tables of the feedforward encoder. State holds the last
// K-1 inputs, most recent in the high bit.
struct Trellis {
  int states = 0;
  int memory = 0;
  std::vector<std::array<int, 2>> next;    // next[s][u]
  std::vector<std::array<int, 2>> output;  // output[s][u], bit 1 = first generator
};

Trellis make_trellis(const CodeConfig& code);

// Rate-1/2 encoding with K-1 zero tail bits appended; output length is
// 2 * (bits.size() + K - 1), pairs ordered (first generator, second).
Bits conv_encode(std::span<const std::uint8_t> bits, const CodeConfig& code);

std::vector<std::size_t> interleaver_permutation(std::uint64_t seed, std::size_t length);

// out[i] = in[perm[i]].
template <typename T>
std::vector<T> interleave(std::span<const T> in, std::span<const std::size_t> perm);

// Inverse of interleave: out[perm[i]] = in[i].
template <typename T>
std::vector<T> deinterleave(std::span<const T> in, std::span<const std::size_t> perm);

// Gray QPSK: bit 0 selects the sign of the real part, bit 1 the imaginary
// part; (0,0) -> (1+i)/sqrt(2).
Complex qpsk_map(std::uint8_t b0, std::uint8_t b1);

inline const Complex kPilotSymbol = qpsk_map(0, 0);

struct FrameConfig {
  Index subcarriers = 128;  // N per subband
  Index payload_bits = 8192;
  Index pilot_symbols = 3;
  std::array<int, kSubbands> tfc = {1, 3, 2};  // 1-based subband per OFDM symbol, repeating
  std::uint64_t interleaver_seed = 0x5eed;
};

struct SymbolPosition {
  Index k;  // stacked subcarrier 0..M-1
  Index m;  // symbol triple
};

// Everything the receiver knows about where symbols live in a frame.
struct FrameLayout {
  Index subcarriers = 0;
  Index stacked = 0;  // M = 3N
  Index payload_bits = 0;
  Index coded_bits = 0;
  Index data_symbols = 0;
  Index pilot_triples = 0;
  Index triples = 0;  // M_sym, pilots included
  std::vector<SymbolPosition> data_positions;
  BoolMat known;  // pilot or fill position, M x M_sym
  std::vector<std::size_t> permutation;
  CodeConfig code;
};

void validate(const FrameConfig& cfg);
FrameLayout make_layout(const FrameConfig& cfg, const CodeConfig& code);

struct FrameObservation {
  CMat S;  // M x M_sym transmitted symbols
  CMat Y;  // M x M_sym received values
  double sigma2 = 0.0;
  BoolMat pilot_mask;  // positions carrying the known pilot symbol
  Index pilot_triples = 0;
};

struct TxFrame {
  FrameObservation obs;
  Bits payload;
  Bits coded;
  Bits interleaved;
};

// Symbols assigned per TFC; the leading pilot triples and any trailing fill
// carry kPilotSymbol. Y is left zero.
TxFrame build_frame(std::span<const std::uint8_t> payload, const FrameLayout& layout);

// Y = S .* H + Z per triple, Z ~ CN(0, sigma2) i.i.d.
FrameObservation apply_channel(const FrameObservation& frame, const CVec& H, double sigma2, Rng& rng);

// Noise variance for a given information-bit SNR, taking the average
// received symbol energy as ||H||^2 / M.
double ebn0_to_sigma2(double ebn0_db, Index stacked, double channel_energy = 1.0,
                      double code_rate = 0.5, int bits_per_symbol = kBitsPerSymbol);

Bits random_bits(Index count, Rng& rng);

// ---------------------------------------------------------------------------

template <typename T>
std::vector<T> interleave(std::span<const T> in, std::span<const std::size_t> perm) {
  require(in.size() == perm.size(), ErrorCategory::kShape, "interleave: length mismatch");
  std::vector<T> out(in.size());
  for (std::size_t i = 0; i < perm.size(); ++i) out[i] = in[perm[i]];
  return out;
}

template <typename T>
std::vector<T> deinterleave(std::span<const T> in, std::span<const std::size_t> perm) {
  require(in.size() == perm.size(), ErrorCategory::kShape, "deinterleave: length mismatch");
  std::vector<T> out(in.size());
  for (std::size_t i = 0; i < perm.size(); ++i) out[perm[i]] = in[i];
  return out;
}

}  // namespace uwbem
