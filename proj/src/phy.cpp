#include "uwbem/phy.hpp"

#include "uwbem/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

namespace uwbem {

void validate(const CodeConfig& code) {
  const int k = code.constraint_length;
  require(k >= 2 && k <= 16, ErrorCategory::kConfig, "constraint length must be in [2, 16]");
  const unsigned top = 1u << (k - 1);
  for (unsigned g : code.generators) {
    require(g < (1u << k), ErrorCategory::kConfig, "generator degree exceeds constraint length - 1");
    require((g & 1u) != 0 && (g & top) != 0, ErrorCategory::kConfig,
            "generator must have nonzero lowest and highest taps");
  }
  require(code.generators[0] != code.generators[1], ErrorCategory::kConfig, "generators must be distinct");
}

Trellis make_trellis(const CodeConfig& code) {
  validate(code);
  Trellis t;
  t.memory = code.constraint_length - 1;
  t.states = 1 << t.memory;
  t.next.resize(static_cast<std::size_t>(t.states));
  t.output.resize(static_cast<std::size_t>(t.states));
  for (int s = 0; s < t.states; ++s) {
    for (int u = 0; u < 2; ++u) {
      const unsigned reg = (static_cast<unsigned>(u) << t.memory) | static_cast<unsigned>(s);
      const int o1 = std::popcount(reg & code.generators[0]) & 1;
      const int o2 = std::popcount(reg & code.generators[1]) & 1;
      t.next[static_cast<std::size_t>(s)][static_cast<std::size_t>(u)] = static_cast<int>(reg >> 1);
      t.output[static_cast<std::size_t>(s)][static_cast<std::size_t>(u)] = (o1 << 1) | o2;
    }
  }
  return t;
}

Bits conv_encode(std::span<const std::uint8_t> bits, const CodeConfig& code) {
  const Trellis t = make_trellis(code);
  Bits out;
  out.reserve(2 * (bits.size() + static_cast<std::size_t>(t.memory)));
  int state = 0;
  auto push = [&](int u) {
    const int o = t.output[static_cast<std::size_t>(state)][static_cast<std::size_t>(u)];
    out.push_back(static_cast<std::uint8_t>((o >> 1) & 1));
    out.push_back(static_cast<std::uint8_t>(o & 1));
    state = t.next[static_cast<std::size_t>(state)][static_cast<std::size_t>(u)];
  };
  for (std::uint8_t b : bits) push(b & 1);
  for (int i = 0; i < t.memory; ++i) push(0);
  return out;
}

std::vector<std::size_t> interleaver_permutation(std::uint64_t seed, std::size_t length) {
  std::vector<std::size_t> perm(length);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  SplitMix64 gen(mix64(seed) ^ static_cast<std::uint64_t>(length));
  for (std::size_t i = length; i > 1; --i) {
    const auto j = static_cast<std::size_t>(gen.below(i));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

Complex qpsk_map(std::uint8_t b0, std::uint8_t b1) {
  const double a = 1.0 / std::sqrt(2.0);
  return {b0 ? -a : a, b1 ? -a : a};
}

void validate(const FrameConfig& cfg) {
  require(cfg.subcarriers >= 1, ErrorCategory::kConfig, "subcarriers must be >= 1");
  require(cfg.payload_bits >= 0, ErrorCategory::kConfig, "payload_bits must be >= 0");
  require(cfg.pilot_symbols >= kSubbands && cfg.pilot_symbols % kSubbands == 0, ErrorCategory::kConfig,
          "pilot_symbols must be a positive multiple of 3 so every subband is covered");
  std::array<int, kSubbands> sorted = cfg.tfc;
  std::sort(sorted.begin(), sorted.end());
  require(sorted == std::array<int, kSubbands>{1, 2, 3}, ErrorCategory::kConfig,
          "tfc must be a permutation of {1, 2, 3}");
}

FrameLayout make_layout(const FrameConfig& cfg, const CodeConfig& code) {
  validate(cfg);
  validate(code);
  FrameLayout lay;
  lay.code = code;
  lay.subcarriers = cfg.subcarriers;
  lay.stacked = kSubbands * cfg.subcarriers;
  lay.payload_bits = cfg.payload_bits;
  lay.coded_bits = 2 * (cfg.payload_bits + code.constraint_length - 1);
  lay.data_symbols = lay.coded_bits / kBitsPerSymbol;
  lay.pilot_triples = cfg.pilot_symbols / kSubbands;

  const Index n = cfg.subcarriers;
  const Index data_ofdm = (lay.data_symbols + n - 1) / n;
  const Index total_ofdm = cfg.pilot_symbols + data_ofdm;
  lay.triples = (total_ofdm + kSubbands - 1) / kSubbands;

  // Every position is known unless a data symbol lands on it.
  lay.known = BoolMat::Constant(lay.stacked, lay.triples, true);
  lay.data_positions.reserve(static_cast<std::size_t>(lay.data_symbols));
  for (Index d = 0; d < lay.data_symbols; ++d) {
    const Index ofdm = cfg.pilot_symbols + d / n;
    const Index band = cfg.tfc[static_cast<std::size_t>(ofdm % kSubbands)] - 1;
    const SymbolPosition p{band * n + d % n, ofdm / kSubbands};
    lay.known(p.k, p.m) = false;
    lay.data_positions.push_back(p);
  }
  lay.permutation = interleaver_permutation(cfg.interleaver_seed, static_cast<std::size_t>(lay.coded_bits));
  return lay;
}

TxFrame build_frame(std::span<const std::uint8_t> payload, const FrameLayout& layout) {
  require(static_cast<Index>(payload.size()) == layout.payload_bits, ErrorCategory::kShape,
          "build_frame: payload has " + std::to_string(payload.size()) + " bits, expected " +
              std::to_string(layout.payload_bits));
  TxFrame tx;
  tx.payload.assign(payload.begin(), payload.end());
  tx.coded = conv_encode(payload, layout.code);
  tx.interleaved = interleave<std::uint8_t>(tx.coded, layout.permutation);

  FrameObservation& obs = tx.obs;
  obs.S = CMat::Constant(layout.stacked, layout.triples, kPilotSymbol);
  obs.Y = CMat::Zero(layout.stacked, layout.triples);
  obs.pilot_mask = layout.known;
  obs.pilot_triples = layout.pilot_triples;
  for (std::size_t d = 0; d < layout.data_positions.size(); ++d) {
    const auto& p = layout.data_positions[d];
    obs.S(p.k, p.m) = qpsk_map(tx.interleaved[2 * d], tx.interleaved[2 * d + 1]);
  }
  return tx;
}

FrameObservation apply_channel(const FrameObservation& frame, const CVec& H, double sigma2, Rng& rng) {
  require(H.size() == frame.S.rows(), ErrorCategory::kShape, "apply_channel: H length mismatch");
  require(sigma2 > 0.0, ErrorCategory::kDomain, "apply_channel: sigma2 must be positive");
  FrameObservation out = frame;
  out.sigma2 = sigma2;
  for (Index m = 0; m < frame.S.cols(); ++m) {
    for (Index k = 0; k < frame.S.rows(); ++k) {
      out.Y(k, m) = frame.S(k, m) * H(k) + rng.complex_normal(sigma2);
    }
  }
  return out;
}

double ebn0_to_sigma2(double ebn0_db, Index stacked, double channel_energy, double code_rate, int bits_per_symbol) {
  const double ebn0 = std::pow(10.0, ebn0_db / 10.0);
  const double symbol_energy = channel_energy / static_cast<double>(stacked);
  return symbol_energy / (bits_per_symbol * code_rate * ebn0);
}

Bits random_bits(Index count, Rng& rng) {
  Bits b(static_cast<std::size_t>(count));
  for (auto& x : b) x = rng.bit();
  return b;
}

}  // namespace uwbem
