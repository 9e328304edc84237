#pragma once

// Ground-truth channel generation and CIR file I/O.

#include "uwbem/rng.hpp"
#include "uwbem/transforms.hpp"
#include "uwbem/types.hpp"

#include <filesystem>
#include <string_view>

namespace uwbem {

enum class ChannelModel { kSparseWavelet, kExponentialPdp, kFile };

std::string_view model_name(ChannelModel m);
ChannelModel parse_model(std::string_view name);

struct ChannelRealization {
  CVec g_true;  // wavelet coefficients, length L
  CVec h_time;  // CIR taps, length L
  CVec H_freq;  // stacked frequency response, length M
  ChannelModel model = ChannelModel::kSparseWavelet;
};

// Builds the full realization from unit-energy wavelet coefficients.
ChannelRealization from_wavelet(CVec g, const Operator& op, ChannelModel model);
// Builds the full realization from time taps (normalized here).
ChannelRealization from_taps(CVec h, const Operator& op, ChannelModel model);

// k_nonzero uniformly placed CN(0,1) coefficients, normalized to unit energy.
ChannelRealization gen_sparse_wavelet_channel(const Operator& op, Index k_nonzero, Rng& rng);

struct ExponentialPdp {
  double decay = 8.0;       // power decays as exp(-l / decay), l in samples
  double los_factor = 4.0;  // amplitude multiplier on the first tap
};

ChannelRealization gen_exponential_channel(const Operator& op, const ExponentialPdp& pdp, Rng& rng);

// Plain text: one "re im" pair per line, '#' starts a comment.
ChannelRealization load_cir_file(const std::filesystem::path& path, const Operator& op);
CVec parse_cir_text(std::string_view text);
void write_cir_file(const std::filesystem::path& path, const CVec& h_time);

}  // namespace uwbem
