#include "uwbem/channels.hpp"

#include "uwbem/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace uwbem {

std::string_view model_name(ChannelModel m) {
  switch (m) {
    case ChannelModel::kSparseWavelet: return "sparse-wavelet";
    case ChannelModel::kExponentialPdp: return "exponential-pdp";
    case ChannelModel::kFile: return "file";
  }
  return "unknown";
}

ChannelModel parse_model(std::string_view name) {
  if (name == "sparse-wavelet") return ChannelModel::kSparseWavelet;
  if (name == "exponential-pdp") return ChannelModel::kExponentialPdp;
  if (name == "file") return ChannelModel::kFile;
  fail(ErrorCategory::kConfig, "unknown channel model '" + std::string(name) + "'");
}

ChannelRealization from_wavelet(CVec g, const Operator& op, ChannelModel model) {
  require(g.size() == op.full_cols(), ErrorCategory::kShape, "channel: coefficient length mismatch");
  const double norm = g.norm();
  require(norm > 0.0, ErrorCategory::kDomain, "channel: zero-energy realization");
  g /= norm;
  ChannelRealization c;
  c.h_time = op.wavelet().transpose().cast<Complex>() * g;
  c.H_freq = op.full_matrix() * g;
  c.g_true = std::move(g);
  c.model = model;
  return c;
}

ChannelRealization from_taps(CVec h, const Operator& op, ChannelModel model) {
  require(h.size() == op.full_cols(), ErrorCategory::kShape, "channel: tap count mismatch");
  const double norm = h.norm();
  require(norm > 0.0, ErrorCategory::kDomain, "channel: zero-energy realization");
  h /= norm;
  ChannelRealization c;
  c.g_true = op.wavelet().cast<Complex>() * h;
  c.H_freq = op.fourier() * h;
  c.h_time = std::move(h);
  c.model = model;
  return c;
}

ChannelRealization gen_sparse_wavelet_channel(const Operator& op, Index k_nonzero, Rng& rng) {
  const Index L = op.full_cols();
  require(k_nonzero >= 1 && k_nonzero <= L, ErrorCategory::kDomain,
          "k_nonzero must be in [1, " + std::to_string(L) + "]");
  // Partial Fisher-Yates: the first k entries form a uniform k-subset.
  std::vector<Index> idx(static_cast<std::size_t>(L));
  for (Index j = 0; j < L; ++j) idx[static_cast<std::size_t>(j)] = j;
  CVec g = CVec::Zero(L);
  for (Index i = 0; i < k_nonzero; ++i) {
    const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(L - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    g(idx[static_cast<std::size_t>(i)]) = rng.complex_normal(1.0);
  }
  return from_wavelet(std::move(g), op, ChannelModel::kSparseWavelet);
}

ChannelRealization gen_exponential_channel(const Operator& op, const ExponentialPdp& pdp, Rng& rng) {
  require(pdp.decay > 0.0, ErrorCategory::kDomain, "exponential channel: decay must be positive");
  require(pdp.los_factor > 0.0, ErrorCategory::kDomain, "exponential channel: los_factor must be positive");
  const Index L = op.full_cols();
  CVec h(L);
  for (Index l = 0; l < L; ++l) {
    h(l) = rng.complex_normal(1.0) * std::exp(-static_cast<double>(l) / (2.0 * pdp.decay));
  }
  h(0) *= pdp.los_factor;
  return from_taps(std::move(h), op, ChannelModel::kExponentialPdp);
}

CVec parse_cir_text(std::string_view text) {
  std::vector<Complex> taps;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string re_s, im_s, extra;
    if (!(fields >> re_s)) continue;
    if (!(fields >> im_s) || (fields >> extra)) {
      fail(ErrorCategory::kParse, "cir line " + std::to_string(line_no) + ": expected two fields 're im'");
    }
    auto parse = [&](const std::string& s) {
      try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
      } catch (const std::exception&) {
        fail(ErrorCategory::kParse, "cir line " + std::to_string(line_no) + ": bad number '" + s + "'");
      }
    };
    taps.emplace_back(parse(re_s), parse(im_s));
  }
  require(!taps.empty(), ErrorCategory::kParse, "cir file contains no taps");
  CVec h(static_cast<Index>(taps.size()));
  for (std::size_t i = 0; i < taps.size(); ++i) h(static_cast<Index>(i)) = taps[i];
  return h;
}

ChannelRealization load_cir_file(const std::filesystem::path& path, const Operator& op) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCategory::kIo, "cannot open cir file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const CVec taps = parse_cir_text(buf.str());
  const Index L = op.full_cols();
  require(taps.size() <= L, ErrorCategory::kDomain,
          "cir file has " + std::to_string(taps.size()) + " taps, at most " + std::to_string(L) + " allowed");
  require(taps.squaredNorm() > 0.0, ErrorCategory::kDomain, "cir file has zero energy");
  CVec h = CVec::Zero(L);
  h.head(taps.size()) = taps;
  return from_taps(std::move(h), op, ChannelModel::kFile);
}

void write_cir_file(const std::filesystem::path& path, const CVec& h_time) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCategory::kIo, "cannot write cir file " + path.string());
  out << "# re im, one tap per line\n" << std::setprecision(17);
  for (Index l = 0; l < h_time.size(); ++l) out << h_time(l).real() << ' ' << h_time(l).imag() << '\n';
  require(static_cast<bool>(out), ErrorCategory::kIo, "write failed for " + path.string());
}

}  // namespace uwbem
