#include "uwbem/siso.hpp"

#include "uwbem/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace uwbem {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double max_star(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

// P(bit = 1) from log-domain numerator/denominator sums.
inline double prob_one(double log_one, double log_zero) {
  if (log_one == kNegInf) return 0.0;
  if (log_zero == kNegInf) return 1.0;
  return 1.0 / (1.0 + std::exp(log_zero - log_one));
}

}  // namespace

std::array<double, 2> soft_demap(Complex y, Complex h, double noise_var) {
  require(noise_var > 0.0, ErrorCategory::kDomain, "soft_demap: noise variance must be positive");
  // Gray QPSK separates into I and Q decisions on z = y conj(h).
  const Complex z = y * std::conj(h);
  const double scale = 2.0 * std::sqrt(2.0) / noise_var;
  return {-scale * z.real(), -scale * z.imag()};
}

BitPosteriors bcjr_decode(std::span<const double> coded_llrs, const CodeConfig& code) {
  return bcjr_decode(coded_llrs, make_trellis(code));
}

BitPosteriors bcjr_decode(std::span<const double> llr, const Trellis& trellis) {
  require(llr.size() % 2 == 0, ErrorCategory::kShape, "bcjr_decode: LLR count must be even");
  const std::size_t steps = llr.size() / 2;
  const auto memory = static_cast<std::size_t>(trellis.memory);
  require(steps >= memory, ErrorCategory::kShape, "bcjr_decode: fewer steps than tail length");
  const std::size_t info = steps - memory;
  const auto S = static_cast<std::size_t>(trellis.states);

  auto gamma = [&](std::size_t t, int out) {
    double g = 0.0;
    if (out & 2) g += llr[2 * t];
    if (out & 1) g += llr[2 * t + 1];
    return g;
  };
  auto allowed = [&](std::size_t t, int u) { return u == 0 || t < info; };

  std::vector<double> alpha((steps + 1) * S, kNegInf);
  std::vector<double> beta((steps + 1) * S, kNegInf);
  alpha[0] = 0.0;
  for (std::size_t t = 0; t < steps; ++t) {
    const double* a = &alpha[t * S];
    double* an = &alpha[(t + 1) * S];
    for (std::size_t s = 0; s < S; ++s) {
      if (a[s] == kNegInf) continue;
      for (int u = 0; u < 2; ++u) {
        if (!allowed(t, u)) continue;
        const auto ns = static_cast<std::size_t>(trellis.next[s][static_cast<std::size_t>(u)]);
        an[ns] = max_star(an[ns], a[s] + gamma(t, trellis.output[s][static_cast<std::size_t>(u)]));
      }
    }
    // Renormalize to keep magnitudes bounded over long frames.
    const double top = *std::max_element(an, an + S);
    if (top != kNegInf) {
      for (std::size_t s = 0; s < S; ++s) an[s] -= top;
    }
  }
  beta[steps * S + 0] = 0.0;
  for (std::size_t t = steps; t-- > 0;) {
    const double* bn = &beta[(t + 1) * S];
    double* b = &beta[t * S];
    for (std::size_t s = 0; s < S; ++s) {
      double acc = kNegInf;
      for (int u = 0; u < 2; ++u) {
        if (!allowed(t, u)) continue;
        const auto ns = static_cast<std::size_t>(trellis.next[s][static_cast<std::size_t>(u)]);
        if (bn[ns] == kNegInf) continue;
        acc = max_star(acc, bn[ns] + gamma(t, trellis.output[s][static_cast<std::size_t>(u)]));
      }
      b[s] = acc;
    }
    const double top = *std::max_element(b, b + S);
    if (top != kNegInf) {
      for (std::size_t s = 0; s < S; ++s) b[s] -= top;
    }
  }

  BitPosteriors out;
  out.p1.resize(2 * steps);
  out.info_p1.resize(info);
  for (std::size_t t = 0; t < steps; ++t) {
    // Log sums split by input bit and each output bit value.
    double u1 = kNegInf, u0 = kNegInf;
    std::array<double, 2> c1{kNegInf, kNegInf}, c0{kNegInf, kNegInf};
    for (std::size_t s = 0; s < S; ++s) {
      const double a = alpha[t * S + s];
      if (a == kNegInf) continue;
      for (int u = 0; u < 2; ++u) {
        if (!allowed(t, u)) continue;
        const auto ns = static_cast<std::size_t>(trellis.next[s][static_cast<std::size_t>(u)]);
        const double b = beta[(t + 1) * S + ns];
        if (b == kNegInf) continue;
        const int o = trellis.output[s][static_cast<std::size_t>(u)];
        const double m = a + gamma(t, o) + b;
        (u ? u1 : u0) = max_star(u ? u1 : u0, m);
        for (int i = 0; i < 2; ++i) {
          const bool one = (o >> (1 - i)) & 1;
          auto& slot = one ? c1[static_cast<std::size_t>(i)] : c0[static_cast<std::size_t>(i)];
          slot = max_star(slot, m);
        }
      }
    }
    out.p1[2 * t] = prob_one(c1[0], c0[0]);
    out.p1[2 * t + 1] = prob_one(c1[1], c0[1]);
    if (t < info) out.info_p1[t] = prob_one(u1, u0);
  }
  return out;
}

std::array<double, 4> symbol_distribution(double p_b0, double p_b1) {
  return {(1 - p_b0) * (1 - p_b1), (1 - p_b0) * p_b1, p_b0 * (1 - p_b1), p_b0 * p_b1};
}

SymbolPosteriors uninformed_posteriors(const FrameLayout& layout, const FrameObservation& frame) {
  require(frame.S.rows() == layout.stacked && frame.S.cols() == layout.triples, ErrorCategory::kShape,
          "symbol posteriors: frame does not match layout");
  SymbolPosteriors sp;
  sp.mean = frame.S;
  for (const auto& p : layout.data_positions) sp.mean(p.k, p.m) = 0.0;
  return sp;
}

SymbolPosteriors symbol_posteriors(std::span<const double> interleaved_p1, const FrameLayout& layout,
                                   const FrameObservation& frame) {
  require(static_cast<Index>(interleaved_p1.size()) == layout.coded_bits, ErrorCategory::kShape,
          "symbol posteriors: " + std::to_string(interleaved_p1.size()) + " bit posteriors for " +
              std::to_string(layout.coded_bits) + " coded bits");
  SymbolPosteriors sp = uninformed_posteriors(layout, frame);
  const double a = 1.0 / std::sqrt(2.0);
  for (std::size_t d = 0; d < layout.data_positions.size(); ++d) {
    const auto& p = layout.data_positions[d];
    // E[s] separates per axis for Gray QPSK: E[Re] = a (1 - 2 p0).
    sp.mean(p.k, p.m) = Complex(a * (1.0 - 2.0 * interleaved_p1[2 * d]), a * (1.0 - 2.0 * interleaved_p1[2 * d + 1]));
  }
  return sp;
}

SymbolPosteriors symbol_posteriors(const BitPosteriors& bits, const FrameLayout& layout,
                                   const FrameObservation& frame) {
  const auto inter = interleave<double>(bits.p1, layout.permutation);
  return symbol_posteriors(inter, layout, frame);
}

Bits hard_decision(std::span<const double> p1) {
  Bits b(p1.size());
  for (std::size_t i = 0; i < p1.size(); ++i) b[i] = p1[i] > 0.5 ? 1 : 0;
  return b;
}

DecodeResult decode_frame(const FrameObservation& frame, const CVec& H_hat, const FrameLayout& layout,
                          const Trellis& trellis, double noise_var) {
  require(H_hat.size() == layout.stacked, ErrorCategory::kShape, "decode_frame: channel estimate length mismatch");
  std::vector<double> llr(static_cast<std::size_t>(layout.coded_bits));
  for (std::size_t d = 0; d < layout.data_positions.size(); ++d) {
    const auto& p = layout.data_positions[d];
    const auto l = soft_demap(frame.Y(p.k, p.m), H_hat(p.k), noise_var);
    llr[2 * d] = l[0];
    llr[2 * d + 1] = l[1];
  }
  const auto natural = deinterleave<double>(llr, layout.permutation);
  DecodeResult r;
  r.bits = bcjr_decode(natural, trellis);
  r.symbols = symbol_posteriors(r.bits, layout, frame);
  r.decoded = hard_decision(r.bits.info_p1);
  return r;
}

}  // namespace uwbem
