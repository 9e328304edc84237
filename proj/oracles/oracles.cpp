#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace uwbem::oracle {
namespace {

double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

int tap(unsigned gen, int constraint_length, int delay) {
  // Octal generator with the MSB acting on the current input (delay 0).
  return static_cast<int>((gen >> (constraint_length - 1 - delay)) & 1u);
}

}  // namespace

Bits convolve_encode(std::span<const std::uint8_t> info, unsigned gen0, unsigned gen1, int constraint_length) {
  std::vector<int> u(info.begin(), info.end());
  u.resize(u.size() + static_cast<std::size_t>(constraint_length - 1), 0);
  Bits out;
  for (std::size_t n = 0; n < u.size(); ++n) {
    int a = 0, b = 0;
    for (int d = 0; d < constraint_length; ++d) {
      if (n < static_cast<std::size_t>(d)) continue;
      a ^= tap(gen0, constraint_length, d) & u[n - static_cast<std::size_t>(d)];
      b ^= tap(gen1, constraint_length, d) & u[n - static_cast<std::size_t>(d)];
    }
    out.push_back(static_cast<std::uint8_t>(a));
    out.push_back(static_cast<std::uint8_t>(b));
  }
  return out;
}

Posteriors brute_force_posteriors(std::span<const double> llr, int info_bits, unsigned gen0, unsigned gen1,
                                  int constraint_length) {
  if (info_bits > 16) throw std::invalid_argument("brute force limited to 16 bits");
  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<double> c1(llr.size(), ninf), c0(llr.size(), ninf);
  std::vector<double> u1(static_cast<std::size_t>(info_bits), ninf), u0(static_cast<std::size_t>(info_bits), ninf);
  for (std::uint32_t w = 0; w < (1u << info_bits); ++w) {
    Bits info(static_cast<std::size_t>(info_bits));
    for (int i = 0; i < info_bits; ++i) info[static_cast<std::size_t>(i)] = (w >> i) & 1u;
    const Bits cw = convolve_encode(info, gen0, gen1, constraint_length);
    if (cw.size() != llr.size()) throw std::invalid_argument("llr length does not match codeword length");
    double logp = 0.0;
    for (std::size_t i = 0; i < cw.size(); ++i) logp += cw[i] ? llr[i] : 0.0;
    for (std::size_t i = 0; i < cw.size(); ++i) (cw[i] ? c1[i] : c0[i]) = log_add(cw[i] ? c1[i] : c0[i], logp);
    for (std::size_t i = 0; i < info.size(); ++i) (info[i] ? u1[i] : u0[i]) = log_add(info[i] ? u1[i] : u0[i], logp);
  }
  auto prob = [&](double one, double zero) {
    if (one == ninf) return 0.0;
    if (zero == ninf) return 1.0;
    return 1.0 / (1.0 + std::exp(zero - one));
  };
  Posteriors p;
  for (std::size_t i = 0; i < llr.size(); ++i) p.coded_p1.push_back(prob(c1[i], c0[i]));
  for (std::size_t i = 0; i < u1.size(); ++i) p.info_p1.push_back(prob(u1[i], u0[i]));
  return p;
}

std::array<double, 2> generic_demap(Complex y, Complex h, double noise_var) {
  const double a = 1.0 / std::sqrt(2.0);
  const double ninf = -std::numeric_limits<double>::infinity();
  std::array<double, 2> one{ninf, ninf}, zero{ninf, ninf};
  for (int b0 = 0; b0 < 2; ++b0) {
    for (int b1 = 0; b1 < 2; ++b1) {
      const Complex s(b0 ? -a : a, b1 ? -a : a);
      const double metric = -std::norm(y - h * s) / noise_var;
      (b0 ? one[0] : zero[0]) = log_add(b0 ? one[0] : zero[0], metric);
      (b1 ? one[1] : zero[1]) = log_add(b1 ? one[1] : zero[1], metric);
    }
  }
  return {one[0] - zero[0], one[1] - zero[1]};
}

double spike_posterior(Complex x, double alpha2, double lambda, double tau2) {
  auto log_cn = [&](double v) { return -std::norm(x) / v - std::log(std::numbers::pi * v); };
  const double l0 = std::log(lambda) + log_cn(alpha2);
  const double l1 = std::log1p(-lambda) + log_cn(alpha2 + tau2);
  return 1.0 / (1.0 + std::exp(l1 - l0));
}

CVec direct_dft(const CVec& h, Index M) {
  CVec H = CVec::Zero(M);
  for (Index k = 0; k < M; ++k) {
    for (Index l = 0; l < h.size(); ++l) {
      const double phase = -2.0 * std::numbers::pi * static_cast<double>(k) * static_cast<double>(l) / static_cast<double>(M);
      H(k) += h(l) * std::polar(1.0, phase);
    }
  }
  return H / std::sqrt(static_cast<double>(M));
}

RMat reference_wavelet_matrix(std::span<const double> h, Index length, int levels) {
  // Build each level as an explicit analysis matrix and multiply them out.
  const auto taps = static_cast<Index>(h.size());
  RMat W = RMat::Identity(length, length);
  Index len = length;
  for (int j = 0; j < levels; ++j) {
    RMat A = RMat::Zero(len, len);
    const Index half = len / 2;
    for (Index k = 0; k < half; ++k) {
      for (Index n = 0; n < taps; ++n) {
        const Index col = (2 * k + n) % len;
        const double g = ((n % 2) ? -1.0 : 1.0) * h[static_cast<std::size_t>(taps - 1 - n)];
        A(k, col) += h[static_cast<std::size_t>(n)];
        A(half + k, col) += g;
      }
    }
    RMat step = RMat::Identity(length, length);
    step.topLeftCorner(len, len) = A;
    W = step * W;
    len = half;
  }
  return W;
}

}  // namespace uwbem::oracle
