#pragma once

// Reference computations used to check the production code paths. Each one
// is written from the defining formula, by enumeration or direct summation,
// and shares no code with the implementation it checks.

#include "uwbem/types.hpp"

#include <array>
#include <span>
#include <vector>

namespace uwbem::oracle {

// Feedforward rate-1/2 encoder by explicit polynomial convolution, with K-1
// zero tail bits.
Bits convolve_encode(std::span<const std::uint8_t> info, unsigned gen0, unsigned gen1, int constraint_length);

struct Posteriors {
  std::vector<double> coded_p1;
  std::vector<double> info_p1;
};

// Bayes posteriors by enumerating every information word (info_bits <= 16).
Posteriors brute_force_posteriors(std::span<const double> coded_llrs, int info_bits, unsigned gen0, unsigned gen1,
                                  int constraint_length);

// Four-hypothesis demapper with log-sum-exp over the Gray table.
std::array<double, 2> generic_demap(Complex y, Complex h, double noise_var);

// P(beta = 0 | x) from the two complex Gaussian densities, combined in the log domain.
double spike_posterior(Complex x, double alpha2, double lambda, double tau2);

// sum_l h_l exp(-i 2 pi k l / M) / sqrt(M) for k = 0..M-1.
CVec direct_dft(const CVec& h, Index M);

// Dense matrix of the periodized orthogonal DWT computed by circular
// convolution with explicit downsampling, independent of the lifting loop.
RMat reference_wavelet_matrix(std::span<const double> scaling_filter, Index length, int levels);

}  // namespace uwbem::oracle
