#pragma once

// Wavelet and truncated Fourier operators mapping CIR wavelet coefficients
// to the stacked multi-subband frequency response, H = F W^H g.

#include "uwbem/error.hpp"
#include "uwbem/types.hpp"
#include "uwbem/wavelet_filters.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace uwbem {

enum class WaveletFamily { kSymmlet };

struct WaveletBasis {
  WaveletFamily family = WaveletFamily::kSymmlet;
  int filter_order = 8;  // vanishing moments; 1 degenerates to Haar
  int levels = 4;
  Index length = 96;
};

inline void validate(const WaveletBasis& basis) {
  require(basis.levels >= 1, ErrorCategory::kDomain, "wavelet levels must be >= 1");
  require(basis.length >= 2, ErrorCategory::kDomain, "wavelet length must be >= 2");
  require(basis.length % (Index{1} << basis.levels) == 0, ErrorCategory::kDomain,
          "wavelet length " + std::to_string(basis.length) + " not divisible by 2^" +
              std::to_string(basis.levels));
  require(!symmlet_filter(basis.filter_order).empty(), ErrorCategory::kDomain,
          "unsupported symmlet order " + std::to_string(basis.filter_order));
}

namespace detail {

template <typename Scalar>
struct FilterPair {
  std::vector<Scalar> low;
  std::vector<Scalar> high;
};

template <typename Scalar>
FilterPair<Scalar> filter_pair(int order) {
  const auto h = symmlet_filter(order);
  const std::size_t n = h.size();
  FilterPair<Scalar> f;
  f.low.resize(n);
  f.high.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    f.low[k] = static_cast<Scalar>(h[k]);
    // Quadrature mirror: g[k] = (-1)^k h[n-1-k].
    f.high[k] = static_cast<Scalar>((k % 2 == 0 ? 1.0 : -1.0) * h[n - 1 - k]);
  }
  return f;
}

}  // namespace detail

// J-level periodized orthogonal DWT of each column of `x`. Output layout per
// column is [a_J, d_J, d_{J-1}, ..., d_1].
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> dwt(
    const Eigen::MatrixBase<Derived>& x, const WaveletBasis& basis) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  validate(basis);
  require(x.rows() == basis.length, ErrorCategory::kShape, "dwt: input length mismatch");

  const auto f = detail::filter_pair<Real>(basis.filter_order);
  const Index taps = static_cast<Index>(f.low.size());
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out = x;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> work;

  for (Index c = 0; c < out.cols(); ++c) {
    Index len = basis.length;
    for (int level = 0; level < basis.levels; ++level) {
      work = out.col(c).head(len);
      const Index half = len / 2;
      for (Index k = 0; k < half; ++k) {
        Scalar a(0), d(0);
        for (Index n = 0; n < taps; ++n) {
          const Scalar v = work((2 * k + n) % len);
          a += f.low[n] * v;
          d += f.high[n] * v;
        }
        out(k, c) = a;
        out(half + k, c) = d;
      }
      len = half;
    }
  }
  return out;
}

// Inverse of dwt for each column.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> idwt(
    const Eigen::MatrixBase<Derived>& coeffs, const WaveletBasis& basis) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  validate(basis);
  require(coeffs.rows() == basis.length, ErrorCategory::kShape, "idwt: input length mismatch");

  const auto f = detail::filter_pair<Real>(basis.filter_order);
  const Index taps = static_cast<Index>(f.low.size());
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out = coeffs;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> work;

  for (Index c = 0; c < out.cols(); ++c) {
    Index len = basis.length >> basis.levels;
    for (int level = 0; level < basis.levels; ++level) {
      const Index half = len;
      len *= 2;
      work.setZero(len);
      for (Index k = 0; k < half; ++k) {
        const Scalar a = out(k, c);
        const Scalar d = out(half + k, c);
        for (Index n = 0; n < taps; ++n) {
          work((2 * k + n) % len) += f.low[n] * a + f.high[n] * d;
        }
      }
      out.col(c).head(len) = work;
    }
  }
  return out;
}

// L x L real orthogonal matrix W with W h = dwt(h).
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> build_wavelet_matrix(const WaveletBasis& basis) {
  validate(basis);
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  return dwt(Mat::Identity(basis.length, basis.length), basis);
}

// First L columns of the unitary M-point DFT matrix.
template <typename Scalar = double>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic> build_truncated_fourier(Index rows, Index cols) {
  require(cols >= 1, ErrorCategory::kDomain, "truncated Fourier needs L >= 1");
  require(cols <= rows, ErrorCategory::kDomain,
          "truncated Fourier needs L <= M (L=" + std::to_string(cols) + ", M=" + std::to_string(rows) + ")");
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic> f(rows, cols);
  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(rows));
  for (Index m = 0; m < rows; ++m) {
    for (Index l = 0; l < cols; ++l) {
      // Reduce m*l modulo M in integers to keep the phase argument small.
      const auto r = static_cast<Scalar>((m * l) % rows);
      const Scalar phase = -Scalar(2) * std::numbers::pi_v<Scalar> * r / static_cast<Scalar>(rows);
      f(m, l) = std::polar(scale, phase);
    }
  }
  return f;
}

// T = F W^H together with its factors, restrictable to a subset of columns.
template <typename Scalar = double>
class LinearOperator {
 public:
  using Cx = std::complex<Scalar>;
  using CMatrix = Eigen::Matrix<Cx, Eigen::Dynamic, Eigen::Dynamic>;
  using CVector = Eigen::Matrix<Cx, Eigen::Dynamic, 1>;
  using RMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  LinearOperator() = default;

  LinearOperator(CMatrix fourier, RMatrix wavelet)
      : fourier_(std::move(fourier)), wavelet_(std::move(wavelet)) {
    require(fourier_.cols() == wavelet_.rows() && wavelet_.rows() == wavelet_.cols(), ErrorCategory::kShape,
            "compose_operator: F is " + std::to_string(fourier_.rows()) + "x" + std::to_string(fourier_.cols()) +
                " but W is " + std::to_string(wavelet_.rows()) + "x" + std::to_string(wavelet_.cols()));
    full_ = fourier_ * wavelet_.transpose().template cast<Cx>();
    matrix_ = full_;
    active_.resize(static_cast<std::size_t>(full_.cols()));
    for (Index j = 0; j < full_.cols(); ++j) active_[static_cast<std::size_t>(j)] = j;
  }

  Index rows() const { return matrix_.rows(); }
  Index cols() const { return matrix_.cols(); }
  Index full_cols() const { return full_.cols(); }

  // Matrix restricted to the active columns.
  const CMatrix& matrix() const { return matrix_; }
  const CMatrix& full_matrix() const { return full_; }
  const CMatrix& fourier() const { return fourier_; }
  const RMatrix& wavelet() const { return wavelet_; }
  const IndexSet& active_cols() const { return active_; }

  template <typename Derived>
  CVector apply(const Eigen::MatrixBase<Derived>& g) const {
    require(g.rows() == cols(), ErrorCategory::kShape, "operator apply: coefficient length mismatch");
    return matrix_ * g;
  }

  template <typename Derived>
  CVector adjoint(const Eigen::MatrixBase<Derived>& y) const {
    require(y.rows() == rows(), ErrorCategory::kShape, "operator adjoint: observation length mismatch");
    return matrix_.adjoint() * y;
  }

  // Scatters a reduced coefficient vector into the full length-L layout.
  CVector expand(const CVector& reduced) const {
    require(reduced.size() == cols(), ErrorCategory::kShape, "expand: reduced length mismatch");
    CVector out = CVector::Zero(full_cols());
    for (std::size_t i = 0; i < active_.size(); ++i) out(active_[i]) = reduced(static_cast<Index>(i));
    return out;
  }

  // Gathers the active entries of a full-length coefficient vector.
  CVector gather(const CVector& full) const {
    require(full.size() == full_cols(), ErrorCategory::kShape, "gather: full length mismatch");
    CVector out(cols());
    for (std::size_t i = 0; i < active_.size(); ++i) out(static_cast<Index>(i)) = full(active_[i]);
    return out;
  }

  // Keeps only the columns listed in `keep` (original indexes, subset of the
  // active set).
  LinearOperator restrict_columns(const IndexSet& keep) const {
    require(!keep.empty(), ErrorCategory::kDomain, "restrict_columns: empty keep set");
    LinearOperator out;
    out.fourier_ = fourier_;
    out.wavelet_ = wavelet_;
    out.full_ = full_;
    out.active_ = keep;
    out.matrix_.resize(full_.rows(), static_cast<Index>(keep.size()));
    std::size_t pos = 0;
    for (std::size_t i = 0; i < keep.size(); ++i) {
      if (i > 0) {
        require(keep[i] > keep[i - 1], ErrorCategory::kDomain, "restrict_columns: keep set must be increasing");
      }
      while (pos < active_.size() && active_[pos] < keep[i]) ++pos;
      require(pos < active_.size() && active_[pos] == keep[i], ErrorCategory::kDomain,
              "restrict_columns: index " + std::to_string(keep[i]) + " outside active set");
      out.matrix_.col(static_cast<Index>(i)) = full_.col(keep[i]);
    }
    return out;
  }

 private:
  CMatrix fourier_;
  RMatrix wavelet_;
  CMatrix full_;
  CMatrix matrix_;
  IndexSet active_;
};

template <typename Scalar>
LinearOperator<Scalar> compose_operator(Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic> fourier,
                                        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> wavelet) {
  return LinearOperator<Scalar>(std::move(fourier), std::move(wavelet));
}

// Convenience: the session operator for M stacked subcarriers and a basis.
template <typename Scalar = double>
LinearOperator<Scalar> make_operator(Index rows, const WaveletBasis& basis) {
  return compose_operator<Scalar>(build_truncated_fourier<Scalar>(rows, basis.length),
                                  build_wavelet_matrix<Scalar>(basis));
}

using Operator = LinearOperator<double>;

}  // namespace uwbem
