#include "uwbem/estimators.hpp"

#include "uwbem/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace uwbem {

Receiver::Receiver(FrameLayout lay, const WaveletBasis& basis)
    : layout(std::move(lay)), trellis(make_trellis(layout.code)), op(make_operator(layout.stacked, basis)) {}

// ---- pilot baselines ------------------------------------------------------

CVec pilot_ml(const CMat& Y_pilot, const CMat& S_pilot) {
  require(Y_pilot.rows() == S_pilot.rows() && Y_pilot.cols() == S_pilot.cols(), ErrorCategory::kShape,
          "pilot_ml: Y and S shapes differ");
  require(Y_pilot.cols() >= 1, ErrorCategory::kDomain, "pilot_ml: no pilot observations cover the subcarriers");
  return (S_pilot.conjugate().cwiseProduct(Y_pilot)).rowwise().mean();
}

CVec pilot_ml(const FrameObservation& frame) {
  const Index p = frame.pilot_triples;
  require(p >= 1, ErrorCategory::kDomain, "pilot_ml: frame has no pilot triples");
  return pilot_ml(frame.Y.leftCols(p), frame.S.leftCols(p));
}

PilotMmse::PilotMmse(const CMat& R_h, double sigma2, Index pilot_columns) {
  require(R_h.rows() == R_h.cols(), ErrorCategory::kShape, "pilot_mmse: covariance must be square");
  require(sigma2 > 0.0, ErrorCategory::kDomain, "pilot_mmse: sigma2 must be positive");
  require(pilot_columns >= 1, ErrorCategory::kDomain, "pilot_mmse: need at least one pilot column");
  require((R_h - R_h.adjoint()).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, R_h.cwiseAbs().maxCoeff()),
          ErrorCategory::kDomain, "pilot_mmse: covariance is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> eig(R_h, Eigen::EigenvaluesOnly);
  require(eig.eigenvalues().minCoeff() >= -1e-9, ErrorCategory::kDomain,
          "pilot_mmse: covariance is not positive semidefinite");
  const double v = sigma2 / static_cast<double>(pilot_columns);
  const CMat A = R_h + v * CMat::Identity(R_h.rows(), R_h.cols());
  // R and (R + vI) commute, so R (R + vI)^{-1} = (R + vI)^{-1} R.
  filter_ = A.llt().solve(R_h);
}

CVec PilotMmse::apply(const CVec& H_ml) const {
  require(H_ml.size() == filter_.cols(), ErrorCategory::kShape, "pilot_mmse: estimate length mismatch");
  return filter_ * H_ml;
}

CVec pilot_mmse(const CMat& Y_pilot, const CMat& S_pilot, const CMat& R_h, double sigma2) {
  const PilotMmse f(R_h, sigma2, Y_pilot.cols());
  return f.apply(pilot_ml(Y_pilot, S_pilot));
}

// ---- EM state and M-step pieces --------------------------------------------

ThresholdResult bg_threshold(const CVec& g_tilde, double alpha2, double lambda, double tau2) {
  require(alpha2 > 0.0, ErrorCategory::kDomain, "bg_threshold: alpha2 must be positive");
  require(tau2 >= 0.0, ErrorCategory::kDomain, "bg_threshold: tau2 must be nonnegative");
  require(lambda >= 0.0 && lambda <= 1.0, ErrorCategory::kDomain, "bg_threshold: lambda outside [0, 1]");
  ThresholdResult r;
  r.beta.assign(static_cast<std::size_t>(g_tilde.size()), 0);
  r.g = CVec::Zero(g_tilde.size());
  if (tau2 == 0.0 && lambda < 1.0) {
    // Slab collapsed onto the spike; treated as lambda = 1.
    r.degenerate_prior = true;
    return r;
  }
  const double level = bg_threshold_level(alpha2, lambda, tau2);
  const double shrink = tau2 / (alpha2 + tau2);
  for (Index j = 0; j < g_tilde.size(); ++j) {
    if (std::norm(g_tilde(j)) > level) {
      r.beta[static_cast<std::size_t>(j)] = 1;
      r.g(j) = shrink * g_tilde(j);
    }
  }
  return r;
}

double bg_threshold_level(double alpha2, double lambda, double tau2) {
  if (lambda <= 0.0) return -std::numeric_limits<double>::infinity();
  if (lambda >= 1.0 || tau2 <= 0.0) return std::numeric_limits<double>::infinity();
  const double ratio = lambda * (alpha2 + tau2) / ((1.0 - lambda) * alpha2);
  return alpha2 * (alpha2 + tau2) / tau2 * std::log(ratio);
}

std::optional<Hyperparams> update_hyperparams(const std::vector<std::uint8_t>& beta, const CVec& g, Index length) {
  require(static_cast<Index>(beta.size()) == g.size(), ErrorCategory::kShape,
          "update_hyperparams: beta and g lengths differ");
  require(length >= 2 && length >= g.size(), ErrorCategory::kDomain, "update_hyperparams: need L >= 2");
  Index zeros = length - g.size();
  double eta = 0.0;
  for (Index j = 0; j < g.size(); ++j) {
    if (beta[static_cast<std::size_t>(j)]) {
      eta += std::norm(g(j));
    } else {
      ++zeros;
    }
  }
  if (zeros == length) return std::nullopt;
  const double lambda = (static_cast<double>(zeros) - 0.5) / static_cast<double>(length - 1);
  return Hyperparams{std::clamp(lambda, 0.0, 1.0), eta / static_cast<double>(length - zeros)};
}

bool truncate(EmState& state, Operator& op, const std::vector<std::uint8_t>& beta) {
  require(static_cast<Index>(beta.size()) == state.g.size() && state.g.size() == op.cols(), ErrorCategory::kShape,
          "truncate: beta, state and operator disagree on the active size");
  if (state.t < 1) return true;
  IndexSet keep;
  std::vector<Index> local;
  for (std::size_t j = 0; j < beta.size(); ++j) {
    if (beta[j]) {
      keep.push_back(state.active[j]);
      local.push_back(static_cast<Index>(j));
    }
  }
  if (keep.empty()) return false;
  if (keep.size() == state.active.size()) return true;
  CVec g(static_cast<Index>(local.size()));
  for (std::size_t i = 0; i < local.size(); ++i) g(static_cast<Index>(i)) = state.g(local[i]);
  state.g = std::move(g);
  state.active = keep;
  op = op.restrict_columns(keep);
  return true;
}

CVec expand_full(const EmState& state, Index full_length) {
  CVec out = CVec::Zero(full_length);
  for (std::size_t i = 0; i < state.active.size(); ++i) out(state.active[i]) = state.g(static_cast<Index>(i));
  return out;
}

EmState em_init(const CVec& H_pilot, const Operator& op, double sigma2, double rho, double init_noise_var,
                int t_max) {
  require(H_pilot.size() == op.rows(), ErrorCategory::kShape, "em_init: pilot estimate length mismatch");
  require(rho > 0.0 && rho <= 1.0, ErrorCategory::kDomain, "em_init: rho must be in (0, 1]");
  require(sigma2 > 0.0 && init_noise_var > 0.0, ErrorCategory::kDomain, "em_init: noise variances must be positive");
  EmState s;
  s.g = op.adjoint(H_pilot);
  s.active = op.active_cols();
  s.rho = rho;
  s.sigma2 = sigma2;
  s.alpha2 = rho * sigma2;
  s.t = 0;
  s.t_max = t_max;

  // Bootstrap pass: threshold g^(0) with an even spike prior, then let the
  // conjugate updates set the starting hyperparameters.
  const double lambda0 = 0.5;
  const double tau0 = std::max(s.g.squaredNorm() / static_cast<double>(s.g.size()) - init_noise_var, init_noise_var);
  const auto boot = bg_threshold(s.g, init_noise_var, lambda0, tau0);
  const auto hyper = update_hyperparams(boot.beta, boot.g, static_cast<Index>(boot.beta.size()));
  s.lambda = hyper ? hyper->lambda : lambda0;
  s.tau2 = hyper ? hyper->tau2 : tau0;
  return s;
}

NoiseSplit draw_split_noise(Index size, double sigma2, double rho, Rng& rng) {
  require(sigma2 > 0.0 && rho > 0.0 && rho <= 1.0, ErrorCategory::kDomain, "noise split: bad sigma2 or rho");
  NoiseSplit n{CVec(size), CVec(size)};
  for (Index k = 0; k < size; ++k) n.z1(k) = rng.complex_normal(rho * sigma2);
  for (Index k = 0; k < size; ++k) n.z2(k) = rho < 1.0 ? rng.complex_normal((1.0 - rho) * sigma2) : Complex(0.0);
  return n;
}

CVec matched_observation(const FrameObservation& frame, const SymbolPosteriors& symbols) {
  require(symbols.mean.rows() == frame.Y.rows() && symbols.mean.cols() == frame.Y.cols(), ErrorCategory::kShape,
          "matched_observation: posterior shape mismatch");
  return symbols.mean.conjugate().cwiseProduct(frame.Y).rowwise().mean();
}

CVec em_e_step(const EmState& state, const FrameObservation& frame, const SymbolPosteriors& symbols,
               const Operator& op) {
  require(state.g.size() == op.cols() && state.active == op.active_cols(), ErrorCategory::kShape,
          "em_e_step: state active set does not match the operator");
  return (1.0 - state.rho) * state.g + state.rho * op.adjoint(matched_observation(frame, symbols));
}

// ---- iterative receivers ---------------------------------------------------

SymbolSource decoder_source(const FrameObservation& frame, const Receiver& rx) {
  return [&frame, &rx](const CVec& H_hat) {
    auto d = decode_frame(frame, H_hat, rx.layout, rx.trellis, frame.sigma2);
    return Feedback{std::move(d.symbols), std::move(d.decoded)};
  };
}

SymbolSource genie_source(const FrameObservation& frame) {
  return [&frame](const CVec&) { return Feedback{SymbolPosteriors{frame.S}, {}}; };
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mse_or_nan(const CVec& est, const CVec* truth) { return truth ? (est - *truth).squaredNorm() : kNaN; }

double init_noise_var(const FrameObservation& frame) {
  return frame.sigma2 / static_cast<double>(frame.pilot_triples);
}

void check_run(const FrameObservation& frame, const Receiver& rx, const EmConfig& cfg) {
  require(cfg.t_max >= 1, ErrorCategory::kConfig, "t_max must be >= 1");
  require(cfg.rho > 0.0 && cfg.rho <= 1.0, ErrorCategory::kConfig, "rho must be in (0, 1]");
  require(frame.sigma2 > 0.0, ErrorCategory::kDomain, "frame has no noise variance");
  require(frame.pilot_triples >= 1, ErrorCategory::kDomain, "frame has no pilots");
  require(frame.Y.rows() == rx.layout.stacked && frame.Y.cols() == rx.layout.triples, ErrorCategory::kShape,
          "frame does not match receiver layout");
}

enum class Prior { kBernoulliGaussian, kUniform };

RunResult run_wavelet_em(const FrameObservation& frame, const Receiver& rx, const EmConfig& cfg,
                         const SymbolSource& source, Truth truth, Prior prior) {
  check_run(frame, rx, cfg);
  Operator op = rx.op;
  const Index L = op.full_cols();
  EmState state = em_init(pilot_ml(frame), op, frame.sigma2, cfg.rho, init_noise_var(frame), cfg.t_max);
  if (cfg.fixed_prior) {
    state.lambda = cfg.fixed_prior->lambda;
    state.tau2 = cfg.fixed_prior->tau2;
  }
  // The M-step sees the average of M_sym pseudo-observations.
  const double alpha2_eff = state.alpha2 / static_cast<double>(frame.Y.cols());

  RunResult r;
  auto record = [&](int it) {
    const CVec g_full = expand_full(state, L);
    r.trace.push_back({it, static_cast<Index>(state.active.size()), state.lambda, state.tau2,
                       mse_or_nan(g_full, truth.g)});
    r.trajectory.push_back(g_full);
  };
  record(0);

  for (int it = 1; it <= cfg.t_max; ++it) {
    const Feedback fb = source(op.apply(state.g));
    const CVec g_tilde = em_e_step(state, frame, fb.symbols, op);
    if (prior == Prior::kUniform) {
      state.g = g_tilde;
    } else {
      const ThresholdResult thr = bg_threshold(g_tilde, alpha2_eff, state.lambda, state.tau2);
      const Index hyper_len = cfg.hyper_length == HyperLength::kActive ? state.g.size() : L;
      const auto hyper = update_hyperparams(thr.beta, thr.g, hyper_len);
      if (!hyper) {
        // Everything pruned: keep the previous estimate and stop iterating.
        r.all_pruned = true;
        break;
      }
      state.g = thr.g;
      if (!cfg.fixed_prior) {
        state.lambda = hyper->lambda;
        state.tau2 = hyper->tau2;
      }
      if (cfg.truncation) truncate(state, op, thr.beta);
    }
    ++state.t;
    record(it);
  }

  r.g_full = expand_full(state, L);
  r.H_hat = op.apply(state.g);
  r.decoded = decoder_source(frame, rx)(r.H_hat).decoded;
  return r;
}

}  // namespace

RunResult em_map_run(const FrameObservation& frame, const Receiver& rx, const EmConfig& cfg, Truth truth) {
  return run_wavelet_em(frame, rx, cfg, decoder_source(frame, rx), truth, Prior::kBernoulliGaussian);
}

RunResult em_map_run(const FrameObservation& frame, const Receiver& rx, const EmConfig& cfg,
                     const SymbolSource& source, Truth truth) {
  return run_wavelet_em(frame, rx, cfg, source, truth, Prior::kBernoulliGaussian);
}

RunResult em_wav_run(const FrameObservation& frame, const Receiver& rx, const EmConfig& cfg, Truth truth) {
  return run_wavelet_em(frame, rx, cfg, decoder_source(frame, rx), truth, Prior::kUniform);
}

RunResult em_wav_run(const FrameObservation& frame, const Receiver& rx, const EmConfig& cfg,
                     const SymbolSource& source, Truth truth) {
  return run_wavelet_em(frame, rx, cfg, source, truth, Prior::kUniform);
}

RunResult em_freq_run(const FrameObservation& frame, const Receiver& rx, const EmConfig& cfg, Truth truth) {
  return em_freq_run(frame, rx, cfg, decoder_source(frame, rx), truth);
}

RunResult em_freq_run(const FrameObservation& frame, const Receiver& rx, const EmConfig& cfg,
                      const SymbolSource& source, Truth truth) {
  check_run(frame, rx, cfg);
  CVec H = pilot_ml(frame);
  const auto M = static_cast<Index>(H.size());
  RunResult r;
  auto record = [&](int it) {
    r.trace.push_back({it, M, kNaN, kNaN, mse_or_nan(H, truth.H)});
    r.trajectory.push_back(H);
  };
  record(0);
  for (int it = 1; it <= cfg.t_max; ++it) {
    const Feedback fb = source(H);
    H = (1.0 - cfg.rho) * H + cfg.rho * matched_observation(frame, fb.symbols);
    record(it);
  }
  r.H_hat = H;
  r.decoded = decoder_source(frame, rx)(H).decoded;
  return r;
}

}  // namespace uwbem
