#pragma once

// Channel estimators: pilot ML / MMSE baselines, frequency-domain EM,
// wavelet-domain EM with a uniform prior, and wavelet-domain EM-MAP with a
// Bernoulli-Gaussian prior and per-iteration coefficient truncation.

#include "uwbem/phy.hpp"
#include "uwbem/rng.hpp"
#include "uwbem/siso.hpp"
#include "uwbem/transforms.hpp"
#include "uwbem/types.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace uwbem {

// Immutable receiver-side setup shared by all frames of a session.
struct Receiver {
  FrameLayout layout;
  Trellis trellis;
  Operator op;

  Receiver(FrameLayout lay, const WaveletBasis& basis);
};

// ---- pilot baselines ------------------------------------------------------

// Per-subcarrier ML estimate conj(S) Y averaged over the pilot columns.
CVec pilot_ml(const CMat& Y_pilot, const CMat& S_pilot);
CVec pilot_ml(const FrameObservation& frame);

// Wiener smoother R (R + v I)^{-1} applied to the pilot ML estimate, with
// v = sigma2 / (pilot columns). Construction checks R for Hermitian PSD.
class PilotMmse {
 public:
  PilotMmse(const CMat& R_h, double sigma2, Index pilot_columns = 1);

  CVec apply(const CVec& H_ml) const;
  const CMat& filter() const { return filter_; }

 private:
  CMat filter_;
};

CVec pilot_mmse(const CMat& Y_pilot, const CMat& S_pilot, const CMat& R_h, double sigma2);

// ---- EM state and M-step pieces --------------------------------------------

struct EmState {
  CVec g;           // coefficients on the active set
  IndexSet active;  // original column indexes
  double lambda = 0.5;
  double tau2 = 0.0;
  double rho = 0.5;
  double sigma2 = 0.0;
  double alpha2 = 0.0;  // rho * sigma2
  int t = 0;
  int t_max = 4;
};

// Pilot noise variance per coefficient of g^(0) (sigma2 over pilot columns).
EmState em_init(const CVec& H_pilot, const Operator& op, double sigma2, double rho, double init_noise_var, int t_max);

// The Z = D_S Z1 + Z2 decomposition: Z1 ~ CN(0, rho sigma2 I), Z2 ~ CN(0, (1-rho) sigma2 I).
struct NoiseSplit {
  CVec z1;
  CVec z2;
};
NoiseSplit draw_split_noise(Index size, double sigma2, double rho, Rng& rng);

// r = mean over triples of conj(S_bar) .* Y, an M-vector.
CVec matched_observation(const FrameObservation& frame, const SymbolPosteriors& symbols);

// Pseudo-observation g~ = (1 - rho) g + rho (D_S_bar T)^H Y averaged over the
// frame's symbol triples, on the active columns of `op`.
CVec em_e_step(const EmState& state, const FrameObservation& frame, const SymbolPosteriors& symbols,
               const Operator& op);

struct ThresholdResult {
  std::vector<std::uint8_t> beta;  // 1 = significant coefficient
  CVec g;
  bool degenerate_prior = false;  // tau2 == 0 collapsed the slab
};

// MAP indicator decision and posterior-mean shrinkage under the
// Bernoulli-Gaussian prior, for a pseudo-observation with noise variance alpha2.
ThresholdResult bg_threshold(const CVec& g_tilde, double alpha2, double lambda, double tau2);

// |x|^2 below which the coefficient is zeroed; -inf when never zeroed.
double bg_threshold_level(double alpha2, double lambda, double tau2);

struct Hyperparams {
  double lambda;
  double tau2;
};

// Conjugate-prior MAP updates. `length` is the L of the update; entries of
// the length not covered by `beta` count as zeros. Returns nullopt when every
// coefficient was zeroed.
std::optional<Hyperparams> update_hyperparams(const std::vector<std::uint8_t>& beta, const CVec& g, Index length);

// Drops beta == 0 coefficients from the state and operator. No-op while
// state.t == 0. Returns false if nothing would remain (state untouched).
bool truncate(EmState& state, Operator& op, const std::vector<std::uint8_t>& beta);

// Full-length coefficients with discarded entries as zeros.
CVec expand_full(const EmState& state, Index full_length);

// ---- iterative receivers ---------------------------------------------------

enum class HyperLength { kActive, kFixed };

struct EmConfig {
  double rho = 0.5;
  int t_max = 4;
  bool truncation = true;
  HyperLength hyper_length = HyperLength::kActive;
  std::optional<Hyperparams> fixed_prior;  // freezes lambda, tau2 when set
};

struct Feedback {
  SymbolPosteriors symbols;
  Bits decoded;
};

// Produces symbol posteriors for a stacked channel estimate. The default
// source runs the soft demapper and BCJR decoder.
using SymbolSource = std::function<Feedback(const CVec& H_hat)>;

SymbolSource decoder_source(const FrameObservation& frame, const Receiver& rx);
SymbolSource genie_source(const FrameObservation& frame);

struct IterationRecord {
  int iteration = 0;
  Index active = 0;
  double lambda = 0.0;
  double tau2 = 0.0;
  double mse = 0.0;  // NaN without ground truth
};

struct RunResult {
  CVec H_hat;                     // final stacked estimate
  CVec g_full;                    // final full-length coefficients (wavelet estimators)
  std::vector<CVec> trajectory;   // per-iteration estimate, iteration 0 first
  std::vector<IterationRecord> trace;
  Bits decoded;
  bool all_pruned = false;
};

struct Truth {
  const CVec* g = nullptr;
  const CVec* H = nullptr;
};

RunResult em_map_run(const FrameObservation& frame, const Receiver& rx, const EmConfig& cfg, Truth truth = {});
RunResult em_map_run(const FrameObservation& frame, const Receiver& rx, const EmConfig& cfg,
                     const SymbolSource& source, Truth truth = {});

RunResult em_wav_run(const FrameObservation& frame, const Receiver& rx, const EmConfig& cfg, Truth truth = {});
RunResult em_wav_run(const FrameObservation& frame, const Receiver& rx, const EmConfig& cfg,
                     const SymbolSource& source, Truth truth = {});

RunResult em_freq_run(const FrameObservation& frame, const Receiver& rx, const EmConfig& cfg, Truth truth = {});
RunResult em_freq_run(const FrameObservation& frame, const Receiver& rx, const EmConfig& cfg,
                      const SymbolSource& source, Truth truth = {});

}  // namespace uwbem
