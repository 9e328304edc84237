#pragma once

// Experiment orchestration: seeded Monte Carlo over frames, metrics and CSV
// emission.

#include "uwbem/channels.hpp"
#include "uwbem/estimators.hpp"
#include "uwbem/phy.hpp"
#include "uwbem/transforms.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace uwbem {

enum class EstimatorId { kPilotMl, kPilotMmse, kEmFreq, kEmWav, kEmMap, kPerfectCsi };

std::string_view estimator_name(EstimatorId id);
EstimatorId parse_estimator(std::string_view name);

struct ExperimentConfig {
  ChannelModel channel_model = ChannelModel::kSparseWavelet;
  Index k_nonzero = 20;
  ExponentialPdp pdp;
  std::filesystem::path cir_file;

  std::vector<EstimatorId> estimators = {EstimatorId::kPilotMl, EstimatorId::kPilotMmse, EstimatorId::kEmFreq,
                                         EstimatorId::kEmWav,   EstimatorId::kEmMap,     EstimatorId::kPerfectCsi};
  std::vector<double> ebn0_grid_db = {0, 2, 4, 6, 8, 10, 12};
  Index frames_per_point = 100;
  std::uint64_t rng_seed = 1;

  FrameConfig frame;
  CodeConfig code;
  WaveletBasis basis;
  EmConfig em;

  Index mmse_draws = 10000;
  int threads = 1;
  std::filesystem::path output_path = "out";
};

void validate(const ExperimentConfig& cfg);

// Flat JSON object; unknown keys are rejected. Missing keys keep defaults.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& cfg);

double compute_mse(const CVec& estimate, const CVec& truth);
double compute_ber(std::span<const std::uint8_t> decoded, std::span<const std::uint8_t> payload);

struct FrameMetrics {
  double mse = 0.0;
  Index bit_errors = 0;
  Index bits = 0;
  std::vector<IterationRecord> trace;  // iterative estimators only
};

struct ExperimentResult {
  ExperimentConfig cfg;
  std::vector<double> sigma2;  // per grid point
  // metrics[point][estimator][frame]
  std::vector<std::vector<std::vector<FrameMetrics>>> metrics;
};

struct MetricRow {
  EstimatorId estimator;
  double ebn0_db;
  double mse;
  double ber;
  Index frames;
  std::uint64_t seed;
};

struct DiagnosticRow {
  EstimatorId estimator;
  double ebn0_db;
  int iteration;
  double mean_active;
  double lambda;  // NaN when the estimator has no prior
  double tau2;
  double mse_iter;
};

// Per-frame streams are keyed by (seed, frame, point), so results do not
// depend on thread count or scheduling.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::vector<MetricRow> metric_rows(const ExperimentResult& result);
std::vector<DiagnosticRow> diagnostic_rows(const ExperimentResult& result);

std::string metrics_csv(const std::vector<MetricRow>& rows);
std::string diagnostics_csv(const std::vector<DiagnosticRow>& rows);
std::string metadata_json(const ExperimentResult& result);

// Writes metrics.csv, diagnostics.csv and metadata.json under `dir`.
void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

// ---- single-frame building blocks (shared with the CLI and tests) ----------

class Session {
 public:
  explicit Session(const ExperimentConfig& cfg);

  const ExperimentConfig& config() const { return cfg_; }
  const Receiver& receiver() const { return rx_; }

  ChannelRealization draw_channel(Rng& rng) const;
  // Genie channel covariance of H for the MMSE baseline.
  CMat channel_covariance() const;

  struct Frame {
    ChannelRealization channel;
    TxFrame tx;
    FrameObservation obs;
  };
  Frame make_frame(Index frame_index, Index point_index, double sigma2) const;

 private:
  ExperimentConfig cfg_;
  Receiver rx_;
  ChannelRealization file_channel_;
};

// ---- frame fixtures ---------------------------------------------------------

struct FrameFixture {
  FrameObservation obs;
  std::string sidecar_json;
};

// `<stem>.bin` holds Y then S, column-major little-endian complex64;
// `<stem>.json` describes shapes, noise and seeds.
void write_frame_fixture(const std::filesystem::path& stem, const FrameObservation& obs,
                         const std::string& extra_json = "{}");
FrameFixture read_frame_fixture(const std::filesystem::path& stem);

}  // namespace uwbem
