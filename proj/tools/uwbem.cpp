// Experiment CLI: run Monte Carlo sweeps, generate and inspect channels,
// dump frame fixtures and run the built-in oracle checks.

#include "selftest.hpp"
#include "uwbem/channels.hpp"
#include "uwbem/error.hpp"
#include "uwbem/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace uwbem;

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kConfig: return 2;
    case ErrorCategory::kShape: return 3;
    case ErrorCategory::kDomain: return 4;
    case ErrorCategory::kParse: return 5;
    case ErrorCategory::kIo: return 6;
  }
  return 1;
}

ExperimentConfig config_or_default(const std::string& path) {
  return path.empty() ? ExperimentConfig{} : load_config(path);
}

void inspect(const ChannelRealization& c, std::ostream& out) {
  const Index L = c.g_true.size();
  double peak = 0.0;
  for (Index j = 0; j < L; ++j) peak = std::max(peak, std::norm(c.g_true(j)));
  Index significant = 0;
  for (Index j = 0; j < L; ++j) significant += std::norm(c.g_true(j)) >= 1e-3 * peak;
  const auto mag = c.H_freq.cwiseAbs();
  out << "taps " << c.h_time.size() << "\n"
      << "energy " << c.h_time.squaredNorm() << "\n"
      << "wavelet_coeffs_above_-30dB " << significant << " of " << L << "\n"
      << "freq_response_min_abs " << mag.minCoeff() << "\n"
      << "freq_response_max_abs " << mag.maxCoeff() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-blind wavelet-domain EM channel estimation experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<Index> frames;
  std::optional<int> threads;
  auto* run = app.add_subcommand("run", "run a Monte Carlo experiment and write CSV outputs");
  run->add_option("--config", config_path, "experiment config (flat JSON)")->required();
  run->add_option("--seed", seed, "override rng_seed");
  run->add_option("--frames", frames, "override frames_per_point");
  run->add_option("--out", out_dir, "output directory (default: output_path from config)");
  run->add_option("--threads", threads, "worker threads");

  auto* channels = app.add_subcommand("channels", "generate or inspect channel impulse responses");
  channels->require_subcommand(1);
  std::string model = "sparse-wavelet", cir_out, channel_config;
  std::uint64_t channel_seed = 1;
  auto* gen = channels->add_subcommand("gen", "draw a channel and write its CIR text file");
  gen->add_option("--model", model, "sparse-wavelet | exponential-pdp");
  gen->add_option("--config", channel_config, "config supplying L, k_nonzero, pdp parameters");
  gen->add_option("--seed", channel_seed, "draw seed");
  gen->add_option("--out", cir_out, "output path ('-' for stdout)")->default_val("-");
  std::string cir_in;
  auto* insp = channels->add_subcommand("inspect", "summarize a CIR text file");
  insp->add_option("file", cir_in, "CIR file")->required();
  insp->add_option("--config", channel_config, "config supplying L and the wavelet basis");

  std::string fixture_stem;
  double fixture_ebn0 = 8.0;
  Index fixture_index = 0;
  auto* frame = app.add_subcommand("frame", "write a simulated frame as a binary fixture with a JSON sidecar");
  frame->add_option("--config", config_path, "experiment config");
  frame->add_option("--ebn0", fixture_ebn0, "Eb/N0 in dB");
  frame->add_option("--index", fixture_index, "frame index within the seeded stream");
  frame->add_option("--seed", seed, "override rng_seed");
  frame->add_option("--out", fixture_stem, "output stem (writes <stem>.bin and <stem>.json)")->required();

  auto* selftest = app.add_subcommand("selftest", "run the built-in oracle checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*run) {
      ExperimentConfig cfg = load_config(config_path);
      if (seed) cfg.rng_seed = *seed;
      if (frames) cfg.frames_per_point = *frames;
      if (threads) cfg.threads = *threads;
      if (!out_dir.empty()) cfg.output_path = out_dir;
      validate(cfg);
      const auto result = run_experiment(cfg);
      write_outputs(result, cfg.output_path);
      std::cout << metrics_csv(metric_rows(result));
    } else if (*gen) {
      ExperimentConfig cfg = config_or_default(channel_config);
      cfg.channel_model = parse_model(model);
      require(cfg.channel_model != ChannelModel::kFile, ErrorCategory::kConfig, "gen supports generated models only");
      const Session session(cfg);
      Rng rng(derive_seed(channel_seed, {0}));
      const auto c = session.draw_channel(rng);
      if (cir_out == "-") {
        for (Index l = 0; l < c.h_time.size(); ++l) std::printf("%.17g %.17g\n", c.h_time(l).real(), c.h_time(l).imag());
      } else {
        write_cir_file(cir_out, c.h_time);
      }
    } else if (*insp) {
      const ExperimentConfig cfg = config_or_default(channel_config);
      const Operator op = make_operator(kSubbands * cfg.frame.subcarriers, cfg.basis);
      inspect(load_cir_file(cir_in, op), std::cout);
    } else if (*frame) {
      ExperimentConfig cfg = config_or_default(config_path);
      if (seed) cfg.rng_seed = *seed;
      const Session session(cfg);
      const double sigma2 = ebn0_to_sigma2(fixture_ebn0, session.receiver().layout.stacked);
      const auto fr = session.make_frame(fixture_index, 0, sigma2);
      const std::string meta = "{\"rng_seed\": " + std::to_string(cfg.rng_seed) +
                               ", \"frame_index\": " + std::to_string(fixture_index) +
                               ", \"ebn0_db\": " + std::to_string(fixture_ebn0) +
                               ", \"interleaver_seed\": " + std::to_string(cfg.frame.interleaver_seed) + "}";
      write_frame_fixture(fixture_stem, fr.obs, meta);
    } else if (*selftest) {
      const int failed = run_selftest(std::cout);
      if (failed > 0) {
        std::cerr << "error: selftest: " << failed << " check(s) failed\n";
        return 7;
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << category_name(e.category()) << ": " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
