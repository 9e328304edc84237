#include "uwbem/harness.hpp"

#include "uwbem/error.hpp"
#include "uwbem/siso.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace uwbem {

using nlohmann::json;

namespace {

// Stream tags for derive_seed.
constexpr std::uint64_t kChannelStream = 1;
constexpr std::uint64_t kPayloadStream = 2;
constexpr std::uint64_t kNoiseStream = 3;
constexpr std::uint64_t kCovarianceStream = 4;

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCategory::kIo, "cannot write " + path.string());
  out << text;
  require(static_cast<bool>(out), ErrorCategory::kIo, "write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCategory::kIo, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string_view estimator_name(EstimatorId id) {
  switch (id) {
    case EstimatorId::kPilotMl: return "pilot-ml";
    case EstimatorId::kPilotMmse: return "pilot-mmse";
    case EstimatorId::kEmFreq: return "em-freq";
    case EstimatorId::kEmWav: return "em-wav";
    case EstimatorId::kEmMap: return "em-map";
    case EstimatorId::kPerfectCsi: return "perfect-csi";
  }
  return "unknown";
}

EstimatorId parse_estimator(std::string_view name) {
  for (auto id : {EstimatorId::kPilotMl, EstimatorId::kPilotMmse, EstimatorId::kEmFreq, EstimatorId::kEmWav,
                  EstimatorId::kEmMap, EstimatorId::kPerfectCsi}) {
    if (estimator_name(id) == name) return id;
  }
  fail(ErrorCategory::kConfig, "unknown estimator '" + std::string(name) + "'");
}

void validate(const ExperimentConfig& cfg) {
  require(cfg.frames_per_point >= 1, ErrorCategory::kConfig, "frames_per_point must be >= 1");
  require(!cfg.ebn0_grid_db.empty(), ErrorCategory::kConfig, "ebn0_grid_db must be nonempty");
  require(!cfg.estimators.empty(), ErrorCategory::kConfig, "estimators must be nonempty");
  require(std::set<EstimatorId>(cfg.estimators.begin(), cfg.estimators.end()).size() == cfg.estimators.size(),
          ErrorCategory::kConfig, "estimators must not repeat");
  require(cfg.threads >= 1, ErrorCategory::kConfig, "threads must be >= 1");
  require(cfg.mmse_draws >= 1, ErrorCategory::kConfig, "mmse_draws must be >= 1");
  require(cfg.em.t_max >= 1, ErrorCategory::kConfig, "t_max must be >= 1");
  require(cfg.em.rho > 0.0 && cfg.em.rho <= 1.0, ErrorCategory::kConfig, "rho must be in (0, 1]");
  require(cfg.basis.length <= kSubbands * cfg.frame.subcarriers, ErrorCategory::kConfig,
          "cir_length must not exceed 3 * subcarriers");
  require(cfg.channel_model != ChannelModel::kFile || !cfg.cir_file.empty(), ErrorCategory::kConfig,
          "channel_model 'file' needs cir_file");
  validate(cfg.frame);
  validate(cfg.code);
  try {
    validate(cfg.basis);
  } catch (const Error& e) {
    fail(ErrorCategory::kConfig, e.what());
  }
}

ExperimentConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCategory::kParse, std::string("config: ") + e.what());
  }
  require(j.is_object(), ErrorCategory::kConfig, "config must be a JSON object");

  ExperimentConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "channel_model") {
        c.channel_model = parse_model(v.get<std::string>());
      } else if (key == "k_nonzero") {
        c.k_nonzero = v.get<Index>();
      } else if (key == "pdp_decay") {
        c.pdp.decay = v.get<double>();
      } else if (key == "los_factor") {
        c.pdp.los_factor = v.get<double>();
      } else if (key == "cir_file") {
        c.cir_file = v.get<std::string>();
      } else if (key == "estimators") {
        c.estimators.clear();
        for (const auto& e : v) c.estimators.push_back(parse_estimator(e.get<std::string>()));
      } else if (key == "ebn0_grid_db") {
        c.ebn0_grid_db = v.get<std::vector<double>>();
      } else if (key == "frames_per_point") {
        c.frames_per_point = v.get<Index>();
      } else if (key == "rng_seed") {
        c.rng_seed = v.get<std::uint64_t>();
      } else if (key == "subcarriers") {
        c.frame.subcarriers = v.get<Index>();
      } else if (key == "payload_bits") {
        c.frame.payload_bits = v.get<Index>();
      } else if (key == "pilot_symbols") {
        c.frame.pilot_symbols = v.get<Index>();
      } else if (key == "tfc") {
        const auto t = v.get<std::vector<int>>();
        require(t.size() == kSubbands, ErrorCategory::kConfig, "tfc must list 3 subbands");
        std::copy(t.begin(), t.end(), c.frame.tfc.begin());
      } else if (key == "interleaver_seed") {
        c.frame.interleaver_seed = v.get<std::uint64_t>();
      } else if (key == "constraint_length") {
        c.code.constraint_length = v.get<int>();
      } else if (key == "generators") {
        // Octal digits as strings, e.g. ["7", "5"].
        const auto g = v.get<std::vector<std::string>>();
        require(g.size() == 2, ErrorCategory::kConfig, "generators must list two octal polynomials");
        for (std::size_t i = 0; i < 2; ++i) c.code.generators[i] = static_cast<unsigned>(std::stoul(g[i], nullptr, 8));
      } else if (key == "wavelet_order") {
        c.basis.filter_order = v.get<int>();
      } else if (key == "wavelet_levels") {
        c.basis.levels = v.get<int>();
      } else if (key == "cir_length") {
        c.basis.length = v.get<Index>();
      } else if (key == "rho") {
        c.em.rho = v.get<double>();
      } else if (key == "t_max") {
        c.em.t_max = v.get<int>();
      } else if (key == "truncation") {
        c.em.truncation = v.get<bool>();
      } else if (key == "hyper_length") {
        const auto s = v.get<std::string>();
        require(s == "active" || s == "fixed", ErrorCategory::kConfig, "hyper_length must be 'active' or 'fixed'");
        c.em.hyper_length = s == "active" ? HyperLength::kActive : HyperLength::kFixed;
      } else if (key == "mmse_draws") {
        c.mmse_draws = v.get<Index>();
      } else if (key == "threads") {
        c.threads = v.get<int>();
      } else if (key == "output_path") {
        c.output_path = v.get<std::string>();
      } else {
        fail(ErrorCategory::kConfig, "unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorCategory::kConfig, std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    fail(ErrorCategory::kConfig, std::string("config: bad value: ") + e.what());
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(read_text(path)); }

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["channel_model"] = std::string(model_name(c.channel_model));
  j["k_nonzero"] = c.k_nonzero;
  j["pdp_decay"] = c.pdp.decay;
  j["los_factor"] = c.pdp.los_factor;
  if (!c.cir_file.empty()) j["cir_file"] = c.cir_file.string();
  json est = json::array();
  for (auto e : c.estimators) est.push_back(std::string(estimator_name(e)));
  j["estimators"] = est;
  j["ebn0_grid_db"] = c.ebn0_grid_db;
  j["frames_per_point"] = c.frames_per_point;
  j["rng_seed"] = c.rng_seed;
  j["subcarriers"] = c.frame.subcarriers;
  j["payload_bits"] = c.frame.payload_bits;
  j["pilot_symbols"] = c.frame.pilot_symbols;
  j["tfc"] = std::vector<int>(c.frame.tfc.begin(), c.frame.tfc.end());
  j["interleaver_seed"] = c.frame.interleaver_seed;
  j["constraint_length"] = c.code.constraint_length;
  char g0[16], g1[16];
  std::snprintf(g0, sizeof g0, "%o", c.code.generators[0]);
  std::snprintf(g1, sizeof g1, "%o", c.code.generators[1]);
  j["generators"] = {g0, g1};
  j["wavelet_order"] = c.basis.filter_order;
  j["wavelet_levels"] = c.basis.levels;
  j["cir_length"] = c.basis.length;
  j["rho"] = c.em.rho;
  j["t_max"] = c.em.t_max;
  j["truncation"] = c.em.truncation;
  j["hyper_length"] = c.em.hyper_length == HyperLength::kActive ? "active" : "fixed";
  j["mmse_draws"] = c.mmse_draws;
  j["threads"] = c.threads;
  j["output_path"] = c.output_path.string();
  return j.dump(2);
}

double compute_mse(const CVec& estimate, const CVec& truth) {
  require(estimate.size() == truth.size(), ErrorCategory::kShape, "compute_mse: length mismatch");
  return (estimate - truth).squaredNorm();
}

double compute_ber(std::span<const std::uint8_t> decoded, std::span<const std::uint8_t> payload) {
  require(decoded.size() == payload.size(), ErrorCategory::kShape, "compute_ber: length mismatch");
  if (payload.empty()) return 0.0;
  std::size_t errors = 0;
  for (std::size_t i = 0; i < payload.size(); ++i) errors += (decoded[i] & 1) != (payload[i] & 1);
  return static_cast<double>(errors) / static_cast<double>(payload.size());
}

// ---- Session ----------------------------------------------------------------

Session::Session(const ExperimentConfig& cfg)
    : cfg_(cfg), rx_(make_layout(cfg.frame, cfg.code), cfg.basis) {
  validate(cfg_);
  if (cfg_.channel_model == ChannelModel::kFile) file_channel_ = load_cir_file(cfg_.cir_file, rx_.op);
}

ChannelRealization Session::draw_channel(Rng& rng) const {
  switch (cfg_.channel_model) {
    case ChannelModel::kSparseWavelet: return gen_sparse_wavelet_channel(rx_.op, cfg_.k_nonzero, rng);
    case ChannelModel::kExponentialPdp: return gen_exponential_channel(rx_.op, cfg_.pdp, rng);
    case ChannelModel::kFile: return file_channel_;
  }
  fail(ErrorCategory::kConfig, "unhandled channel model");
}

CMat Session::channel_covariance() const {
  const Index L = rx_.op.full_cols();
  CMat C = CMat::Zero(L, L);
  const Index draws = cfg_.channel_model == ChannelModel::kFile ? 1 : cfg_.mmse_draws;
  Rng rng(derive_seed(cfg_.rng_seed, {kCovarianceStream}));
  for (Index i = 0; i < draws; ++i) {
    const CVec h = draw_channel(rng).h_time;
    C.noalias() += h * h.adjoint();
  }
  C /= static_cast<double>(draws);
  const CMat& F = rx_.op.fourier();
  CMat R = F * C * F.adjoint();
  // Symmetrize away rounding so the Hermitian check is exact.
  return (R + R.adjoint()) / 2.0;
}

Session::Frame Session::make_frame(Index frame_index, Index point_index, double sigma2) const {
  const auto f = static_cast<std::uint64_t>(frame_index);
  Rng channel_rng(derive_seed(cfg_.rng_seed, {f, kChannelStream}));
  Rng payload_rng(derive_seed(cfg_.rng_seed, {f, kPayloadStream}));
  Rng noise_rng(derive_seed(cfg_.rng_seed, {f, kNoiseStream, static_cast<std::uint64_t>(point_index)}));
  Frame fr;
  fr.channel = draw_channel(channel_rng);
  const Bits payload = random_bits(rx_.layout.payload_bits, payload_rng);
  fr.tx = build_frame(payload, rx_.layout);
  fr.obs = apply_channel(fr.tx.obs, fr.channel.H_freq, sigma2, noise_rng);
  return fr;
}

// ---- run_experiment ---------------------------------------------------------

namespace {

bool uses(const ExperimentConfig& cfg, EstimatorId id) {
  return std::find(cfg.estimators.begin(), cfg.estimators.end(), id) != cfg.estimators.end();
}

FrameMetrics decoded_metrics(const Bits& decoded, const Bits& payload, double mse) {
  FrameMetrics m;
  m.mse = mse;
  m.bits = static_cast<Index>(payload.size());
  for (std::size_t i = 0; i < payload.size(); ++i) m.bit_errors += decoded[i] != payload[i];
  return m;
}

FrameMetrics evaluate(EstimatorId id, const Session& session, const Session::Frame& fr, const PilotMmse* mmse) {
  const Receiver& rx = session.receiver();
  const EmConfig& em = session.config().em;
  const Bits& payload = fr.tx.payload;
  const CVec& H = fr.channel.H_freq;
  const CVec& g = fr.channel.g_true;
  auto single_decode = [&](const CVec& H_hat, double mse) {
    const auto d = decode_frame(fr.obs, H_hat, rx.layout, rx.trellis, fr.obs.sigma2);
    return decoded_metrics(d.decoded, payload, mse);
  };
  switch (id) {
    case EstimatorId::kPerfectCsi: return single_decode(H, 0.0);
    case EstimatorId::kPilotMl: {
      const CVec H_hat = pilot_ml(fr.obs);
      return single_decode(H_hat, compute_mse(H_hat, H));
    }
    case EstimatorId::kPilotMmse: {
      const CVec H_hat = mmse->apply(pilot_ml(fr.obs));
      return single_decode(H_hat, compute_mse(H_hat, H));
    }
    case EstimatorId::kEmFreq: {
      const RunResult r = em_freq_run(fr.obs, rx, em, Truth{nullptr, &H});
      auto m = decoded_metrics(r.decoded, payload, compute_mse(r.H_hat, H));
      m.trace = r.trace;
      return m;
    }
    case EstimatorId::kEmWav:
    case EstimatorId::kEmMap: {
      const RunResult r = id == EstimatorId::kEmWav ? em_wav_run(fr.obs, rx, em, Truth{&g, &H})
                                                    : em_map_run(fr.obs, rx, em, Truth{&g, &H});
      auto m = decoded_metrics(r.decoded, payload, compute_mse(r.g_full, g));
      m.trace = r.trace;
      return m;
    }
  }
  fail(ErrorCategory::kConfig, "unhandled estimator");
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const Session session(cfg);
  ExperimentResult res;
  res.cfg = cfg;
  const Index points = static_cast<Index>(cfg.ebn0_grid_db.size());
  const Index frames = cfg.frames_per_point;
  const std::size_t n_est = cfg.estimators.size();
  const Index M = session.receiver().layout.stacked;

  std::vector<std::unique_ptr<PilotMmse>> mmse(static_cast<std::size_t>(points));
  CMat R;
  if (uses(cfg, EstimatorId::kPilotMmse)) R = session.channel_covariance();
  for (Index p = 0; p < points; ++p) {
    res.sigma2.push_back(ebn0_to_sigma2(cfg.ebn0_grid_db[static_cast<std::size_t>(p)], M));
    if (R.size() > 0) {
      mmse[static_cast<std::size_t>(p)] =
          std::make_unique<PilotMmse>(R, res.sigma2.back(), session.receiver().layout.pilot_triples);
    }
  }
  res.metrics.assign(static_cast<std::size_t>(points),
                     std::vector<std::vector<FrameMetrics>>(n_est, std::vector<FrameMetrics>(static_cast<std::size_t>(frames))));

  const Index jobs = points * frames;
  std::atomic<Index> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const Index job = next.fetch_add(1);
      if (job >= jobs) return;
      const Index p = job / frames;
      const Index f = job % frames;
      try {
        const auto fr = session.make_frame(f, p, res.sigma2[static_cast<std::size_t>(p)]);
        for (std::size_t e = 0; e < n_est; ++e) {
          res.metrics[static_cast<std::size_t>(p)][e][static_cast<std::size_t>(f)] =
              evaluate(cfg.estimators[e], session, fr, mmse[static_cast<std::size_t>(p)].get());
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(jobs);
        return;
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(jobs)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return res;
}

std::vector<MetricRow> metric_rows(const ExperimentResult& res) {
  std::vector<MetricRow> rows;
  for (std::size_t p = 0; p < res.metrics.size(); ++p) {
    for (std::size_t e = 0; e < res.cfg.estimators.size(); ++e) {
      const auto& fm = res.metrics[p][e];
      double mse = 0.0;
      Index errors = 0, bits = 0;
      for (const auto& m : fm) {
        mse += m.mse;
        errors += m.bit_errors;
        bits += m.bits;
      }
      rows.push_back({res.cfg.estimators[e], res.cfg.ebn0_grid_db[p], mse / static_cast<double>(fm.size()),
                      bits > 0 ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0,
                      static_cast<Index>(fm.size()), res.cfg.rng_seed});
    }
  }
  return rows;
}

std::vector<DiagnosticRow> diagnostic_rows(const ExperimentResult& res) {
  std::vector<DiagnosticRow> rows;
  const int iters = res.cfg.em.t_max;
  for (std::size_t p = 0; p < res.metrics.size(); ++p) {
    for (std::size_t e = 0; e < res.cfg.estimators.size(); ++e) {
      const auto& fm = res.metrics[p][e];
      if (fm.empty() || fm.front().trace.empty()) continue;
      for (int it = 0; it <= iters; ++it) {
        double active = 0, lambda = 0, tau2 = 0, mse = 0;
        for (const auto& m : fm) {
          // Runs that stopped early hold their last state.
          const auto& rec = m.trace[std::min<std::size_t>(static_cast<std::size_t>(it), m.trace.size() - 1)];
          active += static_cast<double>(rec.active);
          lambda += rec.lambda;
          tau2 += rec.tau2;
          mse += rec.mse;
        }
        const double n = static_cast<double>(fm.size());
        rows.push_back({res.cfg.estimators[e], res.cfg.ebn0_grid_db[p], it, active / n, lambda / n, tau2 / n, mse / n});
      }
    }
  }
  return rows;
}

std::string metrics_csv(const std::vector<MetricRow>& rows) {
  std::string out = "estimator,ebn0_db,mse,ber,frames,seed\n";
  for (const auto& r : rows) {
    out += std::string(estimator_name(r.estimator)) + ',' + format_double(r.ebn0_db) + ',' + format_double(r.mse) +
           ',' + format_double(r.ber) + ',' + std::to_string(r.frames) + ',' + std::to_string(r.seed) + '\n';
  }
  return out;
}

std::string diagnostics_csv(const std::vector<DiagnosticRow>& rows) {
  std::string out = "estimator,ebn0_db,iteration,mean_active,lambda,tau2,mse_iter\n";
  for (const auto& r : rows) {
    out += std::string(estimator_name(r.estimator)) + ',' + format_double(r.ebn0_db) + ',' +
           std::to_string(r.iteration) + ',' + format_double(r.mean_active) + ',' + format_double(r.lambda) + ',' +
           format_double(r.tau2) + ',' + format_double(r.mse_iter) + '\n';
  }
  return out;
}

std::string metadata_json(const ExperimentResult& res) {
  json j;
  j["config"] = json::parse(config_to_json(res.cfg));
  j["ebn0_convention"] =
      "sigma2 = (||H||^2 / M) / (B * R * 10^(EbN0_dB/10)) with ||H|| = 1, B = 2, R = 1/2; "
      "sigma2 is the total complex noise variance per subcarrier";
  json pts = json::array();
  for (std::size_t p = 0; p < res.sigma2.size(); ++p) {
    pts.push_back({{"ebn0_db", res.cfg.ebn0_grid_db[p]}, {"sigma2", res.sigma2[p]}});
  }
  j["points"] = pts;
  j["mse_definition"] =
      "wavelet estimators: ||g_hat - g||^2 on all L coefficients, discarded ones as zero; "
      "frequency estimators: ||H_hat - H||^2 (equal to the wavelet-domain error for estimates in range(T))";
  return j.dump(2) + "\n";
}

void write_outputs(const ExperimentResult& res, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorCategory::kIo, "cannot create output directory " + dir.string());
  write_text(dir / "metrics.csv", metrics_csv(metric_rows(res)));
  write_text(dir / "diagnostics.csv", diagnostics_csv(diagnostic_rows(res)));
  write_text(dir / "metadata.json", metadata_json(res));
}

// ---- frame fixtures ---------------------------------------------------------

namespace {

void put_f32(std::string& out, float v) {
  auto bits = std::bit_cast<std::uint32_t>(v);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

float get_f32(const std::string& in, std::size_t pos) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return std::bit_cast<float>(bits);
}

}  // namespace

void write_frame_fixture(const std::filesystem::path& stem, const FrameObservation& obs, const std::string& extra) {
  require(obs.Y.rows() == obs.S.rows() && obs.Y.cols() == obs.S.cols(), ErrorCategory::kShape,
          "fixture: Y and S shapes differ");
  std::string bin;
  bin.reserve(static_cast<std::size_t>(obs.Y.size()) * 16);
  for (const CMat* a : {&obs.Y, &obs.S}) {
    for (Index i = 0; i < a->size(); ++i) {
      put_f32(bin, static_cast<float>((*a)(i).real()));
      put_f32(bin, static_cast<float>((*a)(i).imag()));
    }
  }
  std::string mask;
  for (Index i = 0; i < obs.pilot_mask.size(); ++i) mask.push_back(obs.pilot_mask(i) ? '1' : '0');

  json j;
  j["format"] = "complex64-le";
  j["order"] = "column-major";
  j["arrays"] = {"Y", "S"};
  j["rows"] = obs.Y.rows();
  j["cols"] = obs.Y.cols();
  j["sigma2"] = obs.sigma2;
  j["pilot_triples"] = obs.pilot_triples;
  j["pilot_mask"] = mask;
  json ex;
  try {
    ex = json::parse(extra);
  } catch (const json::parse_error& e) {
    fail(ErrorCategory::kParse, std::string("fixture metadata: ") + e.what());
  }
  j["meta"] = ex;
  auto bin_path = stem;
  bin_path += ".bin";
  auto json_path = stem;
  json_path += ".json";
  write_text(bin_path, bin);
  write_text(json_path, j.dump(2) + "\n");
}

FrameFixture read_frame_fixture(const std::filesystem::path& stem) {
  auto bin_path = stem;
  bin_path += ".bin";
  auto json_path = stem;
  json_path += ".json";
  FrameFixture fx;
  fx.sidecar_json = read_text(json_path);
  json j;
  try {
    j = json::parse(fx.sidecar_json);
    require(j.at("format") == "complex64-le" && j.at("order") == "column-major", ErrorCategory::kParse,
            "fixture: unsupported format");
    const auto rows = j.at("rows").get<Index>();
    const auto cols = j.at("cols").get<Index>();
    const std::string bin = read_text(bin_path);
    require(static_cast<Index>(bin.size()) == 2 * rows * cols * 8, ErrorCategory::kParse,
            "fixture: binary size does not match the sidecar shape");
    std::size_t pos = 0;
    for (CMat* a : {&fx.obs.Y, &fx.obs.S}) {
      a->resize(rows, cols);
      for (Index i = 0; i < a->size(); ++i, pos += 8) (*a)(i) = Complex(get_f32(bin, pos), get_f32(bin, pos + 4));
    }
    fx.obs.sigma2 = j.at("sigma2").get<double>();
    fx.obs.pilot_triples = j.at("pilot_triples").get<Index>();
    const auto mask = j.at("pilot_mask").get<std::string>();
    require(static_cast<Index>(mask.size()) == rows * cols, ErrorCategory::kParse, "fixture: pilot mask size");
    fx.obs.pilot_mask.resize(rows, cols);
    for (Index i = 0; i < rows * cols; ++i) fx.obs.pilot_mask(i) = mask[static_cast<std::size_t>(i)] == '1';
  } catch (const json::exception& e) {
    fail(ErrorCategory::kParse, std::string("fixture: ") + e.what());
  }
  return fx;
}

}  // namespace uwbem
