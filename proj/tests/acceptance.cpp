// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance            run every criterion
//   acceptance 3 7        run the listed criteria only

#include "oracles.hpp"
#include "uwbem/harness.hpp"
#include "uwbem/siso.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace uwbem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int worker_threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

struct Stats {
  double mean = 0.0;
  double se = 0.0;
};

Stats stats(const std::vector<double>& v) {
  const auto n = static_cast<double>(v.size());
  double m = 0.0;
  for (double x : v) m += x;
  m /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

std::vector<double> frame_mse(const ExperimentResult& r, std::size_t point, std::size_t est) {
  std::vector<double> out;
  for (const auto& fm : r.metrics[point][est]) out.push_back(fm.mse);
  return out;
}

std::size_t index_of(const ExperimentConfig& cfg, EstimatorId id) {
  return static_cast<std::size_t>(std::find(cfg.estimators.begin(), cfg.estimators.end(), id) - cfg.estimators.begin());
}

// First crossing of `target` by a decreasing curve, interpolated in log10(y).
double crossing(const std::vector<double>& x, const std::vector<double>& y, double target) {
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (y[i] >= target && y[i + 1] < target && y[i + 1] > 0.0) {
      const double a = std::log10(y[i]), b = std::log10(y[i + 1]), t = std::log10(target);
      return x[i] + (x[i + 1] - x[i]) * (a - t) / (a - b);
    }
    if (y[i] >= target && y[i + 1] <= 0.0) return x[i + 1];
  }
  if (!y.empty() && y.front() < target) return -std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::quiet_NaN();
}

ExperimentConfig sparse_config(std::vector<EstimatorId> est, std::vector<double> grid, Index frames) {
  ExperimentConfig c;
  c.estimators = std::move(est);
  c.ebn0_grid_db = std::move(grid);
  c.frames_per_point = frames;
  c.threads = worker_threads();
  c.rng_seed = 20240601;
  return c;
}

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> g;
  for (int i = 0; lo + i * step <= hi + 1e-9; ++i) g.push_back(lo + i * step);
  return g;
}

// ---- criteria --------------------------------------------------------------

Outcome operator_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1);
  double worst_iso = 0.0, worst_rec = 0.0;
  for (auto [N, L, J] : {std::tuple<Index, Index, int>{32, 24, 3}, {128, 96, 4}}) {
    WaveletBasis basis;
    basis.length = L;
    basis.levels = J;
    const Operator op = make_operator(kSubbands * N, basis);
    const CMat gram = op.matrix().adjoint() * op.matrix();
    worst_iso = std::max(worst_iso, (gram - CMat::Identity(L, L)).cwiseAbs().maxCoeff());
    for (int i = 0; i < 50; ++i) {
      CVec x(L);
      for (Index j = 0; j < L; ++j) x(j) = rng.complex_normal(1.0);
      const CVec back = idwt(dwt(x, basis), basis);
      worst_rec = std::max(worst_rec, (back - x).cwiseAbs().maxCoeff());
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst_iso < 1e-10 && worst_rec < 1e-10 && secs < 5.0,
          fmt("max|T^H T - I| = %.2e, reconstruction %.2e, %.2f s", worst_iso, worst_rec, secs)};
}

Outcome bcjr_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const CodeConfig code;
  const Trellis t = make_trellis(code);
  Rng rng(2);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int info = 1 + static_cast<int>(rng.below(12));
    const double scale = 0.5 + 4.0 * rng.uniform();
    std::vector<double> llr(static_cast<std::size_t>(2 * (info + code.constraint_length - 1)));
    for (auto& l : llr) l = scale * rng.normal();
    const auto fast = bcjr_decode(llr, t);
    const auto ref = oracle::brute_force_posteriors(llr, info, code.generators[0], code.generators[1],
                                                    code.constraint_length);
    for (std::size_t i = 0; i < llr.size(); ++i) worst = std::max(worst, std::abs(fast.p1[i] - ref.coded_p1[i]));
    for (std::size_t i = 0; i < ref.info_p1.size(); ++i)
      worst = std::max(worst, std::abs(fast.info_p1[i] - ref.info_p1[i]));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst < 1e-9 && secs < 30.0, fmt("max posterior difference %.2e over 200 instances, %.2f s", worst, secs)};
}

Outcome threshold_oracle() {
  Rng rng(3);
  long disagreements = 0, near_boundary = 0, kept = 0;
  const long n = 100000;
  for (long i = 0; i < n; ++i) {
    const double a2 = std::exp(-6.0 + 7.0 * rng.uniform());
    const double t2 = std::exp(-6.0 + 7.0 * rng.uniform());
    const double lam = rng.uniform();
    CVec x(1);
    x(0) = rng.complex_normal(a2 + t2 * rng.uniform());
    const double level = bg_threshold_level(a2, lam, t2);
    if (std::abs(std::norm(x(0)) - level) <= 1e-12) {
      ++near_boundary;
      continue;
    }
    const auto r = bg_threshold(x, a2, lam, t2);
    const bool zero_direct = oracle::spike_posterior(x(0), a2, lam, t2) >= 0.5;
    kept += r.beta[0];
    if ((r.beta[0] == 0) != zero_direct) ++disagreements;
  }
  return {disagreements == 0, fmt("%ld disagreements in %ld tuples (%ld kept, %ld on the boundary)", disagreements,
                                  n, kept, near_boundary)};
}

Outcome noise_split() {
  Rng rng(4);
  const Index dim = 8;
  const double sigma2 = 1.3;
  const int draws = 100000;
  double worst = 0.0;
  std::string detail;
  for (double rho : {0.25, 0.5, 0.9}) {
    CMat C = CMat::Zero(dim, dim);
    for (int d = 0; d < draws; ++d) {
      const auto z = draw_split_noise(dim, sigma2, rho, rng);
      CVec s(dim);
      for (Index k = 0; k < dim; ++k) s(k) = qpsk_map(rng.bit(), rng.bit());
      const CVec v = s.cwiseProduct(z.z1) + z.z2;
      C.noalias() += v * v.adjoint();
    }
    C /= static_cast<double>(draws);
    const double dev = (C - sigma2 * CMat::Identity(dim, dim)).cwiseAbs().maxCoeff() / sigma2;
    worst = std::max(worst, dev);
    detail += fmt("rho=%.2f: %.2f%% ", rho, 100.0 * dev);
  }
  return {worst <= 0.03, "max relative covariance deviation " + detail};
}

Outcome genie_contraction() {
  auto cfg = sparse_config({EstimatorId::kEmWav}, {6}, 10);
  const Session session(cfg);
  const double sigma2 = ebn0_to_sigma2(6.0, session.receiver().layout.stacked);
  EmConfig em;
  em.rho = 0.5;
  em.t_max = 8;
  double worst = 0.0;
  for (Index f = 0; f < 10; ++f) {
    const auto fr = session.make_frame(f, 0, sigma2);
    const auto r = em_wav_run(fr.obs, session.receiver(), em, genie_source(fr.obs));
    const CVec c = session.receiver().op.adjoint(matched_observation(fr.obs, SymbolPosteriors{fr.obs.S}));
    for (std::size_t t = 1; t < r.trajectory.size(); ++t) {
      const double ratio = (r.trajectory[t] - c).norm() / (r.trajectory[t - 1] - c).norm();
      worst = std::max(worst, std::abs(ratio - (1.0 - em.rho)));
    }
  }
  return {worst < 1e-9, fmt("max |ratio - (1 - rho)| = %.2e over 10 frames, 8 iterations", worst)};
}

Outcome mse_ordering() {
  const std::vector<EstimatorId> order = {EstimatorId::kEmMap, EstimatorId::kEmWav, EstimatorId::kEmFreq,
                                          EstimatorId::kPilotMl};
  auto cfg = sparse_config(order, {4, 8}, 500);
  const auto r = run_experiment(cfg);
  bool pass = true;
  std::string detail;
  for (std::size_t p = 0; p < cfg.ebn0_grid_db.size(); ++p) {
    detail += fmt("[%g dB]", cfg.ebn0_grid_db[p]);
    for (std::size_t e = 0; e < order.size(); ++e) {
      const auto s = stats(frame_mse(r, p, e));
      detail += fmt(" %s=%.3e+-%.1e", std::string(estimator_name(order[e])).c_str(), s.mean, s.se);
    }
    for (std::size_t e = 0; e + 1 < order.size(); ++e) {
      const auto a = stats(frame_mse(r, p, e)), b = stats(frame_mse(r, p, e + 1));
      std::vector<double> diff;
      const auto va = frame_mse(r, p, e), vb = frame_mse(r, p, e + 1);
      for (std::size_t f = 0; f < va.size(); ++f) diff.push_back(vb[f] - va[f]);
      const double se = std::sqrt(a.se * a.se + b.se * b.se);
      const double gap = b.mean - a.mean;
      const bool ok = gap >= 3.0 * se;
      pass = pass && ok;
      detail += fmt(" gap%zu=%.1fse(paired %.1fse)", e + 1, gap / se, gap / stats(diff).se);
    }
    detail += " ";
  }
  return {pass, detail};
}

Outcome map_vs_wav_gap() {
  auto cfg = sparse_config({EstimatorId::kEmWav, EstimatorId::kEmMap}, grid(0, 12, 2), 1000);
  const auto r = run_experiment(cfg);
  std::vector<double> wav, map;
  std::string detail;
  for (std::size_t p = 0; p < cfg.ebn0_grid_db.size(); ++p) {
    wav.push_back(stats(frame_mse(r, p, 0)).mean);
    map.push_back(stats(frame_mse(r, p, 1)).mean);
    detail += fmt("%g:%.2e/%.2e ", cfg.ebn0_grid_db[p], wav.back(), map.back());
  }
  const double x_wav = crossing(cfg.ebn0_grid_db, wav, 2e-3);
  const double x_map = crossing(cfg.ebn0_grid_db, map, 2e-3);
  const double gap = x_wav - x_map;
  return {std::isfinite(gap) && gap >= 2.5 && gap <= 5.5,
          fmt("gap at MSE 2e-3 = %.2f dB (em-wav %.2f dB, em-map %.2f dB); wav/map ", gap, x_wav, x_map) + detail};
}

Outcome parameter_reduction() {
  auto cfg = sparse_config({EstimatorId::kEmMap}, {8}, 500);
  cfg.em.t_max = 5;
  const auto r = run_experiment(cfg);
  const auto diag = diagnostic_rows(r);
  std::vector<double> active;
  for (const auto& d : diag) active.push_back(d.mean_active);
  bool monotone = active.size() == 6;
  std::string detail;
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (i > 0 && active[i] > active[i - 1]) monotone = false;
    detail += fmt("%.2f ", active[i]);
  }
  const double last = active.empty() ? 0.0 : active.back();
  return {monotone && last >= 20.0 && last <= 40.0,
          fmt("mean active at iteration 5 = %.2f; per iteration ", last) + detail};
}

Outcome ber_proximity() {
  const std::vector<EstimatorId> est = {EstimatorId::kPerfectCsi, EstimatorId::kEmMap, EstimatorId::kPilotMl};
  ExperimentConfig probe;
  const Index frames = (2000000 + probe.frame.payload_bits - 1) / probe.frame.payload_bits;
  auto cfg = sparse_config(est, grid(0, 14, 0.5), frames);
  const auto r = run_experiment(cfg);
  const auto rows = metric_rows(r);
  std::map<EstimatorId, std::vector<double>> ber;
  for (const auto& row : rows) ber[row.estimator].push_back(row.ber);
  const double x_pcsi = crossing(cfg.ebn0_grid_db, ber[EstimatorId::kPerfectCsi], 1e-3);
  const double x_map = crossing(cfg.ebn0_grid_db, ber[EstimatorId::kEmMap], 1e-3);
  const double x_ml = crossing(cfg.ebn0_grid_db, ber[EstimatorId::kPilotMl], 1e-3);
  const double pen_map = x_map - x_pcsi, pen_ml = x_ml - x_pcsi;
  const bool ok = std::isfinite(pen_map) && std::isfinite(pen_ml) && pen_map <= 0.7 && pen_ml >= 2.0;
  return {ok, fmt("BER 1e-3 at perfect-csi %.2f dB, em-map %.2f dB (penalty %.2f), pilot-ml %.2f dB (penalty %.2f); "
                  "%lld bits/point",
                  x_pcsi, x_map, pen_map, x_ml, pen_ml, static_cast<long long>(frames * probe.frame.payload_bits))};
}

Outcome nonsparse_channel() {
  auto cfg = sparse_config({EstimatorId::kEmWav, EstimatorId::kEmMap}, {8}, 500);
  cfg.channel_model = ChannelModel::kExponentialPdp;
  const auto r = run_experiment(cfg);
  const auto wav = stats(frame_mse(r, 0, 0)), map = stats(frame_mse(r, 0, 1));
  const auto diag = diagnostic_rows(r);
  double final_active = 0.0;
  for (const auto& d : diag)
    if (d.estimator == EstimatorId::kEmMap && d.iteration == cfg.em.t_max) final_active = d.mean_active;
  const double ratio = map.mean / wav.mean;
  const auto L = static_cast<double>(cfg.basis.length);
  return {ratio <= 1.2 && final_active < L,
          fmt("em-map/em-wav MSE ratio %.3f (%.3e vs %.3e), final mean active %.2f of %.0f", ratio, map.mean,
              wav.mean, final_active, L)};
}

Outcome determinism() {
  ExperimentConfig cfg;
  cfg.ebn0_grid_db = {4, 8};
  cfg.frames_per_point = 6;
  cfg.mmse_draws = 500;
  cfg.rng_seed = 99;
  cfg.threads = 1;
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  cfg.threads = 4;
  const auto c = run_experiment(cfg);
  auto csv = [](const ExperimentResult& r) {
    return metrics_csv(metric_rows(r)) + diagnostics_csv(diagnostic_rows(r));
  };
  const bool same_runs = csv(a) == csv(b);
  const bool same_threads = csv(a) == csv(c);
  return {same_runs && same_threads, fmt("repeat run %s, 1 vs 4 threads %s, %zu bytes compared",
                                         same_runs ? "identical" : "DIFFERENT",
                                         same_threads ? "identical" : "DIFFERENT", csv(a).size())};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"operator correctness", operator_correctness},
      {"BCJR matches brute force", bcjr_oracle},
      {"threshold rule matches posterior", threshold_oracle},
      {"noise split covariance", noise_split},
      {"genie contraction", genie_contraction},
      {"MSE ordering", mse_ordering},
      {"EM-MAP vs EM-Wav gap", map_vs_wav_gap},
      {"parameter reduction", parameter_reduction},
      {"BER proximity to perfect CSI", ber_proximity},
      {"non-sparse channel", nonsparse_channel},
      {"determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << id << ". " << criteria[i].first << ": " << o.detail
              << fmt(" [%.1f s]", secs) << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
