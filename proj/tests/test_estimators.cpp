#include "oracles.hpp"
#include "test_util.hpp"
#include "uwbem/channels.hpp"
#include "uwbem/error.hpp"
#include "uwbem/estimators.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace uwbem;

namespace {

FrameConfig small_frame() {
  FrameConfig cfg;
  cfg.payload_bits = 400;
  return cfg;
}

struct Setup {
  Receiver rx{make_layout(small_frame(), CodeConfig{}), WaveletBasis{}};
  ChannelRealization ch;
  TxFrame tx;
  FrameObservation obs;

  Setup(std::uint64_t seed, double sigma2) {
    Rng rng(seed);
    ch = gen_sparse_wavelet_channel(rx.op, 20, rng);
    tx = build_frame(random_bits(rx.layout.payload_bits, rng), rx.layout);
    obs = apply_channel(tx.obs, ch.H_freq, sigma2, rng);
  }
};

SymbolSource zero_source(const FrameObservation& frame) {
  return [&frame](const CVec&) {
    return Feedback{SymbolPosteriors{CMat::Zero(frame.S.rows(), frame.S.cols())}, {}};
  };
}

}  // namespace

TEST_CASE("pilot ML") {
  Rng rng(1);
  SUBCASE("noiseless") {
    const Setup s(2, 1e-300);
    CHECK((pilot_ml(s.obs) - s.ch.H_freq).norm() < 1e-12);
  }
  SUBCASE("zero channel") {
    const Setup s(3, 1.0);
    const auto obs = apply_channel(s.tx.obs, CVec::Zero(s.rx.layout.stacked), 1e-300, rng);
    CHECK(pilot_ml(obs).norm() < 1e-100);
  }
  SUBCASE("error energy is M sigma2") {
    const Setup s(4, 0.01);
    double acc = 0.0;
    const int draws = 400;
    for (int i = 0; i < draws; ++i) {
      const auto obs = apply_channel(s.tx.obs, s.ch.H_freq, 0.01, rng);
      acc += (pilot_ml(obs) - s.ch.H_freq).squaredNorm();
    }
    const double expected = 384 * 0.01;
    CHECK(std::abs(acc / draws / expected - 1.0) < 0.05);
  }
  SUBCASE("shape errors") {
    CHECK_THROWS_AS(pilot_ml(CMat::Zero(4, 1), CMat::Zero(3, 1)), Error);
    CHECK_THROWS_AS(pilot_ml(CMat::Zero(4, 0), CMat::Zero(4, 0)), Error);
  }
}

TEST_CASE("pilot MMSE") {
  Rng rng(5);
  const Index M = 12;
  CMat A(M, M);
  for (Index i = 0; i < M; ++i)
    for (Index j = 0; j < M; ++j) A(i, j) = rng.complex_normal(1.0);
  const CMat R = A * A.adjoint() / static_cast<double>(M);
  const CVec H = test::random_cvec(M, rng);

  SUBCASE("vanishing noise reproduces ML") {
    const PilotMmse f(R, 1e-12);
    CHECK((f.apply(H) - H).norm() < 1e-6 * H.norm());
  }
  SUBCASE("zero covariance gives zero") {
    const PilotMmse f(CMat::Zero(M, M), 1.0);
    CHECK(f.apply(H).norm() == 0.0);
  }
  SUBCASE("scalar Wiener gain") {
    CMat r(1, 1);
    r(0, 0) = 2.0;
    const PilotMmse f(r, 2.0);
    CHECK(std::abs(f.filter()(0, 0) - Complex(0.5)) < 1e-15);
    const PilotMmse f3(r, 2.0, 3);
    CHECK(std::abs(f3.filter()(0, 0) - Complex(0.75)) < 1e-15);
  }
  SUBCASE("free function uses the pilot column count") {
    CMat Y = CMat::Constant(1, 2, Complex(1.0));
    CMat S = CMat::Constant(1, 2, Complex(1.0));
    CMat r(1, 1);
    r(0, 0) = 1.0;
    const CVec h = pilot_mmse(Y, S, r, 2.0);
    CHECK(std::abs(h(0) - Complex(0.5)) < 1e-15);
  }
  SUBCASE("invalid covariance") {
    CMat bad = CMat::Identity(3, 3);
    bad(0, 0) = -1.0;
    CHECK_THROWS_AS(PilotMmse(bad, 1.0), Error);
    CMat skew = CMat::Identity(3, 3);
    skew(0, 1) = 1.0;
    CHECK_THROWS_AS(PilotMmse(skew, 1.0), Error);
    CHECK_THROWS_AS(PilotMmse(CMat::Identity(2, 3), 1.0), Error);
    CHECK_THROWS_AS(PilotMmse(R, 0.0), Error);
  }
}

TEST_CASE("EM initialisation") {
  const Setup s(6, 1e-300);
  SUBCASE("noiseless pilots give the true coefficients") {
    const auto st = em_init(s.ch.H_freq, s.rx.op, 1e-3, 0.5, 1e-3, 4);
    CHECK((st.g - s.ch.g_true).norm() < 1e-12);
    CHECK(st.active.size() == 96);
    CHECK(st.alpha2 == doctest::Approx(5e-4));
    CHECK(st.t == 0);
    CHECK(st.lambda >= 0.0);
    CHECK(st.lambda <= 1.0);
  }
  SUBCASE("zero pilot estimate") {
    const auto st = em_init(CVec::Zero(384), s.rx.op, 0.1, 0.5, 0.1, 4);
    CHECK(st.g.norm() == 0.0);
    CHECK(st.tau2 > 0.0);
  }
  SUBCASE("projection is an isometry on the range") {
    const auto st = em_init(s.ch.H_freq, s.rx.op, 0.1, 0.5, 0.1, 4);
    CHECK(st.g.norm() == doctest::Approx(s.ch.H_freq.norm()).epsilon(1e-12));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(em_init(CVec::Zero(10), s.rx.op, 0.1, 0.5, 0.1, 4), Error);
    CHECK_THROWS_AS(em_init(s.ch.H_freq, s.rx.op, 0.1, 0.0, 0.1, 4), Error);
    CHECK_THROWS_AS(em_init(s.ch.H_freq, s.rx.op, 0.0, 0.5, 0.1, 4), Error);
  }
}

TEST_CASE("E-step") {
  SUBCASE("genie fixed point") {
    const Setup s(7, 1e-300);
    auto st = em_init(s.ch.H_freq, s.rx.op, 1e-3, 0.5, 1e-3, 4);
    const CVec gt = em_e_step(st, s.obs, SymbolPosteriors{s.obs.S}, s.rx.op);
    CHECK((gt - s.ch.g_true).norm() < 1e-12);
  }
  SUBCASE("zero posteriors contract towards zero") {
    const Setup s(8, 0.1);
    auto st = em_init(pilot_ml(s.obs), s.rx.op, 0.1, 0.3, 0.1, 4);
    const CVec gt = em_e_step(st, s.obs, SymbolPosteriors{CMat::Zero(384, s.obs.S.cols())}, s.rx.op);
    CHECK((gt - 0.7 * st.g).norm() < 1e-14);
  }
  SUBCASE("rho one discards the previous estimate") {
    const Setup s(9, 0.1);
    auto st = em_init(pilot_ml(s.obs), s.rx.op, 0.1, 1.0, 0.1, 4);
    const CVec gt = em_e_step(st, s.obs, SymbolPosteriors{s.obs.S}, s.rx.op);
    const CVec ref = s.rx.op.adjoint(matched_observation(s.obs, SymbolPosteriors{s.obs.S}));
    CHECK((gt - ref).norm() < 1e-14);
  }
  SUBCASE("active set mismatch") {
    const Setup s(10, 0.1);
    auto st = em_init(pilot_ml(s.obs), s.rx.op, 0.1, 0.5, 0.1, 4);
    const Operator small = s.rx.op.restrict_columns({0, 1, 2});
    CHECK_THROWS_AS(em_e_step(st, s.obs, SymbolPosteriors{s.obs.S}, small), Error);
  }
}

TEST_CASE("noise split") {
  Rng rng(11);
  const auto n = draw_split_noise(20000, 2.0, 0.25, rng);
  CHECK(n.z1.squaredNorm() / 20000 == doctest::Approx(0.5).epsilon(0.05));
  CHECK(n.z2.squaredNorm() / 20000 == doctest::Approx(1.5).epsilon(0.05));
  const auto one = draw_split_noise(10, 1.0, 1.0, rng);
  CHECK(one.z2.norm() == 0.0);
  CHECK_THROWS_AS(draw_split_noise(4, 1.0, 0.0, rng), Error);
}

TEST_CASE("Bernoulli-Gaussian threshold") {
  CVec x(4);
  x << Complex(1.0), Complex(2.0), Complex(0.0, -2.0), Complex(0.1);

  SUBCASE("worked example") {
    CHECK(bg_threshold_level(1.0, 0.5, 3.0) == doctest::Approx(1.8483924814931874).epsilon(1e-14));
    const auto r = bg_threshold(x, 1.0, 0.5, 3.0);
    CHECK(r.beta == std::vector<std::uint8_t>{0, 1, 1, 0});
    CHECK(r.g(0) == Complex(0.0));
    CHECK(std::abs(r.g(1) - Complex(1.5)) < 1e-15);
    CHECK(std::abs(r.g(2) - Complex(0.0, -1.5)) < 1e-15);
    CHECK_FALSE(r.degenerate_prior);
  }
  SUBCASE("lambda zero keeps everything") {
    const auto r = bg_threshold(x, 1.0, 0.0, 3.0);
    CHECK(r.beta == std::vector<std::uint8_t>{1, 1, 1, 1});
    CHECK((r.g - 0.75 * x).norm() < 1e-15);
  }
  SUBCASE("lambda one prunes everything") {
    const auto r = bg_threshold(x * 1e6, 1.0, 1.0, 3.0);
    CHECK(r.g.norm() == 0.0);
    CHECK(r.beta == std::vector<std::uint8_t>(4, 0));
  }
  SUBCASE("collapsed slab") {
    const auto r = bg_threshold(x, 1.0, 0.5, 0.0);
    CHECK(r.degenerate_prior);
    CHECK(r.g.norm() == 0.0);
  }
  SUBCASE("shrinkage never grows a coefficient and agrees with the posterior") {
    Rng rng(12);
    for (int i = 0; i < 2000; ++i) {
      const double a2 = 0.01 + rng.uniform(), t2 = 0.01 + 3 * rng.uniform(), lam = rng.uniform();
      CVec v(1);
      v(0) = rng.complex_normal(2.0);
      const auto r = bg_threshold(v, a2, lam, t2);
      REQUIRE(std::abs(r.g(0)) <= std::abs(v(0)));
      const double p0 = oracle::spike_posterior(v(0), a2, lam, t2);
      if (std::abs(p0 - 0.5) > 1e-9) REQUIRE((r.beta[0] == 0) == (p0 > 0.5));
    }
  }
  SUBCASE("argument checks") {
    CHECK_THROWS_AS(bg_threshold(x, 0.0, 0.5, 1.0), Error);
    CHECK_THROWS_AS(bg_threshold(x, 1.0, 1.5, 1.0), Error);
    CHECK_THROWS_AS(bg_threshold(x, 1.0, 0.5, -1.0), Error);
  }
}

TEST_CASE("hyperparameter updates") {
  SUBCASE("twenty significant of ninety-six") {
    std::vector<std::uint8_t> beta(96, 0);
    CVec g = CVec::Zero(96);
    for (int j = 0; j < 20; ++j) {
      beta[static_cast<std::size_t>(j)] = 1;
      g(j) = std::sqrt(0.045);
    }
    const auto h = update_hyperparams(beta, g, 96);
    REQUIRE(h);
    CHECK(h->lambda == doctest::Approx(75.5 / 95).epsilon(1e-14));
    CHECK(h->tau2 == doctest::Approx(0.045).epsilon(1e-14));
  }
  SUBCASE("fixed length counts discarded coefficients as zeros") {
    std::vector<std::uint8_t> beta(20, 1);
    const CVec g = CVec::Constant(20, Complex(1.0));
    const auto h = update_hyperparams(beta, g, 96);
    REQUIRE(h);
    CHECK(h->lambda == doctest::Approx(75.5 / 95).epsilon(1e-14));
    CHECK(h->tau2 == doctest::Approx(1.0));
  }
  SUBCASE("no zeros clamps lambda at zero") {
    const auto h = update_hyperparams(std::vector<std::uint8_t>(10, 1), CVec::Constant(10, Complex(2.0)), 10);
    REQUIRE(h);
    CHECK(h->lambda == 0.0);
    CHECK(h->tau2 == doctest::Approx(4.0));
  }
  SUBCASE("everything pruned") {
    CHECK_FALSE(update_hyperparams(std::vector<std::uint8_t>(10, 0), CVec::Zero(10), 10).has_value());
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(update_hyperparams(std::vector<std::uint8_t>(3, 1), CVec::Zero(4), 4), Error);
    CHECK_THROWS_AS(update_hyperparams(std::vector<std::uint8_t>(4, 1), CVec::Zero(4), 3), Error);
  }
}

TEST_CASE("truncation") {
  const Setup s(13, 0.1);
  auto base = em_init(pilot_ml(s.obs), s.rx.op, 0.1, 0.5, 0.1, 4);
  base.t = 1;

  SUBCASE("all significant keeps all columns") {
    auto st = base;
    Operator op = s.rx.op;
    CHECK(truncate(st, op, std::vector<std::uint8_t>(96, 1)));
    CHECK(st.active.size() == 96);
    CHECK(op.cols() == 96);
  }
  SUBCASE("twenty survivors") {
    auto st = base;
    Operator op = s.rx.op;
    std::vector<std::uint8_t> beta(96, 0);
    for (int j = 0; j < 96; j += 5) beta[static_cast<std::size_t>(j)] = 1;
    REQUIRE(truncate(st, op, beta));
    CHECK(st.active.size() == 20);
    CHECK(op.cols() == 20);
    const CVec full = expand_full(st, 96);
    Index zeros = 0;
    for (Index j = 0; j < 96; ++j) zeros += full(j) == Complex(0.0) ? 1 : 0;
    CHECK(zeros == 76);
    CHECK((op.apply(st.g) - s.rx.op.apply(full)).norm() < 1e-12);

    const auto before = st.active;
    CHECK(truncate(st, op, std::vector<std::uint8_t>(20, 1)));
    CHECK(st.active == before);
  }
  SUBCASE("first M-step never truncates") {
    auto st = base;
    st.t = 0;
    Operator op = s.rx.op;
    CHECK(truncate(st, op, std::vector<std::uint8_t>(96, 0)));
    CHECK(st.active.size() == 96);
  }
  SUBCASE("empty survivor set leaves the state untouched") {
    auto st = base;
    Operator op = s.rx.op;
    CHECK_FALSE(truncate(st, op, std::vector<std::uint8_t>(96, 0)));
    CHECK(st.active.size() == 96);
  }
}

TEST_CASE("EM-MAP receiver") {
  SUBCASE("noiseless genie run stays at the truth") {
    const Setup s(14, 1e-12);
    EmConfig cfg;
    cfg.fixed_prior = Hyperparams{0.0, 1e300};
    const CVec g = s.ch.g_true, H = s.ch.H_freq;
    const auto r = em_map_run(s.obs, s.rx, cfg, genie_source(s.obs), Truth{&g, &H});
    CHECK(r.trace.size() == 5);
    for (const auto& rec : r.trace) CHECK(rec.mse < 1e-9);
    CHECK(r.decoded == s.tx.payload);
  }
  SUBCASE("single iteration") {
    const Setup s(15, 0.02);
    EmConfig cfg;
    cfg.t_max = 1;
    const auto r = em_map_run(s.obs, s.rx, cfg);
    CHECK(r.trace.size() == 2);
    CHECK(r.trace[1].active == 96);
  }
  SUBCASE("equivalent to EM-Wav with a flat prior and no truncation") {
    const Setup s(16, 0.05);
    EmConfig cfg;
    cfg.truncation = false;
    cfg.fixed_prior = Hyperparams{0.0, 1e300};
    const auto a = em_map_run(s.obs, s.rx, cfg);
    const auto b = em_wav_run(s.obs, s.rx, cfg);
    REQUIRE(a.trajectory.size() == b.trajectory.size());
    for (std::size_t t = 0; t < a.trajectory.size(); ++t) CHECK((a.trajectory[t] - b.trajectory[t]).norm() < 1e-12);
    CHECK(a.decoded == b.decoded);
  }
  SUBCASE("active set shrinks monotonically") {
    for (std::uint64_t seed = 20; seed < 25; ++seed) {
      const Setup s(seed, 0.01);
      EmConfig cfg;
      cfg.t_max = 6;
      const auto r = em_map_run(s.obs, s.rx, cfg);
      REQUIRE_FALSE(r.trace.empty());
      for (std::size_t t = 1; t < r.trace.size(); ++t) CHECK(r.trace[t].active <= r.trace[t - 1].active);
      CHECK(r.trace.back().active < 96);
    }
  }
  SUBCASE("configuration checks") {
    const Setup s(17, 0.05);
    EmConfig cfg;
    cfg.t_max = 0;
    CHECK_THROWS_AS(em_map_run(s.obs, s.rx, cfg), Error);
    cfg.t_max = 2;
    cfg.rho = 1.5;
    CHECK_THROWS_AS(em_map_run(s.obs, s.rx, cfg), Error);
  }
}

TEST_CASE("EM-Wav receiver") {
  const Setup s(18, 0.05);
  const CVec c = s.rx.op.adjoint(matched_observation(s.obs, SymbolPosteriors{s.obs.S}));
  SUBCASE("genie iterations contract geometrically") {
    EmConfig cfg;
    cfg.t_max = 6;
    const auto r = em_wav_run(s.obs, s.rx, cfg, genie_source(s.obs));
    const CVec d0 = r.trajectory[0] - c;
    for (std::size_t t = 1; t < r.trajectory.size(); ++t) {
      const CVec expected = std::pow(0.5, static_cast<double>(t)) * d0;
      CHECK(((r.trajectory[t] - c) - expected).norm() < 1e-12);
    }
  }
  SUBCASE("rho one lands on the fixed point at once") {
    EmConfig cfg;
    cfg.rho = 1.0;
    cfg.t_max = 3;
    const auto r = em_wav_run(s.obs, s.rx, cfg, genie_source(s.obs));
    for (std::size_t t = 1; t < r.trajectory.size(); ++t) CHECK((r.trajectory[t] - c).norm() < 1e-12);
  }
}

TEST_CASE("EM-Freq receiver") {
  const Setup s(19, 0.05);
  SUBCASE("genie run maps onto EM-Wav through the operator") {
    EmConfig cfg;
    cfg.t_max = 4;
    const auto f = em_freq_run(s.obs, s.rx, cfg, genie_source(s.obs));
    const auto w = em_wav_run(s.obs, s.rx, cfg, genie_source(s.obs));
    REQUIRE(f.trajectory.size() == w.trajectory.size());
    for (std::size_t t = 0; t < f.trajectory.size(); ++t)
      CHECK((s.rx.op.adjoint(f.trajectory[t]) - w.trajectory[t]).norm() < 1e-12);
  }
  SUBCASE("zero feedback decays geometrically") {
    EmConfig cfg;
    cfg.rho = 0.25;
    cfg.t_max = 5;
    const auto r = em_freq_run(s.obs, s.rx, cfg, zero_source(s.obs));
    for (std::size_t t = 0; t < r.trajectory.size(); ++t) {
      const CVec expected = std::pow(0.75, static_cast<double>(t)) * r.trajectory[0];
      CHECK((r.trajectory[t] - expected).norm() < 1e-13);
      CHECK(std::isnan(r.trace[t].lambda));
      CHECK(r.trace[t].active == 384);
    }
  }
  SUBCASE("noiseless genie run recovers the channel") {
    const Setup q(21, 1e-12);
    EmConfig cfg;
    const CVec H = q.ch.H_freq;
    const auto r = em_freq_run(q.obs, q.rx, cfg, genie_source(q.obs), Truth{nullptr, &H});
    CHECK(r.trace.back().mse < 1e-9);
    CHECK(r.decoded == q.tx.payload);
  }
}
