#include "selftest.hpp"

#include "oracles.hpp"
#include "uwbem/estimators.hpp"
#include "uwbem/phy.hpp"
#include "uwbem/rng.hpp"
#include "uwbem/siso.hpp"
#include "uwbem/transforms.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace uwbem {
namespace {

struct Check {
  std::string name;
  std::function<bool()> run;
};

bool operator_isometry() {
  for (auto [n, L] : {std::pair<Index, Index>{32, 24}, {128, 96}}) {
    WaveletBasis b;
    b.length = L;
    b.levels = 3;
    const Operator op = make_operator(3 * n, b);
    const CMat gram = op.matrix().adjoint() * op.matrix();
    if ((gram - CMat::Identity(L, L)).cwiseAbs().maxCoeff() > 1e-10) return false;
  }
  return true;
}

bool bcjr_matches_enumeration() {
  Rng rng(11);
  const CodeConfig code;
  const Trellis t = make_trellis(code);
  for (int trial = 0; trial < 20; ++trial) {
    const int info = 1 + static_cast<int>(rng.below(10));
    std::vector<double> llr(static_cast<std::size_t>(2 * (info + 2)));
    for (auto& l : llr) l = 3.0 * rng.normal();
    const auto fast = bcjr_decode(llr, t);
    const auto ref = oracle::brute_force_posteriors(llr, info, code.generators[0], code.generators[1], 3);
    for (std::size_t i = 0; i < llr.size(); ++i) {
      if (std::abs(fast.p1[i] - ref.coded_p1[i]) > 1e-9) return false;
    }
    for (std::size_t i = 0; i < ref.info_p1.size(); ++i) {
      if (std::abs(fast.info_p1[i] - ref.info_p1[i]) > 1e-9) return false;
    }
  }
  return true;
}

bool encoder_matches_convolution() {
  Rng rng(5);
  const CodeConfig code;
  for (int trial = 0; trial < 50; ++trial) {
    const Bits u = random_bits(1 + static_cast<Index>(rng.below(64)), rng);
    if (conv_encode(u, code) != oracle::convolve_encode(u, code.generators[0], code.generators[1], 3)) return false;
  }
  return true;
}

bool demapper_closed_form() {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const Complex y = rng.complex_normal(1.0), h = rng.complex_normal(1.0);
    const double nv = 0.05 + rng.uniform();
    const auto a = soft_demap(y, h, nv);
    const auto b = oracle::generic_demap(y, h, nv);
    if (std::abs(a[0] - b[0]) > 1e-9 || std::abs(a[1] - b[1]) > 1e-9) return false;
  }
  return true;
}

bool threshold_equivalence() {
  Rng rng(13);
  for (int trial = 0; trial < 10000; ++trial) {
    const double alpha2 = 0.01 + rng.uniform(), tau2 = 0.01 + 3.0 * rng.uniform();
    const double lambda = 0.01 + 0.98 * rng.uniform();
    CVec x(1);
    x(0) = rng.complex_normal(alpha2 + tau2 * rng.uniform());
    const double p0 = oracle::spike_posterior(x(0), alpha2, lambda, tau2);
    if (std::abs(p0 - 0.5) < 1e-9) continue;
    const bool zero = bg_threshold(x, alpha2, lambda, tau2).beta[0] == 0;
    if (zero != (p0 >= 0.5)) return false;
  }
  return true;
}

}  // namespace

int run_selftest(std::ostream& out) {
  const Check checks[] = {
      {"operator_isometry", operator_isometry},
      {"encoder_vs_convolution", encoder_matches_convolution},
      {"bcjr_vs_enumeration", bcjr_matches_enumeration},
      {"demapper_closed_form", demapper_closed_form},
      {"threshold_vs_posterior", threshold_equivalence},
  };
  int failed = 0;
  for (const auto& c : checks) {
    bool ok = false;
    try {
      ok = c.run();
    } catch (const std::exception& e) {
      out << "exception in " << c.name << ": " << e.what() << '\n';
    }
    out << (ok ? "PASS " : "FAIL ") << c.name << '\n';
    failed += ok ? 0 : 1;
  }
  return failed;
}

}  // namespace uwbem
