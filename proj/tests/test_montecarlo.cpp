/** Tests for the random streams and Monte Carlo estimators. */
#include "doctest.h"

#include <cmath>
#include <complex>
#include <set>
#include <stdexcept>
#include <vector>

#include "isac/montecarlo.hpp"
#include "isac/rng.hpp"

using isac::cd;
using isac::kPi;

namespace {

isac::SystemConfig mc_scene_config() {
  isac::SystemConfig cfg;
  cfg.n_tx = 8;
  cfg.n_rx = 32;
  cfg.n_users = 2;
  cfg.comm_noise_powers = {0.05, 0.05};
  cfg.radar_snr = 2.0;
  cfg.clutter_angles = {-0.8, 0.5};
  cfg.clutter_cnrs = {10.0, 10.0};
  return cfg;
}

}  // namespace

TEST_CASE("substreams are deterministic and keyed apart") {
  isac::rng::Substream a(1, isac::rng::Stream::Probe, 3);
  isac::rng::Substream b(1, isac::rng::Stream::Probe, 3);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  isac::rng::Substream c(1, isac::rng::Stream::Probe, 4);
  isac::rng::Substream d(2, isac::rng::Stream::Probe, 3);
  isac::rng::Substream e(1, isac::rng::Stream::Symbols, 3);
  isac::rng::Substream base(1, isac::rng::Stream::Probe, 3);
  std::set<std::uint64_t> firsts;
  firsts.insert(base.next_u64());
  firsts.insert(c.next_u64());
  firsts.insert(d.next_u64());
  firsts.insert(e.next_u64());
  CHECK(firsts.size() == 4);  // all keys produce distinct openings
}

TEST_CASE("uniform and gaussian draws have the advertised moments") {
  isac::rng::Substream s(7, isac::rng::Stream::Probe);
  const int n = 200000;
  double su = 0.0, sg = 0.0, sg2 = 0.0, sc2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    su += u;
    const double g = s.gauss();
    sg += g;
    sg2 += g * g;
    sc2 += std::norm(s.cgauss(3.0));
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sg / n == doctest::Approx(0.0).scale(1.0).epsilon(0.01));
  CHECK(sg2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(sc2 / n == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("estimators refuse too few trials") {
  isac::SystemConfig cfg = mc_scene_config();
  const isac::RadarScene scene = isac::make_radar_scene(cfg);
  const isac::VecXc x =
      isac::quantize_dac(scene.target.g_tx.conjugate(), cfg.power_budget);
  const isac::VecXc f =
      isac::receive_filter(x, scene, cfg, isac::AdcMode::OneBit);
  isac::McConfig mc;
  mc.n_trials = 999;
  CHECK_THROWS_AS(isac::mc_qscnr(f, x, scene, cfg, mc), std::invalid_argument);
  CHECK_THROWS_AS(isac::mc_roc(f, x, scene, cfg, mc, {0.1}),
                  std::invalid_argument);
}

TEST_CASE("estimates do not depend on the batching hint") {
  isac::SystemConfig cfg = mc_scene_config();
  const isac::RadarScene scene = isac::make_radar_scene(cfg);
  const isac::VecXc x =
      isac::quantize_dac(scene.target.g_tx.conjugate(), cfg.power_budget);
  const isac::VecXc f =
      isac::receive_filter(x, scene, cfg, isac::AdcMode::OneBit);
  isac::McConfig mc1, mc2;
  mc1.n_trials = mc2.n_trials = 2000;
  mc1.batch = 64;
  mc2.batch = 999;
  const auto r1 = isac::mc_qscnr(f, x, scene, cfg, mc1);
  const auto r2 = isac::mc_qscnr(f, x, scene, cfg, mc2);
  CHECK(r1.qscnr.value == r2.qscnr.value);
  CHECK(r1.var_h0 == r2.var_h0);
  CHECK(r1.var_h1 == r2.var_h1);
}

TEST_CASE("ideal-chain variances match the exact gaussian formulas") {
  // With no quantizer in the receive path the statistic is exactly Gaussian,
  // so the closed-form variances are exact at any array size and the sample
  // variances must agree within sampling error.
  isac::SystemConfig cfg = mc_scene_config();
  const isac::RadarScene scene = isac::make_radar_scene(cfg);
  std::vector<isac::VecXc> xs;
  xs.push_back(
      isac::quantize_dac(scene.target.g_tx.conjugate(), cfg.power_budget));
  {
    isac::rng::Substream s(5, isac::rng::Stream::Probe);
    isac::VecXc x(cfg.n_tx);
    for (int i = 0; i < cfg.n_tx; ++i) x(i) = s.cgauss(1.0);
    x *= std::sqrt(cfg.power_budget) / x.norm();
    xs.push_back(x);
  }
  for (const auto& x : xs) {
    const isac::VecXc f =
        isac::receive_filter(x, scene, cfg, isac::AdcMode::Infinite);
    const auto vc = isac::variance_components(f, x, scene, cfg,
                                              isac::AdcMode::Infinite);
    isac::McConfig mc;
    mc.n_trials = 40000;
    mc.seed = 9;
    const auto res =
        isac::mc_qscnr(f, x, scene, cfg, mc, isac::AdcMode::Infinite);
    CHECK(std::abs(res.var_h0 - vc.var0) <= 4.0 * res.var_h0_stderr);
    CHECK(std::abs(res.var_h1 - vc.var1) <= 4.0 * res.var_h1_stderr);
    const double scnr = isac::scnr_infinite_bit(f, x, scene, cfg);
    CHECK(std::abs(res.qscnr.value - scnr) <= 4.0 * res.qscnr.std_error);
  }
}

TEST_CASE("one-bit variances approach the asymptotic formulas on a large array") {
  // The 1-bit variance formulas are asymptotic in the array size; keep the
  // per-antenna interference ratios small so the bias sits well inside the
  // Monte Carlo error bars.
  isac::SystemConfig cfg = mc_scene_config();
  cfg.n_rx = 256;
  cfg.radar_snr = 3.0;
  cfg.clutter_cnrs = {10.0, 10.0};
  const isac::RadarScene scene = isac::make_radar_scene(cfg);
  const isac::VecXc x =
      isac::quantize_dac(scene.target.g_tx.conjugate(), cfg.power_budget);
  const isac::VecXc f =
      isac::receive_filter(x, scene, cfg, isac::AdcMode::OneBit);
  const auto vc =
      isac::variance_components(f, x, scene, cfg, isac::AdcMode::OneBit);
  isac::McConfig mc;
  mc.n_trials = 30000;
  mc.seed = 13;
  const auto res = isac::mc_qscnr(f, x, scene, cfg, mc, isac::AdcMode::OneBit);
  CHECK(std::abs(res.var_h0 - vc.var0) <= 4.0 * res.var_h0_stderr);
  CHECK(std::abs(res.var_h1 - vc.var1) <= 4.0 * res.var_h1_stderr);
  const double q = isac::qscnr(f, x, scene, cfg);
  CHECK(std::abs(res.qscnr.value - q) <= 4.0 * res.qscnr.std_error);
}

TEST_CASE("detector calibration holds exactly for the ideal chain") {
  isac::SystemConfig cfg = mc_scene_config();
  const isac::RadarScene scene = isac::make_radar_scene(cfg);
  const isac::VecXc x =
      isac::quantize_dac(scene.target.g_tx.conjugate(), cfg.power_budget);
  const isac::VecXc f =
      isac::receive_filter(x, scene, cfg, isac::AdcMode::Infinite);
  isac::McConfig mc;
  mc.n_trials = 40000;
  mc.seed = 17;
  const std::vector<double> deltas = {0.05, 0.15, 0.4};
  const auto roc =
      isac::mc_roc(f, x, scene, cfg, mc, deltas, isac::AdcMode::Infinite);
  REQUIRE(roc.size() == deltas.size());
  double prev_pfa = 0.0, prev_pd = 0.0, prev_thr = 1e300;
  for (std::size_t i = 0; i < roc.size(); ++i) {
    const auto& pt = roc[i];
    CHECK(pt.delta == deltas[i]);
    const double sigma =
        std::sqrt(pt.delta * (1.0 - pt.delta) / mc.n_trials);
    CHECK(std::abs(pt.pfa.value - pt.delta) <= 4.0 * sigma);
    CHECK(std::abs(pt.pd.value - pt.pd_model) <=
          4.0 * std::max(pt.pd.std_error, 1e-6));
    CHECK(pt.pfa.value > prev_pfa);
    CHECK(pt.pd.value > prev_pd);
    CHECK(pt.threshold < prev_thr);
    prev_pfa = pt.pfa.value;
    prev_pd = pt.pd.value;
    prev_thr = pt.threshold;
  }
}

TEST_CASE("symbol design batches are deterministic and feasible") {
  isac::SystemConfig cfg = mc_scene_config();
  cfg.n_tx = 6;
  isac::DesignProblem base = isac::make_design_problem(cfg);
  base.gammas = {0.3, 0.3};
  const auto b1 = isac::design_symbol_batch(base, 8, 99);
  const auto b2 = isac::design_symbol_batch(base, 8, 99);
  CHECK(b1.n_requested == 8);
  REQUIRE(b1.designs.size() == b2.designs.size());
  REQUIRE(b1.symbols.size() == b1.designs.size());
  CHECK(b1.n_infeasible == b2.n_infeasible);
  for (std::size_t d = 0; d < b1.designs.size(); ++d) {
    CHECK((b1.designs[d].x - b2.designs[d].x).norm() == 0.0);
    CHECK(b1.symbols[d] == b2.symbols[d]);
    for (int v : b1.symbols[d]) {
      CHECK(v >= 0);
      CHECK(v < cfg.modulation_order);
    }
  }

  // alpha_min is the worst margin over every design and user.
  const isac::Constellation con = isac::psk_constellation(cfg.modulation_order);
  double worst = 1e300;
  for (std::size_t d = 0; d < b1.designs.size(); ++d) {
    for (int u = 0; u < cfg.n_users; ++u) {
      const double alpha = isac::safe_margin(
          base.comm_channels.row(u).transpose(), b1.designs[d].x,
          con.points(b1.symbols[d][u]), cfg.modulation_order);
      worst = std::min(worst, alpha);
    }
  }
  CHECK(b1.alpha_min == doctest::Approx(worst).epsilon(1e-9));
}

TEST_CASE("bit errors and symbol errors keep the gray-coding relation") {
  isac::SystemConfig cfg = mc_scene_config();
  cfg.n_tx = 6;
  // Noise comparable to the link margin so errors are common enough to
  // measure but not saturated.
  cfg.comm_noise_powers = {0.3, 0.3};
  isac::DesignProblem base = isac::make_design_problem(cfg);
  base.gammas = {0.3, 0.3};
  isac::McConfig mc;
  mc.n_trials = 20000;
  mc.seed = 23;
  const auto res = isac::mc_ber(base, mc, 10);
  REQUIRE(res.n_designs > 0);
  CHECK(res.n_noise >= 500);
  CHECK(res.sep.value > 0.0);
  CHECK(res.sep.value < 1.0);
  const double bits = std::log2(cfg.modulation_order);
  CHECK(res.ber.value <= res.sep.value + 1e-12);
  CHECK(res.sep.value <= bits * res.ber.value + 1e-12);
  CHECK(res.bounds_at_alpha_min.lower <= res.bounds_at_alpha_min.upper_clamped);
  CHECK(res.alpha_min > 0.0);

  // Identical configuration, identical estimates.
  const auto res2 = isac::mc_ber(base, mc, 10);
  CHECK(res.ber.value == res2.ber.value);
  CHECK(res.sep.value == res2.sep.value);
}

TEST_CASE("a quiet link makes almost no symbol errors") {
  isac::SystemConfig cfg = mc_scene_config();
  cfg.n_tx = 6;
  cfg.comm_noise_powers = {1e-6, 1e-6};
  isac::DesignProblem base = isac::make_design_problem(cfg);
  base.gammas = {0.5, 0.5};
  isac::McConfig mc;
  mc.n_trials = 5000;
  mc.seed = 29;
  const auto res = isac::mc_ber(base, mc, 5);
  REQUIRE(res.n_designs > 0);
  CHECK(res.sep.value <= 1e-3);
}
