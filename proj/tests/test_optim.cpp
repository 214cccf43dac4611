/** Tests for the complex-to-real lifting and the minorization chain. */
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "isac/model.hpp"
#include "isac/radar.hpp"
#include "isac/realify.hpp"
#include "isac/surrogate.hpp"

using isac::cd;

namespace {

isac::VecXc random_vec(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  isac::VecXc v(n);
  for (int i = 0; i < n; ++i) v(i) = cd(g(rng), g(rng));
  return v;
}

isac::SystemConfig surrogate_config() {
  isac::SystemConfig cfg;
  cfg.n_tx = 6;
  cfg.n_rx = 16;
  cfg.n_users = 2;
  cfg.comm_noise_powers = {0.1, 0.1};
  return cfg;
}

}  // namespace

TEST_CASE("lifting stacks real over imaginary and inverts exactly") {
  std::mt19937_64 rng(41);
  const isac::VecXc x = random_vec(rng, 7);
  const isac::VecX xt = isac::realify_vector(x);
  REQUIRE(xt.size() == 14);
  for (int i = 0; i < 7; ++i) {
    CHECK(xt(i) == x(i).real());
    CHECK(xt(7 + i) == x(i).imag());
  }
  const isac::VecXc back = isac::unrealify_vector(xt);
  CHECK((back - x).norm() == 0.0);

  isac::VecX odd(3);
  odd << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS(isac::unrealify_vector(odd), std::invalid_argument);
}

TEST_CASE("objective lift preserves conjugated inner products") {
  std::mt19937_64 rng(42);
  for (int rep = 0; rep < 20; ++rep) {
    const isac::VecXc w = random_vec(rng, 9);
    const isac::VecXc x = random_vec(rng, 9);
    const double want = (w.adjoint() * x)(0, 0).real();
    const double got =
        isac::realify_objective(w).dot(isac::realify_vector(x));
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("row lift preserves unconjugated products") {
  std::mt19937_64 rng(43);
  isac::MatXc a(5, 8);
  for (int r = 0; r < 5; ++r) a.row(r) = random_vec(rng, 8).transpose();
  const isac::MatX at = isac::realify_rows(a);
  REQUIRE(at.rows() == 5);
  REQUIRE(at.cols() == 16);
  for (int rep = 0; rep < 10; ++rep) {
    const isac::VecXc x = random_vec(rng, 8);
    const isac::VecX lifted = at * isac::realify_vector(x);
    for (int r = 0; r < 5; ++r) {
      const double want = (a.row(r) * x)(0, 0).real();
      CHECK(lifted(r) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("largest eigenvalue certifies against a dense eigensolve") {
  std::mt19937_64 rng(44);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 12;
    isac::MatXc b(n, n);
    for (int r = 0; r < n; ++r) b.row(r) = random_vec(rng, n).transpose();
    const isac::MatXc psd = b.adjoint() * b;  // Hermitian PSD
    const double got = isac::largest_eigenvalue(psd);
    Eigen::SelfAdjointEigenSolver<isac::MatXc> es(psd);
    const double want = es.eigenvalues().maxCoeff();
    CHECK(got == doctest::Approx(want).epsilon(1e-8));
    CHECK(got >= want * (1.0 - 1e-10));  // never an underestimate
  }
  CHECK(isac::largest_eigenvalue(isac::MatXc::Identity(4, 4)) ==
        doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("both surrogates are tight at the expansion point") {
  isac::SystemConfig cfg = surrogate_config();
  const isac::RadarScene scene = isac::make_radar_scene(cfg);
  std::mt19937_64 rng(45);
  for (isac::AdcMode adc : {isac::AdcMode::OneBit, isac::AdcMode::Infinite}) {
    isac::VecXc x_t = random_vec(rng, cfg.n_tx);
    x_t *= std::sqrt(cfg.power_budget) / x_t.norm();
    const isac::SurrogateState s = isac::build_surrogate(x_t, scene, cfg, adc);
    const double p = isac::qscnr_concentrated(x_t, scene, cfg, adc);
    CHECK(s.anchor_value == doctest::Approx(p).epsilon(1e-10));
    CHECK(isac::surrogate_quadratic(s, x_t) ==
          doctest::Approx(p).epsilon(1e-8));
    CHECK(isac::surrogate_linear(s, x_t) == doctest::Approx(p).epsilon(1e-8));
  }
}

TEST_CASE("the minorization chain holds across the power sphere") {
  isac::SystemConfig cfg = surrogate_config();
  const isac::RadarScene scene = isac::make_radar_scene(cfg);
  std::mt19937_64 rng(46);
  isac::VecXc x_t = random_vec(rng, cfg.n_tx);
  x_t *= std::sqrt(cfg.power_budget) / x_t.norm();
  const isac::SurrogateState s =
      isac::build_surrogate(x_t, scene, cfg, isac::AdcMode::OneBit);
  int checked = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    isac::VecXc x = random_vec(rng, cfg.n_tx);
    x *= std::sqrt(cfg.power_budget) / x.norm();
    const double p = isac::qscnr_concentrated(x, scene, cfg, isac::AdcMode::OneBit);
    const double quad = isac::surrogate_quadratic(s, x);
    const double lin = isac::surrogate_linear(s, x);
    const double slack = 1e-8 * (1.0 + std::abs(p));
    CHECK(lin <= quad + slack);
    CHECK(quad <= p + slack);
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("with no clutter the quadratic surrogate is a tangent plane") {
  isac::SystemConfig cfg = surrogate_config();
  cfg.clutter_angles.clear();
  cfg.clutter_cnrs.clear();
  const isac::RadarScene scene = isac::make_radar_scene(cfg);
  std::mt19937_64 rng(47);
  isac::VecXc x_t = random_vec(rng, cfg.n_tx);
  x_t *= std::sqrt(cfg.power_budget) / x_t.norm();
  const isac::SurrogateState s =
      isac::build_surrogate(x_t, scene, cfg, isac::AdcMode::OneBit);
  // M(x) = I, so Mtilde vanishes and the quadratic surrogate is affine.
  CHECK(s.m_tilde.norm() < 1e-12);
  CHECK(s.ell_max < 1e-10);
  // It still minorizes P, which is convex in x here.
  for (int rep = 0; rep < 100; ++rep) {
    isac::VecXc x = random_vec(rng, cfg.n_tx);
    x *= std::sqrt(cfg.power_budget) / x.norm();
    const double p =
        isac::qscnr_concentrated(x, scene, cfg, isac::AdcMode::OneBit);
    CHECK(isac::surrogate_quadratic(s, x) <= p + 1e-9 * (1.0 + p));
  }
}
