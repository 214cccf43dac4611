#include "isac/model.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "isac/rng.hpp"

namespace isac {

bool is_power_of_two(int m) { return m >= 2 && (m & (m - 1)) == 0; }

void SystemConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument(what);
  };
  if (n_tx < 1) fail("n_tx must be at least 1");
  if (n_rx < 1) fail("n_rx must be at least 1");
  if (n_users < 0) fail("n_users must be nonnegative");
  if (!(power_budget > 0.0)) fail("power_budget must be positive");
  if (!(radar_noise_power > 0.0)) fail("radar_noise_power must be positive");
  if (!(radar_snr >= 0.0)) fail("radar_snr must be nonnegative");
  if (!(std::abs(target_angle) < kPi / 2))
    fail("target_angle must lie in (-pi/2, pi/2)");
  for (double a : clutter_angles)
    if (!(std::abs(a) < kPi / 2))
      fail("clutter_angles entries must lie in (-pi/2, pi/2)");
  if (clutter_cnrs.size() != clutter_angles.size())
    fail("clutter_cnrs must have one entry per clutter angle");
  for (double c : clutter_cnrs)
    if (!(c >= 0.0)) fail("clutter_cnrs entries must be nonnegative");
  if (comm_noise_powers.size() != static_cast<std::size_t>(n_users))
    fail("comm_noise_powers must have one entry per user");
  for (double p : comm_noise_powers)
    if (!(p > 0.0)) fail("comm_noise_powers entries must be positive");
  if (!is_power_of_two(modulation_order))
    fail("modulation_order must be a power of two, at least 2");
}

VecXc steering(double theta, int n) {
  if (n < 1) throw std::invalid_argument("steering: n must be at least 1");
  VecXc v(n);
  const double step = -kPi * std::sin(theta);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k) v(k) = std::polar(scale, step * k);
  return v;
}

RadarChannel radar_channel(double theta, int n_rx, int n_tx) {
  RadarChannel ch;
  ch.angle = theta;
  ch.g_tx = steering(theta, n_tx);
  ch.g_rx = steering(theta, n_rx);
  ch.g = ch.g_rx * ch.g_tx.transpose();
  return ch;
}

RadarScene make_radar_scene(const SystemConfig& cfg) {
  RadarScene scene;
  scene.target = radar_channel(cfg.target_angle, cfg.n_rx, cfg.n_tx);
  scene.clutter.reserve(cfg.clutter_angles.size());
  for (double a : cfg.clutter_angles)
    scene.clutter.push_back(radar_channel(a, cfg.n_rx, cfg.n_tx));
  return scene;
}

namespace {
inline double sign_pm1(double v) { return v >= 0.0 ? 1.0 : -1.0; }
}  // namespace

VecXc quantize_dac(const VecXc& v, double energy) {
  if (!(energy > 0.0))
    throw std::invalid_argument("quantize_dac: energy must be positive");
  const Eigen::Index n = v.size();
  const double c = std::sqrt(energy / (2.0 * static_cast<double>(n)));
  VecXc out(n);
  for (Eigen::Index i = 0; i < n; ++i)
    out(i) = cd(c * sign_pm1(v(i).real()), c * sign_pm1(v(i).imag()));
  return out;
}

VecXc quantize_adc(const VecXc& v) {
  VecXc out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out(i) = cd(sign_pm1(v(i).real()), sign_pm1(v(i).imag()));
  return out;
}

MatXc draw_comm_channels(const SystemConfig& cfg) {
  rng::Substream stream(cfg.rng_seed, rng::Stream::CommChannels);
  MatXc h(cfg.n_users, cfg.n_tx);
  for (int u = 0; u < cfg.n_users; ++u)
    for (int k = 0; k < cfg.n_tx; ++k) h(u, k) = stream.cgauss(1.0);
  return h;
}

MatXc rotate_channels(const MatXc& h, const VecXc& s) {
  if (h.rows() != s.size())
    throw std::invalid_argument("rotate_channels: one symbol per channel row");
  MatXc out(h.rows(), h.cols());
  for (Eigen::Index u = 0; u < h.rows(); ++u) {
    if (s(u) == cd(0.0, 0.0))
      throw std::invalid_argument("rotate_channels: symbols must be nonzero");
    out.row(u) = h.row(u) * std::polar(1.0, std::arg(s(u)));
  }
  return out;
}

Constellation psk_constellation(int order) {
  if (!is_power_of_two(order))
    throw std::invalid_argument(
        "psk_constellation: order must be a power of two, at least 2");
  Constellation c;
  c.order = order;
  c.bits_per_symbol = std::bit_width(static_cast<unsigned>(order)) - 1;
  c.points.resize(order);
  c.gray.resize(order);
  for (int m = 0; m < order; ++m) {
    c.points(m) = std::polar(1.0, 2.0 * kPi * m / order);
    c.gray[m] = static_cast<std::uint32_t>(m ^ (m >> 1));
  }
  return c;
}

int decode_psk(cd y, const Constellation& c) {
  int best = 0;
  double best_metric = (y * std::conj(c.points(0))).real();
  for (int m = 1; m < c.order; ++m) {
    const double metric = (y * std::conj(c.points(m))).real();
    if (metric > best_metric) {
      best_metric = metric;
      best = m;
    }
  }
  return best;
}

int bit_errors(int i, int j, const Constellation& c) {
  return std::popcount(c.gray[i] ^ c.gray[j]);
}

}  // namespace isac
