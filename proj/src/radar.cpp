#include "isac/radar.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace isac {

namespace {

constexpr double kTwoOverPi = 2.0 / kPi;

/** Scattered amplitudes a_q = g_tx,q^T x for target (index -1) and clutter. */
cd tx_gain(const RadarChannel& ch, const VecXc& x) {
  return ch.g_tx.transpose() * x;
}

}  // namespace

RadarWeights radar_weights(const SystemConfig& cfg, AdcMode adc) {
  RadarWeights w;
  const double scale = (adc == AdcMode::OneBit) ? kTwoOverPi : 1.0;
  w.mu = scale * cfg.radar_snr;
  w.clutter.reserve(cfg.clutter_cnrs.size());
  for (double c : cfg.clutter_cnrs) w.clutter.push_back(scale * c);
  return w;
}

MatXc whitening_matrix(const VecXc& x, const RadarScene& scene,
                       const SystemConfig& cfg, AdcMode adc) {
  const RadarWeights w = radar_weights(cfg, adc);
  MatXc m = MatXc::Identity(cfg.n_rx, cfg.n_rx);
  for (std::size_t q = 0; q < scene.clutter.size(); ++q) {
    const cd a = tx_gain(scene.clutter[q], x);
    m.noalias() += (w.clutter[q] * std::norm(a)) *
                   (scene.clutter[q].g_rx * scene.clutter[q].g_rx.adjoint());
  }
  return m;
}

VecXc receive_filter(const VecXc& x, const RadarScene& scene,
                     const SystemConfig& cfg, AdcMode adc) {
  const cd a0 = tx_gain(scene.target, x);
  if (std::abs(a0) <= 1e-14 * x.norm())
    throw std::invalid_argument(
        "receive_filter: G_0 x vanishes, filter undefined");
  const VecXc s = a0 * scene.target.g_rx;
  const MatXc m = whitening_matrix(x, scene, cfg, adc);
  Eigen::LLT<MatXc> llt(m);
  const VecXc ms = llt.solve(s);
  const double denom = (s.adjoint() * ms).real()(0, 0);
  return ms / denom;
}

namespace {

double scnr_generic(const VecXc& f, const VecXc& x, const RadarScene& scene,
                    const RadarWeights& w) {
  const cd a0 = tx_gain(scene.target, x);
  const cd fg0 = (f.adjoint() * scene.target.g_rx)(0, 0);
  const double num = w.mu * std::norm(fg0 * a0);
  double den = f.squaredNorm();
  for (std::size_t q = 0; q < scene.clutter.size(); ++q) {
    const cd aq = tx_gain(scene.clutter[q], x);
    const cd fgq = (f.adjoint() * scene.clutter[q].g_rx)(0, 0);
    den += w.clutter[q] * std::norm(fgq * aq);
  }
  return num / den;
}

}  // namespace

double qscnr(const VecXc& f, const VecXc& x, const RadarScene& scene,
             const SystemConfig& cfg) {
  return scnr_generic(f, x, scene, radar_weights(cfg, AdcMode::OneBit));
}

double scnr_infinite_bit(const VecXc& f, const VecXc& x,
                         const RadarScene& scene, const SystemConfig& cfg) {
  return scnr_generic(f, x, scene, radar_weights(cfg, AdcMode::Infinite));
}

double qscnr_concentrated(const VecXc& x, const RadarScene& scene,
                          const SystemConfig& cfg, AdcMode adc) {
  const RadarWeights w = radar_weights(cfg, adc);
  const cd a0 = tx_gain(scene.target, x);
  const VecXc s = a0 * scene.target.g_rx;
  const MatXc m = whitening_matrix(x, scene, cfg, adc);
  Eigen::LLT<MatXc> llt(m);
  return w.mu * (s.adjoint() * llt.solve(s)).real()(0, 0);
}

VarianceComponents variance_components(const VecXc& f, const VecXc& x,
                                       const RadarScene& scene,
                                       const SystemConfig& cfg,
                                       AdcMode adc) {
  VarianceComponents v;
  v.filter_norm_sq = f.squaredNorm();
  const bool one_bit = (adc == AdcMode::OneBit);
  // Sign outputs have unit power per rail, so the 1-bit terms are ratios;
  // the ideal chain keeps absolute powers.
  const double scale = one_bit ? 4.0 / kPi : cfg.radar_noise_power;
  const double base =
      (one_bit ? 2.0 : cfg.radar_noise_power) * v.filter_norm_sq;
  for (std::size_t q = 0; q < scene.clutter.size(); ++q) {
    const cd aq = tx_gain(scene.clutter[q], x);
    const cd fgq = (f.adjoint() * scene.clutter[q].g_rx)(0, 0);
    v.pi0 += scale * cfg.clutter_cnrs[q] * std::norm(fgq * aq);
  }
  const cd a0 = tx_gain(scene.target, x);
  const cd fg0 = (f.adjoint() * scene.target.g_rx)(0, 0);
  v.pi1 = v.pi0 + scale * cfg.radar_snr * std::norm(fg0 * a0);
  v.var0 = base + v.pi0;
  v.var1 = base + v.pi1;
  return v;
}

double glrt_statistic(const VecXc& f, const VecXc& r) {
  return std::abs((f.adjoint() * r)(0, 0));
}

double threshold_for_pfa(const VecXc& f, const VecXc& x,
                         const RadarScene& scene, const SystemConfig& cfg,
                         double delta, AdcMode adc) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("threshold_for_pfa: delta must be in (0,1)");
  const VarianceComponents v = variance_components(f, x, scene, cfg, adc);
  return std::sqrt(-v.var0 * std::log(delta));
}

double prob_false_alarm(const VecXc& f, const VecXc& x,
                        const RadarScene& scene, const SystemConfig& cfg,
                        double kappa, AdcMode adc) {
  const VarianceComponents v = variance_components(f, x, scene, cfg, adc);
  return std::exp(-kappa * kappa / v.var0);
}

double prob_detection(const VecXc& f, const VecXc& x, const RadarScene& scene,
                      const SystemConfig& cfg, double delta, AdcMode adc) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("prob_detection: delta must be in (0,1)");
  const double q = (adc == AdcMode::OneBit)
                       ? qscnr(f, x, scene, cfg)
                       : scnr_infinite_bit(f, x, scene, cfg);
  return std::exp(std::log(delta) / (1.0 + q));
}

double PowerModel::converter_power(int bits) const {
  if (bits < 1 || bits > 40)
    throw std::invalid_argument("PowerModel: bits must be in [1, 40]");
  return fom_w * f_s * std::ldexp(1.0, bits);
}

double PowerModel::total_power(int n_tx, int n_rx) const {
  return (n_tx + n_rx) * (e_rf + e_lna) + 2.0 * e_bb +
         2.0 * n_tx * converter_power(dac_bits) +
         2.0 * n_rx * converter_power(adc_bits);
}

double radar_energy_efficiency(double scnr_linear, int n_tx, int n_rx,
                               const PowerModel& pm) {
  if (!(scnr_linear >= 0.0))
    throw std::invalid_argument(
        "radar_energy_efficiency: scnr must be nonnegative");
  return scnr_linear / pm.total_power(n_tx, n_rx);
}

}  // namespace isac
