/**
 * Sensing-side figures of merit for the 1-bit receive chain: the
 * interference-whitened receive filter, output SCNR with and without the
 * 1-bit ADC penalty, GLRT detector calibration, and energy efficiency.
 *
 * The 1-bit ADC enters through two substitutions relative to the ideal
 * chain: the coherent gain factor mu = (2/pi) * radar_snr instead of
 * radar_snr, and clutter weights (2/pi) * clutter_cnrs instead of the raw
 * ratios.  AdcMode selects between the two parameterizations everywhere.
 */
#pragma once

#include "isac/model.hpp"
#include "isac/types.hpp"

namespace isac {

/** Coherent gain factor and per-source clutter weights for an ADC mode. */
struct RadarWeights {
  double mu = 0.0;
  std::vector<double> clutter;
};

RadarWeights radar_weights(const SystemConfig& cfg, AdcMode adc);

/**
 * Whitening matrix M(x) = I + sum_q w_q |a_q|^2 g_rx,q g_rx,q^H with
 * a_q = g_tx,q^T x and w_q the mode's clutter weights.
 */
MatXc whitening_matrix(const VecXc& x, const RadarScene& scene,
                       const SystemConfig& cfg, AdcMode adc);

/**
 * SCNR-optimal receive filter f = M^{-1} G_0 x / (x^H G_0^H M^{-1} G_0 x).
 * Throws std::invalid_argument when G_0 x vanishes (relative threshold
 * 1e-14), which leaves the filter direction undefined.
 */
VecXc receive_filter(const VecXc& x, const RadarScene& scene,
                     const SystemConfig& cfg, AdcMode adc);

/** Output SCNR of the 1-bit-quantized receive chain (linear scale). */
double qscnr(const VecXc& f, const VecXc& x, const RadarScene& scene,
             const SystemConfig& cfg);

/** Output SCNR of an ideal (infinite-resolution) receive chain. */
double scnr_infinite_bit(const VecXc& f, const VecXc& x,
                         const RadarScene& scene, const SystemConfig& cfg);

/**
 * SCNR after concentrating out the optimal filter:
 * mu * x^H G_0^H M^{-1} G_0 x.  Equals qscnr (resp. scnr_infinite_bit) at
 * f = receive_filter(x) for the matching ADC mode.
 */
double qscnr_concentrated(const VecXc& x, const RadarScene& scene,
                          const SystemConfig& cfg, AdcMode adc);

/**
 * Variance of the detector statistic z = f^H r under both hypotheses:
 * var_i = base + pi_i, where pi_1 adds the target term to the clutter-only
 * pi_0.  For the 1-bit chain base = 2 ||f||^2 and the pi terms carry 4/pi
 * weights (asymptotic in n_rx); for the ideal chain base is the thermal
 * noise power times ||f||^2 and the statistic is exactly Gaussian.
 */
struct VarianceComponents {
  double filter_norm_sq = 0.0;
  double pi0 = 0.0;
  double pi1 = 0.0;
  double var0 = 0.0;
  double var1 = 0.0;
};

VarianceComponents variance_components(const VecXc& f, const VecXc& x,
                                       const RadarScene& scene,
                                       const SystemConfig& cfg,
                                       AdcMode adc = AdcMode::OneBit);

/** GLRT statistic |f^H r| for a received (already quantized) snapshot. */
double glrt_statistic(const VecXc& f, const VecXc& r);

/**
 * Detection threshold giving false-alarm probability delta:
 * kappa = sqrt(-var0 ln delta).  Requires delta in (0, 1).
 */
double threshold_for_pfa(const VecXc& f, const VecXc& x,
                         const RadarScene& scene, const SystemConfig& cfg,
                         double delta, AdcMode adc = AdcMode::OneBit);

/** False-alarm probability of threshold kappa: exp(-kappa^2 / var0). */
double prob_false_alarm(const VecXc& f, const VecXc& x,
                        const RadarScene& scene, const SystemConfig& cfg,
                        double kappa, AdcMode adc = AdcMode::OneBit);

/**
 * Detection probability at false-alarm level delta:
 * exp(ln(delta) / (1 + SCNR)), with the SCNR of the selected ADC mode.
 */
double prob_detection(const VecXc& f, const VecXc& x, const RadarScene& scene,
                      const SystemConfig& cfg, double delta,
                      AdcMode adc = AdcMode::OneBit);

/**
 * Front-end power accounting.  Per-converter power is fom_w * f_s * 2^bits;
 * the chain total is
 *   (n_tx + n_rx)(e_rf + e_lna) + 2 e_bb + 2 n_tx e_dac + 2 n_rx e_adc,
 * with the factors of two on the converters counting I and Q rails.
 */
struct PowerModel {
  double e_rf = 0.04;    // per-antenna RF chain, W
  double e_lna = 0.02;   // per-antenna LNA, W
  double e_bb = 0.2;     // per-side baseband, W
  double fom_w = 500e-15;  // converter figure of merit, J per conversion step
  double f_s = 1e9;      // sampling rate, Hz
  int dac_bits = 1;
  int adc_bits = 1;

  double converter_power(int bits) const;
  double total_power(int n_tx, int n_rx) const;
};

/** Energy efficiency: linear SCNR per watt of front-end power. */
double radar_energy_efficiency(double scnr_linear, int n_tx, int n_rx,
                               const PowerModel& pm);

}  // namespace isac
