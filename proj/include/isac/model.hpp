/**
 * Scene construction: array steering, rank-one radar scattering channels,
 * 1-bit converters, Rayleigh user channels, and Gray-labelled PSK.
 */
#pragma once

#include <vector>

#include "isac/types.hpp"

namespace isac {

/**
 * Uniform-linear-array steering vector; entry k is
 * exp(-j pi k sin(theta)) / sqrt(n), so the vector has unit norm.
 */
VecXc steering(double theta, int n);

/**
 * One scatterer's two-sided channel: receive/transmit steering pair and the
 * rank-one coupling matrix g = g_rx * g_tx^T (transpose, not adjoint), which
 * has unit Frobenius norm.
 */
struct RadarChannel {
  double angle = 0.0;
  VecXc g_tx;
  VecXc g_rx;
  MatXc g;
};

RadarChannel radar_channel(double theta, int n_rx, int n_tx);

/** Target plus clutter channels materialized from a configuration. */
struct RadarScene {
  RadarChannel target;
  std::vector<RadarChannel> clutter;
};

RadarScene make_radar_scene(const SystemConfig& cfg);

/**
 * 1-bit DAC output: every entry is mapped to c * (sign(Re) + j sign(Im))
 * with c = sqrt(energy / (2 n)), so the result has squared norm exactly
 * `energy`.  sign(0) is +1 (and so is sign(-0.0)).
 */
VecXc quantize_dac(const VecXc& v, double energy);

/** 1-bit ADC output: sign(Re) + j sign(Im) per entry, same sign rule. */
VecXc quantize_adc(const VecXc& v);

/**
 * Downlink user channels, one row per user, i.i.d. CN(0,1) entries drawn
 * from the stream (cfg.rng_seed, CommChannels).  Deterministic in the seed.
 */
MatXc draw_comm_channels(const SystemConfig& cfg);

/**
 * Symbol-phase rotation used by the symbol-level design: row u of the result
 * is h_u * exp(j arg(s_u)).  s entries must be nonzero.
 */
MatXc rotate_channels(const MatXc& h, const VecXc& s);

/**
 * M-ary PSK with Gray bit labels.  Point m sits at exp(j 2 pi m / order) and
 * carries the bit pattern gray[m] = m ^ (m >> 1), so adjacent points
 * (including the wrap-around pair) differ in exactly one bit.
 */
struct Constellation {
  int order = 0;
  int bits_per_symbol = 0;
  VecXc points;
  std::vector<std::uint32_t> gray;
};

Constellation psk_constellation(int order);

/**
 * Coherent PSK decision: the index maximizing Re(y * conj(points[m])).
 * Ties keep the smallest index; y = 0 decodes to index 0.
 */
int decode_psk(cd y, const Constellation& c);

/** Hamming distance between the Gray labels of symbol indices i and j. */
int bit_errors(int i, int j, const Constellation& c);

}  // namespace isac
