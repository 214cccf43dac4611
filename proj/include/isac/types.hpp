/**
 * Core value types shared across the simulator: system configuration,
 * solver statuses, and numeric aliases.
 *
 * Conventions used throughout the library:
 *  - powers and SNR-like quantities are stored linear (conversions from dB
 *    happen once, at the configuration boundary),
 *  - angles are stored in radians,
 *  - complex baseband vectors are Eigen column vectors of std::complex<double>.
 */
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace isac {

using cd = std::complex<double>;
using VecXc = Eigen::VectorXcd;
using VecX = Eigen::VectorXd;
using MatXc = Eigen::MatrixXcd;
using MatX = Eigen::MatrixXd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/** Transmit-side converter resolution of the waveform design. */
enum class DacMode { OneBit, Infinite };

/** Sensing-receive-side converter resolution assumed by the figures of merit. */
enum class AdcMode { OneBit, Infinite };

enum class DesignStatus { Converged, IterLimit, Infeasible };

/**
 * Static description of one ISAC scene: array sizes, user population,
 * per-link noise levels and strengths, and the target/clutter geometry.
 *
 * clutter_cnrs holds the raw per-source strength ratios varsigma_q^2 /
 * sigma_R^2; quantization-aware weighting of these ratios is applied by the
 * radar metrics, not stored here.
 */
struct SystemConfig {
  int n_tx = 128;
  int n_rx = 128;
  int n_users = 4;
  double power_budget = 1.0;        // total transmit energy per symbol slot
  double radar_noise_power = 1.0;   // sigma_R^2
  double radar_snr = 31.6227766016837933;  // varsigma_0^2 / sigma_R^2 (15 dB)
  double target_angle = 0.17453292519943295;  // 10 degrees
  std::vector<double> clutter_angles{-0.8726646259971648, 0.5235987755982988};
  std::vector<double> clutter_cnrs{1000.0, 1000.0};  // 30 dB each, raw ratio
  std::vector<double> comm_noise_powers{};  // sigma_{C,u}^2, size n_users
  int modulation_order = 8;
  std::uint64_t rng_seed = 1;

  /** Throws std::invalid_argument naming the offending field. */
  void validate() const;
};

/** True when m is an integral power of two (and at least two). */
bool is_power_of_two(int m);

}  // namespace isac
