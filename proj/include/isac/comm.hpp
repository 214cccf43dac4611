/**
 * Downlink symbol-level metrics and constraint builders.
 *
 * Conventions: user u receives y_u = h_u^H x + n_u with n_u ~ CN(0,
 * sigma_{C,u}^2); the intended PSK symbol s_u is folded into the rotated
 * channel h_bar_u = h_u * exp(j arg(s_u)), which moves the nominal decision
 * sector onto the positive real axis.  The safe margin alpha_u measures how
 * deep h_bar_u^H x sits inside that sector; alpha_u * sin(pi/M) is the
 * Euclidean distance to the nearest sector boundary.
 */
#pragma once

#include "isac/types.hpp"

namespace isac {

/**
 * Sector half-plane coefficients kappa_1 = 1 + j cot(pi/M),
 * kappa_2 = 1 - j cot(pi/M); the margin of a rotated observation z is
 * min(Re(kappa_1 z), Re(kappa_2 z)) = Re(z) - cot(pi/M) |Im(z)|.
 */
struct SafeMarginCoeffs {
  cd k1;
  cd k2;
};

SafeMarginCoeffs safe_margin_coeffs(int order);

/** Safe margin of user u for transmit vector x and intended symbol s_u. */
double safe_margin(const VecXc& h_u, const VecXc& x, cd s_u, int order);

/**
 * Symbol-error-probability interval implied by a safe margin alpha at noise
 * power sigma_sq: with Psi the standard normal tail and
 * d = sqrt(2) sin(pi/M) alpha / sigma, the SEP lies in [Psi(d), 2 Psi(d)].
 * upper is the raw union bound; upper_clamped caps it at 1.
 */
struct SepBounds {
  double lower = 0.0;
  double upper = 0.0;
  double upper_clamped = 0.0;
};

SepBounds sep_bounds(double alpha, double sigma_sq, int order);

/**
 * Linear symbol-level constraints in the canonical form Re(rows * x) >= rhs.
 * Rows come in per-user groups (2 rows per user for sector constraints,
 * 8 per user for the disk approximation below).
 */
struct QosConstraintSet {
  MatXc rows;
  VecX rhs;
  int rows_per_user = 0;
};

/**
 * Sector (safe-margin) constraints: alpha_u >= sqrt(gamma_u sigma_{C,u}^2)
 * for every user, expressed as two half-planes per user.
 */
QosConstraintSet build_qos_constraints(const MatXc& h, const VecXc& s,
                                       const std::vector<double>& gammas,
                                       const std::vector<double>& noise_powers,
                                       int order);

/**
 * Baseline disk constraints: confine h_bar_u^H x to the disk centered at
 * lambda_u sec(pi/M) (on the rotated real axis) with radius
 * lambda_u tan(pi/M), the largest disk at that center inscribed in the
 * decision sector.  The disk is approximated from inside by a regular
 * octagon of half-planes whose right-hand sides use the apothem
 * radius * cos(pi/8), so every point satisfying the constraints lies in the
 * disk.
 */
QosConstraintSet build_mmse_constraints(
    const MatXc& h, const VecXc& s, const std::vector<double>& gammas,
    const std::vector<double>& noise_powers, int order);

/** Smallest safe margin across users (the design-wide link quality). */
double min_safe_margin(const MatXc& h, const VecXc& x, const VecXc& s,
                       int order);

}  // namespace isac
