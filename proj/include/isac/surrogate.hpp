/**
 * Minorize steps for the concentrated SCNR objective
 * P(x) = mu x^H G_0^H M(x)^{-1} G_0 x on the sphere ||x||^2 = E.
 *
 * Two nested minorizers, both tight at the expansion point x_t:
 *  - quadratic: P(x) >= -mu x^H Mtilde_t x + 2 mu Re(v_t^H G_0 x) + const1
 *    (joint convexity of (s, M) -> s^H M^{-1} s),
 *  - linear: the concave quadratic is minorized on the sphere again via the
 *    largest eigenvalue of Mtilde_t, giving Re(w_t^H x) + const2.
 * Minorization chains, so maximizing the linear surrogate over any subset of
 * the sphere cannot decrease P.
 */
#pragma once

#include "isac/radar.hpp"
#include "isac/types.hpp"

namespace isac {

struct SurrogateState {
  VecXc anchor;       // expansion point x_t
  double mu = 0.0;
  double energy = 0.0;
  VecXc g_lin;        // G_0^H M_t^{-1} G_0 x_t
  MatXc m_tilde;      // n_tx x n_tx Hermitian PSD
  double ell_max = 0.0;
  VecXc w;            // gradient of the linear surrogate
  double const1 = 0.0;
  double const2 = 0.0;
  double anchor_value = 0.0;  // P(x_t)
};

SurrogateState build_surrogate(const VecXc& x_t, const RadarScene& scene,
                               const SystemConfig& cfg, AdcMode adc);

/** Quadratic minorizer value at x. */
double surrogate_quadratic(const SurrogateState& s, const VecXc& x);

/** Linear minorizer value at x: Re(w^H x) + const2. */
double surrogate_linear(const SurrogateState& s, const VecXc& x);

/**
 * Largest eigenvalue of a Hermitian PSD matrix.  Power iteration with a
 * residual certificate (relative tolerance 1e-10); falls back to a dense
 * eigensolve when uncertified.  The returned value is nudged up by one part
 * in 1e12 so it never underestimates.
 */
double largest_eigenvalue(const MatXc& herm);

}  // namespace isac
