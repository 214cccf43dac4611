/**
 * Monte Carlo verification of the closed-form performance predictions.
 *
 * Every trial's randomness comes from a counter-based substream keyed by
 * (seed, purpose, trial index), and scalar reductions accumulate with
 * compensated summation in a fixed trial order, so estimates are identical
 * regardless of batching or scheduling.  Estimators refuse fewer than 1000
 * trials rather than return noise.
 */
#pragma once

#include <cstdint>
#include <vector>

#include "isac/comm.hpp"
#include "isac/designs.hpp"
#include "isac/model.hpp"
#include "isac/radar.hpp"
#include "isac/types.hpp"

namespace isac {

struct McConfig {
  std::int64_t n_trials = 100000;
  int batch = 8192;  // scheduling hint only; estimates never depend on it
  std::uint64_t seed = 1;
};

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n = 0;
};

/**
 * Variance-ratio estimate of the post-filter SCNR: sample variances of
 * z = f^H r under H1 and H0 give QSCNR = Var1/Var0 - 1.  The raw variance
 * estimates (with their standard errors) are exposed for direct checks
 * against the asymptotic formulas.
 */
struct McQscnrResult {
  McEstimate qscnr;
  double var_h0 = 0.0, var_h0_stderr = 0.0;
  double var_h1 = 0.0, var_h1_stderr = 0.0;
};

McQscnrResult mc_qscnr(const VecXc& f, const VecXc& x, const RadarScene& scene,
                       const SystemConfig& cfg, const McConfig& mc,
                       AdcMode adc = AdcMode::OneBit);

/** Empirical detector operating points against the model predictions. */
struct McRocPoint {
  double delta = 0.0;      // requested false-alarm level
  double threshold = 0.0;  // model threshold for that level
  McEstimate pfa;
  McEstimate pd;
  double pd_model = 0.0;
};

std::vector<McRocPoint> mc_roc(const VecXc& f, const VecXc& x,
                               const RadarScene& scene,
                               const SystemConfig& cfg, const McConfig& mc,
                               const std::vector<double>& deltas,
                               AdcMode adc = AdcMode::OneBit);

/**
 * A batch of symbol-level designs sharing one channel draw: per design a
 * fresh symbol vector is drawn and the design re-solved.  Margins are
 * collected so bit-error estimates can be pooled across the batch.
 */
struct SymbolDesignBatch {
  std::vector<DesignResult> designs;       // feasible designs only
  std::vector<std::vector<int>> symbols;   // per design, per user
  double alpha_min = 0.0;
  int alpha_min_user = 0;
  std::int64_t n_requested = 0;
  std::int64_t n_infeasible = 0;
};

SymbolDesignBatch design_symbol_batch(const DesignProblem& base,
                                      int n_designs, std::uint64_t seed);

/** Pooled symbol/bit error rates over a design batch. */
struct McBerResult {
  McEstimate ber;
  McEstimate sep;
  double alpha_min = 0.0;
  SepBounds bounds_at_alpha_min;
  // Envelope for the pooled symbol-error rate: the per-(design, user)
  // bounds averaged with the same weights as the rate itself.  The
  // alpha_min pair above brackets only the worst pair's own rate; a pooled
  // rate can sit below that pair's lower bound whenever margins differ.
  SepBounds pooled_bounds;
  std::int64_t n_designs = 0;
  std::int64_t n_noise = 0;
};

McBerResult mc_ber(const DesignProblem& base, const SymbolDesignBatch& batch,
                   const McConfig& mc);

/** Convenience wrapper: builds the batch, then runs the noise loop. */
McBerResult mc_ber(const DesignProblem& base, const McConfig& mc,
                   int n_designs = 200);

}  // namespace isac
