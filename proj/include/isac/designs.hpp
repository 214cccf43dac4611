/**
 * Joint transceiver designs.  Both designs alternate exact inner solves with
 * minorize steps of the concentrated SCNR:
 *
 *  - design_qos: maximize sensing SCNR subject to per-user safe-margin (or
 *    disk) constraints at fixed link-quality targets gamma_u;
 *  - design_qod: maximize the worst-case safe margin subject to a sensing
 *    SCNR floor chi.
 *
 * With a 1-bit DAC the inner problems are binary programs solved by branch
 * and bound; with an ideal DAC they are ball-constrained LPs solved through
 * their duals.  Iterates are accepted only when the float-evaluated true
 * objective does not decrease, so the reported trace is exactly monotone.
 */
#pragma once

#include <optional>

#include "isac/comm.hpp"
#include "isac/model.hpp"
#include "isac/radar.hpp"
#include "isac/types.hpp"

namespace isac {

struct DesignProblem {
  SystemConfig cfg;
  RadarScene scene;
  MatXc comm_channels;         // n_users x n_tx
  VecXc symbols;               // n_users, unit-modulus PSK points
  std::vector<double> gammas;  // n_users, linear link-quality targets
  double chi = 0.0;            // linear SCNR floor (max-min design only)
  DacMode dac = DacMode::OneBit;
  AdcMode adc = AdcMode::OneBit;
  bool use_mmse_constraints = false;
  int max_iters = 50;
  double tolerance = 1e-4;
  std::int64_t node_limit = 1'000'000;
};

DesignProblem make_design_problem(const SystemConfig& cfg);

struct DesignResult {
  DesignStatus status = DesignStatus::Infeasible;
  VecXc x;  // empty when infeasible
  VecXc f;
  std::vector<double> objective_trace;
  double final_qscnr = 0.0;   // concentrated SCNR at x, per the ADC mode
  double final_margin = 0.0;  // worst-user safe margin at x
  int iterations = 0;
  std::int64_t bnb_nodes = 0;
  double bnb_gap = 0.0;  // largest relative gap accepted on a node-limit stop
};

/**
 * Feasible starting point: the quantized (or scaled) conjugate of the
 * target's transmit steering vector when it already satisfies the
 * constraints, otherwise the max-min-margin feasibility program.  Empty when
 * the constraint set is certifiably empty.
 */
std::optional<VecXc> initialize_x(const DesignProblem& p,
                                  const QosConstraintSet& constraints);

DesignResult design_qos(const DesignProblem& p);
DesignResult design_qod(const DesignProblem& p);

/** Convenience dispatcher used by the experiment runner. */
DesignResult design_continuous(const DesignProblem& p);

}  // namespace isac
