/**
 * Binary programs over the 1-bit DAC alphabet, in realified form.  Each of
 * the 2 n_tx lifted coordinates takes one of two values {-c, +c}; an
 * optional extra continuous scalar (the margin variable of the max-min
 * design) rides along unbranched.
 *
 *   maximize objective^T x + continuous_obj * t
 *   s.t.     rows x - continuous_coeff * t >= rhs,   x_i in {-c, +c}.
 *
 * solve_bnb is exact best-first branch and bound on the box relaxation; ties
 * against the incumbent bound are explored, never pruned, so the search
 * agrees with exhaustive enumeration up to LP tolerance.
 */
#pragma once

#include <cstdint>
#include <iosfwd>

#include "isac/simplex.hpp"
#include "isac/types.hpp"

namespace isac {

struct IlpInstance {
  double amplitude = 1.0;  // c
  VecX objective;          // size n
  MatX rows;               // K x n
  VecX rhs;                // K
  bool has_continuous = false;
  double continuous_obj = 0.0;
  VecX continuous_coeff;   // K; only read when has_continuous

  void validate() const;
};

/**
 * Box relaxation: binaries relax to [-c, c]; the continuous scalar gets a
 * data-derived big-M box that provably contains every attainable value.
 * Variable order: the n binaries first, then the scalar.
 */
LpProblem lp_relaxation(const IlpInstance& inst);

enum class BnbStatus { Optimal, Infeasible, NodeLimit };

struct BnbResult {
  BnbStatus status = BnbStatus::Infeasible;
  VecX x;                        // entries +-c; empty when no incumbent
  double objective = 0.0;
  double continuous_value = 0.0;
  std::int64_t nodes = 0;
  double best_bound = 0.0;
  double gap = 0.0;              // relative, only meaningful for NodeLimit
};

struct BnbOptions {
  std::int64_t node_limit = 1'000'000;
  const VecX* warm_start = nullptr;  // entries +-c; infeasible starts ignored
};

BnbResult solve_bnb(const IlpInstance& inst, const BnbOptions& opt = {});

/**
 * Exact evaluation of a +-c assignment: feasibility at tolerance
 * 1e-9 * (1 + |rhs|), the induced optimal scalar (min over rows that carry
 * it), and the objective.  Used for incumbents and by the CLI.
 */
struct IlpPointValue {
  bool feasible = false;
  double objective = 0.0;
  double continuous_value = 0.0;
};

IlpPointValue evaluate_point(const IlpInstance& inst, const VecX& x);

/** Line-oriented text round trip for instances (see README for grammar). */
void dump_ilp(const IlpInstance& inst, std::ostream& os);
IlpInstance load_ilp(std::istream& is);

}  // namespace isac
