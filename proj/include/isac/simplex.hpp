/**
 * Dense bounded-variable primal simplex for the small linear programs inside
 * the branch-and-bound search:
 *
 *   maximize c^T v  subject to  A v >= b,  lo <= v <= hi.
 *
 * Two phases with artificial variables; Dantzig pricing with a Bland
 * fallback after degenerate stalls; the basis is refactorized with a dense
 * LU every iteration (instances here have at most a few dozen rows).
 * Structural variables must have finite boxes; inequality slacks are
 * internal.
 */
#pragma once

#include "isac/types.hpp"

namespace isac {

struct LpProblem {
  MatX a;   // K x n
  VecX b;   // K
  VecX c;   // n
  VecX lo;  // n, finite
  VecX hi;  // n, finite, hi >= lo
};

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalIssue };

struct LpResult {
  LpStatus status = LpStatus::NumericalIssue;
  double objective = 0.0;
  VecX v;
  int iterations = 0;
};

LpResult solve_lp(const LpProblem& p);

}  // namespace isac
