/**
 * Convex subproblems of the infinite-resolution designs: linear objectives
 * over an intersection of half-planes and a Euclidean ball (realified
 * coordinates).  Both solvers work on the Lagrange dual, which is a small
 * convex problem over the nonnegative orthant (plus one normalization for
 * the max-min form), by projected gradient descent with backtracking; the
 * primal point is recovered in closed form from the dual iterate.  Primal
 * infeasibility shows up as dual unboundedness and is reported as such.
 */
#pragma once

#include "isac/simplex.hpp"
#include "isac/types.hpp"

namespace isac {

struct BallSolveResult {
  LpStatus status = LpStatus::NumericalIssue;
  VecX x;                    // primal point, ||x|| <= radius
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
};

/** maximize w^T x  s.t.  rows x >= rhs, ||x|| <= radius. */
BallSolveResult solve_ball_lp(const VecX& w, const MatX& rows, const VecX& rhs,
                              double radius, double tol = 1e-7,
                              int max_iter = 20000);

/**
 * maximize t  s.t.  rows x - coeffs t >= rhs, ||x|| <= radius, where each
 * coeffs entry is 0 (a plain row) or 1 (a row that competes for the
 * minimum).  The optimum value is returned in `objective`.
 */
BallSolveResult solve_ball_maxmin(const MatX& rows, const VecX& coeffs,
                                  const VecX& rhs, double radius,
                                  double tol = 1e-7, int max_iter = 20000);

}  // namespace isac
