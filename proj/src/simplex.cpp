#include "isac/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/LU>

namespace isac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kPivotTol = 1e-11;

enum class VarState { Basic, AtLower, AtUpper };

struct Tableau {
  // Variable order: structural (n), slack (K), artificial (K, phase 1 only).
  Eigen::Index n = 0, k = 0;
  MatX cols;           // K x (n + 2K) column matrix
  VecX lo, hi, value;  // per variable
  std::vector<VarState> state;
  std::vector<Eigen::Index> basis;  // size K
  std::vector<int> art_sign;        // per row: 0 when no artificial

  Eigen::Index total() const { return n + 2 * k; }
};

/** Recompute basic values from the nonbasic assignment; returns residual ok. */
void recompute_basics(Tableau& t, const VecX& b,
                      const Eigen::FullPivLU<MatX>& lu) {
  VecX rhs = b;
  for (Eigen::Index j = 0; j < t.total(); ++j) {
    if (t.state[j] == VarState::Basic || t.value(j) == 0.0) continue;
    rhs -= t.cols.col(j) * t.value(j);
  }
  const VecX xb = lu.solve(rhs);
  for (Eigen::Index i = 0; i < t.k; ++i) t.value(t.basis[i]) = xb(i);
}

MatX basis_matrix(const Tableau& t) {
  MatX b(t.k, t.k);
  for (Eigen::Index i = 0; i < t.k; ++i) b.col(i) = t.cols.col(t.basis[i]);
  return b;
}

/**
 * Runs the simplex on the given objective until optimality.  Returns false
 * on a numerical breakdown (singular basis or iteration blowup).
 */
bool optimize(Tableau& t, const VecX& b, const VecX& obj, int& iterations) {
  const Eigen::Index m = t.total();
  const int max_iter = 400 + 60 * static_cast<int>(m);
  int stall = 0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::FullPivLU<MatX> lu(basis_matrix(t));
    if (!lu.isInvertible()) return false;
    recompute_basics(t, b, lu);

    // Duals and reduced costs.
    VecX cb(t.k);
    for (Eigen::Index i = 0; i < t.k; ++i) cb(i) = obj(t.basis[i]);
    const VecX y = lu.transpose().solve(cb);

    const bool bland = stall > 40;
    Eigen::Index enter = -1;
    int dir = 0;
    double best = kCostTol;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (t.state[j] == VarState::Basic) continue;
      if (t.hi(j) - t.lo(j) < 1e-15) continue;  // fixed
      const double d = obj(j) - y.dot(t.cols.col(j));
      int cand_dir = 0;
      if (t.state[j] == VarState::AtLower && d > kCostTol) cand_dir = 1;
      if (t.state[j] == VarState::AtUpper && d < -kCostTol) cand_dir = -1;
      if (cand_dir == 0) continue;
      if (bland) {
        enter = j;
        dir = cand_dir;
        break;
      }
      if (std::abs(d) > best) {
        best = std::abs(d);
        enter = j;
        dir = cand_dir;
      }
    }
    if (enter < 0) {
      iterations += it;
      return true;  // optimal
    }

    const VecX w = lu.solve(t.cols.col(enter));
    double t_max = t.hi(enter) - t.lo(enter);  // bound flip distance
    Eigen::Index leave_pos = -1;
    double leave_bound = 0.0;
    for (Eigen::Index i = 0; i < t.k; ++i) {
      const double delta = dir * w(i);
      const Eigen::Index bi = t.basis[i];
      double ratio = kInf;
      double target = 0.0;
      if (delta > kPivotTol) {
        if (t.lo(bi) == -kInf) continue;
        ratio = (t.value(bi) - t.lo(bi)) / delta;
        target = t.lo(bi);
      } else if (delta < -kPivotTol) {
        if (t.hi(bi) == kInf) continue;
        ratio = (t.hi(bi) - t.value(bi)) / (-delta);
        target = t.hi(bi);
      } else {
        continue;
      }
      if (ratio < t_max - 1e-12 ||
          (ratio < t_max + 1e-12 && leave_pos < 0)) {
        t_max = std::min(t_max, std::max(ratio, 0.0));
        leave_pos = i;
        leave_bound = target;
      }
    }

    if (t_max == kInf) return false;  // unbounded direction; flagged upstream

    if (t_max <= 1e-12) ++stall; else stall = 0;

    if (leave_pos < 0) {
      // Bound flip: entering variable runs to its opposite bound.
      t.value(enter) = (dir > 0) ? t.hi(enter) : t.lo(enter);
      t.state[enter] =
          (dir > 0) ? VarState::AtUpper : VarState::AtLower;
      continue;
    }

    const Eigen::Index leave = t.basis[leave_pos];
    t.value(enter) = t.value(enter) + dir * t_max;
    t.state[enter] = VarState::Basic;
    t.value(leave) = leave_bound;
    t.state[leave] =
        (leave_bound == t.lo(leave)) ? VarState::AtLower : VarState::AtUpper;
    t.basis[leave_pos] = enter;
  }
  return false;
}

}  // namespace

LpResult solve_lp(const LpProblem& p) {
  const Eigen::Index n = p.c.size();
  const Eigen::Index k = p.a.rows();
  if (p.lo.size() != n || p.hi.size() != n || (k > 0 && p.a.cols() != n) ||
      p.b.size() != k)
    throw std::invalid_argument("solve_lp: inconsistent dimensions");
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!std::isfinite(p.lo(j)) || !std::isfinite(p.hi(j)) ||
        p.lo(j) > p.hi(j))
      throw std::invalid_argument("solve_lp: structural bounds must be finite");
  }

  LpResult res;
  res.v.resize(n);

  if (k == 0) {
    for (Eigen::Index j = 0; j < n; ++j)
      res.v(j) = (p.c(j) >= 0.0) ? p.hi(j) : p.lo(j);
    res.status = LpStatus::Optimal;
    res.objective = p.c.dot(res.v);
    return res;
  }

  Tableau t;
  t.n = n;
  t.k = k;
  t.cols = MatX::Zero(k, n + 2 * k);
  t.cols.leftCols(n) = p.a;
  for (Eigen::Index r = 0; r < k; ++r) t.cols(r, n + r) = -1.0;  // slack
  t.lo.resize(n + 2 * k);
  t.hi.resize(n + 2 * k);
  t.value = VecX::Zero(n + 2 * k);
  t.state.assign(n + 2 * k, VarState::AtLower);
  t.art_sign.assign(k, 0);

  t.lo.head(n) = p.lo;
  t.hi.head(n) = p.hi;
  t.lo.segment(n, k).setZero();
  t.hi.segment(n, k).setConstant(kInf);
  t.lo.tail(k).setZero();
  t.hi.tail(k).setZero();  // artificials opened per-row below

  // Nonbasic variables must sit exactly on the bound their state declares;
  // start each structural at the bound nearer zero to keep residuals small.
  for (Eigen::Index j = 0; j < n; ++j) {
    const bool at_lo = std::abs(p.lo(j)) <= std::abs(p.hi(j));
    t.value(j) = at_lo ? p.lo(j) : p.hi(j);
    t.state[j] = at_lo ? VarState::AtLower : VarState::AtUpper;
  }

  const VecX resid = p.b - p.a * t.value.head(n);
  t.basis.resize(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    if (resid(r) <= 0.0) {
      // Slack basic at A v - b >= 0.
      t.basis[r] = n + r;
      t.state[n + r] = VarState::Basic;
      t.value(n + r) = -resid(r);
    } else {
      const Eigen::Index aj = n + k + r;
      t.art_sign[r] = 1;
      t.cols(r, aj) = 1.0;
      t.hi(aj) = kInf;
      t.basis[r] = aj;
      t.state[aj] = VarState::Basic;
      t.value(aj) = resid(r);
    }
  }

  const Eigen::Index m = t.total();

  // Phase 1: drive artificials to zero.
  bool need_phase1 = false;
  for (int s : t.art_sign) need_phase1 |= (s != 0);
  if (need_phase1) {
    VecX obj1 = VecX::Zero(m);
    for (Eigen::Index r = 0; r < k; ++r)
      if (t.art_sign[r] != 0) obj1(n + k + r) = -1.0;
    if (!optimize(t, p.b, obj1, res.iterations)) {
      res.status = LpStatus::NumericalIssue;
      return res;
    }
    double infeas = 0.0;
    for (Eigen::Index r = 0; r < k; ++r)
      if (t.art_sign[r] != 0) infeas += t.value(n + k + r);
    const double scale = 1.0 + p.b.cwiseAbs().maxCoeff();
    if (infeas > kFeasTol * scale) {
      res.status = LpStatus::Infeasible;
      return res;
    }
    // Freeze artificials at zero for phase 2.
    for (Eigen::Index r = 0; r < k; ++r) {
      const Eigen::Index aj = n + k + r;
      t.hi(aj) = 0.0;
      if (t.state[aj] != VarState::Basic) t.value(aj) = 0.0;
    }
  }

  VecX obj2 = VecX::Zero(m);
  obj2.head(n) = p.c;
  if (!optimize(t, p.b, obj2, res.iterations)) {
    res.status = LpStatus::NumericalIssue;
    return res;
  }

  res.v = t.value.head(n);
  res.objective = p.c.dot(res.v);
  res.status = LpStatus::Optimal;

  // Sanity: feasibility of the returned point.
  if (k > 0) {
    const VecX slack = p.a * res.v - p.b;
    const double scale = 1.0 + p.b.cwiseAbs().maxCoeff();
    if (slack.minCoeff() < -1e-6 * scale) res.status = LpStatus::NumericalIssue;
  }
  return res;
}

}  // namespace isac
