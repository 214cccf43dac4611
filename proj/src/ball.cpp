#include "isac/ball.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/QR>

namespace isac {

namespace {

/** Euclidean projection of the subset entries onto the unit simplex, plain
 * nonnegative clipping elsewhere. */
VecX project_mixed(const VecX& v, const std::vector<bool>& in_simplex,
                   int n_simplex) {
  VecX out = v.cwiseMax(0.0);
  if (n_simplex == 0) return out;
  std::vector<double> vals;
  vals.reserve(n_simplex);
  for (Eigen::Index k = 0; k < v.size(); ++k)
    if (in_simplex[k]) vals.push_back(v(k));
  std::sort(vals.begin(), vals.end(), std::greater<double>());
  double cum = 0.0, tau = 0.0;
  int rho = 0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    cum += vals[i];
    const double cand = (cum - 1.0) / static_cast<double>(i + 1);
    if (vals[i] - cand > 0.0) {
      rho = static_cast<int>(i + 1);
      tau = cand;
    }
  }
  (void)rho;
  for (Eigen::Index k = 0; k < v.size(); ++k)
    if (in_simplex[k]) out(k) = std::max(v(k) - tau, 0.0);
  return out;
}

/**
 * Active-set polish.  The sphere-scaling primal recovery x = R z / ||z||
 * breaks down when the optimum lies strictly inside the ball (the dual
 * combination z vanishes there), so once the multipliers have roughly
 * identified the binding rows we solve those rows as equalities in the
 * least-norm sense and accept the point if it is feasible and closes the
 * duality gap.  `coeffs` is empty for the plain-LP form; otherwise the
 * epigraph scalar joins the system on rows that carry it.
 */
struct PolishOutcome {
  bool ok = false;
  VecX x;
  double objective = 0.0;
};

PolishOutcome try_polish(const MatX& rows, const VecX& rhs,
                         const std::vector<bool>& with_scalar,
                         bool has_scalar, const VecX& w, const VecX& mults,
                         double radius, double dual_value, double tol) {
  PolishOutcome out;
  const Eigen::Index k = rows.rows();
  const Eigen::Index n = rows.cols();
  const double mmax = mults.size() > 0 ? mults.cwiseAbs().maxCoeff() : 0.0;
  if (mmax <= 0.0) return out;

  std::vector<Eigen::Index> active;
  for (Eigen::Index r = 0; r < k; ++r)
    if (mults(r) > 1e-7 * mmax) active.push_back(r);
  if (active.empty()) return out;

  const Eigen::Index cols = n + (has_scalar ? 1 : 0);
  MatX m(static_cast<Eigen::Index>(active.size()), cols);
  VecX v(static_cast<Eigen::Index>(active.size()));
  for (std::size_t i = 0; i < active.size(); ++i) {
    const Eigen::Index r = active[i];
    m.row(static_cast<Eigen::Index>(i)).head(n) = rows.row(r);
    if (has_scalar)
      m(static_cast<Eigen::Index>(i), n) = with_scalar[r] ? -1.0 : 0.0;
    v(static_cast<Eigen::Index>(i)) = rhs(r);
  }
  Eigen::CompleteOrthogonalDecomposition<MatX> cod(m);
  const VecX y = cod.solve(v);
  const VecX x = y.head(n);
  if (x.norm() > radius * (1.0 + 1e-10)) return out;

  const double rhs_scale = 1.0 + rhs.cwiseAbs().maxCoeff();
  const VecX slack = rows * x - rhs;
  double value;
  if (has_scalar) {
    double t_lower = 0.0;
    bool first = true;
    for (Eigen::Index r = 0; r < k; ++r) {
      if (with_scalar[r]) {
        t_lower = first ? slack(r) : std::min(t_lower, slack(r));
        first = false;
      } else if (slack(r) < -1e-9 * rhs_scale) {
        return out;  // a plain row is violated
      }
    }
    if (first) return out;
    value = t_lower;
  } else {
    if (slack.size() > 0 && slack.minCoeff() < -1e-9 * rhs_scale) return out;
    value = w.dot(x);
  }
  if (dual_value - value > tol * (1.0 + std::abs(value))) return out;
  out.ok = true;
  out.x = x;
  out.objective = value;
  return out;
}

/**
 * Newton step for the duals.  Both dual functions share the smooth term
 * R ||z(m)|| with z affine in the multipliers m, whose Hessian is
 * (R/||z||) A (I - zz^T/||z||^2) A^T.  Away from the z = 0 kink that matrix
 * is exact, k-by-k, and cheap, so one regularized solve on the free rows
 * gives mesh-independent convergence where plain descent crawls.  `free`
 * selects the rows allowed to move; `simplex_free` (possibly empty) lists
 * the free rows tied by a sum-to-one constraint, enforced via one Schur
 * complement.  Returns an all-rows step (zeros on fixed rows) or an empty
 * vector when no usable direction exists.
 */
VecX newton_direction(const MatX& aat, const MatX& rows, const VecX& z,
                      double radius, const VecX& grad,
                      const std::vector<bool>& free_row,
                      const std::vector<bool>& simplex_free) {
  const Eigen::Index k = rows.rows();
  std::vector<Eigen::Index> idx;
  for (Eigen::Index r = 0; r < k; ++r)
    if (free_row[r]) idx.push_back(r);
  if (idx.empty()) return VecX();
  const Eigen::Index nf = static_cast<Eigen::Index>(idx.size());

  const double nz = z.norm();
  const VecX q = rows * (z / nz);
  MatX h(nf, nf);
  VecX gf(nf), ef(nf);
  bool any_simplex = false;
  for (Eigen::Index i = 0; i < nf; ++i) {
    for (Eigen::Index j = 0; j < nf; ++j)
      h(i, j) = radius / nz * (aat(idx[i], idx[j]) - q(idx[i]) * q(idx[j]));
    gf(i) = grad(idx[i]);
    ef(i) = simplex_free[idx[i]] ? 1.0 : 0.0;
    any_simplex = any_simplex || simplex_free[idx[i]];
  }
  const double reg = 1e-12 * (1.0 + h.trace());
  for (Eigen::Index i = 0; i < nf; ++i) h(i, i) += reg;

  Eigen::LDLT<MatX> ldlt(h);
  if (ldlt.info() != Eigen::Success) return VecX();
  VecX df = ldlt.solve(-gf);
  if (any_simplex) {
    // Project the step onto sum(simplex rows) = const.
    const VecX y1 = ldlt.solve(ef);
    const double denom = ef.dot(y1);
    if (std::abs(denom) < 1e-300) return VecX();
    df -= ef.dot(df) / denom * y1;
  }
  if (!df.allFinite() || gf.dot(df) >= 0.0) return VecX();

  VecX d = VecX::Zero(k);
  for (Eigen::Index i = 0; i < nf; ++i) d(idx[i]) = df(i);
  return d;
}

}  // namespace

BallSolveResult solve_ball_lp(const VecX& w, const MatX& rows, const VecX& rhs,
                              double radius, double tol, int max_iter) {
  if (rows.rows() != rhs.size() || (rows.rows() > 0 && rows.cols() != w.size()))
    throw std::invalid_argument("solve_ball_lp: dimension mismatch");
  if (!(radius > 0.0))
    throw std::invalid_argument("solve_ball_lp: radius must be positive");

  BallSolveResult res;
  const Eigen::Index k = rows.rows();
  if (k == 0) {
    const double nw = w.norm();
    res.x = (nw > 0.0) ? VecX(radius / nw * w) : VecX(VecX::Zero(w.size()));
    res.objective = w.dot(res.x);
    res.status = LpStatus::Optimal;
    return res;
  }

  const double rhs_scale = 1.0 + rhs.cwiseAbs().maxCoeff();
  const double obj_scale = 1.0 + radius * w.norm();
  const double blowup = 1e10 * (rhs_scale + obj_scale);
  const MatX aat = rows * rows.transpose();

  VecX theta = VecX::Zero(k);
  VecX z = w + rows.transpose() * theta;
  double g = radius * z.norm() - theta.dot(rhs);
  double step = 1.0;
  VecX x = VecX::Zero(w.size());
  const std::vector<bool> no_simplex(k, false);

  for (int it = 0; it < max_iter; ++it) {
    const double nz = z.norm();
    if (nz > 1e-13 * obj_scale) x = (radius / nz) * z;
    const VecX grad = rows * x - rhs;

    const double primal_viol =
        std::max(0.0, -(grad.minCoeff())) / rhs_scale;
    const double comp = std::abs(theta.dot(grad)) / obj_scale;
    const VecX proj_point = (theta - grad).cwiseMax(0.0);
    const double station =
        (theta - proj_point).cwiseAbs().maxCoeff() / (1.0 + theta.cwiseAbs().maxCoeff());
    res.kkt_residual = std::max({primal_viol, comp, station});
    res.iterations = it;
    if (res.kkt_residual <= tol) {
      res.status = LpStatus::Optimal;
      res.x = x;
      res.objective = w.dot(x);
      return res;
    }
    if (g < -blowup || theta.cwiseAbs().maxCoeff() > 1e12) {
      res.status = LpStatus::Infeasible;
      return res;
    }

    bool moved = false;
    if (nz > 1e-12 * obj_scale) {
      std::vector<bool> free_row(k);
      for (Eigen::Index r = 0; r < k; ++r)
        free_row[r] = theta(r) > 0.0 || grad(r) < 0.0;
      const VecX d =
          newton_direction(aat, rows, z, radius, grad, free_row, no_simplex);
      if (d.size() == k) {
        for (double alpha = 1.0; alpha >= 1e-6; alpha *= 0.5) {
          VecX cand = (theta + alpha * d).cwiseMax(0.0);
          VecX zc = w + rows.transpose() * cand;
          const double gc = radius * zc.norm() - cand.dot(rhs);
          const double model = grad.dot(cand - theta);
          if (model < 0.0 && gc <= g + 1e-4 * model) {
            theta = std::move(cand);
            z = std::move(zc);
            g = gc;
            moved = true;
            break;
          }
        }
      }
    }

    // Backtracking projected-gradient step on the dual.
    for (int bt = 0; !moved && bt < 60; ++bt) {
      VecX cand = (theta - step * grad).cwiseMax(0.0);
      VecX zc = w + rows.transpose() * cand;
      const double gc = radius * zc.norm() - cand.dot(rhs);
      const VecX d = cand - theta;
      if (gc <= g + grad.dot(d) + 0.5 / step * d.squaredNorm() + 1e-30) {
        theta = std::move(cand);
        z = std::move(zc);
        g = gc;
        step = std::min(step * 1.3, 1e8);
        moved = true;
        break;
      }
      step *= 0.5;
      if (step < 1e-14) break;
    }

    if (!moved || (it + 1) % 25 == 0) {
      const PolishOutcome p = try_polish(rows, rhs, {}, false, w, theta,
                                         radius, g, tol);
      if (p.ok) {
        res.status = LpStatus::Optimal;
        res.x = p.x;
        res.objective = p.objective;
        res.kkt_residual = g - p.objective;
        return res;
      }
    }
    if (!moved) {
      // Armijo stalled at a kink of the dual; take a plain diminishing
      // subgradient step so the multipliers keep moving.
      const double gn = grad.cwiseAbs().maxCoeff();
      if (gn > 0.0) {
        const double delta =
            0.1 * (1.0 + theta.cwiseAbs().maxCoeff()) / (gn * (1.0 + it));
        theta = (theta - delta * grad).cwiseMax(0.0);
        z = w + rows.transpose() * theta;
        g = radius * z.norm() - theta.dot(rhs);
        step = 1.0;
      }
    }
  }

  {
    const PolishOutcome p =
        try_polish(rows, rhs, {}, false, w, theta, radius, g, tol);
    if (p.ok) {
      res.status = LpStatus::Optimal;
      res.x = p.x;
      res.objective = p.objective;
      res.kkt_residual = g - p.objective;
      return res;
    }
  }
  res.status = LpStatus::NumericalIssue;
  res.x = x;
  res.objective = w.dot(x);
  return res;
}

BallSolveResult solve_ball_maxmin(const MatX& rows, const VecX& coeffs,
                                  const VecX& rhs, double radius, double tol,
                                  int max_iter) {
  const Eigen::Index k = rows.rows();
  if (rhs.size() != k || coeffs.size() != k)
    throw std::invalid_argument("solve_ball_maxmin: dimension mismatch");
  if (!(radius > 0.0))
    throw std::invalid_argument("solve_ball_maxmin: radius must be positive");
  std::vector<bool> in_simplex(k, false);
  int n_simplex = 0;
  for (Eigen::Index r = 0; r < k; ++r) {
    if (std::abs(coeffs(r) - 1.0) < 1e-12) {
      in_simplex[r] = true;
      ++n_simplex;
    } else if (std::abs(coeffs(r)) > 1e-12) {
      throw std::invalid_argument(
          "solve_ball_maxmin: coefficients must be 0 or 1");
    }
  }
  if (n_simplex == 0)
    throw std::invalid_argument(
        "solve_ball_maxmin: at least one row must carry the scalar");

  BallSolveResult res;
  const double rhs_scale = 1.0 + rhs.cwiseAbs().maxCoeff();
  const double blowup = 1e10 * rhs_scale * (1.0 + radius);
  const MatX aat = rows * rows.transpose();
  const double z_scale = std::sqrt(1.0 + aat.trace());

  VecX nu = VecX::Zero(k);
  for (Eigen::Index r = 0; r < k; ++r)
    if (in_simplex[r]) nu(r) = 1.0 / n_simplex;
  VecX z = rows.transpose() * nu;
  double g = radius * z.norm() - nu.dot(rhs);
  double step = 1.0;
  VecX x = VecX::Zero(rows.cols());

  for (int it = 0; it < max_iter; ++it) {
    const double nz = z.norm();
    if (nz > 1e-13) x = (radius / nz) * z;
    const VecX slack = rows * x - rhs;
    const VecX grad = slack;

    double t_lower = 0.0;
    bool first = true;
    double plain_viol = 0.0;
    for (Eigen::Index r = 0; r < k; ++r) {
      if (in_simplex[r]) {
        t_lower = first ? slack(r) : std::min(t_lower, slack(r));
        first = false;
      } else {
        plain_viol = std::max(plain_viol, -slack(r));
      }
    }
    const double gap = (g - t_lower) / (1.0 + std::abs(t_lower));
    res.kkt_residual = std::max(gap, plain_viol / rhs_scale);
    res.iterations = it;
    if (res.kkt_residual <= tol) {
      res.status = LpStatus::Optimal;
      res.x = x;
      res.objective = t_lower;
      return res;
    }
    if (g < -blowup || nu.cwiseAbs().maxCoeff() > 1e12) {
      res.status = LpStatus::Infeasible;
      return res;
    }

    bool moved = false;
    if (nz > 1e-10 * z_scale) {
      std::vector<bool> free_row(k), simplex_free(k);
      for (Eigen::Index r = 0; r < k; ++r) {
        free_row[r] = in_simplex[r] ? nu(r) > 0.0
                                    : (nu(r) > 0.0 || grad(r) < 0.0);
        simplex_free[r] = in_simplex[r] && free_row[r];
      }
      const VecX d =
          newton_direction(aat, rows, z, radius, grad, free_row, simplex_free);
      if (d.size() == k) {
        for (double alpha = 1.0; alpha >= 1e-6; alpha *= 0.5) {
          VecX cand = project_mixed(nu + alpha * d, in_simplex, n_simplex);
          VecX zc = rows.transpose() * cand;
          const double gc = radius * zc.norm() - cand.dot(rhs);
          const double model = grad.dot(cand - nu);
          if (model < 0.0 && gc <= g + 1e-4 * model) {
            nu = std::move(cand);
            z = std::move(zc);
            g = gc;
            moved = true;
            break;
          }
        }
      }
    }

    for (int bt = 0; !moved && bt < 60; ++bt) {
      VecX cand = project_mixed(nu - step * grad, in_simplex, n_simplex);
      VecX zc = rows.transpose() * cand;
      const double gc = radius * zc.norm() - cand.dot(rhs);
      const VecX d = cand - nu;
      if (gc <= g + grad.dot(d) + 0.5 / step * d.squaredNorm() + 1e-30) {
        nu = std::move(cand);
        z = std::move(zc);
        g = gc;
        step = std::min(step * 1.3, 1e8);
        moved = true;
        break;
      }
      step *= 0.5;
      if (step < 1e-14) break;
    }

    if (!moved || (it + 1) % 25 == 0) {
      const PolishOutcome p = try_polish(rows, rhs, in_simplex, true, VecX(),
                                         nu, radius, g, tol);
      if (p.ok) {
        res.status = LpStatus::Optimal;
        res.x = p.x;
        res.objective = p.objective;
        res.kkt_residual = g - p.objective;
        return res;
      }
    }
    if (!moved) {
      const double gn = grad.cwiseAbs().maxCoeff();
      if (gn > 0.0) {
        const double delta =
            0.1 * (1.0 + nu.cwiseAbs().maxCoeff()) / (gn * (1.0 + it));
        nu = project_mixed(nu - delta * grad, in_simplex, n_simplex);
        z = rows.transpose() * nu;
        g = radius * z.norm() - nu.dot(rhs);
        step = 1.0;
      }
    }
  }

  {
    const PolishOutcome p =
        try_polish(rows, rhs, in_simplex, true, VecX(), nu, radius, g, tol);
    if (p.ok) {
      res.status = LpStatus::Optimal;
      res.x = p.x;
      res.objective = p.objective;
      res.kkt_residual = g - p.objective;
      return res;
    }
  }
  res.status = LpStatus::NumericalIssue;
  res.x = x;
  {
    const VecX slack = rows * x - rhs;
    double t_lower = 0.0;
    bool first = true;
    for (Eigen::Index r = 0; r < k; ++r)
      if (in_simplex[r]) {
        t_lower = first ? slack(r) : std::min(t_lower, slack(r));
        first = false;
      }
    res.objective = t_lower;
  }
  return res;
}

}  // namespace isac
