#include "isac/designs.hpp"

#include <cmath>
#include <stdexcept>

#include "isac/ball.hpp"
#include "isac/ilp.hpp"
#include "isac/realify.hpp"
#include "isac/surrogate.hpp"

namespace isac {

namespace {

void validate_problem(const DesignProblem& p) {
  p.cfg.validate();
  const Eigen::Index u = p.cfg.n_users;
  if (p.comm_channels.rows() != u || p.comm_channels.cols() != p.cfg.n_tx)
    throw std::invalid_argument("DesignProblem: bad comm_channels shape");
  if (p.symbols.size() != u)
    throw std::invalid_argument("DesignProblem: one symbol per user");
  if (p.gammas.size() != static_cast<std::size_t>(u))
    throw std::invalid_argument("DesignProblem: one gamma per user");
  if (!(p.chi >= 0.0))
    throw std::invalid_argument("DesignProblem: chi must be nonnegative");
  if (p.max_iters < 1)
    throw std::invalid_argument("DesignProblem: max_iters must be positive");
  if (!(p.tolerance > 0.0))
    throw std::invalid_argument("DesignProblem: tolerance must be positive");
}

double concentrated(const DesignProblem& p, const VecXc& x) {
  return qscnr_concentrated(x, p.scene, p.cfg, p.adc);
}

double feas_tol(const VecX& rhs) {
  return 1e-9 * (1.0 + (rhs.size() ? rhs.cwiseAbs().maxCoeff() : 0.0));
}

void finalize(DesignResult& res, const DesignProblem& p, const VecXc& x) {
  res.x = x;
  res.final_qscnr = concentrated(p, x);
  if (p.cfg.n_users > 0)
    res.final_margin = min_safe_margin(p.comm_channels, x, p.symbols,
                                       p.cfg.modulation_order);
  res.f = receive_filter(x, p.scene, p.cfg, p.adc);
}

QosConstraintSet margin_rows_for_qod(const DesignProblem& p) {
  const std::vector<double> zero_gammas(p.cfg.n_users, 0.0);
  return build_qos_constraints(p.comm_channels, p.symbols, zero_gammas,
                               p.cfg.comm_noise_powers,
                               p.cfg.modulation_order);
}

}  // namespace

DesignProblem make_design_problem(const SystemConfig& cfg) {
  cfg.validate();
  DesignProblem p;
  p.cfg = cfg;
  p.scene = make_radar_scene(cfg);
  p.comm_channels = draw_comm_channels(cfg);
  p.symbols = VecXc::Ones(cfg.n_users);
  p.gammas.assign(cfg.n_users, 1.0);
  return p;
}

std::optional<VecXc> initialize_x(const DesignProblem& p,
                                  const QosConstraintSet& constraints) {
  const double energy = p.cfg.power_budget;
  const VecXc cand_dir = p.scene.target.g_tx.conjugate();
  VecXc x;
  if (p.dac == DacMode::OneBit) {
    x = quantize_dac(cand_dir, energy);
  } else {
    x = std::sqrt(energy) / cand_dir.norm() * cand_dir;
  }
  const VecX xr = realify_vector(x);
  const MatX rowsR = realify_rows(constraints.rows);
  const double tol = feas_tol(constraints.rhs);
  if (constraints.rows.rows() == 0 ||
      (rowsR * xr - constraints.rhs).minCoeff() >= -tol)
    return x;

  if (p.dac == DacMode::OneBit) {
    IlpInstance inst;
    inst.amplitude = std::sqrt(energy / (2.0 * p.cfg.n_tx));
    inst.objective = VecX::Zero(2 * p.cfg.n_tx);
    inst.rows = rowsR;
    inst.rhs = constraints.rhs;
    inst.has_continuous = true;
    inst.continuous_obj = 1.0;
    inst.continuous_coeff = VecX::Ones(rowsR.rows());
    const BnbResult r = solve_bnb(inst, BnbOptions{p.node_limit, nullptr});
    if (r.x.size() > 0 && r.continuous_value >= -tol)
      return unrealify_vector(r.x);
    return std::nullopt;
  }

  const BallSolveResult r =
      solve_ball_maxmin(rowsR, VecX::Ones(rowsR.rows()), constraints.rhs,
                        std::sqrt(energy));
  if (r.status == LpStatus::Optimal && r.objective >= -tol)
    return unrealify_vector(r.x);
  return std::nullopt;
}

DesignResult design_qos(const DesignProblem& p) {
  validate_problem(p);
  const QosConstraintSet constraints =
      p.use_mmse_constraints
          ? build_mmse_constraints(p.comm_channels, p.symbols, p.gammas,
                                   p.cfg.comm_noise_powers,
                                   p.cfg.modulation_order)
          : build_qos_constraints(p.comm_channels, p.symbols, p.gammas,
                                  p.cfg.comm_noise_powers,
                                  p.cfg.modulation_order);
  const MatX rowsR = realify_rows(constraints.rows);
  const double energy = p.cfg.power_budget;
  const double tol_rows = feas_tol(constraints.rhs);

  DesignResult res;
  const auto x0 = initialize_x(p, constraints);
  if (!x0.has_value()) {
    res.status = DesignStatus::Infeasible;
    return res;
  }
  VecXc x = *x0;
  res.objective_trace.push_back(concentrated(p, x));

  bool converged = false;
  for (int t = 1; t <= p.max_iters; ++t) {
    const SurrogateState st = build_surrogate(x, p.scene, p.cfg, p.adc);
    const VecX w_r = realify_objective(st.w);
    VecXc x_next;

    if (p.dac == DacMode::OneBit) {
      IlpInstance inst;
      inst.amplitude = std::sqrt(energy / (2.0 * p.cfg.n_tx));
      inst.objective = w_r;
      inst.rows = rowsR;
      inst.rhs = constraints.rhs;
      const VecX warm = realify_vector(x);
      const BnbResult r = solve_bnb(inst, BnbOptions{p.node_limit, &warm});
      res.bnb_nodes += r.nodes;
      if (r.status == BnbStatus::NodeLimit)
        res.bnb_gap = std::max(res.bnb_gap, r.gap);
      if (r.x.size() == 0) break;
      x_next = unrealify_vector(r.x);
    } else {
      const BallSolveResult r =
          solve_ball_lp(w_r, rowsR, constraints.rhs, std::sqrt(energy));
      if (r.status != LpStatus::Optimal) break;
      VecX xr = r.x;
      const double norm = xr.norm();
      if (norm > 0.0) {
        VecX scaled = std::sqrt(energy) / norm * xr;
        if (rowsR.rows() == 0 ||
            (rowsR * scaled - constraints.rhs).minCoeff() >= -tol_rows)
          xr = scaled;
      }
      x_next = unrealify_vector(xr);
    }

    const double obj_cur = res.objective_trace.back();
    const double obj_next = concentrated(p, x_next);
    if (obj_next < obj_cur) {
      converged = true;  // float-level stationarity
      break;
    }
    x = x_next;
    res.objective_trace.push_back(obj_next);
    res.iterations = t;
    if (obj_next - obj_cur <= p.tolerance * std::max(1.0, obj_cur)) {
      converged = true;
      break;
    }
  }

  res.status = converged ? DesignStatus::Converged : DesignStatus::IterLimit;
  finalize(res, p, x);
  return res;
}

DesignResult design_qod(const DesignProblem& p) {
  validate_problem(p);
  if (p.use_mmse_constraints)
    throw std::invalid_argument(
        "design_qod: disk constraints apply to the fixed-target design only");
  const QosConstraintSet margins = margin_rows_for_qod(p);
  const MatX rowsR = realify_rows(margins.rows);
  const Eigen::Index n_margin = rowsR.rows();
  const double energy = p.cfg.power_budget;

  DesignResult res;
  const VecXc cand_dir = p.scene.target.g_tx.conjugate();
  VecXc x = (p.dac == DacMode::OneBit)
                ? quantize_dac(cand_dir, energy)
                : VecXc(std::sqrt(energy) / cand_dir.norm() * cand_dir);
  double lambda_cur = min_safe_margin(p.comm_channels, x, p.symbols,
                                      p.cfg.modulation_order);
  res.objective_trace.push_back(lambda_cur);
  // The safeguard below may only reject steps once the current iterate
  // itself meets the SCNR floor; the radar-focused start might not.
  bool radar_ok = concentrated(p, x) >= p.chi * (1.0 - 1e-12);

  bool converged = false;
  bool infeasible = false;
  for (int t = 1; t <= p.max_iters; ++t) {
    const SurrogateState st = build_surrogate(x, p.scene, p.cfg, p.adc);
    const VecX w_r = realify_objective(st.w);
    const double chi_rhs = p.chi - st.const2;

    MatX rows(n_margin + 1, w_r.size());
    rows.topRows(n_margin) = rowsR;
    rows.row(n_margin) = w_r.transpose();
    VecX rhs = VecX::Zero(n_margin + 1);
    rhs(n_margin) = chi_rhs;
    VecX coeffs = VecX::Ones(n_margin + 1);
    coeffs(n_margin) = 0.0;

    VecXc x_next;
    double lambda_next = 0.0;
    if (p.dac == DacMode::OneBit) {
      IlpInstance inst;
      inst.amplitude = std::sqrt(energy / (2.0 * p.cfg.n_tx));
      inst.objective = VecX::Zero(w_r.size());
      inst.rows = rows;
      inst.rhs = rhs;
      inst.has_continuous = true;
      inst.continuous_obj = 1.0;
      inst.continuous_coeff = coeffs;
      const VecX warm = realify_vector(x);
      const BnbResult r = solve_bnb(inst, BnbOptions{p.node_limit, &warm});
      res.bnb_nodes += r.nodes;
      if (r.status == BnbStatus::NodeLimit)
        res.bnb_gap = std::max(res.bnb_gap, r.gap);
      if (r.status == BnbStatus::Infeasible) {
        infeasible = true;
        break;
      }
      if (r.x.size() == 0) break;
      x_next = unrealify_vector(r.x);
      lambda_next = r.continuous_value;
    } else {
      const BallSolveResult r =
          solve_ball_maxmin(rows, coeffs, rhs, std::sqrt(energy));
      if (r.status == LpStatus::Infeasible) {
        infeasible = true;
        break;
      }
      if (r.status != LpStatus::Optimal) break;
      x_next = unrealify_vector(r.x);
      lambda_next = r.objective;
    }

    if (radar_ok && lambda_next < lambda_cur) {
      converged = true;
      break;
    }
    const bool had_radar = radar_ok;
    x = x_next;
    lambda_cur = lambda_next;
    radar_ok = true;  // the accepted iterate satisfies the floor by design
    res.objective_trace.push_back(lambda_next);
    res.iterations = t;
    if (had_radar) {
      const double prev = res.objective_trace[res.objective_trace.size() - 2];
      if (lambda_next - prev <=
          p.tolerance * std::max(1.0, std::abs(prev))) {
        converged = true;
        break;
      }
    }
  }

  if (infeasible && res.iterations > 0) converged = true;
  if (infeasible && res.iterations == 0) {
    // The SCNR floor is unattainable even before any margin shaping; report
    // the radar-focused start as the best-achieved operating point.
    res.status = DesignStatus::Infeasible;
    finalize(res, p, x);
    return res;
  }
  res.status = converged ? DesignStatus::Converged : DesignStatus::IterLimit;
  finalize(res, p, x);
  return res;
}

DesignResult design_continuous(const DesignProblem& p) {
  DesignProblem q = p;
  q.dac = DacMode::Infinite;
  return (q.chi > 0.0) ? design_qod(q) : design_qos(q);
}

}  // namespace isac
