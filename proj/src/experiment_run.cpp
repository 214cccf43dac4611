#include "isac/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <thread>

#include "isac/designs.hpp"

namespace isac {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double to_db(double v) { return 10.0 * std::log10(v); }

std::string status_name(DesignStatus s) {
  switch (s) {
    case DesignStatus::Converged: return "converged";
    case DesignStatus::IterLimit: return "iter_limit";
    case DesignStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

DesignProblem point_problem(const SystemConfig& cfg, ConfigPair cp,
                            double gamma_lin, double chi_lin) {
  DesignProblem p = make_design_problem(cfg);
  p.dac = cp.dac;
  p.adc = cp.adc;
  p.chi = chi_lin;
  if (chi_lin <= 0.0) p.gammas.assign(cfg.n_users, gamma_lin);
  return p;
}

DesignResult solve_point(const DesignProblem& p) {
  return (p.chi > 0.0) ? design_qod(p) : design_qos(p);
}

/** config, <label>, qscnr_ta_db, qscnr_mc_db, qscnr_mc_stderr, margin,
 *  iters, status */
ResultRow scnr_row(const ExperimentSpec& spec, const SystemConfig& cfg,
                   ConfigPair cp, const std::string& label_cell) {
  const DesignResult res =
      solve_point(point_problem(cfg, cp, db_to_linear(spec.gamma_db), 0.0));
  ResultRow row;
  row.status = status_name(res.status);
  row.cells = {config_name(cp), label_cell};
  if (res.status == DesignStatus::Infeasible || res.x.size() == 0) {
    row.cells.insert(row.cells.end(), {"nan", "nan", "nan", "nan", "0"});
  } else {
    const RadarScene scene = make_radar_scene(cfg);
    const McQscnrResult mc = mc_qscnr(res.f, res.x, scene, cfg,
                                      spec.resolved_mc(), cp.adc);
    const bool mc_ok = mc.qscnr.value > 0.0;
    // Standard error mapped to dB through d(10 log10 v) = (10/ln10) dv/v.
    const double se_db =
        mc_ok ? 10.0 / std::log(10.0) * mc.qscnr.std_error / mc.qscnr.value
              : 0.0;
    row.cells.push_back(format_cell(to_db(res.final_qscnr)));
    row.cells.push_back(mc_ok ? format_cell(to_db(mc.qscnr.value)) : "nan");
    row.cells.push_back(mc_ok ? format_cell(se_db) : "nan");
    row.cells.push_back(format_cell(res.final_margin));
    row.cells.push_back(std::to_string(res.iterations));
  }
  row.cells.push_back(row.status);
  return row;
}

/** config, <label>, ber, ber_stderr, sep, sep_stderr, sep_lb, sep_ub,
 *  alpha_min, status -- the two bound columns are dropped when with_bounds
 *  is false. */
ResultRow ber_row(const ExperimentSpec& spec, const SystemConfig& cfg,
                  ConfigPair cp, const std::string& label_cell,
                  bool with_bounds) {
  DesignProblem p = point_problem(cfg, cp, 0.0, db_to_linear(spec.chi_db));
  const SymbolDesignBatch batch =
      design_symbol_batch(p, spec.n_symbol_designs, spec.seed);
  ResultRow row;
  row.cells = {config_name(cp), label_cell};
  if (batch.designs.empty()) {
    row.status = "infeasible";
    const int n_metric = with_bounds ? 7 : 5;
    for (int i = 0; i < n_metric; ++i) row.cells.push_back("nan");
  } else {
    row.status = (batch.n_infeasible == 0) ? "converged" : "partial";
    const McBerResult mc = mc_ber(p, batch, spec.resolved_mc());
    row.cells.push_back(format_cell(mc.ber.value));
    row.cells.push_back(format_cell(mc.ber.std_error));
    row.cells.push_back(format_cell(mc.sep.value));
    row.cells.push_back(format_cell(mc.sep.std_error));
    if (with_bounds) {
      row.cells.push_back(format_cell(mc.pooled_bounds.lower));
      row.cells.push_back(format_cell(mc.pooled_bounds.upper_clamped));
    }
    row.cells.push_back(format_cell(mc.alpha_min));
  }
  row.cells.push_back(row.status);
  return row;
}

using Task = std::function<std::vector<ResultRow>()>;

}  // namespace

ResultTable run_experiment(const ExperimentSpec& spec, int jobs) {
  spec.validate();
  ResultTable table;
  std::vector<Task> tasks;
  const SystemConfig base = spec.resolved_config();

  switch (spec.experiment) {
    case Experiment::QosSweep:
      table.columns = {"config", "gamma_db",        "qscnr_ta_db",
                       "qscnr_mc_db", "qscnr_mc_stderr", "margin",
                       "iters",  "status"};
      for (ConfigPair cp : spec.configs)
        for (double g : spec.grid)
          tasks.push_back([=, &spec] {
            ExperimentSpec pt = spec;
            pt.gamma_db = g;
            return std::vector<ResultRow>{
                scnr_row(pt, base, cp, format_cell(g))};
          });
      break;

    case Experiment::AntennaSweepRx:
    case Experiment::AntennaSweepTx: {
      const bool rx = (spec.experiment == Experiment::AntennaSweepRx);
      table.columns = {"config", rx ? "n_rx" : "n_tx", "qscnr_ta_db",
                       "qscnr_mc_db", "qscnr_mc_stderr", "margin",
                       "iters",  "status"};
      for (ConfigPair cp : spec.configs)
        for (double n : spec.grid)
          tasks.push_back([=, &spec] {
            SystemConfig cfg = base;
            (rx ? cfg.n_rx : cfg.n_tx) = static_cast<int>(n);
            return std::vector<ResultRow>{
                scnr_row(spec, cfg, cp,
                         std::to_string(static_cast<int>(n)))};
          });
      break;
    }

    case Experiment::Roc:
      table.columns = {"config",  "delta",     "threshold", "pfa_mc",
                       "pfa_stderr", "pd_mc",  "pd_stderr", "pd_model",
                       "status"};
      for (ConfigPair cp : spec.configs)
        tasks.push_back([=, &spec] {
          const DesignResult res = solve_point(
              point_problem(base, cp, db_to_linear(spec.gamma_db), 0.0));
          std::vector<ResultRow> rows;
          if (res.status == DesignStatus::Infeasible || res.x.size() == 0) {
            for (double d : spec.grid) {
              ResultRow row;
              row.status = "infeasible";
              row.cells = {config_name(cp), format_cell(d), "nan", "nan",
                           "nan", "nan", "nan", "nan", row.status};
              rows.push_back(row);
            }
            return rows;
          }
          const RadarScene scene = make_radar_scene(base);
          const std::vector<McRocPoint> pts =
              mc_roc(res.f, res.x, scene, base, spec.resolved_mc(),
                     spec.grid, cp.adc);
          for (const McRocPoint& pt : pts) {
            ResultRow row;
            row.status = status_name(res.status);
            row.cells = {config_name(cp),
                         format_cell(pt.delta),
                         format_cell(pt.threshold),
                         format_cell(pt.pfa.value),
                         format_cell(pt.pfa.std_error),
                         format_cell(pt.pd.value),
                         format_cell(pt.pd.std_error),
                         format_cell(pt.pd_model),
                         row.status};
            rows.push_back(row);
          }
          return rows;
        });
      break;

    case Experiment::QodSweep:
      table.columns = {"config", "chi_db", "margin", "qscnr_ta_db", "iters",
                       "status"};
      for (ConfigPair cp : spec.configs)
        for (double chi_db : spec.grid)
          tasks.push_back([=] {
            const DesignResult res = solve_point(
                point_problem(base, cp, 0.0, db_to_linear(chi_db)));
            ResultRow row;
            row.status = status_name(res.status);
            row.cells = {config_name(cp), format_cell(chi_db)};
            if (res.x.size() == 0) {
              row.cells.insert(row.cells.end(), {"nan", "nan", "0"});
            } else {
              row.cells.push_back(format_cell(res.final_margin));
              row.cells.push_back(format_cell(to_db(res.final_qscnr)));
              row.cells.push_back(std::to_string(res.iterations));
            }
            row.cells.push_back(row.status);
            return std::vector<ResultRow>{row};
          });
      break;

    case Experiment::BerVsSnr:
      table.columns = {"config",     "snr_c_db", "ber",    "ber_stderr",
                       "sep",        "sep_stderr", "sep_lb", "sep_ub",
                       "alpha_min",  "status"};
      for (ConfigPair cp : spec.configs)
        for (double snr_db : spec.grid)
          tasks.push_back([=, &spec] {
            ExperimentSpec pt = spec;
            pt.snr_c_db = snr_db;
            return std::vector<ResultRow>{ber_row(
                pt, pt.resolved_config(), cp, format_cell(snr_db), true)};
          });
      break;

    case Experiment::UserSweep:
      table.columns = {"config", "n_users",    "ber",       "ber_stderr",
                       "sep",    "sep_stderr", "alpha_min", "status"};
      for (ConfigPair cp : spec.configs)
        for (double u : spec.grid)
          tasks.push_back([=, &spec] {
            ExperimentSpec pt = spec;
            pt.n_users = static_cast<int>(u);
            return std::vector<ResultRow>{
                ber_row(pt, pt.resolved_config(), cp,
                        std::to_string(static_cast<int>(u)), false)};
          });
      break;

    case Experiment::Ree:
      table.columns = {"config", "n_rx",  "scnr_db", "total_power_w",
                       "ree",    "iters", "status"};
      for (ConfigPair cp : spec.configs)
        for (double n : spec.grid)
          tasks.push_back([=, &spec] {
            SystemConfig cfg = base;
            cfg.n_rx = static_cast<int>(n);
            const DesignResult res = solve_point(
                point_problem(cfg, cp, db_to_linear(spec.gamma_db), 0.0));
            PowerModel pm;
            pm.dac_bits = (cp.dac == DacMode::OneBit) ? 1 : 10;
            pm.adc_bits = (cp.adc == AdcMode::OneBit) ? 1 : 10;
            ResultRow row;
            row.status = status_name(res.status);
            row.cells = {config_name(cp),
                         std::to_string(static_cast<int>(n))};
            if (res.x.size() == 0) {
              row.cells.insert(row.cells.end(), {"nan", "nan", "nan", "0"});
            } else {
              const double power = pm.total_power(cfg.n_tx, cfg.n_rx);
              row.cells.push_back(format_cell(to_db(res.final_qscnr)));
              row.cells.push_back(format_cell(power));
              row.cells.push_back(format_cell(radar_energy_efficiency(
                  res.final_qscnr, cfg.n_tx, cfg.n_rx, pm)));
              row.cells.push_back(std::to_string(res.iterations));
            }
            row.cells.push_back(row.status);
            return std::vector<ResultRow>{row};
          });
      break;

    case Experiment::Convergence:
      table.columns = {"config", "run", "iter", "objective", "status"};
      for (ConfigPair cp : spec.configs)
        for (double r : spec.grid)
          tasks.push_back([=, &spec] {
            SystemConfig cfg = base;
            cfg.rng_seed = spec.seed + static_cast<std::uint64_t>(r);
            const DesignResult res = solve_point(
                point_problem(cfg, cp, db_to_linear(spec.gamma_db), 0.0));
            std::vector<ResultRow> rows;
            const std::string run_cell =
                std::to_string(static_cast<int>(r));
            const std::string status = status_name(res.status);
            for (std::size_t i = 0; i < res.objective_trace.size(); ++i) {
              ResultRow row;
              row.status = status;
              row.cells = {config_name(cp), run_cell,
                           std::to_string(i),
                           format_cell(res.objective_trace[i]), status};
              rows.push_back(row);
            }
            if (rows.empty()) {
              ResultRow row;
              row.status = status;
              row.cells = {config_name(cp), run_cell, "0", "nan", status};
              rows.push_back(row);
            }
            return rows;
          });
      break;
  }

  std::vector<std::vector<ResultRow>> outs(tasks.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= tasks.size()) return;
      const auto t0 = std::chrono::steady_clock::now();
      outs[i] = tasks[i]();
      const auto t1 = std::chrono::steady_clock::now();
      const double ms =
          std::chrono::duration<double, std::milli>(t1 - t0).count();
      for (ResultRow& row : outs[i])
        row.wall_ms = ms / static_cast<double>(outs[i].size());
    }
  };

  const int n_workers =
      std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  for (std::vector<ResultRow>& rows : outs)
    for (ResultRow& row : rows) table.rows.push_back(std::move(row));
  return table;
}

}  // namespace isac
