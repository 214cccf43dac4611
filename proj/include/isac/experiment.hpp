/**
 * Experiment harness: JSON spec ingestion, the four converter
 * configurations, sweep runners, and CSV/JSON emission.
 *
 * A spec keeps the user-facing units (dB, degrees) exactly as given;
 * conversion to the linear quantities consumed by the library happens in
 * one place, when a grid point's SystemConfig is materialized.  Every
 * experiment is a pure function of (spec, seed): rerunning produces
 * byte-identical CSV regardless of worker count.
 */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isac/montecarlo.hpp"
#include "isac/types.hpp"

namespace isac {

enum class Experiment {
  QosSweep,
  AntennaSweepRx,
  AntennaSweepTx,
  Roc,
  QodSweep,
  BerVsSnr,
  UserSweep,
  Ree,
  Convergence,
};

std::string experiment_name(Experiment e);
Experiment experiment_from_name(const std::string& name);

/** One converter configuration; names look like "1bit-inf" (DAC-ADC). */
struct ConfigPair {
  DacMode dac = DacMode::OneBit;
  AdcMode adc = AdcMode::OneBit;
};

std::string config_name(ConfigPair cp);
ConfigPair config_from_name(const std::string& name);

struct ExperimentSpec {
  Experiment experiment = Experiment::QosSweep;
  std::vector<ConfigPair> configs;  // default: all four

  int n_tx = 128;
  int n_rx = 128;
  int n_users = 4;
  double power_budget = 1.0;
  double target_angle_deg = 10.0;
  std::vector<double> clutter_angles_deg{-50.0, 30.0};
  double snr_r_db = 15.0;
  double cnr_db = 30.0;
  double snr_c_db = 5.0;
  int modulation_order = 8;

  double gamma_db = 8.0;  // link-quality target when not swept
  double chi_db = 12.0;   // sensing floor when not swept
  std::vector<double> grid;  // meaning depends on the experiment

  std::int64_t n_trials = 1000000;
  int n_symbol_designs = 200;
  std::uint64_t seed = 1;
  std::string output_path = "results";

  // Which size fields were given explicitly (they then survive the
  // desk-scale downgrade).
  bool has_n_tx = false;
  bool has_n_rx = false;
  bool has_n_trials = false;

  /** Linear-unit system configuration for the spec's base point. */
  SystemConfig resolved_config() const;
  McConfig resolved_mc() const;
  void validate() const;
};

/**
 * Parse a JSON spec.  Absent fields default to the full-scale baseline
 * above (with a few per-experiment overrides, see the README); unknown
 * fields and type mismatches raise std::runtime_error naming the field.
 */
ExperimentSpec parse_spec_text(const std::string& json_text);
ExperimentSpec load_config(const std::string& path);

/**
 * CI sizing: fields not given explicitly shrink to n_tx = 16, n_rx = 64,
 * n_trials = 1e5.  With paper_scale the full-scale baseline stands.  Either
 * way the fields are marked explicit afterwards, so an emitted spec reruns
 * identically under any flag.
 */
void apply_desk_scale(ExperimentSpec& spec, bool paper_scale);

/** Full-fidelity JSON image of a spec; parse_spec_text inverts it. */
std::string emit_spec_json(const ExperimentSpec& spec);

struct ResultRow {
  std::vector<std::string> cells;  // aligned with ResultTable::columns
  std::string status;
  double wall_ms = 0.0;
};

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<ResultRow> rows;
};

ResultTable run_experiment(const ExperimentSpec& spec, int jobs = 1);

/** Header plus one comma-joined line per row, floats at 9 digits. */
std::string csv_text(const ResultTable& table);

/**
 * Write the CSV and a JSON sidecar (resolved spec, seed, build identity,
 * per-row wall time).  Both paths are opened before any value is written so
 * an unwritable target fails fast.
 */
void emit_results(const ResultTable& table, const ExperimentSpec& spec,
                  const std::string& csv_path, const std::string& json_path);

/** Nine-significant-digit float image used for all CSV cells. */
std::string format_cell(double v);

}  // namespace isac
