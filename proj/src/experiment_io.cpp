#include "isac/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "isac/version.hpp"

namespace isac {

namespace {

using nlohmann::json;

constexpr double kDegToRad = kPi / 180.0;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

[[noreturn]] void fail(const std::string& msg) {
  throw std::runtime_error("spec: " + msg);
}

const std::set<std::string>& known_fields() {
  static const std::set<std::string> fields = {
      "experiment",      "configs",        "n_tx",
      "n_rx",            "n_users",        "power_budget",
      "target_angle_deg", "clutter_angles_deg", "snr_r_db",
      "cnr_db",          "snr_c_db",       "modulation_order",
      "gamma_db",        "chi_db",         "grid",
      "n_trials",        "n_symbol_designs", "seed",
      "output_path"};
  return fields;
}

double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) fail("field " + key + ": expected a number");
  return v.get<double>();
}

std::int64_t as_integer(const json& v, const std::string& key) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number()) {
    const double d = v.get<double>();
    if (d == std::floor(d)) return static_cast<std::int64_t>(d);
  }
  fail("field " + key + ": expected an integer");
}

std::vector<double> as_number_array(const json& v, const std::string& key) {
  if (!v.is_array()) fail("field " + key + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(as_number(e, key));
  return out;
}

std::vector<double> default_grid(Experiment e) {
  switch (e) {
    case Experiment::QosSweep:
      return {0.0, 4.0, 8.0, 12.0};
    case Experiment::AntennaSweepRx:
    case Experiment::AntennaSweepTx:
    case Experiment::Ree:
      return {16.0, 32.0, 64.0, 128.0};
    case Experiment::Roc:
      return {0.01, 0.05, 0.1, 0.2, 0.3, 0.5};
    case Experiment::QodSweep:
      return {4.0, 8.0, 12.0};
    case Experiment::BerVsSnr:
      return {0.0, 5.0, 10.0, 15.0};
    case Experiment::UserSweep:
      return {2.0, 4.0, 6.0};
    case Experiment::Convergence:
      return {0.0, 1.0, 2.0};
  }
  fail("unreachable experiment");
}

std::vector<ConfigPair> all_configs() {
  return {{DacMode::OneBit, AdcMode::OneBit},
          {DacMode::OneBit, AdcMode::Infinite},
          {DacMode::Infinite, AdcMode::OneBit},
          {DacMode::Infinite, AdcMode::Infinite}};
}

}  // namespace

std::string experiment_name(Experiment e) {
  switch (e) {
    case Experiment::QosSweep: return "QosSweep";
    case Experiment::AntennaSweepRx: return "AntennaSweepRx";
    case Experiment::AntennaSweepTx: return "AntennaSweepTx";
    case Experiment::Roc: return "Roc";
    case Experiment::QodSweep: return "QodSweep";
    case Experiment::BerVsSnr: return "BerVsSnr";
    case Experiment::UserSweep: return "UserSweep";
    case Experiment::Ree: return "Ree";
    case Experiment::Convergence: return "Convergence";
  }
  fail("unreachable experiment");
}

Experiment experiment_from_name(const std::string& name) {
  static const std::vector<Experiment> all = {
      Experiment::QosSweep,    Experiment::AntennaSweepRx,
      Experiment::AntennaSweepTx, Experiment::Roc,
      Experiment::QodSweep,    Experiment::BerVsSnr,
      Experiment::UserSweep,   Experiment::Ree,
      Experiment::Convergence};
  for (Experiment e : all)
    if (experiment_name(e) == name) return e;
  fail("field experiment: unknown experiment \"" + name + "\"");
}

std::string config_name(ConfigPair cp) {
  const std::string dac = (cp.dac == DacMode::OneBit) ? "1bit" : "inf";
  const std::string adc = (cp.adc == AdcMode::OneBit) ? "1bit" : "inf";
  return dac + "-" + adc;
}

ConfigPair config_from_name(const std::string& name) {
  for (ConfigPair cp : all_configs())
    if (config_name(cp) == name) return cp;
  fail("field configs: unknown configuration \"" + name +
       "\" (expected dac-adc with each of 1bit or inf)");
}

SystemConfig ExperimentSpec::resolved_config() const {
  SystemConfig c;
  c.n_tx = n_tx;
  c.n_rx = n_rx;
  c.n_users = n_users;
  c.power_budget = power_budget;
  c.radar_noise_power = 1.0;
  c.radar_snr = db_to_linear(snr_r_db);
  c.target_angle = target_angle_deg * kDegToRad;
  c.clutter_angles.clear();
  c.clutter_cnrs.clear();
  for (double a : clutter_angles_deg) {
    c.clutter_angles.push_back(a * kDegToRad);
    c.clutter_cnrs.push_back(db_to_linear(cnr_db));
  }
  c.comm_noise_powers.assign(static_cast<std::size_t>(n_users),
                             power_budget / db_to_linear(snr_c_db));
  c.modulation_order = modulation_order;
  c.rng_seed = seed;
  return c;
}

McConfig ExperimentSpec::resolved_mc() const {
  McConfig mc;
  mc.n_trials = n_trials;
  mc.seed = seed;
  return mc;
}

void ExperimentSpec::validate() const {
  if (configs.empty()) fail("configs must be non-empty");
  if (grid.empty()) fail("grid must be non-empty");
  if (n_trials < 1000) fail("n_trials must be at least 1000");
  if (n_symbol_designs < 1) fail("n_symbol_designs must be positive");
  if (std::abs(target_angle_deg) > 90.0)
    fail("target_angle_deg must lie in [-90, 90]");
  for (double a : clutter_angles_deg)
    if (std::abs(a) > 90.0) fail("clutter_angles_deg must lie in [-90, 90]");
  switch (experiment) {
    case Experiment::AntennaSweepRx:
    case Experiment::AntennaSweepTx:
    case Experiment::Ree:
    case Experiment::UserSweep:
    case Experiment::Convergence:
      for (double g : grid)
        if (g != std::floor(g) || (experiment != Experiment::Convergence &&
                                   g < 1.0) ||
            g < 0.0)
          fail("grid for " + experiment_name(experiment) +
               " must hold nonnegative integers");
      break;
    case Experiment::Roc:
      for (double g : grid)
        if (!(g > 0.0 && g < 1.0))
          fail("grid for Roc must hold false-alarm levels in (0, 1)");
      break;
    default:
      break;
  }
  resolved_config().validate();
}

ExperimentSpec parse_spec_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("spec: ") + e.what());
  }
  if (!j.is_object()) fail("top level must be a JSON object");
  // A result sidecar embeds the spec under "spec"; accept it directly.
  if (j.contains("spec")) {
    if (!j["spec"].is_object()) fail("field spec: expected an object");
    j = j["spec"];
  }

  for (const auto& item : j.items())
    if (known_fields().find(item.key()) == known_fields().end())
      fail("unknown field \"" + item.key() + "\"");

  ExperimentSpec s;
  if (j.contains("experiment")) {
    if (!j["experiment"].is_string())
      fail("field experiment: expected a string");
    s.experiment = experiment_from_name(j["experiment"].get<std::string>());
  }

  if (j.contains("configs")) {
    if (!j["configs"].is_array())
      fail("field configs: expected an array of strings");
    for (const auto& e : j["configs"]) {
      if (!e.is_string()) fail("field configs: expected an array of strings");
      s.configs.push_back(config_from_name(e.get<std::string>()));
    }
  } else {
    s.configs = all_configs();
  }

  auto read_int = [&](const char* key, int& dst, bool* flag = nullptr) {
    if (!j.contains(key)) return;
    const std::int64_t v = as_integer(j[key], key);
    if (v < std::numeric_limits<int>::min() ||
        v > std::numeric_limits<int>::max())
      fail(std::string("field ") + key + ": out of range");
    dst = static_cast<int>(v);
    if (flag) *flag = true;
  };
  auto read_double = [&](const char* key, double& dst, bool* flag = nullptr) {
    if (!j.contains(key)) return;
    dst = as_number(j[key], key);
    if (flag) *flag = true;
  };

  bool has_gamma = false, has_chi = false, has_snr_c = false;
  read_int("n_tx", s.n_tx, &s.has_n_tx);
  read_int("n_rx", s.n_rx, &s.has_n_rx);
  read_int("n_users", s.n_users);
  read_int("modulation_order", s.modulation_order);
  read_int("n_symbol_designs", s.n_symbol_designs);
  read_double("power_budget", s.power_budget);
  read_double("target_angle_deg", s.target_angle_deg);
  read_double("snr_r_db", s.snr_r_db);
  read_double("cnr_db", s.cnr_db);
  read_double("snr_c_db", s.snr_c_db, &has_snr_c);
  read_double("gamma_db", s.gamma_db, &has_gamma);
  read_double("chi_db", s.chi_db, &has_chi);

  if (j.contains("clutter_angles_deg"))
    s.clutter_angles_deg =
        as_number_array(j["clutter_angles_deg"], "clutter_angles_deg");
  if (j.contains("grid")) {
    s.grid = as_number_array(j["grid"], "grid");
    if (s.grid.empty()) fail("field grid: must not be empty");
  }
  if (j.contains("n_trials")) {
    s.n_trials = as_integer(j["n_trials"], "n_trials");
    s.has_n_trials = true;
  }
  if (j.contains("seed")) {
    const std::int64_t v = as_integer(j["seed"], "seed");
    if (v < 0) fail("field seed: must be nonnegative");
    s.seed = static_cast<std::uint64_t>(v);
  }
  if (j.contains("output_path")) {
    if (!j["output_path"].is_string())
      fail("field output_path: expected a string");
    s.output_path = j["output_path"].get<std::string>();
  }

  // Experiment-specific baselines for fields the user left unset.
  if (!has_gamma && s.experiment == Experiment::Roc) s.gamma_db = 12.0;
  if (!has_snr_c &&
      (s.experiment == Experiment::QodSweep ||
       s.experiment == Experiment::BerVsSnr ||
       s.experiment == Experiment::UserSweep))
    s.snr_c_db = 15.0;
  if (!has_chi && s.experiment == Experiment::UserSweep) s.chi_db = 8.0;
  if (s.grid.empty()) s.grid = default_grid(s.experiment);

  s.validate();
  return s;
}

ExperimentSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spec file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec_text(ss.str());
}

void apply_desk_scale(ExperimentSpec& spec, bool paper_scale) {
  if (!paper_scale) {
    if (!spec.has_n_tx) spec.n_tx = 16;
    if (!spec.has_n_rx) spec.n_rx = 64;
    if (!spec.has_n_trials) spec.n_trials = 100000;
  }
  spec.has_n_tx = spec.has_n_rx = spec.has_n_trials = true;
}

std::string emit_spec_json(const ExperimentSpec& spec) {
  json j;
  j["experiment"] = experiment_name(spec.experiment);
  json cfgs = json::array();
  for (ConfigPair cp : spec.configs) cfgs.push_back(config_name(cp));
  j["configs"] = cfgs;
  j["n_tx"] = spec.n_tx;
  j["n_rx"] = spec.n_rx;
  j["n_users"] = spec.n_users;
  j["power_budget"] = spec.power_budget;
  j["target_angle_deg"] = spec.target_angle_deg;
  j["clutter_angles_deg"] = spec.clutter_angles_deg;
  j["snr_r_db"] = spec.snr_r_db;
  j["cnr_db"] = spec.cnr_db;
  j["snr_c_db"] = spec.snr_c_db;
  j["modulation_order"] = spec.modulation_order;
  j["gamma_db"] = spec.gamma_db;
  j["chi_db"] = spec.chi_db;
  j["grid"] = spec.grid;
  j["n_trials"] = spec.n_trials;
  j["n_symbol_designs"] = spec.n_symbol_designs;
  j["seed"] = spec.seed;
  j["output_path"] = spec.output_path;
  return j.dump(2) + "\n";
}

std::string format_cell(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string csv_text(const ResultTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const ResultRow& row : table.rows) {
    for (std::size_t i = 0; i < row.cells.size(); ++i) {
      if (i) out += ',';
      out += row.cells[i];
    }
    out += '\n';
  }
  return out;
}

void emit_results(const ResultTable& table, const ExperimentSpec& spec,
                  const std::string& csv_path, const std::string& json_path) {
  if (table.rows.empty())
    throw std::runtime_error("emit_results: empty result table");
  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) throw std::runtime_error("cannot write: " + csv_path);
  std::ofstream sidecar(json_path, std::ios::trunc);
  if (!sidecar) throw std::runtime_error("cannot write: " + json_path);

  csv << csv_text(table);

  json meta;
  meta["spec"] = json::parse(emit_spec_json(spec));
  meta["seed"] = spec.seed;
  meta["git_describe"] = kGitDescribe;
  meta["columns"] = table.columns;
  json rows = json::array();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    json r;
    r["index"] = i;
    r["status"] = table.rows[i].status;
    r["wall_ms"] = table.rows[i].wall_ms;
    rows.push_back(r);
  }
  meta["rows"] = rows;
  sidecar << meta.dump(2) << "\n";
  if (!csv || !sidecar)
    throw std::runtime_error("emit_results: write failed");
}

}  // namespace isac
