/**
 * Command-line front end: run experiment specs, validate them, and solve
 * dumped integer programs.  Exit codes: 0 success, 2 when every result row
 * is infeasible, 1 on any error.
 */
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "isac/experiment.hpp"
#include "isac/ilp.hpp"
#include "isac/version.hpp"

namespace {

std::string snake_name(isac::Experiment e) {
  const std::string camel = isac::experiment_name(e);
  std::string out;
  for (char c : camel) {
    if (std::isupper(static_cast<unsigned char>(c)) && !out.empty())
      out += '_';
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

void preflight_writable(const std::string& path) {
  std::ofstream probe(path, std::ios::app);
  if (!probe)
    throw std::runtime_error("cannot write to " + path);
}

int cmd_run(const std::string& spec_path, bool seed_given, std::uint64_t seed,
            const std::string& out_dir, bool paper_scale, int jobs) {
  isac::ExperimentSpec spec = isac::load_config(spec_path);
  if (seed_given) spec.seed = seed;
  if (!out_dir.empty()) spec.output_path = out_dir;
  isac::apply_desk_scale(spec, paper_scale);

  std::filesystem::create_directories(spec.output_path);
  const std::string stem =
      (std::filesystem::path(spec.output_path) / snake_name(spec.experiment))
          .string();
  const std::string csv_path = stem + ".csv";
  const std::string json_path = stem + ".json";
  preflight_writable(csv_path);
  preflight_writable(json_path);

  const isac::ResultTable table = isac::run_experiment(spec, jobs);
  isac::emit_results(table, spec, csv_path, json_path);

  std::size_t infeasible = 0;
  for (const isac::ResultRow& row : table.rows)
    if (row.status == "infeasible") ++infeasible;
  std::cout << isac::experiment_name(spec.experiment) << ": "
            << table.rows.size() << " rows (" << infeasible
            << " infeasible) -> " << csv_path << "\n";
  return (infeasible == table.rows.size()) ? 2 : 0;
}

int cmd_validate(const std::string& spec_path) {
  const isac::ExperimentSpec spec = isac::load_config(spec_path);
  std::cout << isac::emit_spec_json(spec);
  return 0;
}

int cmd_solve_ilp(const std::string& path, std::int64_t node_limit) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  const isac::IlpInstance inst = isac::load_ilp(in);
  isac::BnbOptions opt;
  opt.node_limit = node_limit;
  const isac::BnbResult res = isac::solve_bnb(inst, opt);

  const char* status = (res.status == isac::BnbStatus::Optimal)
                           ? "optimal"
                           : (res.status == isac::BnbStatus::Infeasible)
                                 ? "infeasible"
                                 : "node_limit";
  std::cout << "status: " << status << "\n";
  std::cout << "nodes: " << res.nodes << "\n";
  if (res.x.size() > 0) {
    std::cout << "objective: " << isac::format_cell(res.objective) << "\n";
    if (inst.has_continuous)
      std::cout << "continuous: " << isac::format_cell(res.continuous_value)
                << "\n";
    std::cout << "x:";
    for (Eigen::Index i = 0; i < res.x.size(); ++i)
      std::cout << (res.x(i) >= 0.0 ? " +" : " -");
    std::cout << "\n";
    if (res.status == isac::BnbStatus::NodeLimit)
      std::cout << "gap: " << isac::format_cell(res.gap) << "\n";
  }
  return (res.status == isac::BnbStatus::Infeasible) ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1-bit massive-MIMO ISAC transceiver design simulator"};
  app.set_version_flag("--version", std::string(isac::kGitDescribe));
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "Run an experiment spec");
  std::string run_spec;
  std::uint64_t seed = 1;
  std::string out_dir;
  bool paper_scale = false;
  int jobs = 1;
  run->add_option("--spec", run_spec, "Path to a JSON experiment spec")
      ->required();
  CLI::Option* seed_opt =
      run->add_option("--seed", seed, "Override the spec's RNG seed");
  run->add_option("--out", out_dir, "Output directory (default: spec's)");
  run->add_flag("--paper-scale", paper_scale,
                "Keep full-scale sizes instead of the CI defaults");
  run->add_option("--jobs", jobs, "Worker threads for grid points")
      ->check(CLI::PositiveNumber);

  CLI::App* validate = app.add_subcommand(
      "validate", "Parse a spec and print its resolved form");
  std::string val_spec;
  validate->add_option("--spec", val_spec, "Path to a JSON experiment spec")
      ->required();

  CLI::App* silp =
      app.add_subcommand("solve-ilp", "Solve a dumped integer program");
  std::string ilp_path;
  std::int64_t node_limit = 1'000'000;
  silp->add_option("file", ilp_path, "Instance file")->required();
  silp->add_option("--node-limit", node_limit, "Search node budget")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(run_spec, seed_opt->count() > 0, seed, out_dir,
                     paper_scale, jobs);
    if (validate->parsed()) return cmd_validate(val_spec);
    if (silp->parsed()) return cmd_solve_ilp(ilp_path, node_limit);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
