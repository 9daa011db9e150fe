#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cli_common.hpp"
#include "latentlab/experiment.hpp"

namespace fs = std::filesystem;
using namespace latentlab;

namespace {

struct Overrides {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<int> sizes;
  std::optional<int> mazes_per_size;
  std::vector<double> p_values;
  std::optional<bool> deadend_start;
  std::optional<std::string> solver;
  std::optional<int> workers;
  std::optional<std::size_t> burn_in;
  std::optional<std::size_t> end;
  std::optional<double> alpha;
  std::optional<double> ball_radius;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment config");
  cmd->add_option("--out", o.out_dir, "output directory (overrides output_dir)");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--workers", o.workers, "worker threads, 0 for all cores");
}

void add_maze_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--sizes", o.sizes, "raster sides n (odd)");
  cmd->add_option("--mazes-per-size", o.mazes_per_size, "mazes per size");
  cmd->add_option("--deadend-start", o.deadend_start, "start must be a dead end (true|false)");
  cmd->add_option("--solver", o.solver, "bfs or deadend");
}

ExperimentConfig load(const Overrides& o) {
  ExperimentConfig config = o.config_path.empty() ? ExperimentConfig{} : read_experiment_config(o.config_path);
  if (!o.out_dir.empty()) config.output_dir = o.out_dir;
  if (o.seed) config.seed = *o.seed;
  if (!o.sizes.empty()) config.sizes = o.sizes;
  if (o.mazes_per_size) config.mazes_per_size = *o.mazes_per_size;
  if (!o.p_values.empty()) config.p_values = o.p_values;
  if (o.deadend_start) config.deadend_start = *o.deadend_start;
  if (o.solver) config.solver = parse_solver(*o.solver);
  if (o.workers) config.workers = *o.workers;
  if (o.burn_in) config.tda.burn_in = *o.burn_in;
  if (o.end) config.tda.end = *o.end;
  if (o.alpha) config.tda.alpha = *o.alpha;
  if (o.ball_radius) config.tda.ball_radius = *o.ball_radius;
  config.validate();
  return config;
}

void write_outputs(const ExperimentConfig& config, const SweepReport& report, const SweepReport& detail) {
  emit_all(report, config.output_dir);
  emit_report(detail, ReportFormat::Csv, config.output_dir / (detail.name + ".csv"));
  for (const auto& note : report.notes) std::cerr << report.name << ": " << note << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiment sweeps over mazes, solvers and trajectories"};
  app.require_subcommand(1);
  Overrides o;

  auto* size_cmd = app.add_subcommand("size-sweep", "accuracy against maze size at p = 0");
  add_common(size_cmd, o);
  add_maze_flags(size_cmd, o);

  auto* perc_cmd = app.add_subcommand("percolation", "accuracy and cycle fraction against p");
  add_common(perc_cmd, o);
  add_maze_flags(perc_cmd, o);
  perc_cmd->add_option("--p-values", o.p_values, "percolation probabilities");

  auto* nb_cmd = app.add_subcommand("neighbors", "accuracy by start degree and size");
  add_common(nb_cmd, o);
  add_maze_flags(nb_cmd, o);

  auto* tda_cmd = app.add_subcommand("tda-batch", "behaviour frequencies per source group");
  add_common(tda_cmd, o);
  tda_cmd->add_option("--burn-in", o.burn_in, "first kept iterate");
  tda_cmd->add_option("--end", o.end, "last kept iterate (inclusive)");
  tda_cmd->add_option("--alpha", o.alpha, "threshold as a fraction of the diameter");
  tda_cmd->add_option("--ball-radius", o.ball_radius, "fixed-point ball radius");

  return cli::run(app, argc, argv, [&] {
    const ExperimentConfig config = load(o);
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) throw IoError("cannot create " + config.output_dir.string() + ": " + ec.message());
    {
      std::ofstream used(config.output_dir / "config_used.json", std::ios::binary);
      used << config_to_json(config).dump(2) << '\n';
    }
    SweepReport detail;
    SweepReport report;
    if (size_cmd->parsed()) report = run_size_sweep(config, &detail);
    if (perc_cmd->parsed()) report = run_percolation_sweep(config, &detail);
    if (nb_cmd->parsed()) report = run_neighbor_breakdown(config, &detail);
    if (tda_cmd->parsed()) report = run_tda_batch(config, &detail);
    write_outputs(config, report, detail);
    return cli::kSuccess;
  });
}
