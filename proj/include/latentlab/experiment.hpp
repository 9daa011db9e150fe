#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "latentlab/dynamics.hpp"
#include "latentlab/report.hpp"
#include "latentlab/solver.hpp"

namespace latentlab {

struct TdaSettings {
  std::size_t burn_in = 3001;  // first kept iterate
  std::size_t end = 3400;      // last kept iterate, inclusive
  double alpha = 0.25;
  double ball_radius = 0.01;
};

/// `count` synthetic trajectories of one kind. `noise` is a fraction of the
/// construction's scale, so the per-point noise norm is noise * scale.
struct SyntheticGroup {
  SyntheticKind kind = SyntheticKind::FixedPoint;
  std::size_t count = 100;
  double noise = 0.0;
  int dim = 128;
};

/// A named batch: either synthetic trajectories or trajectory files matched
/// by shell globs.
struct TdaSource {
  std::string name;
  std::optional<SyntheticGroup> synthetic;
  std::vector<std::string> globs;
};

struct ExperimentConfig {
  std::vector<int> sizes{9, 19, 29, 39, 49};  // raster sides, odd and >= 3
  int mazes_per_size = 100;
  std::vector<double> p_values;  // empty means the default grid
  bool deadend_start = true;
  std::uint64_t seed = 0;
  SolverKind solver = SolverKind::Bfs;
  TdaSettings tda;
  std::vector<TdaSource> sources;
  int workers = 0;  // 0 picks the hardware concurrency
  std::filesystem::path output_dir = "out";

  /// Throws ConfigError naming the first offending field.
  void validate() const;
  std::vector<double> effective_p_values() const;
};

/// {0, 0.02, ..., 0.20, 0.5, 1.0}.
std::vector<double> default_percolation_grid();

/// grid_n = (n + 1) / 2; throws ConfigError unless n is odd and >= 3.
int grid_n_from_side(int side);

/// Seed of maze `index` at raster side `side`. Depends only on these three
/// values, so adding sizes or p values leaves existing samples unchanged.
std::uint64_t maze_seed(std::uint64_t master, int side, std::size_t index);

/// Seed of trajectory `index` in the named source group.
std::uint64_t trajectory_seed(std::uint64_t master, const std::string& group, std::size_t index);

/// Parses the config document. Unknown keys and wrong types are ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig read_experiment_config(const std::filesystem::path& path);

/// Calls fn(i) for i in [0, count) on up to `workers` threads. Results must
/// be written into per-index slots, which keeps the outcome independent of
/// scheduling. The exception of the lowest failing index is rethrown after
/// all workers finish.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

struct MazeBatch {
  std::vector<AccuracyRecord> records;
  long long attempts = 0;  // generation attempts, >= records.size()
};

/// Generates and solves `count` mazes of raster side `side`. Failures are
/// rethrown as ExperimentError carrying the maze id.
MazeBatch evaluate_mazes(const ExperimentConfig& config, int side, double p, bool deadend_start);

/// Every sweep fills `detail`, when given, with one row per maze or
/// trajectory.
SweepReport run_size_sweep(const ExperimentConfig& config, SweepReport* detail = nullptr);
SweepReport run_percolation_sweep(const ExperimentConfig& config, SweepReport* detail = nullptr);
/// Throws ConfigError when deadend_start is set.
SweepReport run_neighbor_breakdown(const ExperimentConfig& config, SweepReport* detail = nullptr);
SweepReport run_tda_batch(const ExperimentConfig& config, SweepReport* detail = nullptr);
SweepReport run_tda_batch(const ExperimentConfig& config, const std::vector<TdaSource>& sources,
                          SweepReport* detail = nullptr);

/// Sorted paths matching a shell glob; an empty list when nothing matches.
std::vector<std::filesystem::path> expand_glob(const std::string& pattern);

}  // namespace latentlab
