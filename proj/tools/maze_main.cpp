#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "cli_common.hpp"
#include "latentlab/format.hpp"
#include "latentlab/maze_io.hpp"
#include "latentlab/random.hpp"
#include "latentlab/raster.hpp"
#include "latentlab/solver.hpp"

namespace fs = std::filesystem;
using namespace latentlab;

namespace {

std::string maze_name(std::size_t index) {
  std::string digits = std::to_string(index);
  if (digits.size() < 5) digits.insert(0, 5 - digits.size(), '0');
  return "maze_" + digits;
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice maze generation and oracle solving"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate mazes with rasters and solution labels");
  int grid_n = 5;
  double p = 0.0;
  bool deadend_start = true;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  std::string out_dir;
  gen->add_option("--grid-n", grid_n, "lattice nodes per side")->required();
  gen->add_option("--p", p, "percolation probability")->default_val(0.0);
  gen->add_option("--deadend-start", deadend_start, "start must be a dead end (true|false)")->default_val(true);
  gen->add_option("--count", count, "number of mazes")->default_val(1);
  gen->add_option("--seed", seed, "master seed")->default_val(0);
  gen->add_option("--out", out_dir, "output directory")->required();

  auto* solve_cmd = app.add_subcommand("solve", "solve stored mazes and score them against labels");
  std::string algo = "bfs";
  std::string in_dir;
  std::string labels_dir;
  std::string report_path;
  solve_cmd->add_option("--algo", algo, "bfs or deadend")->default_val("bfs");
  solve_cmd->add_option("--in", in_dir, "directory of maze JSON files")->required();
  solve_cmd->add_option("--labels", labels_dir, "directory of label PPMs")->required();
  solve_cmd->add_option("--report", report_path, "accuracy CSV")->required();

  return cli::run(app, argc, argv, [&] {
    if (gen->parsed()) {
      const fs::path out(out_dir);
      make_dir(out);
      make_dir(out / "labels");
      std::ofstream index(out / "index.csv", std::ios::binary);
      if (!index) throw IoError("cannot write " + (out / "index.csv").string());
      index << "maze_id,grid_n,p,deadend_start,seed,attempts,start_degree,has_cycle\n";
      for (std::size_t i = 0; i < count; ++i) {
        MazeConfig config{grid_n, p, deadend_start, derive_seed(seed, i)};
        try {
          config.validate();
        } catch (const Error& e) {
          throw ConfigError(e.what());
        }
        const GeneratedMaze maze = generate_maze(config);
        const std::string name = maze_name(i);
        write_maze_json(out / (name + ".json"), maze);
        write_ppm(out / (name + ".ppm"), rasterize(maze.maze, maze.endpoints));
        write_ppm(out / "labels" / (name + ".ppm"), solution_label(maze.maze, maze.endpoints));
        index << name << ',' << grid_n << ',' << format_real(p) << ',' << (deadend_start ? "true" : "false") << ','
              << config.seed << ',' << maze.attempts << ',' << maze.maze.degree(maze.endpoints.start) << ','
              << (has_cycle(maze.maze) ? "true" : "false") << '\n';
        if (maze.attempts > 1) std::cerr << name << ": resampled endpoints, " << maze.attempts << " attempts\n";
      }
      return cli::kSuccess;
    }

    const SolverKind kind = parse_solver(algo);
    std::vector<fs::path> mazes;
    if (!fs::is_directory(in_dir)) throw IoError(in_dir + " is not a directory");
    for (const auto& entry : fs::directory_iterator(in_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") mazes.push_back(entry.path());
    }
    std::sort(mazes.begin(), mazes.end());
    std::ofstream report(report_path, std::ios::binary);
    if (!report) throw IoError("cannot write " + report_path);
    report << kAccuracyCsvHeader << '\n';
    for (const auto& path : mazes) {
      const GeneratedMaze maze = read_maze_json(path);
      const std::string id = path.stem().string();
      const Prediction label = read_binary_ppm(fs::path(labels_dir) / (id + ".ppm"));
      AccuracyRecord rec;
      rec.maze_id = id;
      rec.grid_n = maze.config.grid_n;
      rec.p = maze.config.p;
      rec.deadend_start = maze.config.deadend_start;
      rec.start_degree = maze.maze.degree(maze.endpoints.start);
      rec.has_cycle = has_cycle(maze.maze);
      rec.algo = kind;
      rec.accuracy = exact_match(solve(kind, maze.maze, maze.endpoints), label);
      report << to_csv_row(rec) << '\n';
    }
    if (!report) throw IoError("failed writing " + report_path);
    return cli::kSuccess;
  });
}
