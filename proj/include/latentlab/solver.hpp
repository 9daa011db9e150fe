#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "latentlab/maze.hpp"
#include "latentlab/raster.hpp"

namespace latentlab {

using Path = std::vector<Node>;

/// Shortest start-to-end path. Neighbours expand N, E, S, W and the first
/// parent found is kept, so ties resolve the same way every time. Throws
/// NoPath if the endpoints are disconnected.
Path bfs_shortest_path(const LatticeMaze& maze, const Endpoints& endpoints);

/// Repeatedly removes every degree-1 node other than the endpoints (all such
/// nodes per round) and renders what survives.
Prediction dead_end_fill(const LatticeMaze& maze, const Endpoints& endpoints);

/// 1 iff every pixel agrees. Throws ShapeError on different sides.
int exact_match(const Prediction& prediction, const Prediction& truth);

/// Number of distinct simple start-to-end paths, stopping at cap.
std::size_t count_simple_paths_capped(const LatticeMaze& maze, const Endpoints& endpoints,
                                      std::size_t cap);

enum class SolverKind { Bfs, DeadEnd };

SolverKind parse_solver(const std::string& name);
std::string to_string(SolverKind kind);

/// Runs the solver and returns its rendered prediction.
Prediction solve(SolverKind kind, const LatticeMaze& maze, const Endpoints& endpoints);

/// Canonical label: the rendered BFS path.
Prediction solution_label(const LatticeMaze& maze, const Endpoints& endpoints);

struct AccuracyRecord {
  std::string maze_id;
  int grid_n = 0;
  double p = 0.0;
  bool deadend_start = true;
  int start_degree = 0;
  bool has_cycle = false;
  SolverKind algo = SolverKind::Bfs;
  int accuracy = 0;
};

inline constexpr const char* kAccuracyCsvHeader =
    "maze_id,grid_n,p,deadend_start,start_degree,has_cycle,algo,accuracy";

std::vector<std::string> to_csv_fields(const AccuracyRecord& record);
std::string to_csv_row(const AccuracyRecord& record);

}  // namespace latentlab
