#pragma once

#include <compare>
#include <cstdint>
#include <vector>

namespace latentlab {

struct Node {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const Node&, const Node&) = default;
};

/// Unordered lattice edge stored with `a < b`.
struct Edge {
  Node a;
  Node b;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline bool lattice_adjacent(Node a, Node b) noexcept {
  const int dr = a.row > b.row ? a.row - b.row : b.row - a.row;
  const int dc = a.col > b.col ? a.col - b.col : b.col - a.col;
  return dr + dc == 1;
}

/// Generation parameters for a single maze. The raster side is
/// 2 * grid_n - 1.
struct MazeConfig {
  int grid_n = 5;
  double p = 0.0;
  bool deadend_start = true;
  std::uint64_t seed = 0;

  int side() const noexcept { return 2 * grid_n - 1; }
  void validate() const;
};

/// Undirected subgraph of the grid_n x grid_n lattice.
class LatticeMaze {
public:
  explicit LatticeMaze(int grid_n);

  /// Every lattice edge present.
  static LatticeMaze full(int grid_n);

  int grid_n() const noexcept { return grid_n_; }
  int side() const noexcept { return 2 * grid_n_ - 1; }
  int node_count() const noexcept { return grid_n_ * grid_n_; }
  std::size_t edge_count() const noexcept { return edge_count_; }
  static std::size_t lattice_edge_count(int grid_n) noexcept {
    return 2 * static_cast<std::size_t>(grid_n) * static_cast<std::size_t>(grid_n - 1);
  }

  bool contains(Node n) const noexcept {
    return n.row >= 0 && n.col >= 0 && n.row < grid_n_ && n.col < grid_n_;
  }
  int index(Node n) const noexcept { return n.row * grid_n_ + n.col; }
  Node node(int index) const noexcept { return {index / grid_n_, index % grid_n_}; }

  bool has_edge(Node a, Node b) const noexcept;
  /// Adds the edge; returns false if it was already present. Throws
  /// DomainError for nodes that are not lattice-adjacent.
  bool add_edge(Node a, Node b);

  int degree(Node n) const noexcept;
  /// Maze neighbours in N, E, S, W order.
  std::vector<Node> neighbors(Node n) const;
  /// Edges in canonical order (row-major over the lower endpoint, east
  /// before south).
  std::vector<Edge> edges() const;

  friend bool operator==(const LatticeMaze&, const LatticeMaze&) = default;

private:
  int grid_n_;
  std::size_t edge_count_ = 0;
  std::vector<std::uint8_t> east_;   // (r, c) -- (r, c + 1)
  std::vector<std::uint8_t> south_;  // (r, c) -- (r + 1, c)
};

struct Endpoints {
  Node start;
  Node end;

  friend bool operator==(const Endpoints&, const Endpoints&) = default;
};

/// Randomized depth-first search spanning tree.
LatticeMaze gen_dfs(int grid_n, std::uint64_t seed);

/// Adds each absent lattice edge independently with probability p.
LatticeMaze percolate(const LatticeMaze& maze, double p, std::uint64_t seed);

/// End uniform over all nodes, then start uniform over nodes that are neither
/// the end nor lattice-adjacent to it (dead ends only when deadend_start).
/// Throws NoValidStart when no candidate survives.
Endpoints sample_endpoints(const LatticeMaze& maze, bool deadend_start, std::uint64_t seed);

int component_count(const LatticeMaze& maze);
bool has_cycle(const LatticeMaze& maze);

struct GeneratedMaze {
  MazeConfig config;
  LatticeMaze maze;
  Endpoints endpoints;
  int attempts = 1;
};

/// RDFS, percolation and endpoint sampling from one config. A NoValidStart
/// draw is retried with the next derived seed, up to max_attempts.
GeneratedMaze generate_maze(const MazeConfig& config, int max_attempts = 1000);

/// Single attempt with no retry; throws NoValidStart.
GeneratedMaze generate_maze_once(const MazeConfig& config, std::uint64_t attempt_seed);

}  // namespace latentlab
