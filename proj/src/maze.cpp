#include "latentlab/maze.hpp"

#include <array>
#include <numeric>
#include <string>

#include "latentlab/error.hpp"
#include "latentlab/random.hpp"

namespace latentlab {

namespace {

constexpr std::array<Node, 4> kSteps{{{-1, 0}, {0, 1}, {1, 0}, {0, -1}}};  // N E S W

class DisjointSet {
public:
  explicit DisjointSet(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

private:
  std::vector<int> parent_;
};

}  // namespace

void MazeConfig::validate() const {
  if (grid_n < 1) throw DomainError("grid_n must be >= 1, got " + std::to_string(grid_n));
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("percolation p must lie in [0, 1]");
}

LatticeMaze::LatticeMaze(int grid_n) : grid_n_(grid_n) {
  if (grid_n < 1) throw DomainError("grid_n must be >= 1, got " + std::to_string(grid_n));
  const auto cells = static_cast<std::size_t>(grid_n) * static_cast<std::size_t>(grid_n);
  east_.assign(cells, 0);
  south_.assign(cells, 0);
}

LatticeMaze LatticeMaze::full(int grid_n) {
  LatticeMaze maze(grid_n);
  for (int r = 0; r < grid_n; ++r) {
    for (int c = 0; c < grid_n; ++c) {
      if (c + 1 < grid_n) maze.add_edge({r, c}, {r, c + 1});
      if (r + 1 < grid_n) maze.add_edge({r, c}, {r + 1, c});
    }
  }
  return maze;
}

bool LatticeMaze::has_edge(Node a, Node b) const noexcept {
  if (!contains(a) || !contains(b) || !lattice_adjacent(a, b)) return false;
  if (b < a) std::swap(a, b);
  return a.row == b.row ? east_[index(a)] != 0 : south_[index(a)] != 0;
}

bool LatticeMaze::add_edge(Node a, Node b) {
  if (!contains(a) || !contains(b) || !lattice_adjacent(a, b)) {
    throw DomainError("edge (" + std::to_string(a.row) + "," + std::to_string(a.col) + ")-(" +
                      std::to_string(b.row) + "," + std::to_string(b.col) +
                      ") does not join lattice-adjacent nodes");
  }
  if (b < a) std::swap(a, b);
  auto& slot = a.row == b.row ? east_[index(a)] : south_[index(a)];
  if (slot != 0) return false;
  slot = 1;
  ++edge_count_;
  return true;
}

int LatticeMaze::degree(Node n) const noexcept {
  int d = 0;
  for (const auto step : kSteps) d += has_edge(n, {n.row + step.row, n.col + step.col}) ? 1 : 0;
  return d;
}

std::vector<Node> LatticeMaze::neighbors(Node n) const {
  std::vector<Node> out;
  out.reserve(4);
  for (const auto step : kSteps) {
    const Node m{n.row + step.row, n.col + step.col};
    if (has_edge(n, m)) out.push_back(m);
  }
  return out;
}

std::vector<Edge> LatticeMaze::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (int r = 0; r < grid_n_; ++r) {
    for (int c = 0; c < grid_n_; ++c) {
      const int i = r * grid_n_ + c;
      if (east_[i]) out.push_back({{r, c}, {r, c + 1}});
      if (south_[i]) out.push_back({{r, c}, {r + 1, c}});
    }
  }
  return out;
}

LatticeMaze gen_dfs(int grid_n, std::uint64_t seed) {
  LatticeMaze maze(grid_n);
  Rng rng(seed);

  struct Frame {
    Node node;
    std::array<Node, 4> order;
    int count = 0;
    int next = 0;
  };

  std::vector<std::uint8_t> visited(static_cast<std::size_t>(maze.node_count()), 0);
  auto push = [&](std::vector<Frame>& stack, Node n) {
    Frame frame{n, {}, 0, 0};
    for (const auto step : kSteps) {
      const Node m{n.row + step.row, n.col + step.col};
      if (maze.contains(m)) frame.order[frame.count++] = m;
    }
    rng.shuffle(std::span<Node>(frame.order.data(), static_cast<std::size_t>(frame.count)));
    visited[maze.index(n)] = 1;
    stack.push_back(frame);
  };

  std::vector<Frame> stack;
  stack.reserve(static_cast<std::size_t>(maze.node_count()));
  push(stack, maze.node(static_cast<int>(rng.uniform_below(maze.node_count()))));
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next == top.count) {
      stack.pop_back();
      continue;
    }
    const Node from = top.node;
    const Node to = top.order[top.next++];
    if (visited[maze.index(to)]) continue;
    maze.add_edge(from, to);
    push(stack, to);
  }
  return maze;
}

LatticeMaze percolate(const LatticeMaze& maze, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("percolation p must lie in [0, 1]");
  LatticeMaze out = maze;
  Rng rng(seed);
  const int n = maze.grid_n();
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (c + 1 < n && !maze.has_edge({r, c}, {r, c + 1}) && rng.uniform01() < p) {
        out.add_edge({r, c}, {r, c + 1});
      }
      if (r + 1 < n && !maze.has_edge({r, c}, {r + 1, c}) && rng.uniform01() < p) {
        out.add_edge({r, c}, {r + 1, c});
      }
    }
  }
  return out;
}

Endpoints sample_endpoints(const LatticeMaze& maze, bool deadend_start, std::uint64_t seed) {
  Rng rng(seed);
  const Node end = maze.node(static_cast<int>(rng.uniform_below(maze.node_count())));

  std::vector<Node> valid;
  for (int i = 0; i < maze.node_count(); ++i) {
    const Node n = maze.node(i);
    if (n == end || lattice_adjacent(n, end)) continue;
    if (deadend_start && maze.degree(n) != 1) continue;
    valid.push_back(n);
  }
  if (valid.empty()) {
    throw NoValidStart(deadend_start ? "no dead-end node is a valid start"
                                     : "no node is a valid start");
  }
  const Node start = valid[rng.uniform_below(valid.size())];
  return {start, end};
}

int component_count(const LatticeMaze& maze) {
  DisjointSet sets(maze.node_count());
  int components = maze.node_count();
  for (const auto& e : maze.edges()) {
    if (sets.unite(maze.index(e.a), maze.index(e.b))) --components;
  }
  return components;
}

bool has_cycle(const LatticeMaze& maze) {
  const auto forest_edges =
      static_cast<std::size_t>(maze.node_count() - component_count(maze));
  return maze.edge_count() > forest_edges;
}

GeneratedMaze generate_maze_once(const MazeConfig& config, std::uint64_t attempt_seed) {
  config.validate();
  LatticeMaze tree = gen_dfs(config.grid_n, derive_seed(attempt_seed, 0));
  LatticeMaze maze = percolate(tree, config.p, derive_seed(attempt_seed, 1));
  const Endpoints ends = sample_endpoints(maze, config.deadend_start, derive_seed(attempt_seed, 2));
  return {config, std::move(maze), ends, 1};
}

GeneratedMaze generate_maze(const MazeConfig& config, int max_attempts) {
  config.validate();
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    try {
      GeneratedMaze out = generate_maze_once(config, derive_seed(config.seed, attempt));
      out.attempts = attempt + 1;
      return out;
    } catch (const NoValidStart&) {
    }
  }
  throw NoValidStart("no valid start after " + std::to_string(max_attempts) + " attempts");
}

}  // namespace latentlab
