#include "latentlab/solver.hpp"

#include <algorithm>
#include <deque>

#include "latentlab/error.hpp"
#include "latentlab/format.hpp"

namespace latentlab {

Path bfs_shortest_path(const LatticeMaze& maze, const Endpoints& endpoints) {
  const int count = maze.node_count();
  std::vector<int> parent(static_cast<std::size_t>(count), -1);
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(count), 0);
  const int source = maze.index(endpoints.start);
  const int target = maze.index(endpoints.end);

  std::deque<int> queue{source};
  seen[source] = 1;
  while (!queue.empty() && !seen[target]) {
    const int current = queue.front();
    queue.pop_front();
    for (const Node next : maze.neighbors(maze.node(current))) {
      const int i = maze.index(next);
      if (seen[i]) continue;
      seen[i] = 1;
      parent[i] = current;
      queue.push_back(i);
    }
  }
  if (!seen[target]) throw NoPath("end is unreachable from start");

  Path path;
  for (int at = target; at != -1; at = parent[at]) path.push_back(maze.node(at));
  std::reverse(path.begin(), path.end());
  return path;
}

Prediction dead_end_fill(const LatticeMaze& maze, const Endpoints& endpoints) {
  const int count = maze.node_count();
  std::vector<std::uint8_t> alive(static_cast<std::size_t>(count), 1);
  std::vector<int> degree(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) degree[i] = maze.degree(maze.node(i));
  const int start = maze.index(endpoints.start);
  const int end = maze.index(endpoints.end);

  // A node with degree 0 that is not an endpoint is isolated and equally
  // fillable; this only occurs for disconnected inputs.
  auto fillable = [&](int i) { return alive[i] && i != start && i != end && degree[i] <= 1; };

  std::vector<int> round;
  for (int i = 0; i < count; ++i) {
    if (fillable(i)) round.push_back(i);
  }
  while (!round.empty()) {
    for (const int i : round) alive[i] = 0;
    std::vector<int> next;
    for (const int i : round) {
      for (const Node m : maze.neighbors(maze.node(i))) {
        const int j = maze.index(m);
        if (!alive[j]) continue;
        --degree[j];
        if (fillable(j)) next.push_back(j);
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    round = std::move(next);
  }

  Prediction image(maze.side());
  for (int i = 0; i < count; ++i) {
    if (!alive[i]) continue;
    const Node n = maze.node(i);
    image.set(2 * n.row, 2 * n.col);
  }
  for (const auto& e : maze.edges()) {
    if (alive[maze.index(e.a)] && alive[maze.index(e.b)]) image.set(e.a.row + e.b.row, e.a.col + e.b.col);
  }
  return image;
}

int exact_match(const Prediction& prediction, const Prediction& truth) {
  if (prediction.side != truth.side) {
    throw ShapeError("prediction side " + std::to_string(prediction.side) + " differs from label side " +
                     std::to_string(truth.side));
  }
  return prediction.pixels == truth.pixels ? 1 : 0;
}

std::size_t count_simple_paths_capped(const LatticeMaze& maze, const Endpoints& endpoints,
                                      std::size_t cap) {
  if (cap < 1) throw DomainError("cap must be >= 1");
  std::vector<std::uint8_t> on_path(static_cast<std::size_t>(maze.node_count()), 0);
  std::size_t found = 0;

  // Explicit stack of (node, next neighbour slot).
  struct Frame {
    Node node;
    std::vector<Node> next;
    std::size_t slot = 0;
  };
  std::vector<Frame> stack;
  stack.push_back({endpoints.start, maze.neighbors(endpoints.start), 0});
  on_path[maze.index(endpoints.start)] = 1;
  while (!stack.empty() && found < cap) {
    Frame& top = stack.back();
    if (top.slot == top.next.size()) {
      on_path[maze.index(top.node)] = 0;
      stack.pop_back();
      continue;
    }
    const Node n = top.next[top.slot++];
    if (on_path[maze.index(n)]) continue;
    if (n == endpoints.end) {
      ++found;
      continue;
    }
    on_path[maze.index(n)] = 1;
    stack.push_back({n, maze.neighbors(n), 0});
  }
  return found;
}

SolverKind parse_solver(const std::string& name) {
  if (name == "bfs") return SolverKind::Bfs;
  if (name == "deadend") return SolverKind::DeadEnd;
  throw ConfigError("unknown solver '" + name + "' (expected bfs or deadend)");
}

std::string to_string(SolverKind kind) { return kind == SolverKind::Bfs ? "bfs" : "deadend"; }

Prediction solve(SolverKind kind, const LatticeMaze& maze, const Endpoints& endpoints) {
  switch (kind) {
    case SolverKind::Bfs:
      return rasterize_solution(maze, bfs_shortest_path(maze, endpoints));
    case SolverKind::DeadEnd:
      return dead_end_fill(maze, endpoints);
  }
  throw ConfigError("unknown solver");
}

Prediction solution_label(const LatticeMaze& maze, const Endpoints& endpoints) {
  return rasterize_solution(maze, bfs_shortest_path(maze, endpoints));
}

std::vector<std::string> to_csv_fields(const AccuracyRecord& r) {
  return {r.maze_id,
          std::to_string(r.grid_n),
          format_real(r.p),
          r.deadend_start ? "true" : "false",
          std::to_string(r.start_degree),
          r.has_cycle ? "true" : "false",
          to_string(r.algo),
          std::to_string(r.accuracy)};
}

std::string to_csv_row(const AccuracyRecord& r) {
  const auto fields = to_csv_fields(r);
  std::string row = fields.front();
  for (std::size_t i = 1; i < fields.size(); ++i) row += "," + fields[i];
  return row;
}

}  // namespace latentlab
