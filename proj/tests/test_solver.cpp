#include <doctest.h>

#include "latentlab/error.hpp"
#include "latentlab/maze.hpp"
#include "latentlab/random.hpp"
#include "latentlab/solver.hpp"
#include "oracle.hpp"

using namespace latentlab;

namespace {

void check_path_valid(const LatticeMaze& maze, const Path& path, const Endpoints& e) {
  REQUIRE(!path.empty());
  CHECK(path.front() == e.start);
  CHECK(path.back() == e.end);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) CHECK(maze.has_edge(path[i], path[i + 1]));
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("bfs length equals the graph distance") {
    for (int g = 2; g <= 6; ++g) {
      for (std::uint64_t s = 0; s < 40; ++s) {
        const GeneratedMaze m = generate_maze({g, 0.3, s % 2 == 0, s * 31 + g});
        const auto dist = oracle::hop_distances(m.maze);
        const Path path = bfs_shortest_path(m.maze, m.endpoints);
        check_path_valid(m.maze, path, m.endpoints);
        const int d = dist[m.maze.index(m.endpoints.start)][m.maze.index(m.endpoints.end)];
        CHECK(static_cast<int>(path.size()) - 1 == d);
      }
    }
  }

  TEST_CASE("bfs examples") {
    const LatticeMaze full = LatticeMaze::full(3);
    const Path path = bfs_shortest_path(full, {{0, 0}, {2, 2}});
    CHECK(path.size() == 5);
    // N, E, S, W expansion with first parent kept prefers the eastward route
    CHECK(path == Path{{0, 0}, {0, 1}, {0, 2}, {1, 2}, {2, 2}});
    CHECK(bfs_shortest_path(full, {{1, 1}, {1, 2}}).size() == 2);

    LatticeMaze split(3);
    split.add_edge({0, 0}, {0, 1});
    CHECK_THROWS_AS(bfs_shortest_path(split, {{0, 0}, {2, 2}}), NoPath);
  }

  TEST_CASE("bfs on trees finds the unique path") {
    for (std::uint64_t s = 0; s < 50; ++s) {
      const GeneratedMaze m = generate_maze({6, 0.0, true, s});
      const Path path = bfs_shortest_path(m.maze, m.endpoints);
      CHECK(oracle::simple_paths(m.maze, m.endpoints.start, m.endpoints.end) == 1);
      check_path_valid(m.maze, path, m.endpoints);
    }
  }

  TEST_CASE("dead-end fill equals the label on trees") {
    const int sizes[] = {5, 10, 15};
    for (int i = 0; i < 1000; ++i) {
      const int g = sizes[i % 3];
      const GeneratedMaze m = generate_maze({g, 0.0, i % 2 == 0, derive_seed(11, i)});
      CHECK(exact_match(dead_end_fill(m.maze, m.endpoints), solution_label(m.maze, m.endpoints)) == 1);
    }
  }

  TEST_CASE("dead-end fill fails on every cyclic maze") {
    int cyclic = 0;
    for (std::uint64_t s = 0; cyclic < 1000; ++s) {
      const GeneratedMaze m = generate_maze({5 + static_cast<int>(s % 6), 0.1, true, derive_seed(12, s)});
      if (!has_cycle(m.maze)) continue;
      ++cyclic;
      const Prediction fill = dead_end_fill(m.maze, m.endpoints);
      const Prediction label = solution_label(m.maze, m.endpoints);
      CHECK(exact_match(fill, label) == 0);
      // the fill keeps the label path
      for (std::size_t k = 0; k < label.pixels.size(); ++k) {
        if (label.pixels[k] != 0) CHECK(fill.pixels[k] != 0);
      }
    }
  }

  TEST_CASE("dead-end fill on a corridor keeps everything") {
    LatticeMaze m(5);
    for (int c = 0; c + 1 < 5; ++c) m.add_edge({2, c}, {2, c + 1});
    const Endpoints e{{2, 0}, {2, 4}};
    const Prediction fill = dead_end_fill(m, e);
    CHECK(fill.white_count() == 9);
    for (int c = 0; c < 9; ++c) CHECK(fill.at(4, c));
  }

  TEST_CASE("exact match") {
    BinaryImage a(3);
    a.set(1, 1);
    BinaryImage b = a;
    CHECK(exact_match(a, b) == 1);
    b.set(0, 2);
    CHECK(exact_match(a, b) == 0);
    CHECK_THROWS_AS(exact_match(BinaryImage(3), BinaryImage(5)), ShapeError);
  }

  TEST_CASE("simple path counting") {
    const LatticeMaze square = LatticeMaze::full(2);
    const Endpoints corners{{0, 0}, {1, 1}};
    CHECK(count_simple_paths_capped(square, corners, 5) == 2);
    CHECK(count_simple_paths_capped(square, corners, 1) == 1);
    CHECK_THROWS_AS(count_simple_paths_capped(square, corners, 0), DomainError);

    const LatticeMaze full3 = LatticeMaze::full(3);
    const std::size_t all = oracle::simple_paths(full3, {0, 0}, {2, 2});
    CHECK(all == 12);
    CHECK(count_simple_paths_capped(full3, {{0, 0}, {2, 2}}, 1000) == all);
    CHECK(count_simple_paths_capped(full3, {{0, 0}, {2, 2}}, 7) == 7);

    for (std::uint64_t s = 0; s < 200; ++s) {
      const GeneratedMaze m = generate_maze({4, 0.2, false, derive_seed(13, s)});
      const std::size_t truth = oracle::simple_paths(m.maze, m.endpoints.start, m.endpoints.end);
      CHECK(count_simple_paths_capped(m.maze, m.endpoints, 1 << 20) == truth);
      CHECK((count_simple_paths_capped(m.maze, m.endpoints, 2) == 1) == (truth == 1));
    }
  }

  TEST_CASE("solver names and records") {
    CHECK(parse_solver("bfs") == SolverKind::Bfs);
    CHECK(parse_solver("deadend") == SolverKind::DeadEnd);
    CHECK(to_string(SolverKind::DeadEnd) == "deadend");
    CHECK_THROWS_AS(parse_solver("astar"), ConfigError);

    AccuracyRecord r;
    r.maze_id = "n9-p0-0001";
    r.grid_n = 5;
    r.p = 0.02;
    r.start_degree = 1;
    r.accuracy = 1;
    CHECK(to_csv_row(r) == "n9-p0-0001,5,0.02,true,1,false,bfs,1");
  }
}
