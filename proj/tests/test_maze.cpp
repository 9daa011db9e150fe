#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "latentlab/error.hpp"
#include "latentlab/maze.hpp"
#include "latentlab/maze_io.hpp"
#include "latentlab/random.hpp"
#include "oracle.hpp"

using namespace latentlab;

TEST_SUITE("maze") {
  TEST_CASE("gen_dfs yields spanning trees") {
    for (int n = 1; n <= 50; n += (n < 10 ? 1 : 7)) {
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const LatticeMaze m = gen_dfs(n, seed);
        CHECK(m.edge_count() == static_cast<std::size_t>(n * n - 1));
        CHECK(oracle::components(m) == 1);
        CHECK_FALSE(has_cycle(m));
      }
    }
  }

  TEST_CASE("gen_dfs degenerate and training sizes") {
    const LatticeMaze single = gen_dfs(1, 3);
    CHECK(single.edge_count() == 0);
    CHECK(component_count(single) == 1);
    const MazeConfig config{5, 0.0, true, 1};
    CHECK(config.side() == 9);
  }

  TEST_CASE("gen_dfs is deterministic and seed dependent") {
    CHECK(gen_dfs(12, 99) == gen_dfs(12, 99));
    CHECK_FALSE(gen_dfs(12, 99) == gen_dfs(12, 100));
  }

  TEST_CASE("every edge joins lattice neighbours") {
    const LatticeMaze m = percolate(gen_dfs(7, 4), 0.3, 5);
    for (const auto& e : m.edges()) CHECK(lattice_adjacent(e.a, e.b));
    CHECK(m.edge_count() <= static_cast<std::size_t>(2 * 7 * 6));
    LatticeMaze bad(3);
    CHECK_THROWS_AS(bad.add_edge({0, 0}, {1, 1}), DomainError);
  }

  TEST_CASE("percolate at the extremes") {
    const LatticeMaze tree = gen_dfs(6, 8);
    CHECK(percolate(tree, 0.0, 1) == tree);
    const LatticeMaze full = percolate(tree, 1.0, 1);
    CHECK(full == LatticeMaze::full(6));
    CHECK(full.edge_count() == static_cast<std::size_t>(2 * 6 * 5));
    CHECK_THROWS_AS(percolate(tree, -0.1, 1), DomainError);
    CHECK_THROWS_AS(percolate(tree, 1.5, 1), DomainError);
  }

  TEST_CASE("percolate keeps existing edges and adds only walls") {
    const LatticeMaze tree = gen_dfs(8, 2);
    const LatticeMaze out = percolate(tree, 0.4, 9);
    for (const auto& e : tree.edges()) CHECK(out.has_edge(e.a, e.b));
    CHECK(out.edge_count() >= tree.edge_count());
  }

  TEST_CASE("has_cycle") {
    const LatticeMaze tree = gen_dfs(5, 11);
    CHECK_FALSE(has_cycle(tree));
    CHECK(has_cycle(LatticeMaze::full(2)));
    LatticeMaze plus = tree;
    for (const auto& e : LatticeMaze::full(5).edges()) {
      if (!plus.has_edge(e.a, e.b)) {
        plus.add_edge(e.a, e.b);
        break;
      }
    }
    CHECK(has_cycle(plus));
    for (std::uint64_t s = 0; s < 50; ++s) {
      const LatticeMaze t = gen_dfs(5, s);
      const LatticeMaze p = percolate(t, 0.2, s + 1000);
      CHECK(has_cycle(p) == (p.edge_count() > t.edge_count()));
    }
  }

  TEST_CASE("sample_endpoints respects validity") {
    int no_start = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
      const LatticeMaze t = gen_dfs(5, s);
      try {
        const Endpoints e = sample_endpoints(t, true, s);
        CHECK(t.degree(e.start) == 1);
        CHECK(e.start != e.end);
        CHECK_FALSE(lattice_adjacent(e.start, e.end));
      } catch (const NoValidStart&) {
        ++no_start;  // every dead end was the end or next to it
      }
      const Endpoints f = sample_endpoints(t, false, s);
      CHECK(f.start != f.end);
      CHECK_FALSE(lattice_adjacent(f.start, f.end));
    }
    CHECK(no_start < 20);
  }

  TEST_CASE("full 2x2 lattice has no dead end") {
    CHECK_THROWS_AS(sample_endpoints(LatticeMaze::full(2), true, 0), NoValidStart);
  }

  TEST_CASE("start is uniform over valid nodes") {
    // Tally starts conditioned on the end and pool one chi-square statistic
    // over all ends.
    const LatticeMaze t = gen_dfs(5, 21);
    std::map<Node, std::map<Node, int>> tally;
    const int samples = 10000;
    for (int s = 0; s < samples; ++s) {
      const Endpoints e = sample_endpoints(t, false, derive_seed(77, static_cast<std::uint64_t>(s)));
      ++tally[e.end][e.start];
    }
    // End is uniform over all 25 nodes.
    double chi_end = 0;
    for (int r = 0; r < 5; ++r) {
      for (int c = 0; c < 5; ++c) {
        int count = 0;
        for (const auto& [start, k] : tally[Node{r, c}]) count += k;
        const double expected = samples / 25.0;
        chi_end += (count - expected) * (count - expected) / expected;
      }
    }
    // 24 degrees of freedom, 0.01 critical value 42.98.
    CHECK(chi_end < 42.98);
    // Pool the start statistic across ends.
    double chi = 0;
    int dof = 0;
    for (const auto& [end, starts] : tally) {
      int total = 0;
      for (const auto& [s, k] : starts) total += k;
      int valid = 0;
      for (int r = 0; r < 5; ++r) {
        for (int c = 0; c < 5; ++c) {
          const Node n{r, c};
          if (n != end && !lattice_adjacent(n, end)) ++valid;
        }
      }
      for (int r = 0; r < 5; ++r) {
        for (int c = 0; c < 5; ++c) {
          const Node n{r, c};
          if (n == end || lattice_adjacent(n, end)) {
            CHECK(starts.count(n) == 0);
            continue;
          }
          const double expected = static_cast<double>(total) / valid;
          const auto it = starts.find(n);
          const double seen = it == starts.end() ? 0.0 : it->second;
          chi += (seen - expected) * (seen - expected) / expected;
        }
      }
      dof += valid - 1;
    }
    // Wilson-Hilferty upper 1% point of chi-square with dof degrees.
    const double z = 2.326;
    const double k = dof;
    const double crit = k * std::pow(1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k)), 3.0);
    CHECK(chi < crit);
  }

  TEST_CASE("generate_maze retries NoValidStart and reports attempts") {
    const MazeConfig config{5, 1.0, true, 3};
    CHECK_THROWS_AS(generate_maze(config, 5), NoValidStart);
    const MazeConfig ok{5, 0.0, true, 3};
    const GeneratedMaze g = generate_maze(ok);
    CHECK(g.attempts == 1);
    CHECK(g.maze.degree(g.endpoints.start) == 1);
    CHECK(generate_maze(ok).maze == g.maze);
  }

  TEST_CASE("config validation") {
    CHECK_THROWS_AS((MazeConfig{0, 0.0, true, 0}.validate()), DomainError);
    CHECK_THROWS_AS((MazeConfig{3, 1.1, true, 0}.validate()), DomainError);
    CHECK_NOTHROW((MazeConfig{1, 0.0, true, 0}.validate()));
  }

  TEST_CASE("maze JSON round trip") {
    const GeneratedMaze g = generate_maze({6, 0.1, false, 42});
    const GeneratedMaze back = maze_from_json(maze_to_json(g));
    CHECK(back.maze == g.maze);
    CHECK(back.endpoints == g.endpoints);
    CHECK(back.config.grid_n == 6);
    CHECK(back.config.seed == 42);
    auto doc = maze_to_json(g);
    doc["edges"].push_back({0, 0, 2, 2});
    CHECK_THROWS_AS(maze_from_json(doc), FormatError);
  }
}
