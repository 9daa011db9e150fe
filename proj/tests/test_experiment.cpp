#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>

#include <json.hpp>

#include "latentlab/error.hpp"
#include "latentlab/experiment.hpp"

using namespace latentlab;
using nlohmann::json;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.sizes = {5, 9, 13};
  c.mazes_per_size = 40;
  c.seed = 17;
  c.workers = 3;
  return c;
}

TdaSource synthetic_source(const std::string& name, SyntheticKind kind, std::size_t count, double noise) {
  TdaSource s;
  s.name = name;
  s.synthetic = SyntheticGroup{kind, count, noise, 128};
  return s;
}

long long cell_int(const SweepReport& r, std::size_t row, const char* col) { return std::stoll(r.cell(row, col)); }

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("default percolation grid") {
    const std::vector<double> grid = default_percolation_grid();
    REQUIRE(grid.size() == 13);
    CHECK(grid.front() == 0.0);
    CHECK(grid[1] == doctest::Approx(0.02));
    CHECK(grid[10] == doctest::Approx(0.2));
    CHECK(grid[11] == 0.5);
    CHECK(grid[12] == 1.0);
    ExperimentConfig c;
    CHECK(c.effective_p_values() == grid);
    c.p_values = {0.3};
    CHECK(c.effective_p_values() == std::vector<double>{0.3});
  }

  TEST_CASE("raster side to grid size") {
    CHECK(grid_n_from_side(9) == 5);
    CHECK(grid_n_from_side(3) == 2);
    CHECK_THROWS_AS(grid_n_from_side(10), ConfigError);
    CHECK_THROWS_AS(grid_n_from_side(1), ConfigError);
  }

  TEST_CASE("config parsing") {
    const json doc = json::parse(R"({
      "sizes": [9, 19], "mazes_per_size": 3, "p_values": [0, 0.5], "deadend_start": false,
      "seed": 5, "solver": "deadend", "workers": 2, "output_dir": "results",
      "tda": {"burn_in": 10, "end": 50, "alpha": 0.3, "ball_radius": 0.02},
      "sources": [{"name": "fp", "synthetic": {"kind": "fixedpoint", "count": 4, "noise": 0.05, "dim": 16}},
                  {"name": "files", "glob": ["a/*.bin", "b/*.bin"]}]
    })");
    const ExperimentConfig c = config_from_json(doc);
    CHECK(c.sizes == std::vector<int>{9, 19});
    CHECK(c.mazes_per_size == 3);
    CHECK_FALSE(c.deadend_start);
    CHECK(c.solver == SolverKind::DeadEnd);
    CHECK(c.tda.end == 50);
    REQUIRE(c.sources.size() == 2);
    CHECK(c.sources[0].synthetic->count == 4);
    CHECK(c.sources[1].globs.size() == 2);
    CHECK(config_from_json(config_to_json(c)).sizes == c.sizes);
    CHECK(config_to_json(config_from_json(config_to_json(c))) == config_to_json(c));

    CHECK_THROWS_AS(config_from_json(json::parse(R"({"sizez": [9]})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"sizes": "9"})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"sizes": [10]})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"mazes_per_size": 0})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"p_values": [1.5]})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"solver": "astar"})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"tda": {"burn_in": 9, "end": 3}})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"sources": [{"name": "x", "synthetic": {"kind": "loop"}}]})")),
                    ConfigError);
    CHECK_THROWS_AS(read_experiment_config("/nonexistent/config.json"), Error);
  }

  TEST_CASE("seeds") {
    CHECK(maze_seed(1, 9, 0) == maze_seed(1, 9, 0));
    CHECK(maze_seed(1, 9, 0) != maze_seed(1, 9, 1));
    CHECK(maze_seed(1, 9, 0) != maze_seed(1, 19, 0));
    CHECK(maze_seed(1, 9, 0) != maze_seed(2, 9, 0));
    CHECK(trajectory_seed(1, "a", 0) != trajectory_seed(1, "b", 0));
  }

  TEST_CASE("parallel_for covers every index and rethrows the lowest failure") {
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    parallel_for(0, 4, [](std::size_t) { FAIL("no calls expected"); });
    std::atomic<int> calls{0};
    try {
      parallel_for(50, 4, [&](std::size_t i) {
        ++calls;
        if (i == 7 || i == 31) throw RangeError("item " + std::to_string(i));
      });
      FAIL("expected RangeError");
    } catch (const RangeError& e) {
      CHECK(std::string(e.what()) == "item 7");
    }
    CHECK(calls == 50);
  }

  TEST_CASE("size sweep") {
    ExperimentConfig c = small_config();
    SweepReport detail;
    const SweepReport r = run_size_sweep(c, &detail);
    CHECK(r.name == "size-sweep");
    REQUIRE(r.rows.size() == 3);
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      CHECK(r.cell(i, "accuracy") == "1");
      CHECK(cell_int(r, i, "mazes") == 40);
      CHECK(cell_int(r, i, "attempts") >= 40);
    }
    CHECK(detail.rows.size() == 120);
    c.solver = SolverKind::DeadEnd;
    for (const auto& row : run_size_sweep(c).rows) CHECK(row[r.column_index("accuracy")] == "1");

    // workers do not change the output
    c.workers = 1;
    const std::string one = to_csv(run_size_sweep(c));
    c.workers = 4;
    CHECK(to_csv(run_size_sweep(c)) == one);

    c.sizes.clear();
    CHECK(run_size_sweep(c).rows.empty());
  }

  TEST_CASE("adding sizes leaves existing samples unchanged") {
    ExperimentConfig a = small_config();
    a.sizes = {9};
    ExperimentConfig b = a;
    b.sizes = {5, 9};
    SweepReport da;
    SweepReport db;
    run_size_sweep(a, &da);
    run_size_sweep(b, &db);
    const std::vector<std::vector<std::string>> tail(db.rows.end() - static_cast<long>(da.rows.size()), db.rows.end());
    CHECK(tail == da.rows);
  }

  TEST_CASE("percolation sweep") {
    ExperimentConfig c = small_config();
    c.sizes = {9};
    c.p_values = {0.0, 1.0};
    c.solver = SolverKind::DeadEnd;
    c.deadend_start = false;
    const SweepReport r = run_percolation_sweep(c);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.cell(0, "accuracy") == "1");
    CHECK(r.cell(0, "cycle_fraction") == "0");
    CHECK(r.cell(1, "accuracy") == "0");
    CHECK(r.cell(1, "cycle_fraction") == "1");

    // a dead-end start cannot exist on the full lattice
    c.deadend_start = true;
    const SweepReport skipped = run_percolation_sweep(c);
    CHECK(skipped.cell(1, "mazes") == "0");
    CHECK(skipped.cell(1, "accuracy") == "nan");
    CHECK(skipped.notes.size() == r.notes.size() + 1);
    c.solver = SolverKind::Bfs;
    c.p_values = {0.1, 0.3};
    for (const auto& row : run_percolation_sweep(c).rows) CHECK(row[r.column_index("accuracy")] == "1");
  }

  TEST_CASE("neighbour breakdown") {
    ExperimentConfig c = small_config();
    CHECK_THROWS_AS(run_neighbor_breakdown(c), ConfigError);
    c.deadend_start = false;
    c.sizes = {7, 9};
    c.mazes_per_size = 1000;
    const SweepReport r = run_neighbor_breakdown(c);
    std::map<std::string, long long> totals;
    std::map<std::string, int> strata;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      totals[r.cell(i, "n")] += cell_int(r, i, "mazes");
      strata[r.cell(i, "n")] += 1;
      CHECK(r.cell(i, "accuracy") == "1");
      const long long degree = cell_int(r, i, "start_degree");
      CHECK(degree >= 1);
      CHECK(degree <= 4);
    }
    CHECK(totals["7"] == 1000);
    CHECK(totals["9"] == 1000);
    // degree-4 nodes are rare in depth-first trees, so only degrees 1 to 3
    // are certain to appear
    CHECK(strata["7"] >= 3);
    CHECK(strata["9"] >= 3);
  }

  TEST_CASE("tda batch on synthetic groups") {
    ExperimentConfig c;
    c.seed = 3;
    const SweepReport fp = run_tda_batch(c, {synthetic_source("fixed", SyntheticKind::FixedPoint, 100, 0.0)});
    REQUIRE(fp.rows.size() == 1);
    CHECK(fp.rows[0] == std::vector<std::string>{"fixed", "100", "0", "0", "0", "100", "0"});

    const SweepReport mixed = run_tda_batch(c, {synthetic_source("mix-2pt", SyntheticKind::TwoPoint, 75, 0.01),
                                                synthetic_source("mix-loop", SyntheticKind::TwoLoop, 25, 0.01)});
    REQUIRE(mixed.rows.size() == 2);
    const long long wrong = (75 - cell_int(mixed, 0, "two_point_cycle")) + (25 - cell_int(mixed, 1, "two_loop_cycle"));
    CHECK(wrong <= 1);

    CHECK(run_tda_batch(c, {}).rows.empty());
  }

  TEST_CASE("tda batch reports bad files and continues") {
    const auto dir = std::filesystem::temp_directory_path() / "latentlab_tests" / "batch";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    SyntheticSpec spec;
    spec.kind = SyntheticKind::TwoPoint;
    spec.dim = 8;
    spec.length = 60;
    write_trajectory(synth(spec), dir / "a.bin");
    {
      std::ofstream bad(dir / "b.bin", std::ios::binary);
      bad << "not a trajectory";
    }
    ExperimentConfig c;
    c.tda.burn_in = 10;
    c.tda.end = 49;
    TdaSource files;
    files.name = "files";
    files.globs = {(dir / "*.bin").string(), (dir / "none-*.bin").string()};
    SweepReport detail;
    const SweepReport r = run_tda_batch(c, {files}, &detail);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.cell(0, "two_point_cycle") == "1");
    CHECK(r.cell(0, "total") == "1");
    CHECK(r.cell(0, "failed") == "2");
    REQUIRE(detail.rows.size() == 3);
    CHECK(detail.cell(0, "status") == "ok");
    CHECK(detail.cell(1, "status") == "error");
    CHECK(detail.cell(1, "error").find("byte offset") != std::string::npos);
    CHECK(detail.cell(2, "error") == "no files match");
  }

  TEST_CASE("globs are sorted") {
    const auto dir = std::filesystem::temp_directory_path() / "latentlab_tests" / "glob";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    for (const char* name : {"c.txt", "a.txt", "b.txt"}) std::ofstream(dir / name) << "x";
    const auto found = expand_glob((dir / "*.txt").string());
    REQUIRE(found.size() == 3);
    CHECK(found[0].filename() == "a.txt");
    CHECK(found[2].filename() == "c.txt");
    CHECK(expand_glob((dir / "*.none").string()).empty());
  }
}
