#include "latentlab/experiment.hpp"

#include <glob.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "latentlab/error.hpp"
#include "latentlab/format.hpp"
#include "latentlab/maze.hpp"
#include "latentlab/random.hpp"
#include "latentlab/tda.hpp"

namespace latentlab {

namespace {

using nlohmann::json;

std::string pad(std::size_t value, int width) {
  std::string s = std::to_string(value);
  if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
  return s;
}

std::string yes_no(bool b) { return b ? "true" : "false"; }

// FNV-1a, used to turn a group name into a stable stream index.
std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; });
    if (!known) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->template get<T>();
  } catch (const json::exception&) {
    throw ConfigError("field '" + std::string(key) + "' in " + where + " has the wrong type");
  }
}

SweepReport records_report(const std::string& name) {
  SweepReport report;
  report.name = name;
  report.columns = {{"maze_id", CellKind::Text},       {"grid_n", CellKind::Integer},
                    {"p", CellKind::Real},             {"deadend_start", CellKind::Boolean},
                    {"start_degree", CellKind::Integer}, {"has_cycle", CellKind::Boolean},
                    {"algo", CellKind::Text},          {"accuracy", CellKind::Integer}};
  return report;
}

double mean_accuracy(const std::vector<AccuracyRecord>& records) {
  if (records.empty()) return 0.0;
  long long hits = 0;
  for (const auto& r : records) hits += r.accuracy;
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

void add_resample_note(SweepReport& report, long long extra, long long mazes) {
  report.notes.push_back("resampled " + std::to_string(extra) + " endpoint draws over " + std::to_string(mazes) +
                         " mazes");
}

constexpr const char* kOracleNote =
    "oracle solvers have no iteration budget, so each cell is a single accuracy value";

}  // namespace

std::vector<double> default_percolation_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 50.0);
  grid.push_back(0.5);
  grid.push_back(1.0);
  return grid;
}

int grid_n_from_side(int side) {
  if (side < 3 || side % 2 == 0) {
    throw ConfigError("raster side " + std::to_string(side) + " must be odd and >= 3");
  }
  return (side + 1) / 2;
}

std::uint64_t maze_seed(std::uint64_t master, int side, std::size_t index) {
  return derive_seed(derive_seed(master, static_cast<std::uint64_t>(side)), index);
}

std::uint64_t trajectory_seed(std::uint64_t master, const std::string& group, std::size_t index) {
  return derive_seed(derive_seed(master, fnv1a(group)), index);
}

std::vector<double> ExperimentConfig::effective_p_values() const {
  return p_values.empty() ? default_percolation_grid() : p_values;
}

void ExperimentConfig::validate() const {
  for (const int n : sizes) grid_n_from_side(n);
  if (mazes_per_size < 1) throw ConfigError("mazes_per_size must be >= 1");
  for (const double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p values must lie in [0, 1]");
  }
  if (workers < 0) throw ConfigError("workers must be >= 0");
  if (tda.burn_in > tda.end) throw ConfigError("tda.burn_in must not exceed tda.end");
  if (tda.end == tda.burn_in) throw ConfigError("the tda window needs at least two iterates");
  if (!(tda.alpha >= 0.0)) throw ConfigError("tda.alpha must be >= 0");
  if (!(tda.ball_radius >= 0.0)) throw ConfigError("tda.ball_radius must be >= 0");
  std::set<std::string> names;
  for (const auto& src : sources) {
    if (src.name.empty()) throw ConfigError("every source needs a name");
    if (!names.insert(src.name).second) throw ConfigError("duplicate source name '" + src.name + "'");
    if (src.synthetic.has_value() == !src.globs.empty()) {
      throw ConfigError("source '" + src.name + "' needs exactly one of synthetic or glob");
    }
    if (src.synthetic) {
      const auto& s = *src.synthetic;
      if (s.count < 1) throw ConfigError("source '" + src.name + "' count must be >= 1");
      if (!(s.noise >= 0.0)) throw ConfigError("source '" + src.name + "' noise must be >= 0");
      SyntheticSpec spec;
      spec.kind = s.kind;
      spec.dim = s.dim;
      spec.length = tda.end + 1;
      try {
        spec.validate();
      } catch (const Error& e) {
        throw ConfigError("source '" + src.name + "': " + e.what());
      }
    }
  }
}

ExperimentConfig config_from_json(const json& doc) {
  const std::string where = "experiment config";
  check_keys(doc,
             {"sizes", "mazes_per_size", "p_values", "deadend_start", "seed", "solver", "tda", "sources", "workers",
              "output_dir"},
             where);
  ExperimentConfig config;
  read_field(doc, "sizes", config.sizes, where);
  read_field(doc, "mazes_per_size", config.mazes_per_size, where);
  read_field(doc, "p_values", config.p_values, where);
  read_field(doc, "deadend_start", config.deadend_start, where);
  read_field(doc, "seed", config.seed, where);
  read_field(doc, "workers", config.workers, where);
  std::string solver = to_string(config.solver);
  read_field(doc, "solver", solver, where);
  config.solver = parse_solver(solver);
  std::string out_dir = config.output_dir.string();
  read_field(doc, "output_dir", out_dir, where);
  config.output_dir = out_dir;

  if (const auto it = doc.find("tda"); it != doc.end()) {
    check_keys(*it, {"burn_in", "end", "alpha", "ball_radius"}, "tda");
    read_field(*it, "burn_in", config.tda.burn_in, "tda");
    read_field(*it, "end", config.tda.end, "tda");
    read_field(*it, "alpha", config.tda.alpha, "tda");
    read_field(*it, "ball_radius", config.tda.ball_radius, "tda");
  }
  if (const auto it = doc.find("sources"); it != doc.end()) {
    if (!it->is_array()) throw ConfigError("sources must be an array");
    for (const auto& entry : *it) {
      check_keys(entry, {"name", "synthetic", "glob"}, "source");
      TdaSource src;
      read_field(entry, "name", src.name, "source");
      if (const auto g = entry.find("glob"); g != entry.end()) {
        if (g->is_string()) {
          src.globs.push_back(g->get<std::string>());
        } else {
          read_field(entry, "glob", src.globs, "source '" + src.name + "'");
        }
      }
      if (const auto s = entry.find("synthetic"); s != entry.end()) {
        const std::string swhere = "synthetic block of '" + src.name + "'";
        check_keys(*s, {"kind", "count", "noise", "dim"}, swhere);
        SyntheticGroup group;
        std::string kind = to_string(group.kind);
        read_field(*s, "kind", kind, swhere);
        try {
          group.kind = parse_synthetic_kind(kind);
        } catch (const Error& e) {
          throw ConfigError(e.what());
        }
        read_field(*s, "count", group.count, swhere);
        read_field(*s, "noise", group.noise, swhere);
        read_field(*s, "dim", group.dim, swhere);
        src.synthetic = group;
      }
      config.sources.push_back(std::move(src));
    }
  }
  config.validate();
  return config;
}

json config_to_json(const ExperimentConfig& config) {
  json doc;
  doc["sizes"] = config.sizes;
  doc["mazes_per_size"] = config.mazes_per_size;
  doc["p_values"] = config.p_values;
  doc["deadend_start"] = config.deadend_start;
  doc["seed"] = config.seed;
  doc["solver"] = to_string(config.solver);
  doc["workers"] = config.workers;
  doc["output_dir"] = config.output_dir.string();
  doc["tda"] = {{"burn_in", config.tda.burn_in},
                {"end", config.tda.end},
                {"alpha", config.tda.alpha},
                {"ball_radius", config.tda.ball_radius}};
  json sources = json::array();
  for (const auto& src : config.sources) {
    json entry{{"name", src.name}};
    if (src.synthetic) {
      entry["synthetic"] = {{"kind", to_string(src.synthetic->kind)},
                            {"count", src.synthetic->count},
                            {"noise", src.synthetic->noise},
                            {"dim", src.synthetic->dim}};
    } else {
      entry["glob"] = src.globs;
    }
    sources.push_back(entry);
  }
  doc["sources"] = sources;
  return doc;
}

ExperimentConfig read_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  std::size_t threads = workers > 0 ? static_cast<std::size_t>(workers) : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

MazeBatch evaluate_mazes(const ExperimentConfig& config, int side, double p, bool deadend_start) {
  const int grid_n = grid_n_from_side(side);
  const auto count = static_cast<std::size_t>(config.mazes_per_size);
  MazeBatch batch;
  batch.records.resize(count);
  std::vector<int> attempts(count, 0);
  parallel_for(count, config.workers, [&](std::size_t i) {
    AccuracyRecord& rec = batch.records[i];
    rec.maze_id = "n" + std::to_string(side) + "-p" + format_real(p) + "-" + pad(i, 4);
    try {
      MazeConfig mc{grid_n, p, deadend_start, maze_seed(config.seed, side, i)};
      const GeneratedMaze gen = generate_maze(mc);
      const Prediction prediction = solve(config.solver, gen.maze, gen.endpoints);
      const Prediction label = solution_label(gen.maze, gen.endpoints);
      rec.grid_n = grid_n;
      rec.p = p;
      rec.deadend_start = deadend_start;
      rec.start_degree = gen.maze.degree(gen.endpoints.start);
      rec.has_cycle = has_cycle(gen.maze);
      rec.algo = config.solver;
      rec.accuracy = exact_match(prediction, label);
      attempts[i] = gen.attempts;
    } catch (const Error& e) {
      throw ExperimentError(rec.maze_id, e.what());
    }
  });
  for (const int a : attempts) batch.attempts += a;
  return batch;
}

SweepReport run_size_sweep(const ExperimentConfig& config, SweepReport* detail) {
  config.validate();
  SweepReport report;
  report.name = "size-sweep";
  report.columns = {{"n", CellKind::Integer},         {"grid_n", CellKind::Integer}, {"p", CellKind::Real},
                    {"algo", CellKind::Text},         {"deadend_start", CellKind::Boolean},
                    {"mazes", CellKind::Integer},     {"accuracy", CellKind::Real},
                    {"attempts", CellKind::Integer}};
  report.plot = {PlotKind::Line, "n", {}, "", {"accuracy"}, "exact-match accuracy"};
  report.notes.push_back(kOracleNote);
  if (detail) *detail = records_report("size-sweep-records");
  long long extra = 0;
  for (const int side : config.sizes) {
    const MazeBatch batch = evaluate_mazes(config, side, 0.0, config.deadend_start);
    extra += batch.attempts - static_cast<long long>(batch.records.size());
    report.add_row({std::to_string(side), std::to_string(grid_n_from_side(side)), format_real(0.0),
                    to_string(config.solver), yes_no(config.deadend_start), std::to_string(batch.records.size()),
                    format_real(mean_accuracy(batch.records)), std::to_string(batch.attempts)});
    if (detail) {
      for (const auto& r : batch.records) detail->add_row(to_csv_fields(r));
    }
  }
  add_resample_note(report, extra, static_cast<long long>(config.sizes.size()) * config.mazes_per_size);
  return report;
}

SweepReport run_percolation_sweep(const ExperimentConfig& config, SweepReport* detail) {
  config.validate();
  SweepReport report;
  report.name = "percolation";
  report.columns = {{"n", CellKind::Integer},
                    {"grid_n", CellKind::Integer},
                    {"p", CellKind::Real},
                    {"algo", CellKind::Text},
                    {"deadend_start", CellKind::Boolean},
                    {"mazes", CellKind::Integer},
                    {"accuracy", CellKind::Real},
                    {"cycle_fraction", CellKind::Real},
                    {"attempts", CellKind::Integer}};
  report.plot = {PlotKind::Line, "p", {}, "n", {"accuracy", "cycle_fraction"}, "fraction"};
  report.notes.push_back(kOracleNote);
  report.notes.push_back("labels are canonical BFS shortest paths (N, E, S, W tie-breaking)");
  if (detail) *detail = records_report("percolation-records");
  long long extra = 0;
  long long total = 0;
  bool skipped = false;
  for (const int side : config.sizes) {
    for (const double p : config.effective_p_values()) {
      if (p == 1.0 && config.deadend_start) {
        // the full lattice has no degree-1 node, so no start can be drawn
        skipped = true;
        report.add_row({std::to_string(side), std::to_string(grid_n_from_side(side)), format_real(p),
                        to_string(config.solver), yes_no(true), "0", "nan", "nan", "0"});
        continue;
      }
      const MazeBatch batch = evaluate_mazes(config, side, p, config.deadend_start);
      const auto cycles = std::count_if(batch.records.begin(), batch.records.end(),
                                        [](const AccuracyRecord& r) { return r.has_cycle; });
      const double cycle_fraction = static_cast<double>(cycles) / static_cast<double>(batch.records.size());
      extra += batch.attempts - static_cast<long long>(batch.records.size());
      total += static_cast<long long>(batch.records.size());
      report.add_row({std::to_string(side), std::to_string(grid_n_from_side(side)), format_real(p),
                      to_string(config.solver), yes_no(config.deadend_start),
                      std::to_string(batch.records.size()), format_real(mean_accuracy(batch.records)),
                      format_real(cycle_fraction), std::to_string(batch.attempts)});
      if (detail) {
        for (const auto& r : batch.records) detail->add_row(to_csv_fields(r));
      }
    }
  }
  if (skipped) report.notes.push_back("p = 1 cells are empty: the full lattice has no dead-end start");
  add_resample_note(report, extra, total);
  return report;
}

SweepReport run_neighbor_breakdown(const ExperimentConfig& config, SweepReport* detail) {
  config.validate();
  if (config.deadend_start) throw ConfigError("the neighbour breakdown needs deadend_start = false");
  SweepReport report;
  report.name = "neighbors";
  report.columns = {{"n", CellKind::Integer},     {"grid_n", CellKind::Integer},
                    {"start_degree", CellKind::Integer}, {"algo", CellKind::Text},
                    {"mazes", CellKind::Integer}, {"accuracy", CellKind::Real}};
  report.plot = {PlotKind::Bar, "", {"n", "start_degree"}, "", {"accuracy"}, "exact-match accuracy"};
  report.notes.push_back(kOracleNote);
  if (detail) *detail = records_report("neighbors-records");
  long long extra = 0;
  for (const int side : config.sizes) {
    const MazeBatch batch = evaluate_mazes(config, side, 0.0, false);
    extra += batch.attempts - static_cast<long long>(batch.records.size());
    std::array<std::vector<AccuracyRecord>, 5> strata;
    for (const auto& r : batch.records) strata.at(static_cast<std::size_t>(r.start_degree)).push_back(r);
    for (std::size_t degree = 1; degree <= 4; ++degree) {
      const auto& cell = strata[degree];
      if (cell.empty()) continue;
      report.add_row({std::to_string(side), std::to_string(grid_n_from_side(side)), std::to_string(degree),
                      to_string(config.solver), std::to_string(cell.size()), format_real(mean_accuracy(cell))});
    }
    if (detail) {
      for (const auto& r : batch.records) detail->add_row(to_csv_fields(r));
    }
  }
  add_resample_note(report, extra, static_cast<long long>(config.sizes.size()) * config.mazes_per_size);
  return report;
}

std::vector<std::filesystem::path> expand_glob(const std::string& pattern) {
  glob_t result{};
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &result);
  std::vector<std::filesystem::path> paths;
  if (rc == 0) {
    for (std::size_t i = 0; i < result.gl_pathc; ++i) paths.emplace_back(result.gl_pathv[i]);
  }
  ::globfree(&result);
  std::sort(paths.begin(), paths.end());
  return paths;
}

SweepReport run_tda_batch(const ExperimentConfig& config, SweepReport* detail) {
  return run_tda_batch(config, config.sources, detail);
}

SweepReport run_tda_batch(const ExperimentConfig& config, const std::vector<TdaSource>& sources,
                          SweepReport* detail) {
  ExperimentConfig checked = config;
  checked.sources = sources;
  checked.validate();

  SweepReport report;
  report.name = "tda-batch";
  report.columns = {{"group", CellKind::Text},
                    {"fixed_point", CellKind::Integer},
                    {"two_point_cycle", CellKind::Integer},
                    {"two_loop_cycle", CellKind::Integer},
                    {"other", CellKind::Integer},
                    {"total", CellKind::Integer},
                    {"failed", CellKind::Integer}};
  report.plot = {PlotKind::Bar, "", {"group"}, "", {"fixed_point", "two_point_cycle", "two_loop_cycle", "other"},
                 "trajectories"};
  report.notes.push_back("window [" + std::to_string(config.tda.burn_in) + ", " + std::to_string(config.tda.end) +
                         "], alpha " + format_real(config.tda.alpha) + ", ball radius " +
                         format_real(config.tda.ball_radius));

  SweepReport items;
  items.name = "tda-batch-items";
  items.columns = {{"group", CellKind::Text},     {"item", CellKind::Text},      {"status", CellKind::Text},
                   {"behaviour", CellKind::Text}, {"b0", CellKind::Integer},     {"b1", CellKind::Integer},
                   {"diameter", CellKind::Real},  {"thresh", CellKind::Real},    {"ball_rule", CellKind::Boolean},
                   {"error", CellKind::Text}};

  const ClassifyParams params{config.tda.alpha, config.tda.ball_radius, std::nullopt};
  for (const auto& src : sources) {
    struct Item {
      std::string id;
      std::optional<Classification> result;
      std::string error;
    };
    std::vector<Item> group;
    std::vector<std::filesystem::path> files;
    if (src.synthetic) {
      group.resize(src.synthetic->count);
      for (std::size_t i = 0; i < group.size(); ++i) group[i].id = src.name + "-" + pad(i, 4);
    } else {
      for (const auto& pattern : src.globs) {
        const auto matched = expand_glob(pattern);
        if (matched.empty()) {
          group.push_back({pattern, std::nullopt, "no files match"});
          files.emplace_back();
        }
        for (const auto& f : matched) {
          group.push_back({f.string(), std::nullopt, ""});
          files.push_back(f);
        }
      }
    }
    parallel_for(group.size(), config.workers, [&](std::size_t i) {
      Item& item = group[i];
      if (!item.error.empty()) return;
      try {
        Trajectory traj;
        if (src.synthetic) {
          SyntheticSpec spec;
          spec.kind = src.synthetic->kind;
          spec.dim = src.synthetic->dim;
          spec.noise_sigma = src.synthetic->noise * spec.scale();
          spec.length = config.tda.end + 1;
          spec.seed = trajectory_seed(config.seed, src.name, i);
          traj = synth(spec);
        } else {
          traj = read_trajectory(files[i]);
        }
        item.result = classify(window(traj, config.tda.burn_in, config.tda.end), params);
      } catch (const Error& e) {
        if (src.synthetic) throw ExperimentError(item.id, e.what());
        item.error = e.what();
      }
    });

    std::array<long long, 4> freq{};
    long long failed = 0;
    for (const auto& item : group) {
      if (!item.result) {
        ++failed;
        items.add_row({src.name, item.id, "error", "", "", "", "", "", "", item.error});
        continue;
      }
      const auto& c = *item.result;
      ++freq.at(static_cast<std::size_t>(c.behaviour.kind));
      items.add_row({src.name, item.id, "ok", to_string(c.behaviour.kind), std::to_string(c.signature.b0),
                     std::to_string(c.signature.b1), format_real(c.diameter), format_real(c.signature.thresh),
                     yes_no(c.ball_rule), ""});
    }
    const long long total = freq[0] + freq[1] + freq[2] + freq[3];
    report.add_row({src.name, std::to_string(freq[0]), std::to_string(freq[1]), std::to_string(freq[2]),
                    std::to_string(freq[3]), std::to_string(total), std::to_string(failed)});
  }
  if (detail) *detail = std::move(items);
  return report;
}

}  // namespace latentlab
