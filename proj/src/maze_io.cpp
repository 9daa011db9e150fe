#include "latentlab/maze_io.hpp"

#include <fstream>

#include "latentlab/error.hpp"

namespace latentlab {

using nlohmann::json;

json maze_to_json(const GeneratedMaze& maze) {
  json edges = json::array();
  for (const auto& e : maze.maze.edges()) edges.push_back({e.a.row, e.a.col, e.b.row, e.b.col});
  return json{{"grid_n", maze.config.grid_n},
              {"p", maze.config.p},
              {"deadend_start", maze.config.deadend_start},
              {"seed", maze.config.seed},
              {"edges", std::move(edges)},
              {"start", {maze.endpoints.start.row, maze.endpoints.start.col}},
              {"end", {maze.endpoints.end.row, maze.endpoints.end.col}}};
}

GeneratedMaze maze_from_json(const json& doc) {
  try {
    MazeConfig config;
    config.grid_n = doc.at("grid_n").get<int>();
    config.p = doc.at("p").get<double>();
    config.deadend_start = doc.at("deadend_start").get<bool>();
    config.seed = doc.at("seed").get<std::uint64_t>();
    config.validate();
    LatticeMaze maze(config.grid_n);
    for (const auto& e : doc.at("edges")) {
      if (e.size() != 4) throw FormatError(0, "edge entries need four coordinates");
      maze.add_edge({e[0].get<int>(), e[1].get<int>()}, {e[2].get<int>(), e[3].get<int>()});
    }
    auto node = [&](const char* key) {
      const auto& v = doc.at(key);
      if (v.size() != 2) throw FormatError(0, std::string(key) + " needs two coordinates");
      const Node n{v[0].get<int>(), v[1].get<int>()};
      if (!maze.contains(n)) throw FormatError(0, std::string(key) + " lies outside the lattice");
      return n;
    };
    const Endpoints ends{node("start"), node("end")};
    return {config, std::move(maze), ends, 1};
  } catch (const json::exception& e) {
    throw FormatError(0, std::string("maze json: ") + e.what());
  } catch (const DomainError& e) {
    throw FormatError(0, std::string("maze json: ") + e.what());
  }
}

void write_maze_json(const std::filesystem::path& path, const GeneratedMaze& maze) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << maze_to_json(maze).dump() << '\n';
}

GeneratedMaze read_maze_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(e.byte, std::string("maze json: ") + e.what());
  }
  return maze_from_json(doc);
}

}  // namespace latentlab
