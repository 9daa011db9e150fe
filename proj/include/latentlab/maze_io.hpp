#pragma once

#include <filesystem>

#include <json.hpp>

#include "latentlab/maze.hpp"

namespace latentlab {

// {grid_n, p, deadend_start, seed, edges: [[r,c,r',c'],...], start: [r,c], end: [r,c]}
nlohmann::json maze_to_json(const GeneratedMaze& maze);
/// Throws FormatError (offset 0) on schema violations.
GeneratedMaze maze_from_json(const nlohmann::json& doc);

void write_maze_json(const std::filesystem::path& path, const GeneratedMaze& maze);
GeneratedMaze read_maze_json(const std::filesystem::path& path);

}  // namespace latentlab
