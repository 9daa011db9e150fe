#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "latentlab/maze.hpp"

namespace latentlab {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

namespace palette {
inline constexpr Rgb wall{0, 0, 0};
inline constexpr Rgb corridor{255, 255, 255};
inline constexpr Rgb start{0, 255, 0};
inline constexpr Rgb end{255, 0, 0};
}  // namespace palette

/// Square RGB raster, row-major. Node (r, c) lives at pixel (2r, 2c).
struct RasterImage {
  int side = 0;
  std::vector<Rgb> pixels;

  RasterImage() = default;
  explicit RasterImage(int side_, Rgb fill = palette::wall)
      : side(side_), pixels(static_cast<std::size_t>(side_) * static_cast<std::size_t>(side_), fill) {}

  Rgb& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * side + col]; }
  const Rgb& at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * side + col]; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;
};

/// Black/white raster; true is white. Used for solution labels and solver
/// predictions.
struct BinaryImage {
  int side = 0;
  std::vector<std::uint8_t> pixels;

  BinaryImage() = default;
  explicit BinaryImage(int side_)
      : side(side_), pixels(static_cast<std::size_t>(side_) * static_cast<std::size_t>(side_), 0) {}

  bool at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * side + col] != 0; }
  void set(int row, int col, bool white = true) {
    pixels[static_cast<std::size_t>(row) * side + col] = white ? 1 : 0;
  }
  std::size_t white_count() const;

  friend bool operator==(const BinaryImage&, const BinaryImage&) = default;
};

using Prediction = BinaryImage;

RasterImage rasterize(const LatticeMaze& maze, const Endpoints& endpoints);

/// Inverse of rasterize. Throws FormatError on pixels outside the palette or
/// layouts rasterize cannot produce.
std::pair<LatticeMaze, Endpoints> derasterize(const RasterImage& image);

/// Path nodes and the pixels between consecutive nodes are white. Throws
/// InvalidPath if the path steps along a non-edge or revisits a node.
BinaryImage rasterize_solution(const LatticeMaze& maze, const std::vector<Node>& path);

/// Integer nearest-neighbour up-scaling for viewing.
RasterImage upscale(const RasterImage& image, int factor);

// Binary PPM (P6): "P6\n<n> <n>\n255\n" then row-major RGB bytes.
void write_ppm(const std::filesystem::path& path, const RasterImage& image);
void write_ppm(const std::filesystem::path& path, const BinaryImage& image);
RasterImage read_ppm(const std::filesystem::path& path);
/// Reads a P6 file containing only black and white pixels.
BinaryImage read_binary_ppm(const std::filesystem::path& path);

}  // namespace latentlab
