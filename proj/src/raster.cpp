#include "latentlab/raster.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "latentlab/error.hpp"

namespace latentlab {

std::size_t BinaryImage::white_count() const {
  return static_cast<std::size_t>(std::count(pixels.begin(), pixels.end(), std::uint8_t{1}));
}

RasterImage rasterize(const LatticeMaze& maze, const Endpoints& endpoints) {
  RasterImage image(maze.side());
  for (int r = 0; r < maze.grid_n(); ++r) {
    for (int c = 0; c < maze.grid_n(); ++c) image.at(2 * r, 2 * c) = palette::corridor;
  }
  for (const auto& e : maze.edges()) {
    image.at(e.a.row + e.b.row, e.a.col + e.b.col) = palette::corridor;
  }
  image.at(2 * endpoints.start.row, 2 * endpoints.start.col) = palette::start;
  image.at(2 * endpoints.end.row, 2 * endpoints.end.col) = palette::end;
  return image;
}

std::pair<LatticeMaze, Endpoints> derasterize(const RasterImage& image) {
  if (image.side < 1 || image.side % 2 == 0) {
    throw FormatError(0, "raster side must be odd, got " + std::to_string(image.side));
  }
  const int grid_n = (image.side + 1) / 2;
  LatticeMaze maze(grid_n);
  int starts = 0;
  int ends = 0;
  Endpoints endpoints{};
  for (int row = 0; row < image.side; ++row) {
    for (int col = 0; col < image.side; ++col) {
      const Rgb px = image.at(row, col);
      const std::size_t offset = 3 * (static_cast<std::size_t>(row) * image.side + col);
      const bool node_pixel = row % 2 == 0 && col % 2 == 0;
      if (px == palette::wall) {
        if (node_pixel) throw FormatError(offset, "node pixel is a wall");
        continue;
      }
      if (px == palette::start || px == palette::end) {
        if (!node_pixel) throw FormatError(offset, "endpoint colour off a node pixel");
        const Node n{row / 2, col / 2};
        if (px == palette::start) {
          endpoints.start = n;
          ++starts;
        } else {
          endpoints.end = n;
          ++ends;
        }
        continue;
      }
      if (!(px == palette::corridor)) throw FormatError(offset, "pixel colour outside palette");
      if (node_pixel) continue;
      if (row % 2 == 1 && col % 2 == 1) throw FormatError(offset, "corridor between diagonal nodes");
      if (row % 2 == 0) {
        maze.add_edge({row / 2, (col - 1) / 2}, {row / 2, (col + 1) / 2});
      } else {
        maze.add_edge({(row - 1) / 2, col / 2}, {(row + 1) / 2, col / 2});
      }
    }
  }
  if (starts != 1 || ends != 1) throw FormatError(0, "raster needs exactly one start and one end");
  return {std::move(maze), endpoints};
}

BinaryImage rasterize_solution(const LatticeMaze& maze, const std::vector<Node>& path) {
  BinaryImage image(maze.side());
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(maze.node_count()), 0);
  for (std::size_t i = 0; i < path.size(); ++i) {
    const Node n = path[i];
    if (!maze.contains(n)) throw InvalidPath("path leaves the lattice");
    if (seen[maze.index(n)]) throw InvalidPath("path revisits a node");
    seen[maze.index(n)] = 1;
    image.set(2 * n.row, 2 * n.col);
    if (i > 0) {
      const Node prev = path[i - 1];
      if (!maze.has_edge(prev, n)) throw InvalidPath("path uses a non-edge");
      image.set(prev.row + n.row, prev.col + n.col);
    }
  }
  return image;
}

RasterImage upscale(const RasterImage& image, int factor) {
  if (factor < 1) throw DomainError("upscale factor must be >= 1");
  RasterImage out(image.side * factor);
  for (int row = 0; row < out.side; ++row) {
    for (int col = 0; col < out.side; ++col) out.at(row, col) = image.at(row / factor, col / factor);
  }
  return out;
}

namespace {

void write_p6(const std::filesystem::path& path, int side, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const std::string header = "P6\n" + std::to_string(side) + " " + std::to_string(side) + "\n255\n";
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

// Parses the canonical header strictly; comments and odd whitespace are not
// part of the format.
RasterImage read_p6(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  auto expect = [&](char ch) {
    if (pos >= data.size() || data[pos] != ch) {
      throw FormatError(pos, std::string("expected '") + (ch == '\n' ? "\\n" : std::string(1, ch)) + "'");
    }
    ++pos;
  };
  auto number = [&]() {
    const std::size_t begin = pos;
    long value = 0;
    while (pos < data.size() && std::isdigit(static_cast<unsigned char>(data[pos]))) {
      value = value * 10 + (data[pos] - '0');
      if (value > 1'000'000) throw FormatError(begin, "dimension too large");
      ++pos;
    }
    if (pos == begin) throw FormatError(pos, "expected a decimal number");
    return static_cast<int>(value);
  };
  expect('P');
  expect('6');
  expect('\n');
  const int width = number();
  expect(' ');
  const int height = number();
  expect('\n');
  const std::size_t maxval_at = pos;
  if (number() != 255) throw FormatError(maxval_at, "max value must be 255");
  expect('\n');
  if (width != height) throw FormatError(0, "raster must be square");
  RasterImage image(width);
  const std::size_t payload = 3 * image.pixels.size();
  if (data.size() - pos != payload) {
    throw FormatError(std::min(data.size(), pos + payload), "payload size mismatch");
  }
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    image.pixels[i] = {static_cast<std::uint8_t>(data[pos + 3 * i]),
                       static_cast<std::uint8_t>(data[pos + 3 * i + 1]),
                       static_cast<std::uint8_t>(data[pos + 3 * i + 2])};
  }
  return image;
}

}  // namespace

void write_ppm(const std::filesystem::path& path, const RasterImage& image) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(3 * image.pixels.size());
  for (const auto px : image.pixels) {
    bytes.push_back(px.r);
    bytes.push_back(px.g);
    bytes.push_back(px.b);
  }
  write_p6(path, image.side, bytes);
}

void write_ppm(const std::filesystem::path& path, const BinaryImage& image) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(3 * image.pixels.size());
  for (const auto px : image.pixels) bytes.insert(bytes.end(), 3, px ? 255 : 0);
  write_p6(path, image.side, bytes);
}

RasterImage read_ppm(const std::filesystem::path& path) { return read_p6(path); }

BinaryImage read_binary_ppm(const std::filesystem::path& path) {
  const RasterImage rgb = read_p6(path);
  BinaryImage image(rgb.side);
  for (std::size_t i = 0; i < rgb.pixels.size(); ++i) {
    if (rgb.pixels[i] == palette::corridor) {
      image.pixels[i] = 1;
    } else if (!(rgb.pixels[i] == palette::wall)) {
      throw FormatError(3 * i, "solution raster pixel is neither black nor white");
    }
  }
  return image;
}

}  // namespace latentlab
