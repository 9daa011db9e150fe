#include "latentlab/dynamics.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "latentlab/random.hpp"

namespace latentlab {

SyntheticKind parse_synthetic_kind(const std::string& name) {
  if (name == "fixedpoint") return SyntheticKind::FixedPoint;
  if (name == "twopoint") return SyntheticKind::TwoPoint;
  if (name == "twoloop") return SyntheticKind::TwoLoop;
  throw SpecError("unknown synthetic kind '" + name + "' (expected fixedpoint, twopoint or twoloop)");
}

std::string to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::FixedPoint:
      return "fixedpoint";
    case SyntheticKind::TwoPoint:
      return "twopoint";
    case SyntheticKind::TwoLoop:
      return "twoloop";
  }
  return "unknown";
}

void SyntheticSpec::validate() const {
  if (dim < 1) throw SpecError("dim must be >= 1");
  if (kind == SyntheticKind::TwoLoop && dim < 3) throw SpecError("two-loop trajectories need dim >= 3");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw SpecError("noise_sigma must be >= 0");
  if (length < 1) throw SpecError("length must be >= 1");
  switch (kind) {
    case SyntheticKind::FixedPoint:
      if (!(rate >= 0.0 && rate < 1.0)) throw SpecError("contraction rate must lie in [0, 1)");
      if (!(offset >= 0.0)) throw SpecError("offset must be >= 0");
      break;
    case SyntheticKind::TwoPoint:
      if (!(separation > 0.0)) throw SpecError("separation must be positive");
      break;
    case SyntheticKind::TwoLoop:
      if (!(separation > 0.0)) throw SpecError("separation must be positive");
      if (!(radius > 0.0)) throw SpecError("radius must be positive");
      break;
  }
}

Trajectory synth(const SyntheticSpec& spec) {
  spec.validate();
  const Eigen::Index n = spec.dim;
  const Eigen::Index frame_cols = spec.kind == SyntheticKind::TwoLoop ? 3 : 1;

  Rng shape_rng(derive_seed(spec.seed, 0));
  Rng noise_rng(derive_seed(spec.seed, 1));

  Eigen::MatrixXd gaussian(n, frame_cols);
  for (Eigen::Index c = 0; c < frame_cols; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) gaussian(r, c) = shape_rng.normal();
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian);
  const Eigen::MatrixXd frame = qr.householderQ() * Eigen::MatrixXd::Identity(n, frame_cols);

  Eigen::VectorXd center(n);
  for (Eigen::Index r = 0; r < n; ++r) center(r) = shape_rng.normal() / std::sqrt(static_cast<double>(n));

  const double coord_sigma = spec.noise_sigma / std::sqrt(static_cast<double>(n));
  auto add_noise = [&](auto&& row) {
    if (coord_sigma == 0.0) return;
    for (Eigen::Index r = 0; r < n; ++r) row(r) += coord_sigma * noise_rng.normal();
  };

  Trajectory::Matrix points(static_cast<Eigen::Index>(spec.length), n);
  switch (spec.kind) {
    case SyntheticKind::FixedPoint: {
      Eigen::VectorXd u = center + spec.offset * frame.col(0);
      points.row(0) = u.transpose();
      for (Eigen::Index j = 1; j < points.rows(); ++j) {
        u = center + spec.rate * (u - center);
        add_noise(u);
        points.row(j) = u.transpose();
      }
      break;
    }
    case SyntheticKind::TwoPoint: {
      const Eigen::VectorXd other = center + spec.separation * frame.col(0);
      for (Eigen::Index j = 0; j < points.rows(); ++j) {
        points.row(j) = (j % 2 == 0 ? center : other).transpose();
        add_noise(points.row(j));
      }
      break;
    }
    case SyntheticKind::TwoLoop: {
      const double step = 2.0 * M_PI * 0.6180339887498949;
      const double phase = 2.0 * M_PI * shape_rng.uniform01();
      const Eigen::VectorXd other = center + spec.separation * frame.col(2);
      for (Eigen::Index j = 0; j < points.rows(); ++j) {
        const double visit = static_cast<double>(j / 2);
        const double angle = phase + visit * step + (j % 2 == 0 ? 0.0 : M_PI);
        const Eigen::VectorXd& c = j % 2 == 0 ? center : other;
        points.row(j) =
            (c + spec.radius * (std::cos(angle) * frame.col(0) + std::sin(angle) * frame.col(1))).transpose();
        add_noise(points.row(j));
      }
      break;
    }
  }
  return Trajectory(std::move(points));
}

namespace {

constexpr char kMagic[4] = {'L', 'T', 'R', 'J'};
constexpr std::uint16_t kVersion = 1;

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(std::string_view bytes, std::size_t offset) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return value;
}

}  // namespace

std::string encode_trajectory(const Trajectory& traj) {
  if (traj.size() > 0xFFFFFFFFu || static_cast<std::uint64_t>(traj.dim()) > 0xFFFFFFFFu) {
    throw DomainError("trajectory too large for the file format");
  }
  std::string out;
  out.reserve(kTrajectoryHeaderBytes + traj.size() * static_cast<std::size_t>(traj.dim()) * 8);
  out.append(kMagic, 4);
  put_le<std::uint16_t>(out, kVersion);
  put_le<std::uint16_t>(out, 0);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(traj.size()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(traj.dim()));
  const auto& m = traj.points();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(m(r, c)));
  }
  return out;
}

Trajectory decode_trajectory(std::string_view bytes) {
  if (bytes.size() < kTrajectoryHeaderBytes) {
    throw FormatError(bytes.size(), "truncated header (need " + std::to_string(kTrajectoryHeaderBytes) + " bytes)");
  }
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError(0, "bad magic (expected LTRJ)");
  if (const auto version = get_le<std::uint16_t>(bytes, 4); version != kVersion) {
    throw FormatError(4, "unsupported version " + std::to_string(version));
  }
  if (get_le<std::uint16_t>(bytes, 6) != 0) throw FormatError(6, "reserved field must be zero");
  const auto count = get_le<std::uint32_t>(bytes, 8);
  const auto dim = get_le<std::uint32_t>(bytes, 12);
  const std::uint64_t expected = kTrajectoryHeaderBytes + std::uint64_t{count} * dim * 8;
  if (bytes.size() < expected) {
    throw FormatError(bytes.size(), "truncated payload (expected " + std::to_string(expected) + " bytes)");
  }
  if (bytes.size() > expected) throw FormatError(expected, "trailing bytes after payload");

  Trajectory::Matrix points(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
  std::size_t at = kTrajectoryHeaderBytes;
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    for (Eigen::Index c = 0; c < points.cols(); ++c, at += 8) {
      points(r, c) = std::bit_cast<double>(get_le<std::uint64_t>(bytes, at));
    }
  }
  return Trajectory(std::move(points));
}

void write_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
  const std::string bytes = encode_trajectory(traj);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_trajectory(bytes);
}

}  // namespace latentlab
