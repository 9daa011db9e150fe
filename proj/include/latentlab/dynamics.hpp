#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

#include "latentlab/error.hpp"

namespace latentlab {

/// Ordered latent iterates u_0..u_K stored as the rows of a dense matrix.
template <typename Scalar>
class BasicTrajectory {
public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BasicTrajectory() = default;
  explicit BasicTrajectory(Matrix points, std::optional<std::size_t> burn_in = std::nullopt)
      : points_(std::move(points)), burn_in_(burn_in) {}

  std::size_t size() const noexcept { return static_cast<std::size_t>(points_.rows()); }
  bool empty() const noexcept { return points_.rows() == 0; }
  Eigen::Index dim() const noexcept { return points_.cols(); }

  auto point(std::size_t j) const { return points_.row(static_cast<Eigen::Index>(j)).transpose(); }
  const Matrix& points() const noexcept { return points_; }

  /// Index of the first iterate kept after burn-in, when known.
  std::optional<std::size_t> burn_in() const noexcept { return burn_in_; }

  friend bool operator==(const BasicTrajectory& a, const BasicTrajectory& b) {
    return a.points_.rows() == b.points_.rows() && a.points_.cols() == b.points_.cols() &&
           a.points_ == b.points_ && a.burn_in_ == b.burn_in_;
  }

private:
  Matrix points_;
  std::optional<std::size_t> burn_in_;
};

using Trajectory = BasicTrajectory<double>;

/// Weight-tied input-injected map: u_{j} = update(u_{j-1}, d), output
/// readout(u). Both callables must be pure.
template <typename Scalar>
struct BasicIterativeMap {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  std::function<Vector(const Vector& u, const Vector& d)> update;
  std::function<Vector(const Vector& u)> readout;

  Vector operator()(const Vector& u, const Vector& d) const { return update(u, d); }
};

using IterativeMap = BasicIterativeMap<double>;

/// update(u, d) = A u + B d + b.
template <typename Scalar>
BasicIterativeMap<Scalar> affine_map(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> A,
                                     Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> B,
                                     Eigen::Matrix<Scalar, Eigen::Dynamic, 1> b) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  BasicIterativeMap<Scalar> map;
  map.update = [A = std::move(A), B = std::move(B), b = std::move(b)](const Vector& u, const Vector& d) {
    Vector out = A * u + b;
    if (B.size() > 0) out.noalias() += B * d;
    return out;
  };
  map.readout = [](const Vector& u) { return u; };
  return map;
}

/// Trajectory [u0, T(u0), T(T(u0)), ...] with K + 1 points. Throws
/// NumericalDivergence at the first non-finite iterate.
template <typename Scalar>
BasicTrajectory<Scalar> iterate(const BasicIterativeMap<Scalar>& map,
                                const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& d,
                                const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& u0, std::size_t K) {
  using Traj = BasicTrajectory<Scalar>;
  typename Traj::Matrix points(static_cast<Eigen::Index>(K + 1), u0.size());
  if (!u0.allFinite()) throw NumericalDivergence(0, "initial state is not finite");
  points.row(0) = u0.transpose();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> u = u0;
  for (std::size_t j = 1; j <= K; ++j) {
    u = map(u, d);
    if (u.size() != u0.size()) throw NumericalDivergence(j, "update changed the latent dimension");
    if (!u.allFinite()) throw NumericalDivergence(j, "non-finite iterate");
    points.row(static_cast<Eigen::Index>(j)) = u.transpose();
  }
  return Traj(std::move(points));
}

template <typename Scalar>
struct BasicFixedPointResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> u_star;
  std::size_t iterations = 0;
  bool converged = false;
  Scalar final_residual = 0;
};

using FixedPointResult = BasicFixedPointResult<double>;

/// Picard iteration until ||u_{j+1} - u_j|| <= tol or max_iter steps.
template <typename Scalar>
BasicFixedPointResult<Scalar> fixed_point_solve(const BasicIterativeMap<Scalar>& map,
                                                const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& d,
                                                const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& u0,
                                                Scalar tol, std::size_t max_iter) {
  if (!(tol > 0)) throw DomainError("tol must be positive");
  if (max_iter < 1) throw DomainError("max_iter must be >= 1");
  BasicFixedPointResult<Scalar> result;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> u = u0;
  for (std::size_t j = 1; j <= max_iter; ++j) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> next = map(u, d);
    if (next.size() != u.size()) throw NumericalDivergence(j, "update changed the latent dimension");
    if (!next.allFinite()) throw NumericalDivergence(j, "non-finite iterate");
    result.final_residual = (next - u).norm();
    result.iterations = j;
    u = std::move(next);
    if (result.final_residual <= tol) {
      result.converged = true;
      break;
    }
  }
  result.u_star = std::move(u);
  return result;
}

/// r_j = ||u_{j+1} - u_j||_2, one fewer entry than the trajectory.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> residuals(const BasicTrajectory<Scalar>& traj) {
  const auto n = static_cast<Eigen::Index>(traj.size());
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> r(n > 0 ? n - 1 : 0);
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    r(j) = (traj.points().row(j + 1) - traj.points().row(j)).norm();
  }
  return r;
}

/// Points first..last inclusive; records `first` as the burn-in.
template <typename Scalar>
BasicTrajectory<Scalar> window(const BasicTrajectory<Scalar>& traj, std::size_t first, std::size_t last) {
  if (first > last || last >= traj.size()) {
    throw RangeError("window [" + std::to_string(first) + ", " + std::to_string(last) +
                     "] does not fit a trajectory of " + std::to_string(traj.size()) + " points");
  }
  const auto rows = static_cast<Eigen::Index>(last - first + 1);
  typename BasicTrajectory<Scalar>::Matrix points =
      traj.points().middleRows(static_cast<Eigen::Index>(first), rows);
  return BasicTrajectory<Scalar>(std::move(points), first);
}

enum class SyntheticKind { FixedPoint, TwoPoint, TwoLoop };

SyntheticKind parse_synthetic_kind(const std::string& name);
std::string to_string(SyntheticKind kind);

/// Ground-truth generator for the three limiting behaviours.
///
/// FixedPoint contracts from `offset` away from a centre at `rate` per step.
/// TwoPoint alternates between two centres `separation` apart. TwoLoop
/// alternates between two circles of `radius` whose centres are `separation`
/// apart along an axis normal to both; the second circle is traversed half a
/// turn out of phase with the first, and each visit advances the angle by
/// 2*pi times the inverse golden ratio.
///
/// `noise_sigma` is the RMS norm of the per-point Gaussian perturbation, so
/// each coordinate has standard deviation noise_sigma / sqrt(dim). Fixed-point
/// noise is fed back through the contraction; the cycle kinds add it to each
/// iterate. The construction is embedded in R^dim through a seeded random
/// orthonormal frame.
struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::FixedPoint;
  int dim = 128;
  double rate = 0.5;
  double offset = 0.1;
  double separation = 1.0;
  double radius = 0.5;
  double noise_sigma = 0.0;
  std::size_t length = 400;  // number of iterates produced
  std::uint64_t seed = 0;

  /// Characteristic length: offset for FixedPoint, separation otherwise.
  double scale() const noexcept { return kind == SyntheticKind::FixedPoint ? offset : separation; }
  void validate() const;
};

Trajectory synth(const SyntheticSpec& spec);

// Little-endian: "LTRJ", u16 version = 1, u16 reserved = 0, u32 points,
// u32 dim, then points * dim float64 row-major.
inline constexpr std::size_t kTrajectoryHeaderBytes = 16;

void write_trajectory(const Trajectory& traj, const std::filesystem::path& path);
/// Throws FormatError carrying the byte offset of the problem.
Trajectory read_trajectory(const std::filesystem::path& path);

std::string encode_trajectory(const Trajectory& traj);
Trajectory decode_trajectory(std::string_view bytes);

}  // namespace latentlab
