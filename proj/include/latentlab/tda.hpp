#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "latentlab/dynamics.hpp"
#include "latentlab/error.hpp"

namespace latentlab {

// Point clouds are dense matrices with one point per row.
template <typename Scalar>
using CloudMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using PointCloud = CloudMatrix<double>;
using DistanceMatrix = Eigen::MatrixXd;

/// Euclidean pairwise distances. Each pair is computed once and mirrored, so
/// the result is exactly symmetric with a zero diagonal.
template <typename Derived>
CloudMatrix<typename Derived::Scalar> distance_matrix(const Eigen::MatrixBase<Derived>& cloud) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index m = cloud.rows();
  const CloudMatrix<Scalar> pts = cloud.transpose();  // one point per column
  CloudMatrix<Scalar> d = CloudMatrix<Scalar>::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const Scalar dij = (pts.col(i) - pts.col(j)).norm();
      d(i, j) = dij;
      d(j, i) = dij;
    }
  }
  return d;
}

/// Largest pairwise distance.
template <typename Derived>
typename Derived::Scalar cloud_diameter(const Eigen::MatrixBase<Derived>& cloud) {
  using Scalar = typename Derived::Scalar;
  const CloudMatrix<Scalar> pts = cloud.transpose();
  Scalar best = 0;
  for (Eigen::Index i = 0; i < pts.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < pts.cols(); ++j) {
      best = std::max<Scalar>(best, (pts.col(i) - pts.col(j)).squaredNorm());
    }
  }
  return std::sqrt(best);
}

/// Coordinates of the mean-centred cloud in its top-k right singular vectors.
/// Requires 1 <= k <= min(points, dimension); throws RangeError otherwise.
template <typename Derived>
CloudMatrix<typename Derived::Scalar> svd_project(const Eigen::MatrixBase<Derived>& cloud, Eigen::Index k) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index m = cloud.rows();
  const Eigen::Index n = cloud.cols();
  if (k < 1 || k > std::min(m, n)) {
    throw RangeError("svd_project: k = " + std::to_string(k) + " outside [1, " + std::to_string(std::min(m, n)) +
                     "]");
  }
  const CloudMatrix<Scalar> centered = cloud.rowwise() - cloud.colwise().mean();
  const Eigen::BDCSVD<CloudMatrix<Scalar>> svd(centered, Eigen::ComputeThinV);
  return centered * svd.matrixV().leftCols(k);
}

/// Numerical rank of the mean-centred cloud.
template <typename Derived>
Eigen::Index centered_rank(const Eigen::MatrixBase<Derived>& cloud) {
  using Scalar = typename Derived::Scalar;
  const CloudMatrix<Scalar> centered = cloud.rowwise() - cloud.colwise().mean();
  if (centered.size() == 0) return 0;
  const Eigen::BDCSVD<CloudMatrix<Scalar>> svd(centered);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == Scalar(0)) return 0;
  const Scalar tol = s(0) * static_cast<Scalar>(std::max(cloud.rows(), cloud.cols())) *
                     std::numeric_limits<Scalar>::epsilon();
  return (s.array() > tol).count();
}

/// First three principal components, zero-padded when the cloud has lower
/// rank.
template <typename Derived>
CloudMatrix<typename Derived::Scalar> pca3(const Eigen::MatrixBase<Derived>& cloud) {
  using Scalar = typename Derived::Scalar;
  if (cloud.rows() < 1) throw RangeError("pca3 needs at least one point");
  CloudMatrix<Scalar> out = CloudMatrix<Scalar>::Zero(cloud.rows(), 3);
  const Eigen::Index k = std::min<Eigen::Index>(3, centered_rank(cloud));
  if (k > 0) out.leftCols(k) = svd_project(cloud, k);
  return out;
}

struct PersistencePair {
  int dim = 0;
  double birth = 0.0;
  double death = std::numeric_limits<double>::infinity();

  double persistence() const noexcept { return death - birth; }
  bool essential() const noexcept { return death == std::numeric_limits<double>::infinity(); }

  friend auto operator<=>(const PersistencePair&, const PersistencePair&) = default;
};

/// Pairs sorted by (dim, birth, death).
using PersistenceDiagram = std::vector<PersistencePair>;

/// Throws MatrixError unless the matrix is square, exactly symmetric, finite,
/// non-negative and zero on the diagonal.
void validate_distance_matrix(const DistanceMatrix& dmat);

/// Vietoris-Rips persistence over Z/2 for H0 (and H1 when max_dim = 1).
///
/// H0 comes from union-find over edges in filtration order. H1 comes from
/// reducing the coboundary matrix of the edges in reverse filtration order,
/// with the edges that merged components cleared up front. The filtration
/// contains every triangle, so every H1 class dies and the single H0 class
/// of the full complex is the only essential one. Pairs with death equal to
/// birth are dropped.
PersistenceDiagram rips_persistence(const DistanceMatrix& dmat, int max_dim = 1);

struct BettiSignature {
  int b0 = 0;
  int b1 = 0;
  double thresh = 0.0;

  friend bool operator==(const BettiSignature&, const BettiSignature&) = default;
};

/// B_q counts dim-q pairs with death - birth > thresh; essential pairs
/// always count.
BettiSignature persistent_betti(const PersistenceDiagram& diagram, double thresh);

enum class Behaviour { FixedPoint, TwoPointCycle, TwoLoopCycle, Other };

std::string to_string(Behaviour kind);

struct BehaviourClass {
  Behaviour kind = Behaviour::Other;
  int b0 = 0;  // the signature behind the label
  int b1 = 0;

  friend bool operator==(const BehaviourClass&, const BehaviourClass&) = default;
};

/// [1,0] fixed point, [2,0] two-point cycle, [2,2] two-loop cycle, else
/// Other.
BehaviourClass behaviour_from_signature(int b0, int b1);

struct ClassifyParams {
  double alpha = 0.25;        // threshold as a fraction of the diameter
  double ball_radius = 0.01;  // clouds of diameter <= 2 * radius are fixed points
  std::optional<double> thresh;
};

struct Classification {
  BehaviourClass behaviour;
  BettiSignature signature;
  double diameter = 0.0;
  bool ball_rule = false;
};

/// Point-cloud classification of (already windowed) iterates. Throws
/// RangeError for fewer than two points.
Classification classify_cloud(const PointCloud& cloud, const ClassifyParams& params = {});
Classification classify(const Trajectory& traj, const ClassifyParams& params = {});

struct SlidingWindowParams {
  std::size_t window_depth = 0;
  std::size_t delay = 1;
};

/// Delay embedding: point j is [u_j; u_{j+tau}; ...; u_{j+d*tau}], giving
/// K - d*tau points of dimension (d + 1) * n.
template <typename Scalar>
CloudMatrix<Scalar> sliding_window(const BasicTrajectory<Scalar>& traj, const SlidingWindowParams& params) {
  if (params.delay < 1) throw RangeError("sliding window delay must be >= 1");
  const std::size_t span = params.window_depth * params.delay;
  if (traj.size() <= span) {
    throw RangeError("sliding window needs more than " + std::to_string(span) + " points, got " +
                     std::to_string(traj.size()));
  }
  const auto count = static_cast<Eigen::Index>(traj.size() - span);
  const Eigen::Index n = traj.dim();
  CloudMatrix<Scalar> out(count, n * static_cast<Eigen::Index>(params.window_depth + 1));
  for (Eigen::Index j = 0; j < count; ++j) {
    for (std::size_t w = 0; w <= params.window_depth; ++w) {
      const auto src = j + static_cast<Eigen::Index>(w * params.delay);
      out.block(j, static_cast<Eigen::Index>(w) * n, 1, n) = traj.points().row(src);
    }
  }
  return out;
}

// CSV with header "dim,birth,death"; essential deaths are written as inf.
void write_diagram_csv(std::ostream& out, const PersistenceDiagram& diagram);
PersistenceDiagram read_diagram_csv(std::istream& in);

}  // namespace latentlab
