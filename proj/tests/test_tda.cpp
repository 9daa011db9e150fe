#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "latentlab/dynamics.hpp"
#include "latentlab/error.hpp"
#include "latentlab/tda.hpp"
#include "oracle.hpp"

using namespace latentlab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PointCloud unit_square() {
  PointCloud c(4, 2);
  c << 0, 0, 1, 0, 1, 1, 0, 1;
  return c;
}

PersistenceDiagram dim_pairs(const PersistenceDiagram& d, int dim) {
  PersistenceDiagram out;
  for (const auto& p : d) {
    if (p.dim == dim) out.push_back(p);
  }
  return out;
}

PointCloud random_cloud(std::mt19937_64& rng, int m, int dim) {
  std::normal_distribution<double> normal;
  PointCloud c(m, dim);
  for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = normal(rng);
  return c;
}

}  // namespace

TEST_SUITE("tda") {
  TEST_CASE("distance matrix examples") {
    CHECK(distance_matrix(PointCloud::Zero(1, 3)) == Eigen::MatrixXd::Zero(1, 1));
    PointCloud line(2, 1);
    line << 0, 3;
    const Eigen::MatrixXd d = distance_matrix(line);
    CHECK(d(0, 1) == 3.0);
    CHECK(d(1, 0) == 3.0);
    CHECK(d.diagonal().isZero());
    const Eigen::MatrixXd sq = distance_matrix(unit_square());
    for (int i = 0; i < 4; ++i) {
      std::vector<double> off;
      for (int j = 0; j < 4; ++j) {
        if (j != i) off.push_back(sq(i, j));
      }
      std::sort(off.begin(), off.end());
      CHECK(off[0] == 1.0);
      CHECK(off[1] == 1.0);
      CHECK(off[2] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    }
    CHECK(cloud_diameter(unit_square()) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  }

  TEST_CASE("distance matrix validation") {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
    d(0, 1) = 1.0;
    CHECK_THROWS_AS(rips_persistence(d), MatrixError);
    CHECK_THROWS_AS(rips_persistence(Eigen::MatrixXd::Zero(2, 3)), MatrixError);
    d(1, 0) = 1.0;
    d(2, 2) = 0.5;
    CHECK_THROWS_AS(rips_persistence(d), MatrixError);
    d(2, 2) = 0.0;
    d(0, 2) = d(2, 0) = -1.0;
    CHECK_THROWS_AS(rips_persistence(d), MatrixError);
    d(0, 2) = d(2, 0) = std::nan("");
    CHECK_THROWS_AS(rips_persistence(d), MatrixError);
    CHECK_THROWS_AS(rips_persistence(Eigen::MatrixXd::Zero(2, 2), 2), RangeError);
  }

  TEST_CASE("canonical diagrams") {
    CHECK(rips_persistence(Eigen::MatrixXd::Zero(0, 0)).empty());
    CHECK(rips_persistence(Eigen::MatrixXd::Zero(1, 1)) == PersistenceDiagram{{0, 0.0, kInf}});
    Eigen::MatrixXd two(2, 2);
    two << 0, 1, 1, 0;
    CHECK(rips_persistence(two) == PersistenceDiagram{{0, 0.0, 1.0}, {0, 0.0, kInf}});

    const PersistenceDiagram sq = rips_persistence(distance_matrix(unit_square()));
    const PersistenceDiagram h1 = dim_pairs(sq, 1);
    REQUIRE(h1.size() == 1);
    CHECK(std::abs(h1[0].birth - 1.0) <= 1e-12);
    CHECK(std::abs(h1[0].death - std::sqrt(2.0)) <= 1e-12);
    CHECK(dim_pairs(sq, 0).size() == 4);
    CHECK(dim_pairs(rips_persistence(distance_matrix(unit_square()), 0), 1).empty());
  }

  TEST_CASE("circle has one long H1 bar") {
    PointCloud circle(20, 2);
    for (int i = 0; i < 20; ++i) {
      const double t = 2.0 * std::numbers::pi * i / 20.0;
      circle.row(i) << std::cos(t), std::sin(t);
    }
    const Eigen::MatrixXd d = distance_matrix(circle);
    const PersistenceDiagram h1 = dim_pairs(rips_persistence(d), 1);
    int long_bars = 0;
    for (const auto& p : h1) long_bars += p.persistence() > 0.5 ? 1 : 0;
    CHECK(long_bars == 1);
    CHECK(persistent_betti(rips_persistence(d), 0.25 * d.maxCoeff()).b1 == 1);
  }

  TEST_CASE("diagram matches the naive reduction") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
      const int m = 1 + trial % 12;
      const int dim = 2 + trial % 7;
      PointCloud c = random_cloud(rng, m, dim);
      if (trial % 3 == 0) c = c.array().round();  // many equal distances
      const Eigen::MatrixXd d = distance_matrix(c);
      CHECK(rips_persistence(d) == oracle::naive_rips(d));
    }
  }

  TEST_CASE("H0 deaths are the minimum spanning tree edges") {
    std::mt19937_64 rng(5);
    const PointCloud c = random_cloud(rng, 30, 3);
    const Eigen::MatrixXd d = distance_matrix(c);
    // Prim's algorithm
    std::vector<double> best(30, kInf);
    std::vector<bool> used(30, false);
    best[0] = 0.0;
    std::vector<double> mst;
    for (int it = 0; it < 30; ++it) {
      int u = -1;
      for (int v = 0; v < 30; ++v) {
        if (!used[v] && (u < 0 || best[v] < best[u])) u = v;
      }
      used[u] = true;
      if (it > 0) mst.push_back(best[u]);
      for (int v = 0; v < 30; ++v) best[v] = std::min(best[v], d(u, v));
    }
    std::sort(mst.begin(), mst.end());
    std::vector<double> deaths;
    for (const auto& p : dim_pairs(rips_persistence(d), 0)) {
      if (!p.essential()) deaths.push_back(p.death);
    }
    std::sort(deaths.begin(), deaths.end());
    CHECK(deaths == mst);
  }

  TEST_CASE("persistent betti") {
    CHECK(persistent_betti({{0, 0.0, kInf}}, 100.0) == BettiSignature{1, 0, 100.0});
    const PersistenceDiagram two{{0, 0.0, 1.0}, {0, 0.0, kInf}};
    CHECK(persistent_betti(two, 0.5).b0 == 2);
    CHECK(persistent_betti(two, 1.5).b0 == 1);
    CHECK(persistent_betti(two, 1.0).b0 == 1);  // strict comparison
    const PersistenceDiagram sq = rips_persistence(distance_matrix(unit_square()));
    CHECK(persistent_betti(sq, 0.3).b1 == 1);
    CHECK(persistent_betti(sq, 0.5).b1 == 0);

    std::mt19937_64 rng(8);
    const PersistenceDiagram d = rips_persistence(distance_matrix(random_cloud(rng, 12, 3)));
    BettiSignature prev = persistent_betti(d, 0.0);
    for (double t = 0.05; t < 3.0; t += 0.05) {
      const BettiSignature cur = persistent_betti(d, t);
      CHECK(cur.b0 <= prev.b0);
      CHECK(cur.b1 <= prev.b1);
      prev = cur;
    }
  }

  TEST_CASE("behaviour mapping") {
    CHECK(behaviour_from_signature(1, 0).kind == Behaviour::FixedPoint);
    CHECK(behaviour_from_signature(2, 0).kind == Behaviour::TwoPointCycle);
    CHECK(behaviour_from_signature(2, 2).kind == Behaviour::TwoLoopCycle);
    const BehaviourClass other = behaviour_from_signature(3, 1);
    CHECK(other.kind == Behaviour::Other);
    CHECK(other.b0 == 3);
    CHECK(other.b1 == 1);
    CHECK(to_string(Behaviour::TwoLoopCycle) == "two_loop_cycle");
  }

  TEST_CASE("svd projection preserves distances") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      const int m = 2 + trial % 10;
      const int dim = m + 3;
      const PointCloud c = random_cloud(rng, m, dim);
      const PointCloud p = svd_project(c, m);
      CHECK(p.rows() == m);
      CHECK(p.cols() == m);
      const Eigen::MatrixXd d0 = distance_matrix(c);
      const Eigen::MatrixXd d1 = distance_matrix(p);
      CHECK(((d1 - d0).cwiseAbs().array() <= 1e-9 * d0.array()).all());
    }
    PointCloud line(4, 2);
    line << 0, 0, 1, 2, 3, 6, -1, -2;
    const PointCloud p1 = svd_project(line, 1);
    CHECK(((distance_matrix(p1) - distance_matrix(line)).cwiseAbs().array() <= 1e-12).all());
    CHECK_THROWS_AS(svd_project(line, 0), RangeError);
    CHECK_THROWS_AS(svd_project(line, 3), RangeError);
  }

  TEST_CASE("pca3") {
    std::mt19937_64 rng(4);
    const PointCloud c = random_cloud(rng, 9, 3);
    const PointCloud p = pca3(c);
    CHECK(((distance_matrix(p) - distance_matrix(c)).cwiseAbs().array() <= 1e-12).all());
    PointCloud two(2, 5);
    two.setZero();
    two(1, 2) = 4.0;
    const PointCloud q = pca3(two);
    CHECK(std::abs(q(0, 0) - q(1, 0)) == doctest::Approx(4.0));
    CHECK(q.rightCols(2).isZero());

    SyntheticSpec spec;
    spec.kind = SyntheticKind::TwoPoint;
    spec.noise_sigma = 0.02;
    const PointCloud s = pca3(PointCloud(synth(spec).points()));
    // the first axis splits the points into two tight clusters
    int low = 0;
    for (Eigen::Index i = 0; i < s.rows(); ++i) low += s(i, 0) < 0 ? 1 : 0;
    CHECK(low == 200);
    CHECK(s.col(0).cwiseAbs().minCoeff() > 0.4);
  }

  TEST_CASE("classification") {
    ClassifyParams params;
    SyntheticSpec spec;
    spec.kind = SyntheticKind::TwoPoint;
    CHECK(classify(synth(spec), params).behaviour.kind == Behaviour::TwoPointCycle);
    spec.kind = SyntheticKind::FixedPoint;
    spec.length = 3401;
    const Trajectory settled = window(synth(spec), 3001, 3400);
    CHECK(classify(settled, params).behaviour.kind == Behaviour::FixedPoint);
    CHECK(classify(settled, params).ball_rule);
    // the transient alone is not one cluster at a quarter of its diameter
    spec.length = 400;
    CHECK(classify(synth(spec), params).behaviour.kind != Behaviour::FixedPoint);

    // a tiny square is a fixed point by the ball rule, whatever its shape
    const Classification tiny = classify_cloud(unit_square() * 0.01, params);
    CHECK(tiny.ball_rule);
    CHECK(tiny.behaviour.kind == Behaviour::FixedPoint);
    const Classification big = classify_cloud(unit_square(), params);
    CHECK_FALSE(big.ball_rule);
    CHECK(big.signature.b1 == 1);
    CHECK(big.behaviour.kind == Behaviour::Other);

    // rigid motions and scaling do not change the label
    spec.kind = SyntheticKind::TwoLoop;
    spec.noise_sigma = 0.02;
    const PointCloud loop = synth(spec).points();
    const Classification base = classify_cloud(loop, params);
    CHECK(base.behaviour.kind == Behaviour::TwoLoopCycle);
    const PointCloud moved = (loop * 3.0).rowwise() + Eigen::RowVectorXd::Constant(loop.cols(), 7.0);
    CHECK(classify_cloud(moved, params).behaviour == base.behaviour);

    params.thresh = 1e9;
    CHECK(classify_cloud(loop, params).signature.b0 == 1);
    CHECK_THROWS_AS(classify_cloud(PointCloud::Zero(1, 4)), RangeError);
    CHECK_THROWS_AS(classify_cloud(PointCloud::Zero(0, 4)), RangeError);
  }

  TEST_CASE("sliding window") {
    Trajectory::Matrix seq(4, 1);
    seq << 1, 2, 3, 4;
    const Trajectory t(seq);
    CHECK(sliding_window(t, {0, 1}) == PointCloud(seq));
    PointCloud expected(3, 2);
    expected << 1, 2, 2, 3, 3, 4;
    CHECK(sliding_window(t, {1, 1}) == expected);
    CHECK(sliding_window(t, {1, 2}).rows() == 2);
    CHECK(sliding_window(t, {3, 1}).rows() == 1);
    CHECK_THROWS_AS(sliding_window(t, {2, 2}), RangeError);
  }

  TEST_CASE("diagram CSV round trip") {
    std::mt19937_64 rng(6);
    const PersistenceDiagram d = rips_persistence(distance_matrix(random_cloud(rng, 10, 4)));
    std::stringstream buf;
    write_diagram_csv(buf, d);
    CHECK(buf.str().rfind("dim,birth,death\n", 0) == 0);
    CHECK(read_diagram_csv(buf) == d);
    std::istringstream bad("dim,birth,death\n0,1\n");
    CHECK_THROWS_AS(read_diagram_csv(bad), FormatError);
    std::istringstream none("");
    CHECK_THROWS_AS(read_diagram_csv(none), FormatError);
  }
}
