#include <catch2/catch_amalgamated.hpp>

#include "rmp/kinematics.hpp"
#include "oracles.hpp"

using namespace rmp;

namespace {

ChainModel planar2() {
  ChainModel m;
  m.name = "planar2";
  m.planar = true;
  for (int i = 0; i < 2; ++i) {
    RevoluteJoint j;
    j.axis = Eigen::Vector3d::UnitZ();
    if (i > 0) j.offset.translation() = Eigen::Vector3d(1, 0, 0);
    j.lower = -3.0;
    j.upper = 3.0;
    m.joints.push_back(j);
  }
  m.ee_offset.translation() = Eigen::Vector3d(1, 0, 0);
  m.body_points = {{0, {0.0, 0.0, 0.0}, 0.1}, {1, {1.0, 0.0, 0.0}, 0.1}};
  m.validate();
  return m;
}

Vec random_q(std::mt19937_64& rng, const ChainModel& model) {
  Vec q(model.dof());
  for (int i = 0; i < model.dof(); ++i) {
    std::uniform_real_distribution<double> dist(0.9 * model.joints[i].lower,
                                                0.9 * model.joints[i].upper);
    q(i) = dist(rng);
  }
  return q;
}

}  // namespace

TEST_CASE("stretched planar 2-link arm reaches (2, 0)") {
  const ChainModel m = planar2();
  const FrameEval frame = forward_frame(m, Vec::Zero(2), m.ee_frame());
  CHECK(frame.origin.x() == Catch::Approx(2.0));
  CHECK(frame.origin.y() == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("quarter-turn at the base rotates the end effector to (0, 2)") {
  const ChainModel m = planar2();
  Vec q(2);
  q << M_PI / 2.0, 0.0;
  const FrameEval frame = forward_frame(m, q, m.ee_frame());
  CHECK(frame.origin.x() == Catch::Approx(0.0).margin(1e-12));
  CHECK(frame.origin.y() == Catch::Approx(2.0));
}

TEST_CASE("origin Jacobians match finite differences") {
  std::mt19937_64 rng(51);
  for (const ChainModel& m : {planar2(), planar3(), arm7()}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Vec q = random_q(rng, m);
      const FrameEval frame = forward_frame(m, q, m.ee_frame());
      const double eps = 1e-6;
      for (int j = 0; j < m.dof(); ++j) {
        Vec qp = q, qm = q;
        qp(j) += eps;
        qm(j) -= eps;
        const Eigen::Vector3d fd = (forward_frame(m, qp, m.ee_frame()).origin -
                                    forward_frame(m, qm, m.ee_frame()).origin) /
                                   (2 * eps);
        CHECK((frame.origin_jacobian.col(j) - fd).cwiseAbs().maxCoeff() < 1e-5);
      }
    }
  }
}

TEST_CASE("forward_frame rejects out-of-range links") {
  const ChainModel m = planar3();
  CHECK_THROWS_AS(forward_frame(m, Vec::Zero(3), -1), std::invalid_argument);
  CHECK_THROWS_AS(forward_frame(m, Vec::Zero(3), 4), std::invalid_argument);
  CHECK_THROWS_AS(forward_frame(m, Vec::Zero(2), 0), std::invalid_argument);
}

TEST_CASE("a body point at the anchored base joint is constant") {
  const ChainModel m = planar2();
  const DifferentiableMap map = body_point_map(m, 0);
  std::mt19937_64 rng(52);
  const MapEval at_zero = map.eval(Vec::Zero(2));
  for (int trial = 0; trial < 10; ++trial) {
    const MapEval at = map.eval(random_q(rng, m));
    CHECK(oracles::max_abs_diff(at.value, at_zero.value) < 1e-12);
    CHECK(at.jacobian.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("the end-effector body point agrees with forward_frame") {
  const ChainModel m = planar3();
  const DifferentiableMap ee = body_point_map(m, 3);  // (link 2, local (1,0,0))
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec q = random_q(rng, m);
    const FrameEval frame = forward_frame(m, q, m.ee_frame());
    CHECK(oracles::max_abs_diff(ee.eval(q).value, Vec(frame.origin.head(2))) < 1e-12);
  }
}

TEST_CASE("body point Jacobians pass the finite-difference check") {
  for (const ChainModel& m : {planar3(), arm7()}) {
    const Vec lo = 0.9 * m.lower_limits();
    const Vec hi = 0.9 * m.upper_limits();
    for (size_t p = 0; p < m.body_points.size(); ++p) {
      const JacobianReport report =
          check_jacobian(body_point_map(m, static_cast<int>(p)), 100, 1e-5, lo, hi, 54);
      CHECK(report.passed);
    }
  }
}

TEST_CASE("body_point_map rejects invalid indices") {
  const ChainModel m = planar3();
  CHECK_THROWS_AS(body_point_map(m, -1), std::invalid_argument);
  CHECK_THROWS_AS(body_point_map(m, 99), std::invalid_argument);
}

TEST_CASE("planar heading axis sits one unit beyond the end origin") {
  const ChainModel m = planar3();
  const DifferentiableMap heading = axis_target_map(m, m.ee_frame(), FrameAxis::X);
  const Vec at = heading.eval(Vec::Zero(3)).value;
  CHECK(at(0) == Catch::Approx(4.0));  // 3 links + unit axis tip
  CHECK(at(1) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("origin plus two axis maps constrain the full frame") {
  const ChainModel m = arm7();
  std::mt19937_64 rng(55);
  const DifferentiableMap stacked =
      stack_map(stack_map(link_point_map(m, m.ee_frame(), Eigen::Vector3d::Zero()),
                          axis_target_map(m, m.ee_frame(), FrameAxis::X)),
                axis_target_map(m, m.ee_frame(), FrameAxis::Y));
  for (int trial = 0; trial < 5; ++trial) {
    const Mat jac = stacked.eval(random_q(rng, m)).jacobian;
    Eigen::JacobiSVD<Mat> svd(jac);
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
      if (svd.singularValues()(i) > 1e-8 * svd.singularValues()(0)) ++rank;
    }
    CHECK(rank >= 6);  // the frame's six degrees of freedom are pinned
  }
}

TEST_CASE("axis tip Jacobians pass the finite-difference check") {
  const ChainModel m = arm7();
  const Vec lo = 0.9 * m.lower_limits();
  const Vec hi = 0.9 * m.upper_limits();
  for (FrameAxis axis : {FrameAxis::X, FrameAxis::Y, FrameAxis::Z}) {
    CHECK(check_jacobian(axis_target_map(m, m.ee_frame(), axis), 30, 1e-5, lo, hi, 56).passed);
  }
}

TEST_CASE("rotation columns stay orthonormal along random trajectories") {
  std::mt19937_64 rng(57);
  const ChainModel m = arm7();
  Vec q = random_q(rng, m);
  const Vec qdot = oracles::random_vec(rng, 7);
  for (int step = 0; step < 50; ++step) {
    q += 0.01 * qdot;
    q = q.cwiseMax(0.95 * m.lower_limits()).cwiseMin(0.95 * m.upper_limits());
    for (int link = 0; link <= m.ee_frame(); ++link) {
      const FrameEval frame = forward_frame(m, q, link);
      CHECK((frame.axes.transpose() * frame.axes - Eigen::Matrix3d::Identity())
                .cwiseAbs()
                .maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("task-space velocity from the Jacobian matches finite differences") {
  std::mt19937_64 rng(58);
  const ChainModel m = planar3();
  const DifferentiableMap map = body_point_map(m, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec q = random_q(rng, m);
    const Vec qdot = oracles::random_vec(rng, 3);
    const double eps = 1e-6;
    const Vec fd = (map.eval(q + eps * qdot).value - map.eval(q - eps * qdot).value) / (2 * eps);
    CHECK(oracles::max_abs_diff(Vec(map.eval(q).jacobian * qdot), fd) < 1e-5);
  }
}

TEST_CASE("model validation catches bad chains") {
  ChainModel bad;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = planar3();
  bad.joints[1].lower = bad.joints[1].upper;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = planar3();
  bad.joints[0].axis = Eigen::Vector3d(0, 0, 2);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = planar3();
  bad.body_points.push_back({7, Eigen::Vector3d::Zero(), 0.1});
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("named presets load and unknown names are rejected") {
  CHECK(named_model("planar3").dof() == 3);
  CHECK(named_model("arm7").dof() == 7);
  CHECK(named_model("arm7").joints[3].axis.isApprox(Eigen::Vector3d::UnitY()));
  CHECK_THROWS_AS(named_model("hexapod"), std::invalid_argument);
}
