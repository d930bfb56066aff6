#include <catch2/catch_amalgamated.hpp>

#include "rmp/policies.hpp"
#include "rmp/taskmap.hpp"
#include "oracles.hpp"

using namespace rmp;

TEST_CASE("soft_v value, slope, and asymptote") {
  for (const double alpha : {0.3, 1.0, 4.0, 10.0}) {
    CHECK(soft_v(0.0, alpha) == Catch::Approx(std::log(2.0) / alpha).epsilon(1e-12));

    const double eps = 1e-6;
    const double slope_at_zero = (soft_v(eps, alpha) - soft_v(-eps, alpha)) / (2 * eps);
    CHECK(std::abs(slope_at_zero) < 1e-6);

    const double gamma = 100.0 / alpha;
    CHECK(soft_v(gamma, alpha) / gamma == Catch::Approx(1.0).margin(1e-6));
  }
}

TEST_CASE("soft_v stays positive and is numerically safe far out") {
  for (const double gamma : {-1e6, -10.0, 0.0, 10.0, 1e6}) {
    const double value = soft_v(gamma, 2.0);
    CHECK(value > 0.0);
    CHECK(std::isfinite(value));
  }
  CHECK_THROWS_AS(soft_v(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("soft_normalize limits") {
  Vec zero = Vec::Zero(3);
  CHECK(soft_normalize(zero, 1.0).norm() == 0.0);

  std::mt19937_64 rng(61);
  const Vec dir = oracles::random_vec(rng, 3).normalized();
  CHECK((soft_normalize(Vec(1000.0 * dir), 1.0) - dir).norm() < 1e-3);

  // first-order bound ||xi(eps e)|| <= eps alpha / log 2 near zero
  for (const double eps : {1e-3, 1e-6, 1e-9}) {
    const double alpha = 3.0;
    CHECK(soft_normalize(Vec(eps * dir), alpha).norm() <= eps * alpha / std::log(2.0) + 1e-15);
  }

  // the norm never exceeds one (strictly below in exact arithmetic)
  for (int trial = 0; trial < 50; ++trial) {
    const Vec v = oracles::random_vec(rng, 3, -50.0, 50.0);
    CHECK(soft_normalize(v, 2.0).norm() <= 1.0);
  }
}

TEST_CASE("stretched metric endpoints") {
  std::mt19937_64 rng(62);
  const Vec v = oracles::random_vec(rng, 3);

  CHECK(oracles::max_abs_diff(stretched_metric(v, 0.0, 2.5, 1.0),
                              Mat(2.5 * Mat::Identity(3, 3))) < 1e-12);

  const Vec big = 1000.0 * v.normalized();
  const Mat outer = v.normalized() * v.normalized().transpose();
  CHECK(oracles::max_abs_diff(stretched_metric(big, 1.0, 2.0, 1.0), Mat(2.0 * outer)) < 1e-3);

  CHECK(stretched_metric(Vec(Vec::Zero(3)), 1.0, 1.0, 1.0).cwiseAbs().maxCoeff() < 1e-12);

  for (int trial = 0; trial < 30; ++trial) {
    const Vec w = oracles::random_vec(rng, 4, -5.0, 5.0);
    std::uniform_real_distribution<double> bdist(0.0, 1.0);
    CHECK(is_psd(stretched_metric(w, bdist(rng), 1.7, 2.0), 1e-9));
  }
}

TEST_CASE("attractor at equilibrium emits zero acceleration and a unit-weight metric") {
  AttractorParams p;
  p.target = Vec::Zero(3);
  const RmpEval out = attractor_rmp(p, Vec::Zero(3), Vec::Zero(3));
  CHECK(out.accel.norm() == 0.0);
  CHECK(oracles::max_abs_diff(out.metric, Mat(Mat::Identity(3, 3))) < 1e-12);
}

TEST_CASE("attractor saturates at the position gain far from the target") {
  AttractorParams p;
  p.target = Vec::Zero(3);
  Vec far(3);
  far << 1000.0, 0, 0;
  const RmpEval out = attractor_rmp(p, far, Vec::Zero(3));
  CHECK(out.accel.norm() == Catch::Approx(p.gain_p).margin(1e-6 * p.gain_p));
}

TEST_CASE("attractor reduces to pure damping at the target") {
  AttractorParams p;
  p.target = Vec::Zero(2);
  Vec v(2);
  v << 0.4, -1.2;
  const RmpEval out = attractor_rmp(p, Vec::Zero(2), v);
  CHECK(oracles::max_abs_diff(out.accel, Vec(-p.gain_d * v)) < 1e-12);
}

TEST_CASE("attractor acceleration is bounded by gain_p + gain_d ||zdot||") {
  std::mt19937_64 rng(63);
  AttractorParams p;
  p.target = oracles::random_vec(rng, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec z = oracles::random_vec(rng, 3, -10.0, 10.0);
    const Vec zdot = oracles::random_vec(rng, 3, -20.0, 20.0);
    const RmpEval out = attractor_rmp(p, z, zdot);
    CHECK(out.accel.norm() <= p.gain_p + p.gain_d * zdot.norm() + 1e-12);
    CHECK(is_psd(out.metric, 1e-9));
  }
}

TEST_CASE("velocity projection dual forms agree and are continuous at zero") {
  std::mt19937_64 rng(64);
  for (int trial = 0; trial < 300; ++trial) {
    const Vec grad = oracles::random_vec(rng, 3).normalized();
    const Vec xdot = oracles::random_vec(rng, 3, -5.0, 5.0);
    CHECK(oracles::max_abs_diff(obstacle_velocity_projection(grad, xdot),
                                obstacle_velocity_projection_quadratic(grad, xdot)) < 1e-12);
  }

  // sweep the approach speed across zero: the map stays continuous
  Vec grad(2);
  grad << 1, 0;
  Vec start(2);
  start << -101e-3, 0.5;
  Vec prev = obstacle_velocity_projection(grad, start);
  for (int i = -100; i <= 100; ++i) {
    Vec xdot(2);
    xdot << i * 1e-3, 0.5;
    const Vec cur = obstacle_velocity_projection(grad, xdot);
    CHECK((cur - prev).norm() < 2e-3);
    prev = cur;
  }
}

TEST_CASE("collision weight spline endpoints and monotonicity") {
  for (const double r : {0.2, 0.5, 1.5}) {
    CHECK(collision_weight(0.0, r) == 1.0);
    CHECK(collision_weight(r, r) == 0.0);
    const double eps = 1e-7;
    CHECK(std::abs(collision_weight(r - eps, r) - collision_weight(r, r)) / eps < 1e-5);
    CHECK(collision_weight(2.0 * r, r) == 0.0);
    CHECK(collision_weight(-0.1, r) == 1.0);

    double prev = collision_weight(0.0, r);
    for (int i = 1; i <= 100; ++i) {
      const double w = collision_weight(r * i / 100.0, r);
      CHECK(w <= prev + 1e-15);
      prev = w;
    }
  }
}

TEST_CASE("collision damping is inactive while receding") {
  CollisionParams p;
  Vec center = Vec::Zero(2);
  const SphereDistanceMap circle(center, 0.3);
  Vec x(2);
  x << 0.7, 0.0;
  Vec receding(2);
  receding << 1.5, 0.3;  // moving away from the obstacle
  const MapEval dist = eval_sphere_distance(circle, x);
  const RmpEval out = collision_rmp(p, dist, receding);
  const Vec repulsion_only =
      p.repulsion_gain * std::exp(-dist.value(0) / p.repulsion_scale) *
      dist.jacobian.row(0).transpose();
  CHECK(oracles::max_abs_diff(out.accel, repulsion_only) < 1e-14);
}

TEST_CASE("collision damping opposes the approach velocity") {
  CollisionParams p;
  Vec center = Vec::Zero(2);
  const SphereDistanceMap circle(center, 0.3);
  Vec x(2);
  x << 0.6, 0.0;
  Vec approaching(2);
  approaching << -2.0, 0.0;  // heading at the obstacle
  const MapEval dist = eval_sphere_distance(circle, x);
  const RmpEval out = collision_rmp(p, dist, approaching);
  const Vec grad = dist.jacobian.row(0).transpose();
  // total acceleration points away from the obstacle, stronger than repulsion alone
  const double repulsion = p.repulsion_gain * std::exp(-dist.value(0) / p.repulsion_scale);
  CHECK(out.accel.dot(grad) > repulsion);
}

TEST_CASE("collision policy far outside the activation radius has zero metric") {
  CollisionParams p;
  Vec center = Vec::Zero(2);
  const SphereDistanceMap circle(center, 0.2);
  Vec x(2);
  x << 5.0, 0.0;
  const RmpEval out = collision_rmp(p, eval_sphere_distance(circle, x), Vec(Vec::Zero(2)));
  CHECK(out.metric.cwiseAbs().maxCoeff() == 0.0);
  // and therefore it contributes nothing after combination
  const RmpEval other{Vec::Ones(2), Mat::Identity(2, 2)};
  const RmpEval combined = add(other, out);
  CHECK(oracles::max_abs_diff(combined.accel, other.accel) < 1e-12);
}

TEST_CASE("collision policy stays finite under penetration") {
  CollisionParams p;
  Vec center = Vec::Zero(2);
  const SphereDistanceMap circle(center, 0.5);
  Vec x(2);
  x << 0.2, 0.0;  // inside the circle
  const RmpEval out = collision_rmp(p, eval_sphere_distance(circle, x), Vec(Vec::Ones(2)));
  CHECK(out.accel.allFinite());
  CHECK(is_psd(out.metric, 1e-9));
}

TEST_CASE("simple collision form ignores velocity orthogonal to the obstacle direction") {
  CollisionParams p;
  Vec x(2), obstacle(2), sideways(2);
  x << 1.0, 0.0;
  obstacle << 0.0, 0.0;
  sideways << 0.0, 2.0;
  const RmpEval out = collision_rmp_simple(p, x, sideways, obstacle);
  const Vec repulsion_only = p.repulsion_gain * std::exp(-1.0 / p.repulsion_scale) *
                             (x - obstacle).normalized();
  CHECK(oracles::max_abs_diff(out.accel, repulsion_only) < 1e-12);
}

TEST_CASE("simple collision form deactivates far away and rejects coincident points") {
  CollisionParams p;
  Vec x(2), obstacle(2);
  x << 4.0, 0.0;
  obstacle << 0.0, 0.0;
  CHECK(collision_rmp_simple(p, x, Vec(Vec::Zero(2)), obstacle).metric.cwiseAbs().maxCoeff() ==
        0.0);
  CHECK_THROWS_AS(collision_rmp_simple(p, obstacle, Vec(Vec::Zero(2)), obstacle),
                  std::invalid_argument);
}

TEST_CASE("two-obstacle squeeze: superposition cancels, the combined metric does not") {
  // A point centered between two obstacles, from rest. The accelerations
  // cancel but the combined metric keeps full weight across the gap, so the
  // combination still suppresses motion toward either obstacle.
  CollisionParams p;
  Vec x = Vec::Zero(2);
  Vec left(2), right(2);
  left << -0.3, 0.0;
  right << 0.3, 0.0;
  const Vec rest = Vec::Zero(2);

  const RmpEval a = collision_rmp_simple(p, x, rest, left);
  const RmpEval b = collision_rmp_simple(p, x, rest, right);

  const Vec superposed = a.accel + b.accel;
  CHECK(superposed.norm() < 1e-12);  // superposition ignores the squeeze

  const RmpEval combined = add(a, b);
  CHECK(combined.accel.norm() < 1e-9);
  Vec gap_axis(2);
  gap_axis << 1.0, 0.0;
  const double weight_across_gap = gap_axis.dot(combined.metric * gap_axis);
  CHECK(weight_across_gap > 0.1);  // the squeeze direction keeps its weight

  // combining with an attractor along the gap axis damps that component
  const RmpEval attractor{gap_axis, Mat::Identity(2, 2)};
  const RmpEval with_obstacles = add(add(a, b), attractor);
  CHECK(with_obstacles.accel.dot(gap_axis) < attractor.accel.dot(gap_axis) - 0.05);
}

TEST_CASE("redundancy policy is a spring-damper with identity metric") {
  std::mt19937_64 rng(65);
  RedundancyParams p;
  p.rest_pose = oracles::random_vec(rng, 4);
  p.rest_velocity = Vec::Zero(4);

  CHECK(redundancy_rmp(p, p.rest_pose, p.rest_velocity).accel.norm() == 0.0);

  const Vec qdot = oracles::random_vec(rng, 4);
  const RmpEval damped = redundancy_rmp(p, p.rest_pose, qdot);
  CHECK(oracles::max_abs_diff(damped.accel, Vec(-p.gain_d * qdot)) < 1e-12);
  CHECK(oracles::max_abs_diff(damped.metric, Mat(Mat::Identity(4, 4))) < 1e-12);
}

TEST_CASE("redundancy policy makes an under-determined task well posed") {
  std::mt19937_64 rng(66);
  RedundancyParams p;
  p.rest_pose = Vec::Zero(5);
  p.rest_velocity = Vec::Zero(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat j = oracles::random_mat(rng, 1, 5);  // a single scalar task
    const RmpEval task = oracles::random_rmp(rng, 1, true);
    const RmpEval pulled = pull(MapEval{Vec::Zero(1), j, std::nullopt}, task);
    const RmpEval combined = add(pulled, redundancy_rmp(p, Vec(Vec::Zero(5)), Vec(Vec::Zero(5))));
    Eigen::SelfAdjointEigenSolver<Mat> eig(combined.metric);
    CHECK(eig.eigenvalues().minCoeff() > 1e-9);  // full rank
  }
}

TEST_CASE("retract policy vanishes at the retract pose and converges from rest") {
  Vec q_r(3);
  q_r << 0.3, -0.5, 1.0;
  CHECK(retract_rmp(q_r, 10.0, q_r, Vec(Vec::Zero(3))).accel.norm() == 0.0);

  // obstacle-free integral curve reaches the retract configuration
  Vec q(3), qdot(3);
  q << -1.0, 1.2, -0.4;
  qdot.setZero();
  const double dt = 5e-3;
  int steps = 0;
  for (; steps < 2000; ++steps) {
    const Vec accel = retract_rmp(q_r, 10.0, q, qdot).accel;
    q += qdot * dt;
    qdot += accel * dt;
    if ((q - q_r).cwiseAbs().maxCoeff() < 1e-3 && qdot.norm() < 1e-3) break;
  }
  CHECK(steps < 2000);
}

TEST_CASE("parameter bundles validate positivity") {
  AttractorParams attractor;
  attractor.target = Vec::Zero(2);
  attractor.gain_p = -1.0;
  CHECK_THROWS_AS(attractor.validate(), std::invalid_argument);

  CollisionParams collision;
  collision.epsilon = 0.0;
  CHECK_THROWS_AS(collision.validate(), std::invalid_argument);

  CHECK_THROWS_AS(retract_rmp(Vec(Vec::Zero(2)), -2.0, Vec(Vec::Zero(2)), Vec(Vec::Zero(2))),
                  std::invalid_argument);
}
