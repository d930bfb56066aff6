#include <catch2/catch_amalgamated.hpp>

#include "rmp/joint_limits.hpp"
#include "oracles.hpp"

using namespace rmp;

namespace {

SigmoidLimitMap make_map() {
  Vec lower(3), upper(3);
  lower << -2.0, -1.0, -3.0;
  upper << 2.0, 3.0, 1.0;
  return SigmoidLimitMap(lower, upper);
}

}  // namespace

TEST_CASE("sigmoid forward maps zero to the midpoints and saturates at the limits") {
  const SigmoidLimitMap map = make_map();
  CHECK(oracles::max_abs_diff(sigmoid_forward(map, Vec(Vec::Zero(3))), map.midpoints()) < 1e-12);

  const Vec far_up = sigmoid_forward(map, Vec(Vec::Constant(3, 40.0)));
  const Vec far_down = sigmoid_forward(map, Vec(Vec::Constant(3, -40.0)));
  CHECK((far_up.array() < map.upper.array()).all());
  CHECK((far_down.array() > map.lower.array()).all());
  CHECK(oracles::max_abs_diff(far_up, map.upper) < 1e-12);
  CHECK(oracles::max_abs_diff(far_down, map.lower) < 1e-12);
}

TEST_CASE("sigmoid inverse round-trips for |u| up to 20") {
  const SigmoidLimitMap map = make_map();
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec u = oracles::random_vec(rng, 3, -20.0, 20.0);
    CHECK(oracles::max_abs_diff(sigmoid_inverse(map, sigmoid_forward(map, u)), u) < 1e-9);
  }
}

TEST_CASE("plain Jacobian peaks at midrange and vanishes at the limits") {
  const SigmoidLimitMap map = make_map();
  const Vec mid = plain_jacobian_diag(map, map.midpoints());
  CHECK(oracles::max_abs_diff(mid, Vec(0.25 * map.range())) < 1e-12);

  Vec near_limit = map.midpoints();
  near_limit(0) = map.upper(0) - 1e-6 * (map.upper(0) - map.lower(0));
  const Vec d = plain_jacobian_diag(map, near_limit);
  CHECK(d(0) <= 1e-5 * (map.upper(0) - map.lower(0)));
  CHECK(d(0) > 0.0);
}

TEST_CASE("plain Jacobian matches finite differences of the forward map") {
  const SigmoidLimitMap map = make_map();
  std::mt19937_64 rng(72);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec u = oracles::random_vec(rng, 3, -4.0, 4.0);
    const Vec q = sigmoid_forward(map, u);
    const double eps = 1e-6;
    for (int i = 0; i < 3; ++i) {
      Vec up = u, um = u;
      up(i) += eps;
      um(i) -= eps;
      const double fd = (sigmoid_forward(map, up)(i) - sigmoid_forward(map, um)(i)) / (2 * eps);
      CHECK(plain_jacobian_diag(map, q)(i) == Catch::Approx(fd).margin(1e-8));
    }
  }
}

TEST_CASE("plain Jacobian rejects configurations at or outside the limits") {
  const SigmoidLimitMap map = make_map();
  Vec at_limit = map.midpoints();
  at_limit(1) = map.upper(1);
  CHECK_THROWS_AS(plain_jacobian_diag(map, at_limit), std::invalid_argument);
  at_limit(1) = map.upper(1) + 0.5;
  CHECK_THROWS_AS(plain_jacobian_diag(map, at_limit), std::invalid_argument);
}

TEST_CASE("directional Jacobian blends between the sigmoid slope and identity") {
  const SigmoidLimitMap map = make_map();
  Vec q = map.midpoints();
  q(0) = map.upper(0) - 1e-3 * (map.upper(0) - map.lower(0));
  const double d = plain_jacobian_diag(map, q)(0);

  Vec qdot = Vec::Zero(3);
  qdot(0) = 3.0;  // pressing into the upper limit
  CHECK(directional_jacobian_diag(map, q, qdot)(0) == Catch::Approx(d).margin(1e-3));

  qdot(0) = -3.0;  // backing away
  CHECK(directional_jacobian_diag(map, q, qdot)(0) == Catch::Approx(1.0).margin(1e-3));

  qdot(0) = 0.0;  // symmetric blend
  CHECK(directional_jacobian_diag(map, q, qdot)(0) == Catch::Approx(0.5 * (d + 1.0)));
}

TEST_CASE("directional Jacobian entries stay within (0, max(d, 1)]") {
  const SigmoidLimitMap map = make_map();
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 300; ++trial) {
    Vec q(3);
    for (int i = 0; i < 3; ++i) {
      std::uniform_real_distribution<double> dist(0.01, 0.99);
      q(i) = map.lower(i) + dist(rng) * (map.upper(i) - map.lower(i));
    }
    const Vec qdot = oracles::random_vec(rng, 3, -5.0, 5.0);
    const Vec dtilde = directional_jacobian_diag(map, q, qdot);
    const Vec d = plain_jacobian_diag(map, q);
    for (int i = 0; i < 3; ++i) {
      CHECK(dtilde(i) > 0.0);
      CHECK(dtilde(i) <= std::max(d(i), 1.0) + 1e-12);
    }
  }
}

TEST_CASE("apply_joint_limits matches a dense linear solve away from the limits") {
  const SigmoidLimitMap map = make_map();
  std::mt19937_64 rng(74);
  const Vec q = map.midpoints();
  const Vec qdot = oracles::random_vec(rng, 3);
  const RmpEval cspace = oracles::random_rmp(rng, 3, true);
  const UnresolvedRmp combined = unresolve(cspace);

  // independent assembly of D (DAD + lambda I)^{-1} (D f + lambda h)
  const Vec diag = directional_jacobian_diag(map, q, qdot);
  const Mat D = diag.asDiagonal();
  const double lambda = map.regulator_weight;
  const Vec h = ((map.regulator_gain_p * (map.target() - q) - map.regulator_gain_d * qdot).array() /
                 diag.array())
                    .matrix();
  const Mat lhs = D * combined.metric * D + lambda * Mat::Identity(3, 3);
  const Vec expect = D * lhs.fullPivLu().solve(D * combined.force + lambda * h);

  const RmpEval out = apply_joint_limits(map, combined, q, qdot);
  CHECK(oracles::max_abs_diff(out.accel, expect) < 1e-10);

  Mat expected_metric = combined.metric;
  expected_metric.diagonal() += lambda * diag.array().square().inverse().matrix();
  CHECK(oracles::max_abs_diff(out.metric, expected_metric) < 1e-12);
}

TEST_CASE("the limit correction vanishes as lambda goes to zero") {
  SigmoidLimitMap map = make_map();
  map.regulator_weight = 1e-10;
  std::mt19937_64 rng(75);
  const Vec q = map.midpoints();
  const Vec qdot = oracles::random_vec(rng, 3);
  const RmpEval cspace = oracles::random_rmp(rng, 3, true);
  const Vec corrected = apply_joint_limits(map, unresolve(cspace), q, qdot).accel;
  CHECK(oracles::max_abs_diff(corrected, resolve(unresolve(cspace)).accel) < 1e-6);
}

TEST_CASE("acceleration into a nearby limit is suppressed quadratically") {
  const SigmoidLimitMap map = make_map();
  Vec q = map.midpoints();
  q(0) = map.upper(0) - 1e-3 * (map.upper(0) - map.lower(0));
  Vec qdot = Vec::Zero(3);
  qdot(0) = 0.5;  // moving toward the limit

  Vec push = Vec::Zero(3);
  push(0) = 50.0;  // unconstrained policy pressing further
  const UnresolvedRmp combined{push, Mat::Identity(3, 3)};

  const Vec out = apply_joint_limits(map, combined, q, qdot).accel;
  CHECK(std::abs(out(0)) <= 1e-2 * std::abs(push(0)));
}

TEST_CASE("apply_joint_limits rejects states outside the limits") {
  const SigmoidLimitMap map = make_map();
  Vec q = map.midpoints();
  q(2) = map.lower(2) - 0.1;
  CHECK_THROWS_AS(
      apply_joint_limits(map, UnresolvedRmp::zero(3), q, Vec(Vec::Zero(3))),
      std::invalid_argument);
}

TEST_CASE("computing in U-space and pushing forward equals the q-space expression") {
  const SigmoidLimitMap map = make_map();
  std::mt19937_64 rng(76);
  for (int trial = 0; trial < 100; ++trial) {
    Vec q(3);
    for (int i = 0; i < 3; ++i) {
      std::uniform_real_distribution<double> dist(0.05, 0.95);
      q(i) = map.lower(i) + dist(rng) * (map.upper(i) - map.lower(i));
    }
    const Vec qdot = oracles::random_vec(rng, 3);
    const RmpEval cspace = oracles::random_rmp(rng, 3, true);

    const Vec diag = plain_jacobian_diag(map, q);
    const MapEval sigma{q, Mat(diag.asDiagonal()), std::nullopt};
    const RmpEval in_u = pull(sigma, cspace);
    const Vec h = limit_regulator(map, diag, q, qdot);
    const RmpEval with_regulator =
        add(in_u, RmpEval{h, map.regulator_weight * Mat::Identity(3, 3)});
    const RmpEval pushed = push(sigma, with_regulator);

    const RmpEval direct =
        apply_joint_limits(map, unresolve(cspace), q, qdot, LimitJacobianKind::Plain);
    CHECK(oracles::max_abs_diff(pushed.accel, direct.accel) < 1e-9);
    CHECK(oracles::max_abs_diff(pushed.metric, direct.metric) < 1e-7);
  }
}

TEST_CASE("the three-step Jacobian-scaling recipe reproduces apply_joint_limits") {
  const SigmoidLimitMap map = make_map();
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    Vec q(3);
    for (int i = 0; i < 3; ++i) {
      std::uniform_real_distribution<double> dist(0.05, 0.95);
      q(i) = map.lower(i) + dist(rng) * (map.upper(i) - map.lower(i));
    }
    const Vec qdot = oracles::random_vec(rng, 3);

    std::uniform_int_distribution<int> count(1, 6);
    const int leaves = count(rng);
    std::vector<Mat> jacobians;
    std::vector<RmpEval> policies;
    UnresolvedRmp combined = UnresolvedRmp::zero(3);
    for (int i = 0; i < leaves; ++i) {
      std::uniform_int_distribution<int> kdist(1, 3);
      const Eigen::Index k = kdist(rng);
      jacobians.push_back(oracles::random_mat(rng, k, 3));
      policies.push_back(oracles::random_rmp(rng, k));
      combined = add_unresolved(
          combined, pull_unresolved(MapEval{Vec::Zero(k), jacobians.back(), std::nullopt},
                                    unresolve(policies.back())));
    }

    const Vec diag = directional_jacobian_diag(map, q, qdot);
    const double lambda = map.regulator_weight;
    Mat scaled_normal = lambda * Mat::Identity(3, 3);          // step 2: + lambda I
    Vec scaled_rhs = lambda * limit_regulator(map, diag, q, qdot);  // step 3: regulator RMP
    for (int i = 0; i < leaves; ++i) {
      const Mat scaled_j = jacobians[i] * diag.asDiagonal();   // step 1: J D
      scaled_normal += scaled_j.transpose() * policies[i].metric * scaled_j;
      scaled_rhs += scaled_j.transpose() * (policies[i].metric * policies[i].accel);
    }
    const Vec recipe = diag.asDiagonal() * scaled_normal.ldlt().solve(scaled_rhs);

    const Vec direct = apply_joint_limits(map, combined, q, qdot).accel;
    CHECK(oracles::max_abs_diff(recipe, direct) < 1e-9);
  }
}

TEST_CASE("integrating in U-space matches integrating the pushed-forward policy in Q") {
  // Covariance under the bijective sigmoid map: 100 Euler steps at dt = 1e-3
  // agree within 1e-4 per joint between the two parameterizations.
  const SigmoidLimitMap map = make_map();
  std::mt19937_64 rng(78);
  const Mat metric = oracles::random_spd(rng, 3);
  const Vec attract_to = map.midpoints() + 0.3 * oracles::random_vec(rng, 3);
  auto cspace_policy = [&](const Vec& q, const Vec& qdot) {
    return RmpEval{4.0 * (attract_to - q) - 3.0 * qdot, metric};
  };

  const double dt = 1e-3;
  const Vec q0 = map.midpoints() + 0.2 * oracles::random_vec(rng, 3);
  const Vec qdot0 = 0.5 * oracles::random_vec(rng, 3);

  // integrate directly in Q
  Vec q = q0, qdot = qdot0;
  for (int step = 0; step < 100; ++step) {
    const Vec accel = apply_joint_limits(map, unresolve(cspace_policy(q, qdot)), q, qdot,
                                         LimitJacobianKind::Plain)
                          .accel;
    q += qdot * dt;
    qdot += accel * dt;
  }

  // integrate in U and map the trajectory forward
  Vec u = sigmoid_inverse(map, q0);
  Vec qd = qdot0;
  Vec udot = (qd.array() / plain_jacobian_diag(map, q0).array()).matrix();
  for (int step = 0; step < 100; ++step) {
    const Vec qu = sigmoid_forward(map, u);
    const Vec diag = plain_jacobian_diag(map, qu);
    const Vec qdot_u = (diag.array() * udot.array()).matrix();
    const MapEval sigma{qu, Mat(diag.asDiagonal()), std::nullopt};
    const RmpEval in_u = pull(sigma, cspace_policy(qu, qdot_u));
    const Vec h = limit_regulator(map, diag, qu, qdot_u);
    const RmpEval combined = add(in_u, RmpEval{h, map.regulator_weight * Mat::Identity(3, 3)});
    u += udot * dt;
    udot += combined.accel * dt;
  }
  const Vec q_from_u = sigmoid_forward(map, u);
  CHECK((q - q_from_u).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("aggressive policies cannot push the state through a limit") {
  const SigmoidLimitMap map = make_map();
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 10; ++trial) {
    Vec q = map.midpoints();
    Vec qdot = oracles::random_vec(rng, 3);
    const Vec push = 20.0 * oracles::random_vec(rng, 3);
    const Mat metric = oracles::random_spd(rng, 3);
    const double dt = 1e-2;
    for (int step = 0; step < 500; ++step) {
      const Vec accel =
          apply_joint_limits(map, UnresolvedRmp{Vec(metric * push), metric}, q, qdot).accel;
      q += qdot * dt;
      qdot += accel * dt;
      REQUIRE(map.inside(q));
    }
  }
}

TEST_CASE("limit map validation") {
  Vec lower(2), upper(2);
  lower << 0.0, 0.0;
  upper << 0.0, 1.0;
  CHECK_THROWS_AS(SigmoidLimitMap(lower, upper), std::invalid_argument);

  SigmoidLimitMap bad = make_map();
  bad.regulator_weight = -0.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
