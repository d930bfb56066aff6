#pragma once

#include <cmath>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "rmp/joint_limits.hpp"
#include "rmp/kinematics.hpp"
#include "rmp/policies.hpp"
#include "rmp/tree.hpp"

namespace rmp {

struct CheckResult {
  std::string name;
  int instances = 0;
  double tolerance = 0.0;
  double worst = 0.0;       // largest observed deviation
  bool passed = false;
  std::uint64_t fail_seed = 0;  // reproduces the first failing instance
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;

  bool passed() const {
    for (const CheckResult& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

inline void print_report(std::ostream& out, const SuiteReport& report) {
  for (const CheckResult& c : report.checks) {
    out << (c.passed ? "  [pass] " : "  [FAIL] ") << report.suite << "/" << c.name << "  (n="
        << c.instances << ", tol=" << c.tolerance << ", worst=" << c.worst << ")";
    if (!c.passed) out << "  reproduce with seed " << c.fail_seed;
    out << "\n";
  }
}

namespace vdetail {

inline Vec random_vec(std::mt19937_64& rng, Eigen::Index k, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vec v(k);
  for (Eigen::Index i = 0; i < k; ++i) v(i) = dist(rng);
  return v;
}

inline Mat random_mat(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Mat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = dist(rng);
  return m;
}

/// PSD from a Gram matrix; possibly rank deficient when rows < k.
inline Mat random_psd(std::mt19937_64& rng, Eigen::Index k, bool allow_rank_deficient = true) {
  std::uniform_int_distribution<int> pick(1, static_cast<int>(k) + 2);
  const Eigen::Index rows = allow_rank_deficient ? pick(rng) : k + 2;
  const Mat m = random_mat(rng, rows, k);
  return symmetrize(m.transpose() * m);
}

/// Strictly positive definite Gram matrix: [M; 0.3 I] stacked keeps the
/// spectrum away from zero.
inline Mat random_spd(std::mt19937_64& rng, Eigen::Index k) {
  const Mat m = random_mat(rng, k + 2, k);
  return symmetrize(m.transpose() * m + 0.09 * Mat::Identity(k, k));
}

/// Full-row-rank k x d Jacobian (resampled until comfortably conditioned).
inline Mat random_full_row_rank(std::mt19937_64& rng, Eigen::Index k, Eigen::Index d) {
  for (;;) {
    const Mat j = random_mat(rng, k, d);
    Eigen::JacobiSVD<Mat> svd(j);
    if (svd.singularValues()(k - 1) > 0.05 * svd.singularValues()(0)) return j;
  }
}

inline RmpEval random_rmp(std::mt19937_64& rng, Eigen::Index k, bool spd = false) {
  return RmpEval{random_vec(rng, k),
                 spd ? random_spd(rng, k) : random_psd(rng, k)};
}

/// Snaps entries to multiples of 2^-10 so that sums and small products stay
/// exact in double precision; used by the bit-exact algebra law checks.
inline double quantize(double x) { return std::round(x * 1024.0) / 1024.0; }
inline Vec quantize(Vec v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = quantize(v(i));
  return v;
}
inline Mat quantize(Mat m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = quantize(m(i, j));
  return m;
}

inline bool bit_equal(const Vec& a, const Vec& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}
inline bool bit_equal(const Mat& a, const Mat& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

inline double metric_norm(const Vec& delta, const Mat& metric) {
  return std::sqrt(std::max(0.0, delta.dot(metric * delta)));
}

/// Runs `body` over per-instance seeds; body returns the observed deviation
/// (<= tol passes). Records the first failing seed.
template <typename Body>
CheckResult run_check(const std::string& name, int instances, double tol, std::uint64_t seed,
                      Body&& body) {
  CheckResult result;
  result.name = name;
  result.instances = instances;
  result.tolerance = tol;
  result.passed = true;
  for (int i = 0; i < instances; ++i) {
    const std::uint64_t instance_seed = seed + static_cast<std::uint64_t>(i);
    std::mt19937_64 rng(instance_seed);
    const double deviation = body(rng);
    if (deviation > result.worst) result.worst = deviation;
    if (deviation > tol && result.passed) {
      result.passed = false;
      result.fail_seed = instance_seed;
    }
  }
  return result;
}

inline Eigen::Index random_dim(std::mt19937_64& rng, int lo = 1, int hi = 7) {
  std::uniform_int_distribution<int> pick(lo, hi);
  return pick(rng);
}

}  // namespace vdetail

// ---------------------------------------------------------------------------
// Algebra suite

/// `negate_metric_fault` flips the sign of one metric inside the PSD-closure
/// check; it exists so the negative-control test can prove the harness
/// detects a corrupted build.
inline SuiteReport verify_algebra(std::uint64_t seed = 20250101,
                                  bool negate_metric_fault = false) {
  using namespace vdetail;
  SuiteReport report;
  report.suite = "algebra";

  report.checks.push_back(run_check(
      "moore_penrose_identities", 300, 1e-9, seed, [](std::mt19937_64& rng) {
        const Eigen::Index r = random_dim(rng), c = random_dim(rng);
        Mat m = random_mat(rng, r, c);
        std::uniform_int_distribution<int> coin(0, 2);
        if (coin(rng) == 0 && r > 1) m.row(0) = m.row(r - 1);  // force rank deficiency
        const Mat p = generalized_inverse(m);
        double worst = (m * p * m - m).cwiseAbs().maxCoeff();
        worst = std::max(worst, (p * m * p - p).cwiseAbs().maxCoeff());
        worst = std::max(worst, ((m * p) - (m * p).transpose()).cwiseAbs().maxCoeff());
        worst = std::max(worst, ((p * m) - (p * m).transpose()).cwiseAbs().maxCoeff());
        return worst;
      }));

  report.checks.push_back(run_check(
      "addition_commutative_bitexact", 1000, 0.0, seed + 1, [](std::mt19937_64& rng) {
        const Eigen::Index k = random_dim(rng);
        const RmpEval a = random_rmp(rng, k), b = random_rmp(rng, k);
        const RmpEval ab = add(a, b), ba = add(b, a);
        return (bit_equal(ab.accel, ba.accel) && bit_equal(ab.metric, ba.metric)) ? 0.0 : 1.0;
      }));

  report.checks.push_back(run_check(
      "unresolved_associative_bitexact", 1000, 0.0, seed + 2, [](std::mt19937_64& rng) {
        const Eigen::Index k = random_dim(rng);
        auto make = [&] {
          return UnresolvedRmp{quantize(random_vec(rng, k)), quantize(random_psd(rng, k))};
        };
        const UnresolvedRmp a = make(), b = make(), c = make();
        const UnresolvedRmp left = add_unresolved(add_unresolved(a, b), c);
        const UnresolvedRmp right = add_unresolved(a, add_unresolved(b, c));
        return (bit_equal(left.force, right.force) && bit_equal(left.metric, right.metric))
                   ? 0.0
                   : 1.0;
      }));

  report.checks.push_back(run_check(
      "resolved_associative", 1000, 1e-9, seed + 3, [](std::mt19937_64& rng) {
        const Eigen::Index k = random_dim(rng);
        const RmpEval a = random_rmp(rng, k, true), b = random_rmp(rng, k, true),
                      c = random_rmp(rng, k, true);
        const RmpEval left = add(add(a, b), c), right = add(a, add(b, c));
        return std::max((left.accel - right.accel).cwiseAbs().maxCoeff(),
                        (left.metric - right.metric).cwiseAbs().maxCoeff());
      }));

  report.checks.push_back(run_check(
      "pullback_linear", 1000, 1e-9, seed + 4, [](std::mt19937_64& rng) {
        const Eigen::Index k = random_dim(rng, 1, 4);
        const Eigen::Index d = random_dim(rng, static_cast<int>(k), 7);
        const MapEval map{random_vec(rng, k), random_full_row_rank(rng, k, d), std::nullopt};
        const RmpEval a = random_rmp(rng, k, true), b = random_rmp(rng, k, true);
        const RmpEval lhs = pull(map, add(a, b));
        const RmpEval rhs = add(pull(map, a), pull(map, b));
        return std::max((lhs.accel - rhs.accel).cwiseAbs().maxCoeff(),
                        (lhs.metric - rhs.metric).cwiseAbs().maxCoeff());
      }));

  report.checks.push_back(run_check(
      "pullback_composition", 1000, 1e-9, seed + 5, [](std::mt19937_64& rng) {
        const Eigen::Index k = random_dim(rng, 1, 3);
        const Eigen::Index mid = random_dim(rng, static_cast<int>(k), 5);
        const Eigen::Index d = random_dim(rng, static_cast<int>(mid), 7);
        const Mat j_outer = random_mat(rng, k, mid);
        const Mat j_inner = random_mat(rng, mid, d);
        const RmpEval r = random_rmp(rng, k);
        const MapEval outer{random_vec(rng, k), j_outer, std::nullopt};
        const MapEval inner{random_vec(rng, mid), j_inner, std::nullopt};
        const MapEval composed{outer.value, j_outer * j_inner, std::nullopt};
        const RmpEval nested = pull(inner, pull(outer, r));
        const RmpEval direct = pull(composed, r);
        return std::max((nested.accel - direct.accel).cwiseAbs().maxCoeff(),
                        (nested.metric - direct.metric).cwiseAbs().maxCoeff());
      }));

  report.checks.push_back(run_check(
      "unresolved_matches_resolved", 500, 1e-9, seed + 6, [](std::mt19937_64& rng) {
        const Eigen::Index k = random_dim(rng);
        const RmpEval a = random_rmp(rng, k, true), b = random_rmp(rng, k, true);
        const RmpEval via_unresolved = resolve(add_unresolved(unresolve(a), unresolve(b)));
        const RmpEval direct = add(a, b);
        return (via_unresolved.accel - direct.accel).cwiseAbs().maxCoeff();
      }));

  report.checks.push_back(run_check(
      "pull_push_inverse", 500, 1e-8, seed + 7, [](std::mt19937_64& rng) {
        const Eigen::Index k = random_dim(rng, 1, 4);
        const Eigen::Index d = random_dim(rng, static_cast<int>(k), 7);
        const Mat j = random_full_row_rank(rng, k, d);
        const MapEval map{random_vec(rng, k), j, std::nullopt};
        const RmpEval r = random_rmp(rng, k, true);
        const RmpEval round = push(map, pull(map, r));
        double worst = std::max((round.accel - r.accel).cwiseAbs().maxCoeff(),
                                (round.metric - r.metric).cwiseAbs().maxCoeff());
        // and the full-rank pullback simplification
        const RmpEval pulled = pull(map, r);
        worst = std::max(worst,
                         (pulled.accel - generalized_inverse(j) * r.accel).cwiseAbs().maxCoeff());
        return worst;
      }));

  report.checks.push_back(run_check(
      "weighted_average_reduction", 500, 1e-12, seed + 8, [](std::mt19937_64& rng) {
        const Eigen::Index k = random_dim(rng);
        std::uniform_int_distribution<int> count(2, 6);
        std::uniform_real_distribution<double> wdist(0.1, 5.0);
        const int n = count(rng);
        std::vector<RmpEval> policies;
        Vec expect = Vec::Zero(k);
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
          const double w = wdist(rng);
          const Vec f = random_vec(rng, k);
          policies.push_back(RmpEval{f, w * Mat::Identity(k, k)});
          expect += w * f;
          total += w;
        }
        expect /= total;
        return (sum(policies).accel - expect).cwiseAbs().maxCoeff();
      }));

  report.checks.push_back(run_check(
      "psd_closure", 500, 0.0, seed + 9, [negate_metric_fault](std::mt19937_64& rng) {
        const Eigen::Index k = random_dim(rng, 1, 4);
        const Eigen::Index d = random_dim(rng, static_cast<int>(k), 7);
        RmpEval a = random_rmp(rng, k), b = random_rmp(rng, k);
        if (negate_metric_fault) a.metric = -a.metric;
        const MapEval map{random_vec(rng, k), random_mat(rng, k, d), std::nullopt};
        const RmpEval added = add(a, b);
        const RmpEval pulled = pull(map, added);
        const bool ok = is_psd(added.metric, 1e-9) && is_psd(pulled.metric, 1e-9);
        return ok ? 0.0 : 1.0;
      }));

  return report;
}

// ---------------------------------------------------------------------------
// Kinematics suite

inline SuiteReport verify_kinematics(std::uint64_t seed = 20250202) {
  using namespace vdetail;
  SuiteReport report;
  report.suite = "kinematics";

  for (const ChainModel& model : {planar3(), arm7()}) {
    const Vec lo = 0.9 * model.lower_limits();
    const Vec hi = 0.9 * model.upper_limits();

    report.checks.push_back(run_check(
        model.name + "_body_point_jacobians", 25, 1e-5, seed, [&](std::mt19937_64& rng) {
          std::uniform_int_distribution<int> pick(0, static_cast<int>(model.body_points.size()) - 1);
          const DifferentiableMap map = body_point_map(model, pick(rng));
          std::uniform_int_distribution<unsigned> reseed;
          return check_jacobian(map, 4, 1e-5, lo, hi, reseed(rng)).max_relative_error;
        }));

    report.checks.push_back(run_check(
        model.name + "_axis_jacobians", 25, 1e-5, seed + 1, [&](std::mt19937_64& rng) {
          std::uniform_int_distribution<int> pick(0, model.ee_frame());
          std::uniform_int_distribution<int> axis(0, 2);
          const DifferentiableMap map =
              axis_target_map(model, pick(rng), static_cast<FrameAxis>(axis(rng)));
          std::uniform_int_distribution<unsigned> reseed;
          return check_jacobian(map, 4, 1e-5, lo, hi, reseed(rng)).max_relative_error;
        }));

    report.checks.push_back(run_check(
        model.name + "_frame_orthonormal", 100, 1e-9, seed + 2, [&](std::mt19937_64& rng) {
          Vec q(model.dof());
          for (int i = 0; i < model.dof(); ++i) {
            std::uniform_real_distribution<double> dist(lo(i), hi(i));
            q(i) = dist(rng);
          }
          std::uniform_int_distribution<int> pick(0, model.ee_frame());
          const FrameEval frame = forward_frame(model, q, pick(rng));
          return (frame.axes.transpose() * frame.axes - Eigen::Matrix3d::Identity())
              .cwiseAbs()
              .maxCoeff();
        }));

    report.checks.push_back(run_check(
        model.name + "_velocity_consistency", 50, 1e-5, seed + 3, [&](std::mt19937_64& rng) {
          Vec q(model.dof());
          for (int i = 0; i < model.dof(); ++i) {
            std::uniform_real_distribution<double> dist(lo(i), hi(i));
            q(i) = dist(rng);
          }
          const Vec qdot = random_vec(rng, model.dof());
          const DifferentiableMap map = body_point_map(
              model, static_cast<int>(model.body_points.size()) - 1);
          const double eps = 1e-6;
          const Vec fd = (map.eval(q + eps * qdot).value - map.eval(q - eps * qdot).value) /
                         (2.0 * eps);
          return (map.eval(q).jacobian * qdot - fd).cwiseAbs().maxCoeff();
        }));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Joint-limit suite

inline SuiteReport verify_limits(std::uint64_t seed = 20250303) {
  using namespace vdetail;
  SuiteReport report;
  report.suite = "limits";

  auto random_map = [](std::mt19937_64& rng, Eigen::Index n) {
    Vec lower(n), range(n);
    std::uniform_real_distribution<double> ldist(-3.0, -0.5), rdist(1.0, 5.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      lower(i) = ldist(rng);
      range(i) = rdist(rng);
    }
    return SigmoidLimitMap(lower, lower + range);
  };
  auto random_inside = [](std::mt19937_64& rng, const SigmoidLimitMap& map, double margin) {
    Vec q(map.dim());
    for (Eigen::Index i = 0; i < map.dim(); ++i) {
      std::uniform_real_distribution<double> dist(margin, 1.0 - margin);
      q(i) = map.lower(i) + dist(rng) * (map.upper(i) - map.lower(i));
    }
    return q;
  };

  report.checks.push_back(run_check(
      "sigmoid_round_trip", 500, 1e-9, seed, [&](std::mt19937_64& rng) {
        const Eigen::Index n = random_dim(rng);
        const SigmoidLimitMap map = random_map(rng, n);
        const Vec u = random_vec(rng, n, -20.0, 20.0);
        return (sigmoid_inverse(map, sigmoid_forward(map, u)) - u).cwiseAbs().maxCoeff();
      }));

  report.checks.push_back(run_check(
      "plain_jacobian_matches_fd", 300, 1e-5, seed + 1, [&](std::mt19937_64& rng) {
        const Eigen::Index n = random_dim(rng);
        const SigmoidLimitMap map = random_map(rng, n);
        const Vec u = random_vec(rng, n, -4.0, 4.0);
        const double eps = 1e-6;
        double worst = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          Vec up = u, um = u;
          up(i) += eps;
          um(i) -= eps;
          const double fd =
              (sigmoid_forward(map, up)(i) - sigmoid_forward(map, um)(i)) / (2 * eps);
          const double analytic = plain_jacobian_diag(map, sigmoid_forward(map, u))(i);
          worst = std::max(worst, std::abs(fd - analytic));
        }
        return worst;
      }));

  report.checks.push_back(run_check(
      "directional_blend_endpoints", 300, 1e-3, seed + 2, [&](std::mt19937_64& rng) {
        const Eigen::Index n = random_dim(rng);
        const SigmoidLimitMap map = random_map(rng, n);
        Vec q = random_inside(rng, map, 0.02);
        q(0) = map.upper(0) - 1e-3 * (map.upper(0) - map.lower(0));  // near upper limit
        Vec qdot = Vec::Zero(n);
        qdot(0) = 5.0;  // heading into the limit
        const double toward = directional_jacobian_diag(map, q, qdot)(0);
        const double d = plain_jacobian_diag(map, q)(0);
        qdot(0) = -5.0;  // heading away
        const double away = directional_jacobian_diag(map, q, qdot)(0);
        double worst = std::abs(toward - d);
        worst = std::max(worst, std::abs(away - 1.0));
        qdot(0) = 0.0;
        worst = std::max(
            worst, std::abs(directional_jacobian_diag(map, q, qdot)(0) - 0.5 * (d + 1.0)));
        return worst;
      }));

  report.checks.push_back(run_check(
      "u_space_equals_q_space", 300, 1e-9, seed + 3, [&](std::mt19937_64& rng) {
        // Path equivalence through the generic operators: pull the C-space
        // RMP into U with the plain sigmoid Jacobian, combine with the
        // regulator, push back; compare against the closed form.
        const Eigen::Index n = random_dim(rng);
        const SigmoidLimitMap map = random_map(rng, n);
        const Vec q = random_inside(rng, map, 0.05);
        const Vec qdot = random_vec(rng, n);
        const RmpEval cspace = random_rmp(rng, n, true);

        const Vec diag = plain_jacobian_diag(map, q);
        const MapEval sigma{q, Mat(diag.asDiagonal()), std::nullopt};  // J of u -> q at u(q)
        const RmpEval in_u = pull(sigma, cspace);
        const Vec h = limit_regulator(map, diag, q, qdot);
        const RmpEval regulator{h, map.regulator_weight * Mat::Identity(n, n)};
        const RmpEval pushed = push(sigma, add(in_u, regulator));

        const RmpEval direct =
            apply_joint_limits(map, unresolve(cspace), q, qdot, LimitJacobianKind::Plain);
        return (pushed.accel - direct.accel).cwiseAbs().maxCoeff();
      }));

  report.checks.push_back(run_check(
      "jacobian_scaling_recipe", 300, 1e-9, seed + 4, [&](std::mt19937_64& rng) {
        // Scale each leaf Jacobian by D, add lambda I, post-scale by D.
        const Eigen::Index n = random_dim(rng, 2, 6);
        const SigmoidLimitMap map = random_map(rng, n);
        const Vec q = random_inside(rng, map, 0.05);
        const Vec qdot = random_vec(rng, n);
        std::uniform_int_distribution<int> count(1, 5);
        const int leaves = count(rng);
        std::vector<Mat> jacobians;
        std::vector<RmpEval> policies;
        UnresolvedRmp combined = UnresolvedRmp::zero(n);
        for (int i = 0; i < leaves; ++i) {
          const Eigen::Index k = random_dim(rng, 1, 3);
          jacobians.push_back(random_mat(rng, k, n));
          policies.push_back(random_rmp(rng, k));
          const MapEval map_eval{random_vec(rng, k), jacobians.back(), std::nullopt};
          combined = add_unresolved(combined, pull_unresolved(map_eval, unresolve(policies.back())));
        }
        const Vec diag = directional_jacobian_diag(map, q, qdot);
        Mat scaled_metric = map.regulator_weight * Mat::Identity(n, n);
        Vec scaled_force = map.regulator_weight * limit_regulator(map, diag, q, qdot);
        for (int i = 0; i < leaves; ++i) {
          const Mat scaled_j = jacobians[i] * diag.asDiagonal();
          scaled_metric += scaled_j.transpose() * policies[i].metric * scaled_j;
          scaled_force += scaled_j.transpose() * (policies[i].metric * policies[i].accel);
        }
        const Vec recipe = diag.asDiagonal() * scaled_metric.ldlt().solve(scaled_force);
        const Vec direct = apply_joint_limits(map, combined, q, qdot).accel;
        return (recipe - direct).cwiseAbs().maxCoeff();
      }));

  report.checks.push_back(run_check(
      "containment_under_integration", 25, 0.0, seed + 5, [&](std::mt19937_64& rng) {
        const Eigen::Index n = random_dim(rng, 2, 5);
        const SigmoidLimitMap map = random_map(rng, n);
        Vec q = random_inside(rng, map, 0.1);
        Vec qdot = random_vec(rng, n, -0.5, 0.5);
        const RmpEval pull_to_corner{
            5.0 * random_vec(rng, n), random_spd(rng, n)};  // constant aggressive policy
        const double dt = 1e-2;
        for (int step = 0; step < 400; ++step) {
          const Vec accel =
              apply_joint_limits(map, unresolve(pull_to_corner), q, qdot).accel;
          q += qdot * dt;
          qdot += accel * dt;
          if (!map.inside(q)) return 1.0;
        }
        return 0.0;
      }));

  return report;
}

// ---------------------------------------------------------------------------
// Policy suite

inline SuiteReport verify_policies(std::uint64_t seed = 20250404) {
  using namespace vdetail;
  SuiteReport report;
  report.suite = "policies";

  report.checks.push_back(run_check(
      "soft_v_properties", 200, 1e-6, seed, [](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> adist(0.2, 20.0);
        const double alpha = adist(rng);
        double worst = std::abs(soft_v(0.0, alpha) - std::log(2.0) / alpha);
        const double eps = 1e-6;
        worst = std::max(worst,
                         std::abs((soft_v(eps, alpha) - soft_v(-eps, alpha)) / (2 * eps)));
        worst = std::max(worst, std::abs(soft_v(100.0 / alpha, alpha) / (100.0 / alpha) - 1.0));
        return worst;
      }));

  report.checks.push_back(run_check(
      "soft_normalize_limits", 200, 1e-3, seed + 1, [](std::mt19937_64& rng) {
        const Eigen::Index k = random_dim(rng, 1, 5);
        const Vec dir = random_vec(rng, k).normalized();
        double worst = (soft_normalize(1000.0 * dir, 1.0) - dir).norm();
        worst = std::max(worst, soft_normalize(Vec(Vec::Zero(k)), 1.0).norm());
        const Vec small = 1e-8 * dir;
        worst = std::max(
            worst, soft_normalize(small, 2.0).norm() <= 1e-8 * 2.0 / std::log(2.0) ? 0.0 : 1.0);
        return worst;
      }));

  report.checks.push_back(run_check(
      "velocity_projection_dual_forms", 500, 1e-12, seed + 2, [](std::mt19937_64& rng) {
        const Eigen::Index k = random_dim(rng, 2, 3);
        const Vec grad = random_vec(rng, k).normalized();
        const Vec xdot = random_vec(rng, k, -3.0, 3.0);
        return (obstacle_velocity_projection(grad, xdot) -
                obstacle_velocity_projection_quadratic(grad, xdot))
            .cwiseAbs()
            .maxCoeff();
      }));

  report.checks.push_back(run_check(
      "collision_weight_spline", 200, 1e-8, seed + 3, [](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> rdist(0.1, 2.0);
        const double r = rdist(rng);
        double worst = std::abs(collision_weight(0.0, r) - 1.0);
        worst = std::max(worst, std::abs(collision_weight(r, r)));
        const double eps = 1e-6;
        worst = std::max(worst, std::abs((collision_weight(r, r) - collision_weight(r - eps, r)) /
                                         eps));  // w'(r) = 0
        // monotone nonincreasing on [0, r]
        double prev = collision_weight(0.0, r);
        for (int i = 1; i <= 50; ++i) {
          const double w = collision_weight(r * i / 50.0, r);
          if (w > prev + 1e-12) worst = std::max(worst, w - prev);
          prev = w;
        }
        return worst;
      }));

  report.checks.push_back(run_check(
      "attractor_bounded", 300, 0.0, seed + 4, [](std::mt19937_64& rng) {
        const Eigen::Index k = random_dim(rng, 1, 3);
        AttractorParams params;
        params.target = random_vec(rng, k, -5.0, 5.0);
        const Vec z = random_vec(rng, k, -5.0, 5.0);
        const Vec zdot = random_vec(rng, k, -10.0, 10.0);
        const RmpEval rmp = attractor_rmp(params, z, zdot);
        const double bound = params.gain_p + params.gain_d * zdot.norm() + 1e-12;
        return rmp.accel.norm() <= bound && is_psd(rmp.metric, 1e-9) ? 0.0 : 1.0;
      }));

  report.checks.push_back(run_check(
      "collision_rmp_sane", 300, 0.0, seed + 5, [](std::mt19937_64& rng) {
        const Eigen::Index k = random_dim(rng, 2, 3);
        CollisionParams params;
        const SphereDistanceMap sphere(random_vec(rng, k), 0.3);
        Vec x = random_vec(rng, k, -2.0, 2.0);
        if ((x - sphere.center).norm() < 1e-3) x.array() += 0.5;
        const Vec xdot = random_vec(rng, k, -2.0, 2.0);
        const MapEval dist = eval_sphere_distance(sphere, x);
        const RmpEval rmp = collision_rmp(params, dist, xdot);
        const bool receding = xdot.dot(dist.jacobian.row(0).transpose()) > 0;
        bool ok = rmp.accel.allFinite() && is_psd(rmp.metric, 1e-9);
        if (receding) {
          // only repulsion remains; it is parallel to the gradient
          const Vec grad = dist.jacobian.row(0).transpose();
          const Vec expected =
              params.repulsion_gain *
              std::exp(-std::max(dist.value(0), 0.0) / params.repulsion_scale) * grad;
          ok = ok && (rmp.accel - expected).norm() < 1e-12;
        }
        return ok ? 0.0 : 1.0;
      }));

  return report;
}

// ---------------------------------------------------------------------------
// Tree suite

namespace vdetail {

/// Random linear-edge tree with policies scattered over its nodes; the
/// generator records everything the dense oracle needs to compose path
/// Jacobians on its own.
struct RandomTreeInstance {
  RmpTree tree;
  std::vector<Mat> path_jacobians;  // per policy, leaf-space x root-dim
  std::vector<RmpEval> policies;

  explicit RandomTreeInstance(std::mt19937_64& rng, Eigen::Index root_dim, int max_nodes,
                              int max_policies)
      : tree(root_dim) {
    std::vector<Eigen::Index> dims{root_dim};
    std::vector<Mat> to_root{Mat::Identity(root_dim, root_dim)};
    std::uniform_int_distribution<int> node_count(1, max_nodes);
    const int nodes = node_count(rng);
    for (int i = 0; i < nodes; ++i) {
      std::uniform_int_distribution<int> parent_pick(0, static_cast<int>(dims.size()) - 1);
      const int parent = parent_pick(rng);
      const Eigen::Index dim = random_dim(rng, 1, 4);
      const Mat jacobian = random_mat(rng, dim, dims[parent]);
      tree.add_node(parent, linear_map(jacobian));
      dims.push_back(dim);
      to_root.push_back(jacobian * to_root[parent]);
    }
    std::uniform_int_distribution<int> policy_count(1, max_policies);
    const int count = policy_count(rng);
    for (int i = 0; i < count; ++i) {
      std::uniform_int_distribution<int> node_pick(0, static_cast<int>(dims.size()) - 1);
      const int node = node_pick(rng);
      const RmpEval policy = random_rmp(rng, dims[node]);
      policies.push_back(policy);
      path_jacobians.push_back(to_root[node]);
      tree.add_policy(node, [policy](const Vec&, const Vec&) { return policy; });
    }
  }
};

}  // namespace vdetail

inline SuiteReport verify_tree(std::uint64_t seed = 20250505) {
  using namespace vdetail;
  SuiteReport report;
  report.suite = "tree";

  report.checks.push_back(run_check(
      "path_independence", 100, 1e-9, seed, [](std::mt19937_64& rng) {
        const Eigen::Index d = random_dim(rng, 2, 7);
        RandomTreeInstance inst(rng, d, 12, 20);
        const Vec q = random_vec(rng, d), qdot = random_vec(rng, d);
        const UnresolvedRmp a = inst.tree.evaluate_root(q, qdot, rng());
        const UnresolvedRmp b = inst.tree.evaluate_root(q, qdot, rng());
        return std::max((a.force - b.force).cwiseAbs().maxCoeff(),
                        (a.metric - b.metric).cwiseAbs().maxCoeff());
      }));

  report.checks.push_back(run_check(
      "optimality_vs_dense_solve", 200, 1e-8, seed + 1, [](std::mt19937_64& rng) {
        const Eigen::Index d = 7;
        RandomTreeInstance inst(rng, d, 20, 150);
        const Vec q = random_vec(rng, d), qdot = random_vec(rng, d);
        const RmpEval root = resolve(inst.tree.evaluate_root(q, qdot));

        Mat normal = Mat::Zero(d, d);
        Vec rhs = Vec::Zero(d);
        for (size_t i = 0; i < inst.policies.size(); ++i) {
          const Mat& j = inst.path_jacobians[i];
          normal += j.transpose() * inst.policies[i].metric * j;
          rhs += j.transpose() * (inst.policies[i].metric * inst.policies[i].accel);
        }
        const Vec oracle = normal.completeOrthogonalDecomposition().solve(rhs);
        return metric_norm(root.accel - oracle, normal);
      }));

  report.checks.push_back(run_check(
      "metric_additivity", 200, 1e-9, seed + 2, [](std::mt19937_64& rng) {
        const Eigen::Index d = random_dim(rng, 2, 7);
        RandomTreeInstance inst(rng, d, 10, 15);
        const Vec q = random_vec(rng, d), qdot = random_vec(rng, d);
        const UnresolvedRmp root = inst.tree.evaluate_root(q, qdot);
        Mat expect = Mat::Zero(d, d);
        for (size_t i = 0; i < inst.policies.size(); ++i) {
          const Mat& j = inst.path_jacobians[i];
          expect += j.transpose() * inst.policies[i].metric * j;
        }
        return (root.metric - expect).cwiseAbs().maxCoeff();
      }));

  return report;
}

inline std::vector<SuiteReport> verify_suites(const std::string& selector,
                                              std::uint64_t seed = 0,
                                              bool negate_metric_fault = false) {
  std::vector<SuiteReport> reports;
  const bool all = selector.empty() || selector == "all";
  if (all || selector == "algebra") {
    reports.push_back(verify_algebra(seed ? seed : 20250101, negate_metric_fault));
  }
  if (all || selector == "kinematics") reports.push_back(verify_kinematics(seed ? seed : 20250202));
  if (all || selector == "limits") reports.push_back(verify_limits(seed ? seed : 20250303));
  if (all || selector == "policies") reports.push_back(verify_policies(seed ? seed : 20250404));
  if (all || selector == "tree") reports.push_back(verify_tree(seed ? seed : 20250505));
  if (reports.empty()) {
    throw std::invalid_argument(
        "unknown suite '" + selector +
        "' (expected one of: algebra, kinematics, limits, policies, tree, all)");
  }
  return reports;
}

}  // namespace rmp
