#pragma once

#include <cmath>
#include <stdexcept>

#include "rmp/algebra.hpp"

namespace rmp {

enum class LimitJacobianKind {
  Plain,        // sigmoid derivative, position only
  Directional,  // velocity-aware blend toward identity when moving away
};

/// Per-joint affine logistic bijection between an unconstrained space U and
/// the joint-limit interval, plus the regulator RMP (h, lambda I) added in U.
struct SigmoidLimitMap {
  Vec lower;
  Vec upper;
  double velocity_sharpness = 10.0;  // c, s/rad
  double regulator_weight = 0.1;     // lambda
  double regulator_gain_p = 1.0;
  double regulator_gain_d = 2.0;
  Vec regulator_target;              // q0; empty selects the range midpoints

  SigmoidLimitMap() = default;
  SigmoidLimitMap(Vec l, Vec u) : lower(std::move(l)), upper(std::move(u)) { validate(); }

  void validate() const {
    require_same_dim(lower.size(), upper.size(), "SigmoidLimitMap");
    if (((upper - lower).array() <= 0.0).any()) {
      throw std::invalid_argument("SigmoidLimitMap: lower < upper required per joint");
    }
    if (velocity_sharpness <= 0 || regulator_weight <= 0 || regulator_gain_p <= 0 ||
        regulator_gain_d <= 0) {
      throw std::invalid_argument("SigmoidLimitMap: parameters must be positive");
    }
    if (regulator_target.size() != 0) {
      require_same_dim(regulator_target.size(), lower.size(), "SigmoidLimitMap target");
    }
  }

  Eigen::Index dim() const { return lower.size(); }
  Vec range() const { return upper - lower; }
  Vec midpoints() const { return 0.5 * (lower + upper); }
  Vec target() const { return regulator_target.size() ? regulator_target : midpoints(); }

  /// Clamps q a hair inside the open interval so logits and derivative
  /// inverses stay finite under round-off.
  Vec guard(const Vec& q) const {
    const Vec band = 1e-9 * range();
    return q.cwiseMax(lower + band).cwiseMin(upper - band);
  }

  bool inside(const Vec& q) const {
    return (q.array() > lower.array()).all() && (q.array() < upper.array()).all();
  }
};

/// q_i = (u_i sigmoid-squashed into [lower_i, upper_i]); strictly interior
/// for all finite u.
inline Vec sigmoid_forward(const SigmoidLimitMap& map, const Vec& u) {
  require_same_dim(u.size(), map.dim(), "sigmoid_forward");
  if (!u.allFinite()) throw std::invalid_argument("sigmoid_forward: non-finite input");
  const auto sig = (1.0 / (1.0 + (-u.array()).exp()));
  return map.lower.array() + map.range().array() * sig;
}

inline Vec sigmoid_inverse(const SigmoidLimitMap& map, const Vec& q) {
  require_same_dim(q.size(), map.dim(), "sigmoid_inverse");
  const Vec qg = map.guard(q);
  const auto t = (qg - map.lower).array() / map.range().array();
  return (t / (1.0 - t)).log();
}

/// Diagonal of the sigmoid Jacobian expressed in q-coordinates:
/// d_i = (q_i - lower_i)(upper_i - q_i) / (upper_i - lower_i).
inline Vec plain_jacobian_diag(const SigmoidLimitMap& map, const Vec& q) {
  require_same_dim(q.size(), map.dim(), "plain_jacobian");
  if (!map.inside(q)) {
    throw std::invalid_argument("plain_jacobian: configuration at or outside joint limits");
  }
  const Vec qg = map.guard(q);
  return (qg - map.lower).array() * (map.upper - qg).array() / map.range().array();
}

inline Mat plain_jacobian(const SigmoidLimitMap& map, const Vec& q) {
  return plain_jacobian_diag(map, q).asDiagonal();
}

/// Velocity-aware diagonal: near a limit and moving toward it the entry is
/// the sigmoid derivative, moving away it relaxes to 1.
///   dtilde_i = s_i (a_i d_i + (1-a_i)) + (1-s_i)((1-a_i) d_i + a_i)
/// with s_i the limit proximity in [0,1] and a_i = logistic(c qdot_i).
inline Vec directional_jacobian_diag(const SigmoidLimitMap& map, const Vec& q, const Vec& qdot) {
  require_same_dim(qdot.size(), map.dim(), "directional_jacobian");
  const Vec d = plain_jacobian_diag(map, q);
  const auto s = ((map.guard(q) - map.lower).array() / map.range().array()).eval();
  const auto a = (1.0 / (1.0 + (-map.velocity_sharpness * qdot.array()).exp())).eval();
  return s * (a * d.array() + (1.0 - a)) + (1.0 - s) * ((1.0 - a) * d.array() + a);
}

inline Vec limit_jacobian_diag(const SigmoidLimitMap& map, const Vec& q, const Vec& qdot,
                               LimitJacobianKind kind) {
  return kind == LimitJacobianKind::Plain ? plain_jacobian_diag(map, q)
                                          : directional_jacobian_diag(map, q, qdot);
}

/// Regulator policy expressed in q-coordinates, h = D^{-1}(gp (q0 - q) - gd qdot).
inline Vec limit_regulator(const SigmoidLimitMap& map, const Vec& diag, const Vec& q,
                           const Vec& qdot) {
  const Vec spring = map.regulator_gain_p * (map.target() - q) - map.regulator_gain_d * qdot;
  return spring.array() / diag.array();
}

/// Pulls the combined C-space RMP into the unconstrained space, adds the
/// regulator (h, lambda I), and pushes the resolved result back:
///   accel  = D (D A D + lambda I)^{-1} (D f + lambda h)
///   metric = A + lambda D^{-2}
/// Acceleration components of joints pressing into a nearby limit are
/// suppressed by the vanishing diagonal.
inline RmpEval apply_joint_limits(const SigmoidLimitMap& map, const UnresolvedRmp& combined,
                                  const Vec& q, const Vec& qdot,
                                  LimitJacobianKind kind = LimitJacobianKind::Directional) {
  require_same_dim(combined.dim(), map.dim(), "apply_joint_limits");
  require_same_dim(q.size(), map.dim(), "apply_joint_limits");
  if (!map.inside(q)) {
    throw std::invalid_argument("apply_joint_limits: configuration outside joint limits");
  }
  const Vec diag = limit_jacobian_diag(map, q, qdot, kind);
  const Vec h = limit_regulator(map, diag, q, qdot);
  const double lambda = map.regulator_weight;
  const Eigen::Index n = map.dim();

  const Mat regularized = diag.asDiagonal() * combined.metric * diag.asDiagonal() +
                          lambda * Mat::Identity(n, n);
  const Vec rhs = diag.asDiagonal() * combined.force + lambda * h;
  const Vec accel = diag.asDiagonal() * regularized.ldlt().solve(rhs);

  Mat metric = combined.metric;
  metric.diagonal() += lambda * diag.array().square().inverse().matrix();
  return RmpEval{accel, metric};
}

}  // namespace rmp
