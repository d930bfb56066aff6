#pragma once

#include <cmath>
#include <stdexcept>

#include "rmp/algebra.hpp"

namespace rmp {

// ---------------------------------------------------------------------------
// Soft normalization

/// Alpha-scaled softmax between gamma and -gamma (soft "V"): strictly
/// positive, flat at 0 with value log(2)/alpha, slope 1 for large |gamma|.
inline double soft_v(double gamma, double alpha) {
  if (alpha <= 0.0) throw std::invalid_argument("soft_v: alpha must be positive");
  if (gamma >= 0.0) return gamma + std::log1p(std::exp(-2.0 * alpha * gamma)) / alpha;
  return -gamma + std::log1p(std::exp(2.0 * alpha * gamma)) / alpha;
}

/// v / soft_v(||v||): unit direction for large v, smoothly zero at v = 0.
inline Vec soft_normalize(const Vec& v, double alpha) {
  return v / soft_v(v.norm(), alpha);
}

/// weight * (beta * xi xi^T + (1 - beta) * I) with xi = soft_normalize(v).
/// Interpolates between an isotropic metric and one stretched along v. A
/// zero weight (a fully deactivated policy) is allowed.
inline Mat stretched_metric(const Vec& v, double beta, double weight, double alpha) {
  if (beta < 0.0 || beta > 1.0) throw std::invalid_argument("stretched_metric: beta in [0,1]");
  if (weight < 0.0) throw std::invalid_argument("stretched_metric: weight must be nonnegative");
  const Eigen::Index k = v.size();
  const Vec xi = soft_normalize(v, alpha);
  return weight * (beta * (xi * xi.transpose()) + (1.0 - beta) * Mat::Identity(k, k));
}

// ---------------------------------------------------------------------------
// Attractor

struct AttractorParams {
  Vec target;                   // z0
  double gain_p = 10.0;         // gamma_p
  double gain_d = 6.3;          // gamma_d, ~2 sqrt(gain_p)
  double soft_norm_scale = 10.0;  // alpha, ~10 / length scale
  double metric_sigma_h = 0.3;  // sigma_H, stretch onset radius
  double metric_sigma_w = 1.0;  // sigma_w, weight decay length

  void validate() const {
    if (gain_p <= 0 || gain_d <= 0 || soft_norm_scale <= 0 || metric_sigma_h <= 0 ||
        metric_sigma_w <= 0) {
      throw std::invalid_argument("AttractorParams: all gains and scales must be positive");
    }
  }
};

/// Soft-normalized spring-damper toward the target, with a metric that
/// stretches along the commanded direction away from the goal and decays
/// with distance.
inline RmpEval attractor_rmp(const AttractorParams& p, const Vec& z, const Vec& zdot) {
  require_same_dim(z.size(), p.target.size(), "attractor_rmp");
  require_same_dim(z.size(), zdot.size(), "attractor_rmp");
  const Vec error = p.target - z;
  const Vec accel = p.gain_p * soft_normalize(error, p.soft_norm_scale) - p.gain_d * zdot;
  const double dist = error.norm();
  const double beta = 1.0 - std::exp(-0.5 * dist * dist / (p.metric_sigma_h * p.metric_sigma_h));
  const double weight = std::exp(-dist / p.metric_sigma_w);
  return RmpEval{accel, stretched_metric(accel, beta, weight, p.soft_norm_scale)};
}

// ---------------------------------------------------------------------------
// Collision avoidance

struct CollisionParams {
  double repulsion_gain = 8.0;    // eta_rep
  double repulsion_scale = 0.2;   // nu_rep
  double damping_gain = 2.0;      // eta_damp
  double damping_scale = 0.2;     // nu_damp
  double epsilon = 1e-3;          // stabilizes the damping activation at d = 0
  double weight_radius = 0.5;     // r, activation radius of the metric weight

  void validate() const {
    if (repulsion_gain <= 0 || repulsion_scale <= 0 || damping_gain <= 0 ||
        damping_scale <= 0 || epsilon <= 0 || weight_radius <= 0) {
      throw std::invalid_argument("CollisionParams: all parameters must be positive");
    }
  }
};

/// Directionally scaled projection of the velocity onto the obstacle
/// direction: max{0, -xdot.grad} (grad grad^T) xdot. Vanishes continuously
/// as the velocity turns away from the obstacle.
inline Vec obstacle_velocity_projection(const Vec& grad, const Vec& xdot) {
  const double approach = xdot.dot(grad);
  return std::max(0.0, -approach) * (grad * (grad.dot(xdot)));
}

/// Same map written without the projector: -(max{0, -xdot.grad})^2 grad.
inline Vec obstacle_velocity_projection_quadratic(const Vec& grad, const Vec& xdot) {
  const double toward = std::max(0.0, -xdot.dot(grad));
  return -(toward * toward) * grad;
}

/// Quadratic activation weight: 1 at contact, 0 with zero slope at the
/// activation radius, clamped outside [0, r].
inline double collision_weight(double dist, double radius) {
  const double s = std::min(std::max(dist, 0.0), radius);
  return s * s / (radius * radius) - 2.0 * s / radius + 1.0;
}

/// Obstacle avoidance in the body point's ambient space. dist_eval must come
/// from a distance map (1D value, unit-gradient row Jacobian). The damping
/// term opposes the approach velocity: it acts along +grad with magnitude
/// proportional to the squared approach speed, and is exactly zero when
/// receding.
inline RmpEval collision_rmp(const CollisionParams& p, const MapEval& dist_eval,
                             const Vec& xdot) {
  if (dist_eval.codomain_dim() != 1) {
    throw std::invalid_argument("collision_rmp: expected a scalar distance map evaluation");
  }
  require_same_dim(xdot.size(), dist_eval.domain_dim(), "collision_rmp");
  const double d = dist_eval.value(0);
  const Vec grad = dist_eval.jacobian.row(0).transpose();

  const double d_pos = std::max(d, 0.0);
  const Vec repulsion = p.repulsion_gain * std::exp(-d_pos / p.repulsion_scale) * grad;
  const double damping_activation =
      p.damping_gain / (d_pos / p.damping_scale + p.epsilon);
  const Vec damping = -damping_activation * obstacle_velocity_projection(grad, xdot);

  const Vec accel = repulsion + damping;
  const double w = collision_weight(d, p.weight_radius);
  const Eigen::Index k = xdot.size();
  return RmpEval{accel, w * Mat::Identity(k, k)};
}

/// Point-obstacle variant with a directionally stretched metric built from
/// the policy's own output; kept for side-by-side comparison with
/// collision_rmp.
inline RmpEval collision_rmp_simple(const CollisionParams& p, const Vec& x, const Vec& xdot,
                                    const Vec& obstacle_point, double soft_norm_scale = 1.0) {
  require_same_dim(x.size(), obstacle_point.size(), "collision_rmp_simple");
  require_same_dim(x.size(), xdot.size(), "collision_rmp_simple");
  const Vec v = x - obstacle_point;
  const double d = v.norm();
  if (d <= 0.0) throw std::invalid_argument("collision_rmp_simple: point coincides with obstacle");
  const Vec dir = v / d;

  const double alpha = p.repulsion_gain * std::exp(-d / p.repulsion_scale);
  const double beta = p.damping_gain / (d / p.damping_scale + p.epsilon);
  const Vec accel = alpha * dir - beta * (dir * dir.dot(xdot));

  const double w = collision_weight(d, p.weight_radius);
  const Vec xi = soft_normalize(accel, soft_norm_scale);
  return RmpEval{accel, w * (xi * xi.transpose())};
}

// ---------------------------------------------------------------------------
// C-space policies

struct RedundancyParams {
  Vec rest_pose;      // q0
  Vec rest_velocity;  // qdot0, zero for pure damping
  double gain_p = 1.0;
  double gain_d = 2.0;

  void validate() const {
    if (gain_p <= 0 || gain_d <= 0) {
      throw std::invalid_argument("RedundancyParams: gains must be positive");
    }
    require_same_dim(rest_pose.size(), rest_velocity.size(), "RedundancyParams");
  }
};

/// Identity-metric spring-damper toward a rest pose.
inline RmpEval redundancy_rmp(const RedundancyParams& p, const Vec& q, const Vec& qdot) {
  require_same_dim(q.size(), p.rest_pose.size(), "redundancy_rmp");
  const Vec accel = p.gain_p * (p.rest_pose - q) - p.gain_d * (qdot - p.rest_velocity);
  return RmpEval{accel, Mat::Identity(q.size(), q.size())};
}

/// C-space retract attractor toward a canonical configuration. A damping
/// term is included so the integral curves settle instead of oscillating.
inline RmpEval retract_rmp(const Vec& q_retract, double gain, double gain_d, const Vec& q,
                           const Vec& qdot) {
  require_same_dim(q.size(), q_retract.size(), "retract_rmp");
  if (gain <= 0 || gain_d <= 0) throw std::invalid_argument("retract_rmp: gains must be positive");
  const Vec accel = gain * (q_retract - q) - gain_d * qdot;
  return RmpEval{accel, Mat::Identity(q.size(), q.size())};
}

inline RmpEval retract_rmp(const Vec& q_retract, double gain, const Vec& q, const Vec& qdot) {
  return retract_rmp(q_retract, gain, 2.0 * std::sqrt(gain), q, qdot);
}

}  // namespace rmp
