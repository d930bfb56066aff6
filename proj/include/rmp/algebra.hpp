#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rmp/matops.hpp"

namespace rmp {

/// An instantaneous RMP in resolved form: a desired acceleration paired with
/// the PSD metric that weighs it during combination.
struct RmpEval {
  Vec accel;
  Mat metric;

  Eigen::Index dim() const { return accel.size(); }
};

/// Force form (metric * accel, metric). Closed under addition and
/// Jacobian-transpose pullback; resolved by one generalized inverse.
struct UnresolvedRmp {
  Vec force;
  Mat metric;

  Eigen::Index dim() const { return force.size(); }

  static UnresolvedRmp zero(Eigen::Index k) {
    return UnresolvedRmp{Vec::Zero(k), Mat::Zero(k, k)};
  }
};

/// A task map linearized at a point: value x = phi(q), jacobian J = dphi/dq,
/// and optionally the curvature term Jdot * qdot (dropped by default
/// everywhere, Gauss-Newton style).
struct MapEval {
  Vec value;
  Mat jacobian;
  std::optional<Vec> curvature;

  Eigen::Index domain_dim() const { return jacobian.cols(); }
  Eigen::Index codomain_dim() const { return jacobian.rows(); }

  static MapEval identity(const Vec& x) {
    return MapEval{x, Mat::Identity(x.size(), x.size()), std::nullopt};
  }
};

inline void check_rmp(const RmpEval& r, const char* what) {
  require_same_dim(r.accel.size(), r.metric.rows(), what);
  require_same_dim(r.metric.rows(), r.metric.cols(), what);
}

// ---------------------------------------------------------------------------
// Addition (metric-weighted average)

inline RmpEval add(const RmpEval& a, const RmpEval& b) {
  require_same_dim(a.dim(), b.dim(), "add");
  const Mat metric = a.metric + b.metric;
  const Vec force = a.metric * a.accel + b.metric * b.accel;
  return RmpEval{generalized_inverse(metric) * force, metric};
}

inline RmpEval sum(std::span<const RmpEval> policies) {
  if (policies.empty()) {
    throw std::invalid_argument("sum: empty policy list (no additive identity is injected)");
  }
  const Eigen::Index k = policies.front().dim();
  Mat metric = Mat::Zero(k, k);
  Vec force = Vec::Zero(k);
  for (const RmpEval& p : policies) {
    require_same_dim(p.dim(), k, "sum");
    metric += p.metric;
    force += p.metric * p.accel;
  }
  return RmpEval{generalized_inverse(metric) * force, metric};
}

inline RmpEval sum(const std::vector<RmpEval>& policies) {
  return sum(std::span<const RmpEval>(policies));
}

// ---------------------------------------------------------------------------
// Resolved <-> unresolved

inline RmpEval resolve(const UnresolvedRmp& u) {
  require_same_dim(u.force.size(), u.metric.rows(), "resolve");
  return RmpEval{generalized_inverse(u.metric) * u.force, u.metric};
}

inline UnresolvedRmp unresolve(const RmpEval& r) {
  return UnresolvedRmp{r.metric * r.accel, r.metric};
}

inline UnresolvedRmp add_unresolved(const UnresolvedRmp& a, const UnresolvedRmp& b) {
  require_same_dim(a.dim(), b.dim(), "add_unresolved");
  return UnresolvedRmp{a.force + b.force, a.metric + b.metric};
}

// ---------------------------------------------------------------------------
// Pullback / pushforward

/// pull: ((J^T A J)^+ J^T A f, J^T A J), co-domain -> domain.
inline RmpEval pull(const MapEval& map, const RmpEval& r) {
  require_same_dim(r.dim(), map.codomain_dim(), "pull");
  const Mat& J = map.jacobian;
  const Mat metric = symmetrize(J.transpose() * r.metric * J);
  const Vec force = J.transpose() * (r.metric * r.accel);
  return RmpEval{generalized_inverse(metric) * force, metric};
}

inline UnresolvedRmp pull_unresolved(const MapEval& map, const UnresolvedRmp& u) {
  require_same_dim(u.dim(), map.codomain_dim(), "pull_unresolved");
  const Mat& J = map.jacobian;
  return UnresolvedRmp{J.transpose() * u.force,
                       symmetrize(J.transpose() * u.metric * J)};
}

/// push: (J h [+ Jdot qdot], (J^+)^T B J^+), domain -> co-domain. The
/// curvature term is dropped unless the caller opts in and the map carries it.
inline RmpEval push(const MapEval& map, const RmpEval& r, bool include_curvature = false) {
  require_same_dim(r.dim(), map.domain_dim(), "push");
  const Mat pinvJ = generalized_inverse(map.jacobian);
  Vec accel = map.jacobian * r.accel;
  if (include_curvature && map.curvature.has_value()) accel += *map.curvature;
  const Mat metric = symmetrize(pinvJ.transpose() * r.metric * pinvJ);
  return RmpEval{std::move(accel), metric};
}

}  // namespace rmp
