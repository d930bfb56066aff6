#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <utility>

#include "rmp/algebra.hpp"

namespace rmp {

/// A differentiable map q -> x with an analytic Jacobian, evaluated on
/// demand. Maps are immutable after construction and evaluation is pure.
struct DifferentiableMap {
  Eigen::Index domain_dim = 0;
  Eigen::Index codomain_dim = 0;
  std::function<MapEval(const Vec&)> evaluator;

  MapEval eval(const Vec& q) const {
    require_same_dim(q.size(), domain_dim, "DifferentiableMap::eval");
    MapEval out = evaluator(q);
    require_same_dim(out.codomain_dim(), codomain_dim, "DifferentiableMap::eval (codomain)");
    require_same_dim(out.domain_dim(), domain_dim, "DifferentiableMap::eval (jacobian cols)");
    return out;
  }
};

inline DifferentiableMap identity_map(Eigen::Index dim) {
  return DifferentiableMap{dim, dim, [](const Vec& q) { return MapEval::identity(q); }};
}

inline DifferentiableMap linear_map(const Mat& m) {
  return DifferentiableMap{m.cols(), m.rows(),
                           [m](const Vec& q) { return MapEval{m * q, m, std::nullopt}; }};
}

/// outer(inner(q)); the chained Jacobian is J_outer * J_inner.
inline DifferentiableMap compose(const DifferentiableMap& inner, const DifferentiableMap& outer) {
  require_same_dim(inner.codomain_dim, outer.domain_dim, "compose");
  return DifferentiableMap{
      inner.domain_dim, outer.codomain_dim, [inner, outer](const Vec& q) {
        MapEval a = inner.eval(q);
        MapEval b = outer.eval(a.value);
        return MapEval{std::move(b.value), b.jacobian * a.jacobian, std::nullopt};
      }};
}

/// [a(q); b(q)] stacked, with Jacobians stacked row-wise. Lets one policy
/// observe two task spaces at once.
inline DifferentiableMap stack_map(const DifferentiableMap& a, const DifferentiableMap& b) {
  require_same_dim(a.domain_dim, b.domain_dim, "stack_map");
  const Eigen::Index k = a.codomain_dim + b.codomain_dim;
  return DifferentiableMap{a.domain_dim, k, [a, b, k](const Vec& q) {
                             MapEval ea = a.eval(q);
                             MapEval eb = b.eval(q);
                             Vec value(k);
                             value << ea.value, eb.value;
                             Mat jac(k, a.domain_dim);
                             jac << ea.jacobian, eb.jacobian;
                             return MapEval{std::move(value), std::move(jac), std::nullopt};
                           }};
}

/// a(q) - b(q), useful as the relative-position space of two body points.
inline DifferentiableMap difference_map(const DifferentiableMap& a, const DifferentiableMap& b) {
  require_same_dim(a.domain_dim, b.domain_dim, "difference_map (domain)");
  require_same_dim(a.codomain_dim, b.codomain_dim, "difference_map (codomain)");
  return DifferentiableMap{a.domain_dim, a.codomain_dim, [a, b](const Vec& q) {
                             MapEval ea = a.eval(q);
                             MapEval eb = b.eval(q);
                             return MapEval{ea.value - eb.value, ea.jacobian - eb.jacobian,
                                            std::nullopt};
                           }};
}

// ---------------------------------------------------------------------------
// Cylindrical coordinates

/// Weighted cylindrical coordinates W * (r, theta, z) about an arbitrary
/// axis. theta is measured in (-pi, pi] against a fixed reference direction
/// perpendicular to the axis; trajectories must stay off the branch cut.
struct CylindricalMap {
  Eigen::Vector3d axis_point = Eigen::Vector3d::Zero();
  Eigen::Vector3d axis_direction = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d weights = Eigen::Vector3d::Ones();

  CylindricalMap() = default;
  CylindricalMap(const Eigen::Vector3d& point, const Eigen::Vector3d& direction,
                 const Eigen::Vector3d& w)
      : axis_point(point), axis_direction(direction), weights(w) {
    if (std::abs(axis_direction.norm() - 1.0) > 1e-12) {
      throw std::invalid_argument("CylindricalMap: axis direction must be unit length");
    }
    if ((weights.array() <= 0.0).any()) {
      throw std::invalid_argument("CylindricalMap: weights must be positive");
    }
  }

  /// Reference frame in the plane normal to the axis; e1 anchors theta = 0.
  std::pair<Eigen::Vector3d, Eigen::Vector3d> planar_frame() const {
    Eigen::Vector3d seed = Eigen::Vector3d::UnitX();
    if (std::abs(axis_direction.dot(seed)) > 0.9) seed = Eigen::Vector3d::UnitY();
    const Eigen::Vector3d e1 = (seed - axis_direction.dot(seed) * axis_direction).normalized();
    return {e1, axis_direction.cross(e1)};
  }
};

inline MapEval eval_cylindrical(const CylindricalMap& map, const Eigen::Vector3d& x) {
  const auto [e1, e2] = map.planar_frame();
  const Eigen::Vector3d p = x - map.axis_point;
  const double u = e1.dot(p);
  const double v = e2.dot(p);
  const double r2 = u * u + v * v;
  const double r = std::sqrt(r2);
  if (r <= 1e-9) throw std::invalid_argument("eval_cylindrical: point on the cylinder axis");

  Vec value(3);
  value << r, std::atan2(v, u), map.axis_direction.dot(p);

  Mat jac(3, 3);
  jac.row(0) = ((u * e1 + v * e2) / r).transpose();
  jac.row(1) = ((u * e2 - v * e1) / r2).transpose();
  jac.row(2) = map.axis_direction.transpose();

  value.array() *= map.weights.array();
  jac.array().colwise() *= map.weights.array();
  return MapEval{std::move(value), std::move(jac), std::nullopt};
}

inline DifferentiableMap cylindrical_map(const CylindricalMap& map) {
  return DifferentiableMap{3, 3, [map](const Vec& q) {
                             return eval_cylindrical(map, Eigen::Vector3d(q));
                           }};
}

// ---------------------------------------------------------------------------
// Distance to a sphere (circle in 2D)

/// d(x) = ||x - c|| - radius; the gradient is the unit outward direction, so
/// the closest obstacle point is x - d * grad. Negative values indicate
/// penetration.
struct SphereDistanceMap {
  Vec center;
  double radius = 0.0;

  SphereDistanceMap() = default;
  SphereDistanceMap(Vec c, double r) : center(std::move(c)), radius(r) {
    if (radius < 0.0) throw std::invalid_argument("SphereDistanceMap: radius must be >= 0");
  }
};

inline MapEval eval_sphere_distance(const SphereDistanceMap& map, const Vec& x) {
  require_same_dim(x.size(), map.center.size(), "eval_sphere_distance");
  const Vec delta = x - map.center;
  const double dist = delta.norm();
  if (dist <= 0.0) throw std::invalid_argument("eval_sphere_distance: point at sphere center");
  Vec value(1);
  value << dist - map.radius;
  Mat jac = (delta / dist).transpose();
  return MapEval{std::move(value), std::move(jac), std::nullopt};
}

inline DifferentiableMap sphere_distance_map(const SphereDistanceMap& map) {
  const Eigen::Index n = map.center.size();
  return DifferentiableMap{n, 1, [map](const Vec& q) { return eval_sphere_distance(map, q); }};
}

// ---------------------------------------------------------------------------
// Finite-difference verification

struct JacobianReport {
  double max_relative_error = 0.0;
  bool passed = false;
  Vec worst_point;
};

/// Compares the analytic Jacobian against central differences (step 1e-6) at
/// random points drawn from [lo, hi]^d. Relative error is measured against
/// max(1, ||J||_max) per sample.
inline JacobianReport check_jacobian(const DifferentiableMap& map, int samples, double tol,
                                     const Vec& lo, const Vec& hi, unsigned seed = 0) {
  require_same_dim(lo.size(), map.domain_dim, "check_jacobian (lo)");
  require_same_dim(hi.size(), map.domain_dim, "check_jacobian (hi)");
  constexpr double kStep = 1e-6;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  JacobianReport report;
  report.worst_point = Vec::Zero(map.domain_dim);
  for (int s = 0; s < samples; ++s) {
    Vec q(map.domain_dim);
    for (Eigen::Index i = 0; i < q.size(); ++i) q(i) = lo(i) + (hi(i) - lo(i)) * unit(rng);

    const MapEval at = map.eval(q);
    Mat fd(map.codomain_dim, map.domain_dim);
    for (Eigen::Index j = 0; j < map.domain_dim; ++j) {
      Vec qp = q, qm = q;
      qp(j) += kStep;
      qm(j) -= kStep;
      fd.col(j) = (map.eval(qp).value - map.eval(qm).value) / (2.0 * kStep);
    }
    const double scale = std::max(1.0, at.jacobian.cwiseAbs().maxCoeff());
    const double err = (fd - at.jacobian).cwiseAbs().maxCoeff() / scale;
    if (err > report.max_relative_error) {
      report.max_relative_error = err;
      report.worst_point = q;
    }
  }
  report.passed = report.max_relative_error <= tol;
  return report;
}

inline JacobianReport check_jacobian(const DifferentiableMap& map, int samples, double tol,
                                     unsigned seed = 0) {
  const Vec lo = Vec::Constant(map.domain_dim, -1.0);
  const Vec hi = Vec::Constant(map.domain_dim, 1.0);
  return check_jacobian(map, samples, tol, lo, hi, seed);
}

}  // namespace rmp
