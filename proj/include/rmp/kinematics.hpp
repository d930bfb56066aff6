#pragma once

#include <Eigen/Geometry>

#include <stdexcept>
#include <string>
#include <vector>

#include "rmp/taskmap.hpp"

namespace rmp {

struct RevoluteJoint {
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();  // in the joint frame, unit
  Eigen::Isometry3d offset = Eigen::Isometry3d::Identity();  // parent link -> joint
  double lower = -3.0;
  double upper = 3.0;
};

struct BodyPoint {
  int link = 0;                                     // frame the point rides on
  Eigen::Vector3d local = Eigen::Vector3d::Zero();  // offset in that frame
  double radius = 0.1;                              // collision radius
};

/// Serial chain of revolute joints. Planar chains are ordinary 3D chains with
/// all axes along z; the planar flag only makes point maps project to xy.
struct ChainModel {
  std::vector<RevoluteJoint> joints;
  Eigen::Isometry3d ee_offset = Eigen::Isometry3d::Identity();
  std::vector<BodyPoint> body_points;
  bool planar = false;
  std::string name;

  int dof() const { return static_cast<int>(joints.size()); }

  /// Frame index of the end effector (one past the last link).
  int ee_frame() const { return dof(); }

  Vec lower_limits() const {
    Vec l(dof());
    for (int i = 0; i < dof(); ++i) l(i) = joints[i].lower;
    return l;
  }
  Vec upper_limits() const {
    Vec u(dof());
    for (int i = 0; i < dof(); ++i) u(i) = joints[i].upper;
    return u;
  }

  void validate() const {
    if (joints.empty()) throw std::invalid_argument("ChainModel: at least one joint required");
    for (const RevoluteJoint& j : joints) {
      if (std::abs(j.axis.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("ChainModel: joint axis must be unit length");
      if (!(j.lower < j.upper))
        throw std::invalid_argument("ChainModel: joint limits must satisfy lower < upper");
    }
    for (const BodyPoint& p : body_points) {
      if (p.link < 0 || p.link >= dof())
        throw std::invalid_argument("ChainModel: body point link out of range");
    }
  }
};

struct FrameEval {
  Eigen::Vector3d origin;
  Eigen::Matrix3d axes;       // columns a_x, a_y, a_z
  Mat origin_jacobian;        // 3 x dof
  Mat axis_jacobians[3];      // each 3 x dof
};

namespace detail {

struct ChainScratch {
  std::vector<Eigen::Isometry3d> link_frames;   // frame after joint i
  std::vector<Eigen::Vector3d> joint_origins;   // world origin of joint i axis
  std::vector<Eigen::Vector3d> joint_axes;      // world direction of joint i axis
};

inline ChainScratch propagate(const ChainModel& model, const Vec& q) {
  require_same_dim(q.size(), model.dof(), "forward kinematics");
  ChainScratch s;
  const int n = model.dof();
  s.link_frames.resize(n);
  s.joint_origins.resize(n);
  s.joint_axes.resize(n);
  Eigen::Isometry3d frame = Eigen::Isometry3d::Identity();
  for (int i = 0; i < n; ++i) {
    frame = frame * model.joints[i].offset;
    s.joint_origins[i] = frame.translation();
    s.joint_axes[i] = frame.rotation() * model.joints[i].axis;
    frame = frame * Eigen::AngleAxisd(q(i), model.joints[i].axis);
    s.link_frames[i] = frame;
  }
  return s;
}

/// Jacobian of a world point riding on link `link`.
inline Mat point_jacobian(const ChainScratch& s, int link, const Eigen::Vector3d& world_point) {
  Mat jac = Mat::Zero(3, static_cast<Eigen::Index>(s.link_frames.size()));
  for (int j = 0; j <= link; ++j) {
    jac.col(j) = s.joint_axes[j].cross(world_point - s.joint_origins[j]);
  }
  return jac;
}

/// Jacobian of a world direction vector riding on link `link`.
inline Mat direction_jacobian(const ChainScratch& s, int link, const Eigen::Vector3d& world_dir) {
  Mat jac = Mat::Zero(3, static_cast<Eigen::Index>(s.link_frames.size()));
  for (int j = 0; j <= link; ++j) {
    jac.col(j) = s.joint_axes[j].cross(world_dir);
  }
  return jac;
}

inline DifferentiableMap project_xy(const DifferentiableMap& map3d) {
  Mat proj(2, 3);
  proj << 1, 0, 0, 0, 1, 0;
  return compose(map3d, linear_map(proj));
}

}  // namespace detail

/// Frame of the named link (dof() selects the end-effector frame), with
/// origin and axis-tip Jacobians.
inline FrameEval forward_frame(const ChainModel& model, const Vec& q, int link) {
  if (link < 0 || link > model.ee_frame()) {
    throw std::invalid_argument("forward_frame: link index out of range");
  }
  const detail::ChainScratch s = detail::propagate(model, q);
  const int anchor = (link == model.ee_frame()) ? model.dof() - 1 : link;
  const Eigen::Isometry3d frame = (link == model.ee_frame())
                                      ? s.link_frames[anchor] * model.ee_offset
                                      : s.link_frames[anchor];
  FrameEval out;
  out.origin = frame.translation();
  out.axes = frame.rotation();
  out.origin_jacobian = detail::point_jacobian(s, anchor, out.origin);
  for (int a = 0; a < 3; ++a) {
    out.axis_jacobians[a] = detail::direction_jacobian(s, anchor, out.axes.col(a));
  }
  return out;
}

/// Map from q to the world position of a point fixed to a link. Planar
/// models yield 2D maps (xy projection); spatial models yield 3D maps.
inline DifferentiableMap body_point_map(const ChainModel& model, int point) {
  if (point < 0 || point >= static_cast<int>(model.body_points.size())) {
    throw std::invalid_argument("body_point_map: body point index out of range");
  }
  const BodyPoint bp = model.body_points[point];
  DifferentiableMap map3d{
      model.dof(), 3, [model, bp](const Vec& q) {
        const detail::ChainScratch s = detail::propagate(model, q);
        const Eigen::Vector3d world = s.link_frames[bp.link] * bp.local;
        return MapEval{world, detail::point_jacobian(s, bp.link, world), std::nullopt};
      }};
  return model.planar ? detail::project_xy(map3d) : map3d;
}

/// Map from q to a point fixed to a link expressed in that link's frame;
/// used by frame-origin attractors and custom guiding points.
inline DifferentiableMap link_point_map(const ChainModel& model, int link,
                                        const Eigen::Vector3d& local) {
  if (link < 0 || link > model.ee_frame()) {
    throw std::invalid_argument("link_point_map: link index out of range");
  }
  const int anchor = (link == model.ee_frame()) ? model.dof() - 1 : link;
  const Eigen::Vector3d local_in_link =
      (link == model.ee_frame()) ? Eigen::Vector3d(model.ee_offset * local) : local;
  DifferentiableMap map3d{
      model.dof(), 3, [model, anchor, local_in_link](const Vec& q) {
        const detail::ChainScratch s = detail::propagate(model, q);
        const Eigen::Vector3d world = s.link_frames[anchor] * local_in_link;
        return MapEval{world, detail::point_jacobian(s, anchor, world), std::nullopt};
      }};
  return model.planar ? detail::project_xy(map3d) : map3d;
}

enum class FrameAxis { X = 0, Y = 1, Z = 2 };

/// Map from q to the axis tip t + a_axis of a link frame. Attaching an
/// attractor to the tip constrains that rotation axis.
inline DifferentiableMap axis_target_map(const ChainModel& model, int link, FrameAxis axis) {
  if (link < 0 || link > model.ee_frame()) {
    throw std::invalid_argument("axis_target_map: link index out of range");
  }
  const int a = static_cast<int>(axis);
  DifferentiableMap map3d{
      model.dof(), 3, [model, link, a](const Vec& q) {
        FrameEval f = forward_frame(model, q, link);
        return MapEval{f.origin + f.axes.col(a),
                       f.origin_jacobian + f.axis_jacobians[a], std::nullopt};
      }};
  return model.planar ? detail::project_xy(map3d) : map3d;
}

// ---------------------------------------------------------------------------
// Shipped desk-scale models

/// Planar 3-link arm with unit links, z-axis joints, and body points at the
/// link midpoints plus the end effector.
inline ChainModel planar3() {
  ChainModel m;
  m.name = "planar3";
  m.planar = true;
  for (int i = 0; i < 3; ++i) {
    RevoluteJoint j;
    j.axis = Eigen::Vector3d::UnitZ();
    j.offset = Eigen::Isometry3d::Identity();
    if (i > 0) j.offset.translation() = Eigen::Vector3d(1.0, 0.0, 0.0);
    j.lower = -2.9;
    j.upper = 2.9;
    m.joints.push_back(j);
  }
  m.ee_offset = Eigen::Isometry3d::Identity();
  m.ee_offset.translation() = Eigen::Vector3d(1.0, 0.0, 0.0);
  m.body_points = {
      {0, {0.5, 0.0, 0.0}, 0.10},
      {1, {0.5, 0.0, 0.0}, 0.10},
      {2, {0.5, 0.0, 0.0}, 0.10},
      {2, {1.0, 0.0, 0.0}, 0.10},  // end effector
  };
  m.validate();
  return m;
}

/// 7-joint spatial arm: axis-aligned 3-DOF shoulder (z, y, x), 1-DOF elbow
/// (y), axis-aligned 3-DOF wrist (x, y, z); unit upper arm and forearm, 0.5
/// hand. Stretched along +x at q = 0.
inline ChainModel arm7() {
  ChainModel m;
  m.name = "arm7";
  const Eigen::Vector3d axes[7] = {
      Eigen::Vector3d::UnitZ(), Eigen::Vector3d::UnitY(), Eigen::Vector3d::UnitX(),
      Eigen::Vector3d::UnitY(),
      Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(), Eigen::Vector3d::UnitZ()};
  for (int i = 0; i < 7; ++i) {
    RevoluteJoint j;
    j.axis = axes[i];
    j.offset = Eigen::Isometry3d::Identity();
    if (i == 3 || i == 4) j.offset.translation() = Eigen::Vector3d(1.0, 0.0, 0.0);
    j.lower = (i == 3) ? -2.4 : -2.9;
    j.upper = (i == 3) ? 2.4 : 2.9;
    m.joints.push_back(j);
  }
  m.ee_offset = Eigen::Isometry3d::Identity();
  m.ee_offset.translation() = Eigen::Vector3d(0.5, 0.0, 0.0);
  m.body_points = {
      {2, {0.5, 0.0, 0.0}, 0.12},   // upper arm midpoint
      {3, {0.5, 0.0, 0.0}, 0.12},   // forearm midpoint
      {6, {0.25, 0.0, 0.0}, 0.12},  // hand midpoint
      {6, {0.5, 0.0, 0.0}, 0.12},   // end effector
  };
  m.validate();
  return m;
}

inline ChainModel named_model(const std::string& name) {
  if (name == "planar3") return planar3();
  if (name == "arm7") return arm7();
  throw std::invalid_argument("named_model: unknown robot preset '" + name + "'");
}

}  // namespace rmp
