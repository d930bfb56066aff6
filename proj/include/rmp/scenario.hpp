#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "rmp/simulator.hpp"

namespace rmp {

using nlohmann::json;

/// Configuration errors carry enough context to locate the offending field;
/// the CLI maps them to exit code 4.
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void check_keys(const json& obj, const std::string& where,
                       const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ScenarioError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw ScenarioError(where + ": unknown key '" + key + "'");
    }
  }
}

inline Vec get_vec(const json& obj, const std::string& where) {
  if (!obj.is_array() || obj.empty()) throw ScenarioError(where + ": expected a number array");
  Vec v(obj.size());
  for (size_t i = 0; i < obj.size(); ++i) {
    if (!obj[i].is_number()) throw ScenarioError(where + ": expected a number array");
    v(static_cast<Eigen::Index>(i)) = obj[i].get<double>();
  }
  return v;
}

inline double get_num(const json& obj, const std::string& key, const std::string& where,
                      std::optional<double> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ScenarioError(where + ": missing required key '" + key + "'");
  }
  if (!obj[key].is_number()) throw ScenarioError(where + "." + key + ": expected a number");
  return obj[key].get<double>();
}

inline json vec_to_json(const Vec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

inline FrameAxis parse_axis(const std::string& s, const std::string& where) {
  if (s == "x") return FrameAxis::X;
  if (s == "y") return FrameAxis::Y;
  if (s == "z") return FrameAxis::Z;
  throw ScenarioError(where + ": axis must be one of x, y, z");
}

inline const char* axis_name(FrameAxis a) {
  switch (a) {
    case FrameAxis::X: return "x";
    case FrameAxis::Y: return "y";
    case FrameAxis::Z: return "z";
  }
  return "x";
}

inline ChainModel parse_robot(const json& node, const std::string& where) {
  if (node.is_string()) return named_model(node.get<std::string>());
  check_keys(node, where, {"name", "joints", "ee_offset", "body_points", "planar"});
  ChainModel m;
  m.name = node.value("name", "custom");
  m.planar = node.value("planar", false);
  if (!node.contains("joints") || !node["joints"].is_array() || node["joints"].empty()) {
    throw ScenarioError(where + ": robot needs a non-empty joints array");
  }
  for (size_t i = 0; i < node["joints"].size(); ++i) {
    const json& jj = node["joints"][i];
    const std::string jwhere = where + ".joints[" + std::to_string(i) + "]";
    check_keys(jj, jwhere, {"axis", "offset", "lower", "upper"});
    RevoluteJoint joint;
    if (jj.contains("axis")) {
      const Vec axis = get_vec(jj["axis"], jwhere + ".axis");
      if (axis.size() != 3) throw ScenarioError(jwhere + ".axis: expected 3 numbers");
      joint.axis = Eigen::Vector3d(axis).normalized();
    }
    if (jj.contains("offset")) {
      const Vec off = get_vec(jj["offset"], jwhere + ".offset");
      if (off.size() != 3) throw ScenarioError(jwhere + ".offset: expected 3 numbers");
      joint.offset.translation() = Eigen::Vector3d(off);
    }
    joint.lower = get_num(jj, "lower", jwhere, -2.9);
    joint.upper = get_num(jj, "upper", jwhere, 2.9);
    m.joints.push_back(joint);
  }
  if (node.contains("ee_offset")) {
    const Vec off = get_vec(node["ee_offset"], where + ".ee_offset");
    if (off.size() != 3) throw ScenarioError(where + ".ee_offset: expected 3 numbers");
    m.ee_offset.translation() = Eigen::Vector3d(off);
  }
  if (node.contains("body_points")) {
    for (size_t i = 0; i < node["body_points"].size(); ++i) {
      const json& bj = node["body_points"][i];
      const std::string bwhere = where + ".body_points[" + std::to_string(i) + "]";
      check_keys(bj, bwhere, {"link", "offset", "radius"});
      BodyPoint bp;
      bp.link = static_cast<int>(get_num(bj, "link", bwhere));
      const Vec off = get_vec(bj.contains("offset") ? bj["offset"] : json::array({0, 0, 0}),
                              bwhere + ".offset");
      if (off.size() != 3) throw ScenarioError(bwhere + ".offset: expected 3 numbers");
      bp.local = Eigen::Vector3d(off);
      bp.radius = get_num(bj, "radius", bwhere, 0.1);
      m.body_points.push_back(bp);
    }
  }
  try {
    m.validate();
  } catch (const std::exception& e) {
    throw ScenarioError(where + ": " + e.what());
  }
  return m;
}

inline void parse_attractor_gains(const json& node, const std::string& where,
                                  AttractorParams& p) {
  p.gain_p = get_num(node, "gain_p", where, p.gain_p);
  p.gain_d = get_num(node, "gain_d", where, p.gain_d);
  p.soft_norm_scale = get_num(node, "soft_norm_scale", where, p.soft_norm_scale);
  p.metric_sigma_h = get_num(node, "metric_sigma_h", where, p.metric_sigma_h);
  p.metric_sigma_w = get_num(node, "metric_sigma_w", where, p.metric_sigma_w);
}

inline PolicySpec parse_policy(const json& node, const std::string& where,
                               const Scenario& sc) {
  if (!node.is_object() || !node.contains("type") || !node["type"].is_string()) {
    throw ScenarioError(where + ": policy needs a string 'type'");
  }
  const std::string type = node["type"].get<std::string>();
  PolicySpec spec;

  static const std::set<std::string> attractor_gain_keys = {
      "gain_p", "gain_d", "soft_norm_scale", "metric_sigma_h", "metric_sigma_w"};
  auto with_gains = [&](std::set<std::string> extra) {
    extra.insert(attractor_gain_keys.begin(), attractor_gain_keys.end());
    extra.insert("type");
    return extra;
  };

  if (type == "attractor") {
    check_keys(node, where, with_gains({"target", "frame"}));
    spec.type = PolicySpec::Type::Attractor;
    spec.attractor.target = get_vec(node.at("target"), where + ".target");
    spec.frame = static_cast<int>(get_num(node, "frame", where, -1));
    parse_attractor_gains(node, where, spec.attractor);
  } else if (type == "axis_attractor") {
    check_keys(node, where, with_gains({"target", "frame", "axis"}));
    spec.type = PolicySpec::Type::AxisAttractor;
    spec.attractor.target = get_vec(node.at("target"), where + ".target");
    spec.frame = static_cast<int>(get_num(node, "frame", where, -1));
    if (node.contains("axis")) spec.axis = parse_axis(node["axis"].get<std::string>(), where);
    parse_attractor_gains(node, where, spec.attractor);
  } else if (type == "cylindrical_attractor") {
    check_keys(node, where,
               with_gains({"target", "frame", "axis_point", "axis_direction", "weights"}));
    spec.type = PolicySpec::Type::CylindricalAttractor;
    spec.attractor.target = get_vec(node.at("target"), where + ".target");
    spec.frame = static_cast<int>(get_num(node, "frame", where, -1));
    const Vec point = get_vec(node.at("axis_point"), where + ".axis_point");
    const Vec dir = get_vec(node.at("axis_direction"), where + ".axis_direction");
    const Vec weights = node.contains("weights") ? get_vec(node["weights"], where + ".weights")
                                                 : Vec(Eigen::Vector3d::Ones());
    if (point.size() != 3 || dir.size() != 3 || weights.size() != 3) {
      throw ScenarioError(where + ": cylinder fields must have 3 entries");
    }
    spec.cylinder = CylindricalMap(Eigen::Vector3d(point), Eigen::Vector3d(dir).normalized(),
                                   Eigen::Vector3d(weights));
    parse_attractor_gains(node, where, spec.attractor);
  } else if (type == "collision") {
    check_keys(node, where,
               {"type", "repulsion_gain", "repulsion_scale", "damping_gain", "damping_scale",
                "epsilon", "weight_radius", "simple_form"});
    spec.type = PolicySpec::Type::Collision;
    spec.collision.repulsion_gain =
        get_num(node, "repulsion_gain", where, spec.collision.repulsion_gain);
    spec.collision.repulsion_scale =
        get_num(node, "repulsion_scale", where, spec.collision.repulsion_scale);
    spec.collision.damping_gain =
        get_num(node, "damping_gain", where, spec.collision.damping_gain);
    spec.collision.damping_scale =
        get_num(node, "damping_scale", where, spec.collision.damping_scale);
    spec.collision.epsilon = get_num(node, "epsilon", where, spec.collision.epsilon);
    spec.collision.weight_radius =
        get_num(node, "weight_radius", where, spec.collision.weight_radius);
    spec.collision_simple_form = node.value("simple_form", false);
  } else if (type == "redundancy") {
    check_keys(node, where, {"type", "rest_pose", "rest_velocity", "gain_p", "gain_d"});
    spec.type = PolicySpec::Type::Redundancy;
    spec.redundancy.rest_pose = node.contains("rest_pose")
                                    ? get_vec(node["rest_pose"], where + ".rest_pose")
                                    : sc.limit_map.midpoints();
    spec.redundancy.rest_velocity =
        node.contains("rest_velocity") ? get_vec(node["rest_velocity"], where + ".rest_velocity")
                                       : Vec(Vec::Zero(spec.redundancy.rest_pose.size()));
    spec.redundancy.gain_p = get_num(node, "gain_p", where, spec.redundancy.gain_p);
    spec.redundancy.gain_d = get_num(node, "gain_d", where, spec.redundancy.gain_d);
  } else if (type == "retract") {
    check_keys(node, where, {"type", "target_q", "gain", "gain_d"});
    spec.type = PolicySpec::Type::Retract;
    spec.retract_target = get_vec(node.at("target_q"), where + ".target_q");
    spec.retract_gain = get_num(node, "gain", where, spec.retract_gain);
    spec.retract_gain_d =
        get_num(node, "gain_d", where, 2.0 * std::sqrt(spec.retract_gain));
  } else if (type == "retract_blend") {
    check_keys(node, where,
               with_gains({"target_q", "wrist_point", "forearm_point", "blend_sigma"}));
    spec.type = PolicySpec::Type::RetractBlend;
    spec.retract_target = get_vec(node.at("target_q"), where + ".target_q");
    spec.wrist_point = static_cast<int>(get_num(node, "wrist_point", where, -1));
    spec.forearm_point = static_cast<int>(get_num(node, "forearm_point", where, -1));
    spec.blend_sigma = get_num(node, "blend_sigma", where, spec.blend_sigma);
    parse_attractor_gains(node, where, spec.attractor);
  } else {
    throw ScenarioError(where + ": unknown policy type '" + type + "'");
  }
  return spec;
}

inline Goal parse_goal(const json& node, const std::string& where) {
  if (!node.is_object() || !node.contains("type")) {
    throw ScenarioError(where + ": goal needs a 'type'");
  }
  Goal goal;
  const std::string type = node["type"].get<std::string>();
  if (type == "task") {
    check_keys(node, where,
               {"type", "target", "frame", "position_tolerance", "speed_tolerance"});
    goal.type = Goal::Type::TaskPoint;
    goal.target = get_vec(node.at("target"), where + ".target");
    goal.frame = static_cast<int>(get_num(node, "frame", where, -1));
    goal.position_tolerance =
        get_num(node, "position_tolerance", where, goal.position_tolerance);
  } else if (type == "cspace") {
    check_keys(node, where, {"type", "target_q", "joint_tolerance", "speed_tolerance"});
    goal.type = Goal::Type::CSpace;
    goal.target = get_vec(node.at("target_q"), where + ".target_q");
    goal.joint_tolerance = get_num(node, "joint_tolerance", where, goal.joint_tolerance);
  } else {
    throw ScenarioError(where + ": goal type must be 'task' or 'cspace'");
  }
  goal.speed_tolerance = get_num(node, "speed_tolerance", where, goal.speed_tolerance);
  return goal;
}

}  // namespace detail

inline Scenario parse_scenario(const json& root, const std::string& where = "scenario") {
  detail::check_keys(root, where,
                     {"name", "robot", "seed", "strategy", "self_collision",
                      "self_collision_link_gap", "start_q", "start_qdot", "obstacles",
                      "policies", "goal", "phases", "limit_map", "integrator"});
  Scenario sc;
  sc.name = root.value("name", "scenario");
  if (!root.contains("robot")) throw ScenarioError(where + ": missing 'robot'");
  sc.robot = detail::parse_robot(root["robot"], where + ".robot");
  sc.seed = root.value("seed", std::uint64_t{0});
  if (root.contains("strategy")) {
    try {
      sc.strategy = StrategySpec::parse(root["strategy"].get<std::string>());
    } catch (const std::exception& e) {
      throw ScenarioError(where + ".strategy: " + e.what());
    }
  }
  sc.self_collision = root.value("self_collision", true);
  sc.self_collision_link_gap = root.value("self_collision_link_gap", 2);

  sc.limit_map = SigmoidLimitMap(sc.robot.lower_limits(), sc.robot.upper_limits());
  if (root.contains("limit_map")) {
    const json& lm = root["limit_map"];
    const std::string lwhere = where + ".limit_map";
    detail::check_keys(lm, lwhere,
                       {"lambda", "velocity_sharpness", "gain_p", "gain_d", "rest_pose"});
    sc.limit_map.regulator_weight =
        detail::get_num(lm, "lambda", lwhere, sc.limit_map.regulator_weight);
    sc.limit_map.velocity_sharpness =
        detail::get_num(lm, "velocity_sharpness", lwhere, sc.limit_map.velocity_sharpness);
    sc.limit_map.regulator_gain_p =
        detail::get_num(lm, "gain_p", lwhere, sc.limit_map.regulator_gain_p);
    sc.limit_map.regulator_gain_d =
        detail::get_num(lm, "gain_d", lwhere, sc.limit_map.regulator_gain_d);
    if (lm.contains("rest_pose")) {
      sc.limit_map.regulator_target = detail::get_vec(lm["rest_pose"], lwhere + ".rest_pose");
    }
    try {
      sc.limit_map.validate();
    } catch (const std::exception& e) {
      throw ScenarioError(lwhere + ": " + e.what());
    }
  }

  if (root.contains("integrator")) {
    const json& in = root["integrator"];
    const std::string iwhere = where + ".integrator";
    detail::check_keys(in, iwhere, {"dt", "max_steps"});
    sc.integrator.dt = detail::get_num(in, "dt", iwhere, sc.integrator.dt);
    sc.integrator.max_steps =
        static_cast<int>(detail::get_num(in, "max_steps", iwhere, sc.integrator.max_steps));
    if (sc.integrator.dt <= 0 || sc.integrator.max_steps < 1) {
      throw ScenarioError(iwhere + ": dt must be > 0 and max_steps >= 1");
    }
  }

  if (!root.contains("start_q")) throw ScenarioError(where + ": missing 'start_q'");
  sc.start_q = detail::get_vec(root["start_q"], where + ".start_q");
  if (sc.start_q.size() != sc.robot.dof()) {
    throw ScenarioError(where + ".start_q: expected " + std::to_string(sc.robot.dof()) +
                        " entries");
  }
  if (root.contains("start_qdot")) {
    sc.start_qdot = detail::get_vec(root["start_qdot"], where + ".start_qdot");
    if (sc.start_qdot.size() != sc.robot.dof()) {
      throw ScenarioError(where + ".start_qdot: expected " + std::to_string(sc.robot.dof()) +
                          " entries");
    }
  }
  if (!sc.limit_map.inside(sc.start_q)) {
    throw ScenarioError(where + ".start_q: start pose violates joint limits");
  }

  if (root.contains("obstacles")) {
    for (size_t i = 0; i < root["obstacles"].size(); ++i) {
      const json& oj = root["obstacles"][i];
      const std::string owhere = where + ".obstacles[" + std::to_string(i) + "]";
      detail::check_keys(oj, owhere, {"center", "radius"});
      Obstacle obs;
      obs.center = detail::get_vec(oj.at("center"), owhere + ".center");
      if (obs.center.size() != sc.workspace_dim()) {
        throw ScenarioError(owhere + ".center: expected " +
                            std::to_string(sc.workspace_dim()) + " entries for this robot");
      }
      obs.radius = detail::get_num(oj, "radius", owhere);
      if (obs.radius <= 0) throw ScenarioError(owhere + ".radius: must be positive");
      sc.obstacles.push_back(obs);
    }
  }

  const bool flat = root.contains("policies") || root.contains("goal");
  const bool phased = root.contains("phases");
  if (flat == phased) {
    throw ScenarioError(where + ": provide either policies+goal or phases, not both");
  }
  auto parse_phase = [&](const json& pnode, const std::string& pwhere) {
    detail::check_keys(pnode, pwhere, {"policies", "goal"});
    Phase phase;
    if (!pnode.contains("policies") || !pnode["policies"].is_array()) {
      throw ScenarioError(pwhere + ": missing policies array");
    }
    for (size_t i = 0; i < pnode["policies"].size(); ++i) {
      phase.policies.push_back(detail::parse_policy(
          pnode["policies"][i], pwhere + ".policies[" + std::to_string(i) + "]", sc));
    }
    if (!pnode.contains("goal")) throw ScenarioError(pwhere + ": missing goal");
    phase.goal = detail::parse_goal(pnode["goal"], pwhere + ".goal");
    return phase;
  };
  if (flat) {
    json wrapper;
    wrapper["policies"] = root.value("policies", json::array());
    if (root.contains("goal")) wrapper["goal"] = root["goal"];
    sc.phases.push_back(parse_phase(wrapper, where));
  } else {
    if (!root["phases"].is_array() || root["phases"].empty()) {
      throw ScenarioError(where + ".phases: expected a non-empty array");
    }
    for (size_t i = 0; i < root["phases"].size(); ++i) {
      sc.phases.push_back(
          parse_phase(root["phases"][i], where + ".phases[" + std::to_string(i) + "]"));
    }
  }

  for (const Phase& phase : sc.phases) {
    const Goal& g = phase.goal;
    const Eigen::Index want =
        g.type == Goal::Type::CSpace ? sc.robot.dof() : sc.workspace_dim();
    if (g.target.size() != want) {
      throw ScenarioError(where + ": goal target has wrong dimension");
    }
    for (const PolicySpec& p : phase.policies) {
      if ((p.type == PolicySpec::Type::Attractor || p.type == PolicySpec::Type::AxisAttractor) &&
          p.attractor.target.size() != sc.workspace_dim()) {
        throw ScenarioError(where + ": attractor target has wrong dimension");
      }
      if ((p.type == PolicySpec::Type::Retract || p.type == PolicySpec::Type::RetractBlend) &&
          p.retract_target.size() != sc.robot.dof()) {
        throw ScenarioError(where + ": retract target_q has wrong dimension");
      }
    }
  }
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("JSON parse error in ") + path + ": " + e.what());
  }
  return parse_scenario(root, path);
}

// ---------------------------------------------------------------------------
// Serialization back to JSON (round-trip stable)

inline json scenario_to_json(const Scenario& sc) {
  json root;
  root["name"] = sc.name;
  if (sc.robot.name == "planar3" || sc.robot.name == "arm7") {
    root["robot"] = sc.robot.name;
  } else {
    json rj;
    rj["name"] = sc.robot.name;
    rj["planar"] = sc.robot.planar;
    rj["joints"] = json::array();
    for (const RevoluteJoint& j : sc.robot.joints) {
      json jj;
      jj["axis"] = detail::vec_to_json(Vec(j.axis));
      jj["offset"] = detail::vec_to_json(Vec(j.offset.translation()));
      jj["lower"] = j.lower;
      jj["upper"] = j.upper;
      rj["joints"].push_back(jj);
    }
    rj["ee_offset"] = detail::vec_to_json(Vec(sc.robot.ee_offset.translation()));
    rj["body_points"] = json::array();
    for (const BodyPoint& bp : sc.robot.body_points) {
      json bj;
      bj["link"] = bp.link;
      bj["offset"] = detail::vec_to_json(Vec(bp.local));
      bj["radius"] = bp.radius;
      rj["body_points"].push_back(bj);
    }
    root["robot"] = rj;
  }
  root["seed"] = sc.seed;
  root["strategy"] = sc.strategy.label();
  root["self_collision"] = sc.self_collision;
  root["self_collision_link_gap"] = sc.self_collision_link_gap;
  root["start_q"] = detail::vec_to_json(sc.start_q);
  if (sc.start_qdot.size()) root["start_qdot"] = detail::vec_to_json(sc.start_qdot);

  root["obstacles"] = json::array();
  for (const Obstacle& obs : sc.obstacles) {
    root["obstacles"].push_back(
        {{"center", detail::vec_to_json(obs.center)}, {"radius", obs.radius}});
  }

  json lm;
  lm["lambda"] = sc.limit_map.regulator_weight;
  lm["velocity_sharpness"] = sc.limit_map.velocity_sharpness;
  lm["gain_p"] = sc.limit_map.regulator_gain_p;
  lm["gain_d"] = sc.limit_map.regulator_gain_d;
  if (sc.limit_map.regulator_target.size()) {
    lm["rest_pose"] = detail::vec_to_json(sc.limit_map.regulator_target);
  }
  root["limit_map"] = lm;
  root["integrator"] = {{"dt", sc.integrator.dt}, {"max_steps", sc.integrator.max_steps}};

  auto policy_to_json = [](const PolicySpec& p) {
    json pj;
    switch (p.type) {
      case PolicySpec::Type::Attractor:
      case PolicySpec::Type::AxisAttractor:
      case PolicySpec::Type::CylindricalAttractor: {
        pj["type"] = p.type == PolicySpec::Type::Attractor ? "attractor"
                     : p.type == PolicySpec::Type::AxisAttractor
                         ? "axis_attractor"
                         : "cylindrical_attractor";
        pj["target"] = detail::vec_to_json(p.attractor.target);
        pj["frame"] = p.frame;
        if (p.type == PolicySpec::Type::AxisAttractor) pj["axis"] = detail::axis_name(p.axis);
        if (p.type == PolicySpec::Type::CylindricalAttractor) {
          pj["axis_point"] = detail::vec_to_json(Vec(p.cylinder.axis_point));
          pj["axis_direction"] = detail::vec_to_json(Vec(p.cylinder.axis_direction));
          pj["weights"] = detail::vec_to_json(Vec(p.cylinder.weights));
        }
        pj["gain_p"] = p.attractor.gain_p;
        pj["gain_d"] = p.attractor.gain_d;
        pj["soft_norm_scale"] = p.attractor.soft_norm_scale;
        pj["metric_sigma_h"] = p.attractor.metric_sigma_h;
        pj["metric_sigma_w"] = p.attractor.metric_sigma_w;
        break;
      }
      case PolicySpec::Type::Collision:
        pj["type"] = "collision";
        pj["repulsion_gain"] = p.collision.repulsion_gain;
        pj["repulsion_scale"] = p.collision.repulsion_scale;
        pj["damping_gain"] = p.collision.damping_gain;
        pj["damping_scale"] = p.collision.damping_scale;
        pj["epsilon"] = p.collision.epsilon;
        pj["weight_radius"] = p.collision.weight_radius;
        pj["simple_form"] = p.collision_simple_form;
        break;
      case PolicySpec::Type::Redundancy:
        pj["type"] = "redundancy";
        pj["rest_pose"] = detail::vec_to_json(p.redundancy.rest_pose);
        pj["rest_velocity"] = detail::vec_to_json(p.redundancy.rest_velocity);
        pj["gain_p"] = p.redundancy.gain_p;
        pj["gain_d"] = p.redundancy.gain_d;
        break;
      case PolicySpec::Type::Retract:
        pj["type"] = "retract";
        pj["target_q"] = detail::vec_to_json(p.retract_target);
        pj["gain"] = p.retract_gain;
        pj["gain_d"] = p.retract_gain_d;
        break;
      case PolicySpec::Type::RetractBlend:
        pj["type"] = "retract_blend";
        pj["target_q"] = detail::vec_to_json(p.retract_target);
        pj["wrist_point"] = p.wrist_point;
        pj["forearm_point"] = p.forearm_point;
        pj["blend_sigma"] = p.blend_sigma;
        pj["gain_p"] = p.attractor.gain_p;
        pj["gain_d"] = p.attractor.gain_d;
        pj["soft_norm_scale"] = p.attractor.soft_norm_scale;
        pj["metric_sigma_h"] = p.attractor.metric_sigma_h;
        pj["metric_sigma_w"] = p.attractor.metric_sigma_w;
        break;
    }
    return pj;
  };
  auto goal_to_json = [](const Goal& g) {
    json gj;
    if (g.type == Goal::Type::TaskPoint) {
      gj["type"] = "task";
      gj["target"] = detail::vec_to_json(g.target);
      gj["frame"] = g.frame;
      gj["position_tolerance"] = g.position_tolerance;
    } else {
      gj["type"] = "cspace";
      gj["target_q"] = detail::vec_to_json(g.target);
      gj["joint_tolerance"] = g.joint_tolerance;
    }
    gj["speed_tolerance"] = g.speed_tolerance;
    return gj;
  };

  root["phases"] = json::array();
  for (const Phase& phase : sc.phases) {
    json pj;
    pj["policies"] = json::array();
    for (const PolicySpec& p : phase.policies) pj["policies"].push_back(policy_to_json(p));
    pj["goal"] = goal_to_json(phase.goal);
    root["phases"].push_back(pj);
  }
  return root;
}

// ---------------------------------------------------------------------------
// Output files

namespace detail {

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// One row per recorded state: t, joint positions, joint velocities, then
/// the per-step diagnostics. Column order is part of the file format.
inline void write_trajectory_csv(std::ostream& out, const Scenario& sc, const Trajectory& traj) {
  const int d = sc.robot.dof();
  out << "t";
  for (int i = 0; i < d; ++i) out << ",q" << i;
  for (int i = 0; i < d; ++i) out << ",qd" << i;
  out << ",min_obstacle_distance,target_error,accel_norm,metric_condition\n";
  for (size_t s = 0; s < traj.states.size(); ++s) {
    const SimState& st = traj.states[s];
    const StepDiagnostics& dg = traj.diagnostics[s];
    out << detail::fmt_double(st.t);
    for (int i = 0; i < d; ++i) out << ',' << detail::fmt_double(st.q(i));
    for (int i = 0; i < d; ++i) out << ',' << detail::fmt_double(st.qdot(i));
    out << ',' << detail::fmt_double(dg.min_obstacle_distance) << ','
        << detail::fmt_double(dg.target_error) << ',' << detail::fmt_double(dg.accel_norm)
        << ',' << detail::fmt_double(dg.metric_condition) << '\n';
  }
}

inline json summary_to_json(const Scenario& sc, const StrategySpec& strategy,
                            const Trajectory& traj) {
  json out;
  out["scenario"] = sc.name;
  out["strategy"] = strategy.label();
  out["verdict"] = verdict_name(traj.verdict);
  out["steps"] = static_cast<int>(traj.states.size()) - 1;
  out["dt"] = sc.integrator.dt;
  out["seed"] = sc.seed;
  out["final_target_error"] = traj.final_target_error;
  out["min_clearance"] = traj.min_clearance;
  out["path_length"] = traj.path_length;
  return out;
}

inline void write_compare_csv(std::ostream& out, const CompareTable& table) {
  out << "scenario,strategy,verdict,steps,path_length,min_clearance,final_target_error\n";
  for (const CompareRow& row : table.rows) {
    out << row.scenario << ',' << row.strategy << ',' << verdict_name(row.verdict) << ','
        << row.steps << ',' << detail::fmt_double(row.path_length) << ','
        << detail::fmt_double(row.min_clearance) << ','
        << detail::fmt_double(row.final_target_error) << '\n';
  }
}

inline void write_compare_summary(std::ostream& out, const CompareTable& table) {
  out << "strategy,runs,successes,collisions,success_rate,collision_rate,mean_path_length,"
         "mean_min_clearance\n";
  for (const StrategySummary& s : table.summary) {
    out << s.strategy << ',' << s.runs << ',' << s.successes << ',' << s.collisions << ','
        << detail::fmt_double(s.success_rate) << ',' << detail::fmt_double(s.collision_rate)
        << ',' << detail::fmt_double(s.mean_path_length) << ','
        << detail::fmt_double(s.mean_min_clearance) << '\n';
  }
}

}  // namespace rmp
