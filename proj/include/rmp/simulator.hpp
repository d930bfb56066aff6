#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "rmp/kinematics.hpp"
#include "rmp/policies.hpp"
#include "rmp/tree.hpp"

namespace rmp {

// ---------------------------------------------------------------------------
// Scenario model

struct Obstacle {
  Vec center;  // 2D circle or 3D sphere, matching the workspace dimension
  double radius = 0.2;
};

struct PolicySpec {
  enum class Type {
    Attractor,             // frame-origin attractor
    AxisAttractor,         // attractor on an axis tip (orientation)
    CylindricalAttractor,  // attractor through the weighted cylindrical map
    Collision,             // expands over body points x obstacles (+ self pairs)
    Redundancy,
    Retract,
    RetractBlend,          // two-point retract heuristic
  };

  Type type = Type::Attractor;

  AttractorParams attractor;
  int frame = -1;  // link index; -1 selects the end-effector frame
  FrameAxis axis = FrameAxis::X;
  CylindricalMap cylinder;

  CollisionParams collision;
  bool collision_simple_form = false;

  RedundancyParams redundancy;

  Vec retract_target;
  double retract_gain = 10.0;
  double retract_gain_d = 6.3;
  int wrist_point = -1;    // RetractBlend, defaults to the last body point
  int forearm_point = -1;  // RetractBlend, defaults to the forearm midpoint
  double blend_sigma = 0.4;
};

struct Goal {
  enum class Type { TaskPoint, CSpace };
  Type type = Type::TaskPoint;
  Vec target;                      // task point or q_r
  int frame = -1;                  // task goals: frame whose origin is tracked
  double position_tolerance = 1e-2;
  double joint_tolerance = 0.05;   // per joint, C-space goals
  double speed_tolerance = 1e-2;
};

struct Phase {
  std::vector<PolicySpec> policies;
  Goal goal;
};

struct IntegratorParams {
  double dt = 5e-3;
  int max_steps = 4000;
};

enum class CombinationKind { MetricWeighted, ScaledIdentity, Superposition };

struct StrategySpec {
  CombinationKind kind = CombinationKind::MetricWeighted;
  double cspace_weight = 1.0;  // baseline sweep knob; 1 leaves policies as authored

  std::string label() const {
    switch (kind) {
      case CombinationKind::MetricWeighted:
        return "metricWeighted";
      case CombinationKind::ScaledIdentity:
        return cspace_weight == 1.0 ? "scaledIdentity"
                                    : "scaledIdentity_w" + format_weight(cspace_weight);
      case CombinationKind::Superposition:
        return "superposition";
    }
    return "unknown";
  }

  static StrategySpec parse(const std::string& name);

 private:
  static std::string format_weight(double w) {
    std::string s = std::to_string(w);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }
};

struct Scenario {
  std::string name = "scenario";
  ChainModel robot;
  std::vector<Obstacle> obstacles;
  std::vector<Phase> phases;  // run in order; the last phase's goal decides success
  SigmoidLimitMap limit_map;
  IntegratorParams integrator;
  StrategySpec strategy;
  std::uint64_t seed = 0;
  Vec start_q;
  Vec start_qdot;  // empty = zero
  bool self_collision = true;
  int self_collision_link_gap = 2;

  Eigen::Index workspace_dim() const { return robot.planar ? 2 : 3; }
};

inline StrategySpec StrategySpec::parse(const std::string& name) {
  if (name == "metricWeighted") return {CombinationKind::MetricWeighted, 1.0};
  if (name == "superposition") return {CombinationKind::Superposition, 1.0};
  if (name.rfind("scaledIdentity", 0) == 0) {
    StrategySpec s{CombinationKind::ScaledIdentity, 1.0};
    const auto pos = name.find("_w");
    if (pos != std::string::npos) s.cspace_weight = std::stod(name.substr(pos + 2));
    return s;
  }
  throw std::invalid_argument("unknown strategy '" + name + "'");
}

// ---------------------------------------------------------------------------
// Simulation state

struct SimState {
  Vec q;
  Vec qdot;
  double t = 0.0;
  int step_index = 0;
};

struct StepDiagnostics {
  double min_obstacle_distance = std::numeric_limits<double>::infinity();
  double target_error = std::numeric_limits<double>::infinity();
  double accel_norm = 0.0;
  double metric_condition = 1.0;
};

enum class Verdict { Success, Collision, Timeout, Divergence };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Success: return "success";
    case Verdict::Collision: return "collision";
    case Verdict::Timeout: return "timeout";
    case Verdict::Divergence: return "divergence";
  }
  return "unknown";
}

struct Trajectory {
  std::vector<SimState> states;
  std::vector<StepDiagnostics> diagnostics;  // one per state
  Verdict verdict = Verdict::Timeout;
  double path_length = 0.0;      // integrated C-space arc length
  double min_clearance = std::numeric_limits<double>::infinity();
  double final_target_error = std::numeric_limits<double>::infinity();
};

// ---------------------------------------------------------------------------
// Tree assembly

namespace detail {

inline DifferentiableMap frame_origin_map(const ChainModel& model, int frame) {
  const int link = frame < 0 ? model.ee_frame() : frame;
  return link_point_map(model, link, Eigen::Vector3d::Zero());
}

inline int default_wrist_point(const ChainModel& model) {
  return static_cast<int>(model.body_points.size()) - 1;
}

inline int default_forearm_point(const ChainModel& model) {
  return std::max(0, static_cast<int>(model.body_points.size()) - 3);
}

}  // namespace detail

/// Builds the evaluation tree for one phase: collision policies expand over
/// body points and obstacles (and body-point pairs when self-collision is
/// on), everything else attaches to its named task space.
inline RmpTree build_tree(const Scenario& sc, const Phase& phase) {
  const ChainModel& model = sc.robot;
  RmpTree tree(model.dof());

  for (const PolicySpec& spec : phase.policies) {
    switch (spec.type) {
      case PolicySpec::Type::Attractor: {
        const int node = tree.add_node(0, detail::frame_origin_map(model, spec.frame), "frame");
        AttractorParams params = spec.attractor;
        tree.add_policy(node, [params](const Vec& x, const Vec& xdot) {
          return attractor_rmp(params, x, xdot);
        });
        break;
      }
      case PolicySpec::Type::AxisAttractor: {
        const int link = spec.frame < 0 ? model.ee_frame() : spec.frame;
        const int node = tree.add_node(0, axis_target_map(model, link, spec.axis), "axis");
        AttractorParams params = spec.attractor;
        tree.add_policy(node, [params](const Vec& x, const Vec& xdot) {
          return attractor_rmp(params, x, xdot);
        });
        break;
      }
      case PolicySpec::Type::CylindricalAttractor: {
        if (model.planar) {
          throw std::invalid_argument("cylindrical attractor requires a spatial robot");
        }
        const DifferentiableMap to_cyl =
            compose(detail::frame_origin_map(model, spec.frame), cylindrical_map(spec.cylinder));
        const int node = tree.add_node(0, to_cyl, "cylindrical");
        AttractorParams params = spec.attractor;
        tree.add_policy(node, [params](const Vec& x, const Vec& xdot) {
          return attractor_rmp(params, x, xdot);
        });
        break;
      }
      case PolicySpec::Type::Collision: {
        const CollisionParams params = spec.collision;
        const bool simple = spec.collision_simple_form;
        for (size_t bp = 0; bp < model.body_points.size(); ++bp) {
          const double body_radius = model.body_points[bp].radius;
          const int node =
              tree.add_node(0, body_point_map(model, static_cast<int>(bp)), "body_point");
          for (const Obstacle& obs : sc.obstacles) {
            SphereDistanceMap dist(obs.center, obs.radius + body_radius);
            if (simple) {
              Vec center = obs.center;
              tree.add_policy(node, [params, center](const Vec& x, const Vec& xdot) {
                return collision_rmp_simple(params, x, xdot, center);
              });
            } else {
              tree.add_policy(node, [params, dist](const Vec& x, const Vec& xdot) {
                return collision_rmp(params, eval_sphere_distance(dist, x), xdot);
              });
            }
          }
        }
        if (sc.self_collision) {
          for (size_t i = 0; i < model.body_points.size(); ++i) {
            for (size_t j = i + 1; j < model.body_points.size(); ++j) {
              const BodyPoint& a = model.body_points[i];
              const BodyPoint& b = model.body_points[j];
              if (std::abs(a.link - b.link) < sc.self_collision_link_gap) continue;
              const DifferentiableMap rel =
                  difference_map(body_point_map(model, static_cast<int>(i)),
                                 body_point_map(model, static_cast<int>(j)));
              const int node = tree.add_node(0, rel, "self_pair");
              SphereDistanceMap dist(Vec::Zero(rel.codomain_dim), a.radius + b.radius);
              tree.add_policy(node, [params, dist](const Vec& x, const Vec& xdot) {
                return collision_rmp(params, eval_sphere_distance(dist, x), xdot);
              });
            }
          }
        }
        break;
      }
      case PolicySpec::Type::Redundancy: {
        RedundancyParams params = spec.redundancy;
        tree.add_policy(0, [params](const Vec& q, const Vec& qdot) {
          return redundancy_rmp(params, q, qdot);
        });
        break;
      }
      case PolicySpec::Type::Retract: {
        const Vec target = spec.retract_target;
        const double gain = spec.retract_gain;
        const double gain_d = spec.retract_gain_d;
        tree.add_policy(0, [target, gain, gain_d](const Vec& q, const Vec& qdot) {
          return retract_rmp(target, gain, gain_d, q, qdot);
        });
        break;
      }
      case PolicySpec::Type::RetractBlend: {
        // Wrist chases a point riding on the forearm; the target blends
        // toward the wrist's retracted position as the wrist approaches it.
        const int wrist = spec.wrist_point >= 0 ? spec.wrist_point
                                                : detail::default_wrist_point(model);
        const int forearm = spec.forearm_point >= 0 ? spec.forearm_point
                                                    : detail::default_forearm_point(model);
        const DifferentiableMap wrist_map = body_point_map(model, wrist);
        const DifferentiableMap stacked = stack_map(wrist_map, body_point_map(model, forearm));
        const Eigen::Index wd = wrist_map.codomain_dim;
        const Vec wrist_retracted = wrist_map.eval(spec.retract_target).value;
        AttractorParams params = spec.attractor;
        const double sigma = spec.blend_sigma;
        const int node = tree.add_node(0, stacked, "retract_blend");
        tree.add_policy(node, [params, wrist_retracted, sigma, wd](const Vec& x,
                                                                   const Vec& xdot) mutable {
          const Vec wrist_pos = x.head(wd);
          const Vec forearm_pos = x.tail(x.size() - wd);
          const double blend =
              std::exp(-(wrist_pos - wrist_retracted).norm() / sigma);
          params.target = (1.0 - blend) * forearm_pos + blend * wrist_retracted;
          const RmpEval wrist_rmp = attractor_rmp(params, wrist_pos, xdot.head(wd));
          Vec accel = Vec::Zero(x.size());
          accel.head(wd) = wrist_rmp.accel;
          Mat metric = Mat::Zero(x.size(), x.size());
          metric.topLeftCorner(wd, wd) = wrist_rmp.metric;
          return RmpEval{accel, metric};
        });
        break;
      }
    }
  }
  return tree;
}

// ---------------------------------------------------------------------------
// Combination strategies

/// C-space RMP in unresolved form under the selected combination strategy.
/// All strategies route the result through the joint-limit handler.
inline UnresolvedRmp combine(const RmpTree& tree, const StrategySpec& strategy, const Vec& q,
                             const Vec& qdot) {
  switch (strategy.kind) {
    case CombinationKind::MetricWeighted:
      return tree.evaluate_root(q, qdot);

    case CombinationKind::ScaledIdentity: {
      // Replace every pullback metric by beta I, beta = its top eigenvalue.
      UnresolvedRmp acc = UnresolvedRmp::zero(tree.root_dim());
      for (const RmpTree::FlatLeaf& leaf : tree.flatten(q, qdot)) {
        const RmpEval pulled = pull(leaf.map, leaf.policy);
        Eigen::SelfAdjointEigenSolver<Mat> eig(symmetrize(pulled.metric), Eigen::EigenvaluesOnly);
        double beta = std::max(0.0, eig.eigenvalues().maxCoeff());
        if (leaf.cspace) beta *= strategy.cspace_weight;
        acc.force += beta * pulled.accel;
        acc.metric += beta * Mat::Identity(tree.root_dim(), tree.root_dim());
      }
      return acc;
    }

    case CombinationKind::Superposition: {
      // Classic pseudoinverse transport, unweighted superposition.
      Vec accel = Vec::Zero(tree.root_dim());
      for (const RmpTree::FlatLeaf& leaf : tree.flatten(q, qdot)) {
        accel += generalized_inverse(leaf.map.jacobian) * leaf.policy.accel;
      }
      return UnresolvedRmp{accel, Mat::Identity(tree.root_dim(), tree.root_dim())};
    }
  }
  throw std::logic_error("combine: unhandled strategy");
}

// ---------------------------------------------------------------------------
// Integration

/// One Euler step: the acceleration is evaluated at the current state, the
/// position advances with the current velocity, then the velocity updates.
inline SimState step(const SimState& state, const RmpTree& tree, const SigmoidLimitMap& limits,
                     double dt, const StrategySpec& strategy) {
  if (dt <= 0.0) throw std::invalid_argument("step: dt must be positive");
  const UnresolvedRmp combined = combine(tree, strategy, state.q, state.qdot);
  const Vec accel = apply_joint_limits(limits, combined, state.q, state.qdot).accel;
  if (!accel.allFinite()) {
    throw std::runtime_error("step: non-finite acceleration at t=" + std::to_string(state.t));
  }
  SimState next;
  next.q = state.q + state.qdot * dt;
  next.qdot = state.qdot + accel * dt;
  next.t = state.t + dt;
  next.step_index = state.step_index + 1;
  return next;
}

namespace detail {

struct ClearanceProbe {
  std::vector<DifferentiableMap> body_maps;
  std::vector<double> body_radii;
  std::vector<std::pair<int, int>> self_pairs;

  explicit ClearanceProbe(const Scenario& sc) {
    const ChainModel& model = sc.robot;
    for (size_t i = 0; i < model.body_points.size(); ++i) {
      body_maps.push_back(body_point_map(model, static_cast<int>(i)));
      body_radii.push_back(model.body_points[i].radius);
    }
    if (sc.self_collision) {
      for (size_t i = 0; i < model.body_points.size(); ++i) {
        for (size_t j = i + 1; j < model.body_points.size(); ++j) {
          if (std::abs(model.body_points[i].link - model.body_points[j].link) <
              sc.self_collision_link_gap)
            continue;
          self_pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
      }
    }
  }

  double min_clearance(const Scenario& sc, const Vec& q) const {
    double best = std::numeric_limits<double>::infinity();
    std::vector<Vec> positions(body_maps.size());
    for (size_t i = 0; i < body_maps.size(); ++i) positions[i] = body_maps[i].eval(q).value;
    for (size_t i = 0; i < body_maps.size(); ++i) {
      for (const Obstacle& obs : sc.obstacles) {
        best = std::min(best,
                        (positions[i] - obs.center).norm() - obs.radius - body_radii[i]);
      }
    }
    for (const auto& [i, j] : self_pairs) {
      best = std::min(best,
                      (positions[i] - positions[j]).norm() - body_radii[i] - body_radii[j]);
    }
    return best;
  }
};

inline double goal_error(const Scenario& sc, const Goal& goal, const Vec& q) {
  if (goal.type == Goal::Type::CSpace) {
    return (q - goal.target).cwiseAbs().maxCoeff();
  }
  const Vec pos = frame_origin_map(sc.robot, goal.frame).eval(q).value;
  return (pos - goal.target).norm();
}

inline bool goal_reached(const Scenario& sc, const Goal& goal, const SimState& s) {
  const double err = goal_error(sc, goal, s.q);
  const double tol =
      goal.type == Goal::Type::CSpace ? goal.joint_tolerance : goal.position_tolerance;
  return err <= tol && s.qdot.norm() <= goal.speed_tolerance;
}

inline double metric_condition(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  const Vec& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / sv(sv.size() - 1);
}

}  // namespace detail

/// Integrates the scenario under the given strategy. Phases run in order;
/// success requires the last phase's goal. The loop aborts on collision
/// (any clearance <= 0) or divergence (non-finite or runaway state).
inline Trajectory run(const Scenario& sc, const StrategySpec& strategy) {
  Trajectory traj;
  if (sc.phases.empty()) throw std::invalid_argument("run: scenario has no phases");
  const detail::ClearanceProbe probe(sc);
  SimState state{sc.start_q,
                 sc.start_qdot.size() ? sc.start_qdot : Vec::Zero(sc.robot.dof()), 0.0, 0};

  size_t phase_idx = 0;
  RmpTree tree = build_tree(sc, sc.phases[phase_idx]);

  for (int step_count = 0; step_count <= sc.integrator.max_steps; ++step_count) {
    const Goal& goal = sc.phases[phase_idx].goal;

    StepDiagnostics diag;
    diag.min_obstacle_distance = probe.min_clearance(sc, state.q);
    diag.target_error = detail::goal_error(sc, goal, state.q);
    traj.min_clearance = std::min(traj.min_clearance, diag.min_obstacle_distance);
    if (!traj.states.empty()) {
      traj.path_length += (state.q - traj.states.back().q).norm();
    }

    UnresolvedRmp combined;
    Vec accel;
    bool finite = true;
    try {
      combined = combine(tree, strategy, state.q, state.qdot);
      const RmpEval corrected = apply_joint_limits(sc.limit_map, combined, state.q, state.qdot);
      accel = corrected.accel;
      diag.accel_norm = accel.norm();
      diag.metric_condition = detail::metric_condition(corrected.metric);
      finite = accel.allFinite();
    } catch (const std::exception&) {
      finite = false;
    }

    traj.states.push_back(state);
    traj.diagnostics.push_back(diag);

    if (diag.min_obstacle_distance <= 0.0) {
      traj.verdict = Verdict::Collision;
      break;
    }
    if (!finite || state.qdot.norm() > 1e6 || !state.q.allFinite()) {
      traj.verdict = Verdict::Divergence;
      break;
    }
    if (detail::goal_reached(sc, goal, state)) {
      if (phase_idx + 1 < sc.phases.size()) {
        ++phase_idx;
        tree = build_tree(sc, sc.phases[phase_idx]);
      } else {
        traj.verdict = Verdict::Success;
        break;
      }
    }
    if (step_count == sc.integrator.max_steps) {
      traj.verdict = Verdict::Timeout;
      break;
    }

    SimState next;
    next.q = state.q + state.qdot * sc.integrator.dt;
    next.qdot = state.qdot + accel * sc.integrator.dt;
    next.t = state.t + sc.integrator.dt;
    next.step_index = state.step_index + 1;
    state = std::move(next);
  }

  traj.final_target_error =
      detail::goal_error(sc, sc.phases.back().goal, traj.states.back().q);
  return traj;
}

// ---------------------------------------------------------------------------
// Batch comparison

struct CompareRow {
  std::string scenario;
  std::string strategy;
  Verdict verdict = Verdict::Timeout;
  int steps = 0;
  double path_length = 0.0;
  double min_clearance = 0.0;
  double final_target_error = 0.0;
};

struct StrategySummary {
  std::string strategy;
  int runs = 0;
  int successes = 0;
  int collisions = 0;
  double success_rate = 0.0;
  double collision_rate = 0.0;
  double mean_path_length = 0.0;
  double mean_min_clearance = 0.0;
};

struct CompareTable {
  std::vector<CompareRow> rows;        // one per (scenario, strategy)
  std::vector<StrategySummary> summary;  // one per strategy, in input order
};

inline int batch_thread_cap() {
  if (const char* env = std::getenv("RMP_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) return cap;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Baseline set used by the comparison experiment: the metric-weighted
/// combination, the scaled-identity baseline with an increasing C-space
/// weight sweep, and plain superposition.
inline std::vector<StrategySpec> default_strategy_set() {
  return {
      {CombinationKind::MetricWeighted, 1.0},
      {CombinationKind::ScaledIdentity, 1.0},
      {CombinationKind::ScaledIdentity, 3.0},
      {CombinationKind::ScaledIdentity, 10.0},
      {CombinationKind::Superposition, 1.0},
  };
}

inline CompareTable batch_compare(const std::vector<Scenario>& scenarios,
                                  const std::vector<StrategySpec>& strategies) {
  if (scenarios.empty()) throw std::invalid_argument("batch_compare: empty scenario batch");
  CompareTable table;
  const size_t total = scenarios.size() * strategies.size();
  table.rows.resize(total);

  const int threads = std::min<int>(batch_thread_cap(), static_cast<int>(total));
  std::atomic<size_t> cursor{0};
  auto worker = [&]() {
    for (size_t idx = cursor.fetch_add(1); idx < total; idx = cursor.fetch_add(1)) {
      const Scenario& sc = scenarios[idx / strategies.size()];
      const StrategySpec& strat = strategies[idx % strategies.size()];
      const Trajectory traj = run(sc, strat);
      CompareRow row;
      row.scenario = sc.name;
      row.strategy = strat.label();
      row.verdict = traj.verdict;
      row.steps = static_cast<int>(traj.states.size()) - 1;
      row.path_length = traj.path_length;
      row.min_clearance = traj.min_clearance;
      row.final_target_error = traj.final_target_error;
      table.rows[idx] = std::move(row);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  for (const StrategySpec& strat : strategies) {
    StrategySummary s;
    s.strategy = strat.label();
    for (const CompareRow& row : table.rows) {
      if (row.strategy != s.strategy) continue;
      ++s.runs;
      if (row.verdict == Verdict::Success) ++s.successes;
      if (row.verdict == Verdict::Collision) ++s.collisions;
      s.mean_path_length += row.path_length;
      s.mean_min_clearance += row.min_clearance;
    }
    if (s.runs > 0) {
      s.success_rate = static_cast<double>(s.successes) / s.runs;
      s.collision_rate = static_cast<double>(s.collisions) / s.runs;
      s.mean_path_length /= s.runs;
      s.mean_min_clearance /= s.runs;
    }
    table.summary.push_back(std::move(s));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Random reaching scenes

/// Seeded planar reaching scene: the arm starts folded to one side and must
/// reach a target on the far side of four circular obstacles placed in the
/// annulus between base and target.
inline Scenario generate_reach_scene(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  Scenario sc;
  sc.name = "reach_gen_" + std::to_string(seed);
  sc.seed = seed;
  sc.robot = planar3();
  sc.limit_map = SigmoidLimitMap(sc.robot.lower_limits(), sc.robot.upper_limits());
  sc.start_q = Vec(3);
  sc.start_q << 1.9, 1.1, 0.7;

  const detail::ClearanceProbe probe(sc);

  Vec target(2);
  for (int attempt = 0;; ++attempt) {
    if (attempt > 2000) throw std::runtime_error("generate_reach_scene: rejection budget spent");
    const double angle = uniform(-0.7, 0.7);
    const double radius = uniform(1.4, 2.3);
    target << radius * std::cos(angle), radius * std::sin(angle);

    sc.obstacles.clear();
    bool ok = true;
    for (int i = 0; i < 4 && ok; ++i) {
      Obstacle obs;
      obs.radius = uniform(0.15, 0.35);
      const double along = uniform(0.3, 0.85);
      const double side = uniform(-0.55, 0.55);
      const Eigen::Vector2d dir = Eigen::Vector2d(target(0), target(1)).normalized();
      const Eigen::Vector2d normal(-dir.y(), dir.x());
      const Eigen::Vector2d center = along * radius * dir + side * normal;
      obs.center = Vec(2);
      obs.center << center.x(), center.y();
      if (center.norm() < obs.radius + 0.25) ok = false;  // keep the base free
      for (const Obstacle& other : sc.obstacles) {
        if ((other.center - obs.center).norm() < other.radius + obs.radius + 0.1) ok = false;
      }
      if ((obs.center - target).norm() < obs.radius + 0.25) ok = false;
      sc.obstacles.push_back(obs);
    }
    if (!ok) continue;
    if (probe.min_clearance(sc, sc.start_q) < 0.08) continue;
    break;
  }

  Phase phase;
  PolicySpec attract;
  attract.type = PolicySpec::Type::Attractor;
  attract.attractor.target = target;
  phase.policies.push_back(attract);

  PolicySpec collide;
  collide.type = PolicySpec::Type::Collision;
  phase.policies.push_back(collide);

  PolicySpec redundancy;
  redundancy.type = PolicySpec::Type::Redundancy;
  redundancy.redundancy.rest_pose = sc.limit_map.midpoints();
  redundancy.redundancy.rest_velocity = Vec::Zero(3);
  redundancy.redundancy.gain_p = 0.5;
  redundancy.redundancy.gain_d = 1.5;
  phase.policies.push_back(redundancy);

  phase.goal.type = Goal::Type::TaskPoint;
  phase.goal.target = target;
  sc.phases.push_back(std::move(phase));
  return sc;
}

inline std::vector<Scenario> generate_reach_batch(int count, std::uint64_t seed) {
  std::vector<Scenario> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(generate_reach_scene(seed + i));
  return out;
}

}  // namespace rmp
