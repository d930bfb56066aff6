#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rmp/joint_limits.hpp"
#include "rmp/taskmap.hpp"

namespace rmp {

/// Tree of task spaces rooted at the configuration space. Edges carry task
/// maps from parent to child; leaf policies sit on nodes. Evaluation works
/// in the unresolved form throughout, so the single generalized inverse
/// happens at resolution, not per node.
class RmpTree {
 public:
  using PolicyFn = std::function<RmpEval(const Vec& x, const Vec& xdot)>;

  explicit RmpTree(Eigen::Index root_dim, std::string root_name = "cspace") {
    Node root;
    root.dim = root_dim;
    root.name = std::move(root_name);
    root.parent = -1;
    nodes_.push_back(std::move(root));
  }

  /// Adds a task space below `parent`, reached through `edge`. Dimension
  /// consistency is enforced here, not during evaluation.
  int add_node(int parent, DifferentiableMap edge, std::string name = {}) {
    check_node(parent);
    require_same_dim(edge.domain_dim, nodes_[parent].dim, "RmpTree::add_node (edge domain)");
    Node node;
    node.dim = edge.codomain_dim;
    node.name = std::move(name);
    node.parent = parent;
    node.edge = std::move(edge);
    nodes_.push_back(std::move(node));
    const int id = static_cast<int>(nodes_.size()) - 1;
    nodes_[parent].children.push_back(id);
    return id;
  }

  void add_policy(int node, PolicyFn policy) {
    check_node(node);
    nodes_[node].policies.push_back(std::move(policy));
  }

  Eigen::Index root_dim() const { return nodes_[0].dim; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  Eigen::Index node_dim(int node) const {
    check_node(node);
    return nodes_[node].dim;
  }
  int policy_count() const {
    int n = 0;
    for (const Node& node : nodes_) n += static_cast<int>(node.policies.size());
    return n;
  }

  /// Depth-first pullback-and-combine to the root. When `order_seed` is set,
  /// the summation order of each node's contributions is shuffled; any order
  /// must produce the same root RMP.
  UnresolvedRmp evaluate_root(const Vec& q, const Vec& qdot,
                              std::optional<std::uint64_t> order_seed = std::nullopt) const {
    require_same_dim(q.size(), root_dim(), "RmpTree::evaluate_root");
    require_same_dim(qdot.size(), root_dim(), "RmpTree::evaluate_root");
    std::mt19937_64 rng(order_seed.value_or(0));
    return evaluate_node(0, q, qdot, order_seed ? &rng : nullptr);
  }

  /// A leaf policy with its direct root-to-node map (edge Jacobians chained
  /// along the path); the flat view the baseline strategies consume.
  struct FlatLeaf {
    int node;
    MapEval map;      // composed linearization at the current state
    RmpEval policy;   // leaf evaluation at the node-local state
    bool cspace;      // attached directly to the root
  };

  std::vector<FlatLeaf> flatten(const Vec& q, const Vec& qdot) const {
    require_same_dim(q.size(), root_dim(), "RmpTree::flatten");
    std::vector<FlatLeaf> leaves;
    MapEval root_map = MapEval::identity(q);
    flatten_node(0, root_map, qdot, leaves);
    return leaves;
  }

 private:
  struct Node {
    Eigen::Index dim = 0;
    std::string name;
    int parent = -1;
    DifferentiableMap edge;  // parent -> this; unused for the root
    std::vector<int> children;
    std::vector<PolicyFn> policies;
  };

  void check_node(int node) const {
    if (node < 0 || node >= static_cast<int>(nodes_.size())) {
      throw std::invalid_argument("RmpTree: node index out of range");
    }
  }

  UnresolvedRmp evaluate_node(int id, const Vec& x, const Vec& xdot,
                              std::mt19937_64* rng) const {
    const Node& node = nodes_[id];
    const size_t terms = node.policies.size() + node.children.size();
    std::vector<size_t> order(terms);
    std::iota(order.begin(), order.end(), size_t{0});
    if (rng) std::shuffle(order.begin(), order.end(), *rng);

    UnresolvedRmp acc = UnresolvedRmp::zero(node.dim);
    for (size_t slot : order) {
      if (slot < node.policies.size()) {
        acc = add_unresolved(acc, unresolve(node.policies[slot](x, xdot)));
      } else {
        const int child = node.children[slot - node.policies.size()];
        const MapEval edge = nodes_[child].edge.eval(x);
        const Vec child_xdot = edge.jacobian * xdot;
        acc = add_unresolved(
            acc, pull_unresolved(edge, evaluate_node(child, edge.value, child_xdot, rng)));
      }
    }
    return acc;
  }

  void flatten_node(int id, const MapEval& path, const Vec& qdot,
                    std::vector<FlatLeaf>& out) const {
    const Node& node = nodes_[id];
    const Vec xdot = path.jacobian * qdot;
    for (const PolicyFn& policy : node.policies) {
      out.push_back(FlatLeaf{id, path, policy(path.value, xdot), id == 0});
    }
    for (int child : node.children) {
      const MapEval edge = nodes_[child].edge.eval(path.value);
      MapEval composed{edge.value, edge.jacobian * path.jacobian, std::nullopt};
      flatten_node(child, composed, qdot, out);
    }
  }

  std::vector<Node> nodes_;
};

/// Full combination step: pull everything to the root in unresolved form,
/// then resolve through the joint-limit map.
inline Vec solve_policy(const RmpTree& tree, const SigmoidLimitMap& limit_map, const Vec& q,
                        const Vec& qdot,
                        LimitJacobianKind kind = LimitJacobianKind::Directional) {
  const UnresolvedRmp combined = tree.evaluate_root(q, qdot);
  return apply_joint_limits(limit_map, combined, q, qdot, kind).accel;
}

}  // namespace rmp
