#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mapfe/constraints.hpp"
#include "mapfe/elevator.hpp"
#include "mapfe/path.hpp"
#include "mapfe/sipp.hpp"

namespace mapfe {

/// One MDD-E node (v, t, k, t_s). The owning agent's start and goal floors
/// complete the tuple. A node with board_time == t is the boarding moment;
/// between boarding and exit the node's vertex is the last door passed.
struct MddNode {
  Vertex v;
  int elevator = -1;     // -1 until the agent has boarded
  Time board_time = -1;  // -1 until the agent has boarded
  std::vector<int> children;  // indices into the next level
  std::vector<int> parents;   // indices into the previous level
};

/// All cost-`cost` paths of one agent that satisfy a constraint set, as a
/// levelled DAG with one level per time step.
class Mdd {
 public:
  Mdd() = default;
  Mdd(const MultiFloorGraph& graph, const Agent& agent, Time cost);

  const Agent& agent() const { return agent_; }
  Time cost() const { return cost_; }
  bool empty() const { return levels_.empty() || levels_.front().empty(); }
  /// Construction stopped at the node cap; contents are meaningless.
  bool overflow() const { return overflow_; }
  std::size_t node_count() const;

  const std::vector<MddNode>& level(Time t) const { return levels_[static_cast<std::size_t>(t)]; }
  const MddNode& node(Time t, int index) const { return levels_[static_cast<std::size_t>(t)][static_cast<std::size_t>(index)]; }

  /// Index of the node with this identity at level t, or -1.
  int find(const Vertex& v, Time t, int elevator = -1, Time board_time = -1) const;
  /// Distinct vertices at level t that the agent physically occupies.
  std::vector<Vertex> vertices_at(Time t) const;

  bool in_transit(const MddNode& n, Time t) const;
  Time exit_time(const MddNode& n) const;
  /// The ride a node records, if it has boarded.
  std::optional<ElevatorUsage> usage(const MddNode& n) const;

  /// Sub-MDD of the paths that additionally satisfy `extra`.
  Mdd restricted(std::span<const Constraint> extra) const;

  /// Converts a root-to-goal node-index sequence into a timed path.
  Path to_path(std::span<const int> indices) const;
  /// Any root-to-goal path, taking the lowest-index child at every step.
  std::optional<Path> first_path() const;
  /// Every root-to-goal path (exponential; test use).
  std::vector<Path> all_paths(std::size_t limit = 1u << 20) const;

  /// Single-path MDD for an existing path.
  static Mdd from_path(const MultiFloorGraph& graph, const Agent& agent, const Path& path);

 private:
  friend Mdd build_mdd_e(const Agent&, Time, const ConstraintSet&, const MultiFloorGraph&, const GoalDistance&,
                         std::size_t);
  /// Drops nodes/edges rejected by the filters and everything that no longer
  /// lies on a root-to-goal path.
  Mdd pruned(const std::vector<std::vector<char>>& keep_node,
             const std::vector<std::vector<std::vector<char>>>& keep_edge) const;
  void link();

  const MultiFloorGraph* graph_ = nullptr;
  Agent agent_;
  Time cost_ = 0;
  bool overflow_ = false;
  std::vector<std::vector<MddNode>> levels_;
};

inline constexpr std::size_t kDefaultMddNodeCap = 200000;

/// MDD-E of `agent` for exact cost `d` under `constraints`. Empty when no
/// such path exists; overflow() when more than `node_cap` nodes are needed.
Mdd build_mdd_e(const Agent& agent, Time d, const ConstraintSet& constraints, const MultiFloorGraph& graph,
                const GoalDistance& distance, std::size_t node_cap = kDefaultMddNodeCap);
Mdd build_mdd_e(const Agent& agent, Time d, const ConstraintSet& constraints, const MultiFloorGraph& graph,
                std::size_t node_cap = kDefaultMddNodeCap);

/// Plain ignores elevator state and prunes only vertex and edge conflicts.
enum class JointMode { ElevatorAware, Plain };

struct JointNode {
  int first = 0;   // node index in the first MDD (at its last level once padded)
  int second = 0;  // node index in the second MDD
  std::vector<int> children;
  std::vector<int> parents;
};

/// Conflict-pruned product of two MDD-Es. Level t holds the pairs reachable
/// from the root pair through conflict-free transitions. An agent whose MDD
/// is shorter stays parked on its goal node.
class JointMdd {
 public:
  const std::vector<JointNode>& level(Time t) const { return levels_[static_cast<std::size_t>(t)]; }
  Time depth() const { return static_cast<Time>(levels_.size()) - 1; }
  bool complete() const { return !levels_.empty() && !levels_.back().empty(); }

  /// Is the pair ((v1, t), (v2, t)) present, for any elevator annotations?
  bool contains(Time t, const Vertex& v1, const Vertex& v2) const;
  /// A conflict-free pair of full paths, if the product reaches the last level.
  std::optional<std::pair<Path, Path>> extract() const;

  const Mdd& first() const { return *a_; }
  const Mdd& second() const { return *b_; }

 private:
  friend JointMdd build_joint(const Mdd&, const Mdd&, const MultiFloorGraph&, JointMode);
  const Mdd* a_ = nullptr;
  const Mdd* b_ = nullptr;
  std::vector<std::vector<JointNode>> levels_;
};

/// Both MDDs must outlive the result.
JointMdd build_joint(const Mdd& first, const Mdd& second, const MultiFloorGraph& graph,
                     JointMode mode = JointMode::ElevatorAware);
JointMdd build_joint(Mdd&&, const Mdd&, const MultiFloorGraph&, JointMode = JointMode::ElevatorAware) = delete;
JointMdd build_joint(const Mdd&, Mdd&&, const MultiFloorGraph&, JointMode = JointMode::ElevatorAware) = delete;
JointMdd build_joint(Mdd&&, Mdd&&, const MultiFloorGraph&, JointMode = JointMode::ElevatorAware) = delete;

}  // namespace mapfe
