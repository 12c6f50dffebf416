#pragma once

#include <optional>
#include <vector>

#include "mapfe/constraints.hpp"
#include "mapfe/path.hpp"

namespace mapfe {

/// Exact cost-to-go for one agent when other agents and constraints are
/// ignored. An agent that changes floor must ride exactly once, from its
/// start floor straight to its goal floor; other agents never ride.
class GoalDistance {
 public:
  GoalDistance(const MultiFloorGraph& graph, const Agent& agent);

  /// kTimeInfinity when the goal cannot be reached from (v, rode).
  Time operator()(const Vertex& v, bool rode) const;

 private:
  const MultiFloorGraph* graph_;
  Agent agent_;
  std::vector<Time> on_goal_floor_;   // per cell, distance to goal on the goal floor
  std::vector<Time> on_start_floor_;  // per cell, best door + ride + goal-floor tail
};

/// Safe-interval path planner for one agent. Search states are
/// (vertex, safe interval, rode-elevator flag); ties break toward larger g,
/// then smaller vertex.
class LowLevelPlanner {
 public:
  LowLevelPlanner(const MultiFloorGraph& graph, const Agent& agent);

  /// Minimum-cost path honoring every constraint, or nullopt if none exists.
  /// Among optimal paths, waits are placed as early along the route as the
  /// constraints allow.
  std::optional<Path> plan(const ConstraintSet& constraints) const;

  const GoalDistance& distance() const { return distance_; }
  const Agent& agent() const { return agent_; }

 private:
  const MultiFloorGraph* graph_;
  Agent agent_;
  GoalDistance distance_;
};

std::optional<Path> plan(const Agent& agent, const MultiFloorGraph& graph, const ConstraintSet& constraints);

}  // namespace mapfe
