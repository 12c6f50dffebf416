#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mapfe/elevator.hpp"
#include "mapfe/path.hpp"

namespace mapfe {

/// Agents i < j both at `v` at time t.
struct VertexConflict {
  int i = -1;
  int j = -1;
  Vertex v;
  Time t = 0;
  friend bool operator==(const VertexConflict&, const VertexConflict&) = default;
};

/// Agent i moves from -> to while j moves to -> from, departing at t.
struct EdgeConflict {
  int i = -1;
  int j = -1;
  Vertex from;
  Vertex to;
  Time t = 0;
  friend bool operator==(const EdgeConflict&, const EdgeConflict&) = default;
};

using Conflict = std::variant<VertexConflict, EdgeConflict, BoardingConflict, OccupancyConflict>;

Time conflict_time(const Conflict& c);
/// The two agents involved, smaller id first.
std::pair<int, int> conflict_agents(const Conflict& c);
std::ostream& operator<<(std::ostream& os, const Conflict& c);

/// Every conflict among the timelines, ordered by time, then kind
/// (vertex, edge, boarding, occupancy), then agents.
std::vector<Conflict> detect_conflicts(std::span<const Timeline> timelines, const MultiFloorGraph& graph);
std::vector<Conflict> detect_conflicts(std::span<const Path> paths, const MultiFloorGraph& graph);

struct ValidationReport {
  std::vector<std::string> invalid;  // one entry per structurally broken path
  std::vector<Conflict> conflicts;

  bool ok() const { return invalid.empty() && conflicts.empty(); }
};

/// Certifies a joint plan. Conflicts are only scanned once every path is
/// structurally valid.
ValidationReport validate(const Instance& instance, std::span<const Path> paths);

/// The two constraints that split on `c`, one per involved agent.
std::pair<AgentConstraint, AgentConstraint> branch_constraints(const MultiFloorGraph& graph, const Conflict& c,
                                                               bool ec_enabled);

}  // namespace mapfe
