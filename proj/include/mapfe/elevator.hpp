#pragma once

#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "mapfe/constraints.hpp"
#include "mapfe/path.hpp"

namespace mapfe {

/// Time to carry an agent between two floors (t_o).
Time ride_duration(const Elevator& e, int from_floor, int to_floor);

/// Time to reposition from a drop-off floor to the next pickup floor (t_r).
Time reset_duration(const Elevator& e, int exit_floor, int next_board_floor);

/// Interval during which `u`'s elevator cannot be boarded on `next_floor`:
/// [t_s, t_s + t_o + t_r], closed at both ends.
Interval busy_interval(const Elevator& e, const ElevatorUsage& u, int next_floor);

/// Two usages of one elevator collide iff either boarding time falls inside
/// the other's busy interval (reset measured toward the other's boarding floor).
/// Precondition: same elevator, different agents.
bool usages_overlap(const Elevator& e, const ElevatorUsage& a, const ElevatorUsage& b);

/// Two agents board the same elevator with overlapping busy intervals.
/// `first.agent < second.agent`.
struct BoardingConflict {
  ElevatorUsage first;
  ElevatorUsage second;
  Time time = 0;  // the later boarding time

  friend bool operator==(const BoardingConflict&, const BoardingConflict&) = default;
};

/// An agent stands at a door of the rider's elevator while that elevator is
/// occupied or still resetting toward the door's floor.
struct OccupancyConflict {
  ElevatorUsage rider;
  int occupier = -1;
  Vertex door;
  Time time = 0;

  friend bool operator==(const OccupancyConflict&, const OccupancyConflict&) = default;
};

using ElevatorConflict = std::variant<BoardingConflict, OccupancyConflict>;

/// Last time (inclusive) at which the door on `floor` is unavailable because of `u`.
Time door_busy_until(const Elevator& e, const ElevatorUsage& u, int floor);

/// All elevator conflicts among `timelines`, ordered by time, then kind
/// (boarding first), then agent pair.
std::vector<ElevatorConflict> detect_elevator_conflicts(std::span<const Timeline> timelines,
                                                        const MultiFloorGraph& graph);

/// Convenience overload that builds the timelines itself.
std::vector<ElevatorConflict> detect_elevator_conflicts(std::span<const Path> paths, const MultiFloorGraph& graph);

/// A constraint tagged with the agent it restricts.
struct AgentConstraint {
  int agent = -1;
  Constraint constraint;
};

/// Range boarding bans that resolve a boarding conflict in one branching.
/// first restricts `c.first.agent`, second restricts `c.second.agent`.
std::pair<AgentConstraint, AgentConstraint> ec_constraints(const MultiFloorGraph& graph, const BoardingConflict& c);

/// Single-timestep boarding bans (the plain CBS resolution).
std::pair<AgentConstraint, AgentConstraint> single_step_boarding_constraints(const BoardingConflict& c);

/// first: occupier may not be at the door at that time.
/// second: rider may not board over [max(0, t - t_o - reset), t].
std::pair<AgentConstraint, AgentConstraint> occupancy_constraints(const MultiFloorGraph& graph,
                                                                  const OccupancyConflict& c);

}  // namespace mapfe
