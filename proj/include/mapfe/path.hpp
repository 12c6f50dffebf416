#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mapfe/model.hpp"

namespace mapfe {

struct TimedVertex {
  Vertex v;
  Time t = 0;
  friend bool operator==(const TimedVertex&, const TimedVertex&) = default;
};

/// A single agent's timed route. Steps start at (start, 0), times strictly
/// increase, and a ride lists every door it passes at multiples of t_floor.
/// The agent rests at the final vertex forever after the last step.
struct Path {
  std::vector<TimedVertex> steps;

  Time cost() const { return steps.empty() ? 0 : steps.back().t; }
  const Vertex& back() const { return steps.back().v; }
  friend bool operator==(const Path&, const Path&) = default;
};

/// One agent's single ride: boards at `board_time` on `board_floor`,
/// arrives at `exit_floor` at `exit_time`.
struct ElevatorUsage {
  int agent = -1;
  int elevator = -1;
  Time board_time = 0;
  int board_floor = 1;
  int exit_floor = 1;
  Time exit_time = 0;
  friend bool operator==(const ElevatorUsage&, const ElevatorUsage&) = default;
};

/// The ride contained in `path`, if any. Assumes the path is structurally valid.
std::optional<ElevatorUsage> elevator_usage(const Path& path, const MultiFloorGraph& graph, int agent);

/// Structural check: connectivity, timing, ride shape, start and goal.
/// Returns a description of the first defect, or nullopt.
std::optional<std::string> check_path(const Path& path, const Agent& agent, const MultiFloorGraph& graph);

/// Positions of one agent at every integer time, as seen by conflict checks.
class Timeline {
 public:
  Timeline(const Path& path, const MultiFloorGraph& graph, int agent);

  /// Vertex at `t`, or nullopt while strictly between boarding and exit.
  /// After the last step the agent is parked at its final vertex.
  std::optional<Vertex> at(Time t) const;
  /// True for t in [board_time, exit_time] of the agent's ride.
  bool riding(Time t) const { return usage_ && t >= usage_->board_time && t <= usage_->exit_time; }
  bool in_transit(Time t) const { return usage_ && t > usage_->board_time && t < usage_->exit_time; }
  const std::optional<ElevatorUsage>& usage() const { return usage_; }
  Time end() const { return static_cast<Time>(positions_.size()) - 1; }
  int agent() const { return agent_; }

 private:
  std::vector<Vertex> positions_;  // index = time; in-ride slots hold the last door passed
  std::optional<ElevatorUsage> usage_;
  int agent_;
};

/// "(l,x,y)@t (l,x,y)@t ..."
std::string format_path(const Path& path);
/// Inverse of format_path; throws FormatError.
Path parse_path(const std::string& text);

/// Plan file: one `agent i: <path>` line per agent, in agent order.
void write_plan(std::ostream& out, const std::vector<Path>& paths);
/// Throws FormatError on malformed lines, duplicate or missing agents.
std::vector<Path> parse_plan(std::istream& in);

}  // namespace mapfe
