#include "mapfe/elevator.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>
#include <tuple>

namespace mapfe {

Time ride_duration(const Elevator& e, int from_floor, int to_floor) {
  return static_cast<Time>(std::abs(from_floor - to_floor)) * e.t_floor;
}

Time reset_duration(const Elevator& e, int exit_floor, int next_board_floor) {
  return static_cast<Time>(std::abs(exit_floor - next_board_floor)) * e.t_floor;
}

Interval busy_interval(const Elevator& e, const ElevatorUsage& u, int next_floor) {
  return {u.board_time, u.board_time + ride_duration(e, u.board_floor, u.exit_floor) +
                            reset_duration(e, u.exit_floor, next_floor)};
}

bool usages_overlap(const Elevator& e, const ElevatorUsage& a, const ElevatorUsage& b) {
  assert(a.elevator == b.elevator && a.agent != b.agent);
  return busy_interval(e, a, b.board_floor).contains(b.board_time) ||
         busy_interval(e, b, a.board_floor).contains(a.board_time);
}

Time door_busy_until(const Elevator& e, const ElevatorUsage& u, int floor) {
  return u.exit_time + reset_duration(e, u.exit_floor, floor);
}

namespace {

auto sort_key(const ElevatorConflict& c) {
  if (const auto* b = std::get_if<BoardingConflict>(&c))
    return std::make_tuple(b->time, 0, b->first.agent, b->second.agent, 0);
  const auto& o = std::get<OccupancyConflict>(c);
  return std::make_tuple(o.time, 1, std::min(o.rider.agent, o.occupier), std::max(o.rider.agent, o.occupier),
                         o.door.floor);
}

}  // namespace

std::vector<ElevatorConflict> detect_elevator_conflicts(std::span<const Timeline> timelines,
                                                        const MultiFloorGraph& graph) {
  std::vector<ElevatorConflict> out;
  for (std::size_t a = 0; a < timelines.size(); ++a) {
    const auto& ua = timelines[a].usage();
    if (!ua) continue;
    const Elevator& e = graph.elevator(ua->elevator);

    for (std::size_t b = a + 1; b < timelines.size(); ++b) {
      const auto& ub = timelines[b].usage();
      if (!ub || ub->elevator != ua->elevator) continue;
      if (usages_overlap(e, *ua, *ub)) {
        const bool a_first = ua->agent < ub->agent;
        out.push_back(BoardingConflict{a_first ? *ua : *ub, a_first ? *ub : *ua,
                                       std::max(ua->board_time, ub->board_time)});
      }
    }

    for (std::size_t j = 0; j < timelines.size(); ++j) {
      if (j == a) continue;
      const auto& other = timelines[j];
      for (int f = 1; f <= graph.floors(); ++f) {
        const Vertex door = graph.door(ua->elevator, f);
        const Time until = door_busy_until(e, *ua, f);
        for (Time t = ua->board_time; t <= until; ++t) {
          if (other.riding(t)) continue;  // a rider of the same car is a boarding conflict
          if (other.at(t) == door) out.push_back(OccupancyConflict{*ua, other.agent(), door, t});
        }
      }
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ElevatorConflict& x, const ElevatorConflict& y) { return sort_key(x) < sort_key(y); });
  return out;
}

std::vector<ElevatorConflict> detect_elevator_conflicts(std::span<const Path> paths, const MultiFloorGraph& graph) {
  std::vector<Timeline> timelines;
  timelines.reserve(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) timelines.emplace_back(paths[i], graph, static_cast<int>(i));
  return detect_elevator_conflicts(timelines, graph);
}

std::pair<AgentConstraint, AgentConstraint> ec_constraints(const MultiFloorGraph& graph, const BoardingConflict& c) {
  const Elevator& e = graph.elevator(c.first.elevator);
  const auto& ui = c.first;
  const auto& uj = c.second;
  // Agent i is kept off the car until j's busy interval toward i's floor ends, and vice versa.
  const Interval ban_i{ui.board_time, busy_interval(e, uj, ui.board_floor).hi};
  const Interval ban_j{uj.board_time, busy_interval(e, ui, uj.board_floor).hi};
  return {AgentConstraint{ui.agent, BoardingBan{e.id, ui.board_floor, ban_i}},
          AgentConstraint{uj.agent, BoardingBan{e.id, uj.board_floor, ban_j}}};
}

std::pair<AgentConstraint, AgentConstraint> single_step_boarding_constraints(const BoardingConflict& c) {
  const auto& ui = c.first;
  const auto& uj = c.second;
  return {AgentConstraint{ui.agent, BoardingBan{ui.elevator, ui.board_floor, {ui.board_time, ui.board_time}}},
          AgentConstraint{uj.agent, BoardingBan{uj.elevator, uj.board_floor, {uj.board_time, uj.board_time}}}};
}

std::pair<AgentConstraint, AgentConstraint> occupancy_constraints(const MultiFloorGraph& graph,
                                                                  const OccupancyConflict& c) {
  const Elevator& e = graph.elevator(c.rider.elevator);
  const Time span = ride_duration(e, c.rider.board_floor, c.rider.exit_floor) +
                    reset_duration(e, c.rider.exit_floor, c.door.floor);
  return {AgentConstraint{c.occupier, VertexBan{c.door, {c.time, c.time}}},
          AgentConstraint{c.rider.agent,
                          BoardingBan{e.id, c.rider.board_floor, {std::max<Time>(0, c.time - span), c.time}}}};
}

}  // namespace mapfe
