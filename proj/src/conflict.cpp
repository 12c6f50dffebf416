#include "mapfe/conflict.hpp"

#include <algorithm>
#include <cstdlib>
#include <ostream>
#include <tuple>

namespace mapfe {

Time conflict_time(const Conflict& c) {
  if (const auto* v = std::get_if<VertexConflict>(&c)) return v->t;
  if (const auto* e = std::get_if<EdgeConflict>(&c)) return e->t;
  if (const auto* b = std::get_if<BoardingConflict>(&c)) return b->time;
  return std::get<OccupancyConflict>(c).time;
}

std::pair<int, int> conflict_agents(const Conflict& c) {
  if (const auto* v = std::get_if<VertexConflict>(&c)) return {v->i, v->j};
  if (const auto* e = std::get_if<EdgeConflict>(&c)) return {e->i, e->j};
  if (const auto* b = std::get_if<BoardingConflict>(&c)) return {b->first.agent, b->second.agent};
  const auto& o = std::get<OccupancyConflict>(c);
  return {std::min(o.rider.agent, o.occupier), std::max(o.rider.agent, o.occupier)};
}

std::ostream& operator<<(std::ostream& os, const Conflict& c) {
  if (const auto* v = std::get_if<VertexConflict>(&c))
    return os << "vertex conflict: agents " << v->i << "," << v->j << " at " << v->v << " t=" << v->t;
  if (const auto* e = std::get_if<EdgeConflict>(&c))
    return os << "edge conflict: agents " << e->i << "," << e->j << " on " << e->from << "-" << e->to << " t=" << e->t;
  if (const auto* b = std::get_if<BoardingConflict>(&c))
    return os << "boarding conflict: agents " << b->first.agent << "," << b->second.agent << " elevator "
              << b->first.elevator << " boarding at " << b->first.board_time << "," << b->second.board_time
              << " t=" << b->time;
  const auto& o = std::get<OccupancyConflict>(c);
  return os << "occupancy conflict: agent " << o.occupier << " at " << o.door << " while agent " << o.rider.agent
            << " uses elevator " << o.rider.elevator << " t=" << o.time;
}

std::vector<Conflict> detect_conflicts(std::span<const Timeline> timelines, const MultiFloorGraph& graph) {
  std::vector<Conflict> out;
  Time horizon = 0;
  for (const auto& tl : timelines) horizon = std::max(horizon, tl.end());

  for (std::size_t a = 0; a < timelines.size(); ++a)
    for (std::size_t b = a + 1; b < timelines.size(); ++b) {
      const auto& x = timelines[a];
      const auto& y = timelines[b];
      for (Time t = 0; t <= horizon; ++t) {
        const auto xa = x.at(t);
        const auto ya = y.at(t);
        if (xa && ya && *xa == *ya) out.push_back(VertexConflict{x.agent(), y.agent(), *xa, t});
        if (t == horizon) continue;
        const auto xb = x.at(t + 1);
        const auto yb = y.at(t + 1);
        if (!xa || !ya || !xb || !yb || *xa == *xb) continue;
        if (xa->floor != xb->floor) continue;
        if (*xa == *yb && *xb == *ya) out.push_back(EdgeConflict{x.agent(), y.agent(), *xa, *xb, t});
      }
    }
  for (auto& c : detect_elevator_conflicts(timelines, graph))
    std::visit([&](auto& e) { out.push_back(e); }, c);

  std::stable_sort(out.begin(), out.end(), [](const Conflict& p, const Conflict& q) {
    const auto [pa, pb] = conflict_agents(p);
    const auto [qa, qb] = conflict_agents(q);
    return std::make_tuple(conflict_time(p), p.index(), pa, pb) < std::make_tuple(conflict_time(q), q.index(), qa, qb);
  });
  return out;
}

std::vector<Conflict> detect_conflicts(std::span<const Path> paths, const MultiFloorGraph& graph) {
  std::vector<Timeline> timelines;
  timelines.reserve(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) timelines.emplace_back(paths[i], graph, static_cast<int>(i));
  return detect_conflicts(timelines, graph);
}

ValidationReport validate(const Instance& instance, std::span<const Path> paths) {
  ValidationReport report;
  if (static_cast<int>(paths.size()) != instance.num_agents()) {
    report.invalid.push_back("plan has " + std::to_string(paths.size()) + " paths for " +
                             std::to_string(instance.num_agents()) + " agents");
    return report;
  }
  for (std::size_t i = 0; i < paths.size(); ++i)
    if (auto err = check_path(paths[i], instance.agent(static_cast<int>(i)), instance.graph()))
      report.invalid.push_back("agent " + std::to_string(i) + ": " + *err);
  if (report.invalid.empty()) report.conflicts = detect_conflicts(paths, instance.graph());
  return report;
}

std::pair<AgentConstraint, AgentConstraint> branch_constraints(const MultiFloorGraph& graph, const Conflict& c,
                                                               bool ec_enabled) {
  if (const auto* v = std::get_if<VertexConflict>(&c))
    return {AgentConstraint{v->i, VertexBan{v->v, {v->t, v->t}}}, AgentConstraint{v->j, VertexBan{v->v, {v->t, v->t}}}};
  if (const auto* e = std::get_if<EdgeConflict>(&c))
    return {AgentConstraint{e->i, EdgeBan{e->from, e->to, e->t}}, AgentConstraint{e->j, EdgeBan{e->to, e->from, e->t}}};
  if (const auto* b = std::get_if<BoardingConflict>(&c))
    return ec_enabled ? ec_constraints(graph, *b) : single_step_boarding_constraints(*b);
  return occupancy_constraints(graph, std::get<OccupancyConflict>(c));
}

}  // namespace mapfe
