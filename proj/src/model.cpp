#include "mapfe/model.hpp"

#include <cstdlib>
#include <ostream>
#include <set>
#include <sstream>

namespace mapfe {

std::ostream& operator<<(std::ostream& os, const Vertex& v) {
  return os << '(' << v.floor << ',' << v.x << ',' << v.y << ')';
}

FloorGrid::FloorGrid(int w, int h) : width(w), height(h) {
  if (w <= 0 || h <= 0) throw InvalidInstance("floor grid dimensions must be positive");
  blocked.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
}

MultiFloorGraph::MultiFloorGraph(std::vector<FloorGrid> grids, std::vector<Elevator> elevators)
    : grids_(std::move(grids)), elevators_(std::move(elevators)) {
  if (grids_.empty()) throw InvalidInstance("graph needs at least one floor");
  width_ = grids_.front().width;
  height_ = grids_.front().height;
  if (width_ <= 0 || height_ <= 0) throw InvalidInstance("floor grid dimensions must be positive");
  for (const auto& g : grids_) {
    if (g.width != width_ || g.height != height_)
      throw InvalidInstance("all floors must share one width and height");
    if (g.blocked.size() != static_cast<std::size_t>(width_ * height_))
      throw InvalidInstance("floor grid storage does not match its dimensions");
  }
  door_of_cell_.assign(static_cast<std::size_t>(width_ * height_), -1);
  for (std::size_t k = 0; k < elevators_.size(); ++k) {
    const auto& e = elevators_[k];
    if (e.id != static_cast<int>(k)) throw InvalidInstance("elevator ids must be 0..K-1 in order");
    if (e.t_floor < 1) throw InvalidInstance("elevator t_floor must be at least 1");
    if (e.cell.x < 0 || e.cell.y < 0 || e.cell.x >= width_ || e.cell.y >= height_)
      throw InvalidInstance("elevator cell out of bounds");
    auto& slot = door_of_cell_[static_cast<std::size_t>(e.cell.y * width_ + e.cell.x)];
    if (slot >= 0) throw InvalidInstance("two elevators share a cell");
    slot = e.id;
    for (const auto& g : grids_)
      if (g.is_blocked(e.cell.x, e.cell.y)) throw InvalidInstance("elevator cell is blocked on some floor");
  }
}

int MultiFloorGraph::elevator_at(const Cell& c) const {
  if (c.x < 0 || c.y < 0 || c.x >= width_ || c.y >= height_) return -1;
  return door_of_cell_[static_cast<std::size_t>(c.y * width_ + c.x)];
}

std::vector<Neighbor> MultiFloorGraph::neighbors(const Vertex& v, bool rode_elevator) const {
  std::vector<Neighbor> out;
  out.push_back({v, 1, MoveKind::Wait, -1});
  static constexpr int dx[] = {0, 1, 0, -1};
  static constexpr int dy[] = {-1, 0, 1, 0};
  for (int d = 0; d < 4; ++d) {
    Vertex u{v.floor, v.x + dx[d], v.y + dy[d]};
    if (is_free(u)) out.push_back({u, 1, MoveKind::Move, -1});
  }
  const int k = elevator_at(v);
  if (k >= 0 && !rode_elevator) {
    const Time tf = elevator(k).t_floor;
    for (int f = 1; f <= floors(); ++f) {
      if (f == v.floor) continue;
      out.push_back({door(k, f), static_cast<Time>(std::abs(f - v.floor)) * tf, MoveKind::Board, k});
    }
  }
  return out;
}

Instance::Instance(MultiFloorGraph graph, std::vector<Agent> agents)
    : graph_(std::move(graph)), agents_(std::move(agents)) {
  std::set<Vertex> starts;
  std::set<Vertex> goals;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const auto& a = agents_[i];
    std::ostringstream who;
    who << "agent " << i << ": ";
    if (a.id != static_cast<int>(i)) throw InvalidInstance(who.str() + "agent ids must be 0..N-1 in order");
    for (const Vertex* v : {&a.start, &a.goal}) {
      if (!graph_.in_bounds(*v)) throw InvalidInstance(who.str() + "vertex out of bounds");
      if (!graph_.is_free(*v)) throw InvalidInstance(who.str() + "vertex is blocked");
      if (graph_.is_door(*v)) throw InvalidInstance(who.str() + "start/goal may not be an elevator cell");
    }
    if (!starts.insert(a.start).second) throw InvalidInstance(who.str() + "duplicate start");
    if (!goals.insert(a.goal).second) throw InvalidInstance(who.str() + "duplicate goal");
    if (a.needs_elevator() && graph_.elevators().empty())
      throw InvalidInstance(who.str() + "changes floor but the map has no elevator");
  }
}

}  // namespace mapfe
