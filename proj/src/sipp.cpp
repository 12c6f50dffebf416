#include "mapfe/sipp.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <queue>
#include <unordered_map>

#include "mapfe/elevator.hpp"

namespace mapfe {
namespace {

/// Unit-cost BFS over one floor from weighted sources.
std::vector<Time> floor_distances(const MultiFloorGraph& graph, int floor, std::vector<std::pair<Cell, Time>> sources) {
  const int w = graph.width();
  std::vector<Time> dist(static_cast<std::size_t>(w * graph.height()), kTimeInfinity);
  using Item = std::pair<Time, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  for (const auto& [c, d] : sources) {
    auto& slot = dist[static_cast<std::size_t>(c.y * w + c.x)];
    if (d < slot) {
      slot = d;
      open.push({d, c.y * w + c.x});
    }
  }
  while (!open.empty()) {
    const auto [d, id] = open.top();
    open.pop();
    if (d > dist[static_cast<std::size_t>(id)]) continue;
    const Vertex v{floor, id % w, id / w};
    for (const auto& n : graph.neighbors(v, true)) {
      if (n.kind != MoveKind::Move) continue;
      const int nid = n.to.y * w + n.to.x;
      if (d + 1 < dist[static_cast<std::size_t>(nid)]) {
        dist[static_cast<std::size_t>(nid)] = d + 1;
        open.push({d + 1, nid});
      }
    }
  }
  return dist;
}

struct SearchNode {
  Vertex v;
  int interval = 0;
  bool rode = false;
  Time g = 0;  // arrival time
  Time f = 0;
  int parent = -1;
  MoveKind via = MoveKind::Wait;
  int elevator = -1;
  Time cost = 0;  // duration of the move that produced this node
};

}  // namespace

GoalDistance::GoalDistance(const MultiFloorGraph& graph, const Agent& agent) : graph_(&graph), agent_(agent) {
  on_goal_floor_ = floor_distances(graph, agent.goal.floor, {{agent.goal.cell(), 0}});
  if (agent.needs_elevator()) {
    std::vector<std::pair<Cell, Time>> doors;
    for (const auto& e : graph.elevators()) {
      const Time tail = on_goal_floor_[static_cast<std::size_t>(e.cell.y * graph.width() + e.cell.x)];
      if (tail >= kTimeInfinity) continue;
      doors.push_back({e.cell, ride_duration(e, agent.start.floor, agent.goal.floor) + tail});
    }
    on_start_floor_ = floor_distances(graph, agent.start.floor, std::move(doors));
  }
}

Time GoalDistance::operator()(const Vertex& v, bool rode) const {
  const auto cell = static_cast<std::size_t>(v.y * graph_->width() + v.x);
  if (!agent_.needs_elevator()) return (v.floor == agent_.goal.floor && !rode) ? on_goal_floor_[cell] : kTimeInfinity;
  if (rode) return v.floor == agent_.goal.floor ? on_goal_floor_[cell] : kTimeInfinity;
  return v.floor == agent_.start.floor ? on_start_floor_[cell] : kTimeInfinity;
}

LowLevelPlanner::LowLevelPlanner(const MultiFloorGraph& graph, const Agent& agent)
    : graph_(&graph), agent_(agent), distance_(graph, agent) {}

std::optional<Path> LowLevelPlanner::plan(const ConstraintSet& constraints) const {
  const MultiFloorGraph& graph = *graph_;
  std::unordered_map<int, std::vector<Interval>> interval_cache;
  auto intervals_of = [&](const Vertex& v) -> const std::vector<Interval>& {
    const int id = graph.index(v);
    auto it = interval_cache.find(id);
    if (it == interval_cache.end()) it = interval_cache.emplace(id, safe_intervals(v, constraints)).first;
    return it->second;
  };

  std::vector<SearchNode> nodes;
  std::unordered_map<std::uint64_t, Time> best;
  auto key_of = [&](const Vertex& v, int interval, bool rode) {
    return (static_cast<std::uint64_t>(graph.index(v)) << 32) | (static_cast<std::uint64_t>(interval) << 1) |
           (rode ? 1u : 0u);
  };
  auto worse = [&](int a, int b) {
    const auto& x = nodes[static_cast<std::size_t>(a)];
    const auto& y = nodes[static_cast<std::size_t>(b)];
    if (x.f != y.f) return x.f > y.f;
    if (x.g != y.g) return x.g < y.g;
    if (x.v != y.v) return y.v < x.v;
    if (x.interval != y.interval) return x.interval > y.interval;
    return x.rode && !y.rode;
  };
  std::priority_queue<int, std::vector<int>, decltype(worse)> open(worse);

  auto push = [&](SearchNode n) {
    const Time h = distance_(n.v, n.rode);
    if (h >= kTimeInfinity) return;
    const auto key = key_of(n.v, n.interval, n.rode);
    auto it = best.find(key);
    if (it != best.end() && it->second <= n.g) return;
    best[key] = n.g;
    n.f = n.g + h;
    nodes.push_back(n);
    open.push(static_cast<int>(nodes.size()) - 1);
  };

  const auto& start_intervals = intervals_of(agent_.start);
  if (start_intervals.empty() || start_intervals.front().lo != 0) return std::nullopt;
  push(SearchNode{agent_.start, 0, false, 0, 0, -1, MoveKind::Wait, -1, 0});

  int goal_node = -1;
  while (!open.empty()) {
    const int idx = open.top();
    open.pop();
    const SearchNode cur = nodes[static_cast<std::size_t>(idx)];
    if (best[key_of(cur.v, cur.interval, cur.rode)] < cur.g) continue;
    const Interval here = intervals_of(cur.v)[static_cast<std::size_t>(cur.interval)];
    if (cur.v == agent_.goal && cur.rode == agent_.needs_elevator() && here.hi >= kTimeInfinity) {
      goal_node = idx;
      break;
    }

    for (const auto& n : graph.neighbors(cur.v, cur.rode)) {
      if (n.kind == MoveKind::Wait) continue;
      if (n.kind == MoveKind::Board && (!agent_.needs_elevator() || n.to.floor != agent_.goal.floor)) continue;
      const auto& targets = intervals_of(n.to);
      for (std::size_t j = 0; j < targets.size(); ++j) {
        const Interval& next = targets[j];
        if (next.lo > here.hi + n.cost) break;
        if (next.hi < cur.g + n.cost) continue;
        Time depart = std::max(cur.g, next.lo - n.cost);
        const Time last = std::min(here.hi, next.hi - n.cost);
        if (n.kind == MoveKind::Move) {
          while (depart <= last && constraints.edge_banned(cur.v, n.to, depart)) ++depart;
        } else {
          for (const auto& ban : constraints.boarding_bans(n.elevator, cur.v.floor)) {
            if (ban.hi < depart) continue;
            if (ban.lo > depart) break;
            depart = ban.hi >= kTimeInfinity ? kTimeInfinity : ban.hi + 1;
          }
        }
        if (depart > last) continue;
        push(SearchNode{n.to, static_cast<int>(j), cur.rode || n.kind == MoveKind::Board, depart + n.cost, 0, idx,
                        n.kind, n.elevator, n.cost});
      }
    }
  }
  if (goal_node < 0) return std::nullopt;

  std::vector<SearchNode> chain;
  for (int i = goal_node; i >= 0; i = nodes[static_cast<std::size_t>(i)].parent)
    chain.push_back(nodes[static_cast<std::size_t>(i)]);
  std::reverse(chain.begin(), chain.end());

  // Shift each arrival as late as its successor's departure allows, so the
  // agent waits at earlier vertices instead of next to its next move.
  std::vector<Time> arrive(chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) arrive[i] = chain[i].g;
  for (std::size_t i = chain.size() - 1; i-- > 1;) {
    const Time upper = arrive[i + 1] - chain[i + 1].cost;
    const Interval parent_iv = intervals_of(chain[i - 1].v)[static_cast<std::size_t>(chain[i - 1].interval)];
    for (Time a = upper; a > arrive[i]; --a) {
      const Time depart = a - chain[i].cost;
      if (depart > parent_iv.hi) continue;
      const bool banned = chain[i].via == MoveKind::Move
                              ? constraints.edge_banned(chain[i - 1].v, chain[i].v, depart)
                              : constraints.boarding_banned(chain[i].elevator, chain[i - 1].v.floor, depart);
      if (banned) continue;
      arrive[i] = a;
      break;
    }
  }

  Path path;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const Time leave = i + 1 < chain.size() ? arrive[i + 1] - chain[i + 1].cost : arrive[i];
    for (Time t = arrive[i]; t <= leave; ++t) path.steps.push_back({chain[i].v, t});
    if (i + 1 < chain.size() && chain[i + 1].via == MoveKind::Board) {
      const Elevator& e = graph.elevator(chain[i + 1].elevator);
      const int dir = chain[i + 1].v.floor > chain[i].v.floor ? 1 : -1;
      for (int f = chain[i].v.floor + dir, n = 1; f != chain[i + 1].v.floor; f += dir, ++n)
        path.steps.push_back({graph.door(e.id, f), leave + n * e.t_floor});
    }
  }
  return path;
}

std::optional<Path> plan(const Agent& agent, const MultiFloorGraph& graph, const ConstraintSet& constraints) {
  return LowLevelPlanner(graph, agent).plan(constraints);
}

}  // namespace mapfe
