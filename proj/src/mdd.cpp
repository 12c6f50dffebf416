#include "mapfe/mdd.hpp"

#include <algorithm>
#include <cstdlib>
#include <unordered_map>

namespace mapfe {
namespace {

std::uint64_t node_key(int vertex_index, int elevator, Time board_time) {
  return (static_cast<std::uint64_t>(vertex_index) << 40) ^ (static_cast<std::uint64_t>(elevator + 1) << 24) ^
         static_cast<std::uint64_t>(board_time + 1);
}

bool adjacent_same_floor(const Vertex& a, const Vertex& b) {
  return a.floor == b.floor && std::abs(a.x - b.x) + std::abs(a.y - b.y) == 1;
}

}  // namespace

Mdd::Mdd(const MultiFloorGraph& graph, const Agent& agent, Time cost)
    : graph_(&graph), agent_(agent), cost_(cost), levels_(static_cast<std::size_t>(std::max<Time>(cost, 0)) + 1) {}

std::size_t Mdd::node_count() const {
  std::size_t n = 0;
  for (const auto& l : levels_) n += l.size();
  return n;
}

int Mdd::find(const Vertex& v, Time t, int elevator, Time board_time) const {
  if (t < 0 || t > cost_) return -1;
  const auto& l = level(t);
  for (std::size_t i = 0; i < l.size(); ++i)
    if (l[i].v == v && l[i].elevator == elevator && l[i].board_time == board_time) return static_cast<int>(i);
  return -1;
}

std::vector<Vertex> Mdd::vertices_at(Time t) const {
  std::vector<Vertex> out;
  for (const auto& n : level(t))
    if (!in_transit(n, t)) out.push_back(n.v);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Time Mdd::exit_time(const MddNode& n) const {
  if (n.elevator < 0) return -1;
  return n.board_time + ride_duration(graph_->elevator(n.elevator), agent_.start.floor, agent_.goal.floor);
}

bool Mdd::in_transit(const MddNode& n, Time t) const {
  return n.elevator >= 0 && t > n.board_time && t < exit_time(n);
}

std::optional<ElevatorUsage> Mdd::usage(const MddNode& n) const {
  if (n.elevator < 0) return std::nullopt;
  return ElevatorUsage{agent_.id, n.elevator, n.board_time, agent_.start.floor, agent_.goal.floor, exit_time(n)};
}

void Mdd::link() {
  for (auto& l : levels_)
    for (auto& n : l) n.parents.clear();
  for (std::size_t t = 0; t + 1 < levels_.size(); ++t)
    for (std::size_t i = 0; i < levels_[t].size(); ++i)
      for (int c : levels_[t][i].children)
        levels_[t + 1][static_cast<std::size_t>(c)].parents.push_back(static_cast<int>(i));
}

Mdd Mdd::pruned(const std::vector<std::vector<char>>& keep_node,
                const std::vector<std::vector<std::vector<char>>>& keep_edge) const {
  const std::size_t depth = levels_.size();
  std::vector<std::vector<char>> reach(depth), alive(depth);
  for (std::size_t t = 0; t < depth; ++t) {
    reach[t].assign(levels_[t].size(), 0);
    alive[t].assign(levels_[t].size(), 0);
  }
  if (!levels_.front().empty() && keep_node[0][0]) reach[0][0] = 1;
  for (std::size_t t = 0; t + 1 < depth; ++t)
    for (std::size_t i = 0; i < levels_[t].size(); ++i) {
      if (!reach[t][i]) continue;
      const auto& kids = levels_[t][i].children;
      for (std::size_t e = 0; e < kids.size(); ++e) {
        const auto c = static_cast<std::size_t>(kids[e]);
        if (keep_edge[t][i][e] && keep_node[t + 1][c]) reach[t + 1][c] = 1;
      }
    }
  alive[depth - 1] = reach[depth - 1];
  for (std::size_t t = depth - 1; t-- > 0;)
    for (std::size_t i = 0; i < levels_[t].size(); ++i) {
      if (!reach[t][i]) continue;
      const auto& kids = levels_[t][i].children;
      for (std::size_t e = 0; e < kids.size(); ++e)
        if (keep_edge[t][i][e] && alive[t + 1][static_cast<std::size_t>(kids[e])]) {
          alive[t][i] = 1;
          break;
        }
    }

  Mdd out(*graph_, agent_, cost_);
  if (levels_.front().empty() || !alive[0][0]) {
    for (auto& l : out.levels_) l.clear();
    return out;
  }
  std::vector<std::vector<int>> remap(depth);
  for (std::size_t t = 0; t < depth; ++t) {
    remap[t].assign(levels_[t].size(), -1);
    for (std::size_t i = 0; i < levels_[t].size(); ++i)
      if (alive[t][i]) {
        remap[t][i] = static_cast<int>(out.levels_[t].size());
        const auto& src = levels_[t][i];
        out.levels_[t].push_back(MddNode{src.v, src.elevator, src.board_time, {}, {}});
      }
  }
  for (std::size_t t = 0; t + 1 < depth; ++t)
    for (std::size_t i = 0; i < levels_[t].size(); ++i) {
      if (remap[t][i] < 0) continue;
      auto& dst = out.levels_[t][static_cast<std::size_t>(remap[t][i])];
      const auto& kids = levels_[t][i].children;
      for (std::size_t e = 0; e < kids.size(); ++e) {
        const int c = remap[t + 1][static_cast<std::size_t>(kids[e])];
        if (keep_edge[t][i][e] && c >= 0) dst.children.push_back(c);
      }
    }
  out.link();
  return out;
}

Mdd Mdd::restricted(std::span<const Constraint> extra) const {
  std::vector<std::vector<char>> keep_node(levels_.size());
  std::vector<std::vector<std::vector<char>>> keep_edge(levels_.size());
  for (std::size_t t = 0; t < levels_.size(); ++t) {
    keep_node[t].assign(levels_[t].size(), 1);
    keep_edge[t].resize(levels_[t].size());
    for (std::size_t i = 0; i < levels_[t].size(); ++i) keep_edge[t][i].assign(levels_[t][i].children.size(), 1);
  }
  auto drop_all = [&] {
    Mdd out(*graph_, agent_, cost_);
    for (auto& l : out.levels_) l.clear();
    return out;
  };

  for (const auto& c : extra) {
    if (const auto* vb = std::get_if<VertexBan>(&c)) {
      if (vb->v == agent_.goal && vb->when.hi >= cost_) return drop_all();  // parked at the goal from cost_ on
      for (Time t = std::max<Time>(vb->when.lo, 0); t <= std::min(vb->when.hi, cost_); ++t)
        for (std::size_t i = 0; i < levels_[static_cast<std::size_t>(t)].size(); ++i) {
          const auto& n = levels_[static_cast<std::size_t>(t)][i];
          if (n.v == vb->v && !in_transit(n, t)) keep_node[static_cast<std::size_t>(t)][i] = 0;
        }
    } else if (const auto* eb = std::get_if<EdgeBan>(&c)) {
      const Time t = eb->departure;
      if (t < 0 || t >= cost_) continue;
      const auto& l = levels_[static_cast<std::size_t>(t)];
      for (std::size_t i = 0; i < l.size(); ++i) {
        if (l[i].v != eb->from || in_transit(l[i], t)) continue;
        for (std::size_t e = 0; e < l[i].children.size(); ++e) {
          const auto& child = levels_[static_cast<std::size_t>(t + 1)][static_cast<std::size_t>(l[i].children[e])];
          if (child.v == eb->to && !in_transit(child, t + 1) && adjacent_same_floor(l[i].v, child.v))
            keep_edge[static_cast<std::size_t>(t)][i][e] = 0;
        }
      }
    } else {
      const auto& bb = std::get<BoardingBan>(c);
      for (Time t = std::max<Time>(bb.when.lo, 0); t <= std::min(bb.when.hi, cost_); ++t)
        for (std::size_t i = 0; i < levels_[static_cast<std::size_t>(t)].size(); ++i) {
          const auto& n = levels_[static_cast<std::size_t>(t)][i];
          if (n.elevator == bb.elevator && n.board_time == t && n.v.floor == bb.floor)
            keep_node[static_cast<std::size_t>(t)][i] = 0;
        }
    }
  }
  return pruned(keep_node, keep_edge);
}

Path Mdd::to_path(std::span<const int> indices) const {
  Path p;
  for (Time t = 0; t <= cost_; ++t) {
    const auto& n = node(t, indices[static_cast<std::size_t>(t)]);
    if (in_transit(n, t)) {
      if ((t - n.board_time) % graph_->elevator(n.elevator).t_floor == 0) p.steps.push_back({n.v, t});
    } else {
      p.steps.push_back({n.v, t});
    }
  }
  return p;
}

std::optional<Path> Mdd::first_path() const {
  if (empty()) return std::nullopt;
  std::vector<int> idx{0};
  for (Time t = 0; t < cost_; ++t) idx.push_back(node(t, idx.back()).children.front());
  return to_path(idx);
}

std::vector<Path> Mdd::all_paths(std::size_t limit) const {
  std::vector<Path> out;
  if (empty()) return out;
  std::vector<int> idx{0};
  auto dfs = [&](auto&& self, Time t) -> void {
    if (out.size() >= limit) return;
    if (t == cost_) {
      out.push_back(to_path(idx));
      return;
    }
    for (int c : node(t, idx.back()).children) {
      idx.push_back(c);
      self(self, t + 1);
      idx.pop_back();
    }
  };
  dfs(dfs, 0);
  return out;
}

Mdd Mdd::from_path(const MultiFloorGraph& graph, const Agent& agent, const Path& path) {
  Mdd m(graph, agent, path.cost());
  const Timeline timeline(path, graph, agent.id);
  const auto& u = timeline.usage();
  for (Time t = 0; t <= path.cost(); ++t) {
    MddNode n;
    if (u && t >= u->board_time) {
      n.elevator = u->elevator;
      n.board_time = u->board_time;
    }
    if (timeline.in_transit(t)) {
      const int dir = u->exit_floor > u->board_floor ? 1 : -1;
      const int passed = (t - u->board_time) / graph.elevator(u->elevator).t_floor;
      n.v = graph.door(u->elevator, u->board_floor + dir * passed);
    } else {
      n.v = *timeline.at(t);
    }
    if (t < path.cost()) n.children.push_back(0);
    m.levels_[static_cast<std::size_t>(t)].push_back(std::move(n));
  }
  m.link();
  return m;
}

Mdd build_mdd_e(const Agent& agent, Time d, const ConstraintSet& constraints, const MultiFloorGraph& graph,
                const GoalDistance& distance, std::size_t node_cap) {
  Mdd m(graph, agent, d);
  auto clear = [&] {
    for (auto& l : m.levels_) l.clear();
  };
  if (d < 0 || constraints.vertex_banned(agent.start, 0) || !constraints.goal_free_from(agent.goal, d)) {
    clear();
    return m;
  }
  const int lg = agent.goal.floor;
  const int ls = agent.start.floor;
  auto ride_of = [&](int k) { return ride_duration(graph.elevator(k), ls, lg); };
  auto remaining = [&](const Vertex& v, int k, Time ts, Time t) -> Time {
    if (k >= 0 && t < ts + ride_of(k)) {
      const Time tail = distance(graph.door(k, lg), true);
      return tail >= kTimeInfinity ? kTimeInfinity : ts + ride_of(k) - t + tail;
    }
    return distance(v, k >= 0);
  };

  m.levels_[0].push_back(MddNode{agent.start, -1, -1, {}, {}});
  std::size_t total = 1;
  for (Time t = 0; t < d; ++t) {
    auto& next = m.levels_[static_cast<std::size_t>(t + 1)];
    std::unordered_map<std::uint64_t, int> index;
    auto add = [&](MddNode& parent, const Vertex& v, int k, Time ts) {
      const Time rem = remaining(v, k, ts, t + 1);
      if (rem >= kTimeInfinity || t + 1 + rem > d) return;
      const auto key = node_key(graph.index(v), k, ts);
      auto [it, fresh] = index.emplace(key, static_cast<int>(next.size()));
      if (fresh) {
        next.push_back(MddNode{v, k, ts, {}, {}});
        ++total;
      }
      parent.children.push_back(it->second);
    };
    auto& current = m.levels_[static_cast<std::size_t>(t)];
    for (std::size_t i = 0; i < current.size(); ++i) {
      // `add` may grow `next` but never `current`, so this reference stays valid.
      MddNode& n = current[i];
      const int k = n.elevator;
      if (k >= 0 && t < n.board_time + ride_of(k)) {
        const Elevator& e = graph.elevator(k);
        const int dir = lg > ls ? 1 : -1;
        const Time exit = n.board_time + ride_of(k);
        const Vertex v = graph.door(k, ls + dir * ((t + 1 - n.board_time) / e.t_floor));
        if (t + 1 == exit && constraints.vertex_banned(v, t + 1)) continue;
        add(n, v, k, n.board_time);
        continue;
      }
      const bool rode = k >= 0;
      for (const auto& nb : graph.neighbors(n.v, rode)) {
        if (nb.kind == MoveKind::Board) continue;
        if (constraints.vertex_banned(nb.to, t + 1)) continue;
        if (nb.kind == MoveKind::Move && constraints.edge_banned(n.v, nb.to, t)) continue;
        add(n, nb.to, k, n.board_time);
        if (!rode && agent.needs_elevator() && nb.to.floor == ls) {
          const int door = graph.elevator_at(nb.to);
          if (door >= 0 && !constraints.boarding_banned(door, ls, t + 1)) add(n, nb.to, door, t + 1);
        }
      }
    }
    if (total > node_cap) {
      clear();
      m.overflow_ = true;
      return m;
    }
  }

  // Final level: only goal nodes with the right ride history survive `remaining`.
  std::vector<std::vector<char>> keep_node(m.levels_.size());
  std::vector<std::vector<std::vector<char>>> keep_edge(m.levels_.size());
  for (std::size_t t = 0; t < m.levels_.size(); ++t) {
    keep_node[t].assign(m.levels_[t].size(), 1);
    keep_edge[t].resize(m.levels_[t].size());
    for (std::size_t i = 0; i < m.levels_[t].size(); ++i)
      keep_edge[t][i].assign(m.levels_[t][i].children.size(), 1);
  }
  for (std::size_t i = 0; i < m.levels_.back().size(); ++i)
    if (m.levels_.back()[i].v != agent.goal) keep_node.back()[i] = 0;
  return m.pruned(keep_node, keep_edge);
}

Mdd build_mdd_e(const Agent& agent, Time d, const ConstraintSet& constraints, const MultiFloorGraph& graph,
                std::size_t node_cap) {
  return build_mdd_e(agent, d, constraints, graph, GoalDistance(graph, agent), node_cap);
}

namespace {

struct JointView {
  const Mdd& mdd;
  const MddNode& node;
  Time t;  // current time, possibly past the MDD's last level
  bool transit() const { return t <= mdd.cost() && mdd.in_transit(node, t); }
};

/// Does agent `y` stand at a door of `x`'s car while that car is busy?
bool door_blocked(const JointView& x, const JointView& y, const MultiFloorGraph& graph) {
  const auto ux = x.mdd.usage(x.node);
  if (!ux) return false;
  const auto uy = y.mdd.usage(y.node);
  if (uy && uy->elevator == ux->elevator && y.t <= uy->exit_time) return false;  // boarding overlap handles riders
  if (y.transit() || graph.elevator_at(y.node.v) != ux->elevator) return false;
  return y.t <= door_busy_until(graph.elevator(ux->elevator), *ux, y.node.v.floor);
}

bool pair_conflict(const JointView& a, const JointView& b, const MultiFloorGraph& graph, JointMode mode) {
  if (!a.transit() && !b.transit() && a.node.v == b.node.v) return true;
  if (mode == JointMode::Plain) return false;
  const auto ua = a.mdd.usage(a.node);
  const auto ub = b.mdd.usage(b.node);
  if (ua && ub && ua->elevator == ub->elevator && usages_overlap(graph.elevator(ua->elevator), *ua, *ub)) return true;
  return door_blocked(a, b, graph) || door_blocked(b, a, graph);
}

bool swap_conflict(const JointView& a0, const JointView& a1, const JointView& b0, const JointView& b1) {
  if (a0.transit() || a1.transit() || b0.transit() || b1.transit()) return false;
  return adjacent_same_floor(a0.node.v, a1.node.v) && a0.node.v == b1.node.v && a1.node.v == b0.node.v;
}

}  // namespace

JointMdd build_joint(const Mdd& first, const Mdd& second, const MultiFloorGraph& graph, JointMode mode) {
  JointMdd j;
  j.a_ = &first;
  j.b_ = &second;
  if (first.empty() || second.empty()) return j;
  const Time depth = std::max(first.cost(), second.cost());
  j.levels_.resize(static_cast<std::size_t>(depth) + 1);

  auto view = [](const Mdd& m, int idx, Time t) { return JointView{m, m.node(std::min(t, m.cost()), idx), t}; };
  auto kids = [](const Mdd& m, int idx, Time t) -> std::vector<int> {
    if (t >= m.cost()) return {idx};
    return m.node(t, idx).children;
  };

  if (!pair_conflict(view(first, 0, 0), view(second, 0, 0), graph, mode)) j.levels_[0].push_back(JointNode{0, 0, {}, {}});
  for (Time t = 0; t < depth; ++t) {
    auto& next = j.levels_[static_cast<std::size_t>(t + 1)];
    std::unordered_map<std::uint64_t, int> index;
    auto& current = j.levels_[static_cast<std::size_t>(t)];
    for (std::size_t p = 0; p < current.size(); ++p) {
      const int ia = current[p].first;
      const int ib = current[p].second;
      const auto a0 = view(first, ia, t);
      const auto b0 = view(second, ib, t);
      for (int ca : kids(first, ia, t)) {
        const auto a1 = view(first, ca, t + 1);
        for (int cb : kids(second, ib, t)) {
          const auto b1 = view(second, cb, t + 1);
          if (pair_conflict(a1, b1, graph, mode) || swap_conflict(a0, a1, b0, b1)) continue;
          const auto key = (static_cast<std::uint64_t>(ca) << 32) | static_cast<std::uint32_t>(cb);
          auto [it, fresh] = index.emplace(key, static_cast<int>(next.size()));
          if (fresh) next.push_back(JointNode{ca, cb, {}, {}});
          current[p].children.push_back(it->second);
          next[static_cast<std::size_t>(it->second)].parents.push_back(static_cast<int>(p));
        }
      }
    }
  }
  return j;
}

bool JointMdd::contains(Time t, const Vertex& v1, const Vertex& v2) const {
  if (t < 0 || t > depth()) return false;
  for (const auto& n : level(t)) {
    const auto& x = a_->node(std::min(t, a_->cost()), n.first);
    const auto& y = b_->node(std::min(t, b_->cost()), n.second);
    if (x.v == v1 && y.v == v2) return true;
  }
  return false;
}

std::optional<std::pair<Path, Path>> JointMdd::extract() const {
  if (!complete()) return std::nullopt;
  // Walk back from the first final pair; every stored pair is forward-reachable.
  std::vector<int> chain(levels_.size());
  chain.back() = 0;
  for (std::size_t t = levels_.size() - 1; t > 0; --t)
    chain[t - 1] = levels_[t][static_cast<std::size_t>(chain[t])].parents.front();
  std::vector<int> ia, ib;
  for (std::size_t t = 0; t < levels_.size(); ++t) {
    const auto& n = levels_[t][static_cast<std::size_t>(chain[t])];
    if (static_cast<Time>(t) <= a_->cost()) ia.push_back(n.first);
    if (static_cast<Time>(t) <= b_->cost()) ib.push_back(n.second);
  }
  return std::make_pair(a_->to_path(ia), b_->to_path(ib));
}

}  // namespace mapfe
