#include "mapfe/oracle.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <queue>
#include <string>
#include <unordered_map>

namespace mapfe {
namespace {

struct AgentState {
  std::int16_t pos = 0;        // vertex index; while riding, the last door passed
  std::int16_t ride_left = 0;  // steps until the car reaches the goal floor
  std::uint8_t rode = 0;
  std::uint8_t done = 0;
};

struct CarState {
  std::uint8_t used = 0;
  std::int16_t exit_in = 0;  // last drop-off time minus the current time
  std::int16_t exit_floor = 0;
};

struct JointState {
  std::vector<AgentState> agents;
  std::vector<CarState> cars;
};

std::string encode(const JointState& s) {
  std::string out;
  out.reserve(s.agents.size() * 6 + s.cars.size() * 5);
  auto put = [&](const void* p, std::size_t n) { out.append(static_cast<const char*>(p), n); };
  for (const auto& a : s.agents) {
    put(&a.pos, 2);
    put(&a.ride_left, 2);
    put(&a.rode, 1);
    put(&a.done, 1);
  }
  for (const auto& c : s.cars) {
    put(&c.used, 1);
    put(&c.exit_in, 2);
    put(&c.exit_floor, 2);
  }
  return out;
}

JointState decode(const std::string& key, std::size_t agents, std::size_t cars) {
  JointState s;
  s.agents.resize(agents);
  s.cars.resize(cars);
  const char* p = key.data();
  auto get = [&](void* dst, std::size_t n) {
    std::memcpy(dst, p, n);
    p += n;
  };
  for (auto& a : s.agents) {
    get(&a.pos, 2);
    get(&a.ride_left, 2);
    get(&a.rode, 1);
    get(&a.done, 1);
  }
  for (auto& c : s.cars) {
    get(&c.used, 1);
    get(&c.exit_in, 2);
    get(&c.exit_floor, 2);
  }
  return s;
}

/// Ride-aware distance to goal, computed without the planner module.
struct Heuristic {
  std::vector<Time> standing_unridden;  // per vertex
  std::vector<Time> standing_ridden;    // per vertex
  Time after_ride = 0;                  // unused when the agent stays on one floor

  Time operator()(const MultiFloorGraph& g, const AgentState& a, const Agent& agent) const {
    if (a.done) return 0;
    if (a.ride_left > 0) {
      const Vertex door = g.vertex(a.pos);
      return a.ride_left + standing_ridden[static_cast<std::size_t>(g.index({agent.goal.floor, door.x, door.y}))];
    }
    return (a.rode ? standing_ridden : standing_unridden)[static_cast<std::size_t>(a.pos)];
  }
};

Heuristic make_heuristic(const MultiFloorGraph& g, const Agent& agent) {
  const auto n = static_cast<std::size_t>(g.num_vertices());
  Heuristic h;
  h.standing_ridden.assign(n, kTimeInfinity);
  h.standing_unridden.assign(n, kTimeInfinity);
  auto dijkstra = [&](std::vector<Time>& dist, int floor) {
    using Item = std::pair<Time, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    for (int x = 0; x < g.width(); ++x)
      for (int y = 0; y < g.height(); ++y) {
        const int id = g.index({floor, x, y});
        if (dist[static_cast<std::size_t>(id)] < kTimeInfinity) open.push({dist[static_cast<std::size_t>(id)], id});
      }
    const int dx[] = {1, -1, 0, 0};
    const int dy[] = {0, 0, 1, -1};
    while (!open.empty()) {
      const auto [d, id] = open.top();
      open.pop();
      if (d > dist[static_cast<std::size_t>(id)]) continue;
      const Vertex v = g.vertex(id);
      for (int m = 0; m < 4; ++m) {
        const Vertex w{v.floor, v.x + dx[m], v.y + dy[m]};
        if (!g.is_free(w)) continue;
        auto& slot = dist[static_cast<std::size_t>(g.index(w))];
        if (d + 1 < slot) {
          slot = d + 1;
          open.push({d + 1, g.index(w)});
        }
      }
    }
  };
  const bool needs = agent.start.floor != agent.goal.floor;
  auto& on_goal_floor = needs ? h.standing_ridden : h.standing_unridden;
  on_goal_floor[static_cast<std::size_t>(g.index(agent.goal))] = 0;
  dijkstra(on_goal_floor, agent.goal.floor);
  if (needs) {
    for (const auto& e : g.elevators()) {
      const Time tail = h.standing_ridden[static_cast<std::size_t>(g.index({agent.goal.floor, e.cell.x, e.cell.y}))];
      if (tail >= kTimeInfinity) continue;
      const Time ride = std::abs(agent.start.floor - agent.goal.floor) * e.t_floor;
      h.standing_unridden[static_cast<std::size_t>(g.index({agent.start.floor, e.cell.x, e.cell.y}))] = ride + tail;
    }
    dijkstra(h.standing_unridden, agent.start.floor);
  }
  return h;
}

struct Option {
  AgentState next;
  int boards = -1;  // elevator boarded at the current time
  bool exits = false;
  bool moved = false;
};

}  // namespace

OracleResult oracle_solve(const Instance& instance, Time horizon, std::size_t state_cap) {
  const MultiFloorGraph& g = instance.graph();
  const std::size_t n = static_cast<std::size_t>(instance.num_agents());
  const std::size_t cars = g.elevators().size();
  std::vector<Heuristic> heuristics;
  for (const auto& a : instance.agents()) heuristics.push_back(make_heuristic(g, a));
  int max_span = 0;
  for (const auto& e : g.elevators()) max_span = std::max(max_span, (g.floors() - 1) * e.t_floor);

  auto h_of = [&](const JointState& s) {
    Time h = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Time d = heuristics[i](g, s.agents[i], instance.agent(static_cast<int>(i)));
      if (d >= kTimeInfinity) return kTimeInfinity;
      h += d;
    }
    return h;
  };
  auto at_goal = [&](const AgentState& a, const Agent& agent) {
    return a.ride_left == 0 && g.vertex(a.pos) == agent.goal && (a.rode != 0) == (agent.start.floor != agent.goal.floor);
  };

  struct Node {
    std::string key;
    int parent;
    Time g;
  };
  std::vector<Node> nodes;
  std::unordered_map<std::string, Time> best;
  using Item = std::tuple<Time, Time, int>;  // f, -g, node
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  OracleResult result;

  auto push = [&](const JointState& s, int parent, Time cost) {
    const Time h = h_of(s);
    if (h >= kTimeInfinity || cost + h > horizon) return;
    std::string key = encode(s);
    auto it = best.find(key);
    if (it != best.end() && it->second <= cost) return;
    best[key] = cost;
    nodes.push_back(Node{std::move(key), parent, cost});
    open.push({cost + h, -cost, static_cast<int>(nodes.size()) - 1});
  };

  // Agents already standing on their goal may finish at time 0.
  JointState init;
  init.cars.resize(cars);
  for (const auto& a : instance.agents())
    init.agents.push_back(AgentState{static_cast<std::int16_t>(g.index(a.start)), 0, 0, 0});
  {
    std::vector<std::size_t> optional_done;
    for (std::size_t i = 0; i < n; ++i)
      if (at_goal(init.agents[i], instance.agent(static_cast<int>(i)))) optional_done.push_back(i);
    for (std::size_t mask = 0; mask < (std::size_t{1} << optional_done.size()); ++mask) {
      JointState s = init;
      for (std::size_t b = 0; b < optional_done.size(); ++b)
        if (mask & (std::size_t{1} << b)) s.agents[optional_done[b]].done = 1;
      push(s, -1, 0);
    }
  }

  int goal_node = -1;
  std::vector<std::vector<Option>> options(n);
  std::vector<std::size_t> choice(n);
  while (!open.empty()) {
    const auto [f, neg_g, idx] = open.top();
    open.pop();
    const Time cost = -neg_g;
    if (best[nodes[static_cast<std::size_t>(idx)].key] < cost) continue;
    const JointState s = decode(nodes[static_cast<std::size_t>(idx)].key, n, cars);
    if (std::all_of(s.agents.begin(), s.agents.end(), [](const AgentState& a) { return a.done != 0; })) {
      goal_node = idx;
      break;
    }
    if (++result.expanded > state_cap) {
      result.exhausted = true;
      return result;
    }

    Time step_cost = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const AgentState& a = s.agents[i];
      const Agent& agent = instance.agent(static_cast<int>(i));
      auto& opts = options[i];
      opts.clear();
      if (a.done) {
        opts.push_back(Option{a, -1, false, false});
        continue;
      }
      ++step_cost;
      std::vector<Option> raw;
      const Vertex here = g.vertex(a.pos);
      const int dir = agent.goal.floor > agent.start.floor ? 1 : -1;
      if (a.ride_left > 0) {
        const int k = g.elevator_at(here);
        const Time total = std::abs(agent.goal.floor - agent.start.floor) * g.elevator(k).t_floor;
        AgentState nx = a;
        nx.ride_left = static_cast<std::int16_t>(a.ride_left - 1);
        const Time elapsed = total - nx.ride_left;
        nx.pos = static_cast<std::int16_t>(
            g.index(g.door(k, agent.start.floor + dir * static_cast<int>(elapsed / g.elevator(k).t_floor))));
        raw.push_back(Option{nx, -1, nx.ride_left == 0, false});
      } else {
        raw.push_back(Option{a, -1, false, false});
        const int dx[] = {1, -1, 0, 0};
        const int dy[] = {0, 0, 1, -1};
        for (int m = 0; m < 4; ++m) {
          const Vertex w{here.floor, here.x + dx[m], here.y + dy[m]};
          if (!g.is_free(w)) continue;
          AgentState nx = a;
          nx.pos = static_cast<std::int16_t>(g.index(w));
          raw.push_back(Option{nx, -1, false, true});
        }
        const int k = g.elevator_at(here);
        if (k >= 0 && !a.rode && agent.start.floor != agent.goal.floor) {
          const Time total = std::abs(agent.goal.floor - agent.start.floor) * g.elevator(k).t_floor;
          AgentState nx = a;
          nx.rode = 1;
          nx.ride_left = static_cast<std::int16_t>(total - 1);
          nx.pos = static_cast<std::int16_t>(
              g.index(g.door(k, agent.start.floor + dir * static_cast<int>(1 / g.elevator(k).t_floor))));
          raw.push_back(Option{nx, k, nx.ride_left == 0, false});
        }
      }
      for (const auto& o : raw) {
        opts.push_back(o);
        if (at_goal(o.next, agent)) {
          Option fin = o;
          fin.next.done = 1;
          opts.push_back(fin);
        }
      }
    }

    // Enumerate the joint product and keep legal transitions.
    std::fill(choice.begin(), choice.end(), 0);
    while (true) {
      bool legal = true;
      JointState nx;
      nx.agents.resize(n);
      nx.cars = s.cars;
      for (auto& c : nx.cars)
        if (c.used) --c.exit_in;
      for (std::size_t i = 0; i < n && legal; ++i) {
        const Option& o = options[i][choice[i]];
        nx.agents[i] = o.next;
        if (o.boards < 0) continue;
        const Elevator& e = g.elevator(o.boards);
        const int floor = g.vertex(s.agents[i].pos).floor;
        const CarState& car = s.cars[static_cast<std::size_t>(o.boards)];
        if (car.used && car.exit_in + std::abs(car.exit_floor - floor) * e.t_floor >= 0) legal = false;
        for (std::size_t j = 0; j < n && legal; ++j) {
          if (j == i) continue;
          if (options[j][choice[j]].boards == o.boards) legal = false;
          const AgentState& other = s.agents[j];
          if (other.ride_left == 0 && g.vertex(other.pos).cell() == e.cell) legal = false;
        }
        const Agent& agent = instance.agent(static_cast<int>(i));
        auto& nc = nx.cars[static_cast<std::size_t>(o.boards)];
        nc.used = 1;
        nc.exit_in = static_cast<std::int16_t>(std::abs(agent.goal.floor - agent.start.floor) * e.t_floor - 1);
        nc.exit_floor = static_cast<std::int16_t>(agent.goal.floor);
      }
      for (std::size_t i = 0; i < n && legal; ++i) {
        const AgentState& a = nx.agents[i];
        if (a.ride_left > 0) continue;
        const Option& oi = options[i][choice[i]];
        for (std::size_t j = i + 1; j < n && legal; ++j) {
          const AgentState& b = nx.agents[j];
          if (b.ride_left > 0) continue;
          if (a.pos == b.pos) legal = false;
          const Option& oj = options[j][choice[j]];
          if (oi.moved && oj.moved && a.pos == s.agents[j].pos && b.pos == s.agents[i].pos) legal = false;
        }
        if (!legal || oi.exits) continue;
        const Vertex v = g.vertex(a.pos);
        const int k = g.elevator_at(v);
        if (k < 0) continue;
        const CarState& car = nx.cars[static_cast<std::size_t>(k)];
        if (car.used && car.exit_in + std::abs(car.exit_floor - v.floor) * g.elevator(k).t_floor >= 0) legal = false;
      }
      if (legal) {
        for (auto& c : nx.cars)
          if (c.used && c.exit_in + max_span < 0) c = CarState{};
        push(nx, idx, cost + step_cost);
      }

      std::size_t i = 0;
      while (i < n && ++choice[i] == options[i].size()) choice[i++] = 0;
      if (i == n) break;
    }
  }
  if (goal_node < 0) return result;

  std::vector<JointState> chain;
  for (int i = goal_node; i >= 0; i = nodes[static_cast<std::size_t>(i)].parent)
    chain.push_back(decode(nodes[static_cast<std::size_t>(i)].key, n, cars));
  std::reverse(chain.begin(), chain.end());
  result.solved = true;
  result.soc = nodes[static_cast<std::size_t>(goal_node)].g;
  result.paths.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Agent& agent = instance.agent(static_cast<int>(i));
    for (std::size_t t = 0; t < chain.size(); ++t) {
      const AgentState& a = chain[t].agents[i];
      const Vertex v = g.vertex(a.pos);
      if (a.ride_left > 0) {
        const int k = g.elevator_at(v);
        const Time total = std::abs(agent.goal.floor - agent.start.floor) * g.elevator(k).t_floor;
        if ((total - a.ride_left) % g.elevator(k).t_floor != 0) continue;
      }
      result.paths[i].steps.push_back({v, static_cast<Time>(t)});
      if (a.done) break;
    }
  }
  return result;
}

}  // namespace mapfe
