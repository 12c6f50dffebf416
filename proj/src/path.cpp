#include "mapfe/path.hpp"

#include <cstdlib>
#include <map>
#include <ostream>
#include <regex>
#include <sstream>

namespace mapfe {

std::optional<ElevatorUsage> elevator_usage(const Path& path, const MultiFloorGraph& graph, int agent) {
  const auto& s = path.steps;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i].v.floor == s[i + 1].v.floor) continue;
    std::size_t j = i + 1;
    while (j + 1 < s.size() && s[j + 1].v.floor != s[j].v.floor) ++j;
    return ElevatorUsage{agent, graph.elevator_at(s[i].v), s[i].t, s[i].v.floor, s[j].v.floor, s[j].t};
  }
  return std::nullopt;
}

std::optional<std::string> check_path(const Path& path, const Agent& agent, const MultiFloorGraph& graph) {
  const auto& s = path.steps;
  if (s.empty()) return "empty path";
  if (s.front().v != agent.start || s.front().t != 0) return "path does not start at the agent's start at t=0";
  if (s.back().v != agent.goal) return "path does not end at the agent's goal";
  int rides = 0;
  int direction = 0;
  bool in_ride = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!graph.is_free(s[i].v)) {
      std::ostringstream os;
      os << "step " << i << " at blocked or out-of-bounds vertex " << s[i].v;
      return os.str();
    }
    if (i == 0) continue;
    const auto& a = s[i - 1];
    const auto& b = s[i];
    std::ostringstream where;
    where << "step " << i - 1 << "->" << i << " " << a.v << "@" << a.t << " -> " << b.v << "@" << b.t << ": ";
    if (a.v.floor != b.v.floor) {
      const int k = graph.elevator_at(a.v);
      if (k < 0 || a.v.cell() != b.v.cell()) return where.str() + "floor change away from an elevator";
      if (std::abs(a.v.floor - b.v.floor) != 1) return where.str() + "ride skips a door";
      if (b.t - a.t != graph.elevator(k).t_floor) return where.str() + "ride time differs from t_floor";
      const int dir = b.v.floor > a.v.floor ? 1 : -1;
      if (!in_ride) {
        if (++rides > 1) return where.str() + "agent boards an elevator twice";
        direction = dir;
        in_ride = true;
      } else if (dir != direction) {
        return where.str() + "ride reverses direction";
      }
      continue;
    }
    in_ride = false;
    if (b.t - a.t != 1) return where.str() + "same-floor step must take one time unit";
    const int manhattan = std::abs(a.v.x - b.v.x) + std::abs(a.v.y - b.v.y);
    if (manhattan > 1) return where.str() + "vertices are not adjacent";
  }
  return std::nullopt;
}

Timeline::Timeline(const Path& path, const MultiFloorGraph& graph, int agent)
    : usage_(elevator_usage(path, graph, agent)), agent_(agent) {
  const auto& s = path.steps;
  positions_.resize(static_cast<std::size_t>(path.cost()) + 1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Time until = i + 1 < s.size() ? s[i + 1].t : s[i].t + 1;
    for (Time t = s[i].t; t < until && t < static_cast<Time>(positions_.size()); ++t)
      positions_[static_cast<std::size_t>(t)] = s[i].v;
  }
}

std::optional<Vertex> Timeline::at(Time t) const {
  if (in_transit(t)) return std::nullopt;
  if (t >= static_cast<Time>(positions_.size())) return positions_.back();
  return positions_[static_cast<std::size_t>(t)];
}

std::string format_path(const Path& path) {
  std::ostringstream os;
  for (std::size_t i = 0; i < path.steps.size(); ++i) {
    if (i) os << ' ';
    os << path.steps[i].v << '@' << path.steps[i].t;
  }
  return os.str();
}

Path parse_path(const std::string& text) {
  static const std::regex step(R"(\(\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\)@(-?\d+))");
  Path p;
  std::istringstream ss(text);
  for (std::string tok; ss >> tok;) {
    std::smatch m;
    if (!std::regex_match(tok, m, step)) throw FormatError("malformed path step '" + tok + "'");
    p.steps.push_back({{std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3])}, std::stoi(m[4])});
  }
  if (p.steps.empty()) throw FormatError("empty path");
  for (std::size_t i = 1; i < p.steps.size(); ++i)
    if (p.steps[i].t <= p.steps[i - 1].t) throw FormatError("path times must strictly increase");
  return p;
}

void write_plan(std::ostream& out, const std::vector<Path>& paths) {
  for (std::size_t i = 0; i < paths.size(); ++i) out << "agent " << i << ": " << format_path(paths[i]) << '\n';
}

std::vector<Path> parse_plan(std::istream& in) {
  static const std::regex line_re(R"(\s*agent\s+(\d+)\s*:(.*))");
  std::map<int, Path> by_agent;
  for (std::string line; std::getline(in, line);) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::smatch m;
    if (!std::regex_match(line, m, line_re)) throw FormatError("malformed plan line '" + line + "'");
    const int id = std::stoi(m[1]);
    if (!by_agent.emplace(id, parse_path(m[2])).second) throw FormatError("duplicate plan for agent " + m[1].str());
  }
  std::vector<Path> out;
  for (auto& [id, p] : by_agent) {
    if (id != static_cast<int>(out.size())) throw FormatError("plan is missing agent " + std::to_string(out.size()));
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace mapfe
