#include "mapfe/constraints.hpp"

#include <algorithm>
#include <ostream>

namespace mapfe {
namespace {

bool covered(std::span<const Interval> sorted, Time t) {
  auto it = std::upper_bound(sorted.begin(), sorted.end(), t, [](Time v, const Interval& iv) { return v < iv.lo; });
  if (it == sorted.begin()) return false;
  return std::prev(it)->hi >= t;
}

bool covers(std::span<const Interval> sorted, const Interval& iv) {
  auto it = std::upper_bound(sorted.begin(), sorted.end(), iv.lo,
                             [](Time v, const Interval& x) { return v < x.lo; });
  if (it == sorted.begin()) return false;
  return std::prev(it)->hi >= iv.hi;
}

std::ostream& print(std::ostream& os, const Interval& iv) {
  os << '[' << iv.lo << ',';
  if (iv.hi >= kTimeInfinity)
    os << "inf";
  else
    os << iv.hi;
  return os << ']';
}

}  // namespace

void normalize(std::vector<Interval>& intervals) {
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi; });
  std::vector<Interval> merged;
  for (const auto& iv : intervals) {
    if (!merged.empty() && iv.lo <= merged.back().hi + 1)
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    else
      merged.push_back(iv);
  }
  intervals = std::move(merged);
}

std::vector<Interval> complement(std::span<const Interval> bans) {
  std::vector<Interval> out;
  Time next = 0;
  for (const auto& b : bans) {
    if (b.hi < next) continue;
    if (b.lo > next) out.push_back({next, b.lo - 1});
    if (b.hi >= kTimeInfinity) return out;
    next = b.hi + 1;
  }
  out.push_back({next, kTimeInfinity});
  return out;
}

std::ostream& operator<<(std::ostream& os, const Constraint& c) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, VertexBan>) {
          os << "vertex " << x.v << " @";
          print(os, x.when);
        } else if constexpr (std::is_same_v<T, EdgeBan>) {
          os << "edge " << x.from << "->" << x.to << " @" << x.departure;
        } else {
          os << "board k=" << x.elevator << " floor " << x.floor << " @";
          print(os, x.when);
        }
      },
      c);
  return os;
}

void ConstraintSet::add(const Constraint& c) {
  ++count_;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, VertexBan>) {
          auto& list = vertex_[x.v];
          list.push_back(x.when);
          normalize(list);
        } else if constexpr (std::is_same_v<T, EdgeBan>) {
          edge_.emplace(x.from, x.to, x.departure);
        } else {
          auto& list = boarding_[{x.elevator, x.floor}];
          list.push_back(x.when);
          normalize(list);
        }
      },
      c);
}

std::span<const Interval> ConstraintSet::vertex_bans(const Vertex& v) const {
  auto it = vertex_.find(v);
  if (it == vertex_.end()) return {};
  return it->second;
}

std::span<const Interval> ConstraintSet::boarding_bans(int elevator, int floor) const {
  auto it = boarding_.find({elevator, floor});
  if (it == boarding_.end()) return {};
  return it->second;
}

bool ConstraintSet::vertex_banned(const Vertex& v, Time t) const { return covered(vertex_bans(v), t); }

bool ConstraintSet::edge_banned(const Vertex& from, const Vertex& to, Time departure) const {
  return !edge_.empty() && edge_.count({from, to, departure}) != 0;
}

bool ConstraintSet::boarding_banned(int elevator, int floor, Time t) const {
  return covered(boarding_bans(elevator, floor), t);
}

bool ConstraintSet::goal_free_from(const Vertex& goal, Time t) const {
  const auto bans = vertex_bans(goal);
  return bans.empty() || bans.back().hi < t;
}

Time ConstraintSet::latest_time() const {
  Time latest = 0;
  auto fold = [&](Time t) {
    if (t < kTimeInfinity) latest = std::max(latest, t);
  };
  for (const auto& [v, list] : vertex_)
    for (const auto& iv : list) fold(iv.hi);
  for (const auto& [from, to, t] : edge_) fold(t + 1);
  for (const auto& [key, list] : boarding_)
    for (const auto& iv : list) fold(iv.hi);
  return latest;
}

bool ConstraintSet::contains_all(const ConstraintSet& other) const {
  for (const auto& [v, list] : other.vertex_)
    for (const auto& iv : list)
      if (!covers(vertex_bans(v), iv)) return false;
  for (const auto& e : other.edge_)
    if (!edge_.count(e)) return false;
  for (const auto& [key, list] : other.boarding_)
    for (const auto& iv : list)
      if (!covers(boarding_bans(key.first, key.second), iv)) return false;
  return true;
}

std::vector<Interval> safe_intervals(const Vertex& v, const ConstraintSet& constraints) {
  return complement(constraints.vertex_bans(v));
}

}  // namespace mapfe
