#pragma once

#include <map>
#include <set>
#include <span>
#include <tuple>
#include <variant>
#include <vector>

#include "mapfe/model.hpp"

namespace mapfe {

/// Closed integer interval [lo, hi]; hi may be kTimeInfinity.
struct Interval {
  Time lo = 0;
  Time hi = 0;

  bool contains(Time t) const { return lo <= t && t <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Sorts and merges overlapping or adjacent intervals in place.
void normalize(std::vector<Interval>& intervals);

/// Complement of `bans` over [0, infinity): ordered, maximal, closed.
std::vector<Interval> complement(std::span<const Interval> bans);

/// Agent may not be at `v` at any time in `when`.
struct VertexBan {
  Vertex v;
  Interval when;
};

/// Agent may not leave `from` for `to` at `departure`.
struct EdgeBan {
  Vertex from;
  Vertex to;
  Time departure = 0;
};

/// Agent may not start a ride of `elevator` from its door on `floor`
/// at any time in `when`.
struct BoardingBan {
  int elevator = -1;
  int floor = 1;
  Interval when;
};

using Constraint = std::variant<VertexBan, EdgeBan, BoardingBan>;

std::ostream& operator<<(std::ostream& os, const Constraint& c);

/// All constraints on one agent, with intervals kept normalized.
class ConstraintSet {
 public:
  void add(const Constraint& c);

  std::span<const Interval> vertex_bans(const Vertex& v) const;
  std::span<const Interval> boarding_bans(int elevator, int floor) const;
  bool vertex_banned(const Vertex& v, Time t) const;
  bool edge_banned(const Vertex& from, const Vertex& to, Time departure) const;
  bool boarding_banned(int elevator, int floor, Time t) const;

  /// True iff the agent may rest at `goal` forever from time `t` on.
  bool goal_free_from(const Vertex& goal, Time t) const;

  /// Largest finite time mentioned by any constraint (0 if none).
  Time latest_time() const;
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }

  /// True iff every constraint of `other` is also imposed here.
  bool contains_all(const ConstraintSet& other) const;

  friend bool operator==(const ConstraintSet&, const ConstraintSet&) = default;

 private:
  std::map<Vertex, std::vector<Interval>> vertex_;
  std::set<std::tuple<Vertex, Vertex, Time>> edge_;
  std::map<std::pair<int, int>, std::vector<Interval>> boarding_;
  std::size_t count_ = 0;
};

/// Safe intervals of `v`: the complement of its vertex bans.
std::vector<Interval> safe_intervals(const Vertex& v, const ConstraintSet& constraints);

}  // namespace mapfe
