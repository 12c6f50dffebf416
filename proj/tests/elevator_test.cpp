#include <doctest.h>

#include <random>

#include "mapfe/conflict.hpp"
#include "mapfe/sipp.hpp"
#include "support/brute.hpp"
#include "support/cases.hpp"

using namespace mapfe;

namespace {

ElevatorUsage usage(int agent, Time board, int from, int to, Time tf) {
  return {agent, 0, board, from, to, board + std::abs(to - from) * tf};
}

Interval ban_of(const AgentConstraint& ac) { return std::get<BoardingBan>(ac.constraint).when; }

}  // namespace

TEST_CASE("ride and reset durations") {
  const Elevator e{0, {0, 0}, 3};
  CHECK(ride_duration(e, 1, 3) == 6);
  CHECK(reset_duration(e, 5, 5) == 0);
  CHECK(reset_duration(e, 1, 5) == 12);
  CHECK(reset_duration(Elevator{0, {0, 0}, 1}, 2, 1) == 1);
}

TEST_CASE("busy interval is closed and floor dependent") {
  const Elevator e{0, {0, 0}, 1};
  const auto u = usage(0, 1, 1, 2, 1);
  CHECK(busy_interval(e, u, 1) == Interval{1, 3});
  CHECK(busy_interval(e, u, 2) == Interval{1, 2});
  CHECK(door_busy_until(e, u, 1) == 3);
}

TEST_CASE("usages overlap exactly on the closed busy interval") {
  const Elevator e{0, {0, 0}, 1};
  const auto first = usage(0, 1, 1, 2, 1);
  CHECK(usages_overlap(e, first, usage(1, 3, 1, 2, 1)));
  CHECK_FALSE(usages_overlap(e, first, usage(1, 4, 1, 2, 1)));
  CHECK(usages_overlap(e, first, usage(1, 2, 2, 1, 1)));
  CHECK_FALSE(usages_overlap(e, first, usage(1, 3, 2, 1, 1)));
  CHECK(usages_overlap(e, first, usage(1, 1, 2, 1, 1)));
}

TEST_CASE("elevator constraints match hand arithmetic") {
  const MultiFloorGraph g = cases::elevator_constraints().graph();
  SUBCASE("both board at t=1, one floor, t_floor 1") {
    const BoardingConflict c{usage(0, 1, 1, 2, 1), usage(1, 1, 3, 2, 1), 1};
    const auto [ci, cj] = ec_constraints(g, c);
    CHECK(ci.agent == 0);
    CHECK(cj.agent == 1);
    CHECK(ban_of(ci) == Interval{1, 3});
    CHECK(ban_of(cj) == Interval{1, 3});
    CHECK(std::get<BoardingBan>(ci.constraint).floor == 1);
    CHECK(std::get<BoardingBan>(cj.constraint).floor == 3);
  }
  SUBCASE("t_s 2 and 4 on four floors, opposite directions") {
    const auto tall = parse_map_string("type mapf-e\nfloors 4\nheight 1\nwidth 2\ntfloor 1\nmap\nE.\n\nE.\n\nE.\n\nE.\n");
    const BoardingConflict c{usage(0, 2, 1, 4, 1), usage(1, 4, 4, 1, 1), 4};
    const auto [ci, cj] = ec_constraints(tall, c);
    CHECK(ban_of(ci) == Interval{2, 7});
    CHECK(ban_of(cj) == Interval{4, 5});
  }
  SUBCASE("single-step baseline") {
    const BoardingConflict c{usage(0, 2, 1, 2, 1), usage(1, 3, 1, 2, 1), 3};
    const auto [ci, cj] = single_step_boarding_constraints(c);
    CHECK(ban_of(ci) == Interval{2, 2});
    CHECK(ban_of(cj) == Interval{3, 3});
  }
}

TEST_CASE("occupancy constraints") {
  const MultiFloorGraph g = cases::elevator_mdd().graph();
  const OccupancyConflict c{usage(0, 1, 1, 2, 1), 1, {1, 0, 0}, 3};
  const auto [occupier, rider] = occupancy_constraints(g, c);
  CHECK(occupier.agent == 1);
  const auto& vb = std::get<VertexBan>(occupier.constraint);
  CHECK(vb.v == Vertex{1, 0, 0});
  CHECK(vb.when == Interval{3, 3});
  CHECK(rider.agent == 0);
  CHECK(ban_of(rider) == Interval{1, 3});
  const OccupancyConflict early{usage(0, 0, 1, 2, 1), 1, {1, 0, 0}, 1};
  CHECK(ban_of(occupancy_constraints(g, early).second) == Interval{0, 1});
}

TEST_CASE("detection on the resetting-car case reports the t=3 conflict") {
  const auto inst = cases::elevator_mdd();
  std::vector<Path> paths;
  for (const auto& a : inst.agents()) paths.push_back(*plan(a, inst.graph(), ConstraintSet{}));
  CHECK(paths[0].cost() == 4);
  CHECK(paths[1].cost() == 5);
  const auto found = detect_elevator_conflicts(std::span<const Path>(paths), inst.graph());
  REQUIRE(found.size() == 1);
  const auto* b = std::get_if<BoardingConflict>(&found[0]);
  REQUIRE(b);
  CHECK(b->time == 3);
  CHECK(b->first.board_time == 1);
  CHECK(b->second.board_time == 3);
}

TEST_CASE("different elevators at identical times never conflict") {
  const auto g = parse_map_string("type mapf-e\nfloors 2\nheight 2\nwidth 3\ntfloor 1\nmap\nE.E\n...\n\nE.E\n...\n");
  std::vector<Path> paths{
      Path{{{{1, 0, 1}, 0}, {{1, 0, 0}, 1}, {{2, 0, 0}, 2}, {{2, 0, 1}, 3}}},
      Path{{{{1, 2, 1}, 0}, {{1, 2, 0}, 1}, {{2, 2, 0}, 2}, {{2, 2, 1}, 3}}},
  };
  CHECK(detect_elevator_conflicts(std::span<const Path>(paths), g).empty());
}

TEST_CASE("boarding just after the busy interval is conflict-free") {
  const auto inst = cases::elevator_mdd();
  const auto& g = inst.graph();
  // i boards at 1 and leaves at 2 on floor 2; the car is back on floor 1 after t=3.
  std::vector<Path> paths{
      Path{{{{1, 1, 0}, 0}, {{1, 0, 0}, 1}, {{2, 0, 0}, 2}, {{2, 1, 0}, 3}, {{2, 2, 0}, 4}}},
      Path{{{{1, 3, 0}, 0}, {{1, 2, 0}, 1}, {{1, 1, 0}, 2}, {{1, 1, 0}, 3}, {{1, 0, 0}, 4}, {{2, 0, 0}, 5},
            {{2, 0, 1}, 6}}},
  };
  CHECK(detect_conflicts(std::span<const Path>(paths), g).empty());
  paths[1].steps.erase(paths[1].steps.begin() + 3);
  for (auto& s : paths[1].steps)
    if (s.t > 2) --s.t;
  CHECK_FALSE(detect_conflicts(std::span<const Path>(paths), g).empty());
}

TEST_CASE("conflict detection agrees with a step-by-step replay") {
  const auto g = parse_map_string("type mapf-e\nfloors 3\nheight 3\nwidth 3\ntfloor 1\ntfloor_k 1 2\nmap\n"
                                  "E.E\n...\n.@.\n\nE.E\n...\n...\n\nE.E\n.@.\n...\n");
  std::mt19937_64 rng(7);
  std::vector<Vertex> cells;
  for (int f = 1; f <= 3; ++f)
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 3; ++x)
        if (g.is_free({f, x, y}) && !g.is_door({f, x, y})) cells.push_back({f, x, y});
  int conflicting = 0;
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<Path> paths;
    std::vector<Vertex> used_s, used_g;
    for (int a = 0; a < 3; ++a) {
      Vertex s, t;
      do s = cells[rng() % cells.size()];
      while (std::find(used_s.begin(), used_s.end(), s) != used_s.end());
      do t = cells[rng() % cells.size()];
      while (std::find(used_g.begin(), used_g.end(), t) != used_g.end());
      used_s.push_back(s);
      used_g.push_back(t);
      ConstraintSet cs;
      for (int k = 0; k < 2; ++k) {
        const Time lo = static_cast<Time>(rng() % 6);
        cs.add(BoardingBan{k, s.floor, {lo, lo + static_cast<Time>(rng() % 3)}});
      }
      cs.add(VertexBan{cells[rng() % cells.size()], {static_cast<Time>(rng() % 5), static_cast<Time>(rng() % 5 + 4)}});
      auto p = plan(Agent{a, s, t}, g, cs);
      if (!p) p = plan(Agent{a, s, t}, g, ConstraintSet{});
      paths.push_back(*p);
    }
    const bool clean = detect_conflicts(std::span<const Path>(paths), g).empty();
    CHECK(clean == brute::joint_legal(paths, g));
    conflicting += clean ? 0 : 1;
  }
  CHECK(conflicting > 50);
}
