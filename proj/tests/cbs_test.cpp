#include <doctest.h>

#include "mapfe/cbs.hpp"
#include "support/cases.hpp"

using namespace mapfe;
using cases::at;

namespace {

CtNode make_node(const std::vector<std::string>& paths) {
  CtNode node;
  const auto empty = std::make_shared<const ConstraintSet>();
  for (const auto& text : paths) {
    node.paths.push_back(std::make_shared<const Path>(parse_path(text)));
    node.constraints.push_back(empty);
    node.g += node.paths.back()->cost();
  }
  return node;
}

SolverConfig config(bool ec, bool mdde) {
  SolverConfig c;
  c.ec_enabled = ec;
  c.mdde_enabled = mdde;
  c.time_limit = 30;
  return c;
}

const char* kLeftRight = "(1,1,0)@0 (1,1,1)@1 (1,1,2)@2";
const char* kUpDown = "(1,0,1)@0 (1,1,1)@1 (1,2,1)@2";
const char* kToC2 = "(1,1,0)@0 (1,1,1)@1 (1,2,1)@2";
const char* kToB3 = "(1,0,1)@0 (1,1,1)@1 (1,1,2)@2";

}  // namespace

TEST_CASE("single agent and disjoint agents solve at the sum of individual optima") {
  const auto g = cases::open3x3();
  const Instance one(g, {{0, at(1, "A1"), at(1, "C3")}});
  for (bool ec : {false, true})
    for (bool mdde : {false, true}) {
      const auto sol = solve(one, config(ec, mdde));
      REQUIRE(sol.status == SolveStatus::Solved);
      CHECK(sol.soc == 4);
      CHECK(sol.stats.expanded == 0);
    }
  const Instance two(g, {{0, at(1, "A1"), at(1, "A3")}, {1, at(1, "C1"), at(1, "C3")}});
  const auto sol = solve(two, config(true, true));
  REQUIRE(sol.status == SolveStatus::Solved);
  CHECK(sol.soc == 4);
  CHECK(validate(two, sol.paths).ok());
}

TEST_CASE("elevator constraints resolve the shared car in one branching") {
  const auto inst = cases::elevator_constraints();
  const auto ec = solve(inst, config(true, false));
  REQUIRE(ec.status == SolveStatus::Solved);
  CHECK(ec.soc == 9);
  CHECK(ec.stats.elevator_branchings == 1);
  CHECK(validate(inst, ec.paths).ok());

  const auto base = solve(inst, config(false, false));
  REQUIRE(base.status == SolveStatus::Solved);
  CHECK(base.soc == 9);
  CHECK(base.stats.elevator_branchings >= 3);
  CHECK(base.stats.expanded >= 3);
  CHECK(base.stats.expanded > ec.stats.expanded);
}

TEST_CASE("classification matches restricted alternatives") {
  SUBCASE("cardinal") {
    const Instance inst(cases::open3x3(), {{0, at(1, "B1"), at(1, "B3")}, {1, at(1, "A2"), at(1, "C2")}});
    CbsSolver s(inst, config(true, true));
    const auto node = make_node({kLeftRight, kUpDown});
    const Conflict c = VertexConflict{0, 1, at(1, "B2"), 1};
    CHECK(s.classify(node, c) == Cardinality::Cardinal);
    CHECK_FALSE(s.find_bypass(node, c));
  }
  SUBCASE("semi-cardinal") {
    const auto g = parse_map_string("type mapf-e\nfloors 1\nheight 3\nwidth 3\ntfloor 1\nmap\n...\n...\n@..\n");
    const Instance inst(g, {{0, at(1, "B1"), at(1, "C2")}, {1, at(1, "A2"), at(1, "B3")}});
    CbsSolver s(inst, config(true, true));
    const auto node = make_node({kToC2, kToB3});
    CHECK(s.classify(node, VertexConflict{0, 1, at(1, "B2"), 1}) == Cardinality::SemiCardinal);
  }
  SUBCASE("non-cardinal with a bypass") {
    const Instance inst(cases::open3x3(), {{0, at(1, "B1"), at(1, "C2")}, {1, at(1, "A2"), at(1, "B3")}});
    CbsSolver s(inst, config(true, true));
    auto node = make_node({kToC2, kToB3});
    node.conflict_count = 1;
    const Conflict c = VertexConflict{0, 1, at(1, "B2"), 1};
    CHECK(s.classify(node, c) == Cardinality::NonCardinal);
    const auto bypass = s.find_bypass(node, c);
    REQUIRE(bypass);
    CHECK(bypass->second.cost() == 2);
    std::vector<Path> paths{*node.paths[0], *node.paths[1]};
    paths[static_cast<std::size_t>(bypass->first)] = bypass->second;
    CHECK(validate(inst, paths).ok());
  }
}

TEST_CASE("cardinal conflicts are preferred over earlier non-cardinal ones") {
  const auto g = parse_map_string(
      "type mapf-e\nfloors 1\nheight 6\nwidth 12\ntfloor 1\nmap\n"
      "...@........\n...@........\n...@........\n...@........\n...@........\n...@........\n");
  const Instance inst(g, {{0, {1, 0, 0}, {1, 2, 2}},
                          {1, {1, 2, 0}, {1, 0, 2}},
                          {2, {1, 4, 0}, {1, 10, 0}},
                          {3, {1, 9, 5}, {1, 9, 0}}});
  const auto node = make_node({
      "(1,0,0)@0 (1,1,0)@1 (1,1,1)@2 (1,1,2)@3 (1,2,2)@4",
      "(1,2,0)@0 (1,2,1)@1 (1,1,1)@2 (1,0,1)@3 (1,0,2)@4",
      "(1,4,0)@0 (1,5,0)@1 (1,6,0)@2 (1,7,0)@3 (1,8,0)@4 (1,9,0)@5 (1,10,0)@6",
      "(1,9,5)@0 (1,9,4)@1 (1,9,3)@2 (1,9,2)@3 (1,9,1)@4 (1,9,0)@5",
  });
  CbsSolver with(inst, config(true, true));
  const auto picked = with.find_conflict(node);
  REQUIRE(picked);
  CHECK(conflict_time(*picked) == 5);
  CHECK(with.classify(node, *picked) == Cardinality::Cardinal);

  CbsSolver without(inst, config(true, false));
  const auto first = without.find_conflict(node);
  REQUIRE(first);
  CHECK(conflict_time(*first) == 2);
}

TEST_CASE("children add exactly one constraint and keep g consistent") {
  const auto inst = cases::elevator_constraints();
  for (bool ec : {false, true}) {
    CbsSolver s(inst, config(ec, false));
    const auto root = s.root();
    REQUIRE(root);
    const auto c = s.find_conflict(*root);
    REQUIRE(c);
    const auto children = s.branch(*root, *c);
    REQUIRE(children.size() == 2);
    for (const auto& child : children) {
      std::size_t before = 0, after = 0;
      Time g = 0;
      for (std::size_t a = 0; a < child.paths.size(); ++a) {
        before += root->constraints[a]->size();
        after += child.constraints[a]->size();
        CHECK(child.constraints[a]->contains_all(*root->constraints[a]));
        g += child.paths[a]->cost();
      }
      CHECK(after == before + 1);
      CHECK(child.g == g);
      CHECK(child.g >= root->g);
      CHECK(child.elevator_branchings == 1);
    }
  }
}

TEST_CASE("solver is deterministic") {
  const auto inst = cases::elevator_mdd();
  const auto a = solve(inst, config(true, true));
  const auto b = solve(inst, config(true, true));
  REQUIRE(a.status == SolveStatus::Solved);
  CHECK(a.paths == b.paths);
  CHECK(a.stats.expanded == b.stats.expanded);
  CHECK(a.stats.generated == b.stats.generated);
  CHECK(validate(inst, a.paths).ok());
}

TEST_CASE("all variants agree on the resetting-car instance") {
  const auto inst = cases::elevator_mdd();
  const auto ref = solve(inst, config(false, false));
  REQUIRE(ref.status == SolveStatus::Solved);
  for (bool ec : {false, true})
    for (bool mdde : {false, true}) {
      const auto sol = solve(inst, config(ec, mdde));
      REQUIRE(sol.status == SolveStatus::Solved);
      CHECK(sol.soc == ref.soc);
      CHECK(validate(inst, sol.paths).ok());
    }
}

TEST_CASE("validation reports a swap as one edge conflict") {
  const Instance inst(cases::open3x3(), {{0, at(1, "A1"), at(1, "B1")}, {1, at(1, "B1"), at(1, "A1")}});
  const std::vector<Path> paths{parse_path("(1,0,0)@0 (1,1,0)@1"), parse_path("(1,1,0)@0 (1,0,0)@1")};
  const auto report = validate(inst, paths);
  CHECK(report.invalid.empty());
  REQUIRE(report.conflicts.size() == 1);
  CHECK(std::holds_alternative<EdgeConflict>(report.conflicts[0]));
  const auto sol = solve(inst, config(true, true));
  REQUIRE(sol.status == SolveStatus::Solved);
  CHECK(validate(inst, sol.paths).ok());
}

TEST_CASE("timeouts are reported") {
  const auto inst = cases::elevator_constraints();
  auto c = config(false, false);
  c.time_limit = -1;
  CHECK(solve(inst, c).status == SolveStatus::Timeout);
}
