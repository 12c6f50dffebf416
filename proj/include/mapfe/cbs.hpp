#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <vector>

#include "mapfe/conflict.hpp"
#include "mapfe/mdd.hpp"

namespace mapfe {

struct SolverConfig {
  bool ec_enabled = true;
  bool mdde_enabled = true;  // conflict prioritization and bypass together
  double time_limit = 60.0;  // seconds
  std::size_t mdd_node_cap = kDefaultMddNodeCap;
  std::uint64_t seed = 0;
};

struct SolveStats {
  std::size_t expanded = 0;
  std::size_t generated = 0;
  std::size_t bypasses = 0;
  /// Branchings on elevator conflicts along the root-to-solution lineage.
  std::size_t elevator_branchings = 0;
  double mdde_seconds = 0.0;
  double runtime = 0.0;  // seconds
  double mdde_time_fraction = 0.0;
  bool solved = false;
};

enum class SolveStatus { Solved, Infeasible, Timeout };

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<Path> paths;
  Time soc = 0;
  SolveStats stats;
};

enum class Cardinality { Cardinal, SemiCardinal, NonCardinal };

/// One constraint-tree node. Paths and constraint sets are shared with the
/// parent for every agent the branching did not touch.
struct CtNode {
  std::vector<std::shared_ptr<const Path>> paths;
  std::vector<std::shared_ptr<const ConstraintSet>> constraints;
  Time g = 0;
  std::size_t conflict_count = 0;
  std::size_t seq = 0;
  std::size_t elevator_branchings = 0;
};

/// CBS over the multi-floor graph, with the elevator-constraint and MDD-E
/// refinements switchable independently.
class CbsSolver {
 public:
  CbsSolver(const Instance& instance, SolverConfig config);

  Solution solve();

  /// Conflict to split on, or nullopt when the node is conflict-free.
  std::optional<Conflict> find_conflict(const CtNode& node);
  Cardinality classify(const CtNode& node, const Conflict& c);
  /// Equal-cost replacement for one agent's path that avoids `c` and leaves
  /// fewer conflicts overall. Returns the agent and its new path.
  std::optional<std::pair<int, Path>> find_bypass(const CtNode& node, const Conflict& c);
  /// Children of `node` split on `c`; infeasible replans are dropped.
  std::vector<CtNode> branch(const CtNode& node, const Conflict& c);
  /// Root node, or nullopt if some agent cannot reach its goal at all.
  std::optional<CtNode> root();

  const SolveStats& stats() const { return stats_; }

 private:
  std::vector<Conflict> conflicts_of(const CtNode& node) const;
  std::optional<std::pair<Conflict, Cardinality>> select(const CtNode& node);
  std::shared_ptr<const Mdd> mdd(const CtNode& node, int agent);
  bool has_alternative(const CtNode& node, const AgentConstraint& ac);
  bool out_of_time() const;

  const Instance& instance_;
  SolverConfig config_;
  std::vector<LowLevelPlanner> planners_;
  struct CachedMdd {
    std::shared_ptr<const ConstraintSet> owner;
    Time cost = 0;
    std::shared_ptr<const Mdd> mdd;
  };
  std::vector<std::deque<CachedMdd>> mdd_cache_;  // per agent, most recent first
  SolveStats stats_;
  std::size_t next_seq_ = 0;
  std::chrono::steady_clock::time_point started_;
};

Solution solve(const Instance& instance, const SolverConfig& config);

}  // namespace mapfe
