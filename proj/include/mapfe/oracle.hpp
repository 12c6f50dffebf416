#pragma once

#include <cstddef>
#include <vector>

#include "mapfe/path.hpp"

namespace mapfe {

struct OracleResult {
  bool solved = false;
  /// True when the search stopped at the state budget; `solved` is then false
  /// and says nothing about feasibility.
  bool exhausted = false;
  Time soc = 0;
  std::vector<Path> paths;
  std::size_t expanded = 0;
};

inline constexpr std::size_t kDefaultOracleStateCap = 2000000;

/// Exact minimum sum-of-costs by A* over joint states with synchronous unit
/// steps. Elevator rules are encoded directly in the state: each car keeps
/// its last drop-off floor and time, and each agent its ride progress.
/// Plans whose sum-of-costs exceeds `horizon` are not considered.
OracleResult oracle_solve(const Instance& instance, Time horizon, std::size_t state_cap = kDefaultOracleStateCap);

}  // namespace mapfe
