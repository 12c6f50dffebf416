#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mapfe/cbs.hpp"

namespace mapfe {

/// Raised when no valid instance is found within the retry budget.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GenParams {
  int width = 8;
  int height = 8;
  double obstacle_rate = 0.1;
  int floors = 2;
  int elevators = 3;
  Time t_floor = 3;
};

/// Seeded random instance: obstacles, then elevators on cells free on every
/// floor, then distinct starts and distinct goals. Every agent can reach its
/// goal when alone; otherwise the draw is repeated.
Instance gen_instance(const GenParams& params, int agents, std::uint64_t seed, int retries = 200);

struct Variant {
  std::string name;
  bool ec = false;
  bool mdde = false;
};

/// "CBS", "CBS+EC", "CBS+MDD-E", "CBS+EC+MDD-E" (case-insensitive).
Variant parse_variant(const std::string& name);

struct ExperimentConfig {
  std::string experiment = "exp";
  int width = 8;
  int height = 8;
  double obstacle_rate = 0.1;
  std::vector<int> floors{2};
  int elevators = 3;
  std::vector<Time> t_floor{3};
  std::vector<int> agents{2, 4, 6};
  int instances = 15;
  std::uint64_t seed = 1;
  double time_limit = 60.0;
  std::vector<Variant> variants;
  std::size_t mdd_node_cap = kDefaultMddNodeCap;

  /// Throws std::invalid_argument on a broken invariant.
  void check() const;
};

/// `key = value` lines, lists comma-separated, '#' comments. Throws FormatError.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig parse_experiment_config_string(const std::string& text);

struct ResultRecord {
  std::string experiment;
  std::string variant;
  int agents = 0;
  int floors = 0;
  Time t_floor = 0;
  std::uint64_t seed = 0;
  bool solved = false;
  std::optional<Time> soc;
  double runtime_ms = 0.0;
  std::size_t expanded = 0;
  std::size_t generated = 0;
  double mdde_time_fraction = 0.0;
};

/// Seed used to generate one cell's instance.
std::uint64_t instance_seed(std::uint64_t base, int floors, Time t_floor, int agents, int index);

/// Every floors x t_floor x agents x instance x variant run, in that nesting
/// order. Instances that cannot be generated are skipped.
std::vector<ResultRecord> run_suite(const ExperimentConfig& cfg);

inline constexpr const char* kCsvHeader =
    "experiment,variant,N,floors,tfloor,seed,solved,soc,runtime_ms,expanded,generated,mdde_time_fraction";

void write_csv(std::ostream& out, const std::vector<ResultRecord>& records, bool include_runtime = true);

struct CellSummary {
  std::string experiment;
  std::string variant;
  int agents = 0;
  int floors = 0;
  Time t_floor = 0;
  int runs = 0;
  int solved = 0;
  double success_rate = 0.0;
  std::size_t min_expanded = 0;
  double avg_expanded = 0.0;
  std::size_t max_expanded = 0;
};

/// Success rate and expansion spread over solved runs, per cell and variant.
std::vector<CellSummary> summarize(const std::vector<ResultRecord>& records);
void write_summary(std::ostream& out, const std::vector<CellSummary>& cells);

}  // namespace mapfe
