#include "mapfe/bench.hpp"

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <tuple>

#include "mapfe/sipp.hpp"

namespace mapfe {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  std::istringstream ss(text);
  T value{};
  ss >> value;
  if (!ss || !(ss >> std::ws).eof()) throw FormatError("bad value for '" + key + "': '" + text + "'");
  return value;
}

template <class T>
std::vector<T> parse_numbers(const std::string& key, const std::string& text) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number<T>(key, item));
  return out;
}

/// Uniform index in [0, n) from raw engine output, independent of the
/// standard library's distribution implementations.
std::size_t draw(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

double draw_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <class T>
void partial_shuffle(std::vector<T>& v, std::size_t count, std::mt19937_64& rng) {
  for (std::size_t i = 0; i < count && i < v.size(); ++i) std::swap(v[i], v[i + draw(rng, v.size() - i)]);
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

Instance gen_instance(const GenParams& p, int agents, std::uint64_t seed, int retries) {
  if (p.width <= 0 || p.height <= 0 || p.floors <= 0 || p.elevators < 0 || p.t_floor < 1 || agents < 0)
    throw std::invalid_argument("invalid generator parameters");
  if (p.obstacle_rate < 0.0 || p.obstacle_rate >= 1.0) throw std::invalid_argument("obstacle rate must be in [0,1)");
  if (agents > p.floors * p.width * p.height - p.floors * p.elevators)
    throw GenerationError("more agents than free cells");

  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < retries; ++attempt) {
    std::vector<FloorGrid> grids(static_cast<std::size_t>(p.floors), FloorGrid(p.width, p.height));
    for (auto& grid : grids)
      for (int y = 0; y < p.height; ++y)
        for (int x = 0; x < p.width; ++x)
          if (draw_unit(rng) < p.obstacle_rate) grid.set_blocked(x, y);

    std::vector<Cell> shafts;
    for (int y = 0; y < p.height; ++y)
      for (int x = 0; x < p.width; ++x)
        if (std::none_of(grids.begin(), grids.end(), [&](const FloorGrid& g) { return g.is_blocked(x, y); }))
          shafts.push_back({x, y});
    if (static_cast<int>(shafts.size()) < p.elevators) continue;
    partial_shuffle(shafts, static_cast<std::size_t>(p.elevators), rng);
    std::vector<Elevator> elevators;
    for (int k = 0; k < p.elevators; ++k) elevators.push_back(Elevator{k, shafts[static_cast<std::size_t>(k)], p.t_floor});
    std::sort(elevators.begin(), elevators.end(), [](const Elevator& a, const Elevator& b) {
      return std::tie(a.cell.y, a.cell.x) < std::tie(b.cell.y, b.cell.x);
    });
    for (int k = 0; k < p.elevators; ++k) elevators[static_cast<std::size_t>(k)].id = k;
    MultiFloorGraph graph(std::move(grids), std::move(elevators));

    std::vector<Vertex> free_cells;
    for (int f = 1; f <= p.floors; ++f)
      for (int y = 0; y < p.height; ++y)
        for (int x = 0; x < p.width; ++x)
          if (graph.is_free({f, x, y}) && !graph.is_door({f, x, y})) free_cells.push_back({f, x, y});
    if (static_cast<int>(free_cells.size()) < agents) continue;
    auto starts = free_cells;
    auto goals = free_cells;
    partial_shuffle(starts, static_cast<std::size_t>(agents), rng);
    partial_shuffle(goals, static_cast<std::size_t>(agents), rng);

    std::vector<Agent> list;
    bool ok = true;
    for (int i = 0; i < agents && ok; ++i) {
      Agent a{i, starts[static_cast<std::size_t>(i)], goals[static_cast<std::size_t>(i)]};
      if (a.needs_elevator() && graph.elevators().empty()) ok = false;
      list.push_back(a);
    }
    if (!ok) continue;
    for (const auto& a : list)
      if (!plan(a, graph, ConstraintSet{})) ok = false;
    if (!ok) continue;
    return Instance(std::move(graph), std::move(list));
  }
  throw GenerationError("no solvable instance after " + std::to_string(retries) + " attempts");
}

Variant parse_variant(const std::string& name) {
  const std::string n = lower(trim(name));
  if (n == "cbs") return {"CBS", false, false};
  if (n == "cbs+ec") return {"CBS+EC", true, false};
  if (n == "cbs+mdd-e" || n == "cbs+mdde") return {"CBS+MDD-E", false, true};
  if (n == "cbs+ec+mdd-e" || n == "cbs+ec+mdde") return {"CBS+EC+MDD-E", true, true};
  throw FormatError("unknown variant '" + name + "'");
}

void ExperimentConfig::check() const {
  auto positive = [](const auto& list) {
    return !list.empty() && std::all_of(list.begin(), list.end(), [](auto v) { return v > 0; });
  };
  if (width <= 0 || height <= 0 || elevators < 0 || instances <= 0 || time_limit <= 0 || mdd_node_cap == 0)
    throw std::invalid_argument("experiment counts must be positive");
  if (!positive(floors) || !positive(t_floor) || !positive(agents))
    throw std::invalid_argument("experiment lists must be non-empty and positive");
  if (obstacle_rate < 0.0 || obstacle_rate >= 1.0) throw std::invalid_argument("obstacle rate must be in [0,1)");
}

ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig cfg;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "experiment") cfg.experiment = value;
    else if (key == "width") cfg.width = parse_number<int>(key, value);
    else if (key == "height") cfg.height = parse_number<int>(key, value);
    else if (key == "obstacle_rate") cfg.obstacle_rate = parse_number<double>(key, value);
    else if (key == "floors") cfg.floors = parse_numbers<int>(key, value);
    else if (key == "elevators") cfg.elevators = parse_number<int>(key, value);
    else if (key == "tfloor") cfg.t_floor = parse_numbers<Time>(key, value);
    else if (key == "agents") cfg.agents = parse_numbers<int>(key, value);
    else if (key == "instances") cfg.instances = parse_number<int>(key, value);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "time_limit") cfg.time_limit = parse_number<double>(key, value);
    else if (key == "mdd_node_cap") cfg.mdd_node_cap = parse_number<std::size_t>(key, value);
    else if (key == "variants") {
      cfg.variants.clear();
      for (const auto& v : split_list(value)) cfg.variants.push_back(parse_variant(v));
    } else {
      throw FormatError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  try {
    cfg.check();
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return cfg;
}

ExperimentConfig parse_experiment_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_experiment_config(in);
}

std::uint64_t instance_seed(std::uint64_t base, int floors, Time t_floor, int agents, int index) {
  std::uint64_t h = splitmix(base);
  for (std::uint64_t part : {static_cast<std::uint64_t>(floors), static_cast<std::uint64_t>(t_floor),
                             static_cast<std::uint64_t>(agents), static_cast<std::uint64_t>(index)})
    h = splitmix(h ^ part);
  return h;
}

std::vector<ResultRecord> run_suite(const ExperimentConfig& cfg) {
  std::vector<ResultRecord> out;
  if (cfg.variants.empty()) return out;
  for (int floors : cfg.floors)
    for (Time tf : cfg.t_floor)
      for (int n : cfg.agents)
        for (int index = 0; index < cfg.instances; ++index) {
          const GenParams params{cfg.width, cfg.height, cfg.obstacle_rate, floors, cfg.elevators, tf};
          std::optional<Instance> instance;
          try {
            instance = gen_instance(params, n, instance_seed(cfg.seed, floors, tf, n, index));
          } catch (const GenerationError&) {
            continue;
          }
          for (const auto& variant : cfg.variants) {
            SolverConfig sc;
            sc.ec_enabled = variant.ec;
            sc.mdde_enabled = variant.mdde;
            sc.time_limit = cfg.time_limit;
            sc.mdd_node_cap = cfg.mdd_node_cap;
            sc.seed = cfg.seed;
            const Solution sol = solve(*instance, sc);
            ResultRecord r;
            r.experiment = cfg.experiment;
            r.variant = variant.name;
            r.agents = n;
            r.floors = floors;
            r.t_floor = tf;
            r.seed = cfg.seed + static_cast<std::uint64_t>(index);
            r.solved = sol.status == SolveStatus::Solved;
            if (r.solved) r.soc = sol.soc;
            r.runtime_ms = sol.stats.runtime * 1000.0;
            r.expanded = sol.stats.expanded;
            r.generated = sol.stats.generated;
            r.mdde_time_fraction = sol.stats.mdde_time_fraction;
            out.push_back(std::move(r));
          }
        }
  return out;
}

void write_csv(std::ostream& out, const std::vector<ResultRecord>& records, bool include_runtime) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.experiment << ',' << r.variant << ',' << r.agents << ',' << r.floors << ',' << r.t_floor << ',' << r.seed
        << ',' << (r.solved ? 1 : 0) << ',';
    if (r.soc) out << *r.soc;
    out << ',';
    if (include_runtime) out << std::fixed << std::setprecision(3) << r.runtime_ms;
    out << ',' << r.expanded << ',' << r.generated << ',';
    if (include_runtime) out << std::fixed << std::setprecision(4) << r.mdde_time_fraction;
    out << std::defaultfloat << '\n';
  }
}

std::vector<CellSummary> summarize(const std::vector<ResultRecord>& records) {
  std::vector<CellSummary> cells;
  std::map<std::tuple<std::string, int, Time, int, std::string>, std::size_t> index;
  for (const auto& r : records) {
    const auto key = std::make_tuple(r.experiment, r.floors, r.t_floor, r.agents, r.variant);
    auto [it, fresh] = index.emplace(key, cells.size());
    if (fresh) cells.push_back(CellSummary{r.experiment, r.variant, r.agents, r.floors, r.t_floor});
    auto& c = cells[it->second];
    ++c.runs;
    if (!r.solved) continue;
    c.min_expanded = c.solved == 0 ? r.expanded : std::min(c.min_expanded, r.expanded);
    c.max_expanded = std::max(c.max_expanded, r.expanded);
    c.avg_expanded += static_cast<double>(r.expanded);
    ++c.solved;
  }
  for (auto& c : cells) {
    c.success_rate = c.runs ? static_cast<double>(c.solved) / c.runs : 0.0;
    if (c.solved) c.avg_expanded /= c.solved;
  }
  return cells;
}

void write_summary(std::ostream& out, const std::vector<CellSummary>& cells) {
  out << "experiment,variant,N,floors,tfloor,runs,solved,success_rate,min_expanded,avg_expanded,max_expanded\n";
  for (const auto& c : cells)
    out << c.experiment << ',' << c.variant << ',' << c.agents << ',' << c.floors << ',' << c.t_floor << ',' << c.runs
        << ',' << c.solved << ',' << std::fixed << std::setprecision(3) << c.success_rate << ',' << c.min_expanded
        << ',' << std::setprecision(1) << c.avg_expanded << ',' << c.max_expanded << std::defaultfloat << '\n';
}

}  // namespace mapfe
