#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "mapfe/model.hpp"

namespace mapfe {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int to_int(const std::string& token, const std::string& what) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(token, &used);
  } catch (const std::exception&) {
    throw FormatError("expected an integer for " + what + ", got '" + token + "'");
  }
  if (used != token.size()) throw FormatError("expected an integer for " + what + ", got '" + token + "'");
  return value;
}

bool is_header_keyword(const std::string& word) {
  return word == "type" || word == "floors" || word == "height" || word == "width" || word == "tfloor" ||
         word == "tfloor_k" || word == "map";
}

}  // namespace

MultiFloorGraph parse_map(std::istream& in) {
  std::optional<int> floors, height, width, tfloor;
  std::map<int, int> tfloor_override;
  bool typed = false;
  std::string line;
  std::vector<std::string> rows;

  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    std::istringstream ss(t);
    std::string word;
    ss >> word;
    if (!rows.empty() || !is_header_keyword(word)) {
      rows.push_back(t);
      continue;
    }
    std::vector<std::string> args;
    for (std::string a; ss >> a;) args.push_back(a);
    auto expect_args = [&](std::size_t n) {
      if (args.size() != n) throw FormatError("malformed header line: '" + t + "'");
    };
    if (word == "type") {
      expect_args(1);
      if (args[0] != "mapf-e") throw FormatError("unsupported map type '" + args[0] + "'");
      typed = true;
    } else if (word == "map") {
      expect_args(0);
    } else if (word == "floors") {
      expect_args(1);
      floors = to_int(args[0], "floors");
    } else if (word == "height") {
      expect_args(1);
      height = to_int(args[0], "height");
    } else if (word == "width") {
      expect_args(1);
      width = to_int(args[0], "width");
    } else if (word == "tfloor") {
      expect_args(1);
      tfloor = to_int(args[0], "tfloor");
    } else if (word == "tfloor_k") {
      expect_args(2);
      tfloor_override[to_int(args[0], "tfloor_k elevator")] = to_int(args[1], "tfloor_k value");
    }
  }

  if (!typed) throw FormatError("missing 'type mapf-e' header");
  if (!floors || !height || !width || !tfloor) throw FormatError("header needs floors, height, width and tfloor");
  if (*floors <= 0 || *height <= 0 || *width <= 0) throw FormatError("floors, height and width must be positive");
  if (*tfloor < 1) throw FormatError("tfloor must be at least 1");
  if (rows.size() != static_cast<std::size_t>(*floors) * static_cast<std::size_t>(*height))
    throw FormatError("expected " + std::to_string(*floors * *height) + " grid rows, found " +
                      std::to_string(rows.size()));

  std::vector<FloorGrid> grids;
  std::vector<std::vector<Cell>> doors_per_floor(static_cast<std::size_t>(*floors));
  for (int f = 0; f < *floors; ++f) {
    FloorGrid g(*width, *height);
    for (int y = 0; y < *height; ++y) {
      const auto& row = rows[static_cast<std::size_t>(f * *height + y)];
      if (static_cast<int>(row.size()) != *width)
        throw FormatError("floor " + std::to_string(f + 1) + " row " + std::to_string(y) + " has width " +
                          std::to_string(row.size()) + ", expected " + std::to_string(*width));
      for (int x = 0; x < *width; ++x) {
        switch (row[static_cast<std::size_t>(x)]) {
          case '.':
            break;
          case '@':
          case 'T':
            g.set_blocked(x, y);
            break;
          case 'E':
            doors_per_floor[static_cast<std::size_t>(f)].push_back({x, y});
            break;
          default:
            throw FormatError(std::string("unknown map character '") + row[static_cast<std::size_t>(x)] + "'");
        }
      }
    }
    grids.push_back(std::move(g));
  }

  const auto& doors = doors_per_floor.front();
  for (std::size_t f = 1; f < doors_per_floor.size(); ++f)
    if (doors_per_floor[f] != doors)
      throw FormatError("elevator cells on floor " + std::to_string(f + 1) + " do not match floor 1");

  std::vector<Elevator> elevators;
  for (std::size_t k = 0; k < doors.size(); ++k) {
    Elevator e{static_cast<int>(k), doors[k], *tfloor};
    if (auto it = tfloor_override.find(e.id); it != tfloor_override.end()) {
      if (it->second < 1) throw FormatError("tfloor_k must be at least 1");
      e.t_floor = it->second;
      tfloor_override.erase(it);
    }
    elevators.push_back(e);
  }
  if (!tfloor_override.empty())
    throw FormatError("tfloor_k names unknown elevator " + std::to_string(tfloor_override.begin()->first));

  try {
    return MultiFloorGraph(std::move(grids), std::move(elevators));
  } catch (const InvalidInstance& e) {
    throw FormatError(e.what());
  }
}

MultiFloorGraph parse_map_string(const std::string& text) {
  std::istringstream in(text);
  return parse_map(in);
}

Instance parse_scenario(std::istream& in, const MultiFloorGraph& graph) {
  std::vector<Agent> agents;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::istringstream ss(t);
    std::vector<std::string> tok;
    for (std::string w; ss >> w;) tok.push_back(w);
    if (tok.size() != 6)
      throw FormatError("scenario line " + std::to_string(line_no) + ": expected 6 integers");
    int v[6];
    for (int i = 0; i < 6; ++i) v[i] = to_int(tok[static_cast<std::size_t>(i)], "scenario field");
    const int id = static_cast<int>(agents.size());
    agents.push_back({id, {v[0], v[1], v[2]}, {v[3], v[4], v[5]}});
  }
  try {
    return Instance(graph, std::move(agents));
  } catch (const InvalidInstance& e) {
    throw FormatError(e.what());
  }
}

Instance parse_scenario_string(const std::string& text, const MultiFloorGraph& graph) {
  std::istringstream in(text);
  return parse_scenario(in, graph);
}

void write_map(std::ostream& out, const MultiFloorGraph& graph) {
  const Time default_tf = graph.elevators().empty() ? 1 : graph.elevators().front().t_floor;
  out << "type mapf-e\n"
      << "floors " << graph.floors() << '\n'
      << "height " << graph.height() << '\n'
      << "width " << graph.width() << '\n'
      << "tfloor " << default_tf << '\n';
  for (const auto& e : graph.elevators())
    if (e.t_floor != default_tf) out << "tfloor_k " << e.id << ' ' << e.t_floor << '\n';
  out << "map\n";
  for (int f = 1; f <= graph.floors(); ++f) {
    const auto& g = graph.grid(f);
    for (int y = 0; y < graph.height(); ++y) {
      for (int x = 0; x < graph.width(); ++x) {
        if (graph.elevator_at(Cell{x, y}) >= 0)
          out << 'E';
        else
          out << (g.is_blocked(x, y) ? '@' : '.');
      }
      out << '\n';
    }
    if (f < graph.floors()) out << '\n';
  }
}

void write_scenario(std::ostream& out, const Instance& instance) {
  for (const auto& a : instance.agents())
    out << a.start.floor << ' ' << a.start.x << ' ' << a.start.y << ' ' << a.goal.floor << ' ' << a.goal.x << ' '
        << a.goal.y << '\n';
}

MultiFloorGraph load_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open map file '" + path + "'");
  return parse_map(in);
}

Instance load_instance(const std::string& map_path, const std::string& scen_path) {
  auto graph = load_map(map_path);
  std::ifstream in(scen_path);
  if (!in) throw FormatError("cannot open scenario file '" + scen_path + "'");
  return parse_scenario(in, graph);
}

}  // namespace mapfe
