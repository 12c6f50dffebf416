#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mapfe {

using Time = int;
inline constexpr Time kTimeInfinity = std::numeric_limits<Time>::max() / 4;

/// Raised for malformed map/scenario text.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a constructed graph or instance breaks a structural invariant.
class InvalidInstance : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

/// A location in the workspace. Floors are 1-based, cells 0-based.
/// Ordering is (floor, y, x), which is also the dense-index order.
struct Vertex {
  int floor = 1;
  int x = 0;
  int y = 0;

  Cell cell() const { return {x, y}; }

  friend bool operator==(const Vertex&, const Vertex&) = default;
  friend std::strong_ordering operator<=>(const Vertex& a, const Vertex& b) {
    if (auto c = a.floor <=> b.floor; c != 0) return c;
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

std::ostream& operator<<(std::ostream& os, const Vertex& v);

struct FloorGrid {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> blocked;  // row-major, size width * height

  FloorGrid() = default;
  FloorGrid(int w, int h);

  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  bool is_blocked(int x, int y) const { return blocked[static_cast<std::size_t>(y * width + x)] != 0; }
  void set_blocked(int x, int y, bool value = true) {
    blocked[static_cast<std::size_t>(y * width + x)] = value ? 1 : 0;
  }

  friend bool operator==(const FloorGrid&, const FloorGrid&) = default;
};

/// A capacity-one elevator serving every floor through the same cell.
struct Elevator {
  int id = 0;
  Cell cell;
  Time t_floor = 1;  // traversal time between adjacent floors

  friend bool operator==(const Elevator&, const Elevator&) = default;
};

enum class MoveKind { Wait, Move, Board };

struct Neighbor {
  Vertex to;
  Time cost = 1;
  MoveKind kind = MoveKind::Wait;
  int elevator = -1;  // set for Board
};

/// Per-floor grids joined by elevators. Immutable after construction.
class MultiFloorGraph {
 public:
  MultiFloorGraph() = default;
  /// Validates all invariants; throws InvalidInstance on violation.
  MultiFloorGraph(std::vector<FloorGrid> grids, std::vector<Elevator> elevators);

  int floors() const { return static_cast<int>(grids_.size()); }
  int width() const { return width_; }
  int height() const { return height_; }
  int num_vertices() const { return floors() * width_ * height_; }

  const FloorGrid& grid(int floor) const { return grids_[static_cast<std::size_t>(floor - 1)]; }
  const std::vector<FloorGrid>& grids() const { return grids_; }
  const std::vector<Elevator>& elevators() const { return elevators_; }
  const Elevator& elevator(int k) const { return elevators_[static_cast<std::size_t>(k)]; }

  bool in_bounds(const Vertex& v) const {
    return v.floor >= 1 && v.floor <= floors() && v.x >= 0 && v.y >= 0 && v.x < width_ && v.y < height_;
  }
  bool is_free(const Vertex& v) const { return in_bounds(v) && !grid(v.floor).is_blocked(v.x, v.y); }

  /// Elevator whose door is at this cell, or -1.
  int elevator_at(const Cell& c) const;
  int elevator_at(const Vertex& v) const { return elevator_at(v.cell()); }
  bool is_door(const Vertex& v) const { return elevator_at(v) >= 0; }
  Vertex door(int k, int floor) const {
    const auto& e = elevator(k);
    return {floor, e.cell.x, e.cell.y};
  }

  int index(const Vertex& v) const { return ((v.floor - 1) * height_ + v.y) * width_ + v.x; }
  Vertex vertex(int index) const {
    const int per_floor = width_ * height_;
    const int rem = index % per_floor;
    return {index / per_floor + 1, rem % width_, rem / width_};
  }

  /// Wait, same-floor 4-neighbour moves, and (when standing at a door and
  /// the agent has not ridden yet) one Board macro-move per other floor.
  std::vector<Neighbor> neighbors(const Vertex& v, bool rode_elevator) const;

  friend bool operator==(const MultiFloorGraph& a, const MultiFloorGraph& b) {
    return a.grids_ == b.grids_ && a.elevators_ == b.elevators_;
  }

 private:
  std::vector<FloorGrid> grids_;
  std::vector<Elevator> elevators_;
  std::vector<int> door_of_cell_;  // width*height, elevator id or -1
  int width_ = 0;
  int height_ = 0;
};

struct Agent {
  int id = 0;
  Vertex start;
  Vertex goal;

  int start_floor() const { return start.floor; }
  int goal_floor() const { return goal.floor; }
  bool needs_elevator() const { return start.floor != goal.floor; }

  friend bool operator==(const Agent&, const Agent&) = default;
};

class Instance {
 public:
  Instance() = default;
  /// Validates agents against the graph; throws InvalidInstance.
  Instance(MultiFloorGraph graph, std::vector<Agent> agents);

  const MultiFloorGraph& graph() const { return graph_; }
  const std::vector<Agent>& agents() const { return agents_; }
  int num_agents() const { return static_cast<int>(agents_.size()); }
  const Agent& agent(int i) const { return agents_[static_cast<std::size_t>(i)]; }

 private:
  MultiFloorGraph graph_;
  std::vector<Agent> agents_;
};

// Text formats (map_io.cpp).
MultiFloorGraph parse_map(std::istream& in);
MultiFloorGraph parse_map_string(const std::string& text);
Instance parse_scenario(std::istream& in, const MultiFloorGraph& graph);
Instance parse_scenario_string(const std::string& text, const MultiFloorGraph& graph);
void write_map(std::ostream& out, const MultiFloorGraph& graph);
void write_scenario(std::ostream& out, const Instance& instance);
MultiFloorGraph load_map(const std::string& path);
Instance load_instance(const std::string& map_path, const std::string& scen_path);

}  // namespace mapfe
