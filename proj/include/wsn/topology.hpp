#pragma once

#include <Eigen/Core>

#include <bit>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <vector>

namespace wsn {

/// Largest network whose activity states are enumerated exactly.
inline constexpr int kDefaultEnumerationCap = 24;

/// Planar sensor positions; node i sits at points[i] (0-based internally,
/// 1-based in every file format).
class SensorLayout {
 public:
  explicit SensorLayout(std::vector<Eigen::Vector2d> points);

  int size() const { return static_cast<int>(points_.size()); }
  const Eigen::Vector2d& point(int i) const { return points_[static_cast<std::size_t>(i)]; }
  const std::vector<Eigen::Vector2d>& points() const { return points_; }
  double distance(int i, int j) const { return (point(i) - point(j)).norm(); }

  /// n nodes at x = 0, spacing, 2*spacing, ...
  static SensorLayout line(int n, double spacing = 1.0);

 private:
  std::vector<Eigen::Vector2d> points_;
};

/// Reads `id,x,y` rows (header optional); ids must be exactly 1..n.
SensorLayout read_layout_csv(std::istream& in);
SensorLayout read_layout_csv(const std::filesystem::path& path);

struct Edge {
  int a;  // a < b
  int b;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected simple graph; edges are stored normalized (a < b) and sorted.
class Graph {
 public:
  explicit Graph(int node_count, std::vector<Edge> edges = {});

  static Graph edgeless(int n) { return Graph(n); }
  static Graph path(int n);

  int node_count() const { return node_count_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool has_edge(int i, int j) const;
  /// Bit j of neighbor_mask(i) is set iff (i, j) is an edge.
  std::uint32_t neighbor_mask(int i) const { return neighbors_[static_cast<std::size_t>(i)]; }
  std::vector<int> neighbors(int i) const;
  int degree(int i) const { return std::popcount(neighbor_mask(i)); }

  bool is_forest() const;

 private:
  int node_count_;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> neighbors_;
};

/// Incidence vector of simultaneously active nodes, node i at bit i.
class ActivityState {
 public:
  ActivityState(std::uint32_t bits, int node_count);

  static ActivityState empty(int n) { return {0u, n}; }
  static ActivityState full(int n);
  static ActivityState from_indices(std::span<const int> active, int n);

  std::uint32_t bits() const { return bits_; }
  int node_count() const { return node_count_; }
  int active_count() const { return std::popcount(bits_); }
  bool active(int i) const { return (bits_ >> i) & 1u; }
  std::vector<int> active_indices() const;
  ActivityState with(int i) const { return {bits_ | (1u << i), node_count_}; }

  /// Node 1 first, e.g. "101" for e1 + e3.
  std::string to_string() const;

  friend bool operator==(const ActivityState&, const ActivityState&) = default;

 private:
  std::uint32_t bits_;
  int node_count_;
};

/// Edge (i, j) iff j is i's nearest neighbour or i is j's; ties go to the
/// lowest index.
Graph build_nn_graph(const SensorLayout& layout);

bool is_independent(const ActivityState& state, const Graph& conflict);

/// All independent sets of `conflict`, ordered by ascending bit mask (the
/// empty state first).
std::vector<ActivityState> enumerate_states(const Graph& conflict,
                                            int cap = kDefaultEnumerationCap);

/// Position of `state` in a canonically ordered state list, or -1.
int state_index(std::span<const ActivityState> states, const ActivityState& state);

}  // namespace wsn
