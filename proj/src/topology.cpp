#include "wsn/topology.hpp"

#include "wsn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace wsn {

namespace {

constexpr int kMaxGraphNodes = 32;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

SensorLayout::SensorLayout(std::vector<Eigen::Vector2d> points) : points_(std::move(points)) {
  if (points_.empty()) throw InvalidLayout("layout must contain at least one node");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!points_[i].allFinite())
      throw InvalidLayout("node " + std::to_string(i + 1) + " has non-finite coordinates");
    for (std::size_t j = 0; j < i; ++j) {
      if (points_[i] == points_[j])
        throw InvalidLayout("nodes " + std::to_string(j + 1) + " and " + std::to_string(i + 1) +
                            " share coordinates");
    }
  }
}

SensorLayout SensorLayout::line(int n, double spacing) {
  if (n < 1) throw InvalidLayout("layout must contain at least one node");
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pts.emplace_back(spacing * i, 0.0);
  return SensorLayout(std::move(pts));
}

SensorLayout read_layout_csv(std::istream& in) {
  std::vector<std::pair<long, Eigen::Vector2d>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (cells.size() != 3)
      throw InvalidLayout("line " + std::to_string(line_no) + ": expected 3 columns id,x,y");
    if (rows.empty() && cells[0] == "id") continue;
    try {
      std::size_t pos = 0;
      const long id = std::stol(cells[0], &pos);
      if (pos != cells[0].size()) throw std::invalid_argument("id");
      const double x = std::stod(cells[1]);
      const double y = std::stod(cells[2]);
      rows.emplace_back(id, Eigen::Vector2d(x, y));
    } catch (const std::logic_error&) {
      throw InvalidLayout("line " + std::to_string(line_no) + ": cannot parse '" + line + "'");
    }
  }
  if (rows.empty()) throw InvalidLayout("layout CSV has no rows");
  std::sort(rows.begin(), rows.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });
  std::vector<Eigen::Vector2d> pts;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].first != static_cast<long>(i + 1))
      throw InvalidLayout("node ids must be contiguous 1..n");
    pts.push_back(rows[i].second);
  }
  return SensorLayout(std::move(pts));
}

SensorLayout read_layout_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidLayout("cannot open layout file " + path.string());
  return read_layout_csv(in);
}

Graph::Graph(int node_count, std::vector<Edge> edges) : node_count_(node_count) {
  if (node_count < 1) throw ContractError("graph needs at least one node");
  if (node_count > kMaxGraphNodes)
    throw CapacityError("graphs are limited to " + std::to_string(kMaxGraphNodes) + " nodes");
  neighbors_.assign(static_cast<std::size_t>(node_count), 0u);
  for (auto e : edges) {
    if (e.a == e.b) throw ContractError("self-loop on node " + std::to_string(e.a + 1));
    if (e.a > e.b) std::swap(e.a, e.b);
    if (e.a < 0 || e.b >= node_count) throw ContractError("edge endpoint out of range");
    edges_.push_back(e);
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  for (const auto& e : edges_) {
    neighbors_[static_cast<std::size_t>(e.a)] |= 1u << e.b;
    neighbors_[static_cast<std::size_t>(e.b)] |= 1u << e.a;
  }
}

Graph Graph::path(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return Graph(n, std::move(edges));
}

bool Graph::has_edge(int i, int j) const { return (neighbor_mask(i) >> j) & 1u; }

std::vector<int> Graph::neighbors(int i) const {
  std::vector<int> out;
  for (int j = 0; j < node_count_; ++j)
    if (has_edge(i, j)) out.push_back(j);
  return out;
}

bool Graph::is_forest() const {
  // union-find: an edge joining an already-connected pair closes a cycle
  std::vector<int> parent(static_cast<std::size_t>(node_count_));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      auto& p = parent[static_cast<std::size_t>(x)];
      p = parent[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  };
  for (const auto& e : edges_) {
    const int ra = find(e.a);
    const int rb = find(e.b);
    if (ra == rb) return false;
    parent[static_cast<std::size_t>(ra)] = rb;
  }
  return true;
}

ActivityState::ActivityState(std::uint32_t bits, int node_count)
    : bits_(bits), node_count_(node_count) {
  if (node_count < 0 || node_count > kMaxGraphNodes)
    throw ContractError("activity state length out of range");
  if (node_count < kMaxGraphNodes && (bits >> node_count) != 0u)
    throw ContractError("activity state has bits beyond its node count");
}

ActivityState ActivityState::full(int n) {
  const std::uint32_t bits = n >= 32 ? ~0u : ((1u << n) - 1u);
  return {bits, n};
}

ActivityState ActivityState::from_indices(std::span<const int> active, int n) {
  std::uint32_t bits = 0;
  for (int i : active) {
    if (i < 0 || i >= n) throw ContractError("active index out of range");
    bits |= 1u << i;
  }
  return {bits, n};
}

std::vector<int> ActivityState::active_indices() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(active_count()));
  for (int i = 0; i < node_count_; ++i)
    if (active(i)) out.push_back(i);
  return out;
}

std::string ActivityState::to_string() const {
  std::string s(static_cast<std::size_t>(node_count_), '0');
  for (int i = 0; i < node_count_; ++i)
    if (active(i)) s[static_cast<std::size_t>(i)] = '1';
  return s;
}

Graph build_nn_graph(const SensorLayout& layout) {
  const int n = layout.size();
  std::vector<Edge> edges;
  for (int i = 0; n > 1 && i < n; ++i) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = layout.distance(i, j);
      if (d < best_d) {  // strict: equidistant later indices never displace
        best_d = d;
        best = j;
      }
    }
    edges.push_back({std::min(i, best), std::max(i, best)});
  }
  return Graph(n, std::move(edges));
}

bool is_independent(const ActivityState& state, const Graph& conflict) {
  if (state.node_count() != conflict.node_count())
    throw ContractError("state length " + std::to_string(state.node_count()) +
                        " does not match graph size " + std::to_string(conflict.node_count()));
  for (const auto& e : conflict.edges())
    if (state.active(e.a) && state.active(e.b)) return false;
  return true;
}

std::vector<ActivityState> enumerate_states(const Graph& conflict, int cap) {
  const int n = conflict.node_count();
  if (n > cap)
    throw CapacityError("cannot enumerate " + std::to_string(n) +
                        "-node state space (cap " + std::to_string(cap) + ")");
  std::vector<std::uint32_t> masks(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) masks[static_cast<std::size_t>(i)] = conflict.neighbor_mask(i);

  std::vector<ActivityState> out;
  const std::uint64_t limit = std::uint64_t{1} << n;
  for (std::uint64_t m = 0; m < limit; ++m) {
    const auto bits = static_cast<std::uint32_t>(m);
    bool ok = true;
    for (std::uint32_t rest = bits; rest != 0u && ok; rest &= rest - 1u) {
      const int i = std::countr_zero(rest);
      ok = (bits & masks[static_cast<std::size_t>(i)]) == 0u;
    }
    if (ok) out.emplace_back(bits, n);
  }
  return out;
}

int state_index(std::span<const ActivityState> states, const ActivityState& state) {
  const auto it = std::lower_bound(
      states.begin(), states.end(), state,
      [](const ActivityState& l, const ActivityState& r) { return l.bits() < r.bits(); });
  if (it == states.end() || *it != state) return -1;
  return static_cast<int>(it - states.begin());
}

}  // namespace wsn
