#include <doctest.h>

#include "wsn/errors.hpp"
#include "wsn/topology.hpp"

#include <random>
#include <sstream>

using namespace wsn;

namespace {

// reference NN graph straight from the definition, all pairs
std::vector<Edge> brute_nn(const SensorLayout& layout) {
  const int n = layout.size();
  std::vector<Edge> out;
  for (int i = 0; i < n; ++i) {
    int best = -1;
    for (int j = 0; j < n; ++j)
      if (j != i && (best < 0 || layout.distance(i, j) < layout.distance(i, best))) best = j;
    if (best >= 0) {
      Edge e{std::min(i, best), std::max(i, best)};
      if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

SensorLayout random_layout(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Eigen::Vector2d> pts;
  for (int i = 0; i < n; ++i) pts.emplace_back(u(rng), u(rng));
  return SensorLayout(pts);
}

}  // namespace

TEST_CASE("layout validation") {
  CHECK_THROWS_AS(SensorLayout({}), InvalidLayout);
  CHECK_THROWS_AS(SensorLayout({{0, 0}, {0, 0}}), InvalidLayout);
  CHECK_THROWS_AS(SensorLayout({{0, std::nan("")}}), InvalidLayout);
  CHECK(SensorLayout::line(3).distance(0, 2) == doctest::Approx(2.0));
}

TEST_CASE("layout csv") {
  std::istringstream ok("id,x,y\n2,1,0\n1,0,0\n3,2,0\n");
  const auto l = read_layout_csv(ok);
  REQUIRE(l.size() == 3);
  CHECK(l.point(1).x() == 1.0);
  std::istringstream no_header("1,0,0\n2,0,1\n");
  CHECK(read_layout_csv(no_header).size() == 2);
  std::istringstream gap("1,0,0\n3,0,1\n");
  CHECK_THROWS_AS(read_layout_csv(gap), InvalidLayout);
  std::istringstream junk("1,0,zero\n");
  CHECK_THROWS_AS(read_layout_csv(junk), InvalidLayout);
}

TEST_CASE("nn graph on a line") {
  const auto g = build_nn_graph(SensorLayout::line(3));
  CHECK(g.edges() == std::vector<Edge>{{0, 1}, {1, 2}});
  CHECK(build_nn_graph(SensorLayout::line(1)).edges().empty());
}

TEST_CASE("nn graph on a unit square uses lowest-index ties") {
  const SensorLayout sq({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const auto g = build_nn_graph(sq);
  CHECK(g.edges() == std::vector<Edge>{{0, 1}, {0, 3}, {1, 2}});
  CHECK(g.edges() == brute_nn(sq));
  CHECK(g.is_forest());
}

TEST_CASE("nn graph is a forest with ceil(n/2)..n-1 edges") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    const int n = 2 + static_cast<int>(seed % 19);
    const auto layout = random_layout(n, rng);
    const auto g = build_nn_graph(layout);
    CHECK(g.is_forest());
    CHECK(static_cast<int>(g.edges().size()) >= (n + 1) / 2);
    CHECK(static_cast<int>(g.edges().size()) <= n - 1);
    CHECK(g.edges() == brute_nn(layout));
  }
}

TEST_CASE("graph basics") {
  const Graph g(4, {{2, 1}, {0, 1}, {1, 2}});
  CHECK(g.edges() == std::vector<Edge>{{0, 1}, {1, 2}});
  CHECK(g.has_edge(2, 1));
  CHECK_FALSE(g.has_edge(0, 2));
  CHECK(g.degree(1) == 2);
  CHECK(g.neighbors(1) == std::vector<int>{0, 2});
  CHECK_FALSE(Graph(3, {{0, 1}, {1, 2}, {0, 2}}).is_forest());
  CHECK_THROWS_AS(Graph(2, {{0, 0}}), ContractError);
  CHECK_THROWS_AS(Graph(2, {{0, 5}}), ContractError);
}

TEST_CASE("activity states") {
  const auto s = ActivityState::from_indices(std::vector<int>{0, 2}, 3);
  CHECK(s.bits() == 0b101u);
  CHECK(s.to_string() == "101");
  CHECK(ActivityState(0b010u, 3).to_string() == "010");
  CHECK(ActivityState(0b001u, 3).to_string() == "100");
  CHECK(s.active_count() == 2);
  CHECK(ActivityState::full(3).bits() == 7u);
  CHECK(is_independent(s, Graph::path(3)));
  CHECK_FALSE(is_independent(ActivityState(0b011u, 3), Graph::path(3)));
}

TEST_CASE("enumeration: path of three") {
  const auto states = enumerate_states(Graph::path(3));
  std::vector<std::uint32_t> bits;
  for (const auto& s : states) bits.push_back(s.bits());
  CHECK(bits == std::vector<std::uint32_t>{0b000, 0b001, 0b010, 0b100, 0b101});
  CHECK(state_index(states, ActivityState(0b101u, 3)) == 4);
  CHECK(state_index(states, ActivityState(0b011u, 3)) == -1);
}

TEST_CASE("enumeration: sizes") {
  CHECK(enumerate_states(Graph::edgeless(8)).size() == 256);
  CHECK(enumerate_states(Graph(3, {{0, 1}, {1, 2}, {0, 2}})).size() == 4);
  CHECK_THROWS_AS(enumerate_states(Graph::edgeless(25)), CapacityError);
  CHECK_THROWS_AS(enumerate_states(Graph::edgeless(10), 8), CapacityError);
}

TEST_CASE("enumeration matches brute force on random graphs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 10;
    std::vector<Edge> edges;
    std::bernoulli_distribution coin(0.3);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (coin(rng)) edges.push_back({i, j});
    const Graph g(n, edges);
    std::vector<std::uint32_t> expected;
    for (std::uint32_t b = 0; b < (1u << n); ++b) {
      bool ok = true;
      for (const auto& e : edges) ok = ok && !(((b >> e.a) & 1u) && ((b >> e.b) & 1u));
      if (ok) expected.push_back(b);
    }
    std::vector<std::uint32_t> got;
    for (const auto& s : enumerate_states(g)) got.push_back(s.bits());
    CHECK(got == expected);
  }
}
