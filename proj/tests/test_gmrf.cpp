#include <doctest.h>

#include "wsn/errors.hpp"
#include "wsn/gmrf.hpp"

#include <random>

using namespace wsn;

namespace {

MeasurementModel chain(double g) { return build_model(Graph::path(3), 1.0, {g, g}); }

}  // namespace

TEST_CASE("decay functions") {
  CHECK(CorrelationDecay::iid()(1.0) == 0.0);
  CHECK(CorrelationDecay::constant(0.25)(3.0) == 0.25);
  CHECK(CorrelationDecay::exponential(2.0)(2.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(CorrelationDecay::exponential(2.0)(0.0) == 1.0);
  CHECK_THROWS_AS(CorrelationDecay::constant(1.0), ContractError);
  CHECK_THROWS_AS(CorrelationDecay::exponential(0.0), ContractError);
}

TEST_CASE("chain covariance: path products") {
  const auto m = chain(0.25);
  Eigen::Matrix3d expected;
  expected << 1, 0.25, 0.0625, 0.25, 1, 0.25, 0.0625, 0.25, 1;
  CHECK((m.sigma - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(std::abs(m.precision(0, 2)) < 1e-12);
  CHECK(std::abs(m.precision(0, 1)) > 1e-3);
}

TEST_CASE("chain distances") {
  const auto m = chain(0.25);
  CHECK(mahalanobis_sq(m, ActivityState::full(3)) == doctest::Approx(2.2).epsilon(1e-12));
  CHECK(mahalanobis_sq_closed_full(m) == doctest::Approx(2.2).epsilon(1e-12));
  CHECK(mahalanobis_sq(m, ActivityState(0b101u, 3)) == doctest::Approx(32.0 / 17.0).epsilon(1e-12));
  CHECK(mahalanobis_sq(m, ActivityState(0b010u, 3)) == doctest::Approx(1.0));
  CHECK(mahalanobis_sq(m, ActivityState::empty(3)) == 0.0);
}

TEST_CASE("noise variance scales distances") {
  const auto m = build_model(Graph::edgeless(4), 2.0, {});
  CHECK(mahalanobis_sq(m, ActivityState::full(4)) == doctest::Approx(2.0));
  CHECK(m.sigma(0, 0) == 2.0);
}

TEST_CASE("cycles are rejected") {
  const Graph tri(3, {{0, 1}, {1, 2}, {0, 2}});
  CHECK_THROWS_AS(build_model(tri, 1.0, {0.2, 0.2, 0.2}), UnsupportedStructure);
}

TEST_CASE("near-unit correlation on a tree stays positive definite") {
  const SensorLayout three({{0, 0}, {1e-3, 0}, {2e-3, 0}});
  const auto m = build_model(three, build_nn_graph(three), 1.0, CorrelationDecay::exponential(10.0));
  CHECK(m.sigma(0, 1) > 0.9999);
  CHECK(Eigen::LLT<Eigen::MatrixXd>(m.sigma).info() == Eigen::Success);
}

TEST_CASE("random forests: precision sparsity, closed form, submatrices, monotonicity") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 9;
    std::vector<Eigen::Vector2d> pts;
    for (int i = 0; i < n; ++i) pts.emplace_back(u(rng), u(rng));
    const SensorLayout layout(pts);
    const auto nn = build_nn_graph(layout);
    const double sigma_sq = 0.5 + u(rng);
    const auto m = build_model(layout, nn, sigma_sq, CorrelationDecay::exponential(0.3));

    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (!nn.has_edge(i, j)) CHECK(std::abs(m.precision(i, j)) < 1e-9 * m.precision.cwiseAbs().maxCoeff());

    const double full = mahalanobis_sq(m, ActivityState::full(n));
    CHECK(full == doctest::Approx(mahalanobis_sq_closed_full(m)).epsilon(1e-10));

    // independent route: explicit inverse of the principal submatrix
    const std::uint32_t bits = static_cast<std::uint32_t>(rng()) & ((1u << n) - 1u);
    const ActivityState s(bits, n);
    const auto idx = s.active_indices();
    Eigen::MatrixXd sub(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b) sub(a, b) = m.sigma(idx[a], idx[b]);
    const double direct = idx.empty() ? 0.0 : sub.inverse().sum();
    CHECK(mahalanobis_sq(m, s) == doctest::Approx(direct).epsilon(1e-10));

    // adding a node never decreases the distance
    for (int i = 0; i < n; ++i)
      if (!s.active(i)) CHECK(mahalanobis_sq(m, s.with(i)) >= mahalanobis_sq(m, s) - 1e-12);
  }
}

TEST_CASE("mahalanobis_sq_all keeps order") {
  const auto m = chain(0.25);
  const std::vector<ActivityState> states{ActivityState(0b101u, 3), ActivityState(0b001u, 3)};
  const auto d = mahalanobis_sq_all(m, states);
  CHECK(d[0] == doctest::Approx(32.0 / 17.0));
  CHECK(d[1] == doctest::Approx(1.0));
}
