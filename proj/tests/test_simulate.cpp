#include <doctest.h>

#include "wsn/accuracy.hpp"
#include "wsn/errors.hpp"
#include "wsn/simulate.hpp"

#include <sstream>

using namespace wsn;

namespace {

MeasurementModel iid(int k) { return build_model(Graph::edgeless(k), 1.0, {}); }

}  // namespace

TEST_CASE("derive_seed separates streams") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(5, 9) == derive_seed(5, 9));
}

TEST_CASE("ctmc respects the conflict graph") {
  const Graph g = Graph::path(4);
  std::vector<CtmcEvent> traj;
  simulate_ctmc(g, BackoffConfig::uniform(4, 2.0), Horizon::events(5000), 3, &traj);
  REQUIRE(traj.size() == 5000);
  double prev = 0.0;
  for (const auto& e : traj) {
    CHECK(is_independent(ActivityState(e.bits, 4), g));
    CHECK(e.t >= prev);
    prev = e.t;
  }
}

TEST_CASE("occupancy converges to the product form") {
  const auto b = BackoffConfig::chain3(1.0);
  const auto states = enumerate_states(Graph::path(3));
  const auto pi = stationary_distribution(states, b).pi;
  const auto short_run = simulate_ctmc(Graph::path(3), b, Horizon::events(10000), 1);
  const auto long_run = simulate_ctmc(Graph::path(3), b, Horizon::events(1000000), 1);
  CHECK(total_variation(long_run.occupancy, pi) < 0.01);
  CHECK(total_variation(long_run.occupancy, pi) < total_variation(short_run.occupancy, pi));
  const auto sampled = simulate_ctmc(Graph::path(3), b, Horizon::events(1000000), 2, nullptr,
                                     OccupancyEstimator::SampledHoldingTime);
  CHECK(total_variation(sampled.occupancy, pi) < 0.01);
}

TEST_CASE("edgeless nodes are active half the time at nu = 1") {
  const auto r = simulate_ctmc(Graph::edgeless(8), BackoffConfig::uniform(8, 1.0), Horizon::events(1000000), 4);
  const auto th = throughput(r.states, r.occupancy);
  for (int i = 0; i < 8; ++i) CHECK(std::abs(th[i] - 0.5) < 0.01);
}

TEST_CASE("time horizon") {
  const auto r = simulate_ctmc(Graph::path(3), BackoffConfig::chain3(1.0), Horizon::time(50.0), 5);
  CHECK(r.elapsed == doctest::Approx(50.0));
}

TEST_CASE("trajectory csv") {
  std::vector<CtmcEvent> ev{{0.5, true, 0, 0b001u}, {1.25, false, 0, 0u}};
  std::ostringstream out;
  write_trajectory_csv(out, ev, 3);
  CHECK(out.str() == "t,event_type,node,state_bits\n0.5,activate,1,100\n1.25,deactivate,1,000\n");
}

TEST_CASE("sampling") {
  const auto m = iid(4);
  CHECK(sample_measurements(m, ActivityState::full(4), 0, 1).size() == 0);
  const auto d = sample_measurements(m, ActivityState::full(4), 100000, 2);
  Eigen::VectorXd mean[2] = {Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(4)};
  int count[2] = {0, 0};
  for (int r = 0; r < d.size(); ++r) {
    mean[d.y[r]] += d.x.row(r).transpose();
    ++count[d.y[r]];
  }
  for (int c = 0; c < 2; ++c) {
    mean[c] /= count[c];
    for (int i = 0; i < 4; ++i) CHECK(std::abs(mean[c][i] - c) < 3.0 / std::sqrt(count[c]));
  }
  CHECK(std::abs(count[0] - 50000) < 1000);

  const auto chain = build_model(Graph::path(3), 1.0, {0.25, 0.25});
  const auto e = sample_measurements(chain, ActivityState(0b101u, 3), 100000, 3);
  Eigen::MatrixXd centered = e.x;
  for (int r = 0; r < e.size(); ++r) centered.row(r).array() -= e.y[r];
  const Eigen::MatrixXd c = centered.transpose() * centered / e.size();
  CHECK(std::abs(c(0, 1) / std::sqrt(c(0, 0) * c(1, 1)) - 1.0 / 16) < 0.01);
}

TEST_CASE("fda training") {
  Dataset d;
  d.x.resize(4, 1);
  d.x << -0.01, 0.01, 0.99, 1.01;
  d.y = {0, 0, 1, 1};
  const auto clf = train_fda(d);
  REQUIRE(clf);
  CHECK(-clf->offset / clf->w[0] == doctest::Approx(0.5));
  CHECK(clf->predict(Eigen::VectorXd::Constant(1, 0.6)) == 1);
  d.y = {1, 1, 1, 1};
  CHECK_FALSE(train_fda(d));
  Dataset flat;
  flat.x = Eigen::MatrixXd::Zero(4, 2);
  flat.y = {0, 1, 0, 1};
  CHECK_FALSE(train_fda(flat));
}

TEST_CASE("conditional accuracy of the Bayes rule") {
  const auto chain = build_model(Graph::path(3), 1.0, {0.25, 0.25});
  for (std::uint32_t bits : {0b001u, 0b101u, 0b111u}) {
    const ActivityState s(bits, 3);
    const Eigen::MatrixXd cov = chain.marginal_covariance(s);
    TrainedClassifier clf;
    clf.w = cov.ldlt().solve(Eigen::VectorXd::Ones(cov.rows()));
    clf.offset = -0.5 * clf.w.sum();
    CHECK(conditional_accuracy(clf, chain, s) ==
          doctest::Approx(bayes_state_accuracy(mahalanobis_sq(chain, s))).epsilon(1e-12));
  }
  TrainedClassifier flat;
  flat.w = Eigen::Vector2d(1.0, -1.0);
  CHECK(conditional_accuracy(flat, iid(2), ActivityState::full(2)) == doctest::Approx(0.5));
  CHECK_THROWS_AS(conditional_accuracy(flat, iid(3), ActivityState::full(3)), ContractError);
}

TEST_CASE("fda approaches the Bayes rule") {
  const auto e = empirical_generalization_accuracy(iid(4), ActivityState::full(4), 10000, 50, 6);
  CHECK(std::abs(e.mean - normal_cdf(1.0)) < 0.005);
  const auto tiny = empirical_generalization_accuracy(iid(4), ActivityState::full(4), 4, 2000, 7);
  CHECK(std::abs(tiny.mean - 0.5) < 0.02);
  const auto small = empirical_generalization_accuracy(iid(2), ActivityState::full(2), 10, 2000, 8);
  CHECK(small.mean > 0.5);
}

TEST_CASE("end to end: reproducible and battery-limited") {
  const auto model = build_model(Graph::path(3), 1.0, {0.25, 0.25});
  const EnergyBudget budget(10.0, 0.4);
  const auto a = end_to_end_sim(Graph::path(3), model, BackoffConfig::chain3(1.0), budget, {}, 99);
  const auto b = end_to_end_sim(Graph::path(3), model, BackoffConfig::chain3(1.0), budget, {}, 99);
  CHECK(a.total_accuracy == b.total_accuracy);
  CHECK(a.realized_m == b.realized_m);
  CHECK(a.realized_transmissions == b.realized_transmissions);
  CHECK(a.op_lifetime == b.op_lifetime);
  CHECK(a.training_epochs == 12);
  int sum = 0;
  for (int m : a.realized_m) sum += m;
  CHECK(sum == 12);
  for (long t : a.realized_transmissions) CHECK(t == 10);
}

TEST_CASE("end to end: no training means chance accuracy") {
  const auto model = iid(4);
  const EnergyBudget budget(20.0, 0.0);
  double life = 0.0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    const auto o = end_to_end_sim(Graph::edgeless(4), model, BackoffConfig::uniform(4, 1.0), budget,
                                  {ClassifierPooling::ByActiveCount}, derive_seed(1, r));
    CHECK(o.total_accuracy == 0.5);
    CHECK(o.training_epochs == 0);
    for (long t : o.realized_transmissions) CHECK(t == 20);
    life += o.op_lifetime.mean();
  }
  // each node needs l active epochs at activity 1/2
  CHECK(life / reps == doctest::Approx(40.0).epsilon(0.05));
}
