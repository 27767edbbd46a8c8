#include <doctest.h>

#include "wsn/accuracy.hpp"
#include "wsn/errors.hpp"
#include "wsn/tradeoff.hpp"

using namespace wsn;

TEST_CASE("grids") {
  const auto g = log_grid(0.01, 100.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g[2] == doctest::Approx(1.0));
  CHECK(g.back() == 100.0);
  const auto a = linear_grid(0.1, 0.9, 0.1);
  CHECK(a.size() == 9);
  CHECK(a.back() == doctest::Approx(0.9));
  CHECK(log_grid(2.0, 2.0, 1) == std::vector<double>{2.0});
}

TEST_CASE("rate maps") {
  const auto c = RateMap::chain3();
  const auto b = c.at(2.0);
  CHECK(b.rates[1] == doctest::Approx(6.0));
  CHECK(c.degree(1) == 2);
  CHECK(c.degree(0) == 1);
  CHECK(c.leading_coefficient(1) == 1.0);
}

TEST_CASE("evaluate agrees with the closed forms") {
  const auto s = Scenario::indep(8, 100.0, 1.0);
  const auto row = evaluate(s, 1.0, 0.2);
  CHECK(row.A == doctest::Approx(0.684249975431230).epsilon(1e-12));
  CHECK(row.U == doctest::Approx(160.0));
  CHECK(row.k_bar == doctest::Approx(4.0));
  CHECK(row.per_state_A.size() == 9);
  const auto c = Scenario::chain3(10.0, 1.0, 0.25);
  CHECK(evaluate(c, 1.0, 0.4).A == doctest::Approx(0.567046774705707).epsilon(1e-12));
  CHECK(evaluate(c, 1.0, 0.4).U == doctest::Approx(18.0));
}

TEST_CASE("sweep validates the grid") {
  const auto s = Scenario::indep(4, 100.0, 1.0);
  CHECK_THROWS_AS(sweep(s, {1.0, 0.5}, 0.2), ContractError);
  CHECK_THROWS_AS(sweep(s, {0.0, 0.5}, 0.2), ContractError);
  CHECK(sweep(s, {0.5, 1.0}, 0.2).size() == 2);
}

TEST_CASE("bayes accuracy rises with the rate, FDA stays below") {
  const auto s = Scenario::indep(8, 100.0, 1.0);
  const auto rows = sweep(s, log_grid(0.01, 100.0, 200), 0.2);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].A_bayes >= rows[i - 1].A_bayes - 1e-15);
  for (const auto& r : rows) CHECK(r.A <= r.A_bayes);
}

TEST_CASE("infinite-rate limits") {
  const auto s = Scenario::indep(8, 100.0, 1.0);
  const auto lim = limit_at_infinite_rate(s, 0.2);
  CHECK(lim.U == doctest::Approx(80.0));
  CHECK(lim.m_bar == doctest::Approx(20.0));
  CHECK(lim.A == doctest::Approx(raudys_accuracy(8.0, 8, 20.0)));
  const auto far = evaluate(s, 1e6, 0.2);
  CHECK(far.U == doctest::Approx(lim.U).epsilon(1e-3));
  CHECK(far.A == doctest::Approx(lim.A).epsilon(1e-3));

  // chain3: mass goes to e2 and e1+e3 (both degree 2 in r)
  const auto c = Scenario::chain3(10.0, 1.0, 0.25);
  const auto cl = limit_at_infinite_rate(c, 0.4);
  CHECK(cl.pi[2] == doctest::Approx(0.5));
  CHECK(cl.pi[4] == doctest::Approx(0.5));
  CHECK(cl.U == doctest::Approx(12.0));
}

TEST_CASE("frontier envelope") {
  const auto s = Scenario::indep(8, 100.0, 1.0);
  const auto f = frontier(s, log_grid(0.05, 20.0, 30), {0.1, 0.5});
  REQUIRE(f.curves.size() == 2);
  CHECK(f.bayes.size() == 30);
  std::vector<FrontierPoint> all;
  for (const auto& c : f.curves) all.insert(all.end(), c.begin(), c.end());
  for (const auto& p : all) {
    bool dominated = false;
    for (const auto& q : all)
      dominated = dominated || (q.U >= p.U && q.A >= p.A && (q.U > p.U || q.A > p.A));
    CHECK(p.on_envelope == !dominated);
  }
}

TEST_CASE("golden section") {
  const double x = golden_section_maximize([](double t) { return -(t - 0.3) * (t - 0.3); }, 0.0, 1.0);
  CHECK(x == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("optimizer edge cases") {
  const auto s = Scenario::indep(8, 100.0, 1.0);
  OptimizerGrid grid{linear_grid(0.01, 0.9, 0.01), log_grid(0.01, 100.0, 60), 1e4};
  const TradeoffSurface surface(s, grid);
  const auto hi = surface.optimize(0.999);
  CHECK_FALSE(hi.feasible);
  const auto lo = surface.optimize(0.5);
  CHECK(lo.feasible);
  CHECK(lo.alpha_star == doctest::Approx(0.01));

  // refinement never loses to the best feasible grid point
  for (double beta : {0.6, 0.65, 0.7, 0.75}) {
    const auto r = surface.optimize(beta);
    REQUIRE(r.feasible);
    CHECK(r.A_star >= beta - 1e-9);
    double best = 0.0;
    for (double a : grid.alphas)
      for (double nu : grid.rates) {
        const auto row = evaluate(s, nu, a);
        if (row.A >= beta) best = std::max(best, row.U);
      }
    CHECK(r.U_star >= best * (1 - 1e-12));
  }
}
