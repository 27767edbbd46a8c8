#include "wsn/tradeoff.hpp"

#include "wsn/errors.hpp"

#include <algorithm>
#include <cmath>

namespace wsn {

RateMap RateMap::uniform(int n) {
  return {std::vector<std::vector<double>>(static_cast<std::size_t>(n), {0.0, 1.0})};
}

RateMap RateMap::chain3() { return {{{0.0, 1.0}, {0.0, 1.0, 1.0}, {0.0, 1.0}}}; }

BackoffConfig RateMap::at(double r) const {
  Eigen::VectorXd rates(static_cast<Eigen::Index>(node_polynomials.size()));
  for (std::size_t i = 0; i < node_polynomials.size(); ++i) {
    double v = 0.0;
    const auto& c = node_polynomials[i];
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * r + *it;
    rates[static_cast<Eigen::Index>(i)] = v;
  }
  return BackoffConfig(std::move(rates));
}

int RateMap::degree(int node) const {
  const auto& c = node_polynomials[static_cast<std::size_t>(node)];
  for (int d = static_cast<int>(c.size()) - 1; d >= 0; --d)
    if (c[static_cast<std::size_t>(d)] != 0.0) return d;
  throw ContractError("rate polynomial is identically zero");
}

double RateMap::leading_coefficient(int node) const {
  return node_polynomials[static_cast<std::size_t>(node)][static_cast<std::size_t>(degree(node))];
}

Scenario Scenario::indep(int n, double l, double noise_var) {
  auto layout = SensorLayout::line(n);
  auto nn = build_nn_graph(layout);
  auto model = build_model(layout, nn, noise_var, CorrelationDecay::iid());
  Scenario s{ScenarioKind::Indep, std::move(layout), std::move(nn), Graph::edgeless(n),
             std::move(model), l, RateMap::uniform(n), ClassifierPooling::ByActiveCount, LifetimePolicy::MinLifetime, {}, {}};
  s.states = enumerate_states(s.conflict);
  s.delta_sq = mahalanobis_sq_all(s.model, s.states);
  return s;
}

Scenario Scenario::chain3(double l, double noise_var, double g) {
  auto layout = SensorLayout::line(3);
  auto nn = build_nn_graph(layout);
  auto model = build_model(nn, noise_var, std::vector<double>(nn.edges().size(), g));
  Graph conflict = nn;
  Scenario s{ScenarioKind::Chain3, std::move(layout), std::move(nn), std::move(conflict),
             std::move(model), l, RateMap::chain3(), ClassifierPooling::PerState, LifetimePolicy::MinLifetime, {}, {}};
  s.states = enumerate_states(s.conflict);
  s.delta_sq = mahalanobis_sq_all(s.model, s.states);
  return s;
}

Scenario Scenario::custom(SensorLayout layout, double l, double noise_var,
                          const CorrelationDecay& decay, std::optional<Graph> conflict) {
  auto nn = build_nn_graph(layout);
  auto model = build_model(layout, nn, noise_var, decay);
  Graph cg = conflict ? *conflict : nn;
  if (cg.node_count() != layout.size())
    throw ContractError("conflict graph and layout disagree on node count");
  const int n = layout.size();
  Scenario s{ScenarioKind::Custom, std::move(layout), std::move(nn), std::move(cg),
             std::move(model), l, RateMap::uniform(n), ClassifierPooling::PerState, LifetimePolicy::MinLifetime, {}, {}};
  s.states = enumerate_states(s.conflict);
  s.delta_sq = mahalanobis_sq_all(s.model, s.states);
  return s;
}

CsmaAnalysis Scenario::analyze(double rate, double alpha) const {
  return wsn::analyze(states, rate_map.at(rate), budget(alpha), policy, pooling);
}

SweepRow evaluate(const Scenario& scenario, double rate, double alpha) {
  const auto a = scenario.analyze(rate, alpha);
  const auto acc = state_weighted_accuracy(a, scenario.delta_sq);
  SweepRow row;
  row.rate = rate;
  row.alpha = alpha;
  row.U = a.op_lifetime.minCoeff();
  row.k_bar = a.expected_active();
  row.m_bar = a.mean_training_samples();
  row.A = acc.total;
  row.A_bayes = acc.bayes_total;
  row.per_state_A = acc.per_group;
  row.group_m = a.group_samples;
  return row;
}

std::vector<SweepRow> sweep(const Scenario& scenario, const std::vector<double>& rate_grid,
                            double alpha) {
  for (std::size_t j = 0; j < rate_grid.size(); ++j) {
    if (!(rate_grid[j] > 0.0)) throw ContractError("rates must be positive");
    if (j > 0 && rate_grid[j] < rate_grid[j - 1]) throw ContractError("rate grid must be sorted");
  }
  std::vector<SweepRow> rows;
  rows.reserve(rate_grid.size());
  for (double r : rate_grid) rows.push_back(evaluate(scenario, r, alpha));
  return rows;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi >= lo) || points < 1) throw ContractError("invalid log grid");
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(points));
  if (points == 1) return {lo};
  const double llo = std::log(lo);
  const double step = (std::log(hi) - llo) / (points - 1);
  for (int j = 0; j < points; ++j) g.push_back(j + 1 == points ? hi : std::exp(llo + j * step));
  g.front() = lo;
  return g;
}

std::vector<double> linear_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw ContractError("invalid linear grid");
  const int count = static_cast<int>(std::floor((hi - lo) / step + 0.5)) + 1;
  std::vector<double> g;
  for (int j = 0; j < count; ++j) g.push_back(lo + j * step);
  return g;
}

Frontier frontier(const Scenario& scenario, const std::vector<double>& rate_grid,
                  const std::vector<double>& alphas) {
  Frontier f;
  for (double alpha : alphas) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ContractError("frontier alphas must lie in (0, 1)");
    std::vector<FrontierPoint> curve;
    for (const auto& row : sweep(scenario, rate_grid, alpha))
      curve.push_back({alpha, row.rate, row.U, row.A, row.A_bayes});
    f.curves.push_back(std::move(curve));
  }
  for (const auto& row : sweep(scenario, rate_grid, 0.0))
    f.bayes.push_back({0.0, row.rate, row.U, row.A_bayes, row.A_bayes});

  std::vector<FrontierPoint*> all;
  for (auto& c : f.curves)
    for (auto& p : c) all.push_back(&p);
  for (auto* p : all) {
    p->on_envelope = std::none_of(all.begin(), all.end(), [p](const FrontierPoint* q) {
      return q->U >= p->U && q->A >= p->A && (q->U > p->U || q->A > p->A);
    });
  }
  return f;
}

InfiniteRateLimit limit_at_infinite_rate(const Scenario& scenario, double alpha) {
  const auto& states = scenario.states;
  const auto& map = scenario.rate_map;
  std::vector<int> degree(states.size());
  Eigen::VectorXd coeff(static_cast<Eigen::Index>(states.size()));
  int top = 0;
  for (std::size_t s = 0; s < states.size(); ++s) {
    int d = 0;
    double c = 1.0;
    for (int i : states[s].active_indices()) {
      d += map.degree(i);
      c *= map.leading_coefficient(i);
    }
    degree[s] = d;
    coeff[static_cast<Eigen::Index>(s)] = c;
    top = std::max(top, d);
  }
  InfiniteRateLimit lim;
  lim.pi = Eigen::VectorXd::Zero(coeff.size());
  for (std::size_t s = 0; s < states.size(); ++s)
    if (degree[s] == top) lim.pi[static_cast<Eigen::Index>(s)] = coeff[static_cast<Eigen::Index>(s)];
  lim.pi /= lim.pi.sum();

  const auto budget = scenario.budget(alpha);
  const auto theta = throughput(states, lim.pi);
  const auto life = lifetimes(theta, budget);
  const double T = common_lifetime(life.total, scenario.policy);

  CsmaAnalysis a;
  a.states = states;
  a.groups = scenario.groups();
  a.pi = lim.pi;
  a.throughput = theta;
  a.lifetime = life.total;
  a.op_lifetime = life.operational;
  a.common_lifetime = T;
  a.alpha = alpha;
  a.samples = training_samples(lim.pi, T, alpha);
  a.group_samples = a.groups.sum(a.samples);
  a.group_weights = a.groups.sum(lim.pi);
  const auto acc = state_weighted_accuracy(a, scenario.delta_sq);
  lim.U = life.operational.minCoeff();
  lim.A = acc.total;
  lim.A_bayes = acc.bayes_total;
  lim.m_bar = a.mean_training_samples();
  return lim;
}

OptimizerGrid OptimizerGrid::defaults() {
  return {linear_grid(0.01, 0.90, 0.01), log_grid(1e-2, 1e2, 200), 1e4};
}

double golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                               int iterations) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < iterations; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

TradeoffSurface::TradeoffSurface(const Scenario& scenario, OptimizerGrid grid)
    : scenario_(scenario), grid_(std::move(grid)) {
  if (grid_.alphas.empty() || grid_.rates.empty()) throw ContractError("optimizer grids must be non-empty");
  if (!(grid_.rate_cap > 0.0) || !std::isfinite(grid_.rate_cap))
    throw ContractError("rate cap must be positive and finite");
  std::sort(grid_.rates.begin(), grid_.rates.end());
  std::erase_if(grid_.rates, [&](double r) { return r >= grid_.rate_cap; });
  if (grid_.rates.empty()) throw ContractError("every grid rate lies at or above the rate cap");

  const auto na = static_cast<Eigen::Index>(grid_.alphas.size());
  const auto nr = static_cast<Eigen::Index>(grid_.rates.size());
  U_.resize(na, nr + 1);
  A_.resize(na, nr + 1);
  for (Eigen::Index i = 0; i < na; ++i) {
    const double alpha = grid_.alphas[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j <= nr; ++j) {
      const double rate = j < nr ? grid_.rates[static_cast<std::size_t>(j)] : grid_.rate_cap;
      const auto row = evaluate(scenario_, rate, alpha);
      U_(i, j) = row.U;
      A_(i, j) = row.A;
    }
    limits_.push_back(limit_at_infinite_rate(scenario_, alpha));
  }
}

OptimumReport TradeoffSurface::optimize(double beta) const {
  OptimumReport rep;
  rep.beta = beta;
  const auto na = U_.rows();
  const auto nr = U_.cols() - 1;  // finite grid columns; column nr is the cap

  Eigen::Index bi = -1, bj = -1;
  for (Eigen::Index i = 0; i < na; ++i)
    for (Eigen::Index j = 0; j < nr; ++j)
      if (A_(i, j) >= beta && (bi < 0 || U_(i, j) > U_(bi, bj))) {
        bi = i;
        bj = j;
      }

  double best_U = -1.0;
  if (bi >= 0) {
    double alpha = grid_.alphas[static_cast<std::size_t>(bi)];
    double rate = grid_.rates[static_cast<std::size_t>(bj)];
    best_U = U_(bi, bj);
    double best_A = A_(bi, bj);

    auto penalised = [&](double a, double r) {
      const auto row = evaluate(scenario_, r, a);
      return row.A >= beta ? row.U : -1.0 - (beta - row.A);
    };
    auto try_point = [&](double a, double r) {
      const auto row = evaluate(scenario_, r, a);
      if (row.A >= beta && row.U > best_U) {
        alpha = a;
        rate = r;
        best_U = row.U;
        best_A = row.A;
      }
    };
    const auto ai = static_cast<std::size_t>(bi);
    const double a_lo = grid_.alphas[ai > 0 ? ai - 1 : ai];
    const double a_hi = grid_.alphas[std::min(ai + 1, grid_.alphas.size() - 1)];
    if (a_hi > a_lo)
      try_point(golden_section_maximize([&](double a) { return penalised(a, rate); }, a_lo, a_hi),
                rate);
    const auto rj = static_cast<std::size_t>(bj);
    const double r_lo = std::log(grid_.rates[rj > 0 ? rj - 1 : rj]);
    const double r_hi = std::log(grid_.rates[std::min(rj + 1, grid_.rates.size() - 1)]);
    if (r_hi > r_lo)
      try_point(alpha, std::exp(golden_section_maximize(
                           [&](double lr) { return penalised(alpha, std::exp(lr)); }, r_lo, r_hi)));

    rep.feasible = true;
    rep.alpha_star = alpha;
    rep.rate_star = rate;
    rep.U_star = best_U;
    rep.A_star = best_A;
  }

  // pushing the rate to the cap, or past it, wins: the optimal rate is unbounded
  auto consider_unbounded = [&](double U, double A, double alpha) {
    if (A >= beta && U > best_U) {
      best_U = U;
      rep.feasible = true;
      rep.alpha_star = alpha;
      rep.rate_star = std::numeric_limits<double>::infinity();
      rep.U_star = U;
      rep.A_star = A;
    }
  };
  for (Eigen::Index i = 0; i < na; ++i) {
    const double alpha = grid_.alphas[static_cast<std::size_t>(i)];
    consider_unbounded(U_(i, nr), A_(i, nr), alpha);
    const auto& lim = limits_[static_cast<std::size_t>(i)];
    consider_unbounded(lim.U, lim.A, alpha);
  }
  return rep;
}

OptimumReport optimize(const Scenario& scenario, double beta, const OptimizerGrid& grid) {
  return TradeoffSurface(scenario, grid).optimize(beta);
}

ThresholdScan threshold_scan(const Scenario& scenario, const std::vector<double>& betas,
                             const OptimizerGrid& grid, double resolution) {
  const TradeoffSurface surface(scenario, grid);
  ThresholdScan scan;
  for (double b : betas) scan.rows.push_back(surface.optimize(b));
  for (std::size_t j = 0; j < scan.rows.size(); ++j) {
    if (!scan.rows[j].unbounded()) continue;
    if (j == 0) {
      scan.transition_beta = scan.rows[j].beta;
      break;
    }
    double lo = scan.rows[j - 1].beta;
    double hi = scan.rows[j].beta;
    while (hi - lo > resolution) {
      const double mid = 0.5 * (lo + hi);
      (surface.optimize(mid).unbounded() ? hi : lo) = mid;
    }
    scan.transition_beta = hi;
    break;
  }
  return scan;
}

}  // namespace wsn
