#pragma once

#include "wsn/accuracy.hpp"
#include "wsn/csma.hpp"
#include "wsn/gmrf.hpp"
#include "wsn/topology.hpp"

#include <Eigen/Core>

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace wsn {

/// Node back-off rates as polynomials in one scalar rate parameter r;
/// coefficients are stored lowest degree first.
struct RateMap {
  std::vector<std::vector<double>> node_polynomials;

  static RateMap uniform(int n);  // nu_i = r
  static RateMap chain3();        // (r, r(r+1), r)

  BackoffConfig at(double r) const;
  int degree(int node) const;
  double leading_coefficient(int node) const;
};

enum class ScenarioKind { Indep, Chain3, Custom };

/// Everything fixed across a sweep: geometry, graphs, measurement model,
/// battery, and how states share classifiers.
struct Scenario {
  ScenarioKind kind;
  SensorLayout layout;
  Graph nn_graph;
  Graph conflict;
  MeasurementModel model;
  double transmissions;  // l
  RateMap rate_map;
  ClassifierPooling pooling;
  LifetimePolicy policy = LifetimePolicy::MinLifetime;
  std::vector<ActivityState> states;
  std::vector<double> delta_sq;

  /// n i.i.d. nodes with an edgeless conflict graph; states with equal
  /// active counts share a classifier.
  static Scenario indep(int n, double l, double noise_var);
  /// Three nodes on a line, path conflict graph, equal-throughput rates and
  /// correlation g on both edges.
  static Scenario chain3(double l, double noise_var, double g);
  /// Arbitrary layout; conflict graph defaults to the nearest-neighbour graph
  /// and every node shares the rate parameter.
  static Scenario custom(SensorLayout layout, double l, double noise_var,
                         const CorrelationDecay& decay, std::optional<Graph> conflict = {});

  int size() const { return layout.size(); }
  EnergyBudget budget(double alpha) const { return {transmissions, alpha}; }
  CsmaAnalysis analyze(double rate, double alpha) const;
  StateGroups groups() const { return group_states(states, pooling); }
};

struct SweepRow {
  double rate = 0.0;
  double alpha = 0.0;
  double U = 0.0;
  double k_bar = 0.0;
  double m_bar = 0.0;
  double A = 0.5;
  double A_bayes = 0.5;
  Eigen::VectorXd per_state_A;  // one per classifier group
  Eigen::VectorXd group_m;      // pooled expected samples per classifier group
};

SweepRow evaluate(const Scenario& scenario, double rate, double alpha);

std::vector<SweepRow> sweep(const Scenario& scenario, const std::vector<double>& rate_grid,
                            double alpha);

/// `points` log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int points);
/// lo, lo + step, ... up to hi (inclusive within half a step).
std::vector<double> linear_grid(double lo, double hi, double step);

struct FrontierPoint {
  double alpha;
  double rate;
  double U;
  double A;
  double A_bayes;
  bool on_envelope = false;
};

struct Frontier {
  std::vector<std::vector<FrontierPoint>> curves;  // one per alpha, in input order
  std::vector<FrontierPoint> bayes;                // alpha = 0, accuracy A_bayes
};

/// Parametric (U, A) curves, with the Pareto upper-right envelope over all
/// FDA curves marked.
Frontier frontier(const Scenario& scenario, const std::vector<double>& rate_grid,
                  const std::vector<double>& alphas);

struct InfiniteRateLimit {
  double U;
  double A;
  double A_bayes;
  double m_bar;
  Eigen::VectorXd pi;  // limiting stationary distribution
};

/// Limit of the analysis as the rate parameter grows without bound: the mass
/// concentrates on the states of maximal degree in r.
InfiniteRateLimit limit_at_infinite_rate(const Scenario& scenario, double alpha);

struct OptimumReport {
  double beta = 0.0;
  double alpha_star = std::numeric_limits<double>::quiet_NaN();
  double rate_star = std::numeric_limits<double>::quiet_NaN();  // +inf when unbounded
  double U_star = std::numeric_limits<double>::quiet_NaN();
  double A_star = std::numeric_limits<double>::quiet_NaN();
  bool feasible = false;

  bool unbounded() const { return feasible && rate_star == std::numeric_limits<double>::infinity(); }
};

struct OptimizerGrid {
  std::vector<double> alphas;
  std::vector<double> rates;
  double rate_cap = 1e4;

  /// 90 alphas in [0.01, 0.90], 200 log-spaced rates in [1e-2, 1e2].
  static OptimizerGrid defaults();
};

/// Precomputed U and A over alpha x (rates + rate_cap) plus the infinite-rate
/// limit per alpha; shared across accuracy targets.
class TradeoffSurface {
 public:
  TradeoffSurface(const Scenario& scenario, OptimizerGrid grid);

  const Scenario& scenario() const { return scenario_; }
  const OptimizerGrid& grid() const { return grid_; }

  /// max U subject to A >= beta: grid search, golden-section refinement
  /// around a finite incumbent, then comparison against the rate cap and the
  /// infinite-rate limit.
  OptimumReport optimize(double beta) const;

 private:
  Scenario scenario_;
  OptimizerGrid grid_;
  Eigen::MatrixXd U_;  // alpha x rate, last column at rate_cap
  Eigen::MatrixXd A_;
  std::vector<InfiniteRateLimit> limits_;
};

OptimumReport optimize(const Scenario& scenario, double beta,
                       const OptimizerGrid& grid = OptimizerGrid::defaults());

struct ThresholdScan {
  std::vector<OptimumReport> rows;
  /// Smallest beta (to within `resolution`) at which the optimum becomes
  /// unbounded; NaN if it never does on the scanned range.
  double transition_beta = std::numeric_limits<double>::quiet_NaN();
};

ThresholdScan threshold_scan(const Scenario& scenario, const std::vector<double>& betas,
                             const OptimizerGrid& grid = OptimizerGrid::defaults(),
                             double resolution = 1e-3);

/// Maximizes f on [lo, hi] by golden-section search.
double golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                               int iterations = 60);

}  // namespace wsn
