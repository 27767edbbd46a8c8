#pragma once

#include "wsn/topology.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace wsn {

/// Per-node back-off rates nu_i (mean back-off 1/nu_i, mean transmission 1).
struct BackoffConfig {
  Eigen::VectorXd rates;

  explicit BackoffConfig(Eigen::VectorXd r);
  static BackoffConfig uniform(int n, double nu);
  /// nu1 = nu3 = eta, nu2 = eta(eta+1): equal throughput on the 3-node path.
  static BackoffConfig chain3(double eta);
  int size() const { return static_cast<int>(rates.size()); }
};

/// Battery of `transmissions` per node, of which a fraction `alpha` is spent
/// acquiring training data.
struct EnergyBudget {
  double transmissions;
  double alpha;

  EnergyBudget(double l, double training_fraction);
};

struct StationaryDistribution {
  Eigen::VectorXd pi;
  double z;
};

/// Product form: pi(w) proportional to prod_i nu_i^{w_i} over the listed states.
StationaryDistribution stationary_distribution(std::span<const ActivityState> states,
                                               const BackoffConfig& backoff);

/// Fraction of time each node transmits.
Eigen::VectorXd throughput(std::span<const ActivityState> states, const Eigen::VectorXd& pi);

struct Lifetimes {
  Eigen::VectorXd total;        // l / theta_i, +inf for zero throughput
  Eigen::VectorXd operational;  // (1 - alpha) * total
};

Lifetimes lifetimes(const Eigen::VectorXd& throughput, const EnergyBudget& budget);

/// Which lifetime governs the length of the training stage when nodes differ.
enum class LifetimePolicy {
  MinLifetime,  // the network trains for alpha * min_i T_i
  Strict,       // unequal lifetimes are a contract error
};

double common_lifetime(const Eigen::VectorXd& lifetimes, LifetimePolicy policy);

/// Expected training samples per state, alpha * T * pi(w).
Eigen::VectorXd training_samples(const Eigen::VectorXd& pi, double lifetime, double alpha);

double expected_active(std::span<const ActivityState> states, const Eigen::VectorXd& pi);

/// Probability-weighted mean sample count, sum_j w_j m_j.
double mean_training_samples(const Eigen::VectorXd& weights, const Eigen::VectorXd& counts);

/// How states share classifiers (and therefore training samples).
enum class ClassifierPooling {
  PerState,       // one classifier per activity state
  ByActiveCount,  // states with the same number of active nodes share one
};

struct StateGroups {
  std::vector<int> group_of_state;
  std::vector<int> representative;  // first state index of each group
  std::vector<std::string> labels;  // "k3" or the state's bit string

  int count() const { return static_cast<int>(representative.size()); }
  /// Sums a per-state vector into per-group totals.
  Eigen::VectorXd sum(const Eigen::VectorXd& per_state) const;
};

StateGroups group_states(std::span<const ActivityState> states, ClassifierPooling pooling);

struct CsmaAnalysis {
  std::vector<ActivityState> states;
  StateGroups groups;
  Eigen::VectorXd pi;
  double z = 0.0;
  Eigen::VectorXd throughput;
  Eigen::VectorXd lifetime;
  Eigen::VectorXd op_lifetime;
  double common_lifetime = 0.0;
  double alpha = 0.0;
  Eigen::VectorXd samples;        // m_w per state
  Eigen::VectorXd group_samples;  // pooled m per classifier
  Eigen::VectorXd group_weights;  // pi summed per classifier

  double expected_active() const;
  double mean_training_samples() const;
};

CsmaAnalysis analyze(std::vector<ActivityState> states, const BackoffConfig& backoff,
                     const EnergyBudget& budget,
                     LifetimePolicy policy = LifetimePolicy::MinLifetime,
                     ClassifierPooling pooling = ClassifierPooling::PerState);

/// Closed forms for n mutually non-interfering nodes sharing rate nu.
struct IndepClosedForm {
  Eigen::VectorXd pi_k;  // probability of exactly k active, k = 0..n
  double throughput;
  double lifetime;
  double op_lifetime;
  Eigen::VectorXd m_k;   // training samples summed over states with k active
};

IndepClosedForm indep_closed_forms(int n, double nu, const EnergyBudget& budget);

/// Closed forms for the 3-node path with the equal-throughput preset; state
/// order (0, e1, e2, e3, e1+e3).
struct Chain3ClosedForm {
  double z;
  Eigen::VectorXd pi;
  double throughput;
  double lifetime;
  double op_lifetime;
  Eigen::VectorXd m;
};

Chain3ClosedForm chain3_closed_forms(double eta, const EnergyBudget& budget);

double binomial(int n, int k);

}  // namespace wsn
