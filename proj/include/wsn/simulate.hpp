#pragma once

#include "wsn/csma.hpp"
#include "wsn/gmrf.hpp"
#include "wsn/topology.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <vector>

namespace wsn {

using Rng = std::mt19937_64;

/// Independent stream seed for (root, stream) via splitmix64 mixing.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

struct Horizon {
  enum class Kind { Events, Time };
  Kind kind;
  double value;

  static Horizon events(std::uint64_t n) { return {Kind::Events, static_cast<double>(n)}; }
  static Horizon time(double t) { return {Kind::Time, t}; }
};

struct CtmcEvent {
  double t;
  bool activation;
  int node;
  std::uint32_t bits;  // state after the event
};

/// Event-driven CSMA activity process: an inactive, unblocked node activates
/// at rate nu_i, an active node deactivates at rate 1.
class CtmcProcess {
 public:
  CtmcProcess(const Graph& conflict, const BackoffConfig& backoff, std::uint32_t initial_bits = 0);

  std::uint32_t bits() const { return bits_; }
  double time() const { return time_; }
  /// Total rate of leaving the current state.
  double exit_rate() const;

  /// Fires the next event, or parks at `t_limit` and returns nullopt when the
  /// next event would come later. Discarding the overshooting clock is exact
  /// for exponential clocks.
  std::optional<CtmcEvent> step(Rng& rng,
                                double t_limit = std::numeric_limits<double>::infinity());
  void run_until(double t_end, Rng& rng) {
    while (step(rng, t_end)) {
    }
  }

 private:
  int n_;
  std::vector<std::uint32_t> neighbor_masks_;
  Eigen::VectorXd rates_;
  std::uint32_t bits_;
  double time_ = 0.0;
};

struct CtmcOccupancy {
  std::vector<ActivityState> states;  // canonical order of the conflict graph
  Eigen::VectorXd occupancy;          // time-weighted fraction per state
  std::uint64_t events = 0;
  double elapsed = 0.0;
  std::uint64_t seed = 0;
};

/// How each visit is charged to the occupancy estimate.
enum class OccupancyEstimator {
  ExpectedHoldingTime,  // 1 / exit rate per visit (lower variance)
  SampledHoldingTime,   // the realized dwell time
};

/// Simulates from the empty state; `trajectory`, when given, receives every event.
CtmcOccupancy simulate_ctmc(const Graph& conflict, const BackoffConfig& backoff, Horizon horizon,
                            std::uint64_t seed, std::vector<CtmcEvent>* trajectory = nullptr,
                            OccupancyEstimator estimator = OccupancyEstimator::ExpectedHoldingTime);

double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

/// Columns t,event_type,node,state_bits; nodes 1-based, bits node 1 first.
void write_trajectory_csv(std::ostream& out, std::span<const CtmcEvent> events, int node_count);

/// Labelled measurements restricted to one state's active nodes (rows are samples).
struct Dataset {
  Eigen::MatrixXd x;
  std::vector<int> y;

  int size() const { return static_cast<int>(y.size()); }
  int dimension() const { return static_cast<int>(x.cols()); }
};

/// Draws class-conditional Gaussian vectors for a fixed state.
class MarginalSampler {
 public:
  MarginalSampler(const MeasurementModel& model, const ActivityState& state);

  int dimension() const { return static_cast<int>(factor_.rows()); }
  /// Fills `row` with one draw for `label`.
  void draw(int label, Rng& rng, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) const;
  Dataset sample(int count, Rng& rng) const;

 private:
  Eigen::MatrixXd factor_;  // lower Cholesky factor of the marginal covariance
};

Dataset sample_measurements(const MeasurementModel& model, const ActivityState& state, int count,
                            std::uint64_t seed);

/// step(w'x + offset): label 1 on positive sign.
struct TrainedClassifier {
  Eigen::VectorXd w;
  double offset = 0.0;

  int predict(const Eigen::VectorXd& x) const { return w.dot(x) + offset > 0.0 ? 1 : 0; }
};

/// Fisher discriminant from per-class ML means and covariances; nullopt when a
/// class is missing or the pooled scatter is singular.
std::optional<TrainedClassifier> train_fda(const Dataset& data);

/// Exact accuracy of a linear rule under the true class-conditional Gaussians
/// of `state`; 0.5 for a zero-variance projection.
double conditional_accuracy(const TrainedClassifier& clf, const MeasurementModel& model,
                            const ActivityState& state);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int trials = 0;
};

/// Mean accuracy of FDA trained on m fresh samples, over `trials` repetitions;
/// degenerate trainings count 0.5.
MonteCarloEstimate empirical_generalization_accuracy(const MeasurementModel& model,
                                                     const ActivityState& state, int m,
                                                     int trials, std::uint64_t seed);

struct SimOutcome {
  std::vector<ActivityState> states;
  Eigen::VectorXd occupancy;               // time-weighted over both stages
  std::vector<int> realized_m;             // training samples per state
  std::vector<int> realized_group_m;       // per classifier
  std::vector<long> training_transmissions;
  std::vector<long> realized_transmissions;  // training + operation
  Eigen::VectorXd per_state_accuracy;
  double total_accuracy = 0.5;
  Eigen::VectorXd op_lifetime;             // epochs until each battery drained
  int training_epochs = 0;
  std::uint64_t seed = 0;
};

struct EndToEndOptions {
  ClassifierPooling pooling = ClassifierPooling::PerState;
  LifetimePolicy policy = LifetimePolicy::MinLifetime;
  bool battery_limited = true;
};

/// Training stage (one epoch per unit time for floor(alpha * T) epochs), one
/// FDA classifier per group, then the operational stage until every battery
/// is drained. Accuracy is weighted by the analytic stationary distribution.
SimOutcome end_to_end_sim(const Graph& conflict, const MeasurementModel& model,
                          const BackoffConfig& backoff, const EnergyBudget& budget,
                          const EndToEndOptions& options, std::uint64_t seed);

MonteCarloEstimate replicate_end_to_end(const Graph& conflict, const MeasurementModel& model,
                                        const BackoffConfig& backoff, const EnergyBudget& budget,
                                        const EndToEndOptions& options, int replications,
                                        std::uint64_t seed);

}  // namespace wsn
