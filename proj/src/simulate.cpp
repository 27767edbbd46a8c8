#include "wsn/simulate.hpp"

#include "wsn/accuracy.hpp"
#include "wsn/errors.hpp"

#include <bit>
#include <cmath>
#include <iomanip>
#include <limits>

namespace wsn {

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(root) ^ (stream * 0xd1b54a32d192ed03ULL + 1));
}

CtmcProcess::CtmcProcess(const Graph& conflict, const BackoffConfig& backoff,
                         std::uint32_t initial_bits)
    : n_(conflict.node_count()), rates_(backoff.rates), bits_(initial_bits) {
  if (backoff.size() != n_) throw ContractError("back-off config does not match conflict graph");
  if (!is_independent(ActivityState(initial_bits, n_), conflict))
    throw ContractError("initial state is not independent");
  for (int i = 0; i < n_; ++i) neighbor_masks_.push_back(conflict.neighbor_mask(i));
}

double CtmcProcess::exit_rate() const {
  // per-node rates: 1 when active, nu_i when idle and unblocked, else 0
  double total = 0.0;
  for (int i = 0; i < n_; ++i) {
    if ((bits_ >> i) & 1u)
      total += 1.0;
    else if ((bits_ & neighbor_masks_[static_cast<std::size_t>(i)]) == 0u)
      total += rates_[i];
  }
  return total;
}

std::optional<CtmcEvent> CtmcProcess::step(Rng& rng, double t_limit) {
  const double total = exit_rate();
  std::exponential_distribution<double> exp1(1.0);
  const double dt = exp1(rng) / total;
  if (time_ + dt > t_limit) {
    time_ = t_limit;
    return std::nullopt;
  }
  time_ += dt;

  double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  int chosen = -1;
  for (int i = 0; i < n_; ++i) {
    double r = 0.0;
    if ((bits_ >> i) & 1u)
      r = 1.0;
    else if ((bits_ & neighbor_masks_[static_cast<std::size_t>(i)]) == 0u)
      r = rates_[i];
    if (r == 0.0) continue;
    chosen = i;
    if (u < r) break;
    u -= r;
  }
  const bool activation = ((bits_ >> chosen) & 1u) == 0u;
  bits_ ^= 1u << chosen;
  return CtmcEvent{time_, activation, chosen, bits_};
}

namespace {

// Time-weighted state occupancy bookkeeping for a running process.
class OccupancyTracker {
 public:
  explicit OccupancyTracker(const std::vector<ActivityState>& states)
      : states_(states), time_in_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(states.size()))) {}

  void record(std::uint32_t bits, double dwell) {
    const int n = states_.front().node_count();
    const int idx = state_index(states_, ActivityState(bits, n));
    time_in_[idx] += dwell;
  }

  Eigen::VectorXd fractions() const {
    const double total = time_in_.sum();
    return total > 0.0 ? Eigen::VectorXd(time_in_ / total) : time_in_;
  }

 private:
  const std::vector<ActivityState>& states_;
  Eigen::VectorXd time_in_;
};

// Advances `proc` to t_end, charging dwell times to `occ`.
std::uint64_t advance(CtmcProcess& proc, double t_end, Rng& rng, OccupancyTracker& occ,
                      std::vector<CtmcEvent>* trajectory = nullptr) {
  std::uint64_t fired = 0;
  while (true) {
    const std::uint32_t before = proc.bits();
    const double t0 = proc.time();
    const auto ev = proc.step(rng, t_end);
    occ.record(before, proc.time() - t0);
    if (!ev) return fired;
    ++fired;
    if (trajectory) trajectory->push_back(*ev);
  }
}

}  // namespace

CtmcOccupancy simulate_ctmc(const Graph& conflict, const BackoffConfig& backoff, Horizon horizon,
                            std::uint64_t seed, std::vector<CtmcEvent>* trajectory,
                            OccupancyEstimator estimator) {
  if (!(horizon.value > 0.0)) throw ContractError("simulation horizon must be positive");
  CtmcOccupancy out;
  out.states = enumerate_states(conflict);
  out.seed = seed;
  OccupancyTracker occ(out.states);
  CtmcProcess proc(conflict, backoff);
  Rng rng(seed);

  const bool by_events = horizon.kind == Horizon::Kind::Events;
  const double t_end = by_events ? std::numeric_limits<double>::infinity() : horizon.value;
  const auto target = by_events ? static_cast<std::uint64_t>(horizon.value)
                                : std::numeric_limits<std::uint64_t>::max();
  while (out.events < target) {
    const std::uint32_t before = proc.bits();
    const double t0 = proc.time();
    const double mean_dwell = 1.0 / proc.exit_rate();
    const auto ev = proc.step(rng, t_end);
    if (!ev) {
      // horizon reached mid-visit: charge the elapsed fraction of the visit
      occ.record(before, estimator == OccupancyEstimator::SampledHoldingTime
                             ? proc.time() - t0
                             : std::min(proc.time() - t0, mean_dwell));
      break;
    }
    occ.record(before, estimator == OccupancyEstimator::SampledHoldingTime ? proc.time() - t0
                                                                          : mean_dwell);
    ++out.events;
    if (trajectory) trajectory->push_back(*ev);
  }
  out.elapsed = proc.time();
  out.occupancy = occ.fractions();
  return out;
}

double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) throw ContractError("distributions differ in support size");
  return 0.5 * (p - q).cwiseAbs().sum();
}

void write_trajectory_csv(std::ostream& out, std::span<const CtmcEvent> events, int node_count) {
  out << "t,event_type,node,state_bits\n";
  const auto old_precision = out.precision(12);
  for (const auto& ev : events) {
    out << ev.t << ',' << (ev.activation ? "activate" : "deactivate") << ',' << ev.node + 1 << ','
        << ActivityState(ev.bits, node_count).to_string() << '\n';
  }
  out.precision(old_precision);
}

MarginalSampler::MarginalSampler(const MeasurementModel& model, const ActivityState& state) {
  const Eigen::MatrixXd cov = model.marginal_covariance(state);
  if (cov.rows() == 0) return;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw ModelError("marginal covariance is not positive definite");
  factor_ = llt.matrixL();
}

void MarginalSampler::draw(int label, Rng& rng, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(dimension());
  for (int j = 0; j < dimension(); ++j) z[j] = normal(rng);
  row = (factor_ * z).transpose();
  if (label == 1) row.array() += 1.0;
}

Dataset MarginalSampler::sample(int count, Rng& rng) const {
  if (count < 0) throw ContractError("sample count must be nonnegative");
  Dataset d;
  d.x.resize(count, dimension());
  d.y.resize(static_cast<std::size_t>(count));
  std::bernoulli_distribution coin(0.5);
  for (int r = 0; r < count; ++r) {
    const int label = coin(rng) ? 1 : 0;
    d.y[static_cast<std::size_t>(r)] = label;
    draw(label, rng, d.x.row(r));
  }
  return d;
}

Dataset sample_measurements(const MeasurementModel& model, const ActivityState& state, int count,
                            std::uint64_t seed) {
  Rng rng(seed);
  return MarginalSampler(model, state).sample(count, rng);
}

std::optional<TrainedClassifier> train_fda(const Dataset& data) {
  const int k = data.dimension();
  Eigen::VectorXd mean[2] = {Eigen::VectorXd::Zero(k), Eigen::VectorXd::Zero(k)};
  int count[2] = {0, 0};
  for (int r = 0; r < data.size(); ++r) {
    const int c = data.y[static_cast<std::size_t>(r)];
    mean[c] += data.x.row(r).transpose();
    ++count[c];
  }
  if (count[0] == 0 || count[1] == 0) return std::nullopt;
  mean[0] /= count[0];
  mean[1] /= count[1];

  Eigen::MatrixXd scatter[2] = {Eigen::MatrixXd::Zero(k, k), Eigen::MatrixXd::Zero(k, k)};
  for (int r = 0; r < data.size(); ++r) {
    const int c = data.y[static_cast<std::size_t>(r)];
    const Eigen::VectorXd d = data.x.row(r).transpose() - mean[c];
    scatter[c].selfadjointView<Eigen::Lower>().rankUpdate(d);
  }
  Eigen::MatrixXd pooled = scatter[0] / count[0] + scatter[1] / count[1];
  pooled = pooled.selfadjointView<Eigen::Lower>();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(pooled, Eigen::EigenvaluesOnly);
  const double top = eig.eigenvalues().maxCoeff();
  if (!(top > 0.0) || eig.eigenvalues().minCoeff() <= 1e-12 * top) return std::nullopt;

  TrainedClassifier clf;
  clf.w = pooled.ldlt().solve(mean[1] - mean[0]);
  clf.offset = -0.5 * clf.w.dot(mean[0] + mean[1]);
  if (!clf.w.allFinite()) return std::nullopt;
  return clf;
}

double conditional_accuracy(const TrainedClassifier& clf, const MeasurementModel& model,
                            const ActivityState& state) {
  if (clf.w.size() != state.active_count())
    throw ContractError("classifier dimension does not match active node count");
  const Eigen::MatrixXd cov = model.marginal_covariance(state);
  const double var = clf.w.dot(cov * clf.w);
  if (!(var > 0.0)) return 0.5;
  const double s = std::sqrt(var);
  const double score1 = clf.w.sum() + clf.offset;  // mean of w'x + offset under class 1
  const double score0 = clf.offset;
  return 0.5 * normal_cdf(score1 / s) + 0.5 * normal_cdf(-score0 / s);
}

namespace {

MonteCarloEstimate summarize(const std::vector<double>& values) {
  MonteCarloEstimate e;
  e.trials = static_cast<int>(values.size());
  if (values.empty()) return e;
  double sum = 0.0;
  for (double v : values) sum += v;
  e.mean = sum / e.trials;
  if (e.trials > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - e.mean) * (v - e.mean);
    e.std_error = std::sqrt(ss / (e.trials - 1) / e.trials);
  }
  return e;
}

}  // namespace

MonteCarloEstimate empirical_generalization_accuracy(const MeasurementModel& model,
                                                     const ActivityState& state, int m,
                                                     int trials, std::uint64_t seed) {
  if (trials < 1) throw ContractError("need at least one trial");
  const MarginalSampler sampler(model, state);
  std::vector<double> acc;
  acc.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    const auto clf = state.active_count() > 0 ? train_fda(sampler.sample(m, rng)) : std::nullopt;
    acc.push_back(clf ? conditional_accuracy(*clf, model, state) : 0.5);
  }
  return summarize(acc);
}

SimOutcome end_to_end_sim(const Graph& conflict, const MeasurementModel& model,
                          const BackoffConfig& backoff, const EnergyBudget& budget,
                          const EndToEndOptions& options, std::uint64_t seed) {
  const int n = conflict.node_count();
  if (model.size() != n) throw ContractError("model and conflict graph disagree on node count");
  const auto analysis =
      analyze(enumerate_states(conflict), backoff, budget, options.policy, options.pooling);
  const auto& states = analysis.states;
  const auto& groups = analysis.groups;
  const std::size_t n_states = states.size();

  SimOutcome out;
  out.states = states;
  out.seed = seed;
  out.realized_m.assign(n_states, 0);
  out.realized_group_m.assign(static_cast<std::size_t>(groups.count()), 0);
  out.training_transmissions.assign(static_cast<std::size_t>(n), 0);
  out.realized_transmissions.assign(static_cast<std::size_t>(n), 0);
  out.op_lifetime = Eigen::VectorXd::Zero(n);

  Rng ctmc_rng(derive_seed(seed, 1));
  Rng data_rng(derive_seed(seed, 2));

  // start in stationarity
  std::discrete_distribution<std::size_t> initial(analysis.pi.data(),
                                                  analysis.pi.data() + analysis.pi.size());
  CtmcProcess proc(conflict, backoff, states[initial(ctmc_rng)].bits());
  OccupancyTracker occ(states);

  const double battery = budget.transmissions;
  auto& used = out.realized_transmissions;
  auto has_charge = [&](int i) {
    return !options.battery_limited || static_cast<double>(used[static_cast<std::size_t>(i)]) < battery;
  };

  // training stage
  std::vector<std::optional<MarginalSampler>> samplers(n_states);
  std::vector<std::vector<std::pair<int, Eigen::RowVectorXd>>> group_rows(
      static_cast<std::size_t>(groups.count()));
  std::bernoulli_distribution coin(0.5);
  std::vector<int> first_label(static_cast<std::size_t>(groups.count()), 0);
  out.training_epochs = static_cast<int>(std::floor(budget.alpha * analysis.common_lifetime));
  for (int t = 1; t <= out.training_epochs; ++t) {
    advance(proc, t, ctmc_rng, occ);
    std::uint32_t observed = 0;
    for (int i = 0; i < n; ++i) {
      if (((proc.bits() >> i) & 1u) && has_charge(i)) {
        observed |= 1u << i;
        ++used[static_cast<std::size_t>(i)];
        ++out.training_transmissions[static_cast<std::size_t>(i)];
      }
    }
    const auto s = static_cast<std::size_t>(state_index(states, ActivityState(observed, n)));
    ++out.realized_m[s];
    const int g = groups.group_of_state[s];
    ++out.realized_group_m[static_cast<std::size_t>(g)];
    if (!samplers[s]) samplers[s].emplace(model, states[s]);
    // alternate labels within a group so both classes stay balanced
    auto& rows_g = group_rows[static_cast<std::size_t>(g)];
    if (rows_g.empty()) first_label[static_cast<std::size_t>(g)] = coin(data_rng) ? 1 : 0;
    const int label = (first_label[static_cast<std::size_t>(g)] + static_cast<int>(rows_g.size())) % 2;
    Eigen::RowVectorXd row(states[s].active_count());
    samplers[s]->draw(label, data_rng, row);
    group_rows[static_cast<std::size_t>(g)].emplace_back(label, std::move(row));
  }

  // one classifier per group
  std::vector<std::optional<TrainedClassifier>> classifiers(static_cast<std::size_t>(groups.count()));
  for (int g = 0; g < groups.count(); ++g) {
    const auto& rows = group_rows[static_cast<std::size_t>(g)];
    const int k = states[static_cast<std::size_t>(groups.representative[static_cast<std::size_t>(g)])]
                      .active_count();
    if (k == 0 || static_cast<int>(rows.size()) <= k) continue;
    Dataset d;
    d.x.resize(static_cast<Eigen::Index>(rows.size()), k);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      d.y.push_back(rows[r].first);
      d.x.row(static_cast<Eigen::Index>(r)) = rows[r].second;
    }
    classifiers[static_cast<std::size_t>(g)] = train_fda(d);
  }
  out.per_state_accuracy.resize(static_cast<Eigen::Index>(n_states));
  double total = 0.0;
  for (std::size_t s = 0; s < n_states; ++s) {
    const auto& clf = classifiers[static_cast<std::size_t>(groups.group_of_state[s])];
    const double a = clf ? conditional_accuracy(*clf, model, states[s]) : 0.5;
    out.per_state_accuracy[static_cast<Eigen::Index>(s)] = a;
    total += analysis.pi[static_cast<Eigen::Index>(s)] * a;
  }
  out.total_accuracy = total;

  // operational stage: run until every battery is drained
  std::vector<bool> drained(static_cast<std::size_t>(n), false);
  int remaining = n;
  for (int i = 0; i < n; ++i) {
    if (static_cast<double>(used[static_cast<std::size_t>(i)]) >= battery) {
      drained[static_cast<std::size_t>(i)] = true;
      --remaining;
    }
  }
  const double epoch_cap = out.training_epochs + 1000.0 * (analysis.lifetime.maxCoeff() + 1.0);
  for (int t = out.training_epochs + 1; remaining > 0 && t <= epoch_cap; ++t) {
    advance(proc, t, ctmc_rng, occ);
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      if (drained[ui] || ((proc.bits() >> i) & 1u) == 0u) continue;
      ++used[ui];
      if (static_cast<double>(used[ui]) >= battery) {
        drained[ui] = true;
        --remaining;
        out.op_lifetime[i] = t - out.training_epochs;
      }
    }
  }
  out.occupancy = occ.fractions();
  return out;
}

MonteCarloEstimate replicate_end_to_end(const Graph& conflict, const MeasurementModel& model,
                                        const BackoffConfig& backoff, const EnergyBudget& budget,
                                        const EndToEndOptions& options, int replications,
                                        std::uint64_t seed) {
  if (replications < 1) throw ContractError("need at least one replication");
  std::vector<double> acc;
  acc.reserve(static_cast<std::size_t>(replications));
  for (int r = 0; r < replications; ++r)
    acc.push_back(end_to_end_sim(conflict, model, backoff, budget, options,
                                 derive_seed(seed, static_cast<std::uint64_t>(r)))
                      .total_accuracy);
  return summarize(acc);
}

}  // namespace wsn
