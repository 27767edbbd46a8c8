#include "wsn/csma.hpp"

#include "wsn/errors.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace wsn {

BackoffConfig::BackoffConfig(Eigen::VectorXd r) : rates(std::move(r)) {
  if (rates.size() == 0) throw ContractError("back-off config needs at least one node");
  for (double v : rates)
    if (!(v > 0.0) || !std::isfinite(v)) throw ContractError("back-off rates must be positive and finite");
}

BackoffConfig BackoffConfig::uniform(int n, double nu) {
  return BackoffConfig(Eigen::VectorXd::Constant(n, nu));
}

BackoffConfig BackoffConfig::chain3(double eta) {
  Eigen::VectorXd r(3);
  r << eta, eta * (eta + 1.0), eta;
  return BackoffConfig(std::move(r));
}

EnergyBudget::EnergyBudget(double l, double training_fraction)
    : transmissions(l), alpha(training_fraction) {
  if (!(l > 0.0) || !std::isfinite(l)) throw ContractError("battery budget l must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ContractError("training fraction must lie in [0, 1]");
}

StationaryDistribution stationary_distribution(std::span<const ActivityState> states,
                                               const BackoffConfig& backoff) {
  if (states.empty()) throw ContractError("state space is empty");
  Eigen::VectorXd weight(static_cast<Eigen::Index>(states.size()));
  for (std::size_t s = 0; s < states.size(); ++s) {
    if (states[s].node_count() != backoff.size())
      throw ContractError("state length does not match back-off config");
    double w = 1.0;
    for (int i : states[s].active_indices()) w *= backoff.rates[i];
    weight[static_cast<Eigen::Index>(s)] = w;
  }
  const double z = weight.sum();
  return {weight / z, z};
}

Eigen::VectorXd throughput(std::span<const ActivityState> states, const Eigen::VectorXd& pi) {
  if (states.empty()) throw ContractError("state space is empty");
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(states.front().node_count());
  for (std::size_t s = 0; s < states.size(); ++s)
    for (int i : states[s].active_indices()) theta[i] += pi[static_cast<Eigen::Index>(s)];
  return theta;
}

Lifetimes lifetimes(const Eigen::VectorXd& theta, const EnergyBudget& budget) {
  Lifetimes out{Eigen::VectorXd(theta.size()), Eigen::VectorXd(theta.size())};
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double t = theta[i] > 0.0 ? budget.transmissions / theta[i]
                                    : std::numeric_limits<double>::infinity();
    out.total[i] = t;
    // whole battery on training leaves nothing for operation, even at T = inf
    out.operational[i] = budget.alpha == 1.0 ? 0.0 : (1.0 - budget.alpha) * t;
  }
  return out;
}

double common_lifetime(const Eigen::VectorXd& t, LifetimePolicy policy) {
  if (t.size() == 0) throw ContractError("no lifetimes");
  const double lo = t.minCoeff();
  const double hi = t.maxCoeff();
  if (policy == LifetimePolicy::Strict && std::abs(hi - lo) > 1e-9 * std::abs(lo))
    throw ContractError("node lifetimes differ; training length is ambiguous");
  return lo;
}

Eigen::VectorXd training_samples(const Eigen::VectorXd& pi, double lifetime, double alpha) {
  if (alpha == 0.0) return Eigen::VectorXd::Zero(pi.size());
  return alpha * lifetime * pi;
}

double expected_active(std::span<const ActivityState> states, const Eigen::VectorXd& pi) {
  double k = 0.0;
  for (std::size_t s = 0; s < states.size(); ++s)
    k += pi[static_cast<Eigen::Index>(s)] * states[s].active_count();
  return k;
}

double mean_training_samples(const Eigen::VectorXd& weights, const Eigen::VectorXd& counts) {
  if (weights.size() != counts.size()) throw ContractError("weights and counts differ in length");
  return weights.dot(counts);
}

Eigen::VectorXd StateGroups::sum(const Eigen::VectorXd& per_state) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(count());
  for (std::size_t s = 0; s < group_of_state.size(); ++s)
    out[group_of_state[s]] += per_state[static_cast<Eigen::Index>(s)];
  return out;
}

StateGroups group_states(std::span<const ActivityState> states, ClassifierPooling pooling) {
  StateGroups g;
  g.group_of_state.resize(states.size());
  if (pooling == ClassifierPooling::PerState) {
    for (std::size_t s = 0; s < states.size(); ++s) {
      g.group_of_state[s] = static_cast<int>(s);
      g.representative.push_back(static_cast<int>(s));
      g.labels.push_back(states[s].to_string());
    }
    return g;
  }
  std::map<int, int> by_count;
  for (const auto& st : states) by_count.emplace(st.active_count(), 0);
  int next = 0;
  for (auto& [k, id] : by_count) {
    id = next++;
    g.labels.push_back("k" + std::to_string(k));
  }
  g.representative.assign(by_count.size(), -1);
  for (std::size_t s = 0; s < states.size(); ++s) {
    const int id = by_count.at(states[s].active_count());
    g.group_of_state[s] = id;
    if (g.representative[static_cast<std::size_t>(id)] < 0)
      g.representative[static_cast<std::size_t>(id)] = static_cast<int>(s);
  }
  return g;
}

double CsmaAnalysis::expected_active() const { return wsn::expected_active(states, pi); }

double CsmaAnalysis::mean_training_samples() const {
  return wsn::mean_training_samples(group_weights, group_samples);
}

CsmaAnalysis analyze(std::vector<ActivityState> states, const BackoffConfig& backoff,
                     const EnergyBudget& budget, LifetimePolicy policy,
                     ClassifierPooling pooling) {
  CsmaAnalysis a;
  a.states = std::move(states);
  auto [pi, z] = stationary_distribution(a.states, backoff);
  a.pi = std::move(pi);
  a.z = z;
  a.throughput = wsn::throughput(a.states, a.pi);
  auto life = lifetimes(a.throughput, budget);
  a.lifetime = std::move(life.total);
  a.op_lifetime = std::move(life.operational);
  a.common_lifetime = wsn::common_lifetime(a.lifetime, policy);
  a.alpha = budget.alpha;
  a.samples = training_samples(a.pi, a.common_lifetime, budget.alpha);
  a.groups = group_states(a.states, pooling);
  a.group_samples = a.groups.sum(a.samples);
  a.group_weights = a.groups.sum(a.pi);
  return a;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
  return std::round(c);
}

IndepClosedForm indep_closed_forms(int n, double nu, const EnergyBudget& budget) {
  if (n < 1) throw ContractError("need at least one node");
  if (!(nu > 0.0)) throw ContractError("back-off rate must be positive");
  const double l = budget.transmissions;
  const double alpha = budget.alpha;
  IndepClosedForm f;
  f.pi_k.resize(n + 1);
  f.m_k.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    f.pi_k[k] = binomial(n, k) * std::pow(nu, k) / std::pow(nu + 1.0, n);
    f.m_k[k] = alpha * l * binomial(n, k) * std::pow(nu, k - 1) / std::pow(nu + 1.0, n - 1);
  }
  f.throughput = nu / (nu + 1.0);
  f.lifetime = l * (nu + 1.0) / nu;
  f.op_lifetime = (1.0 - alpha) * l * (nu + 1.0) / nu;
  return f;
}

Chain3ClosedForm chain3_closed_forms(double eta, const EnergyBudget& budget) {
  if (!(eta > 0.0)) throw ContractError("eta must be positive");
  const double l = budget.transmissions;
  const double alpha = budget.alpha;
  Chain3ClosedForm f;
  f.z = 2.0 * eta * eta + 3.0 * eta + 1.0;
  f.pi.resize(5);
  f.pi << 1.0, eta, eta * (eta + 1.0), eta, eta * eta;
  f.pi /= f.z;
  f.throughput = eta / (2.0 * eta + 1.0);
  f.lifetime = l * (2.0 * eta + 1.0) / eta;
  f.op_lifetime = (1.0 - alpha) * l * (2.0 * eta + 1.0) / eta;
  f.m.resize(5);
  f.m << alpha * l / (eta * eta + eta), alpha * l / (eta + 1.0), alpha * l,
      alpha * l / (eta + 1.0), alpha * l * eta / (eta + 1.0);
  return f;
}

}  // namespace wsn
