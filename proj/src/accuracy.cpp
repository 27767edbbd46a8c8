#include "wsn/accuracy.hpp"

namespace wsn {

AccuracyBreakdown state_weighted_accuracy(const CsmaAnalysis& analysis,
                                          const std::vector<double>& delta_sq) {
  const auto& states = analysis.states;
  if (delta_sq.size() != states.size())
    throw ContractError("one Mahalanobis distance per state required");
  const auto& groups = analysis.groups;

  AccuracyBreakdown out;
  out.weights = analysis.pi;
  out.per_group.resize(groups.count());
  for (int g = 0; g < groups.count(); ++g) {
    const auto rep = static_cast<std::size_t>(groups.representative[static_cast<std::size_t>(g)]);
    out.per_group[g] =
        raudys_accuracy(delta_sq[rep], states[rep].active_count(), analysis.group_samples[g]);
  }
  out.per_state.resize(static_cast<Eigen::Index>(states.size()));
  double total = 0.0;
  for (std::size_t s = 0; s < states.size(); ++s) {
    const int g = groups.group_of_state[s];
    const auto rep = static_cast<std::size_t>(groups.representative[static_cast<std::size_t>(g)]);
    if (rep != s && (states[s].active_count() != states[rep].active_count() ||
                     std::abs(delta_sq[s] - delta_sq[rep]) > 1e-9 * std::max(1.0, delta_sq[rep])))
      throw ContractError("pooled states must share active count and class separation");
    const auto idx = static_cast<Eigen::Index>(s);
    out.per_state[idx] = out.per_group[g];
    total += analysis.pi[idx] * out.per_state[idx];
  }
  out.total = total;
  out.bayes_total = bayes_accuracy(analysis.pi, delta_sq);
  return out;
}

AccuracyBreakdown state_weighted_accuracy(const CsmaAnalysis& analysis,
                                          const MeasurementModel& model) {
  return state_weighted_accuracy(analysis, mahalanobis_sq_all(model, analysis.states));
}

double bayes_accuracy(const Eigen::VectorXd& pi, const std::vector<double>& delta_sq) {
  if (static_cast<std::size_t>(pi.size()) != delta_sq.size())
    throw ContractError("one Mahalanobis distance per state required");
  double a = 0.0;
  for (std::size_t s = 0; s < delta_sq.size(); ++s)
    a += pi[static_cast<Eigen::Index>(s)] * bayes_state_accuracy(delta_sq[s]);
  return a;
}

namespace {

// Phi( (sqrt(d2)/2) * [ (1 + 4 k / (m d2)) m / (m - k) ]^(-1/2) ), written out
// per term as the closed forms state it, with the m <= k clamp.
double fda_term(double d2, int k, double m) {
  if (k == 0 || m <= k) return 0.5;
  return normal_cdf(std::sqrt(d2) / 2.0 * std::pow((1.0 + 4.0 * k / (m * d2)) * m / (m - k), -0.5));
}

}  // namespace

double indep_accuracy_closed(int n, double nu, double noise_var, const EnergyBudget& budget) {
  const auto f = indep_closed_forms(n, nu, budget);
  const double sigma = std::sqrt(noise_var);
  double sum = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double mk = f.m_k[k];
    double term = 0.5;
    if (k > 0 && mk > k)
      term = normal_cdf(std::sqrt(double(k)) / (2.0 * sigma) *
                        std::pow((1.0 + 4.0 * noise_var / mk) * mk / (mk - k), -0.5));
    sum += binomial(n, k) * std::pow(nu, k) * term;
  }
  return sum / std::pow(nu + 1.0, n);
}

double chain3_accuracy_closed(double eta, double g12, double g23, double noise_var,
                              const EnergyBudget& budget) {
  const auto f = chain3_closed_forms(eta, budget);
  const double single = 1.0 / noise_var;
  const double pair = 2.0 / noise_var / (1.0 + g12 * g23);
  const double bracket = 0.5 + eta * fda_term(single, 1, f.m[1]) +
                         (eta * eta + eta) * fda_term(single, 1, f.m[2]) +
                         eta * fda_term(single, 1, f.m[3]) +
                         eta * eta * fda_term(pair, 2, f.m[4]);
  return bracket / (2.0 * eta * eta + 3.0 * eta + 1.0);
}

}  // namespace wsn
