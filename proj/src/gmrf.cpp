#include "wsn/gmrf.hpp"

#include "wsn/errors.hpp"

#include <cmath>
#include <queue>

namespace wsn {

CorrelationDecay CorrelationDecay::constant(double c) {
  if (!(c > 0.0 && c < 1.0)) throw ContractError("constant correlation must lie in (0, 1)");
  return {Kind::Constant, c};
}

CorrelationDecay CorrelationDecay::exponential(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ContractError("decay scale must be positive");
  return {Kind::Exponential, rho};
}

double CorrelationDecay::operator()(double distance) const {
  if (distance <= 0.0) return 1.0;
  switch (kind_) {
    case Kind::Iid:
      return 0.0;
    case Kind::Constant:
      return param_;
    case Kind::Exponential:
      return std::exp(-distance / param_);
  }
  return 0.0;
}

Eigen::MatrixXd MeasurementModel::marginal_covariance(const ActivityState& state) const {
  if (state.node_count() != size()) throw ContractError("state length does not match model");
  const auto idx = state.active_indices();
  return sigma(idx, idx);
}

MeasurementModel build_model(const Graph& forest, double noise_var,
                             const std::vector<double>& edge_g) {
  if (!(noise_var > 0.0) || !std::isfinite(noise_var))
    throw ContractError("noise variance must be positive");
  if (!forest.is_forest())
    throw UnsupportedStructure("covariance completion requires an acyclic nearest-neighbour graph");
  if (edge_g.size() != forest.edges().size()) throw ContractError("one correlation per edge");

  const int n = forest.node_count();
  Eigen::MatrixXd g_edge = Eigen::MatrixXd::Zero(n, n);
  MeasurementModel model;
  model.noise_var = noise_var;
  for (std::size_t k = 0; k < edge_g.size(); ++k) {
    const auto& e = forest.edges()[k];
    if (!(edge_g[k] >= 0.0 && edge_g[k] < 1.0)) throw ContractError("edge correlation outside [0, 1)");
    g_edge(e.a, e.b) = g_edge(e.b, e.a) = edge_g[k];
    model.edge_correlations.push_back({e, edge_g[k]});
  }

  // Correlation between i and j is the product of edge correlations along the
  // unique forest path; zero across components.
  Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(n, n);
  for (int root = 0; root < n; ++root) {
    corr(root, root) = 1.0;
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    seen[static_cast<std::size_t>(root)] = true;
    std::queue<int> frontier;
    frontier.push(root);
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      for (int v : forest.neighbors(u)) {
        if (seen[static_cast<std::size_t>(v)]) continue;
        seen[static_cast<std::size_t>(v)] = true;
        corr(root, v) = corr(root, u) * g_edge(u, v);
        frontier.push(v);
      }
    }
  }
  model.sigma = noise_var * corr;

  Eigen::LLT<Eigen::MatrixXd> llt(model.sigma);
  if (llt.info() != Eigen::Success) throw ModelError("covariance is not positive definite");
  model.precision = llt.solve(Eigen::MatrixXd::Identity(n, n));
  return model;
}

MeasurementModel build_model(const SensorLayout& layout, const Graph& nn_graph, double noise_var,
                             const CorrelationDecay& decay) {
  if (layout.size() != nn_graph.node_count())
    throw ContractError("layout and graph disagree on node count");
  std::vector<double> g;
  g.reserve(nn_graph.edges().size());
  for (const auto& e : nn_graph.edges()) g.push_back(decay(layout.distance(e.a, e.b)));
  return build_model(nn_graph, noise_var, g);
}

double mahalanobis_sq(const MeasurementModel& model, const ActivityState& state) {
  if (state.active_count() == 0) return 0.0;
  return quadratic_form_ones(model.marginal_covariance(state), 1e-12 * model.noise_var);
}

double mahalanobis_sq_closed_full(const MeasurementModel& model) {
  double sum = 0.0;
  for (const auto& ec : model.edge_correlations) sum += ec.g / (1.0 + ec.g);
  return (model.size() - 2.0 * sum) / model.noise_var;
}

std::vector<double> mahalanobis_sq_all(const MeasurementModel& model,
                                       const std::vector<ActivityState>& states) {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(mahalanobis_sq(model, s));
  return out;
}

}  // namespace wsn
