#pragma once

#include "wsn/errors.hpp"
#include "wsn/topology.hpp"

#include <Eigen/Dense>

#include <vector>

namespace wsn {

/// Correlation coefficient g(d) between nearest-neighbour sensors at distance d.
class CorrelationDecay {
 public:
  enum class Kind { Iid, Constant, Exponential };

  /// g(d) = 0 for d > 0.
  static CorrelationDecay iid() { return {Kind::Iid, 0.0}; }
  /// g(d) = c on every edge, 0 < c < 1.
  static CorrelationDecay constant(double c);
  /// g(d) = exp(-d / rho), rho > 0.
  static CorrelationDecay exponential(double rho);

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }
  double operator()(double distance) const;

 private:
  CorrelationDecay(Kind kind, double param) : kind_(kind), param_(param) {}
  Kind kind_;
  double param_;
};

struct EdgeCorrelation {
  Edge edge;
  double g;
};

/// Two-class Gaussian model over the sensor field: N(0, Sigma) vs N(1, Sigma)
/// with equal priors. Sigma is the tree-structured completion of the
/// nearest-neighbour correlations, so its inverse vanishes off the forest.
struct MeasurementModel {
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd precision;
  double noise_var = 1.0;
  std::vector<EdgeCorrelation> edge_correlations;

  int size() const { return static_cast<int>(sigma.rows()); }
  Eigen::VectorXd mu0() const { return Eigen::VectorXd::Zero(size()); }
  Eigen::VectorXd mu1() const { return Eigen::VectorXd::Ones(size()); }

  /// Principal submatrix of Sigma on the active nodes of `state`.
  Eigen::MatrixXd marginal_covariance(const ActivityState& state) const;
};

MeasurementModel build_model(const SensorLayout& layout, const Graph& nn_graph, double noise_var,
                             const CorrelationDecay& decay);

/// Builds directly from per-edge correlations (used by presets that fix g on
/// edges regardless of geometry).
MeasurementModel build_model(const Graph& forest, double noise_var,
                             const std::vector<double>& edge_g);

/// 1' S^-1 1 for a covariance block S; zero for an empty block. Throws
/// ModelError if the smallest eigenvalue is below `singular_tol`.
template <typename Derived>
typename Derived::Scalar quadratic_form_ones(const Eigen::MatrixBase<Derived>& cov,
                                             typename Derived::Scalar singular_tol) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (cov.rows() == 0) return Scalar(0);
  const Matrix m = cov;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() < singular_tol)
    throw ModelError("covariance block is singular");
  const Vector ones = Vector::Ones(m.rows());
  return ones.dot(m.ldlt().solve(ones));
}

/// Squared Mahalanobis distance between the class means restricted to the
/// active nodes of `state`.
double mahalanobis_sq(const MeasurementModel& model, const ActivityState& state);

/// n/s2 - (2/s2) * sum over forest edges of g/(1+g); the all-active distance.
double mahalanobis_sq_closed_full(const MeasurementModel& model);

/// mahalanobis_sq for every state of a list, in order.
std::vector<double> mahalanobis_sq_all(const MeasurementModel& model,
                                       const std::vector<ActivityState>& states);

}  // namespace wsn
