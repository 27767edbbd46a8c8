#pragma once

#include "wsn/csma.hpp"
#include "wsn/errors.hpp"
#include "wsn/gmrf.hpp"

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <vector>

namespace wsn {

/// Standard normal CDF via erfc, which keeps full relative precision in the
/// lower tail.
template <typename Scalar>
Scalar normal_cdf(Scalar x) {
  using std::erfc;
  return Scalar(0.5) * erfc(-x / std::numbers::sqrt2_v<Scalar>);
}

/// Finite-sample generalization accuracy of a plug-in FDA classifier trained
/// on m samples of n_active Gaussian coordinates with squared Mahalanobis
/// distance delta_sq. m <= n_active (and n_active = 0) gives chance level.
///
/// m is real-valued: expected sample counts are fed in directly.
template <typename Scalar>
Scalar raudys_accuracy(Scalar delta_sq, int n_active, Scalar m) {
  if (!(delta_sq >= Scalar(0)) || n_active < 0 || !(m >= Scalar(0)))
    throw ContractError("raudys_accuracy: inputs must be nonnegative");
  const Scalar n = static_cast<Scalar>(n_active);
  if (n_active == 0 || m <= n || delta_sq == Scalar(0)) return Scalar(0.5);
  using std::sqrt;
  const Scalar inflation = (Scalar(1) + Scalar(4) * n / (m * delta_sq)) * m / (m - n);
  return normal_cdf(sqrt(delta_sq) / Scalar(2) / sqrt(inflation));
}

/// Accuracy of the Bayes rule with known likelihoods: Phi(delta / 2).
template <typename Scalar>
Scalar bayes_state_accuracy(Scalar delta_sq) {
  using std::sqrt;
  return normal_cdf(sqrt(delta_sq) / Scalar(2));
}

struct AccuracyBreakdown {
  Eigen::VectorXd per_state;
  Eigen::VectorXd per_group;  // one entry per classifier
  Eigen::VectorXd weights;
  double total = 0.5;
  double bayes_total = 0.5;
};

/// Weighted network accuracy: every state uses the classifier of its group,
/// trained on the group's pooled expected sample count. Groups that pool
/// several states must have identical active counts and distances.
AccuracyBreakdown state_weighted_accuracy(const CsmaAnalysis& analysis,
                                          const std::vector<double>& delta_sq);

AccuracyBreakdown state_weighted_accuracy(const CsmaAnalysis& analysis,
                                          const MeasurementModel& model);

double bayes_accuracy(const Eigen::VectorXd& pi, const std::vector<double>& delta_sq);

/// Network accuracy for n i.i.d. non-interfering nodes, summed over the
/// number of active nodes with pooled per-count sample sizes.
double indep_accuracy_closed(int n, double nu, double noise_var, const EnergyBudget& budget);

/// Network accuracy for the 3-node path preset with edge correlations g12, g23.
double chain3_accuracy_closed(double eta, double g12, double g23, double noise_var,
                              const EnergyBudget& budget);

}  // namespace wsn
